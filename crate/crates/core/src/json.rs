//! Deterministic JSON output: pretty-printed, reals rounded to 12
//! significant digits.

use serde::{Serialize, Serializer};

/// Rounds to 12 significant digits. Non-finite values pass through.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn sig12<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(round12(*x))
    } else {
        s.serialize_none()
    }
}

pub fn sig12_vec<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let rounded: Vec<Option<f64>> =
        xs.iter().map(|x| x.is_finite().then(|| round12(*x))).collect();
    rounded.serialize(s)
}

pub fn to_string<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round12(7.0 / 3.0), 2.33333333333);
        assert_eq!(round12(1.0), 1.0);
        assert_eq!(round12(-0.1 - 0.2), -0.3);
        assert!(round12(f64::INFINITY).is_infinite());
    }
}
