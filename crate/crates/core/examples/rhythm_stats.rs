//! Duration-variation statistics of a short group and the safe-interval
//! test for candidate shots.

use cineparse::rhythm::{judge_variation, rhythm_stats, Denominator, ShotGroup};

fn main() -> cineparse::Result<()> {
    let group = ShotGroup::new(0, vec![10, 14, 11]);
    for denominator in [Denominator::GroupSize, Denominator::Unbiased] {
        let stats = rhythm_stats(&group, denominator)?;
        println!("{denominator:?}: variations {:?}, vtpm {:.4}, delta {:.4}", stats.variations, stats.vtpm, stats.delta);
        for alpha in [1.0, 2.25] {
            let interval = stats.safe_interval(alpha);
            println!("  alpha {alpha}: safe interval [{:.4}, {:.4}]", interval.low, interval.high);
            for candidate in [12u64, 13, 20] {
                let v = candidate.abs_diff(11) as f64;
                let d = judge_variation(&stats, v, alpha);
                println!(
                    "    next shot {candidate:>2} (variation {v}): {} (z = {:.4})",
                    if d.accept { "joins" } else { "rejected" },
                    d.zscore
                );
            }
        }
    }
    Ok(())
}
