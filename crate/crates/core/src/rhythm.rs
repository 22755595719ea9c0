//! Editing-rhythm statistics over groups of consecutive shots.
//!
//! A group's rhythm is summarized by the variations `|td_i - td_{i+1}|`
//! between neighbouring shots: their mean and standard deviation define a
//! safe interval `[mean - alpha * dev, mean + alpha * dev]`. A shot next to
//! the group shares its rhythm when its own variation with the boundary
//! shot falls inside that interval.
//!
//! By default both moments divide by the group size `n` even though there
//! are only `n - 1` variations; [`Denominator::Unbiased`] divides by `n - 1`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Shot;

pub const DEFAULT_ALPHA: f64 = 2.25;
pub const DEFAULT_MIN_GROUP: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Denominator {
    /// Divide by the number of shots in the group.
    #[default]
    GroupSize,
    /// Divide by the number of variations.
    Unbiased,
}

/// Which end of a group a candidate shot attaches to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Front,
    Back,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Front => "front",
            Side::Back => "back",
        })
    }
}

/// Consecutive shots and their durations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotGroup {
    pub first_shot: usize,
    pub durations: Vec<u64>,
}

impl ShotGroup {
    pub fn new(first_shot: usize, durations: Vec<u64>) -> Self {
        assert!(!durations.is_empty(), "a shot group holds at least one shot");
        ShotGroup { first_shot, durations }
    }

    pub fn from_shots(shots: &[Shot]) -> Result<Self> {
        let first = shots.first().ok_or(Error::GroupTooSmall(0))?;
        if shots.windows(2).any(|w| w[1].id != w[0].id + 1) {
            return Err(Error::InvalidParameter("shot group must be contiguous".into()));
        }
        Ok(ShotGroup::new(first.id, shots.iter().map(|s| s.td).collect()))
    }

    pub fn len(&self) -> usize {
        self.durations.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last_shot(&self) -> usize {
        self.first_shot + self.durations.len() - 1
    }

    pub fn shot_ids(&self) -> std::ops::RangeInclusive<usize> {
        self.first_shot..=self.last_shot()
    }

    pub fn push_back(&mut self, td: u64) {
        self.durations.push(td);
    }

    pub fn push_front(&mut self, td: u64) {
        self.durations.insert(0, td);
        self.first_shot -= 1;
    }

    fn boundary_duration(&self, side: Side) -> u64 {
        match side {
            Side::Front => self.durations[0],
            Side::Back => *self.durations.last().expect("non-empty group"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhythmStats {
    #[serde(serialize_with = "crate::json::sig12_vec")]
    pub variations: Vec<f64>,
    #[serde(serialize_with = "crate::json::sig12")]
    pub vtpm: f64,
    #[serde(serialize_with = "crate::json::sig12")]
    pub delta: f64,
    /// Group size the moments were computed for.
    pub n: usize,
}

impl RhythmStats {
    pub fn safe_interval(&self, alpha: f64) -> SafeInterval {
        SafeInterval { low: self.vtpm - alpha * self.delta, high: self.vtpm + alpha * self.delta, alpha }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SafeInterval {
    #[serde(serialize_with = "crate::json::sig12")]
    pub low: f64,
    #[serde(serialize_with = "crate::json::sig12")]
    pub high: f64,
    #[serde(serialize_with = "crate::json::sig12")]
    pub alpha: f64,
}

impl SafeInterval {
    pub fn contains(&self, v: f64) -> bool {
        self.low <= v && v <= self.high
    }
}

pub fn duration_variation(a: &Shot, b: &Shot) -> f64 {
    a.td.abs_diff(b.td) as f64
}

pub fn rhythm_stats(group: &ShotGroup, denominator: Denominator) -> Result<RhythmStats> {
    let n = group.len();
    if n < 2 {
        return Err(Error::GroupTooSmall(n));
    }
    let variations: Vec<f64> =
        group.durations.windows(2).map(|w| w[0].abs_diff(w[1]) as f64).collect();
    let divisor = match denominator {
        Denominator::GroupSize => n,
        Denominator::Unbiased => n - 1,
    } as f64;
    let vtpm = variations.iter().sum::<f64>() / divisor;
    let delta = (variations.iter().map(|v| (v - vtpm).powi(2)).sum::<f64>() / divisor).sqrt();
    Ok(RhythmStats { variations, vtpm, delta, n })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregationDecision {
    pub accept: bool,
    /// `|v - vtpm| / delta`; infinite when `delta == 0` and `v != vtpm`.
    pub zscore: f64,
    pub variation: f64,
}

/// Decision for a candidate whose variation with the group's boundary shot
/// is `variation`.
pub fn judge_variation(stats: &RhythmStats, variation: f64, alpha: f64) -> AggregationDecision {
    let gap = (variation - stats.vtpm).abs();
    let zscore = if stats.delta > 0.0 {
        gap / stats.delta
    } else if gap == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    AggregationDecision { accept: gap <= alpha * stats.delta, zscore, variation }
}

/// Temporal continuity plus the safe-interval test for one candidate shot.
pub fn aggregation_test(
    group: &ShotGroup,
    candidate: &Shot,
    alpha: f64,
    side: Side,
    denominator: Denominator,
) -> Result<AggregationDecision> {
    let adjacent = match side {
        Side::Front => candidate.id + 1 == group.first_shot,
        Side::Back => candidate.id == group.last_shot() + 1,
    };
    if !adjacent {
        let side = match side {
            Side::Front => "front",
            Side::Back => "back",
        };
        return Err(Error::NotAdjacent { candidate: candidate.id, side });
    }
    let stats = rhythm_stats(group, denominator)?;
    let variation = group.boundary_duration(side).abs_diff(candidate.td) as f64;
    Ok(judge_variation(&stats, variation, alpha))
}

/// Rhythm-only segmentation of consecutive shots.
///
/// Seeds a group with the next `min_group` shots and grows it backwards
/// while the following shot passes [`aggregation_test`]; statistics are
/// recomputed after every accepted shot. A trailing remainder shorter than
/// `min_group` becomes the last group.
pub fn rhythm_segment(
    shots: &[Shot],
    min_group: usize,
    alpha: f64,
    denominator: Denominator,
) -> Result<Vec<ShotGroup>> {
    if min_group < 2 {
        return Err(Error::InvalidParameter(format!("minimum group size must be at least 2, got {min_group}")));
    }
    if shots.windows(2).any(|w| w[1].id != w[0].id + 1) {
        return Err(Error::InvalidParameter("rhythm segmentation needs contiguous shots".into()));
    }
    let mut groups = Vec::new();
    let mut next = 0;
    while next < shots.len() {
        let seed_end = (next + min_group).min(shots.len());
        let mut group = ShotGroup::from_shots(&shots[next..seed_end])?;
        next = seed_end;
        if group.len() == min_group {
            while next < shots.len() {
                let decision = aggregation_test(&group, &shots[next], alpha, Side::Back, denominator)?;
                if !decision.accept {
                    break;
                }
                group.push_back(shots[next].td);
                next += 1;
            }
        }
        groups.push(group);
    }
    Ok(groups)
}
