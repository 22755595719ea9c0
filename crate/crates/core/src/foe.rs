//! Shot-transition detection by comparing per-frame patterns of candidate
//! focus-of-expansion points.
//!
//! Two patterns are compared point by point from the smaller one: each
//! point scores `1 - d / r` against its nearest partner within the zone
//! radius `r`, or the penalty when none is close enough. The pattern score
//! is the mean local score. Consecutive frames scoring below the threshold
//! mark a transition: an isolated drop is a cut, a run of at least
//! `min_gradual_run` drops is one gradual transition.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ShotManifest, ShotRecord, TransitionEffect, TransitionKind};

pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PointPattern {
    pub points: Vec<Point>,
}

impl PointPattern {
    pub fn new(points: Vec<Point>) -> Self {
        PointPattern { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn sorted(&self) -> Vec<Point> {
        let mut pts = self.points.clone();
        pts.sort_by(cmp_point);
        pts
    }
}

fn cmp_point(a: &Point, b: &Point) -> Ordering {
    a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1]))
}

/// Pattern of one frame as stored in pattern files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FramePattern {
    pub frame: u64,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub zone_radius: f64,
    /// Local score of a point without a partner in its zone.
    pub penalty: f64,
    /// Scores strictly below this mark a transition.
    pub threshold: f64,
    /// Shortest run of low scores read as a gradual transition.
    pub min_gradual_run: usize,
}

impl MatchConfig {
    pub fn new(zone_radius: f64, threshold: f64) -> Self {
        MatchConfig { zone_radius, penalty: 0.0, threshold, min_gradual_run: 3 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.zone_radius.is_finite() && self.zone_radius > 0.0) {
            return Err(Error::InvalidParameter(format!("zone radius must be positive, got {}", self.zone_radius)));
        }
        if !(self.penalty.is_finite() && self.penalty < 1.0) {
            return Err(Error::InvalidParameter(format!("penalty must be below 1, got {}", self.penalty)));
        }
        if self.min_gradual_run < 2 {
            return Err(Error::InvalidParameter("gradual transitions need runs of at least 2".into()));
        }
        Ok(())
    }
}

/// Global resemblance of two patterns in `[penalty, 1]`. Symmetric: the
/// smaller pattern drives the comparison, and equal-sized patterns are put
/// in a canonical order first.
pub fn pattern_resemblance(p1: &PointPattern, p2: &PointPattern, cfg: &MatchConfig) -> Result<f64> {
    cfg.validate()?;
    if p1.is_empty() && p2.is_empty() {
        return Err(Error::BothEmpty);
    }
    let (query, reference) = match p1.len().cmp(&p2.len()) {
        Ordering::Less => (p1, p2),
        Ordering::Greater => (p2, p1),
        Ordering::Equal => {
            let (a, b) = (p1.sorted(), p2.sorted());
            let first_smaller = a
                .iter()
                .zip(&b)
                .map(|(x, y)| cmp_point(x, y))
                .find(|o| o.is_ne())
                .is_none_or(Ordering::is_lt);
            if first_smaller { (p1, p2) } else { (p2, p1) }
        }
    };
    if query.is_empty() {
        return Ok(cfg.penalty);
    }
    let r = cfg.zone_radius;
    let total: f64 = query
        .points
        .iter()
        .map(|q| {
            reference
                .points
                .iter()
                .map(|p| (q[0] - p[0]).hypot(q[1] - p[1]))
                .filter(|&d| d <= r)
                .map(|d| 1.0 - d / r)
                .fold(cfg.penalty, f64::max)
        })
        .sum();
    Ok(total / query.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionType {
    Cut,
    Gradual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectedTransition {
    pub kind: TransitionType,
    /// Last frame of the outgoing shot.
    pub from_frame: u64,
    /// First frame of the incoming shot.
    pub to_frame: u64,
}

/// Resemblance of every pair of consecutive patterns.
pub fn consecutive_scores(patterns: &[FramePattern], cfg: &MatchConfig) -> Result<Vec<f64>> {
    patterns
        .windows(2)
        .map(|w| {
            pattern_resemblance(
                &PointPattern::new(w[0].points.clone()),
                &PointPattern::new(w[1].points.clone()),
                cfg,
            )
        })
        .collect()
}

pub fn detect_shot_transitions(patterns: &[FramePattern], cfg: &MatchConfig) -> Result<Vec<DetectedTransition>> {
    if patterns.len() < 2 {
        return Err(Error::InvalidParameter("need at least two frame patterns".into()));
    }
    if patterns.windows(2).any(|w| w[1].frame <= w[0].frame) {
        return Err(Error::InvalidParameter("frame numbers must increase".into()));
    }
    let scores = consecutive_scores(patterns, cfg)?;
    let mut out = Vec::new();
    let mut i = 0;
    while i < scores.len() {
        if scores[i] >= cfg.threshold {
            i += 1;
            continue;
        }
        let start = i;
        while i < scores.len() && scores[i] < cfg.threshold {
            i += 1;
        }
        // boundaries start..i are below threshold
        if i - start >= cfg.min_gradual_run {
            out.push(DetectedTransition {
                kind: TransitionType::Gradual,
                from_frame: patterns[start].frame,
                to_frame: patterns[i].frame,
            });
        } else {
            out.extend((start..i).map(|b| DetectedTransition {
                kind: TransitionType::Cut,
                from_frame: patterns[b].frame,
                to_frame: patterns[b + 1].frame,
            }));
        }
    }
    Ok(out)
}

/// Shot manifest skeleton (durations and transitions, no key frames) for
/// frames `first_frame..=last_frame` split at the detected transitions.
/// Gradual transitions become dissolves covering the frames strictly
/// between `from_frame` and `to_frame`.
pub fn transitions_to_manifest(
    transitions: &[DetectedTransition],
    first_frame: u64,
    last_frame: u64,
    frame_rate: f64,
) -> ShotManifest {
    let mut shots = Vec::new();
    let mut start = first_frame;
    let mut push = |td: u64, transition: Option<TransitionEffect>| {
        shots.push(ShotRecord {
            id: shots.len() as i64,
            td: td as i64,
            transition,
            t: None,
            keyframe: None,
            histogram: None,
        });
    };
    for tr in transitions {
        let gap = tr.to_frame - tr.from_frame - 1;
        match tr.kind {
            TransitionType::Gradual if gap > 0 => {
                let effect = TransitionEffect::new(TransitionKind::Dissolve, gap).expect("gap > 0");
                push(tr.from_frame + 1 - start, Some(effect));
            }
            _ => push(tr.to_frame - start, Some(TransitionEffect::CUT)),
        }
        start = tr.to_frame;
    }
    push(last_frame + 1 - start, None);
    ShotManifest { frame_rate, shots }
}
