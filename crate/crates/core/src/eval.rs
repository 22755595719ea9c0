//! Scoring a predicted segmentation against planted scenes.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenes::Segmentation;
use crate::synth::{GroundTruth, ShotInterval};

/// Precision, recall and F1 over scene-start boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryMetrics {
    #[serde(serialize_with = "crate::json::sig12")]
    pub precision: f64,
    #[serde(serialize_with = "crate::json::sig12")]
    pub recall: f64,
    #[serde(serialize_with = "crate::json::sig12")]
    pub f1: f64,
}

/// A predicted boundary counts when some truth boundary lies within
/// `tolerance` shots, and symmetrically for recall. No boundaries on either
/// side scores 1; no boundaries on one side only scores 0.
pub fn boundary_metrics(predicted: &[usize], truth: &[usize], tolerance: usize) -> BoundaryMetrics {
    let near = |b: usize, set: &[usize]| set.iter().any(|&x| x.abs_diff(b) <= tolerance);
    let ratio = |from: &[usize], to: &[usize]| {
        if from.is_empty() {
            if to.is_empty() { 1.0 } else { 0.0 }
        } else {
            from.iter().filter(|&&b| near(b, to)).count() as f64 / from.len() as f64
        }
    };
    let precision = ratio(predicted, truth);
    let recall = ratio(truth, predicted);
    let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    BoundaryMetrics { precision, recall, f1 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    #[serde(flatten)]
    pub metrics: BoundaryMetrics,
    pub tolerance: usize,
    pub predicted_scenes: usize,
    pub truth_scenes: usize,
    /// Predicted scenes with no identical truth scene.
    pub only_predicted: Vec<ShotInterval>,
    /// Truth scenes with no identical predicted scene.
    pub only_truth: Vec<ShotInterval>,
    pub surviving_one_shot_scenes: usize,
}

pub fn evaluate(predicted: &Segmentation, truth: &GroundTruth, tolerance: usize) -> Result<EvalReport> {
    let n = predicted.shot_count();
    if n != truth.shot_count {
        return Err(Error::UniverseMismatch { predicted: n, truth: truth.shot_count });
    }
    let pred: Vec<ShotInterval> = intervals(predicted);
    let metrics = boundary_metrics(&predicted.boundaries(), &truth.boundaries(), tolerance);
    Ok(EvalReport {
        metrics,
        tolerance,
        predicted_scenes: pred.len(),
        truth_scenes: truth.scenes.len(),
        only_predicted: pred.iter().filter(|s| !truth.scenes.contains(s)).copied().collect(),
        only_truth: truth.scenes.iter().filter(|s| !pred.contains(s)).copied().collect(),
        surviving_one_shot_scenes: predicted.one_shot_count(),
    })
}

pub(crate) fn intervals(seg: &Segmentation) -> Vec<ShotInterval> {
    seg.scenes.iter().map(|s| ShotInterval { first_shot: s.first_shot, last_shot: s.last_shot }).collect()
}

impl EvalReport {
    pub fn to_json_string(&self) -> String {
        crate::json::to_string(self)
    }
}

/// Side-by-side scene listing: spatial-temporal, coupled and truth columns,
/// one scene per row, shots written as `first-last`.
pub fn comparison_table(initial: &Segmentation, coupled: &Segmentation, truth: &[ShotInterval]) -> String {
    scene_table(&[
        ("spatial-temporal", intervals(initial)),
        ("coupled", intervals(coupled)),
        ("truth", truth.to_vec()),
    ])
}

/// Aligned plain-text table with one column per named scene list.
pub fn scene_table(columns: &[(&str, Vec<ShotInterval>)]) -> String {
    let cell = |s: &ShotInterval| {
        if s.first_shot == s.last_shot {
            s.first_shot.to_string()
        } else {
            format!("{}-{}", s.first_shot, s.last_shot)
        }
    };
    let cells: Vec<Vec<String>> = columns.iter().map(|(_, c)| c.iter().map(cell).collect()).collect();
    let widths: Vec<usize> = columns
        .iter()
        .zip(&cells)
        .map(|((h, _), c)| c.iter().map(String::len).chain([h.len()]).max().unwrap_or(0))
        .collect();
    let rows = cells.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = String::new();
    let mut line = |first: &str, rest: Vec<&str>| {
        let mut text = format!("{first:>5}");
        for (c, w) in rest.iter().zip(&widths) {
            let _ = write!(text, "  {c:<w$}");
        }
        out.push_str(text.trim_end());
        out.push('\n');
    };
    line("scene", columns.iter().map(|(h, _)| *h).collect());
    for r in 0..rows {
        line(&(r + 1).to_string(), cells.iter().map(|c| c.get(r).map_or("", String::as_str)).collect());
    }
    out
}
