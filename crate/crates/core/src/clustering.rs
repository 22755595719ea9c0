//! Temporal-delimited shot clustering and the time-space graph.
//!
//! Clustering runs independently inside each sequence. The earliest shot not
//! yet classified seeds a cluster, and every later unclassified shot of the
//! same sequence whose dissimilarity to the seed is strictly below the
//! threshold joins it.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::dissimilarity;
use crate::model::{sequence_boundaries, SequenceSpan, Shot, VideoDocument};

pub const DEFAULT_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub id: usize,
    /// Member shot ids in time order; the first one is the seed.
    #[serde(rename = "shots")]
    pub shot_ids: Vec<usize>,
    /// Index of the sequence the cluster lives in.
    pub sequence: usize,
}

impl Cluster {
    pub fn seed(&self) -> usize {
        self.shot_ids[0]
    }

    pub fn first_shot(&self) -> usize {
        self.shot_ids[0]
    }

    pub fn last_shot(&self) -> usize {
        *self.shot_ids.last().expect("clusters are never empty")
    }
}

/// Shots laid out by time (x axis) and cluster (y axis).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSpaceGraph {
    pub clusters: Vec<Cluster>,
    #[serde(default)]
    pub sequences: Vec<SequenceSpan>,
}

impl TimeSpaceGraph {
    /// Cluster index of every shot.
    pub fn cluster_of(&self, shot_count: usize) -> Vec<usize> {
        let mut index = vec![usize::MAX; shot_count];
        for c in &self.clusters {
            for &s in &c.shot_ids {
                index[s] = c.id;
            }
        }
        index
    }

    pub fn shot_count(&self) -> usize {
        self.clusters.iter().map(|c| c.shot_ids.len()).sum()
    }

    /// Checks that the clusters partition `0..shot_count` with ordered ids
    /// and members confined to one sequence.
    pub fn validate(&self, doc: &VideoDocument) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(format!("time-space graph: {msg}")));
        let sequences = sequence_boundaries(doc);
        let mut seen = vec![false; doc.len()];
        for (k, c) in self.clusters.iter().enumerate() {
            if c.id != k {
                return bad(format!("cluster at position {k} has id {}", c.id));
            }
            if c.shot_ids.is_empty() || c.shot_ids.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("cluster {k} members must be non-empty and increasing"));
            }
            let Some(span) = sequences.get(c.sequence) else {
                return bad(format!("cluster {k} names unknown sequence {}", c.sequence));
            };
            for &s in &c.shot_ids {
                if s >= doc.len() || seen[s] || !span.contains(s) {
                    return bad(format!("cluster {k}: shot {s} is unknown, repeated or outside its sequence"));
                }
                seen[s] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return bad("not every shot is clustered".into());
        }
        if self.clusters.windows(2).any(|w| w[0].seed() >= w[1].seed()) {
            return bad("clusters must be ordered by seed".into());
        }
        Ok(())
    }

    pub fn to_json_string(&self) -> String {
        crate::json::to_string(self)
    }

    /// Plain-text time line: one row per cluster, one column per shot.
    pub fn render_timeline(&self, doc: &VideoDocument) -> String {
        let width = doc.len();
        let label = self.clusters.len().saturating_sub(1).to_string().len().max(1) + 1;
        let mut out = String::new();
        for c in self.clusters.iter().rev() {
            let mut row = vec!['.'; width];
            for &s in &c.shot_ids {
                row[s] = '#';
            }
            let _ = writeln!(out, "{:>label$} |{}", format!("C{}", c.id), row.iter().collect::<String>());
        }
        let mut axis = vec![' '; width];
        for span in &self.sequences {
            axis[span.first_shot] = '^';
        }
        let _ = writeln!(out, "{:>label$} +{}", "", "-".repeat(width));
        let _ = writeln!(out, "{:>label$}  {}", "", axis.iter().collect::<String>());
        out
    }
}

/// Clusters the shots of a single sequence. Cluster ids are local
/// (`0..k`); `sequence` is copied into every cluster.
pub fn cluster_sequence(shots: &[Shot], threshold: f64, sequence: usize) -> Result<Vec<Cluster>> {
    let histograms = shots
        .iter()
        .map(|s| s.histogram.as_ref().ok_or(Error::MissingHistogram(s.id)))
        .collect::<Result<Vec<_>>>()?;
    let mut assigned = vec![false; shots.len()];
    let mut clusters = Vec::new();
    for seed in 0..shots.len() {
        if assigned[seed] {
            continue;
        }
        assigned[seed] = true;
        let mut members = vec![shots[seed].id];
        for j in seed + 1..shots.len() {
            if !assigned[j] && dissimilarity(histograms[seed], histograms[j])? < threshold {
                assigned[j] = true;
                members.push(shots[j].id);
            }
        }
        clusters.push(Cluster { id: clusters.len(), shot_ids: members, sequence });
    }
    Ok(clusters)
}

pub fn cluster_document(doc: &VideoDocument, threshold: f64) -> Result<TimeSpaceGraph> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidParameter(format!("threshold must lie in [0, 1], got {threshold}")));
    }
    let sequences = sequence_boundaries(doc);
    let mut clusters = Vec::new();
    for (k, span) in sequences.iter().enumerate() {
        let shots = &doc.shots()[span.first_shot..=span.last_shot];
        for mut c in cluster_sequence(shots, threshold, k)? {
            c.id = clusters.len();
            clusters.push(c);
        }
    }
    log::debug!("{} shots grouped into {} clusters", doc.len(), clusters.len());
    Ok(TimeSpaceGraph { clusters, sequences })
}
