//! Spatial-temporal scene extraction from the temporal-clusters graph.
//!
//! `Before` edges cut the graph into sequence subgraphs. Inside a subgraph,
//! clusters linked by `During`/`Overlaps` belong to the same scene, while
//! `Meets` separates consecutive scenes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::clustering::{cluster_document, Cluster};
use crate::error::{Error, Result};
use crate::model::{SequenceSpan, VideoDocument};
use crate::temporal::{build_tcg, Edge, RelationKind, TemporalClustersGraph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scene {
    pub id: usize,
    pub first_shot: usize,
    pub last_shot: usize,
    #[serde(rename = "clusters")]
    pub member_clusters: Vec<usize>,
    #[serde(rename = "one_shot")]
    pub is_one_shot: bool,
    #[serde(default)]
    pub sequence: usize,
}

impl Scene {
    pub fn new(id: usize, first_shot: usize, last_shot: usize, member_clusters: Vec<usize>, sequence: usize) -> Self {
        Scene { id, first_shot, last_shot, member_clusters, is_one_shot: first_shot == last_shot, sequence }
    }

    pub fn len(&self) -> usize {
        self.last_shot - self.first_shot + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shots(&self) -> std::ops::RangeInclusive<usize> {
        self.first_shot..=self.last_shot
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segmentation {
    pub scenes: Vec<Scene>,
    pub sequences: Vec<SequenceSpan>,
}

impl Segmentation {
    pub fn shot_count(&self) -> usize {
        self.scenes.last().map_or(0, |s| s.last_shot + 1)
    }

    pub fn one_shot_count(&self) -> usize {
        self.scenes.iter().filter(|s| s.is_one_shot).count()
    }

    /// First shot of every scene except the one starting at shot 0.
    pub fn boundaries(&self) -> Vec<usize> {
        self.scenes.iter().map(|s| s.first_shot).filter(|&s| s != 0).collect()
    }

    /// Shot ranges of the scenes, in order.
    pub fn ranges(&self) -> Vec<(usize, usize)> {
        self.scenes.iter().map(|s| (s.first_shot, s.last_shot)).collect()
    }

    /// Checks that the scenes tile `0..shot_count` in order, ids are
    /// sequential, flags are right and no scene straddles a sequence boundary.
    pub fn check_partition(&self, shot_count: usize) -> Result<(), String> {
        let mut next = 0;
        for (k, s) in self.scenes.iter().enumerate() {
            if s.id != k {
                return Err(format!("scene at position {k} has id {}", s.id));
            }
            if s.first_shot != next || s.last_shot < s.first_shot {
                return Err(format!("scene {k} covers {}..={}, expected to start at {next}", s.first_shot, s.last_shot));
            }
            if s.is_one_shot != (s.first_shot == s.last_shot) {
                return Err(format!("scene {k} has a wrong one-shot flag"));
            }
            match self.sequences.get(s.sequence) {
                Some(seq) if seq.contains(s.first_shot) && seq.contains(s.last_shot) => {}
                _ => return Err(format!("scene {k} is not inside sequence {}", s.sequence)),
            }
            next = s.last_shot + 1;
        }
        if next != shot_count {
            return Err(format!("scenes cover {next} shots, expected {shot_count}"));
        }
        Ok(())
    }

    pub fn to_json_string(&self) -> String {
        crate::json::to_string(self)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::json("segmentation", e))
    }
}

/// The clusters and non-`Before` edges of one sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSubgraph {
    pub clusters: Vec<Cluster>,
    pub edges: Vec<Edge>,
}

struct DisjointSet(Vec<usize>);

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet((0..n).collect())
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.0[v] != v {
            self.0[v] = self.0[self.0[v]];
            v = self.0[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // keep the smaller index as the root so group order follows time
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.0[hi] = lo;
    }
}

/// Removes `Before` edges and returns the connected pieces in time order.
pub fn split_sequences(tcg: &TemporalClustersGraph) -> Vec<SequenceSubgraph> {
    let n = tcg.clusters.len();
    let mut sets = DisjointSet::new(n);
    for e in tcg.edges.iter().filter(|e| e.relation.kind() != RelationKind::Before) {
        sets.union(e.left, e.right);
    }
    let mut pieces: BTreeMap<usize, SequenceSubgraph> = BTreeMap::new();
    for c in &tcg.clusters {
        let root = sets.find(c.id);
        pieces
            .entry(root)
            .or_insert_with(|| SequenceSubgraph { clusters: Vec::new(), edges: Vec::new() })
            .clusters
            .push(c.clone());
    }
    for e in tcg.edges.iter().filter(|e| e.relation.kind() != RelationKind::Before) {
        let root = sets.find(e.left);
        pieces.get_mut(&root).expect("edge endpoints share a piece").edges.push(e.clone());
    }
    pieces.into_values().collect()
}

/// Scenes of one sequence subgraph. Scene ids are local, starting at 0.
pub fn extract_scenes(subgraph: &SequenceSubgraph, doc: &VideoDocument) -> Result<Vec<Scene>> {
    let index: BTreeMap<usize, usize> =
        subgraph.clusters.iter().enumerate().map(|(k, c)| (c.id, k)).collect();
    let mut sets = DisjointSet::new(subgraph.clusters.len());
    for e in subgraph.edges.iter().filter(|e| e.relation.is_intersecting()) {
        sets.union(index[&e.left], index[&e.right]);
    }
    let mut groups: BTreeMap<usize, Vec<&Cluster>> = BTreeMap::new();
    for (k, c) in subgraph.clusters.iter().enumerate() {
        groups.entry(sets.find(k)).or_default().push(c);
    }

    let mut owner = vec![None; doc.len()];
    for (g, members) in groups.values().enumerate() {
        for c in members {
            for &s in &c.shot_ids {
                owner[s] = Some(g);
            }
        }
    }
    let mut scenes = Vec::with_capacity(groups.len());
    for (g, members) in groups.values().enumerate() {
        let first = members.iter().map(|c| c.first_shot()).min().expect("non-empty group");
        let last = members.iter().map(|c| c.last_shot()).max().expect("non-empty group");
        let mut ids: Vec<usize> = members.iter().map(|c| c.id).collect();
        ids.sort_unstable();
        if let Some(shot) = (first..=last).find(|&s| owner[s] != Some(g)) {
            return Err(Error::NonContiguousScene { clusters: ids, shot });
        }
        scenes.push(Scene::new(0, first, last, ids, members[0].sequence));
    }
    scenes.sort_by_key(|s| s.first_shot);
    for (k, s) in scenes.iter_mut().enumerate() {
        s.id = k;
    }
    Ok(scenes)
}

/// Concatenates the scenes of every subgraph in time order with global ids.
pub fn scenes_from_tcg(tcg: &TemporalClustersGraph, doc: &VideoDocument) -> Result<Segmentation> {
    let mut scenes = Vec::new();
    for sub in split_sequences(tcg) {
        scenes.extend(extract_scenes(&sub, doc)?);
    }
    scenes.sort_by_key(|s| s.first_shot);
    for (k, s) in scenes.iter_mut().enumerate() {
        s.id = k;
    }
    Ok(Segmentation { scenes, sequences: crate::model::sequence_boundaries(doc) })
}

/// Clustering, TCG construction and TCG analysis in one go.
pub fn segment_spatial_temporal(doc: &VideoDocument, threshold: f64) -> Result<Segmentation> {
    let tsg = cluster_document(doc, threshold)?;
    let tcg = build_tcg(&tsg, doc);
    scenes_from_tcg(&tcg, doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::TimeSpaceGraph;
    use crate::model::{sequence_boundaries, DocumentBuilder, TransitionEffect};
    use crate::temporal::AllenRelation;

    fn doc(n: usize, dissolves_after: &[usize]) -> VideoDocument {
        let mut b = DocumentBuilder::new();
        for i in 0..n {
            let join = if i > 0 && dissolves_after.contains(&(i - 1)) {
                TransitionEffect::dissolve(5)
            } else {
                TransitionEffect::CUT
            };
            b = b.shot(10, join, None);
        }
        b.build().unwrap()
    }

    fn tcg_for(doc: &VideoDocument, clusters: &[&[usize]]) -> TemporalClustersGraph {
        let seqs = sequence_boundaries(doc);
        let seq_of = crate::model::sequence_index(&seqs, doc.len());
        let clusters = clusters
            .iter()
            .enumerate()
            .map(|(id, s)| Cluster { id, shot_ids: s.to_vec(), sequence: seq_of[s[0]] })
            .collect();
        build_tcg(&TimeSpaceGraph { clusters, sequences: seqs }, doc)
    }

    #[test]
    fn no_before_edges_one_subgraph() {
        let d = doc(3, &[]);
        assert_eq!(split_sequences(&tcg_for(&d, &[&[0], &[1], &[2]])).len(), 1);
    }

    #[test]
    fn before_edges_split() {
        let d = doc(4, &[1]);
        let tcg = tcg_for(&d, &[&[0], &[1], &[2], &[3]]);
        assert_eq!(tcg.edges_of_kind(RelationKind::Before).count(), 1);
        assert_eq!(split_sequences(&tcg).len(), 2);

        let d = doc(5, &[0, 2]);
        let tcg = tcg_for(&d, &[&[0], &[1, 2], &[3], &[4]]);
        assert_eq!(split_sequences(&tcg).len(), 3);
    }

    #[test]
    fn single_cluster_single_scene() {
        let d = doc(3, &[]);
        let subs = split_sequences(&tcg_for(&d, &[&[0, 1, 2]]));
        let scenes = extract_scenes(&subs[0], &d).unwrap();
        assert_eq!(scenes, vec![Scene::new(0, 0, 2, vec![0], 0)]);
    }

    #[test]
    fn overlapping_clusters_merge() {
        // telephone conversation: caller / callee alternate
        let d = doc(4, &[]);
        let tcg = tcg_for(&d, &[&[0, 2], &[1, 3]]);
        assert!(matches!(tcg.edges[0].relation, AllenRelation::Overlaps { .. }));
        let seg = scenes_from_tcg(&tcg, &d).unwrap();
        assert_eq!(seg.ranges(), vec![(0, 3)]);
        assert_eq!(seg.scenes[0].member_clusters, vec![0, 1]);
    }

    #[test]
    fn meets_separates_scenes() {
        let d = doc(5, &[]);
        let tcg = tcg_for(&d, &[&[0], &[1, 3], &[2], &[4]]);
        let seg = scenes_from_tcg(&tcg, &d).unwrap();
        assert_eq!(seg.ranges(), vec![(0, 0), (1, 3), (4, 4)]);
        assert_eq!(seg.one_shot_count(), 2);
        seg.check_partition(5).unwrap();
    }

    #[test]
    fn foreign_shot_inside_hull_is_an_error() {
        let d = doc(3, &[]);
        // hand-made subgraph missing the Meets structure: one group with a hole
        let sub = SequenceSubgraph {
            clusters: vec![
                Cluster { id: 0, shot_ids: vec![0, 2], sequence: 0 },
                Cluster { id: 1, shot_ids: vec![1], sequence: 0 },
            ],
            edges: vec![],
        };
        assert!(matches!(extract_scenes(&sub, &d), Err(Error::NonContiguousScene { shot: 1, .. })));
    }

    #[test]
    fn identical_shots_one_scene() {
        let hist = crate::histogram::Histogram::from_counts(2, vec![1, 0, 0, 0, 0, 0, 0, 3]).unwrap();
        let d = (0..6).fold(DocumentBuilder::new(), |b, _| b.cut(12, Some(hist.clone()))).build().unwrap();
        let seg = segment_spatial_temporal(&d, 0.1).unwrap();
        assert_eq!(seg.ranges(), vec![(0, 5)]);
    }

    #[test]
    fn segmentation_json_names() {
        let seg = Segmentation {
            scenes: vec![Scene::new(0, 0, 0, vec![0], 0)],
            sequences: vec![SequenceSpan { first_shot: 0, last_shot: 0 }],
        };
        let v: serde_json::Value = serde_json::from_str(&seg.to_json_string()).unwrap();
        let scene = &v["scenes"][0];
        for key in ["id", "first_shot", "last_shot", "clusters", "one_shot"] {
            assert!(scene.get(key).is_some(), "missing {key}");
        }
        assert_eq!(Segmentation::from_json_str(&seg.to_json_string()).unwrap(), seg);
    }
}
