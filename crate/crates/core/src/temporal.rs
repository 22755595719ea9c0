//! Allen relations between clusters, the temporal-clusters graph (TCG) and
//! its Begin/End DAG form.
//!
//! Relations are read off cluster spans, the hull `[first.t, last.t + td)`
//! of each cluster's shots:
//!
//! * disjoint spans whose boundary shots are consecutive give `Meets` (cut)
//!   or `Before(tau)` (gradual transition of `tau` frames);
//! * a span nested in another gives `During`;
//! * partially intersecting spans give `Overlaps`;
//! * disjoint spans with other shots in between are unrelated.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::clustering::{Cluster, TimeSpaceGraph};
use crate::error::{Error, Result};
use crate::model::VideoDocument;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClusterSpan {
    pub start: u64,
    pub end: u64,
}

impl ClusterSpan {
    pub fn contains(&self, other: &ClusterSpan) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn intersects(&self, other: &ClusterSpan) -> bool {
        self.start < other.end && other.start < self.end
    }
}

pub fn cluster_span(c: &Cluster, doc: &VideoDocument) -> ClusterSpan {
    ClusterSpan { start: doc.shot(c.first_shot()).t, end: doc.shot(c.last_shot()).end() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelationKind {
    Meets,
    Before,
    During,
    Overlaps,
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AllenRelation {
    Meets,
    /// Sequence change through a gradual transition lasting `tau` frames.
    Before { tau: u64 },
    /// Time codes of the nested cluster's shots.
    During { time_codes: Vec<u64> },
    /// Time codes of the right member's shots inside the left span, and of
    /// its first shot past the left span.
    Overlaps { shared: Vec<u64>, first_outside: u64 },
}

impl AllenRelation {
    pub fn kind(&self) -> RelationKind {
        match self {
            AllenRelation::Meets => RelationKind::Meets,
            AllenRelation::Before { .. } => RelationKind::Before,
            AllenRelation::During { .. } => RelationKind::During,
            AllenRelation::Overlaps { .. } => RelationKind::Overlaps,
        }
    }

    pub fn params(&self) -> Vec<u64> {
        match self {
            AllenRelation::Meets => Vec::new(),
            AllenRelation::Before { tau } => vec![*tau],
            AllenRelation::During { time_codes } => time_codes.clone(),
            AllenRelation::Overlaps { shared, first_outside } => {
                shared.iter().copied().chain([*first_outside]).collect()
            }
        }
    }

    /// Relations that put both clusters in the same scene.
    pub fn is_intersecting(&self) -> bool {
        matches!(self, AllenRelation::During { .. } | AllenRelation::Overlaps { .. })
    }

    fn from_parts(kind: RelationKind, mut params: Vec<u64>) -> Result<Self, String> {
        Ok(match kind {
            RelationKind::Meets if params.is_empty() => AllenRelation::Meets,
            RelationKind::Before if params.len() == 1 => AllenRelation::Before { tau: params[0] },
            RelationKind::During if !params.is_empty() => AllenRelation::During { time_codes: params },
            RelationKind::Overlaps if params.len() >= 2 => {
                let first_outside = params.pop().expect("checked length");
                AllenRelation::Overlaps { shared: params, first_outside }
            }
            _ => return Err(format!("{kind} cannot take {} parameters", params.len())),
        })
    }

    pub fn label(&self) -> String {
        let params = self.params();
        if params.is_empty() {
            self.kind().to_string()
        } else {
            let joined: Vec<String> = params.iter().map(u64::to_string).collect();
            format!("{}({})", self.kind(), joined.join(","))
        }
    }
}

/// Directed edge from the earlier-starting cluster to the later one. For
/// `During` the right cluster is the nested one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "EdgeRecord", into = "EdgeRecord")]
pub struct Edge {
    pub left: usize,
    pub right: usize,
    pub relation: AllenRelation,
}

impl Edge {
    /// Human-readable statement, e.g. `C4 During C3`.
    pub fn statement(&self) -> String {
        self.statement_with(|id| format!("C{id}"))
    }

    pub fn statement_with(&self, name: impl Fn(usize) -> String) -> String {
        let (l, r) = (name(self.left), name(self.right));
        match &self.relation {
            AllenRelation::Meets => format!("{l} Meets {r}"),
            AllenRelation::Before { tau } => format!("{l} Before({tau}) {r}"),
            AllenRelation::During { .. } => format!("{r} During {l}"),
            AllenRelation::Overlaps { .. } => format!("{l} Overlaps {r}"),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct EdgeRecord {
    left: usize,
    right: usize,
    kind: RelationKind,
    params: Vec<u64>,
}

impl From<Edge> for EdgeRecord {
    fn from(e: Edge) -> Self {
        EdgeRecord { left: e.left, right: e.right, kind: e.relation.kind(), params: e.relation.params() }
    }
}

impl TryFrom<EdgeRecord> for Edge {
    type Error = String;

    fn try_from(r: EdgeRecord) -> Result<Self, String> {
        Ok(Edge { left: r.left, right: r.right, relation: AllenRelation::from_parts(r.kind, r.params)? })
    }
}

/// Relation between two distinct clusters, oriented so that the edge
/// starts at the cluster whose span starts first.
pub fn derive_relation(c1: &Cluster, c2: &Cluster, doc: &VideoDocument) -> Option<Edge> {
    let (first, second) = if doc.shot(c1.first_shot()).t <= doc.shot(c2.first_shot()).t {
        (c1, c2)
    } else {
        (c2, c1)
    };
    let (s1, s2) = (cluster_span(first, doc), cluster_span(second, doc));
    let relation = if s1.end <= s2.start {
        if first.last_shot() + 1 != second.first_shot() {
            return None;
        }
        match doc.shot(first.last_shot()).transition {
            Some(e) if e.is_gradual() => AllenRelation::Before { tau: e.tau() },
            _ => AllenRelation::Meets,
        }
    } else if s1.contains(&s2) {
        AllenRelation::During {
            time_codes: second.shot_ids.iter().map(|&s| doc.shot(s).t).collect(),
        }
    } else {
        let (inside, outside): (Vec<u64>, Vec<u64>) =
            second.shot_ids.iter().map(|&s| doc.shot(s).t).partition(|&t| t < s1.end);
        AllenRelation::Overlaps { shared: inside, first_outside: outside[0] }
    };
    Some(Edge { left: first.id, right: second.id, relation })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalClustersGraph {
    #[serde(rename = "nodes")]
    pub clusters: Vec<Cluster>,
    pub spans: Vec<ClusterSpan>,
    pub edges: Vec<Edge>,
}

impl TemporalClustersGraph {
    pub fn edges_of_kind(&self, kind: RelationKind) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.relation.kind() == kind)
    }

    pub fn to_json_string(&self) -> String {
        crate::json::to_string(self)
    }

    pub fn to_dot(&self) -> String {
        render_dot("tcg", &self.clusters, &self.edges, None)
    }
}

pub fn build_tcg(tsg: &TimeSpaceGraph, doc: &VideoDocument) -> TemporalClustersGraph {
    let clusters = tsg.clusters.clone();
    let spans = clusters.iter().map(|c| cluster_span(c, doc)).collect();
    let mut edges = Vec::new();
    for (i, a) in clusters.iter().enumerate() {
        for b in &clusters[i + 1..] {
            edges.extend(derive_relation(a, b, doc));
        }
    }
    edges.sort_by_key(|e| (e.left, e.right));
    TemporalClustersGraph { clusters, spans, edges }
}

/// TCG framed by abstract Begin and End nodes. Delays on the frame edges
/// are the gap from the start of the video to a source node and from a
/// sink node to the end of the video.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemporalDag {
    pub tcg: TemporalClustersGraph,
    /// `(cluster, delay)` for every cluster without incoming edges.
    pub begin: Vec<(usize, u64)>,
    /// `(cluster, delay)` for every cluster without outgoing edges.
    pub end: Vec<(usize, u64)>,
    /// Clusters in a topological order.
    pub order: Vec<usize>,
}

impl TemporalDag {
    pub fn to_dot(&self) -> String {
        render_dot("temporal_dag", &self.tcg.clusters, &self.tcg.edges, Some((&self.begin, &self.end)))
    }

    /// Nodes reachable from Begin and nodes that reach End, as flags per cluster.
    pub fn reachability(&self) -> (Vec<bool>, Vec<bool>) {
        let n = self.tcg.clusters.len();
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for e in &self.tcg.edges {
            succ[e.left].push(e.right);
            pred[e.right].push(e.left);
        }
        let flood = |starts: Vec<usize>, adj: &[Vec<usize>]| {
            let mut seen = vec![false; n];
            let mut queue: VecDeque<usize> = starts.into();
            while let Some(v) = queue.pop_front() {
                if !std::mem::replace(&mut seen[v], true) {
                    queue.extend(adj[v].iter().copied());
                }
            }
            seen
        };
        (
            flood(self.begin.iter().map(|b| b.0).collect(), &succ),
            flood(self.end.iter().map(|e| e.0).collect(), &pred),
        )
    }
}

pub fn to_dag(tcg: &TemporalClustersGraph, video_end: u64) -> Result<TemporalDag> {
    let n = tcg.clusters.len();
    let mut indegree = vec![0usize; n];
    let mut outdegree = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for e in &tcg.edges {
        if e.left >= n || e.right >= n {
            return Err(Error::InvalidParameter(format!("edge {}->{} names an unknown cluster", e.left, e.right)));
        }
        indegree[e.right] += 1;
        outdegree[e.left] += 1;
        succ[e.left].push(e.right);
    }
    let begin: Vec<(usize, u64)> =
        (0..n).filter(|&v| indegree[v] == 0).map(|v| (v, tcg.spans[v].start)).collect();
    let end: Vec<(usize, u64)> = (0..n)
        .filter(|&v| outdegree[v] == 0)
        .map(|v| (v, video_end.saturating_sub(tcg.spans[v].end)))
        .collect();

    // Kahn's algorithm; anything left over sits on a cycle.
    let mut remaining = indegree;
    let mut queue: VecDeque<usize> = begin.iter().map(|b| b.0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in &succ[v] {
            remaining[w] -= 1;
            if remaining[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&v| remaining[v] > 0).expect("a node left on a cycle");
        return Err(Error::CycleDetected(stuck));
    }
    Ok(TemporalDag { tcg: tcg.clone(), begin, end, order })
}

type FrameEdges<'a> = (&'a [(usize, u64)], &'a [(usize, u64)]);

fn render_dot(name: &str, clusters: &[Cluster], edges: &[Edge], frame: Option<FrameEdges<'_>>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph {name} {{");
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  node [shape=ellipse];");
    if frame.is_some() {
        let _ = writeln!(out, "  Begin [shape=box];");
    }
    for c in clusters {
        let _ = writeln!(out, "  C{} [label=\"C{}\"];", c.id, c.id);
    }
    if frame.is_some() {
        let _ = writeln!(out, "  End [shape=box];");
    }
    if let Some((begin, _)) = frame {
        for (v, delay) in begin {
            let _ = writeln!(out, "  Begin -> C{v} [label=\"delay={delay}\", style=dashed];");
        }
    }
    for e in edges {
        let _ = writeln!(out, "  C{} -> C{} [label=\"{}\"];", e.left, e.right, e.relation.label());
    }
    if let Some((_, end)) = frame {
        for (v, delay) in end {
            let _ = writeln!(out, "  C{v} -> End [label=\"delay={delay}\", style=dashed];");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DocumentBuilder, TransitionEffect};

    fn cluster(id: usize, shots: &[usize]) -> Cluster {
        Cluster { id, shot_ids: shots.to_vec(), sequence: 0 }
    }

    /// Shots given as `[start, end)` with cut-joined filler shots in the gaps.
    fn doc_with_layout(bounds: &[(u64, u64)]) -> (VideoDocument, Vec<usize>) {
        let mut b = DocumentBuilder::new();
        let mut ids = Vec::new();
        let mut at = 0;
        let mut n = 0;
        for &(s, e) in bounds {
            if s > at {
                b = b.cut(s - at, None);
                n += 1;
            }
            b = b.cut(e - s, None);
            ids.push(n);
            n += 1;
            at = e;
        }
        (b.build().unwrap(), ids)
    }

    #[test]
    fn spans_are_member_hulls() {
        let (doc, ids) = doc_with_layout(&[(0, 10)]);
        assert_eq!(cluster_span(&cluster(0, &ids), &doc), ClusterSpan { start: 0, end: 10 });
        let (doc, ids) = doc_with_layout(&[(0, 50), (250, 300)]);
        assert_eq!(cluster_span(&cluster(0, &ids), &doc), ClusterSpan { start: 0, end: 300 });
        let (doc, ids) = doc_with_layout(&[(0, 50), (150, 200)]);
        assert_eq!(cluster_span(&cluster(0, &ids), &doc), ClusterSpan { start: 0, end: 200 });
    }

    #[test]
    fn meets_across_a_cut() {
        let doc = DocumentBuilder::new().cut(100, None).cut(100, None).build().unwrap();
        let e = derive_relation(&cluster(0, &[0]), &cluster(1, &[1]), &doc).unwrap();
        assert_eq!(e.relation, AllenRelation::Meets);
    }

    #[test]
    fn before_across_a_dissolve() {
        let doc = DocumentBuilder::new()
            .cut(100, None)
            .shot(70, TransitionEffect::dissolve(30), None)
            .build()
            .unwrap();
        assert_eq!(doc.shot(1).t, 130);
        let e = derive_relation(&cluster(0, &[0]), &cluster(1, &[1]), &doc).unwrap();
        assert_eq!(e.relation, AllenRelation::Before { tau: 30 });
    }

    #[test]
    fn nested_spans_give_during() {
        let (doc, ids) = doc_with_layout(&[(0, 50), (60, 140), (150, 200), (210, 240), (250, 300)]);
        let outer = cluster(0, &[ids[0], ids[2], ids[4]]);
        let inner = cluster(1, &[ids[1], ids[3]]);
        let e = derive_relation(&inner, &outer, &doc).unwrap();
        assert_eq!((e.left, e.right), (0, 1));
        assert_eq!(e.relation, AllenRelation::During { time_codes: vec![60, 210] });
        assert_eq!(e.statement(), "C1 During C0");
    }

    #[test]
    fn partial_intersection_gives_overlaps() {
        let (doc, ids) = doc_with_layout(&[(0, 50), (60, 90), (100, 150), (160, 200)]);
        let a = cluster(0, &[ids[0], ids[2]]);
        let b = cluster(1, &[ids[1], ids[3]]);
        let e = derive_relation(&a, &b, &doc).unwrap();
        assert_eq!(e.relation, AllenRelation::Overlaps { shared: vec![60], first_outside: 160 });
        assert_eq!(e.relation.label(), "Overlaps(60,160)");
    }

    #[test]
    fn separated_spans_are_unrelated() {
        let doc = DocumentBuilder::new().cut(5, None).cut(5, None).cut(5, None).build().unwrap();
        assert_eq!(derive_relation(&cluster(0, &[0]), &cluster(2, &[2]), &doc), None);
    }

    fn chain_tcg(n: usize) -> (TemporalClustersGraph, VideoDocument) {
        let doc = (0..n).fold(DocumentBuilder::new(), |b, _| b.cut(10, None)).build().unwrap();
        let clusters = (0..n).map(|i| cluster(i, &[i])).collect();
        let tsg = TimeSpaceGraph { clusters, sequences: crate::model::sequence_boundaries(&doc) };
        (build_tcg(&tsg, &doc), doc)
    }

    #[test]
    fn single_cluster_has_no_edges() {
        let (tcg, doc) = chain_tcg(1);
        assert!(tcg.edges.is_empty());
        let dag = to_dag(&tcg, doc.end_frame()).unwrap();
        assert_eq!(dag.begin, vec![(0, 0)]);
        assert_eq!(dag.end, vec![(0, 0)]);
    }

    #[test]
    fn meets_chain_is_one_path() {
        let (tcg, doc) = chain_tcg(3);
        assert_eq!(tcg.edges.len(), 2);
        let dag = to_dag(&tcg, doc.end_frame()).unwrap();
        assert_eq!(dag.begin, vec![(0, 0)]);
        assert_eq!(dag.end, vec![(2, 0)]);
        assert_eq!(dag.order, vec![0, 1, 2]);
    }

    #[test]
    fn edgeless_graph_frames_every_node() {
        let tcg = TemporalClustersGraph {
            clusters: vec![cluster(0, &[0]), cluster(1, &[2])],
            spans: vec![ClusterSpan { start: 0, end: 5 }, ClusterSpan { start: 10, end: 15 }],
            edges: vec![],
        };
        let dag = to_dag(&tcg, 20).unwrap();
        assert_eq!(dag.begin, vec![(0, 0), (1, 10)]);
        assert_eq!(dag.end, vec![(0, 15), (1, 5)]);
    }

    #[test]
    fn cycles_are_rejected() {
        let (mut tcg, doc) = chain_tcg(3);
        tcg.edges.push(Edge { left: 2, right: 1, relation: AllenRelation::Meets });
        assert!(matches!(to_dag(&tcg, doc.end_frame()), Err(Error::CycleDetected(_))));
    }

    #[test]
    fn dot_output() {
        let (tcg, _) = chain_tcg(1);
        let dot = tcg.to_dot();
        assert_eq!(dot.matches("->").count(), 0);
        assert!(dot.contains("C0 [label=\"C0\"];"));
        let (tcg, _) = chain_tcg(2);
        assert!(tcg.to_dot().contains("C0 -> C1 [label=\"Meets\"];"));
    }

    #[test]
    fn edge_json_shape() {
        let e = Edge {
            left: 3,
            right: 4,
            relation: AllenRelation::Overlaps { shared: vec![7, 9], first_outside: 12 },
        };
        let text = serde_json::to_string(&e).unwrap();
        assert_eq!(text, r#"{"left":3,"right":4,"kind":"Overlaps","params":[7,9,12]}"#);
        assert_eq!(serde_json::from_str::<Edge>(&text).unwrap(), e);
        assert!(serde_json::from_str::<Edge>(r#"{"left":0,"right":1,"kind":"Before","params":[]}"#).is_err());
    }
}
