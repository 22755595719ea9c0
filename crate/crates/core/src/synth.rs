//! Seeded synthetic montages with known structure.
//!
//! A fixture is a list of sequences, each a list of planted scenes. A scene
//! fixes its shots' cluster pattern (which shots look alike) and how their
//! durations are drawn. Every cluster of a sequence gets its own dominant
//! histogram bin; each shot moves a small fraction of its pixels to other
//! bins. With jitter fraction `j`, shots of one cluster differ from their
//! seed by at most `j < T` and shots of different clusters by at least
//! `1 - 2j >= T`, so clustering at threshold `T` recovers the plan exactly.
//!
//! Random draws come from a ChaCha stream; normal deviates use the
//! Irwin-Hall sum of twelve uniforms so that only exact additions are
//! involved and fixtures are bit-identical everywhere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::{Histogram, DEFAULT_BINS_PER_CHANNEL};
use crate::model::{validate_manifest, SequenceSpan, ShotManifest, ShotRecord, TransitionEffect, VideoDocument};

/// Pixels in a 352x288 key frame.
pub const DEFAULT_FRAME_PIXELS: u64 = 352 * 288;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureSpec {
    pub seed: u64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_bins")]
    pub bins_per_channel: u32,
    /// Largest fraction of a frame's pixels moved off its cluster's color.
    /// Defaults to `min(T, 1 - T) / 2`.
    #[serde(default)]
    pub jitter: Option<f64>,
    #[serde(default = "default_frame_pixels")]
    pub frame_pixels: u64,
    #[serde(default = "default_frame_rate")]
    pub frame_rate: f64,
    pub sequences: Vec<SequenceSpec>,
}

fn default_threshold() -> f64 {
    crate::clustering::DEFAULT_THRESHOLD
}
fn default_bins() -> u32 {
    DEFAULT_BINS_PER_CHANNEL
}
fn default_frame_pixels() -> u64 {
    DEFAULT_FRAME_PIXELS
}
fn default_frame_rate() -> f64 {
    25.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSpec {
    pub scenes: Vec<SceneSpec>,
    /// Gradual transition into the next sequence; a 25-frame dissolve when
    /// absent. Ignored for the last sequence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition_after: Option<TransitionEffect>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub pattern: Pattern,
    pub durations: DurationPlan,
}

/// Which shots of a scene share a look.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Pattern {
    /// All shots in one cluster.
    Single { shots: usize },
    /// Shot `i` goes to cluster `i % clusters`.
    RoundRobin { clusters: usize, shots: usize },
    /// Explicit per-shot cluster labels, local to the scene.
    Labels { labels: Vec<usize> },
}

impl Pattern {
    /// Labels renumbered in order of first appearance.
    fn labels(&self) -> Vec<usize> {
        let raw: Vec<usize> = match self {
            Pattern::Single { shots } => vec![0; *shots],
            Pattern::RoundRobin { clusters, shots } => (0..*shots).map(|i| i % clusters.max(&1)).collect(),
            Pattern::Labels { labels } => labels.clone(),
        };
        let mut seen: Vec<usize> = Vec::new();
        raw.iter()
            .map(|l| match seen.iter().position(|s| s == l) {
                Some(k) => k,
                None => {
                    seen.push(*l);
                    seen.len() - 1
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DurationPlan {
    /// `round(base + sigma * z)`, `z` standard normal truncated to `[-3, 3]`,
    /// floored at one frame.
    Normal { base: f64, sigma: f64 },
    Explicit { durations: Vec<u64> },
}

/// Inclusive shot interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotInterval {
    pub first_shot: usize,
    pub last_shot: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub threshold: f64,
    pub shot_count: usize,
    pub sequences: Vec<SequenceSpan>,
    /// Planted scenes.
    pub scenes: Vec<ShotInterval>,
    /// Scenes expected from cluster analysis alone, before rhythm.
    pub pre_rhythm_scenes: Vec<ShotInterval>,
    /// Member shots of every cluster, ordered by first shot.
    pub clusters: Vec<Vec<usize>>,
}

impl GroundTruth {
    /// First shot of every planted scene except shot 0.
    pub fn boundaries(&self) -> Vec<usize> {
        self.scenes.iter().map(|s| s.first_shot).filter(|&s| s != 0).collect()
    }

    pub fn to_json_string(&self) -> String {
        crate::json::to_string(self)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::json("ground truth", e))
    }
}

/// Standard normal deviate via Irwin-Hall, truncated to `[-3, 3]`.
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let sum: f64 = (0..12).map(|_| rng.random::<u32>() as f64 / 4_294_967_296.0).sum();
        let z = sum - 6.0;
        if z.abs() <= 3.0 {
            return z;
        }
    }
}

fn jitter_of(spec: &FixtureSpec) -> Result<f64> {
    let t = spec.threshold;
    if !(0.0..=1.0).contains(&t) || t == 0.0 {
        return Err(Error::UnrealizableSpec(format!("threshold {t} admits no cluster with two shots")));
    }
    let j = spec.jitter.unwrap_or(t.min(1.0 - t) / 2.0);
    if !(0.0..t).contains(&j) {
        return Err(Error::UnrealizableSpec(format!("jitter {j} must lie in [0, {t})")));
    }
    if 1.0 - 2.0 * j < t {
        return Err(Error::UnrealizableSpec(format!("jitter {j} lets distinct clusters fall under {t}")));
    }
    Ok(j)
}

pub fn synthesize(spec: &FixtureSpec) -> Result<(VideoDocument, GroundTruth)> {
    let jitter = jitter_of(spec)?;
    let bins = (spec.bins_per_channel as usize).pow(3);
    if !(2..=256).contains(&spec.bins_per_channel) {
        return Err(Error::InvalidBinCount(spec.bins_per_channel));
    }
    if spec.sequences.is_empty() || spec.sequences.iter().any(|s| s.scenes.is_empty()) {
        return Err(Error::UnrealizableSpec("every sequence needs at least one scene".into()));
    }
    if spec.frame_pixels == 0 {
        return Err(Error::UnrealizableSpec("frames need pixels".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let max_moved = (jitter * spec.frame_pixels as f64).floor() as u64;

    let mut records: Vec<ShotRecord> = Vec::new();
    let mut truth = GroundTruth {
        threshold: spec.threshold,
        shot_count: 0,
        sequences: Vec::new(),
        scenes: Vec::new(),
        pre_rhythm_scenes: Vec::new(),
        clusters: Vec::new(),
    };

    for (k, seq) in spec.sequences.iter().enumerate() {
        let seq_first = records.len();
        // cluster slots of this sequence, in order of first appearance
        let mut centers: Vec<usize> = (0..bins).collect();
        let mut used = 0usize;
        for scene in &seq.scenes {
            let labels = scene.pattern.labels();
            if labels.is_empty() {
                return Err(Error::UnrealizableSpec("scenes need at least one shot".into()));
            }
            let durations = match &scene.durations {
                DurationPlan::Explicit { durations } => {
                    if durations.len() != labels.len() || durations.contains(&0) {
                        return Err(Error::UnrealizableSpec(format!(
                            "scene needs {} positive durations, got {:?}",
                            labels.len(),
                            durations
                        )));
                    }
                    durations.clone()
                }
                DurationPlan::Normal { base, sigma } => {
                    if !(base.is_finite() && sigma.is_finite() && *sigma >= 0.0) {
                        return Err(Error::UnrealizableSpec("bad duration law".into()));
                    }
                    (0..labels.len()).map(|_| (base + sigma * normal(&mut rng)).round().max(1.0) as u64).collect()
                }
            };
            let local_clusters = labels.iter().max().map_or(0, |m| m + 1);
            if used + local_clusters > bins {
                return Err(Error::UnrealizableSpec(format!(
                    "sequence {k} needs more than {bins} distinct cluster colors"
                )));
            }
            // pick fresh centers for this scene's clusters
            for slot in used..used + local_clusters {
                let pick = rng.random_range(slot..bins);
                centers.swap(slot, pick);
            }
            let scene_first = records.len();
            let mut hulls = vec![(usize::MAX, 0usize); local_clusters];
            for (i, (&label, &td)) in labels.iter().zip(&durations).enumerate() {
                let id = records.len();
                let center = centers[used + label];
                let histogram = jittered(&mut rng, bins, center, spec.frame_pixels, max_moved, spec.bins_per_channel);
                records.push(ShotRecord {
                    id: id as i64,
                    td: td as i64,
                    transition: None,
                    t: None,
                    keyframe: None,
                    histogram: Some(histogram),
                });
                let h = &mut hulls[label];
                h.0 = h.0.min(i);
                h.1 = h.1.max(i);
            }
            // labels are numbered in order of first appearance
            let base = truth.clusters.len();
            truth.clusters.resize(base + local_clusters, Vec::new());
            for (i, &label) in labels.iter().enumerate() {
                truth.clusters[base + label].push(scene_first + i);
            }
            // clusters with intersecting hulls share a pre-rhythm scene
            let mut sorted = hulls.clone();
            sorted.sort_unstable();
            let mut current = sorted[0];
            for &(a, b) in &sorted[1..] {
                if a <= current.1 {
                    current.1 = current.1.max(b);
                } else {
                    truth.pre_rhythm_scenes.push(ShotInterval {
                        first_shot: scene_first + current.0,
                        last_shot: scene_first + current.1,
                    });
                    current = (a, b);
                }
            }
            truth.pre_rhythm_scenes.push(ShotInterval {
                first_shot: scene_first + current.0,
                last_shot: scene_first + current.1,
            });
            truth.scenes.push(ShotInterval { first_shot: scene_first, last_shot: records.len() - 1 });
            used += local_clusters;
        }
        let seq_last = records.len() - 1;
        truth.sequences.push(SequenceSpan { first_shot: seq_first, last_shot: seq_last });
        let last_sequence = k + 1 == spec.sequences.len();
        for r in &mut records[seq_first..seq_last] {
            r.transition = Some(TransitionEffect::CUT);
        }
        if !last_sequence {
            let effect = seq.transition_after.unwrap_or(TransitionEffect::dissolve(25));
            if !effect.is_gradual() {
                return Err(Error::UnrealizableSpec("sequences must be joined by gradual transitions".into()));
            }
            records[seq_last].transition = Some(effect);
        }
    }
    truth.shot_count = records.len();
    let doc = validate_manifest(ShotManifest { frame_rate: spec.frame_rate, shots: records })?;
    Ok((doc, truth))
}

fn jittered(rng: &mut ChaCha8Rng, bins: usize, center: usize, total: u64, max_moved: u64, b: u32) -> Histogram {
    let mut counts = vec![0u64; bins];
    let moved = if max_moved == 0 { 0 } else { rng.random_range(0..=max_moved) };
    counts[center] = total - moved;
    let mut left = moved;
    while left > 0 {
        let mut bin = rng.random_range(0..bins - 1);
        if bin >= center {
            bin += 1;
        }
        let chunk = if left < 8 { left } else { rng.random_range(1..=left) };
        counts[bin] += chunk;
        left -= chunk;
    }
    Histogram::from_counts(b, counts).expect("histogram layout is consistent")
}

/// Ready-made fixture specs.
pub mod presets {
    use super::*;

    fn labels(l: &[usize]) -> Pattern {
        Pattern::Labels { labels: l.to_vec() }
    }

    fn explicit(d: &[u64]) -> DurationPlan {
        DurationPlan::Explicit { durations: d.to_vec() }
    }

    fn one_sequence(scenes: Vec<SceneSpec>) -> FixtureSpec {
        FixtureSpec {
            seed: 0,
            threshold: default_threshold(),
            bins_per_channel: DEFAULT_BINS_PER_CHANNEL,
            jitter: None,
            frame_pixels: DEFAULT_FRAME_PIXELS,
            frame_rate: 25.0,
            sequences: vec![SequenceSpec { scenes, transition_after: None }],
        }
    }

    /// Ten shots: three single-shot clusters in a row, then three clusters
    /// nested inside each other (`A B C C B A`), then one more single shot.
    /// Cluster analysis sees five scenes; the durations are tuned so that
    /// rhythm absorbs the last shot first, then the three leading shots
    /// from the nearest outwards, leaving one scene.
    pub fn nested_dialogue() -> FixtureSpec {
        one_sequence(vec![SceneSpec {
            pattern: labels(&[0, 1, 2, 3, 4, 5, 5, 4, 3, 6]),
            durations: explicit(&[108, 98, 88, 100, 110, 100, 110, 100, 110, 115]),
        }])
    }

    /// 66 shots in four planted scenes. Cluster analysis finds three
    /// multi-shot scenes and 22 one-shot scenes; after coupling and
    /// residual regrouping exactly one one-shot scene (shot 25) is left.
    pub fn sparse_singletons() -> FixtureSpec {
        let alternate = |n: usize, a: u64, b: u64| -> Vec<u64> {
            (0..n).map(|i| if i % 2 == 0 { a } else { b }).collect()
        };
        let mut second = alternate(11, 100, 110);
        second.push(400);
        let opening: Vec<usize> = (0..14).collect();
        let mut middle = vec![0, 1, 2, 3];
        middle.extend([4, 5, 4, 5, 4, 5]);
        middle.extend([6, 7]);
        let mut third = vec![0, 1];
        third.extend((0..16).map(|i| 2 + i % 2));
        let closing: Vec<usize> = (0..22).map(|i| i % 2).collect();
        one_sequence(vec![
            SceneSpec { pattern: labels(&opening), durations: explicit(&[40; 14]) },
            SceneSpec { pattern: labels(&middle), durations: explicit(&second) },
            SceneSpec { pattern: labels(&third), durations: explicit(&alternate(18, 200, 215)) },
            SceneSpec { pattern: labels(&closing), durations: explicit(&alternate(22, 60, 66)) },
        ])
    }

    /// 67 shots, 46 clusters, four scenes. Every scene is held together by a
    /// cluster that opens and closes it, with many one-off shots nested
    /// inside; tempo changes sharply between scenes.
    pub fn dense_clusters(seed: u64) -> FixtureSpec {
        let scene = |extra: usize, tail: usize, base: f64| {
            let mut l: Vec<usize> = (0..=extra).collect();
            l.extend((0..tail).map(|i| i % 2));
            SceneSpec { pattern: labels(&l), durations: DurationPlan::Normal { base, sigma: 2.0 } }
        };
        FixtureSpec {
            seed,
            ..one_sequence(vec![scene(11, 5, 40.0), scene(11, 5, 110.0), scene(10, 6, 40.0), scene(10, 5, 110.0)])
        }
    }

    /// Well-separated random montage: distinct colors per cluster, every
    /// planted scene internally interleaved (or a lone shot), and scene
    /// tempos alternating with jumps of at least 24 sigma.
    pub fn easy(seed: u64) -> FixtureSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_ea5e);
        let sigma = rng.random_range(1..=4) as f64;
        let low = 12.0 * sigma + 20.0;
        let high = low + 30.0 * sigma + rng.random_range(0..=10) as f64 * sigma;
        let sequences = (0..rng.random_range(1..=3))
            .map(|_| {
                let mut previous_single = true;
                let count = rng.random_range(2..=5);
                let scenes = (0..count)
                    .map(|i| {
                        let base = if i % 2 == 0 { low } else { high };
                        let single = !previous_single && rng.random_bool(0.2);
                        previous_single = single;
                        let pattern = if single {
                            Pattern::Single { shots: 1 }
                        } else {
                            let clusters = rng.random_range(1..=3);
                            Pattern::RoundRobin { clusters, shots: rng.random_range(clusters + 1..=clusters + 6) }
                        };
                        SceneSpec { pattern, durations: DurationPlan::Normal { base, sigma } }
                    })
                    .collect();
                SequenceSpec {
                    scenes,
                    transition_after: Some(TransitionEffect::dissolve(rng.random_range(5..=40))),
                }
            })
            .collect();
        FixtureSpec { seed, sequences, ..one_sequence(Vec::new()) }
    }

    /// Unstructured random montage for stress tests: arbitrary cluster
    /// label sequences, arbitrary durations, random sequence breaks.
    pub fn random(seed: u64) -> FixtureSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa11ce);
        let sequences = (0..rng.random_range(1..=4))
            .map(|_| {
                let scenes = (0..rng.random_range(1..=5))
                    .map(|_| {
                        let shots = rng.random_range(1..=9);
                        let clusters = rng.random_range(1..=shots.min(5));
                        let labels = (0..shots).map(|_| rng.random_range(0..clusters)).collect();
                        let durations = if rng.random_bool(0.5) {
                            DurationPlan::Normal {
                                base: rng.random_range(10..=200) as f64,
                                sigma: rng.random_range(0..=20) as f64,
                            }
                        } else {
                            DurationPlan::Explicit {
                                durations: (0..shots).map(|_| rng.random_range(1..=150)).collect(),
                            }
                        };
                        SceneSpec { pattern: Pattern::Labels { labels }, durations }
                    })
                    .collect();
                SequenceSpec {
                    scenes,
                    transition_after: Some(TransitionEffect::dissolve(rng.random_range(1..=60))),
                }
            })
            .collect();
        FixtureSpec { seed, sequences, ..one_sequence(Vec::new()) }
    }
}
