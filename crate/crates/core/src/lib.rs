//! Scene segmentation of edited video from shot parameters.
//!
//! A video is described by a shot manifest: durations, transitions and one
//! color histogram (or key frame) per shot. Segmentation runs in stages:
//!
//! 1. [`clustering`] groups visually similar shots inside each sequence;
//! 2. [`temporal`] relates the clusters in time and builds a DAG;
//! 3. [`scenes`] reads scenes off the relation graph;
//! 4. [`coupling`] uses editing rhythm ([`rhythm`]) to absorb one-shot
//!    scenes and regroup the leftovers.
//!
//! [`synth`] generates seeded montages with known answers and [`eval`]
//! scores segmentations against them. [`foe`] detects shot transitions from
//! focus-of-expansion point patterns.
//!
//! ```
//! use cineparse::{segment_full, synth, Config};
//!
//! let (doc, truth) = synth::synthesize(&synth::presets::nested_dialogue()).unwrap();
//! let result = segment_full(&doc, &Config::default()).unwrap();
//! assert_eq!(result.initial.scenes.len(), 5);
//! assert_eq!(result.final_.scenes.len(), truth.scenes.len());
//! ```

pub mod cli;
pub mod clustering;
pub mod config;
pub mod coupling;
pub mod error;
pub mod eval;
pub mod foe;
pub mod histogram;
pub mod json;
pub mod model;
pub mod rhythm;
pub mod scenes;
pub mod synth;
pub mod temporal;

pub use clustering::{cluster_document, Cluster, TimeSpaceGraph};
pub use config::Config;
pub use coupling::{couple, refine, resolve_residuals, segment_full, FullSegmentation, MergeEvent};
pub use error::{Error, Result};
pub use eval::{evaluate, EvalReport};
pub use histogram::{compute_histogram, dissimilarity, intersection, similarity, Histogram, Image};
pub use model::{validate_manifest, DocumentBuilder, Shot, ShotManifest, TransitionEffect, TransitionKind, VideoDocument};
pub use rhythm::{aggregation_test, rhythm_segment, rhythm_stats, Denominator, ShotGroup, Side};
pub use scenes::{extract_scenes, segment_spatial_temporal, Scene, Segmentation};
pub use temporal::{build_tcg, to_dag, AllenRelation, Edge, TemporalClustersGraph, TemporalDag};
