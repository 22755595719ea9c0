//! The `cineparse` command line.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 when an input fails
//! validation, 3 when a pipeline invariant breaks.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::clustering::{cluster_document, TimeSpaceGraph};
use crate::config::Config;
use crate::coupling::refine;
use crate::error::{Error, Result};
use crate::eval::{comparison_table, evaluate, intervals, scene_table};
use crate::foe::{detect_shot_transitions, transitions_to_manifest, FramePattern, MatchConfig};
use crate::histogram::{compute_histogram, Histogram, Image};
use crate::model::VideoDocument;
use crate::rhythm::{rhythm_stats, Denominator, RhythmStats, SafeInterval, ShotGroup};
use crate::scenes::{scenes_from_tcg, segment_spatial_temporal, Segmentation};
use crate::synth::{presets, synthesize, FixtureSpec, GroundTruth};
use crate::temporal::{build_tcg, to_dag};

#[derive(Debug, Parser)]
#[command(name = "cineparse", version, about = "Scene segmentation from shot clusters and editing rhythm")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full pipeline: manifest to final scenes.
    Segment(SegmentArgs),
    /// Visual clusters per sequence.
    Cluster(ClusterArgs),
    /// Temporal relations between clusters.
    Tcg(TcgArgs),
    /// Duration-variation statistics per scene.
    Rhythm(RhythmArgs),
    /// Rhythm refinement of an existing segmentation.
    Couple(CoupleArgs),
    /// Generate a synthetic manifest and its ground truth.
    Synth(SynthArgs),
    /// Score a segmentation against ground truth.
    Eval(EvalArgs),
    /// Shot transitions from per-frame FOE point patterns.
    Foe(FoeArgs),
}

#[derive(Debug, Args)]
struct Tuning {
    #[arg(long, default_value_t = crate::clustering::DEFAULT_THRESHOLD)]
    threshold: f64,
    #[arg(long, default_value_t = crate::rhythm::DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value_t = crate::rhythm::DEFAULT_MIN_GROUP)]
    min_group: usize,
    /// Histogram bins per color channel, used for key frames.
    #[arg(long, default_value_t = crate::histogram::DEFAULT_BINS_PER_CHANNEL)]
    bins: u32,
    #[arg(long, value_enum, default_value_t = DenominatorArg::GroupSize)]
    denominator: DenominatorArg,
}

impl Tuning {
    fn config(&self) -> Result<Config> {
        let config = Config {
            threshold: self.threshold,
            alpha: self.alpha,
            min_group: self.min_group,
            bins_per_channel: self.bins,
            denominator: match self.denominator {
                DenominatorArg::GroupSize => Denominator::GroupSize,
                DenominatorArg::Unbiased => Denominator::Unbiased,
            },
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DenominatorArg {
    GroupSize,
    Unbiased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Stage {
    Clusters,
    Tcg,
    Initial,
}

#[derive(Debug, Args)]
struct SegmentArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Segmentation JSON (or the partial output of `--stop-after`); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    stop_after: Option<Stage>,
    /// DOT rendering of the temporal-clusters graph.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Merge trace of the coupling stage as JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Plain-text report comparing the stages, optionally against ground truth.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    truth: Option<PathBuf>,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Debug, Args)]
struct ClusterArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Text time-space layout of the clusters.
    #[arg(long)]
    timeline: Option<PathBuf>,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Debug, Args)]
struct TcgArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Clusters from `cluster` or `segment --stop-after clusters`; recomputed when absent.
    #[arg(long)]
    clusters: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Render the DAG with Begin/End nodes instead of the bare graph.
    #[arg(long)]
    dag: bool,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Debug, Args)]
struct RhythmArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Segmentation whose scenes are measured; the spatial-temporal one when absent.
    #[arg(long)]
    scenes: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Debug, Args)]
struct CoupleArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Initial segmentation, e.g. from `segment --stop-after initial`.
    #[arg(long)]
    initial: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Preset {
    NestedDialogue,
    SparseSingletons,
    DenseClusters,
    Easy,
    Random,
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Fixture spec JSON.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// Overrides the fixture's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Manifest output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    #[arg(long, default_value_t = 0)]
    tolerance: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Spatial-temporal segmentation for the first column of `--table`.
    #[arg(long)]
    initial: Option<PathBuf>,
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FoeArgs {
    /// JSON list of `{"frame": f, "points": [[x, y], ...]}`.
    #[arg(long)]
    patterns: PathBuf,
    #[arg(long)]
    radius: f64,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    #[arg(long, default_value_t = 0.0)]
    penalty: f64,
    #[arg(long, default_value_t = 3)]
    min_run: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Shot manifest skeleton derived from the transitions.
    #[arg(long)]
    manifest_out: Option<PathBuf>,
    #[arg(long, default_value_t = 25.0)]
    frame_rate: f64,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter("CINEPARSE_LOG")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                2
            } else {
                3
            }
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Segment(a) => segment(a),
        Command::Cluster(a) => cluster(a),
        Command::Tcg(a) => tcg(a),
        Command::Rhythm(a) => rhythm(a),
        Command::Couple(a) => couple(a),
        Command::Synth(a) => synth(a),
        Command::Eval(a) => eval(a),
        Command::Foe(a) => foe(a),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::io(p.display().to_string(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::json(path.display().to_string(), e))
}

/// Loads a manifest and fills missing histograms from key frames, which
/// are resolved relative to the manifest's directory.
pub fn load_document(path: &Path, bins_per_channel: u32) -> Result<VideoDocument> {
    let doc = VideoDocument::from_json_str(&read(path)?)?;
    if doc.shots().iter().all(|s| s.histogram.is_some()) {
        return Ok(doc);
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let histograms: Vec<Option<Histogram>> = doc
        .shots()
        .par_iter()
        .map(|s| match (&s.histogram, &s.keyframe) {
            (Some(h), _) => Ok(Some(h.clone())),
            (None, Some(frame)) => {
                let image = Image::read_ppm(&base.join(frame))?;
                compute_histogram(&image, bins_per_channel).map(Some)
            }
            (None, None) => Ok(None),
        })
        .collect::<Result<_>>()?;
    if let Some(missing) = histograms.iter().position(Option::is_none) {
        return Err(Error::MissingHistogram(missing));
    }
    log::info!("computed {} key-frame histograms", doc.shots().iter().filter(|s| s.histogram.is_none()).count());
    let doc = doc.with_histograms(histograms.into_iter().map(Option::unwrap).collect());
    // mixed manifests must still agree on one layout
    crate::model::validate_manifest(doc.to_manifest())
}

fn check(seg: &Segmentation, doc: &VideoDocument) -> Result<()> {
    seg.check_partition(doc.len()).map_err(Error::Invariant)
}

fn segment(a: SegmentArgs) -> Result<()> {
    let config = a.tuning.config()?;
    let doc = load_document(&a.manifest, config.bins_per_channel)?;
    let tsg = cluster_document(&doc, config.threshold)?;
    if a.stop_after == Some(Stage::Clusters) {
        return emit(a.out.as_deref(), &tsg.to_json_string());
    }
    let tcg = build_tcg(&tsg, &doc);
    to_dag(&tcg, doc.end_frame())?;
    if let Some(dot) = &a.dot {
        emit(Some(dot), &tcg.to_dot())?;
    }
    if a.stop_after == Some(Stage::Tcg) {
        return emit(a.out.as_deref(), &tcg.to_json_string());
    }
    let initial = scenes_from_tcg(&tcg, &doc)?;
    check(&initial, &doc)?;
    if a.stop_after == Some(Stage::Initial) {
        return emit(a.out.as_deref(), &initial.to_json_string());
    }
    let full = refine(initial, &doc, &config)?;
    check(&full.final_, &doc)?;
    log::info!(
        "{} initial scenes, {} after coupling ({} passes), {} final",
        full.initial.scenes.len(),
        full.coupled.scenes.len(),
        full.passes,
        full.final_.scenes.len()
    );
    if let Some(trace) = &a.trace {
        emit(Some(trace), &crate::json::to_string(&full.trace))?;
    }
    if let Some(report) = &a.report {
        let mut columns = vec![
            ("spatial-temporal", intervals(&full.initial)),
            ("coupled", intervals(&full.coupled)),
            ("final", intervals(&full.final_)),
        ];
        let mut text = String::new();
        if let Some(truth) = &a.truth {
            let truth = GroundTruth::from_json_str(&read(truth)?)?;
            let r = evaluate(&full.final_, &truth, 0)?;
            text = format!(
                "precision {}  recall {}  f1 {}\n\n",
                crate::json::round12(r.metrics.precision),
                crate::json::round12(r.metrics.recall),
                crate::json::round12(r.metrics.f1)
            );
            columns.push(("truth", truth.scenes));
        }
        text.insert_str(0, &scene_table(&columns));
        emit(Some(report), &text)?;
    }
    emit(a.out.as_deref(), &full.final_.to_json_string())
}

fn cluster(a: ClusterArgs) -> Result<()> {
    let config = a.tuning.config()?;
    let doc = load_document(&a.manifest, config.bins_per_channel)?;
    let tsg = cluster_document(&doc, config.threshold)?;
    if let Some(path) = &a.timeline {
        emit(Some(path), &tsg.render_timeline(&doc))?;
    }
    emit(a.out.as_deref(), &tsg.to_json_string())
}

fn tcg(a: TcgArgs) -> Result<()> {
    let config = a.tuning.config()?;
    let doc = match &a.clusters {
        // clusters already carry the visual information
        Some(_) => VideoDocument::from_json_str(&read(&a.manifest)?)?,
        None => load_document(&a.manifest, config.bins_per_channel)?,
    };
    let tsg: TimeSpaceGraph = match &a.clusters {
        Some(path) => {
            let tsg: TimeSpaceGraph = parse(path)?;
            tsg.validate(&doc)?;
            tsg
        }
        None => cluster_document(&doc, config.threshold)?,
    };
    let graph = build_tcg(&tsg, &doc);
    let dag = to_dag(&graph, doc.end_frame())?;
    if let Some(dot) = &a.dot {
        emit(Some(dot), &if a.dag { dag.to_dot() } else { graph.to_dot() })?;
    }
    emit(a.out.as_deref(), &graph.to_json_string())
}

#[derive(Serialize)]
struct SceneRhythm {
    scene: usize,
    first_shot: usize,
    last_shot: usize,
    #[serde(flatten)]
    stats: RhythmStats,
    safe_interval: SafeInterval,
}

fn rhythm(a: RhythmArgs) -> Result<()> {
    let config = a.tuning.config()?;
    let seg = match &a.scenes {
        Some(path) => {
            let doc = VideoDocument::from_json_str(&read(&a.manifest)?)?;
            let seg = Segmentation::from_json_str(&read(path)?)?;
            seg.check_partition(doc.len()).map_err(Error::InvalidParameter)?;
            (doc, seg)
        }
        None => {
            let doc = load_document(&a.manifest, config.bins_per_channel)?;
            let seg = segment_spatial_temporal(&doc, config.threshold)?;
            (doc, seg)
        }
    };
    let (doc, seg) = seg;
    let mut rows = Vec::new();
    for scene in seg.scenes.iter().filter(|s| s.len() >= 2) {
        let group = ShotGroup::from_shots(&doc.shots()[scene.first_shot..=scene.last_shot])?;
        let stats = rhythm_stats(&group, config.denominator)?;
        let safe_interval = stats.safe_interval(config.alpha);
        rows.push(SceneRhythm {
            scene: scene.id,
            first_shot: scene.first_shot,
            last_shot: scene.last_shot,
            stats,
            safe_interval,
        });
    }
    emit(a.out.as_deref(), &crate::json::to_string(&rows))
}

fn couple(a: CoupleArgs) -> Result<()> {
    let config = a.tuning.config()?;
    let doc = VideoDocument::from_json_str(&read(&a.manifest)?)?;
    let initial = Segmentation::from_json_str(&read(&a.initial)?)?;
    initial.check_partition(doc.len()).map_err(Error::InvalidParameter)?;
    let full = refine(initial, &doc, &config)?;
    check(&full.final_, &doc)?;
    if let Some(trace) = &a.trace {
        emit(Some(trace), &crate::json::to_string(&full.trace))?;
    }
    emit(a.out.as_deref(), &full.final_.to_json_string())
}

fn synth(a: SynthArgs) -> Result<()> {
    let seed = a.seed.unwrap_or(0);
    let mut spec: FixtureSpec = match (a.spec.as_deref(), a.preset) {
        (Some(path), _) => parse(path)?,
        (None, Some(Preset::NestedDialogue)) => presets::nested_dialogue(),
        (None, Some(Preset::SparseSingletons)) => presets::sparse_singletons(),
        (None, Some(Preset::DenseClusters)) => presets::dense_clusters(seed),
        (None, Some(Preset::Easy)) => presets::easy(seed),
        (None, Some(Preset::Random)) => presets::random(seed),
        (None, None) => unreachable!("clap requires --spec or --preset"),
    };
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    let (doc, truth) = synthesize(&spec)?;
    if let Some(path) = &a.truth {
        emit(Some(path), &truth.to_json_string())?;
    }
    emit(a.out.as_deref(), &doc.to_json_string())
}

fn eval(a: EvalArgs) -> Result<()> {
    let pred = Segmentation::from_json_str(&read(&a.pred)?)?;
    let truth = GroundTruth::from_json_str(&read(&a.truth)?)?;
    let report = evaluate(&pred, &truth, a.tolerance)?;
    if let Some(path) = &a.table {
        let initial = match &a.initial {
            Some(p) => Segmentation::from_json_str(&read(p)?)?,
            None => Segmentation { scenes: Vec::new(), sequences: Vec::new() },
        };
        emit(Some(path), &comparison_table(&initial, &pred, &truth.scenes))?;
    }
    emit(a.out.as_deref(), &report.to_json_string())
}

fn foe(a: FoeArgs) -> Result<()> {
    let patterns: Vec<FramePattern> = parse(&a.patterns)?;
    let cfg = MatchConfig { zone_radius: a.radius, penalty: a.penalty, threshold: a.threshold, min_gradual_run: a.min_run };
    let transitions = detect_shot_transitions(&patterns, &cfg)?;
    if let Some(path) = &a.manifest_out {
        let first = patterns.first().map_or(0, |p| p.frame);
        let last = patterns.last().map_or(0, |p| p.frame);
        emit(Some(path), &crate::json::to_string(&transitions_to_manifest(&transitions, first, last, a.frame_rate)))?;
    }
    emit(a.out.as_deref(), &crate::json::to_string(&transitions))
}
