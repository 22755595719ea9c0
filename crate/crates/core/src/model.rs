//! Shot / sequence data model and shot-manifest ingestion.
//!
//! A video is a list of shots laid out on an integer frame axis. Each shot
//! occupies the half-open interval `[t, t + td)` and carries the transition
//! that links it to its successor. Gradual transitions (dissolves and fades)
//! take `tau` frames during which no shot is on screen, and they mark the
//! boundaries between narrative sequences.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::Histogram;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionKind {
    Cut,
    Dissolve,
    FadeIn,
    FadeOut,
}

impl TransitionKind {
    pub fn is_gradual(self) -> bool {
        !matches!(self, TransitionKind::Cut)
    }
}

impl fmt::Display for TransitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransitionKind::Cut => "cut",
            TransitionKind::Dissolve => "dissolve",
            TransitionKind::FadeIn => "fade_in",
            TransitionKind::FadeOut => "fade_out",
        })
    }
}

/// Editing effect joining a shot to the next one. A cut takes no time;
/// every other effect lasts `tau > 0` frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TransitionRecord", into = "TransitionRecord")]
pub struct TransitionEffect {
    kind: TransitionKind,
    tau: u64,
}

impl TransitionEffect {
    pub const CUT: TransitionEffect = TransitionEffect { kind: TransitionKind::Cut, tau: 0 };

    pub fn new(kind: TransitionKind, tau: u64) -> Result<Self, String> {
        match (kind, tau) {
            (TransitionKind::Cut, 0) => Ok(Self::CUT),
            (TransitionKind::Cut, _) => Err(format!("a cut must have tau 0, got {tau}")),
            (_, 0) => Err(format!("a {kind} must last at least one frame")),
            _ => Ok(Self { kind, tau }),
        }
    }

    pub fn dissolve(tau: u64) -> Self {
        Self::new(TransitionKind::Dissolve, tau).expect("dissolve needs tau > 0")
    }

    pub fn kind(&self) -> TransitionKind {
        self.kind
    }

    pub fn tau(&self) -> u64 {
        self.tau
    }

    pub fn is_gradual(&self) -> bool {
        self.kind.is_gradual()
    }
}

/// Wire form of a transition (`{"kind": "dissolve", "tau": 30}`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub kind: TransitionKind,
    #[serde(default)]
    pub tau: i64,
}

impl TryFrom<TransitionRecord> for TransitionEffect {
    type Error = String;

    fn try_from(r: TransitionRecord) -> Result<Self, String> {
        let tau = u64::try_from(r.tau).map_err(|_| format!("negative tau {}", r.tau))?;
        TransitionEffect::new(r.kind, tau)
    }
}

impl From<TransitionEffect> for TransitionRecord {
    fn from(e: TransitionEffect) -> Self {
        TransitionRecord { kind: e.kind, tau: e.tau as i64 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Shot {
    pub id: usize,
    /// Start time code in frames.
    pub t: u64,
    /// Duration in frames, at least 1.
    pub td: u64,
    /// Transition to the next shot; `None` only for the last shot.
    pub transition: Option<TransitionEffect>,
    pub histogram: Option<Histogram>,
    pub keyframe: Option<String>,
}

impl Shot {
    /// First frame after the shot.
    pub fn end(&self) -> u64 {
        self.t + self.td
    }

    fn tau(&self) -> u64 {
        self.transition.map_or(0, |e| e.tau)
    }

    pub fn ends_sequence(&self) -> bool {
        self.transition.is_some_and(|e| e.is_gradual())
    }
}

/// Inclusive range of shot ids forming one narrative sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SequenceSpan {
    pub first_shot: usize,
    pub last_shot: usize,
}

impl SequenceSpan {
    pub fn contains(&self, shot: usize) -> bool {
        (self.first_shot..=self.last_shot).contains(&shot)
    }

    pub fn len(&self) -> usize {
        self.last_shot - self.first_shot + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Validated, immutable shot list.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoDocument {
    frame_rate: f64,
    shots: Vec<Shot>,
}

impl VideoDocument {
    pub fn frame_rate(&self) -> f64 {
        self.frame_rate
    }

    pub fn shots(&self) -> &[Shot] {
        &self.shots
    }

    pub fn shot(&self, id: usize) -> &Shot {
        &self.shots[id]
    }

    pub fn len(&self) -> usize {
        self.shots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shots.is_empty()
    }

    /// First frame after the last shot.
    pub fn end_frame(&self) -> u64 {
        self.shots.last().map_or(0, Shot::end)
    }

    /// Replaces every shot's histogram. `histograms` must have one entry per shot.
    pub fn with_histograms(mut self, histograms: Vec<Histogram>) -> Self {
        assert_eq!(histograms.len(), self.shots.len());
        for (shot, h) in self.shots.iter_mut().zip(histograms) {
            shot.histogram = Some(h);
        }
        self
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let manifest: ShotManifest =
            serde_json::from_str(text).map_err(|e| Error::json("shot manifest", e))?;
        validate_manifest(manifest)
    }

    pub fn to_manifest(&self) -> ShotManifest {
        ShotManifest {
            frame_rate: self.frame_rate,
            shots: self
                .shots
                .iter()
                .map(|s| ShotRecord {
                    id: s.id as i64,
                    td: s.td as i64,
                    transition: s.transition,
                    t: Some(s.t as i64),
                    keyframe: s.keyframe.clone(),
                    histogram: s.histogram.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        crate::json::to_string(&self.to_manifest())
    }
}

/// Shot manifest as it appears on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShotManifest {
    #[serde(default = "default_frame_rate", serialize_with = "crate::json::sig12")]
    pub frame_rate: f64,
    pub shots: Vec<ShotRecord>,
}

fn default_frame_rate() -> f64 {
    25.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShotRecord {
    pub id: i64,
    pub td: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<TransitionEffect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keyframe: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram: Option<Histogram>,
}

/// Checks a raw manifest and builds the document.
///
/// Missing time codes are derived from the duration/transition chain;
/// explicit ones must agree with it. A missing transition on an inner shot
/// is read as a cut.
pub fn validate_manifest(manifest: ShotManifest) -> Result<VideoDocument> {
    if manifest.shots.is_empty() {
        return Err(Error::EmptyManifest);
    }
    if !(manifest.frame_rate.is_finite() && manifest.frame_rate > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "frame rate must be positive, got {}",
            manifest.frame_rate
        )));
    }
    let count = manifest.shots.len();
    let mut shots = Vec::with_capacity(count);
    let mut next_t = 0u64;
    let mut layout: Option<u32> = None;
    for (position, record) in manifest.shots.into_iter().enumerate() {
        if record.id != position as i64 {
            return Err(Error::IdMismatch { position, found: record.id });
        }
        let id = position;
        if record.td < 1 {
            return Err(Error::NegativeDuration { id, td: record.td });
        }
        if let Some(t) = record.t {
            if t != next_t as i64 {
                return Err(Error::NonContiguousTimeline { id, expected: next_t, found: t });
            }
        }
        let last = position + 1 == count;
        let transition = match (record.transition, last) {
            (Some(_), true) => {
                return Err(Error::InvalidTransition {
                    id,
                    reason: "the last shot has no successor".into(),
                })
            }
            (None, false) => Some(TransitionEffect::CUT),
            (tr, _) => tr,
        };
        if let Some(h) = &record.histogram {
            h.check_shape()?;
            match layout {
                Some(b) if b != h.bins_per_channel() => {
                    return Err(Error::LayoutMismatch { left: b, right: h.bins_per_channel() })
                }
                _ => layout = Some(h.bins_per_channel()),
            }
        }
        let shot = Shot {
            id,
            t: next_t,
            td: record.td as u64,
            transition,
            histogram: record.histogram,
            keyframe: record.keyframe,
        };
        next_t = shot.end() + shot.tau();
        shots.push(shot);
    }
    Ok(VideoDocument { frame_rate: manifest.frame_rate, shots })
}

/// Splits the document into sequences at every gradual transition.
pub fn sequence_boundaries(doc: &VideoDocument) -> Vec<SequenceSpan> {
    let mut spans = Vec::new();
    let mut first = 0;
    for shot in doc.shots() {
        if shot.ends_sequence() || shot.id + 1 == doc.len() {
            spans.push(SequenceSpan { first_shot: first, last_shot: shot.id });
            first = shot.id + 1;
        }
    }
    spans
}

/// Sequence index of every shot.
pub fn sequence_index(spans: &[SequenceSpan], shot_count: usize) -> Vec<usize> {
    let mut index = vec![0; shot_count];
    for (k, span) in spans.iter().enumerate() {
        index[span.first_shot..=span.last_shot].fill(k);
    }
    index
}

/// Convenience builder used by fixtures and examples.
#[derive(Debug, Default, Clone)]
pub struct DocumentBuilder {
    frame_rate: Option<f64>,
    shots: Vec<ShotRecord>,
}

impl DocumentBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn frame_rate(mut self, fps: f64) -> Self {
        self.frame_rate = Some(fps);
        self
    }

    /// Appends a shot. The transition given here links the *previous* shot
    /// to this one; it is ignored for the first shot.
    pub fn shot(mut self, td: u64, joined_by: TransitionEffect, histogram: Option<Histogram>) -> Self {
        if let Some(prev) = self.shots.last_mut() {
            prev.transition = Some(joined_by);
        }
        self.shots.push(ShotRecord {
            id: self.shots.len() as i64,
            td: td as i64,
            transition: None,
            t: None,
            keyframe: None,
            histogram,
        });
        self
    }

    pub fn cut(self, td: u64, histogram: Option<Histogram>) -> Self {
        self.shot(td, TransitionEffect::CUT, histogram)
    }

    pub fn build(self) -> Result<VideoDocument> {
        validate_manifest(ShotManifest {
            frame_rate: self.frame_rate.unwrap_or_else(default_frame_rate),
            shots: self.shots,
        })
    }
}
