//! Coupling of spatial-temporal scenes with rhythm.
//!
//! One-shot scenes left by TCG analysis are offered to the multi-shot
//! scenes right before and after them in the same sequence. The neighbour
//! whose rhythm accepts the shot with the smallest z-score absorbs it (the
//! preceding scene wins exact ties). Passes repeat until one changes
//! nothing. Runs of more than two one-shot scenes that survive are then
//! regrouped by rhythm alone.

use serde::Serialize;

use crate::config::Config;
use crate::error::Result;
use crate::model::VideoDocument;
use crate::rhythm::{aggregation_test, rhythm_segment, Denominator, ShotGroup, Side};
use crate::scenes::{segment_spatial_temporal, Scene, Segmentation};

/// One absorption of a one-shot scene.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MergeEvent {
    pub pass: usize,
    pub shot: usize,
    /// Id, in the input segmentation, of the scene that absorbed the shot.
    pub absorbed_into: usize,
    pub side: Side,
    #[serde(serialize_with = "crate::json::sig12")]
    pub zscore: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingOutcome {
    pub segmentation: Segmentation,
    pub trace: Vec<MergeEvent>,
    /// Passes run, including the final one that changed nothing.
    pub passes: usize,
}

#[derive(Debug, Clone)]
struct Unit {
    first: usize,
    last: usize,
    clusters: Vec<usize>,
    sequence: usize,
    origin: usize,
}

impl Unit {
    fn is_one_shot(&self) -> bool {
        self.first == self.last
    }

    fn group(&self, doc: &VideoDocument) -> ShotGroup {
        ShotGroup::new(self.first, (self.first..=self.last).map(|s| doc.shot(s).td).collect())
    }
}

fn units_of(seg: &Segmentation) -> Vec<Unit> {
    seg.scenes
        .iter()
        .map(|s| Unit {
            first: s.first_shot,
            last: s.last_shot,
            clusters: s.member_clusters.clone(),
            sequence: s.sequence,
            origin: s.id,
        })
        .collect()
}

fn segmentation_of(units: &[Unit], sequences: &[crate::model::SequenceSpan]) -> Segmentation {
    let scenes = units
        .iter()
        .enumerate()
        .map(|(k, u)| {
            let mut clusters = u.clusters.clone();
            clusters.sort_unstable();
            clusters.dedup();
            Scene::new(k, u.first, u.last, clusters, u.sequence)
        })
        .collect();
    Segmentation { scenes, sequences: sequences.to_vec() }
}

/// Absorbs one-shot scenes into rhythm-compatible neighbours until a pass
/// changes nothing. Scene boundaries are only ever removed.
pub fn couple(
    initial: &Segmentation,
    doc: &VideoDocument,
    alpha: f64,
    denominator: Denominator,
) -> Result<CouplingOutcome> {
    let mut units = units_of(initial);
    let mut trace = Vec::new();
    let mut passes = 0;
    loop {
        passes += 1;
        let pending: Vec<usize> = units.iter().filter(|u| u.is_one_shot()).map(|u| u.first).collect();
        let mut changed = false;
        for shot in pending {
            let pos = units.iter().position(|u| u.first == shot).expect("one-shot scene still present");
            let candidate = doc.shot(shot);
            let sequence = units[pos].sequence;
            let neighbours = [
                pos.checked_sub(1).map(|p| (p, Side::Back)),
                (pos + 1 < units.len()).then_some((pos + 1, Side::Front)),
            ];
            let mut best: Option<(usize, Side, f64)> = None;
            for (p, side) in neighbours.into_iter().flatten() {
                let u = &units[p];
                if u.is_one_shot() || u.sequence != sequence {
                    continue;
                }
                let decision = aggregation_test(&u.group(doc), candidate, alpha, side, denominator)?;
                // strict comparison keeps the preceding scene on exact ties
                if decision.accept && best.is_none_or(|(_, _, z)| decision.zscore < z) {
                    best = Some((p, side, decision.zscore));
                }
            }
            let Some((p, side, zscore)) = best else { continue };
            let absorbed = units.remove(pos);
            let host = if p > pos { p - 1 } else { p };
            let unit = &mut units[host];
            match side {
                Side::Back => unit.last = shot,
                Side::Front => unit.first = shot,
            }
            unit.clusters.extend(absorbed.clusters);
            log::debug!("pass {passes}: shot {shot} joins scene {} ({side}, z={zscore:.4})", unit.origin);
            trace.push(MergeEvent { pass: passes, shot, absorbed_into: unit.origin, side, zscore });
            changed = true;
        }
        if !changed {
            break;
        }
    }
    Ok(CouplingOutcome { segmentation: segmentation_of(&units, &initial.sequences), trace, passes })
}

/// Regroups runs of more than two consecutive one-shot scenes by rhythm;
/// shorter runs stay as they are.
pub fn resolve_residuals(
    seg: &Segmentation,
    doc: &VideoDocument,
    min_group: usize,
    alpha: f64,
    denominator: Denominator,
) -> Result<Segmentation> {
    let units = units_of(seg);
    let mut out: Vec<Unit> = Vec::with_capacity(units.len());
    let mut i = 0;
    while i < units.len() {
        let mut j = i;
        while j < units.len()
            && units[j].is_one_shot()
            && units[j].sequence == units[i].sequence
            && (j == i || units[j].first == units[j - 1].last + 1)
        {
            j += 1;
        }
        if j - i > 2 {
            let run = &units[i..j];
            let shots = &doc.shots()[run[0].first..=run[run.len() - 1].last];
            for g in rhythm_segment(shots, min_group, alpha, denominator)? {
                let members = &run[g.first_shot - run[0].first..=g.last_shot() - run[0].first];
                out.push(Unit {
                    first: g.first_shot,
                    last: g.last_shot(),
                    clusters: members.iter().flat_map(|u| u.clusters.iter().copied()).collect(),
                    sequence: run[0].sequence,
                    origin: members[0].origin,
                });
            }
            i = j;
        } else {
            let end = j.max(i + 1);
            out.extend(units[i..end].iter().cloned());
            i = end;
        }
    }
    Ok(segmentation_of(&out, &seg.sequences))
}

/// Everything [`segment_full`] produces.
#[derive(Debug, Clone, PartialEq)]
pub struct FullSegmentation {
    /// Spatial-temporal segmentation before rhythm is considered.
    pub initial: Segmentation,
    /// After one-shot absorption, before residual runs are regrouped.
    pub coupled: Segmentation,
    pub final_: Segmentation,
    pub trace: Vec<MergeEvent>,
    pub passes: usize,
}

pub fn segment_full(doc: &VideoDocument, config: &Config) -> Result<FullSegmentation> {
    config.validate()?;
    let initial = segment_spatial_temporal(doc, config.threshold)?;
    refine(initial, doc, config)
}

/// Coupling and residual handling on an existing initial segmentation.
pub fn refine(initial: Segmentation, doc: &VideoDocument, config: &Config) -> Result<FullSegmentation> {
    let outcome = couple(&initial, doc, config.alpha, config.denominator)?;
    let final_ =
        resolve_residuals(&outcome.segmentation, doc, config.min_group, config.alpha, config.denominator)?;
    Ok(FullSegmentation { initial, coupled: outcome.segmentation, final_, trace: outcome.trace, passes: outcome.passes })
}
