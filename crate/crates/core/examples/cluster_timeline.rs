//! Clusters of a synthetic montage drawn as a time-space layout: one row
//! per cluster, one column per shot.

use cineparse::clustering::cluster_document;
use cineparse::synth::{presets, synthesize};

fn main() -> cineparse::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let (doc, truth) = synthesize(&presets::easy(seed))?;
    let tsg = cluster_document(&doc, truth.threshold)?;
    println!("{} shots, {} sequences, {} clusters\n", doc.len(), tsg.sequences.len(), tsg.clusters.len());
    print!("{}", tsg.render_timeline(&doc));
    Ok(())
}
