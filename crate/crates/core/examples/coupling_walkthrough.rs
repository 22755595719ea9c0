//! Stage-by-stage segmentation of the nested-dialogue fixture: cluster
//! scenes first, then one-shot scenes absorbed by rhythm.

use cineparse::eval::comparison_table;
use cineparse::synth::{presets, synthesize};
use cineparse::{segment_full, Config};

fn main() -> cineparse::Result<()> {
    let (doc, truth) = synthesize(&presets::nested_dialogue())?;
    let durations: Vec<u64> = doc.shots().iter().map(|s| s.td).collect();
    println!("durations: {durations:?}\n");

    let full = segment_full(&doc, &Config::default())?;
    for event in &full.trace {
        println!(
            "pass {}: shot {} joins scene {} at its {} (z = {:.3})",
            event.pass, event.shot, event.absorbed_into, event.side, event.zscore
        );
    }
    println!("{} passes\n", full.passes);
    print!("{}", comparison_table(&full.initial, &full.final_, &truth.scenes));
    Ok(())
}
