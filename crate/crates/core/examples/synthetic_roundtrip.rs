//! Generate a fixture, write it to disk, read it back, segment it and score
//! the result against the planted scenes.

use cineparse::eval::{comparison_table, evaluate};
use cineparse::synth::{presets, synthesize, GroundTruth};
use cineparse::{segment_full, Config, VideoDocument};

fn main() -> cineparse::Result<()> {
    let dir = std::env::temp_dir().join("cineparse-roundtrip");
    std::fs::create_dir_all(&dir).expect("temp dir is writable");
    let (doc, truth) = synthesize(&presets::sparse_singletons())?;
    std::fs::write(dir.join("manifest.json"), doc.to_json_string()).expect("write manifest");
    std::fs::write(dir.join("truth.json"), truth.to_json_string()).expect("write truth");

    let doc = VideoDocument::from_json_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap())?;
    let truth = GroundTruth::from_json_str(&std::fs::read_to_string(dir.join("truth.json")).unwrap())?;
    let full = segment_full(&doc, &Config::default())?;
    print!("{}", comparison_table(&full.initial, &full.final_, &truth.scenes));

    for tolerance in [0, 1] {
        let report = evaluate(&full.final_, &truth, tolerance)?;
        println!(
            "\ntolerance {tolerance}: precision {:.3} recall {:.3} F1 {:.3}, one-shot scenes left: {}",
            report.metrics.precision, report.metrics.recall, report.metrics.f1, report.surviving_one_shot_scenes
        );
    }
    println!("\nfiles in {}", dir.display());
    Ok(())
}
