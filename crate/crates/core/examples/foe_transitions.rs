//! Shot transitions from focus-of-expansion point patterns: a steady
//! pattern, an abrupt jump, then a slow drift into a new position.

use cineparse::foe::{consecutive_scores, detect_shot_transitions, transitions_to_manifest, FramePattern, MatchConfig};

fn main() -> cineparse::Result<()> {
    let offsets = [0.0, 0.0, 0.0, 0.0, 25.0, 25.0, 25.0, 28.0, 31.0, 34.0, 37.0, 37.0, 37.0];
    let patterns: Vec<FramePattern> = offsets
        .iter()
        .enumerate()
        .map(|(f, &dx)| FramePattern { frame: f as u64, points: vec![[10.0 + dx, 10.0], [20.0 + dx, 12.0], [15.0 + dx, 25.0]] })
        .collect();
    let cfg = MatchConfig::new(2.5, 0.5);
    let scores = consecutive_scores(&patterns, &cfg)?;
    for (f, s) in scores.iter().enumerate() {
        println!("frames {f:>2}->{:<2} resemblance {s:.3}", f + 1);
    }
    let transitions = detect_shot_transitions(&patterns, &cfg)?;
    for t in &transitions {
        println!("{:?} between frames {} and {}", t.kind, t.from_frame, t.to_frame);
    }
    let manifest = transitions_to_manifest(&transitions, 0, 12, 25.0);
    println!("\n{}", serde_json::to_string_pretty(&manifest).expect("manifest serializes"));
    Ok(())
}
