use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cineparse::histogram::Image;
use cineparse::{Segmentation, VideoDocument};

fn cineparse(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cineparse")).current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = cineparse(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

#[test]
fn trivial_manifest_segments_into_one_scene() {
    let dir = tempfile::tempdir().unwrap();
    let h = r#"{"bins_per_channel": 2, "counts": [10, 0, 0, 0, 0, 0, 0, 0]}"#;
    let manifest = format!(
        r#"{{"shots": [{{"id": 0, "td": 40, "histogram": {h}}}, {{"id": 1, "td": 35, "histogram": {h}}}]}}"#
    );
    fs::write(path(dir.path(), "m.json"), manifest).unwrap();
    ok(dir.path(), &["segment", "--manifest", "m.json", "--out", "seg.json"]);
    let seg = Segmentation::from_json_str(&read(dir.path(), "seg.json")).unwrap();
    assert_eq!(seg.scenes.len(), 1);
}

#[test]
fn tcg_dot_has_seven_labelled_edges() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "--preset", "nested-dialogue", "--out", "m.json"]);
    ok(dir.path(), &["tcg", "--manifest", "m.json", "--dot", "g.dot", "--out", "tcg.json"]);
    let dot = read(dir.path(), "g.dot");
    assert_eq!(dot.lines().filter(|l| l.contains(" -> ") && l.contains("label=")).count(), 7);
    assert_eq!(dot, include_str!("golden/nested_dialogue.dot"));
}

#[test]
fn synth_segment_eval_on_easy_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["synth", "--preset", "easy", "--seed", "4", "--out", "m.json", "--truth", "gt.json"]);
    ok(d, &["segment", "--manifest", "m.json", "--out", "seg.json", "--trace", "trace.json", "--report", "r.txt"]);
    ok(d, &["eval", "--pred", "seg.json", "--truth", "gt.json", "--out", "report.json", "--table", "t.txt"]);
    let report: serde_json::Value = serde_json::from_str(&read(d, "report.json")).unwrap();
    assert_eq!(report["f1"], 1.0);
    assert!(read(d, "t.txt").starts_with("scene  spatial-temporal  coupled"));
    assert!(read(d, "r.txt").contains("final"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["synth", "--preset", "sparse-singletons", "--out", "m.json"]);
    ok(d, &["segment", "--manifest", "m.json", "--out", "a.json", "--trace", "ta.json"]);
    ok(d, &["segment", "--manifest", "m.json", "--out", "b.json", "--trace", "tb.json"]);
    assert_eq!(read(d, "a.json"), read(d, "b.json"));
    assert_eq!(read(d, "ta.json"), read(d, "tb.json"));
    let stdout = ok(d, &["segment", "--manifest", "m.json"]).stdout;
    assert_eq!(String::from_utf8(stdout).unwrap(), read(d, "a.json"));
}

#[test]
fn partial_outputs_feed_the_next_stage() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["synth", "--preset", "nested-dialogue", "--out", "m.json"]);
    ok(d, &["segment", "--manifest", "m.json", "--stop-after", "clusters", "--out", "clusters.json"]);
    ok(d, &["tcg", "--manifest", "m.json", "--clusters", "clusters.json", "--out", "tcg1.json"]);
    ok(d, &["segment", "--manifest", "m.json", "--stop-after", "tcg", "--out", "tcg2.json"]);
    assert_eq!(read(d, "tcg1.json"), read(d, "tcg2.json"));
    ok(d, &["segment", "--manifest", "m.json", "--stop-after", "initial", "--out", "initial.json"]);
    ok(d, &["couple", "--manifest", "m.json", "--initial", "initial.json", "--out", "coupled.json"]);
    ok(d, &["segment", "--manifest", "m.json", "--out", "full.json"]);
    assert_eq!(read(d, "coupled.json"), read(d, "full.json"));
    ok(d, &["rhythm", "--manifest", "m.json", "--scenes", "initial.json", "--out", "rhythm.json"]);
    let rows: serde_json::Value = serde_json::from_str(&read(d, "rhythm.json")).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 1);
    assert_eq!(rows[0]["first_shot"], 3);
}

#[test]
fn key_frames_are_read_relative_to_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::create_dir(d.join("frames")).unwrap();
    let colors = [[200, 20, 20], [20, 200, 20], [200, 20, 20], [20, 20, 200]];
    let mut shots = Vec::new();
    for (i, c) in colors.iter().enumerate() {
        let img = Image::filled(16, 12, *c).unwrap();
        fs::write(d.join(format!("frames/{i}.ppm")), img.to_ppm_bytes()).unwrap();
        shots.push(format!(r#"{{"id": {i}, "td": {}, "keyframe": "frames/{i}.ppm"}}"#, 50 + i));
    }
    fs::write(d.join("m.json"), format!(r#"{{"shots": [{}]}}"#, shots.join(", "))).unwrap();
    let elsewhere = tempfile::tempdir().unwrap();
    let manifest = d.join("m.json");
    let out = ok(elsewhere.path(), &["cluster", "--manifest", manifest.to_str().unwrap()]);
    let tsg: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(tsg["clusters"][0]["shots"], serde_json::json!([0, 2]));
}

#[test]
fn foe_command_writes_transitions_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let frames: Vec<String> = (0..6)
        .map(|f| {
            let x = if f < 3 { 0.0 } else { 40.0 };
            format!(r#"{{"frame": {f}, "points": [[{x}, 0.0], [{x}, 10.0]]}}"#)
        })
        .collect();
    fs::write(d.join("p.json"), format!("[{}]", frames.join(","))).unwrap();
    ok(d, &["foe", "--patterns", "p.json", "--radius", "3", "--out", "t.json", "--manifest-out", "m.json"]);
    let t: serde_json::Value = serde_json::from_str(&read(d, "t.json")).unwrap();
    assert_eq!(t, serde_json::json!([{"kind": "cut", "from_frame": 2, "to_frame": 3}]));
    let doc = VideoDocument::from_json_str(&read(d, "m.json")).unwrap();
    let durations: Vec<u64> = doc.shots().iter().map(|s| s.td).collect();
    assert_eq!(durations, vec![3, 3]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(cineparse(d, &["--help"]).status.code(), Some(0));
    assert_eq!(cineparse(d, &["segment"]).status.code(), Some(1));
    assert_eq!(cineparse(d, &["bogus"]).status.code(), Some(1));
    fs::write(d.join("bad.json"), r#"{"shots": [{"id": 0, "td": 0}]}"#).unwrap();
    let out = cineparse(d, &["segment", "--manifest", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least one frame"));
    assert_eq!(cineparse(d, &["segment", "--manifest", "missing.json"]).status.code(), Some(2));
    ok(d, &["synth", "--preset", "easy", "--out", "m.json"]);
    assert_eq!(cineparse(d, &["segment", "--manifest", "m.json", "--alpha=-1"]).status.code(), Some(2));
    assert_eq!(cineparse(d, &["segment", "--manifest", "m.json", "--denominator", "odd"]).status.code(), Some(1));
}

#[test]
fn unbiased_denominator_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["synth", "--preset", "sparse-singletons", "--out", "m.json"]);
    ok(d, &["segment", "--manifest", "m.json", "--denominator", "unbiased", "--out", "seg.json"]);
    let seg = Segmentation::from_json_str(&read(d, "seg.json")).unwrap();
    seg.check_partition(66).unwrap();
}
