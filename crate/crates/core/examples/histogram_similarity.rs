//! Key-frame histograms from flat-colour PPM images and their pairwise
//! dissimilarities.

use cineparse::histogram::{compute_histogram, dissimilarity, Image};

fn main() -> cineparse::Result<()> {
    let dir = std::env::temp_dir().join("cineparse-histogram-example");
    std::fs::create_dir_all(&dir).map_err(|e| cineparse::Error::Io { context: dir.display().to_string(), source: e })?;

    let frames = [("red", [220, 30, 30]), ("dark red", [200, 20, 40]), ("sky", [90, 160, 230])];
    let mut histograms = Vec::new();
    for (name, color) in frames {
        // half the frame in the dominant colour, half grey
        let mut pixels = vec![color; 32 * 12];
        pixels.extend(vec![[128, 128, 128]; 32 * 12]);
        let image = Image::new(32, 24, pixels)?;
        let path = dir.join(format!("{}.ppm", name.replace(' ', "_")));
        std::fs::write(&path, image.to_ppm_bytes()).expect("temp dir is writable");
        let back = Image::read_ppm(&path)?;
        histograms.push((name, compute_histogram(&back, 4)?));
    }

    for (name, h) in &histograms {
        let occupied: Vec<(usize, u64)> = h.counts().iter().copied().enumerate().filter(|&(_, c)| c > 0).collect();
        println!("{name:>9}: occupied bins {occupied:?}");
    }
    println!();
    for (name, a) in &histograms {
        for (_, b) in &histograms {
            print!("{:>8.3}", dissimilarity(a, b)?);
        }
        println!("   {name}");
    }
    println!("\nShots closer than the default threshold 0.1 land in one cluster.");
    Ok(())
}
