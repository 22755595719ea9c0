//! Color histograms over uniformly quantized RGB, and the intersection
//! based similarity between them.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BINS_PER_CHANNEL: u32 = 4;

/// 8-bit RGB raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl Image {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        let expected = width * height;
        if expected == 0 || pixels.len() != expected {
            return Err(Error::InvalidImage { expected: expected * 3 });
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, color: [u8; 3]) -> Result<Self> {
        Self::new(width, height, vec![color; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    /// Parses a binary PPM (`P6`, maxval 255).
    pub fn from_ppm_bytes(bytes: &[u8]) -> Result<Self, String> {
        let mut cursor = 0usize;
        let mut fields = Vec::with_capacity(4);
        while fields.len() < 4 {
            // skip whitespace and comments
            while cursor < bytes.len() {
                match bytes[cursor] {
                    b'#' => {
                        while cursor < bytes.len() && bytes[cursor] != b'\n' {
                            cursor += 1;
                        }
                    }
                    c if c.is_ascii_whitespace() => cursor += 1,
                    _ => break,
                }
            }
            let start = cursor;
            while cursor < bytes.len() && !bytes[cursor].is_ascii_whitespace() && bytes[cursor] != b'#' {
                cursor += 1;
            }
            if start == cursor {
                return Err("truncated header".into());
            }
            fields.push(std::str::from_utf8(&bytes[start..cursor]).map_err(|_| "non-ASCII header")?);
        }
        if fields[0] != "P6" {
            return Err(format!("unsupported magic {:?}, expected P6", fields[0]));
        }
        let parse = |s: &str, what: &str| s.parse::<usize>().map_err(|_| format!("bad {what} {s:?}"));
        let width = parse(fields[1], "width")?;
        let height = parse(fields[2], "height")?;
        let maxval = parse(fields[3], "maxval")?;
        if maxval != 255 {
            return Err(format!("maxval must be 255, got {maxval}"));
        }
        // exactly one whitespace byte separates the header from the raster
        if cursor >= bytes.len() || !bytes[cursor].is_ascii_whitespace() {
            return Err("missing raster".into());
        }
        let raster = &bytes[cursor + 1..];
        let n = width.checked_mul(height).ok_or("image too large")?;
        if n == 0 {
            return Err("empty image".into());
        }
        if raster.len() < n * 3 {
            return Err(format!("raster has {} bytes, expected {}", raster.len(), n * 3));
        }
        let pixels = raster[..n * 3].chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        Ok(Self { width, height, pixels })
    }

    pub fn read_ppm(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_ppm_bytes(&bytes).map_err(|reason| Error::Ppm { path: path.to_owned(), reason })
    }

    pub fn to_ppm_bytes(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.pixels.iter().flatten());
        out
    }
}

/// Pixel counts per quantized color. Bin index is `(r * b + g) * b + b'`
/// with each channel quantized as `v * b / 256`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Histogram {
    bins_per_channel: u32,
    counts: Vec<u64>,
}

impl Histogram {
    pub fn from_counts(bins_per_channel: u32, counts: Vec<u64>) -> Result<Self> {
        let h = Self { bins_per_channel, counts };
        h.check_shape()?;
        Ok(h)
    }

    pub(crate) fn check_shape(&self) -> Result<()> {
        check_bins(self.bins_per_channel)?;
        let expected = (self.bins_per_channel as usize).pow(3);
        if self.counts.len() != expected {
            return Err(Error::HistogramLength { expected, found: self.counts.len() });
        }
        Ok(())
    }

    pub fn bins_per_channel(&self) -> u32 {
        self.bins_per_channel
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn bin_of(bins_per_channel: u32, rgb: [u8; 3]) -> usize {
        let b = bins_per_channel as usize;
        let q = |v: u8| v as usize * b / 256;
        (q(rgb[0]) * b + q(rgb[1])) * b + q(rgb[2])
    }

    fn same_layout(&self, other: &Histogram) -> Result<()> {
        if self.bins_per_channel != other.bins_per_channel {
            return Err(Error::LayoutMismatch {
                left: self.bins_per_channel,
                right: other.bins_per_channel,
            });
        }
        Ok(())
    }
}

fn check_bins(bins_per_channel: u32) -> Result<()> {
    if !(2..=256).contains(&bins_per_channel) {
        return Err(Error::InvalidBinCount(bins_per_channel));
    }
    Ok(())
}

pub fn compute_histogram(img: &Image, bins_per_channel: u32) -> Result<Histogram> {
    check_bins(bins_per_channel)?;
    let mut counts = vec![0u64; (bins_per_channel as usize).pow(3)];
    for &px in img.pixels() {
        counts[Histogram::bin_of(bins_per_channel, px)] += 1;
    }
    Ok(Histogram { bins_per_channel, counts })
}

/// Number of pixels whose quantized colors the two histograms share.
pub fn intersection(hi: &Histogram, hj: &Histogram) -> Result<u64> {
    hi.same_layout(hj)?;
    Ok(hi.counts.iter().zip(&hj.counts).map(|(a, b)| *a.min(b)).sum())
}

/// Intersection normalized by the *second* histogram's total. Not symmetric
/// when the totals differ.
pub fn similarity(hi: &Histogram, hj: &Histogram) -> Result<f64> {
    let shared = intersection(hi, hj)?;
    let reference = hj.total();
    if reference == 0 {
        return Err(Error::EmptyReferenceHistogram);
    }
    Ok(shared as f64 / reference as f64)
}

pub fn dissimilarity(hi: &Histogram, hj: &Histogram) -> Result<f64> {
    Ok(1.0 - similarity(hi, hj)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(counts: &[u64]) -> Histogram {
        // layout checks are bypassed for the short hand-written vectors
        Histogram { bins_per_channel: 2, counts: counts.to_vec() }
    }

    #[test]
    fn black_image_fills_one_bin() {
        let img = Image::filled(2, 2, [0, 0, 0]).unwrap();
        let hist = compute_histogram(&img, 2).unwrap();
        assert_eq!(hist.counts()[0], 4);
        assert_eq!(hist.total(), 4);
        assert!(hist.counts()[1..].iter().all(|&c| c == 0));
    }

    #[test]
    fn black_and_white_split_evenly() {
        let img = Image::new(2, 2, vec![[0; 3], [0; 3], [255; 3], [255; 3]]).unwrap();
        let hist = compute_histogram(&img, 2).unwrap();
        assert_eq!(hist.counts()[0], 2);
        assert_eq!(hist.counts()[7], 2);
    }

    #[test]
    fn rejects_bad_bin_counts() {
        let img = Image::filled(1, 1, [1, 2, 3]).unwrap();
        assert!(matches!(compute_histogram(&img, 1), Err(Error::InvalidBinCount(1))));
        assert!(matches!(compute_histogram(&img, 257), Err(Error::InvalidBinCount(257))));
        assert!(compute_histogram(&img, 256).is_ok());
    }

    #[test]
    fn intersection_examples() {
        assert_eq!(intersection(&h(&[3, 1, 0]), &h(&[1, 1, 2])).unwrap(), 2);
        assert_eq!(intersection(&h(&[4, 0]), &h(&[0, 4])).unwrap(), 0);
        let x = h(&[5, 2, 9]);
        assert_eq!(intersection(&x, &x).unwrap(), x.total());
    }

    #[test]
    fn similarity_uses_second_total() {
        assert_eq!(similarity(&h(&[3, 1, 0]), &h(&[1, 1, 2])).unwrap(), 0.5);
        assert_eq!(similarity(&h(&[4, 0]), &h(&[2, 0])).unwrap(), 1.0);
        assert_eq!(similarity(&h(&[2, 0]), &h(&[4, 0])).unwrap(), 0.5);
        assert!(matches!(similarity(&h(&[1, 0]), &h(&[0, 0])), Err(Error::EmptyReferenceHistogram)));
    }

    #[test]
    fn dissimilarity_examples() {
        let x = h(&[5, 2, 9]);
        assert_eq!(dissimilarity(&x, &x).unwrap(), 0.0);
        assert_eq!(dissimilarity(&h(&[3, 1, 0]), &h(&[1, 1, 2])).unwrap(), 0.5);
        assert_eq!(dissimilarity(&h(&[4, 0]), &h(&[0, 4])).unwrap(), 1.0);
    }

    #[test]
    fn layout_mismatch() {
        let a = Histogram::from_counts(2, vec![1; 8]).unwrap();
        let b = Histogram::from_counts(4, vec![1; 64]).unwrap();
        assert!(matches!(intersection(&a, &b), Err(Error::LayoutMismatch { left: 2, right: 4 })));
        assert!(matches!(
            Histogram::from_counts(4, vec![0; 10]),
            Err(Error::HistogramLength { expected: 64, found: 10 })
        ));
    }

    #[test]
    fn ppm_round_trip_with_comment() {
        let img = Image::new(2, 1, vec![[1, 2, 3], [250, 251, 252]]).unwrap();
        let bytes = img.to_ppm_bytes();
        assert_eq!(Image::from_ppm_bytes(&bytes).unwrap(), img);

        let mut commented = b"P6\n# key frame\n2 1\n255\n".to_vec();
        commented.extend([1, 2, 3, 250, 251, 252]);
        assert_eq!(Image::from_ppm_bytes(&commented).unwrap(), img);

        assert!(Image::from_ppm_bytes(b"P3\n1 1\n255\n").is_err());
        assert!(Image::from_ppm_bytes(b"P6\n1 1\n65535\n\0\0\0\0\0\0").is_err());
        assert!(Image::from_ppm_bytes(b"P6\n2 2\n255\n\0\0\0").is_err());
    }
}
