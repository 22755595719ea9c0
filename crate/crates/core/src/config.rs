use serde::{Deserialize, Serialize};

use crate::clustering::DEFAULT_THRESHOLD;
use crate::error::{Error, Result};
use crate::histogram::DEFAULT_BINS_PER_CHANNEL;
use crate::rhythm::{Denominator, DEFAULT_ALPHA, DEFAULT_MIN_GROUP};

/// Pipeline parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    /// Clustering dissimilarity threshold `T`.
    pub threshold: f64,
    /// Safe-interval width coefficient.
    pub alpha: f64,
    /// Seed size of rhythm-only groups.
    pub min_group: usize,
    pub bins_per_channel: u32,
    pub denominator: Denominator,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            threshold: DEFAULT_THRESHOLD,
            alpha: DEFAULT_ALPHA,
            min_group: DEFAULT_MIN_GROUP,
            bins_per_channel: DEFAULT_BINS_PER_CHANNEL,
            denominator: Denominator::GroupSize,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(Error::InvalidParameter(format!("threshold must lie in [0, 1], got {}", self.threshold)));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.min_group < 3 {
            return Err(Error::InvalidParameter(format!("min group must be at least 3, got {}", self.min_group)));
        }
        if !(2..=256).contains(&self.bins_per_channel) {
            return Err(Error::InvalidBinCount(self.bins_per_channel));
        }
        Ok(())
    }
}
