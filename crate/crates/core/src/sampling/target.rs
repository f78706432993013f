use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::{normalize, ClassLabel, DifficultyHistogram};
use crate::transform::{apply_transform, TransformParams};

/// Sampling strategy. Declaration order is the row order of result tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    /// Symmetric triangular peak at medium difficulty.
    Hill,
    /// Uniform over all bins.
    Ground,
    /// Linearly decreasing with difficulty.
    Slope,
    /// Geometric concentration on the easiest bins.
    Cliff,
    /// The original dataset's (optionally transformed) histogram.
    Scale,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] = [
        StrategyKind::Hill,
        StrategyKind::Ground,
        StrategyKind::Slope,
        StrategyKind::Cliff,
        StrategyKind::Scale,
    ];

    pub const PREDEFINED: [StrategyKind; 4] = [
        StrategyKind::Hill,
        StrategyKind::Ground,
        StrategyKind::Slope,
        StrategyKind::Cliff,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::Hill => "hill",
            StrategyKind::Ground => "ground",
            StrategyKind::Slope => "slope",
            StrategyKind::Cliff => "cliff",
            StrategyKind::Scale => "scale",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::UnknownShape(s.to_owned()))
    }
}

/// Desired share of the distilled set per difficulty bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetDistribution {
    pub kind: StrategyKind,
    pub weights: Vec<f64>,
    pub class_label: ClassLabel,
    /// The transform hit a constant vector and the weights are uniform.
    #[serde(default)]
    pub uniform_fallback: bool,
}

impl TargetDistribution {
    /// Normalizes explicit non-negative weights, e.g. a shape override.
    pub fn from_weights(kind: StrategyKind, weights: &[f64], class_label: ClassLabel) -> Result<Self> {
        let weights = crate::histogram::normalize_counts(weights, None)?;
        Ok(TargetDistribution {
            kind,
            weights,
            class_label,
            uniform_fallback: false,
        })
    }
}

/// Target proportional to the original histogram, after the clipped log
/// transform when `use_transform` is set.
pub fn scale_target(
    original_hist: &DifficultyHistogram,
    params: &TransformParams,
    use_transform: bool,
) -> Result<TargetDistribution> {
    if !(original_hist.total() > 0.0) {
        return Err(Error::DegenerateDistribution("original histogram is empty"));
    }
    let (weights, uniform_fallback) = if use_transform {
        let t = apply_transform(original_hist, params)?;
        (t.probabilities, t.uniform_fallback)
    } else {
        (normalize(original_hist, None)?, false)
    };
    Ok(TargetDistribution {
        kind: StrategyKind::Scale,
        weights,
        class_label: original_hist.class_label().clone(),
        uniform_fallback,
    })
}

/// Decay ratio of the cliff shape.
pub const CLIFF_RATIO: f64 = 0.5;

/// One of the fixed shapes over `bin_count` bins (bin 0 is easiest):
///
/// - ground: uniform
/// - slope: `∝ N - n`
/// - hill: `∝ N/2 - |n - (N-1)/2|`
/// - cliff: `∝ 0.5^n`
pub fn predefined_target(kind: StrategyKind, bin_count: usize, class_label: ClassLabel) -> Result<TargetDistribution> {
    if bin_count < crate::histogram::BinningSpec::MIN_BINS {
        return Err(Error::InvalidBinning(bin_count));
    }
    let n = bin_count as f64;
    let raw: Vec<f64> = (0..bin_count)
        .map(|i| {
            let i = i as f64;
            match kind {
                StrategyKind::Ground => 1.0,
                StrategyKind::Slope => n - i,
                StrategyKind::Hill => n / 2.0 - (i - (n - 1.0) / 2.0).abs(),
                StrategyKind::Cliff => CLIFF_RATIO.powf(i),
                StrategyKind::Scale => f64::NAN,
            }
        })
        .collect();
    if kind == StrategyKind::Scale {
        return Err(Error::UnknownShape(kind.to_string()));
    }
    TargetDistribution::from_weights(kind, &raw, class_label)
}
