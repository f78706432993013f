//! Score records and per-class difficulty histograms.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of difficulty intervals over [0, 1].
pub const DEFAULT_BIN_COUNT: usize = 20;

/// Categorical class label. Ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassLabel(pub String);

impl ClassLabel {
    pub fn new(label: impl Into<String>) -> Self {
        ClassLabel(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ClassLabel {
    fn from(s: &str) -> Self {
        ClassLabel(s.to_owned())
    }
}

/// One scored image: identity, class, and difficulty `1 - P(y_true | x)`.
///
/// Keys not understood by this crate are kept in `extra` so manifests
/// survive a load/write round trip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub id: String,
    #[serde(rename = "class")]
    pub class_label: ClassLabel,
    pub difficulty: f64,
    #[serde(rename = "path", default, skip_serializing_if = "Option::is_none")]
    pub source_path: Option<String>,
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl ScoreRecord {
    pub fn new(id: impl Into<String>, class_label: impl Into<ClassLabel>, difficulty: f64) -> Self {
        ScoreRecord {
            id: id.into(),
            class_label: class_label.into(),
            difficulty,
            source_path: None,
            extra: serde_json::Map::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if (0.0..=1.0).contains(&self.difficulty) {
            Ok(())
        } else {
            Err(Error::DifficultyOutOfRange {
                id: self.id.clone(),
                value: self.difficulty,
            })
        }
    }
}

impl From<String> for ClassLabel {
    fn from(s: String) -> Self {
        ClassLabel(s)
    }
}

/// Equal-width binning of [0, 1].
///
/// Bins are half-open `[k/N, (k+1)/N)` except the last, which is closed so
/// that a difficulty of exactly 1 is representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct BinningSpec {
    bin_count: usize,
}

impl BinningSpec {
    pub const MIN_BINS: usize = 4;

    pub fn new(bin_count: usize) -> Result<Self> {
        if bin_count < Self::MIN_BINS {
            return Err(Error::InvalidBinning(bin_count));
        }
        Ok(BinningSpec { bin_count })
    }

    pub fn bin_count(&self) -> usize {
        self.bin_count
    }

    pub fn bin_of(&self, difficulty: f64) -> usize {
        bin_index(difficulty, self.bin_count)
    }

    /// Lower and upper edge of bin `k`.
    pub fn edges(&self, k: usize) -> (f64, f64) {
        let n = self.bin_count as f64;
        (k as f64 / n, (k + 1) as f64 / n)
    }

    pub fn midpoint(&self, k: usize) -> f64 {
        (k as f64 + 0.5) / self.bin_count as f64
    }
}

impl Default for BinningSpec {
    fn default() -> Self {
        BinningSpec {
            bin_count: DEFAULT_BIN_COUNT,
        }
    }
}

impl TryFrom<usize> for BinningSpec {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        BinningSpec::new(n)
    }
}

impl From<BinningSpec> for usize {
    fn from(spec: BinningSpec) -> usize {
        spec.bin_count
    }
}

/// Bin index of `difficulty` among `bins` equal-width intervals:
/// `min(floor(d * N), N - 1)`.
pub fn bin_index(difficulty: f64, bins: usize) -> usize {
    debug_assert!(bins > 0);
    let k = (difficulty * bins as f64).floor();
    if k <= 0.0 {
        0
    } else {
        (k as usize).min(bins - 1)
    }
}

pub(crate) fn count_into_bins(difficulties: impl IntoIterator<Item = f64>, bins: usize) -> Vec<f64> {
    let mut counts = vec![0.0; bins];
    for d in difficulties {
        counts[bin_index(d, bins)] += 1.0;
    }
    counts
}

/// Binned difficulty mass of one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifficultyHistogram {
    spec: BinningSpec,
    counts: Vec<f64>,
    total: f64,
    class_label: ClassLabel,
}

impl DifficultyHistogram {
    /// Wraps explicit bin masses. Counts must be finite and non-negative.
    pub fn from_counts(class_label: impl Into<ClassLabel>, counts: Vec<f64>) -> Result<Self> {
        let spec = BinningSpec::new(counts.len())?;
        if let Some(bad) = counts.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::InvalidCounts(format!("bin mass {bad} is not a finite non-negative number")));
        }
        let total = counts.iter().sum();
        Ok(DifficultyHistogram {
            spec,
            counts,
            total,
            class_label: class_label.into(),
        })
    }

    pub fn spec(&self) -> BinningSpec {
        self.spec
    }

    pub fn bin_count(&self) -> usize {
        self.spec.bin_count
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn class_label(&self) -> &ClassLabel {
        &self.class_label
    }

    /// Mean difficulty estimated from bin midpoints; `None` when empty.
    pub fn midpoint_mean(&self) -> Option<f64> {
        if self.total <= 0.0 {
            return None;
        }
        let weighted: f64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(k, c)| c * self.spec.midpoint(k))
            .sum();
        Some(weighted / self.total)
    }
}

/// Counts the records of `class_label` into the bins of `spec`.
///
/// Every record is range-checked, including those of other classes, so a
/// bad manifest is rejected no matter which class is being inspected.
pub fn build_histogram(
    records: &[ScoreRecord],
    spec: BinningSpec,
    class_label: &ClassLabel,
) -> Result<DifficultyHistogram> {
    for r in records {
        r.validate()?;
    }
    let counts = count_into_bins(
        records
            .iter()
            .filter(|r| &r.class_label == class_label)
            .map(|r| r.difficulty),
        spec.bin_count,
    );
    let total = counts.iter().sum();
    Ok(DifficultyHistogram {
        spec,
        counts,
        total,
        class_label: class_label.clone(),
    })
}

/// One histogram per class present in `records`, keyed and ordered by label.
pub fn histograms_by_class(
    records: &[ScoreRecord],
    spec: BinningSpec,
) -> Result<BTreeMap<ClassLabel, DifficultyHistogram>> {
    let mut grouped: BTreeMap<ClassLabel, Vec<f64>> = BTreeMap::new();
    for r in records {
        r.validate()?;
        grouped.entry(r.class_label.clone()).or_default().push(r.difficulty);
    }
    Ok(grouped
        .into_iter()
        .map(|(label, ds)| {
            let counts = count_into_bins(ds, spec.bin_count);
            let total = counts.iter().sum();
            let hist = DifficultyHistogram {
                spec,
                counts,
                total,
                class_label: label.clone(),
            };
            (label, hist)
        })
        .collect())
}

/// Normalizes a histogram to a probability vector; see [`normalize_counts`].
pub fn normalize(hist: &DifficultyHistogram, floor: Option<f64>) -> Result<Vec<f64>> {
    normalize_counts(&hist.counts, floor)
}

/// Normalizes non-negative masses to sum to one.
///
/// With `floor`, every entry is raised by the floor before dividing, which
/// also makes an all-zero vector come out uniform.
pub fn normalize_counts(counts: &[f64], floor: Option<f64>) -> Result<Vec<f64>> {
    if counts.is_empty() {
        return Err(Error::DegenerateDistribution("empty vector"));
    }
    if counts.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return Err(Error::InvalidCounts("masses must be finite and non-negative".into()));
    }
    let floor = match floor {
        Some(f) if !(f.is_finite() && f > 0.0) => {
            return Err(Error::InvalidParameter {
                name: "floor",
                reason: format!("{f} is not a positive finite number"),
            })
        }
        Some(f) => f,
        None => 0.0,
    };
    let raised: Vec<f64> = counts.iter().map(|c| c + floor).collect();
    let sum: f64 = raised.iter().sum();
    if sum <= 0.0 {
        return Err(Error::DegenerateDistribution("all-zero histogram without a floor"));
    }
    Ok(raised.into_iter().map(|c| c / sum).collect())
}

/// Half the L1 distance between two equal-length probability vectors.
pub fn total_variation(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}
