use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::{histograms_by_class, BinningSpec, ClassLabel, DifficultyHistogram, ScoreRecord};
use crate::transform::{self, default_epsilon, fit_thresholds, TransformParams};

use super::allocate::{allocate, SamplingPlan};
use super::select::select;
use super::target::{predefined_target, scale_target, StrategyKind, TargetDistribution};

/// Which histogram the clip thresholds are fitted on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitSource {
    #[default]
    Pool,
    Original,
}

impl std::str::FromStr for FitSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pool" => Ok(FitSource::Pool),
            "original" => Ok(FitSource::Original),
            other => Err(Error::InvalidParameter {
                name: "fit_on",
                reason: format!("`{other}` is not one of pool, original"),
            }),
        }
    }
}

pub const DEFAULT_POOL_FACTOR: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingConfig {
    pub binning: BinningSpec,
    pub ipc: usize,
    pub strategy: StrategyKind,
    pub lambda: f64,
    /// ε = `epsilon_scale` × histogram total.
    pub epsilon_scale: f64,
    pub seed: u64,
    pub pool_factor: usize,
    pub fit_on: FitSource,
    pub transform_enabled: bool,
    /// Explicit weight vectors replacing the built-in predefined shapes.
    #[serde(default)]
    pub shape_overrides: BTreeMap<StrategyKind, Vec<f64>>,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            binning: BinningSpec::default(),
            ipc: 10,
            strategy: StrategyKind::Scale,
            lambda: transform::DEFAULT_LAMBDA,
            epsilon_scale: transform::DEFAULT_EPSILON_SCALE,
            seed: 0,
            pool_factor: DEFAULT_POOL_FACTOR,
            fit_on: FitSource::Pool,
            transform_enabled: true,
            shape_overrides: BTreeMap::new(),
        }
    }
}

/// Fit outcome kept in the manifest; the full objective grid is dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub fitted_on: FitSource,
    pub objective_value: f64,
    pub kl_to_original: f64,
    pub kl_to_uniform: f64,
    pub uniform_fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSelection {
    pub class_label: ClassLabel,
    /// Thresholds as fitted. ε is rescaled to each histogram it is applied to.
    pub params: TransformParams,
    pub fit: Option<FitSummary>,
    pub target: TargetDistribution,
    pub plan: SamplingPlan,
    pub realized_counts: Vec<usize>,
}

/// The distilled subset plus everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionManifest {
    pub seed: u64,
    pub pool_factor: usize,
    pub ipc: usize,
    pub strategy: StrategyKind,
    pub bin_count: usize,
    /// Per class, ordered by label.
    pub classes: Vec<ClassSelection>,
    /// Grouped by class in label order.
    pub records: Vec<ScoreRecord>,
}

impl SelectionManifest {
    pub fn class(&self, label: &ClassLabel) -> Option<&ClassSelection> {
        self.classes.iter().find(|c| &c.class_label == label)
    }
}

fn validate_config(config: &SamplingConfig) -> Result<()> {
    BinningSpec::new(config.binning.bin_count())?;
    if config.ipc == 0 {
        return Err(Error::InvalidParameter {
            name: "ipc",
            reason: "must be at least 1".into(),
        });
    }
    if config.pool_factor == 0 {
        return Err(Error::InvalidParameter {
            name: "pool_factor",
            reason: "must be at least 1".into(),
        });
    }
    if !(0.0..=1.0).contains(&config.lambda) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            reason: format!("{} is outside [0, 1]", config.lambda),
        });
    }
    if !(config.epsilon_scale.is_finite() && config.epsilon_scale > 0.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon_scale",
            reason: format!("{} is not a positive finite number", config.epsilon_scale),
        });
    }
    for (kind, w) in &config.shape_overrides {
        if *kind == StrategyKind::Scale {
            return Err(Error::InvalidParameter {
                name: "shape_overrides",
                reason: "scale is derived from the original histogram and cannot be overridden".into(),
            });
        }
        if w.len() != config.binning.bin_count() {
            return Err(Error::InvalidParameter {
                name: "shape_overrides",
                reason: format!("{kind}: {} weights for {} bins", w.len(), config.binning.bin_count()),
            });
        }
        if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || !(w.iter().sum::<f64>() > 0.0) {
            return Err(Error::InvalidParameter {
                name: "shape_overrides",
                reason: format!("{kind}: weights must be non-negative with a positive sum"),
            });
        }
    }
    Ok(())
}

impl SamplingConfig {
    /// Checks every field against the preconditions of the pipeline stages.
    pub fn validate(&self) -> Result<()> {
        validate_config(self)
    }
}

fn class_target(
    config: &SamplingConfig,
    label: &ClassLabel,
    original: &DifficultyHistogram,
    params: &TransformParams,
) -> Result<TargetDistribution> {
    let n = config.binning.bin_count();
    if let Some(w) = config.shape_overrides.get(&config.strategy) {
        if w.len() != n {
            return Err(Error::LengthMismatch { left: w.len(), right: n });
        }
        return TargetDistribution::from_weights(config.strategy, w, label.clone());
    }
    match config.strategy {
        StrategyKind::Scale => {
            let applied = TransformParams {
                epsilon: default_epsilon(original.total(), config.epsilon_scale),
                ..*params
            };
            scale_target(original, &applied, config.transform_enabled)
        }
        kind => predefined_target(kind, n, label.clone()),
    }
}

fn run_class(
    config: &SamplingConfig,
    label: &ClassLabel,
    original: &DifficultyHistogram,
    pool_hist: &DifficultyHistogram,
    pool_records: &[ScoreRecord],
) -> Result<(ClassSelection, Vec<ScoreRecord>)> {
    if pool_records.len() < config.ipc {
        return Err(Error::InsufficientPool {
            class: label.to_string(),
            available: pool_records.len(),
            ipc: config.ipc,
        });
    }
    let (params, fit) = if config.transform_enabled {
        let fit_hist = match config.fit_on {
            FitSource::Pool => pool_hist,
            FitSource::Original => original,
        };
        let epsilon = default_epsilon(fit_hist.total(), config.epsilon_scale);
        let (params, diag) = fit_thresholds(fit_hist, config.lambda, epsilon)?;
        let summary = FitSummary {
            fitted_on: config.fit_on,
            objective_value: diag.objective_value,
            kl_to_original: diag.kl_to_original,
            kl_to_uniform: diag.kl_to_uniform,
            uniform_fallback: diag.uniform_fallback,
        };
        (params, Some(summary))
    } else {
        let params = TransformParams {
            b: 0,
            t: 0,
            epsilon: default_epsilon(original.total(), config.epsilon_scale),
            lambda: config.lambda,
        };
        (params, None)
    };

    let target = class_target(config, label, original, &params)?;
    let plan = allocate(&target, config.ipc)?;
    let draw = select(pool_records, &plan, config.binning, config.seed)?;
    Ok((
        ClassSelection {
            class_label: label.clone(),
            params,
            fit,
            target,
            plan: draw.plan,
            realized_counts: draw.realized_counts,
        },
        draw.records,
    ))
}

/// Runs histogram → fit → target → allocate → select for every class of
/// `original` and merges the results.
///
/// Classes that only appear in the pool are ignored. Pool ids must be unique.
pub fn sample_distilled(
    original: &[ScoreRecord],
    pool: &[ScoreRecord],
    config: &SamplingConfig,
) -> Result<SelectionManifest> {
    validate_config(config)?;
    let mut seen = HashSet::with_capacity(pool.len());
    for r in pool {
        if !seen.insert(r.id.as_str()) {
            return Err(Error::InvalidParameter {
                name: "pool",
                reason: format!("duplicate id `{}`", r.id),
            });
        }
    }

    let original_hists = histograms_by_class(original, config.binning)?;
    let pool_hists = histograms_by_class(pool, config.binning)?;
    let mut pool_by_class: BTreeMap<&ClassLabel, Vec<ScoreRecord>> = BTreeMap::new();
    for r in pool {
        pool_by_class.entry(&r.class_label).or_default().push(r.clone());
    }

    let jobs: Vec<(&ClassLabel, &DifficultyHistogram, &DifficultyHistogram, &[ScoreRecord])> = original_hists
        .iter()
        .map(|(label, hist)| {
            let pool_hist = pool_hists.get(label).ok_or_else(|| Error::MissingClass(label.to_string()))?;
            let recs = pool_by_class.get(label).map(Vec::as_slice).unwrap_or_default();
            Ok((label, hist, pool_hist, recs))
        })
        .collect::<Result<_>>()?;

    // Ordered collect keeps the label order regardless of completion order.
    let results: Vec<(ClassSelection, Vec<ScoreRecord>)> = jobs
        .par_iter()
        .map(|(label, orig, pool_hist, recs)| run_class(config, label, orig, pool_hist, recs))
        .collect::<Result<_>>()?;

    let mut classes = Vec::with_capacity(results.len());
    let mut records = Vec::with_capacity(results.len() * config.ipc);
    for (class, recs) in results {
        classes.push(class);
        records.extend(recs);
    }
    Ok(SelectionManifest {
        seed: config.seed,
        pool_factor: config.pool_factor,
        ipc: config.ipc,
        strategy: config.strategy,
        bin_count: config.binning.bin_count(),
        classes,
        records,
    })
}
