//! Difficulty-guided sampling for generative dataset distillation.
//!
//! A distilled subset is drawn from an over-generated image pool so that its
//! per-class difficulty histogram follows a target shape derived from the
//! original dataset. Pools produced by generative models are skewed towards
//! easy samples, so bin masses are first passed through a clipped log
//! transform whose clip thresholds are fitted by minimising a KL objective.
//!
//! Module map:
//!
//! - [`histogram`]: score records, binning and per-class histograms.
//! - [`transform`]: clip, log transform, KL divergence and the threshold fit.
//! - [`sampling`]: target distributions, apportionment and seeded selection.
//! - [`synth`]: synthetic data generator and nearest-centroid benchmark.
//! - [`io`]: manifest/config formats, plots, result tables and provenance.

pub mod error;
pub mod histogram;
pub mod io;
pub mod rng;
pub mod sampling;
pub mod synth;
pub mod transform;

pub use error::{Error, Result};
pub use histogram::{
    bin_index, build_histogram, histograms_by_class, normalize, normalize_counts, total_variation,
    BinningSpec, ClassLabel, DifficultyHistogram, ScoreRecord,
};
pub use sampling::{
    allocate, predefined_target, sample_distilled, scale_target, select, ClassSelection,
    FallbackMove, FitSource, SamplingConfig, SamplingPlan, SelectionManifest, StrategyKind,
    TargetDistribution,
};
pub use synth::{
    evaluate_downstream, generate_synthetic, random_subset, run_sweep, BenchResult, BetaLaw, DifficultyLaw,
    FeatureStore, SyntheticData, SyntheticSpec, SyntheticWorld,
};
pub use transform::{
    apply_transform, clip, fit_thresholds, kl_divergence, log_transform, TransformDiagnostics,
    TransformParams, Transformed,
};
