//! Target distributions, integer apportionment and seeded selection.

mod allocate;
mod pipeline;
mod select;
mod target;

pub use allocate::{allocate, largest_remainder, FallbackMove, SamplingPlan};
pub use pipeline::{
    sample_distilled, ClassSelection, FitSource, FitSummary, SamplingConfig, SelectionManifest,
    DEFAULT_POOL_FACTOR,
};
pub use select::{select, ClassDraw};
pub use target::{predefined_target, scale_target, StrategyKind, TargetDistribution, CLIFF_RATIO};
