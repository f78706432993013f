//! TOML run configuration.
//!
//! ```toml
//! bin_count = 20
//! ipc = 10
//! strategy = "scale"
//! fit_thresholds_on = "pool"
//!
//! [shape_overrides]
//! hill = [1.0, 2.0, 2.0, 1.0]
//!
//! [synthetic]
//! class_count = 10
//! difficulty_law = [{ original = { alpha = 2.0, beta = 2.0 }, pool = { alpha = 2.0, beta = 8.0 } }]
//!
//! [bench]
//! ipcs = [10, 20, 50]
//! pool_factors = [2, 3, 4, 5, 6]
//! ```
//!
//! Every key is optional. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::{BinningSpec, DEFAULT_BIN_COUNT};
use crate::sampling::{FitSource, SamplingConfig, StrategyKind, DEFAULT_POOL_FACTOR};
use crate::synth::{DifficultyLaw, SyntheticSpec, MIN_REPEATS};
use crate::transform::{DEFAULT_EPSILON_SCALE, DEFAULT_LAMBDA};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub bin_count: usize,
    pub lambda: f64,
    pub epsilon_scale: f64,
    pub ipc: usize,
    pub pool_factor: usize,
    pub strategy: StrategyKind,
    pub seed: u64,
    pub fit_thresholds_on: FitSource,
    pub transform_enabled: bool,
    pub shape_overrides: BTreeMap<StrategyKind, Vec<f64>>,
    pub synthetic: SyntheticSection,
    pub bench: BenchSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            bin_count: DEFAULT_BIN_COUNT,
            lambda: DEFAULT_LAMBDA,
            epsilon_scale: DEFAULT_EPSILON_SCALE,
            ipc: 10,
            pool_factor: DEFAULT_POOL_FACTOR,
            strategy: StrategyKind::Scale,
            seed: 0,
            fit_thresholds_on: FitSource::Pool,
            transform_enabled: true,
            shape_overrides: BTreeMap::new(),
            synthetic: SyntheticSection::default(),
            bench: BenchSection::default(),
        }
    }
}

/// World parameters of the synthetic generator. Seed, ipc, pool factor and
/// bin count come from the top level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSection {
    pub class_count: usize,
    pub per_class_original: usize,
    pub per_class_test: usize,
    pub difficulty_law: Vec<DifficultyLaw>,
    pub feature_dim: usize,
    pub class_separation: f64,
    pub attempt_factor: usize,
}

impl Default for SyntheticSection {
    fn default() -> Self {
        let s = SyntheticSpec::default();
        SyntheticSection {
            class_count: s.class_count,
            per_class_original: s.per_class_original,
            per_class_test: s.per_class_test,
            difficulty_law: s.difficulty_law,
            feature_dim: s.feature_dim,
            class_separation: s.class_separation,
            attempt_factor: s.attempt_factor,
        }
    }
}

/// Sweep layout for the `bench` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSection {
    /// Rows of the strategy table.
    pub strategies: Vec<StrategyKind>,
    pub ipcs: Vec<usize>,
    /// Rows of the pool-size table.
    pub pool_factors: Vec<usize>,
    pub repeats: usize,
}

impl Default for BenchSection {
    fn default() -> Self {
        BenchSection {
            strategies: StrategyKind::ALL.to_vec(),
            ipcs: vec![10, 20, 50],
            pool_factors: vec![2, 3, 4, 5, 6],
            repeats: MIN_REPEATS,
        }
    }
}

fn config_err(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Config {
        field: field.into(),
        reason: reason.into(),
    }
}

/// Rewrites a module error as a config error on `prefix.<field>`.
fn at_field(prefix: &str, err: Error) -> Error {
    let join = |name: &str| {
        if prefix.is_empty() {
            name.to_owned()
        } else {
            format!("{prefix}.{name}")
        }
    };
    match err {
        Error::InvalidParameter { name, reason } => config_err(join(name), reason),
        Error::InvalidBinning(n) => config_err(join("bin_count"), format!("{n} bins (need at least {})", BinningSpec::MIN_BINS)),
        other => config_err(join("?"), other.to_string()),
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: RunConfig = toml::from_str(text).map_err(|e| {
            let field = e.span().map(|s| format!("byte {}..{}", s.start, s.end)).unwrap_or_default();
            config_err(field, e.message().to_owned())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config { field, reason } => Error::Config {
                field: format!("{}: {field}", path.display()),
                reason,
            },
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.sampling_config()?.validate().map_err(|e| at_field("", e))?;
        self.synthetic_spec()?.validate().map_err(|e| at_field("synthetic", e))?;
        let bench = &self.bench;
        if bench.repeats < MIN_REPEATS {
            return Err(config_err("bench.repeats", format!("need at least {MIN_REPEATS}, got {}", bench.repeats)));
        }
        for (name, list) in [("bench.ipcs", &bench.ipcs), ("bench.pool_factors", &bench.pool_factors)] {
            if list.is_empty() || list.contains(&0) {
                return Err(config_err(name, "must be a non-empty list of positive integers"));
            }
        }
        if bench.strategies.is_empty() {
            return Err(config_err("bench.strategies", "must not be empty"));
        }
        Ok(())
    }

    pub fn sampling_config(&self) -> Result<SamplingConfig> {
        Ok(SamplingConfig {
            binning: BinningSpec::new(self.bin_count).map_err(|e| at_field("", e))?,
            ipc: self.ipc,
            strategy: self.strategy,
            lambda: self.lambda,
            epsilon_scale: self.epsilon_scale,
            seed: self.seed,
            pool_factor: self.pool_factor,
            fit_on: self.fit_thresholds_on,
            transform_enabled: self.transform_enabled,
            shape_overrides: self.shape_overrides.clone(),
        })
    }

    pub fn synthetic_spec(&self) -> Result<SyntheticSpec> {
        let s = &self.synthetic;
        Ok(SyntheticSpec {
            class_count: s.class_count,
            per_class_original: s.per_class_original,
            per_class_test: s.per_class_test,
            ipc: self.ipc,
            pool_factor: self.pool_factor,
            difficulty_law: s.difficulty_law.clone(),
            feature_dim: s.feature_dim,
            class_separation: s.class_separation,
            bin_count: self.bin_count,
            attempt_factor: s.attempt_factor,
            seed: self.seed,
        })
    }

    /// Canonical JSON form, used for hashing.
    pub fn canonical_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_of(text: &str) -> String {
        match RunConfig::from_toml_str(text).unwrap_err() {
            Error::Config { field, .. } => field,
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn empty_file_is_the_default() {
        assert_eq!(RunConfig::from_toml_str("").unwrap(), RunConfig::default());
        let s = RunConfig::default().sampling_config().unwrap();
        assert_eq!(s, SamplingConfig::default());
    }

    #[test]
    fn full_file_parses() {
        let text = r#"
bin_count = 4
lambda = 0.25
epsilon_scale = 1e-5
ipc = 20
pool_factor = 3
strategy = "hill"
seed = 42
fit_thresholds_on = "original"
transform_enabled = false

[shape_overrides]
hill = [1.0, 3.0, 3.0, 1.0]

[synthetic]
class_count = 3
difficulty_law = [{ original = { alpha = 2.0, beta = 2.0 }, pool = { alpha = 2.0, beta = 8.0 } }]

[bench]
strategies = ["scale", "ground"]
ipcs = [10]
pool_factors = [2, 5]
repeats = 4
"#;
        let c = RunConfig::from_toml_str(text).unwrap();
        let s = c.sampling_config().unwrap();
        assert_eq!(s.binning.bin_count(), 4);
        assert_eq!(s.fit_on, FitSource::Original);
        assert!(!s.transform_enabled);
        assert_eq!(s.shape_overrides[&StrategyKind::Hill], vec![1.0, 3.0, 3.0, 1.0]);
        let spec = c.synthetic_spec().unwrap();
        assert_eq!((spec.class_count, spec.seed, spec.ipc, spec.pool_factor), (3, 42, 20, 3));
        assert_eq!(c.bench.repeats, 4);
    }

    #[test]
    fn errors_carry_field_paths() {
        assert_eq!(field_of("lambda = 1.5"), "lambda");
        assert_eq!(field_of("bin_count = 3"), "bin_count");
        assert_eq!(field_of("ipc = 0"), "ipc");
        assert_eq!(field_of("epsilon_scale = -1.0"), "epsilon_scale");
        assert_eq!(field_of("[synthetic]\nclass_separation = 0.0"), "synthetic.class_separation");
        assert_eq!(field_of("[synthetic]\nclass_count = 1"), "synthetic.class_count");
        assert_eq!(field_of("[bench]\nrepeats = 2"), "bench.repeats");
        assert_eq!(field_of("[bench]\npool_factors = []"), "bench.pool_factors");
        assert_eq!(field_of("[shape_overrides]\nscale = [1.0, 1.0, 1.0, 1.0]"), "shape_overrides");
        assert_eq!(field_of("[shape_overrides]\nhill = [1.0, 1.0]"), "shape_overrides");
    }

    #[test]
    fn syntax_and_unknown_keys_rejected() {
        let e = RunConfig::from_toml_str("ipcs = 3").unwrap_err().to_string();
        assert!(e.contains("unknown field"), "{e}");
        assert!(RunConfig::from_toml_str("strategy = \"pyramid\"").is_err());
        assert!(RunConfig::from_toml_str("ipc = ").is_err());
        assert!(RunConfig::from_toml_str("[synthetic]\ndifficulty_law = [{ original = { alpha = 1.0 } }]").is_err());
    }

    #[test]
    fn canonical_json_is_stable() {
        let a = RunConfig::default().canonical_json().unwrap();
        let b = RunConfig::from_toml_str("seed = 0").unwrap().canonical_json().unwrap();
        assert_eq!(a, b);
        assert_ne!(a, RunConfig { seed: 1, ..Default::default() }.canonical_json().unwrap());
    }
}
