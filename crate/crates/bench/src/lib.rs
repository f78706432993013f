//! Fixtures shared by the pipeline benchmarks.

use diffguide_core::synth::SyntheticData;
use diffguide_core::{generate_synthetic, DifficultyHistogram, SyntheticSpec};

/// Synthetic data at the default spec, scaled down to `class_count` classes.
pub fn dataset(class_count: usize, ipc: usize, seed: u64) -> SyntheticData {
    let spec = SyntheticSpec {
        class_count,
        ipc,
        seed,
        ..SyntheticSpec::default()
    };
    generate_synthetic(&spec).expect("default spec is feasible")
}

/// Easy-skewed histogram over `bins` bins, shaped like a Beta(2, 8) density.
pub fn skewed_histogram(bins: usize) -> DifficultyHistogram {
    let counts = (0..bins)
        .map(|k| {
            let x = (k as f64 + 0.5) / bins as f64;
            (10_000.0 * x * (1.0 - x).powi(7)).round()
        })
        .collect();
    DifficultyHistogram::from_counts("bench", counts).expect("at least four bins")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        let h = skewed_histogram(20);
        assert!(h.total() > 0.0);
        let d = dataset(2, 5, 0);
        assert_eq!(d.pool.len(), 2 * 5 * 5);
    }
}
