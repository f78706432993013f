//! Clipped logarithmic flattening of difficulty histograms.
//!
//! Given bin masses `P(n)`, the clip step zeroes the `b` lowest and `t`
//! highest bins and adds a floor `ε` everywhere:
//!
//! ```text
//! P'(n) = H(n - b) P(n) H(N - 1 - t - n) + ε        (0-based n, H(0) = 1)
//! ```
//!
//! and the log step rescales into [0, 1]:
//!
//! ```text
//! f(n) = ln(P'(n) / min P') / ln(max P' / min P')
//! ```
//!
//! `(b, t)` are chosen by exhaustive search over every feasible pair,
//! minimising `λ KL(f̂ || P̂) + (1 - λ) KL(f̂ || U)` where `f̂` is `f`
//! renormalized, `P̂` the ε-floored input and `U` uniform.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::{normalize_counts, DifficultyHistogram};

pub const DEFAULT_LAMBDA: f64 = 0.5;
/// ε is this fraction of the histogram total unless set explicitly.
pub const DEFAULT_EPSILON_SCALE: f64 = 1e-6;

const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformParams {
    /// Number of lowest-difficulty bins clipped away.
    pub b: usize,
    /// Number of highest-difficulty bins clipped away.
    pub t: usize,
    pub epsilon: f64,
    pub lambda: f64,
}

impl TransformParams {
    /// No clipping, default λ, ε scaled to the histogram total.
    pub fn identity_for(hist: &DifficultyHistogram) -> Self {
        TransformParams {
            b: 0,
            t: 0,
            epsilon: default_epsilon(hist.total(), DEFAULT_EPSILON_SCALE),
            lambda: DEFAULT_LAMBDA,
        }
    }

    pub fn validate(&self, bins: usize) -> Result<()> {
        check_thresholds(bins, self.b, self.t)?;
        check_epsilon(self.epsilon)?;
        check_lambda(self.lambda)
    }
}

/// `scale * total`, falling back to `scale` alone for an empty histogram so
/// the floor stays positive.
pub fn default_epsilon(total: f64, scale: f64) -> f64 {
    if total > 0.0 {
        scale * total
    } else {
        scale
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformDiagnostics {
    pub objective_value: f64,
    pub kl_to_original: f64,
    pub kl_to_uniform: f64,
    /// `objective_grid[b][t]`; `None` where `b + t > N - 2`.
    pub objective_grid: Vec<Vec<Option<f64>>>,
    /// The selected cell was constant after clipping and fell back to uniform.
    pub uniform_fallback: bool,
    /// How many grid cells needed the uniform fallback.
    pub fallback_cells: usize,
}

/// A transformed histogram as a probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transformed {
    pub probabilities: Vec<f64>,
    pub uniform_fallback: bool,
}

fn check_thresholds(bins: usize, b: usize, t: usize) -> Result<()> {
    if bins < 2 || b + t > bins - 2 {
        return Err(Error::InvalidThreshold { b, t, bins });
    }
    Ok(())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "epsilon",
            reason: format!("{epsilon} is not a positive finite number"),
        })
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if (0.0..=1.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "lambda",
            reason: format!("{lambda} is outside [0, 1]"),
        })
    }
}

/// Zeroes the `b` lowest and `t` highest bins and adds `epsilon` to every bin.
pub fn clip(counts: &[f64], b: usize, t: usize, epsilon: f64) -> Result<Vec<f64>> {
    let n = counts.len();
    check_thresholds(n, b, t)?;
    check_epsilon(epsilon)?;
    let keep = b..n - t;
    Ok(counts
        .iter()
        .enumerate()
        .map(|(i, c)| if keep.contains(&i) { c + epsilon } else { epsilon })
        .collect())
}

/// Maps strictly positive masses to `ln(x / min) / ln(max / min)`.
///
/// The minimum maps to exactly 0 and the maximum to exactly 1.
pub fn log_transform(clipped: &[f64]) -> Result<Vec<f64>> {
    if clipped.is_empty() {
        return Err(Error::DegenerateDistribution("empty vector"));
    }
    if clipped.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Error::InvalidCounts("log transform needs strictly positive finite masses".into()));
    }
    let min = clipped.iter().copied().fold(f64::INFINITY, f64::min);
    let max = clipped.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = (max / min).ln();
    if !(span > 0.0) {
        return Err(Error::ConstantDistribution);
    }
    Ok(clipped.iter().map(|x| (x / min).ln() / span).collect())
}

fn check_distribution(v: &[f64], name: &'static str) -> Result<()> {
    let sum: f64 = v.iter().sum();
    if v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) || (sum - 1.0).abs() > DISTRIBUTION_TOLERANCE {
        return Err(Error::NotADistribution(name));
    }
    Ok(())
}

/// `KL(p || q) = Σ p ln(p / q)` in nats, with `0 ln(0 / q) = 0`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    check_distribution(p, "p")?;
    check_distribution(q, "q")?;
    let mut acc = 0.0;
    for (i, (&pi, &qi)) in p.iter().zip(q).enumerate() {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Err(Error::UnboundedDivergence(i));
        }
        acc += pi * (pi / qi).ln();
    }
    // Rounding can leave a tiny negative residue when p ≈ q.
    Ok(acc.max(0.0))
}

/// Clip + log transform + renormalize, falling back to uniform when the
/// clipped vector is constant.
fn transformed_distribution(counts: &[f64], b: usize, t: usize, epsilon: f64) -> Result<Transformed> {
    let clipped = clip(counts, b, t, epsilon)?;
    match log_transform(&clipped) {
        Ok(f) => Ok(Transformed {
            probabilities: normalize_counts(&f, None)?,
            uniform_fallback: false,
        }),
        Err(Error::ConstantDistribution) => Ok(Transformed {
            probabilities: uniform(counts.len()),
            uniform_fallback: true,
        }),
        Err(e) => Err(e),
    }
}

fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// `normalize(log_transform(clip(hist, params)))`.
pub fn apply_transform(hist: &DifficultyHistogram, params: &TransformParams) -> Result<Transformed> {
    params.validate(hist.bin_count())?;
    transformed_distribution(hist.counts(), params.b, params.t, params.epsilon)
}

struct CellScore {
    objective: f64,
    kl_to_original: f64,
    kl_to_uniform: f64,
    fallback: bool,
}

fn score_cell(counts: &[f64], b: usize, t: usize, epsilon: f64, lambda: f64, floored: &[f64], u: &[f64]) -> Result<CellScore> {
    let f = transformed_distribution(counts, b, t, epsilon)?;
    let kl_to_original = kl_divergence(&f.probabilities, floored)?;
    let kl_to_uniform = kl_divergence(&f.probabilities, u)?;
    Ok(CellScore {
        objective: lambda * kl_to_original + (1.0 - lambda) * kl_to_uniform,
        kl_to_original,
        kl_to_uniform,
        fallback: f.uniform_fallback,
    })
}

/// Exhaustive search for the clip thresholds `(b, t)`.
///
/// Every pair with `b + t <= N - 2` is scored; ties go to the smallest `b`,
/// then the smallest `t`.
pub fn fit_thresholds(
    hist: &DifficultyHistogram,
    lambda: f64,
    epsilon: f64,
) -> Result<(TransformParams, TransformDiagnostics)> {
    check_lambda(lambda)?;
    check_epsilon(epsilon)?;
    if !(hist.total() > 0.0) {
        return Err(Error::DegenerateDistribution("cannot fit thresholds on an empty histogram"));
    }
    let n = hist.bin_count();
    let counts = hist.counts();
    let floored = normalize_counts(counts, Some(epsilon))?;
    let u = uniform(n);

    let mut grid = vec![vec![None; n]; n];
    let mut best: Option<(usize, usize, CellScore)> = None;
    let mut fallback_cells = 0;
    for b in 0..=n - 2 {
        for t in 0..=n - 2 - b {
            let cell = score_cell(counts, b, t, epsilon, lambda, &floored, &u)?;
            grid[b][t] = Some(cell.objective);
            fallback_cells += usize::from(cell.fallback);
            // Strict comparison keeps the first (smallest b, then t) minimiser.
            if best.as_ref().is_none_or(|(_, _, s)| cell.objective < s.objective) {
                best = Some((b, t, cell));
            }
        }
    }
    let (b, t, cell) = best.expect("grid has at least the (0, 0) cell");
    Ok((
        TransformParams { b, t, epsilon, lambda },
        TransformDiagnostics {
            objective_value: cell.objective,
            kl_to_original: cell.kl_to_original,
            kl_to_uniform: cell.kl_to_uniform,
            objective_grid: grid,
            uniform_fallback: cell.fallback,
            fallback_cells,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EPS: f64 = 1e-6;

    fn hist(counts: &[f64]) -> DifficultyHistogram {
        DifficultyHistogram::from_counts("c", counts.to_vec()).unwrap()
    }

    #[test]
    fn clip_examples() {
        let c = [5.0, 3.0, 2.0, 4.0];
        assert_eq!(clip(&c, 0, 0, EPS).unwrap(), vec![5.0 + EPS, 3.0 + EPS, 2.0 + EPS, 4.0 + EPS]);
        assert_eq!(clip(&c, 1, 1, EPS).unwrap(), vec![EPS, 3.0 + EPS, 2.0 + EPS, EPS]);
        assert!(matches!(clip(&c, 2, 2, EPS), Err(Error::InvalidThreshold { b: 2, t: 2, bins: 4 })));
        assert!(matches!(clip(&c, 3, 0, EPS), Err(Error::InvalidThreshold { .. })));
        assert!(clip(&c, 2, 0, EPS).is_ok());
        assert!(clip(&c, 0, 0, 0.0).is_err());
    }

    #[test]
    fn log_transform_examples() {
        let out = log_transform(&[1.0, 10.0, 100.0]).unwrap();
        assert_eq!(out[0], 0.0);
        assert!((out[1] - 0.5).abs() < 1e-15);
        assert_eq!(out[2], 1.0);

        let e = std::f64::consts::E;
        assert_eq!(log_transform(&[e, e, e * e]).unwrap(), vec![0.0, 0.0, 1.0]);

        assert!(matches!(log_transform(&[2.0, 2.0, 2.0]), Err(Error::ConstantDistribution)));
        assert!(log_transform(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn log_transform_of_clipped_example() {
        // Hand evaluation: min = ε, max = 3 + ε.
        let out = log_transform(&clip(&[5.0, 3.0, 2.0, 4.0], 1, 1, EPS).unwrap()).unwrap();
        let span = ((3.0 + EPS) / EPS).ln();
        let expected = [0.0, 1.0, ((2.0 + EPS) / EPS).ln() / span, 0.0];
        for (o, e) in out.iter().zip(expected) {
            assert!((o - e).abs() < 1e-15, "{o} vs {e}");
        }
        // ≈ 0.97281 by calculator.
        assert!((out[2] - 0.97281).abs() < 1e-5);
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl_divergence(&[0.2, 0.3, 0.5], &[0.2, 0.3, 0.5]).unwrap(), 0.0);
        let v = kl_divergence(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((v - std::f64::consts::LN_2).abs() < 1e-15);
        assert!(matches!(kl_divergence(&[1.0], &[0.5, 0.5]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(kl_divergence(&[0.5, 0.5], &[1.0, 0.0]), Err(Error::UnboundedDivergence(1))));
        assert!(matches!(kl_divergence(&[0.7, 0.7], &[0.5, 0.5]), Err(Error::NotADistribution("p"))));
    }

    #[test]
    fn uniform_counts_fit_to_identity() {
        let h = hist(&[7.0; 6]);
        let (params, diag) = fit_thresholds(&h, 0.5, EPS).unwrap();
        assert_eq!((params.b, params.t), (0, 0));
        assert_eq!(diag.objective_value, 0.0);
        assert!(diag.uniform_fallback);
        // Every other cell is strictly worse.
        for (b, row) in diag.objective_grid.iter().enumerate() {
            for (t, cell) in row.iter().enumerate() {
                if let Some(v) = cell {
                    if (b, t) != (0, 0) {
                        assert!(*v > 0.0, "cell ({b},{t}) = {v}");
                    }
                }
            }
        }
    }

    #[test]
    fn lambda_one_is_similarity_only() {
        let h = hist(&[10.0, 40.0, 25.0, 12.0, 6.0, 2.0, 1.0, 0.0]);
        let (_, diag) = fit_thresholds(&h, 1.0, EPS).unwrap();
        let f = apply_transform(&h, &TransformParams { b: 0, t: 0, epsilon: EPS, lambda: 1.0 }).unwrap();
        let p = normalize_counts(h.counts(), Some(EPS)).unwrap();
        assert_eq!(diag.objective_grid[0][0], Some(kl_divergence(&f.probabilities, &p).unwrap()));
    }

    #[test]
    fn grid_shape_and_feasibility() {
        let h = hist(&[3.0, 1.0, 4.0, 1.0, 5.0, 9.0]);
        let (_, diag) = fit_thresholds(&h, 0.5, EPS).unwrap();
        let n = 6;
        let mut feasible = 0;
        for b in 0..n {
            for t in 0..n {
                assert_eq!(diag.objective_grid[b][t].is_some(), b + t <= n - 2);
                feasible += usize::from(diag.objective_grid[b][t].is_some());
            }
        }
        assert_eq!(feasible, (n - 1) * n / 2);
        assert_eq!(
            diag.objective_value,
            0.5 * diag.kl_to_original + 0.5 * diag.kl_to_uniform
        );
    }

    #[test]
    fn single_bin_mass_is_not_an_error() {
        let h = hist(&[0.0, 0.0, 50.0, 0.0, 0.0]);
        let (params, diag) = fit_thresholds(&h, 0.5, EPS).unwrap();
        params.validate(5).unwrap();
        // Clipping bin 2 away makes the vector constant.
        assert!(diag.fallback_cells > 0);
    }

    #[test]
    fn fit_rejects_empty_and_bad_lambda() {
        assert!(fit_thresholds(&hist(&[0.0; 5]), 0.5, EPS).is_err());
        assert!(fit_thresholds(&hist(&[1.0; 5]), 1.5, EPS).is_err());
    }

    #[test]
    fn apply_flattens_easy_bias() {
        let h = hist(&[120.0, 300.0, 260.0, 160.0, 90.0, 40.0, 20.0, 8.0, 2.0, 0.0]);
        let before = normalize_counts(h.counts(), None).unwrap();
        let (params, _) = fit_thresholds(&h, 0.5, 1e-6 * h.total()).unwrap();
        let after = apply_transform(&h, &params).unwrap();
        let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        assert!(max(&after.probabilities) < max(&before));
        assert!((after.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    fn variance(v: &[f64]) -> f64 {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64
    }

    proptest! {
        #[test]
        fn kl_nonnegative_and_zero_on_self(
            raw in proptest::collection::vec(0.0f64..10.0, 2..30),
            raw_q in proptest::collection::vec(0.01f64..10.0, 2..30),
        ) {
            let n = raw.len().min(raw_q.len());
            if let Ok(p) = normalize_counts(&raw[..n], None) {
                let q = normalize_counts(&raw_q[..n], None).unwrap();
                prop_assert!(kl_divergence(&p, &q).unwrap() >= 0.0);
                prop_assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
            }
        }

        #[test]
        fn log_transform_flattens(mut raw in proptest::collection::vec(0u32..1000, 4..40), zero_at in any::<usize>()) {
            // Holds when the floor is the minimum (some bin is empty) and the
            // masses are not two-level; [1, 100, 100, 100] sharpens instead.
            let len = raw.len();
            raw[zero_at % len] = 0;
            let counts: Vec<f64> = raw.iter().map(|&c| c as f64).collect();
            let mut distinct = raw.clone();
            distinct.sort_unstable();
            distinct.dedup();
            prop_assume!(distinct[0] == 0 && distinct.len() >= 3);
            let eps = 1e-6 * counts.iter().sum::<f64>();
            let clipped = clip(&counts, 0, 0, eps).unwrap();
            let f = normalize_counts(&log_transform(&clipped).unwrap(), None).unwrap();
            let p = normalize_counts(&counts, Some(eps)).unwrap();
            prop_assert!(variance(&f) < variance(&p), "{} !< {}", variance(&f), variance(&p));
        }

        #[test]
        fn near_flat_input_is_sharpened(base in 50u32..100, n in 4usize..20) {
            let counts: Vec<f64> = (0..n).map(|i| (base + i as u32 % 3) as f64).collect();
            let eps = 1e-6 * counts.iter().sum::<f64>();
            let f = normalize_counts(&log_transform(&clip(&counts, 0, 0, eps).unwrap()).unwrap(), None).unwrap();
            let p = normalize_counts(&counts, Some(eps)).unwrap();
            prop_assert!(variance(&f) > variance(&p));
        }

        #[test]
        fn order_preserved_in_window(
            counts in proptest::collection::vec(0.0f64..100.0, 4..40),
            b in 0usize..20, t in 0usize..20,
        ) {
            let n = counts.len();
            prop_assume!(b + t <= n - 2);
            let clipped = clip(&counts, b, t, EPS).unwrap();
            let f = match log_transform(&clipped) {
                Ok(f) => f,
                Err(Error::ConstantDistribution) => return Ok(()),
                Err(e) => panic!("{e}"),
            };
            for i in b..n - t {
                for j in b..n - t {
                    if counts[i] <= counts[j] {
                        prop_assert!(f[i] <= f[j]);
                    }
                }
            }
        }

        #[test]
        fn scale_invariant_with_scaled_epsilon(
            counts in proptest::collection::vec(0.0f64..100.0, 4..40),
            power in -10i32..10,
        ) {
            // Powers of two scale exactly in binary floating point.
            let c = 2f64.powi(power);
            let scaled: Vec<f64> = counts.iter().map(|x| x * c).collect();
            let a = log_transform(&clip(&counts, 0, 0, EPS).unwrap());
            let b = log_transform(&clip(&scaled, 0, 0, EPS * c).unwrap());
            match (a, b) {
                (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                (Err(Error::ConstantDistribution), Err(Error::ConstantDistribution)) => {}
                (a, b) => prop_assert!(false, "{a:?} / {b:?}"),
            }
        }

        #[test]
        fn fitted_cell_is_grid_minimum(counts in proptest::collection::vec(0.0f64..500.0, 4..16)) {
            prop_assume!(counts.iter().sum::<f64>() > 0.0);
            let h = hist(&counts);
            let (params, diag) = fit_thresholds(&h, 0.5, 1e-6 * h.total()).unwrap();
            for row in &diag.objective_grid {
                for v in row.iter().flatten() {
                    prop_assert!(diag.objective_value <= *v);
                }
            }
            prop_assert_eq!(diag.objective_grid[params.b][params.t], Some(diag.objective_value));
        }
    }
}
