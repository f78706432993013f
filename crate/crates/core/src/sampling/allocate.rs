use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::ClassLabel;

use super::target::TargetDistribution;

/// A deficit in `from_bin` filled with `moved_count` records from `to_bin`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FallbackMove {
    pub from_bin: usize,
    pub to_bin: usize,
    pub moved_count: usize,
}

/// Integer per-bin quotas for one class. `bin_targets` always sums to `ipc`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub class_label: ClassLabel,
    pub ipc: usize,
    pub bin_targets: Vec<usize>,
    /// Filled in by selection when a bin cannot meet its target.
    pub fallback_log: Vec<FallbackMove>,
}

/// Largest-remainder apportionment of `ipc` over `target.weights`.
///
/// Each bin first gets `floor(ipc * w)`; leftover units go to the largest
/// fractional remainders, ties broken by lower bin index. Every bin ends
/// within one unit of its exact quota.
pub fn allocate(target: &TargetDistribution, ipc: usize) -> Result<SamplingPlan> {
    if ipc == 0 {
        return Err(Error::InvalidParameter {
            name: "ipc",
            reason: "must be at least 1".into(),
        });
    }
    let bin_targets = largest_remainder(&target.weights, ipc)?;
    Ok(SamplingPlan {
        class_label: target.class_label.clone(),
        ipc,
        bin_targets,
        fallback_log: Vec::new(),
    })
}

/// Apportions `total` units over non-negative `weights` (need not be
/// normalized) by the largest-remainder rule, lower index first on ties.
pub fn largest_remainder(weights: &[f64], total: usize) -> Result<Vec<usize>> {
    if weights.is_empty() || weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::NotADistribution("weights"));
    }
    let sum: f64 = weights.iter().sum();
    if !(sum > 0.0) {
        return Err(Error::NotADistribution("weights"));
    }

    let quotas: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut bin_targets: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = bin_targets.iter().sum();
    let mut leftover = total.saturating_sub(assigned);

    let mut order: Vec<usize> = (0..weights.len()).collect();
    // Stable sort keeps lower indices first among equal remainders.
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra)
    });
    for &i in order.iter().cycle() {
        if leftover == 0 {
            break;
        }
        bin_targets[i] += 1;
        leftover -= 1;
    }
    // Floors can only overshoot through rounding in `total * w / sum`.
    let mut excess = bin_targets.iter().sum::<usize>().saturating_sub(total);
    for &i in order.iter().rev() {
        if excess == 0 {
            break;
        }
        if bin_targets[i] > 0 {
            bin_targets[i] -= 1;
            excess -= 1;
        }
    }

    Ok(bin_targets)
}
