use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::{BinningSpec, ScoreRecord};
use crate::rng::{bin_rng, sample_without_replacement};

use super::allocate::{FallbackMove, SamplingPlan};

/// Records chosen for one class, with the plan's fallback log filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassDraw {
    pub records: Vec<ScoreRecord>,
    pub plan: SamplingPlan,
    /// Records actually taken per bin after fallback.
    pub realized_counts: Vec<usize>,
}

/// Moves unmet quota to the nearest bins that still have spare records.
///
/// Deficit bins are handled in ascending index order. The donor for each
/// deficit is the closest bin by index distance with spare records; on equal
/// distance the lower (easier) bin wins.
fn redistribute(targets: &[usize], available: &[usize], class: &str) -> Result<(Vec<usize>, Vec<FallbackMove>)> {
    let n = targets.len();
    let mut take: Vec<usize> = targets.iter().zip(available).map(|(t, a)| (*t).min(*a)).collect();
    let mut spare: Vec<usize> = available.iter().zip(&take).map(|(a, t)| a - t).collect();
    let deficits: Vec<usize> = targets.iter().zip(&take).map(|(t, k)| t - k).collect();
    let mut log = Vec::new();

    for (from, &deficit) in deficits.iter().enumerate() {
        let mut deficit = deficit;
        while deficit > 0 {
            let donor = (1..n)
                .flat_map(|d| [from.checked_sub(d), Some(from + d).filter(|&j| j < n)])
                .flatten()
                .find(|&j| spare[j] > 0)
                .ok_or_else(|| Error::NoDonor {
                    class: class.to_owned(),
                    deficit,
                })?;
            let moved = deficit.min(spare[donor]);
            spare[donor] -= moved;
            take[donor] += moved;
            deficit -= moved;
            log.push(FallbackMove {
                from_bin: from,
                to_bin: donor,
                moved_count: moved,
            });
        }
    }
    Ok((take, log))
}

/// Draws `plan.bin_targets[n]` records uniformly without replacement from
/// each bin of `pool`.
///
/// `pool` must already be restricted to the plan's class. Bin members are
/// ordered by id before drawing, so the result does not depend on input
/// order; each bin uses its own stream keyed by `(seed, class, bin)`.
/// Short bins are topped up from neighbours (see [`FallbackMove`]), so the
/// draw always holds exactly `plan.ipc` records.
pub fn select(pool: &[ScoreRecord], plan: &SamplingPlan, spec: BinningSpec, seed: u64) -> Result<ClassDraw> {
    let n = spec.bin_count();
    if plan.bin_targets.len() != n {
        return Err(Error::LengthMismatch {
            left: plan.bin_targets.len(),
            right: n,
        });
    }
    let class = plan.class_label.as_str();
    if pool.len() < plan.ipc {
        return Err(Error::InsufficientPool {
            class: class.to_owned(),
            available: pool.len(),
            ipc: plan.ipc,
        });
    }

    let mut bins: Vec<Vec<&ScoreRecord>> = vec![Vec::new(); n];
    for r in pool {
        r.validate()?;
        if r.class_label != plan.class_label {
            return Err(Error::InvalidParameter {
                name: "pool",
                reason: format!("record `{}` belongs to class `{}`, not `{class}`", r.id, r.class_label),
            });
        }
        bins[spec.bin_of(r.difficulty)].push(r);
    }
    let available: Vec<usize> = bins.iter().map(Vec::len).collect();
    let (take, fallback_log) = redistribute(&plan.bin_targets, &available, class)?;

    let mut records = Vec::with_capacity(plan.ipc);
    for (k, members) in bins.iter_mut().enumerate() {
        if take[k] == 0 {
            continue;
        }
        members.sort_by(|a, b| a.id.cmp(&b.id));
        let mut rng = bin_rng(seed, class, k);
        let picked = sample_without_replacement(&mut rng, members, take[k]);
        let mut picked: Vec<&ScoreRecord> = picked.to_vec();
        picked.sort_by(|a, b| a.id.cmp(&b.id));
        records.extend(picked.into_iter().cloned());
    }

    let mut plan = plan.clone();
    plan.fallback_log = fallback_log;
    Ok(ClassDraw {
        records,
        plan,
        realized_counts: take,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::histogram::ClassLabel;

    fn spec4() -> BinningSpec {
        BinningSpec::new(4).unwrap()
    }

    fn plan(targets: &[usize]) -> SamplingPlan {
        SamplingPlan {
            class_label: "c".into(),
            ipc: targets.iter().sum(),
            bin_targets: targets.to_vec(),
            fallback_log: vec![],
        }
    }

    /// `per_bin[k]` records placed at the midpoint of bin k of 4.
    fn pool(per_bin: &[usize]) -> Vec<ScoreRecord> {
        let mut out = Vec::new();
        for (k, &m) in per_bin.iter().enumerate() {
            for i in 0..m {
                out.push(ScoreRecord::new(format!("b{k}-{i:03}"), "c", (k as f64 + 0.5) / 4.0));
            }
        }
        out
    }

    fn per_bin(records: &[ScoreRecord]) -> Vec<usize> {
        let mut c = vec![0; 4];
        for r in records {
            c[spec4().bin_of(r.difficulty)] += 1;
        }
        c
    }

    #[test]
    fn abundant_pool_meets_targets_exactly() {
        let draw = select(&pool(&[10, 10, 10, 10]), &plan(&[3, 1, 0, 2]), spec4(), 5).unwrap();
        assert_eq!(per_bin(&draw.records), vec![3, 1, 0, 2]);
        assert!(draw.plan.fallback_log.is_empty());
        assert_eq!(draw.plan.bin_targets, vec![3, 1, 0, 2]);
    }

    #[test]
    fn pool_of_exactly_ipc_takes_everything() {
        let p = pool(&[4, 0, 1, 1]);
        let draw = select(&p, &plan(&[0, 3, 3, 0]), spec4(), 1).unwrap();
        assert_eq!(draw.records.len(), 6);
        let mut ids: Vec<_> = draw.records.iter().map(|r| r.id.clone()).collect();
        ids.sort();
        let mut all: Vec<_> = p.iter().map(|r| r.id.clone()).collect();
        all.sort();
        assert_eq!(ids, all);
        // Bin 1 short by 3 -> bin 0 (distance 1, lower wins tie with bin 2).
        // Bin 2 short by 2 -> bin 3 has 1 spare, then bin 0 has 1 left.
        assert_eq!(
            draw.plan.fallback_log,
            vec![
                FallbackMove { from_bin: 1, to_bin: 0, moved_count: 3 },
                FallbackMove { from_bin: 2, to_bin: 3, moved_count: 1 },
                FallbackMove { from_bin: 2, to_bin: 0, moved_count: 1 },
            ]
        );
        let moved: usize = draw.plan.fallback_log.iter().map(|m| m.moved_count).sum();
        assert_eq!(moved, 5);
    }

    #[test]
    fn lower_neighbour_preferred_on_ties() {
        let (take, log) = redistribute(&[0, 2, 0, 0], &[5, 0, 5, 5], "c").unwrap();
        assert_eq!(take, vec![2, 0, 0, 0]);
        assert_eq!(log, vec![FallbackMove { from_bin: 1, to_bin: 0, moved_count: 2 }]);
    }

    #[test]
    fn insufficient_pool_names_the_class() {
        let err = select(&pool(&[1, 1, 0, 0]), &plan(&[1, 1, 1, 0]), spec4(), 0).unwrap_err();
        match err {
            Error::InsufficientPool { class, available, ipc } => {
                assert_eq!((class.as_str(), available, ipc), ("c", 2, 3));
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn foreign_class_rejected() {
        let mut p = pool(&[3, 3, 3, 3]);
        p[0].class_label = ClassLabel::new("other");
        assert!(select(&p, &plan(&[1, 1, 1, 1]), spec4(), 0).is_err());
    }

    #[test]
    fn deterministic_and_order_independent() {
        let p = pool(&[20, 20, 20, 20]);
        let a = select(&p, &plan(&[2, 5, 3, 1]), spec4(), 99).unwrap();
        let mut rev = p.clone();
        rev.reverse();
        let b = select(&rev, &plan(&[2, 5, 3, 1]), spec4(), 99).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let c = select(&p, &plan(&[2, 5, 3, 1]), spec4(), 100).unwrap();
        assert_ne!(a.records, c.records);
    }

    #[test]
    fn no_duplicates_across_seeds() {
        let p = pool(&[7, 3, 9, 2]);
        for seed in 0..50 {
            let d = select(&p, &plan(&[4, 4, 4, 4]), spec4(), seed).unwrap();
            let mut ids: Vec<_> = d.records.iter().map(|r| &r.id).collect();
            ids.sort();
            ids.dedup();
            assert_eq!(ids.len(), 16);
        }
    }
}
