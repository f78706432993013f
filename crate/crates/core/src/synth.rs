//! Desk-scale synthetic benchmark.
//!
//! Each class is a Gaussian cloud in feature space. A nearest-centroid
//! model, fitted on a reference draw of every class, plays the role of the
//! pretrained scorer: a point's difficulty is one minus the softmax
//! confidence it assigns to the point's true class. Candidates are drawn
//! along the segment from the class centre towards a random rival class and
//! accepted into per-bin quotas, so each split follows its Beta difficulty
//! law as closely as integer counts allow while every difficulty remains a
//! real classifier output.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::{
    build_histogram, count_into_bins, normalize_counts, total_variation, BinningSpec, ClassLabel, ScoreRecord,
};
use crate::rng::{derive_seed, rng_for, sample_without_replacement, DetRng};
use crate::sampling::{largest_remainder, sample_distilled, SamplingConfig, SelectionManifest, StrategyKind};

/// Acceptance target for the empirical difficulty histogram of a split.
pub const MAX_LAW_TV: f64 = 0.05;

const TAG_WORLD: u64 = 0x5744;
const TAG_ORIGINAL: u64 = 0x4f52;
const TAG_POOL: u64 = 0x504f;
const TAG_TEST: u64 = 0x5445;
const TAG_REPEAT: u64 = 0x5250;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaLaw {
    pub alpha: f64,
    pub beta: f64,
}

impl BetaLaw {
    pub const fn new(alpha: f64, beta: f64) -> Self {
        BetaLaw { alpha, beta }
    }

    /// Probability mass of each bin of `spec`.
    pub fn bin_masses(&self, spec: BinningSpec) -> Vec<f64> {
        let n = spec.bin_count();
        let cdf = |x: f64| statrs::function::beta::beta_reg(self.alpha, self.beta, x.clamp(0.0, 1.0));
        (0..n)
            .map(|k| {
                let (lo, hi) = spec.edges(k);
                (cdf(hi) - cdf(lo)).max(0.0)
            })
            .collect()
    }
}

/// Difficulty laws of one class. The test split follows `original`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DifficultyLaw {
    pub original: BetaLaw,
    pub pool: BetaLaw,
}

impl Default for DifficultyLaw {
    fn default() -> Self {
        DifficultyLaw {
            original: BetaLaw::new(2.0, 2.0),
            pool: BetaLaw::new(2.0, 8.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub class_count: usize,
    pub per_class_original: usize,
    pub per_class_test: usize,
    /// Pool size per class is `pool_factor * ipc`.
    pub ipc: usize,
    pub pool_factor: usize,
    /// One entry per class, or a single entry shared by all classes.
    pub difficulty_law: Vec<DifficultyLaw>,
    pub feature_dim: usize,
    /// Distance between class centres.
    pub class_separation: f64,
    pub bin_count: usize,
    /// Candidate budget per split and class, as a multiple of the split size.
    pub attempt_factor: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            class_count: 10,
            per_class_original: 500,
            per_class_test: 200,
            ipc: 10,
            pool_factor: crate::sampling::DEFAULT_POOL_FACTOR,
            difficulty_law: vec![DifficultyLaw::default()],
            feature_dim: 16,
            class_separation: 4.0,
            bin_count: crate::histogram::DEFAULT_BIN_COUNT,
            attempt_factor: 2000,
            seed: 0,
        }
    }
}

fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.class_count < 2 {
            return Err(invalid("class_count", "need at least 2 classes"));
        }
        for (name, v) in [
            ("per_class_original", self.per_class_original),
            ("per_class_test", self.per_class_test),
            ("ipc", self.ipc),
            ("pool_factor", self.pool_factor),
            ("feature_dim", self.feature_dim),
            ("attempt_factor", self.attempt_factor),
        ] {
            if v == 0 {
                return Err(invalid(name, "must be positive"));
            }
        }
        if !(self.class_separation.is_finite() && self.class_separation > 0.0) {
            return Err(invalid("class_separation", "must be positive"));
        }
        BinningSpec::new(self.bin_count)?;
        if !(self.difficulty_law.len() == 1 || self.difficulty_law.len() == self.class_count) {
            return Err(invalid(
                "difficulty_law",
                format!("expected 1 or {} entries, got {}", self.class_count, self.difficulty_law.len()),
            ));
        }
        for law in &self.difficulty_law {
            for b in [law.original, law.pool] {
                if !(b.alpha > 0.0 && b.beta > 0.0 && b.alpha.is_finite() && b.beta.is_finite()) {
                    return Err(invalid("difficulty_law", "Beta parameters must be positive"));
                }
            }
        }
        Ok(())
    }

    pub fn law(&self, class: usize) -> DifficultyLaw {
        if self.difficulty_law.len() == 1 {
            self.difficulty_law[0]
        } else {
            self.difficulty_law[class]
        }
    }

    pub fn binning(&self) -> BinningSpec {
        BinningSpec::new(self.bin_count).expect("validated")
    }

    pub fn pool_size(&self) -> usize {
        self.pool_factor * self.ipc
    }
}

pub fn class_label(class: usize) -> ClassLabel {
    ClassLabel(format!("class_{class:02}"))
}

/// Nearest-centroid classifier with softmax over `-d² / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct NearestCentroid {
    centroids: Vec<Vec<f64>>,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn mean(points: &[&[f64]], dim: usize) -> Vec<f64> {
    let mut acc = vec![0.0; dim];
    for p in points {
        for (a, x) in acc.iter_mut().zip(p.iter()) {
            *a += x;
        }
    }
    let n = points.len() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    acc
}

impl NearestCentroid {
    pub fn new(centroids: Vec<Vec<f64>>) -> Self {
        NearestCentroid { centroids }
    }

    /// Fits one centroid per class from `groups[k]`, the points of class k.
    pub fn fit(groups: &[Vec<&[f64]>], dim: usize) -> Result<Self> {
        let centroids = groups
            .iter()
            .enumerate()
            .map(|(k, pts)| {
                if pts.is_empty() {
                    Err(Error::EmptyClass(class_label(k).to_string()))
                } else {
                    Ok(mean(pts, dim))
                }
            })
            .collect::<Result<_>>()?;
        Ok(NearestCentroid { centroids })
    }

    pub fn centroids(&self) -> &[Vec<f64>] {
        &self.centroids
    }

    pub fn probabilities(&self, x: &[f64]) -> Vec<f64> {
        let logits: Vec<f64> = self.centroids.iter().map(|c| -0.5 * squared_distance(x, c)).collect();
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
        let z: f64 = exps.iter().sum();
        exps.into_iter().map(|e| e / z).collect()
    }

    /// `1 - P(class | x)`, clamped into [0, 1].
    pub fn difficulty(&self, x: &[f64], class: usize) -> f64 {
        (1.0 - self.probabilities(x)[class]).clamp(0.0, 1.0)
    }

    /// Index of the nearest centroid; ties go to the lower index.
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut best = (0, f64::INFINITY);
        for (k, c) in self.centroids.iter().enumerate() {
            let d = squared_distance(x, c);
            if d < best.1 {
                best = (k, d);
            }
        }
        best.0
    }
}

/// Feature vectors keyed by record id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureStore {
    pub dim: usize,
    features: HashMap<String, Vec<f64>>,
}

impl FeatureStore {
    pub fn new(dim: usize) -> Self {
        FeatureStore {
            dim,
            features: HashMap::new(),
        }
    }

    pub fn insert(&mut self, id: impl Into<String>, x: Vec<f64>) {
        debug_assert_eq!(x.len(), self.dim);
        self.features.insert(id.into(), x);
    }

    pub fn get(&self, id: &str) -> Result<&[f64]> {
        self.features
            .get(id)
            .map(Vec::as_slice)
            .ok_or_else(|| invalid("features", format!("no feature vector for `{id}`")))
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    /// Entries ordered by id.
    pub fn sorted(&self) -> Vec<(&str, &[f64])> {
        let mut v: Vec<(&str, &[f64])> = self.features.iter().map(|(k, x)| (k.as_str(), x.as_slice())).collect();
        v.sort_by(|a, b| a.0.cmp(b.0));
        v
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    fn extend(&mut self, other: FeatureStore) {
        self.features.extend(other.features);
    }
}

/// Class centres plus the scoring model shared by every split of one seed.
#[derive(Debug, Clone)]
pub struct SyntheticWorld {
    spec: SyntheticSpec,
    centers: Vec<Vec<f64>>,
    scorer: NearestCentroid,
}

impl SyntheticWorld {
    pub fn new(spec: &SyntheticSpec) -> Result<Self> {
        spec.validate()?;
        let mut rng = rng_for(spec.seed, &[TAG_WORLD]);
        let k = spec.class_count;
        let dim = spec.feature_dim;
        // Points at distance s/√2 from the origin along orthogonal axes are s apart.
        let radius = spec.class_separation / std::f64::consts::SQRT_2;
        let centers: Vec<Vec<f64>> = if dim >= k {
            (0..k)
                .map(|c| (0..dim).map(|i| if i == c { radius } else { 0.0 }).collect())
                .collect()
        } else {
            (0..k)
                .map(|_| {
                    let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
                    v.into_iter().map(|x| x * radius / norm).collect()
                })
                .collect()
        };
        let reference: Vec<Vec<Vec<f64>>> = centers
            .iter()
            .map(|c| (0..spec.per_class_original).map(|_| gaussian_around(c, &mut rng)).collect())
            .collect();
        let groups: Vec<Vec<&[f64]>> = reference
            .iter()
            .map(|pts| pts.iter().map(Vec::as_slice).collect())
            .collect();
        let scorer = NearestCentroid::fit(&groups, dim)?;
        Ok(SyntheticWorld {
            spec: spec.clone(),
            centers,
            scorer,
        })
    }

    pub fn spec(&self) -> &SyntheticSpec {
        &self.spec
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn scorer(&self) -> &NearestCentroid {
        &self.scorer
    }

    /// Plain Gaussian draws around the centre of `class`, no acceptance step.
    pub fn draw_cloud(&self, class: usize, count: usize, rng: &mut DetRng) -> Vec<Vec<f64>> {
        (0..count).map(|_| gaussian_around(&self.centers[class], rng)).collect()
    }

    fn candidate(&self, class: usize, rng: &mut DetRng) -> Vec<f64> {
        let k = self.spec.class_count;
        let mut rival = rng.random_range(0..k - 1);
        if rival >= class {
            rival += 1;
        }
        let u: f64 = rng.random();
        let own = &self.centers[class];
        let other = &self.centers[rival];
        own.iter()
            .zip(other)
            .map(|(a, b)| {
                let z: f64 = rng.sample(StandardNormal);
                a + u * (b - a) + z
            })
            .collect()
    }

    /// Draws `count` points of `class` whose difficulty histogram follows
    /// `law` via per-bin quotas.
    fn accepted_split(
        &self,
        class: usize,
        count: usize,
        law: BetaLaw,
        prefix: &str,
        rng: &mut DetRng,
    ) -> Result<(Vec<ScoreRecord>, FeatureStore)> {
        let spec = self.spec.binning();
        let masses = law.bin_masses(spec);
        let mut quota = largest_remainder(&masses, count)?;
        let mut remaining = count;
        let label = class_label(class);
        let mut records = Vec::with_capacity(count);
        let mut store = FeatureStore::new(self.spec.feature_dim);
        let budget = self.spec.attempt_factor.saturating_mul(count);
        let mut attempts = 0;
        while remaining > 0 {
            if attempts >= budget {
                let missing: Vec<usize> = quota.iter().enumerate().filter(|(_, q)| **q > 0).map(|(k, _)| k).collect();
                return Err(Error::SpecInfeasible(format!(
                    "class {class}: {remaining} of {count} `{prefix}` records unfilled after {budget} candidates \
                     (bins {missing:?}); try a looser Beta law or a different class separation"
                )));
            }
            attempts += 1;
            let x = self.candidate(class, rng);
            let d = self.scorer.difficulty(&x, class);
            let bin = spec.bin_of(d);
            if quota[bin] == 0 {
                continue;
            }
            quota[bin] -= 1;
            remaining -= 1;
            let id = format!("{prefix}-c{class:02}-{:05}", records.len());
            records.push(ScoreRecord::new(id.clone(), label.clone(), d));
            store.insert(id, x);
        }
        let tv = split_tv(&records, spec, &masses);
        let floor = quota_tv(&masses, count)?;
        if tv > MAX_LAW_TV.max(floor) + 1e-9 {
            return Err(Error::SpecInfeasible(format!(
                "class {class}: `{prefix}` histogram is {tv:.4} from its Beta law in total variation"
            )));
        }
        Ok((records, store))
    }

    fn split(&self, tag: u64, extra: &[u64], prefix: &str, count: usize, pick: fn(DifficultyLaw) -> BetaLaw) -> Result<Split> {
        let parts: Vec<(Vec<ScoreRecord>, FeatureStore)> = (0..self.spec.class_count)
            .into_par_iter()
            .map(|c| {
                let mut key = vec![tag, c as u64];
                key.extend_from_slice(extra);
                let mut rng = rng_for(self.spec.seed, &key);
                self.accepted_split(c, count, pick(self.spec.law(c)), prefix, &mut rng)
            })
            .collect::<Result<_>>()?;
        let mut out = Split {
            records: Vec::with_capacity(count * self.spec.class_count),
            features: FeatureStore::new(self.spec.feature_dim),
        };
        for (recs, store) in parts {
            out.records.extend(recs);
            out.features.extend(store);
        }
        Ok(out)
    }

    pub fn original(&self) -> Result<Split> {
        self.split(TAG_ORIGINAL, &[], "orig", self.spec.per_class_original, |l| l.original)
    }

    pub fn test(&self) -> Result<Split> {
        self.split(TAG_TEST, &[], "test", self.spec.per_class_test, |l| l.original)
    }

    /// Pool of `pool_factor * ipc` records per class. The stream is keyed by
    /// both numbers, so sweeps can vary them independently.
    pub fn pool(&self, ipc: usize, pool_factor: usize) -> Result<Split> {
        if ipc == 0 || pool_factor == 0 {
            return Err(invalid("pool", "ipc and pool_factor must be positive"));
        }
        self.split(
            TAG_POOL,
            &[ipc as u64, pool_factor as u64],
            &format!("pool{pool_factor}x{ipc}"),
            ipc * pool_factor,
            |l| l.pool,
        )
    }
}

fn gaussian_around(center: &[f64], rng: &mut DetRng) -> Vec<f64> {
    center
        .iter()
        .map(|c| {
            let z: f64 = rng.sample(StandardNormal);
            c + z
        })
        .collect()
}

fn split_tv(records: &[ScoreRecord], spec: BinningSpec, masses: &[f64]) -> f64 {
    let counts = count_into_bins(records.iter().map(|r| r.difficulty), spec.bin_count());
    let p = normalize_counts(&counts, None).expect("non-empty split");
    let q = normalize_counts(masses, None).expect("Beta masses sum to 1");
    total_variation(&p, &q).expect("same length")
}

/// Smallest total variation an integer histogram of `count` items can reach.
fn quota_tv(masses: &[f64], count: usize) -> Result<f64> {
    let q = largest_remainder(masses, count)?;
    let p: Vec<f64> = q.iter().map(|&c| c as f64 / count as f64).collect();
    let m = normalize_counts(masses, None)?;
    total_variation(&p, &m)
}

/// Records of one split together with their features.
#[derive(Debug, Clone)]
pub struct Split {
    pub records: Vec<ScoreRecord>,
    pub features: FeatureStore,
}

#[derive(Debug, Clone)]
pub struct SyntheticData {
    pub original: Vec<ScoreRecord>,
    pub pool: Vec<ScoreRecord>,
    pub test: Vec<ScoreRecord>,
    pub features: FeatureStore,
}

/// Original, pool and held-out test splits for `spec`, with features.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticData> {
    let world = SyntheticWorld::new(spec)?;
    let original = world.original()?;
    let pool = world.pool(spec.ipc, spec.pool_factor)?;
    let test = world.test()?;
    let mut features = original.features;
    features.extend(pool.features);
    features.extend(test.features);
    Ok(SyntheticData {
        original: original.records,
        pool: pool.records,
        test: test.records,
        features,
    })
}

fn class_index(labels: &BTreeMap<&ClassLabel, usize>, label: &ClassLabel) -> Result<usize> {
    labels
        .get(label)
        .copied()
        .ok_or_else(|| Error::EmptyClass(label.to_string()))
}

/// Top-1 accuracy on `test` of a nearest-centroid model fitted on `selected`.
///
/// Every class that occurs in `test` must have at least one selected record.
pub fn evaluate_downstream(selected: &[ScoreRecord], features: &FeatureStore, test: &[ScoreRecord]) -> Result<f64> {
    if test.is_empty() {
        return Err(invalid("test", "test split is empty"));
    }
    let mut labels: BTreeMap<&ClassLabel, usize> = BTreeMap::new();
    for r in test.iter().chain(selected) {
        let next = labels.len();
        labels.entry(&r.class_label).or_insert(next);
    }
    // Renumber in label order so ties resolve the same way for any input order.
    for (i, v) in labels.values_mut().enumerate() {
        *v = i;
    }
    let mut groups: Vec<Vec<&[f64]>> = vec![Vec::new(); labels.len()];
    for r in selected {
        groups[class_index(&labels, &r.class_label)?].push(features.get(&r.id)?);
    }
    for (label, &i) in &labels {
        if groups[i].is_empty() {
            return Err(Error::EmptyClass(label.to_string()));
        }
    }
    let model = NearestCentroid::fit(&groups, features.dim)?;
    let mut correct = 0usize;
    for r in test {
        if model.predict(features.get(&r.id)?) == class_index(&labels, &r.class_label)? {
            correct += 1;
        }
    }
    Ok(correct as f64 / test.len() as f64)
}

/// `ipc` records per class drawn uniformly from `pool`, ignoring difficulty.
pub fn random_subset(pool: &[ScoreRecord], ipc: usize, seed: u64) -> Result<Vec<ScoreRecord>> {
    let mut by_class: BTreeMap<&ClassLabel, Vec<&ScoreRecord>> = BTreeMap::new();
    for r in pool {
        by_class.entry(&r.class_label).or_default().push(r);
    }
    let mut out = Vec::new();
    for (label, mut members) in by_class {
        if members.len() < ipc {
            return Err(Error::InsufficientPool {
                class: label.to_string(),
                available: members.len(),
                ipc,
            });
        }
        members.sort_by(|a, b| a.id.cmp(&b.id));
        let mut rng = rng_for(seed, &[crate::rng::fnv1a64(label.as_str().as_bytes()), u64::MAX]);
        out.extend(sample_without_replacement(&mut rng, &mut members, ipc).iter().map(|r| (*r).clone()));
    }
    Ok(out)
}

/// Mean over classes of the total variation between the selected records'
/// histogram and each class's target weights.
pub fn mean_tv_to_target(manifest: &SelectionManifest, selected: &[ScoreRecord]) -> Result<f64> {
    let spec = BinningSpec::new(manifest.bin_count)?;
    let mut sum = 0.0;
    for class in &manifest.classes {
        let h = build_histogram(selected, spec, &class.class_label)?;
        if h.total() == 0.0 {
            return Err(Error::EmptyClass(class.class_label.to_string()));
        }
        let p = normalize_counts(h.counts(), None)?;
        sum += total_variation(&p, &class.target.weights)?;
    }
    Ok(sum / manifest.classes.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchResult {
    pub strategy: StrategyKind,
    pub ipc: usize,
    pub pool_factor: usize,
    pub accuracy_mean: f64,
    /// Unbiased sample standard deviation over `repeats` runs.
    pub accuracy_std: f64,
    pub tv_distance_to_target: f64,
    pub repeats: usize,
    pub accuracies: Vec<f64>,
}

/// Mean and unbiased sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub const MIN_REPEATS: usize = 3;

/// Repeat-level seed; every split and selection of repeat `r` derives from it.
pub fn repeat_seed(base: u64, repeat: usize) -> u64 {
    derive_seed(base, &[TAG_REPEAT, repeat as u64])
}

struct Outcome {
    accuracy: f64,
    tv: f64,
}

/// Full factorial sweep over strategies × ipcs × pool factors, each cell
/// repeated with `repeats` independent seeds.
///
/// Results are ordered by (pool factor, ipc, strategy) regardless of
/// evaluation order. `base` supplies everything except strategy, ipc, pool
/// factor and seed.
pub fn run_sweep(
    spec: &SyntheticSpec,
    strategies: &[StrategyKind],
    ipcs: &[usize],
    pool_factors: &[usize],
    repeats: usize,
    base: &SamplingConfig,
) -> Result<Vec<BenchResult>> {
    if repeats < MIN_REPEATS {
        return Err(invalid("repeats", format!("need at least {MIN_REPEATS}, got {repeats}")));
    }
    if strategies.is_empty() || ipcs.is_empty() || pool_factors.is_empty() {
        return Err(invalid("sweep", "strategies, ipcs and pool factors must be non-empty"));
    }
    spec.validate()?;

    // Keyed by (strategy, ipc, pool_factor) -> per-repeat outcomes.
    let per_repeat: Vec<BTreeMap<(StrategyKind, usize, usize), Outcome>> = (0..repeats)
        .into_par_iter()
        .map(|r| {
            let seed = repeat_seed(spec.seed, r);
            let world = SyntheticWorld::new(&SyntheticSpec { seed, ..spec.clone() })?;
            let original = world.original()?;
            let test = world.test()?;
            let mut out = BTreeMap::new();
            for &pf in pool_factors {
                for &ipc in ipcs {
                    let pool = world.pool(ipc, pf)?;
                    let mut features = original.features.clone();
                    features.extend(test.features.clone());
                    features.extend(pool.features.clone());
                    for &strategy in strategies {
                        let config = SamplingConfig {
                            ipc,
                            pool_factor: pf,
                            strategy,
                            seed,
                            binning: world.spec().binning(),
                            ..base.clone()
                        };
                        let manifest = sample_distilled(&original.records, &pool.records, &config)?;
                        let accuracy = evaluate_downstream(&manifest.records, &features, &test.records)?;
                        let tv = mean_tv_to_target(&manifest, &manifest.records)?;
                        out.insert((strategy, ipc, pf), Outcome { accuracy, tv });
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let mut results = Vec::new();
    for &pf in pool_factors {
        for &ipc in ipcs {
            for &strategy in strategies {
                let key = (strategy, ipc, pf);
                let accuracies: Vec<f64> = per_repeat.iter().map(|m| m[&key].accuracy).collect();
                let tvs: Vec<f64> = per_repeat.iter().map(|m| m[&key].tv).collect();
                let (accuracy_mean, accuracy_std) = mean_std(&accuracies);
                results.push(BenchResult {
                    strategy,
                    ipc,
                    pool_factor: pf,
                    accuracy_mean,
                    accuracy_std,
                    tv_distance_to_target: mean_std(&tvs).0,
                    repeats,
                    accuracies,
                });
            }
        }
    }
    Ok(results)
}
