//! Accuracy tables from sweep results.
//!
//! Two layouts: strategies as rows at a fixed pool factor, and pool factors
//! as rows for a fixed strategy. Columns are IPC values in ascending order.
//! Cells show `mean ± std` accuracy in percent.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::{SamplingConfig, StrategyKind};
use crate::synth::{run_sweep, BenchResult, SyntheticSpec};

use super::config::BenchSection;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub mean: f64,
    pub std: f64,
    pub repeats: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub title: String,
    pub row_header: String,
    pub columns: Vec<usize>,
    pub rows: Vec<(String, Vec<Option<Cell>>)>,
}

impl ResultTable {
    pub fn row_labels(&self) -> Vec<&str> {
        self.rows.iter().map(|(l, _)| l.as_str()).collect()
    }

    /// GitHub-flavoured markdown.
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        writeln!(s, "### {}\n", self.title).unwrap();
        write!(s, "| {} |", self.row_header).unwrap();
        for ipc in &self.columns {
            write!(s, " IPC = {ipc} |").unwrap();
        }
        s.push('\n');
        s.push_str("|---|");
        for _ in &self.columns {
            s.push_str("---|");
        }
        s.push('\n');
        for (label, cells) in &self.rows {
            write!(s, "| {label} |").unwrap();
            for c in cells {
                match c {
                    Some(c) => write!(s, " {:.1} ± {:.1} |", 100.0 * c.mean, 100.0 * c.std).unwrap(),
                    None => s.push_str(" n/a |"),
                }
            }
            s.push('\n');
        }
        s
    }
}

fn ipcs_of<'a>(results: impl Iterator<Item = &'a BenchResult>) -> Vec<usize> {
    let mut v: Vec<usize> = results.map(|r| r.ipc).collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn cell(results: &[BenchResult], strategy: StrategyKind, ipc: usize, pool_factor: usize) -> Option<Cell> {
    results
        .iter()
        .find(|r| r.strategy == strategy && r.ipc == ipc && r.pool_factor == pool_factor)
        .map(|r| Cell {
            mean: r.accuracy_mean,
            std: r.accuracy_std,
            repeats: r.repeats,
        })
}

/// One row per strategy in the fixed order hill, ground, slope, cliff,
/// scale, at `pool_factor`.
pub fn strategy_table(results: &[BenchResult], pool_factor: usize) -> ResultTable {
    let columns = ipcs_of(results.iter().filter(|r| r.pool_factor == pool_factor));
    let rows = StrategyKind::ALL
        .iter()
        .map(|&k| {
            let cells = columns.iter().map(|&ipc| cell(results, k, ipc, pool_factor)).collect();
            (capitalize(k.as_str()), cells)
        })
        .collect();
    ResultTable {
        title: format!("Accuracy by sampling distribution (pool {pool_factor} × IPC)"),
        row_header: "Distribution".into(),
        columns,
        rows,
    }
}

/// One row per pool factor present in `results` for `strategy`, ascending.
pub fn pool_factor_table(results: &[BenchResult], strategy: StrategyKind) -> ResultTable {
    let own: Vec<&BenchResult> = results.iter().filter(|r| r.strategy == strategy).collect();
    let columns = ipcs_of(own.iter().copied());
    let mut factors: Vec<usize> = own.iter().map(|r| r.pool_factor).collect();
    factors.sort_unstable();
    factors.dedup();
    let rows = factors
        .iter()
        .map(|&pf| {
            let cells = columns.iter().map(|&ipc| cell(results, strategy, ipc, pf)).collect();
            (format!("{pf} × IPC"), cells)
        })
        .collect();
    ResultTable {
        title: format!("Accuracy by pool size ({strategy})"),
        row_header: "Size".into(),
        columns,
        rows,
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Warn,
}

/// Whether scale keeps up with the predefined shapes at one IPC.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingFlag {
    pub ipc: usize,
    pub pool_factor: usize,
    pub scale_mean: f64,
    /// Predefined strategies whose `mean - std` exceeds the scale mean.
    pub beaten_by: Vec<StrategyKind>,
    pub verdict: Verdict,
}

impl OrderingFlag {
    pub fn line(&self) -> String {
        let verdict = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Warn => "WARN",
        };
        if self.beaten_by.is_empty() {
            format!(
                "{verdict} ipc={} pool={}x: scale {:.1}% >= every predefined mean - 1 std",
                self.ipc,
                self.pool_factor,
                100.0 * self.scale_mean
            )
        } else {
            let names: Vec<&str> = self.beaten_by.iter().map(|k| k.as_str()).collect();
            format!(
                "{verdict} ipc={} pool={}x: scale {:.1}% below mean - 1 std of {}",
                self.ipc,
                self.pool_factor,
                100.0 * self.scale_mean,
                names.join(", ")
            )
        }
    }
}

/// Compares scale against each predefined strategy at every IPC of the
/// strategy table: the flag passes when the scale mean is at least each
/// predefined mean minus that strategy's own standard deviation.
pub fn ordering_flags(results: &[BenchResult], pool_factor: usize) -> Result<Vec<OrderingFlag>> {
    let columns = ipcs_of(results.iter().filter(|r| r.pool_factor == pool_factor));
    let mut flags = Vec::new();
    for ipc in columns {
        let scale = cell(results, StrategyKind::Scale, ipc, pool_factor).ok_or_else(|| Error::InvalidParameter {
            name: "results",
            reason: format!("no scale result at ipc {ipc}, pool factor {pool_factor}"),
        })?;
        let beaten_by: Vec<StrategyKind> = StrategyKind::PREDEFINED
            .iter()
            .copied()
            .filter(|&k| matches!(cell(results, k, ipc, pool_factor), Some(c) if scale.mean < c.mean - c.std))
            .collect();
        flags.push(OrderingFlag {
            ipc,
            pool_factor,
            scale_mean: scale.mean,
            verdict: if beaten_by.is_empty() { Verdict::Pass } else { Verdict::Warn },
            beaten_by,
        });
    }
    Ok(flags)
}

/// Both sweeps of the `bench` command with their tables and ordering flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    /// Every configured strategy at `base.pool_factor`.
    pub strategy_results: Vec<BenchResult>,
    /// Scale at every configured pool factor.
    pub pool_results: Vec<BenchResult>,
    pub strategy_table: ResultTable,
    pub pool_table: ResultTable,
    pub ordering: Vec<OrderingFlag>,
}

impl BenchReport {
    pub fn to_markdown(&self) -> String {
        let mut s = self.strategy_table.to_markdown();
        s.push('\n');
        s.push_str(&self.pool_table.to_markdown());
        s.push_str("\nOrdering check (scale vs predefined):\n\n");
        for f in &self.ordering {
            writeln!(s, "- {}", f.line()).unwrap();
        }
        s
    }
}

pub fn run_bench(spec: &SyntheticSpec, bench: &BenchSection, base: &SamplingConfig) -> Result<BenchReport> {
    let mut strategies = bench.strategies.clone();
    if !strategies.contains(&StrategyKind::Scale) {
        strategies.push(StrategyKind::Scale);
    }
    let strategy_results = run_sweep(spec, &strategies, &bench.ipcs, &[base.pool_factor], bench.repeats, base)?;
    let pool_results = run_sweep(spec, &[StrategyKind::Scale], &bench.ipcs, &bench.pool_factors, bench.repeats, base)?;
    Ok(BenchReport {
        strategy_table: strategy_table(&strategy_results, base.pool_factor),
        pool_table: pool_factor_table(&pool_results, StrategyKind::Scale),
        ordering: ordering_flags(&strategy_results, base.pool_factor)?,
        strategy_results,
        pool_results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(strategy: StrategyKind, ipc: usize, pool_factor: usize, mean: f64, std: f64) -> BenchResult {
        BenchResult {
            strategy,
            ipc,
            pool_factor,
            accuracy_mean: mean,
            accuracy_std: std,
            tv_distance_to_target: 0.0,
            repeats: 3,
            accuracies: vec![mean; 3],
        }
    }

    fn grid() -> Vec<BenchResult> {
        let mut v = Vec::new();
        for &ipc in &[50, 10] {
            for k in StrategyKind::ALL {
                v.push(result(k, ipc, 5, 0.5, 0.01));
            }
            for pf in [6, 2, 3] {
                v.push(result(StrategyKind::Scale, ipc, pf, 0.4, 0.02));
            }
        }
        v
    }

    #[test]
    fn strategy_rows_in_fixed_order() {
        let t = strategy_table(&grid(), 5);
        assert_eq!(t.row_labels(), vec!["Hill", "Ground", "Slope", "Cliff", "Scale"]);
        assert_eq!(t.columns, vec![10, 50]);
        let md = t.to_markdown();
        assert!(md.contains("| Distribution | IPC = 10 | IPC = 50 |"));
        assert!(md.contains("| Hill | 50.0 ± 1.0 | 50.0 ± 1.0 |"));
    }

    #[test]
    fn missing_strategy_still_has_a_row() {
        let only_scale: Vec<_> = grid().into_iter().filter(|r| r.strategy == StrategyKind::Scale).collect();
        let t = strategy_table(&only_scale, 5);
        assert_eq!(t.rows.len(), 5);
        assert!(t.to_markdown().contains("| Hill | n/a | n/a |"));
    }

    #[test]
    fn pool_rows_ascending() {
        let t = pool_factor_table(&grid(), StrategyKind::Scale);
        assert_eq!(t.row_labels(), vec!["2 × IPC", "3 × IPC", "5 × IPC", "6 × IPC"]);
        assert_eq!(t.rows[2].1[0].unwrap().mean, 0.5);
    }

    #[test]
    fn ordering_flag_uses_predefined_std() {
        let mut v = grid();
        // Scale 0.5; hill 0.52 ± 0.01 beats it, slope 0.505 ± 0.01 does not.
        for r in v.iter_mut().filter(|r| r.ipc == 10 && r.pool_factor == 5) {
            match r.strategy {
                StrategyKind::Hill => r.accuracy_mean = 0.52,
                StrategyKind::Slope => r.accuracy_mean = 0.505,
                _ => {}
            }
        }
        let flags = ordering_flags(&v, 5).unwrap();
        assert_eq!(flags.len(), 2);
        assert_eq!(flags[0].verdict, Verdict::Warn);
        assert_eq!(flags[0].beaten_by, vec![StrategyKind::Hill]);
        assert!(flags[0].line().starts_with("WARN ipc=10"));
        assert_eq!(flags[1].verdict, Verdict::Pass);
        assert!(flags[1].line().starts_with("PASS ipc=50"));
    }

    #[test]
    fn ordering_needs_scale() {
        let v: Vec<_> = grid().into_iter().filter(|r| r.strategy != StrategyKind::Scale).collect();
        assert!(ordering_flags(&v, 5).is_err());
    }
}
