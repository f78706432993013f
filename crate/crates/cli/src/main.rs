use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use diffguide_core::io::{
    emit_histogram_plot, parse_manifest, run_bench, to_json_pretty, write_atomic, write_manifest, PlotPanel,
    Provenance, RunConfig,
};
use diffguide_core::transform::default_epsilon;
use diffguide_core::{
    build_histogram, fit_thresholds, generate_synthetic, histograms_by_class, sample_distilled, BinningSpec,
    DifficultyHistogram, Error, FitSource, ScoreRecord, StrategyKind, TransformDiagnostics, TransformParams,
};

#[derive(Parser)]
#[command(name = "diffguide", version, about = "Difficulty-guided sampling of distilled datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-class difficulty histograms of a manifest, with plots.
    Histogram {
        /// Score manifest (JSONL).
        manifest: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Fit clip thresholds per class of a manifest.
    Fit {
        manifest: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Include the full objective grid in the output.
        #[arg(long)]
        grid: bool,
    },
    /// Select a distilled subset from a pool.
    Sample {
        #[arg(long)]
        original: PathBuf,
        #[arg(long)]
        pool: PathBuf,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sampling: SamplingFlags,
    },
    /// Generate synthetic original, pool and test manifests.
    Synth {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        ipc: Option<usize>,
    },
    /// Run the strategy and pool-size sweeps on synthetic data.
    Bench {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (printed to stdout when omitted, where supported).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SamplingFlags {
    #[arg(long)]
    ipc: Option<usize>,
    #[arg(long)]
    strategy: Option<StrategyKind>,
    #[arg(long)]
    no_transform: bool,
    #[arg(long, value_parser = ["pool", "original"])]
    fit_on: Option<String>,
}

fn load_config(common: &Common) -> Result<RunConfig, Error> {
    let mut config = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn read(path: &Path) -> Result<Vec<u8>, Error> {
    std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_records(path: &Path) -> Result<(Vec<ScoreRecord>, Vec<u8>), Error> {
    let bytes = read(path)?;
    let records = parse_manifest(bytes.as_slice(), path)?;
    Ok((records, bytes))
}

fn out_dir(common: &Common) -> Result<Option<&Path>, Error> {
    if let Some(dir) = &common.out {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
    }
    Ok(common.out.as_deref())
}

fn emit_json<T: Serialize>(value: &T, dir: Option<&Path>, name: &str) -> Result<(), Error> {
    let text = to_json_pretty(value)?;
    match dir {
        Some(d) => write_atomic(&d.join(name), text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Class labels are free text; keep file names to a safe alphabet.
fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

#[derive(Serialize)]
struct HistogramEntry<'a> {
    class: &'a str,
    total: f64,
    mean_difficulty: Option<f64>,
    counts: &'a [f64],
}

fn histogram_cmd(manifest: &Path, common: &Common) -> Result<(), Error> {
    let config = load_config(common)?;
    let (records, bytes) = load_records(manifest)?;
    let spec = BinningSpec::new(config.bin_count)?;
    let hists = histograms_by_class(&records, spec)?;
    let dir = out_dir(common)?;
    let entries: Vec<HistogramEntry> = hists
        .values()
        .map(|h| HistogramEntry {
            class: h.class_label().as_str(),
            total: h.total(),
            mean_difficulty: mean_difficulty(&records, h),
            counts: h.counts(),
        })
        .collect();
    let provenance = Provenance::new("histogram", &config)?.with_input("manifest", &bytes);
    emit_json(&json!({ "provenance": provenance, "bin_count": spec.bin_count(), "classes": entries }), dir, "histograms.json")?;
    if let Some(d) = dir {
        let panels: Vec<PlotPanel> = hists
            .values()
            .map(|h| PlotPanel {
                mean: mean_difficulty(&records, h),
                ..PlotPanel::from_histogram(h.class_label().as_str(), h)
            })
            .collect();
        if !panels.is_empty() {
            emit_histogram_plot(&panels, 4, &d.join("histograms.svg"))?;
        }
    }
    Ok(())
}

/// Exact mean difficulty of the records behind `hist`.
fn mean_difficulty(records: &[ScoreRecord], hist: &DifficultyHistogram) -> Option<f64> {
    let ds: Vec<f64> = records
        .iter()
        .filter(|r| &r.class_label == hist.class_label())
        .map(|r| r.difficulty)
        .collect();
    (!ds.is_empty()).then(|| ds.iter().sum::<f64>() / ds.len() as f64)
}

#[derive(Serialize)]
struct FitEntry<'a> {
    class: &'a str,
    params: TransformParams,
    objective_value: f64,
    kl_to_original: f64,
    kl_to_uniform: f64,
    uniform_fallback: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    objective_grid: Option<Vec<Vec<Option<f64>>>>,
}

fn fit_cmd(manifest: &Path, common: &Common, grid: bool) -> Result<(), Error> {
    let config = load_config(common)?;
    let (records, bytes) = load_records(manifest)?;
    let spec = BinningSpec::new(config.bin_count)?;
    let hists = histograms_by_class(&records, spec)?;
    let mut fits: Vec<(String, TransformParams, TransformDiagnostics)> = Vec::new();
    for h in hists.values() {
        let eps = default_epsilon(h.total(), config.epsilon_scale);
        let (params, diag) = fit_thresholds(h, config.lambda, eps)?;
        fits.push((h.class_label().to_string(), params, diag));
    }
    let entries: Vec<FitEntry> = fits
        .iter()
        .map(|(class, params, d)| FitEntry {
            class,
            params: *params,
            objective_value: d.objective_value,
            kl_to_original: d.kl_to_original,
            kl_to_uniform: d.kl_to_uniform,
            uniform_fallback: d.uniform_fallback,
            objective_grid: grid.then(|| d.objective_grid.clone()),
        })
        .collect();
    let provenance = Provenance::new("fit", &config)?.with_input("manifest", &bytes);
    emit_json(&json!({ "provenance": provenance, "classes": entries }), out_dir(common)?, "fit.json")
}

fn sample_cmd(original: &Path, pool: &Path, common: &Common, flags: &SamplingFlags) -> Result<(), Error> {
    let mut config = load_config(common)?;
    if let Some(ipc) = flags.ipc {
        config.ipc = ipc;
    }
    if let Some(s) = flags.strategy {
        config.strategy = s;
    }
    if flags.no_transform {
        config.transform_enabled = false;
    }
    if let Some(f) = &flags.fit_on {
        config.fit_thresholds_on = f.parse::<FitSource>()?;
    }
    config.validate()?;
    let dir = common.out.as_deref().ok_or_else(|| Error::Config {
        field: "--out".into(),
        reason: "sample needs an output directory".into(),
    })?;
    out_dir(common)?;

    let (original_records, original_bytes) = load_records(original)?;
    let (pool_records, pool_bytes) = load_records(pool)?;
    let sampling = config.sampling_config()?;
    let manifest = sample_distilled(&original_records, &pool_records, &sampling)?;

    let provenance = Provenance::new("sample", &config)?
        .with_input("original", &original_bytes)
        .with_input("pool", &pool_bytes);
    emit_json(&json!({ "provenance": provenance, "selection": manifest }), Some(dir), "selection.json")?;
    write_manifest(dir.join("selected.jsonl"), &manifest.records)?;

    let plots = dir.join("plots");
    std::fs::create_dir_all(&plots).map_err(|source| Error::Io {
        path: plots.clone(),
        source,
    })?;
    let spec = sampling.binning;
    for class in &manifest.classes {
        let label = &class.class_label;
        let row = [
            ("original", &original_records),
            ("pool", &pool_records),
            ("distilled", &manifest.records),
        ]
        .into_iter()
        .map(|(name, recs)| {
            let h = build_histogram(recs, spec, label)?;
            Ok(PlotPanel {
                mean: mean_difficulty(recs, &h),
                ..PlotPanel::from_histogram(format!("{label} {name}"), &h)
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
        emit_histogram_plot(&row, 3, &plots.join(format!("{}.svg", file_stem(label.as_str()))))?;
    }
    Ok(())
}

fn synth_cmd(common: &Common, ipc: Option<usize>) -> Result<(), Error> {
    let mut config = load_config(common)?;
    if let Some(ipc) = ipc {
        config.ipc = ipc;
    }
    config.validate()?;
    let dir = common.out.as_deref().ok_or_else(|| Error::Config {
        field: "--out".into(),
        reason: "synth needs an output directory".into(),
    })?;
    out_dir(common)?;
    let spec = config.synthetic_spec()?;
    let data = generate_synthetic(&spec)?;
    write_manifest(dir.join("original.jsonl"), &data.original)?;
    write_manifest(dir.join("pool.jsonl"), &data.pool)?;
    write_manifest(dir.join("test.jsonl"), &data.test)?;
    let mut features = String::new();
    for (id, x) in data.features.sorted() {
        features.push_str(&serde_json::to_string(&json!({ "id": id, "x": x }))?);
        features.push('\n');
    }
    write_atomic(&dir.join("features.jsonl"), features.as_bytes())?;
    let counts: BTreeMap<&str, usize> = [
        ("original", data.original.len()),
        ("pool", data.pool.len()),
        ("test", data.test.len()),
    ]
    .into_iter()
    .collect();
    let provenance = Provenance::new("synth", &config)?;
    emit_json(&json!({ "provenance": provenance, "records": counts }), Some(dir), "synth.json")
}

fn bench_cmd(common: &Common) -> Result<(), Error> {
    let config = load_config(common)?;
    config.validate()?;
    let report = run_bench(&config.synthetic_spec()?, &config.bench, &config.sampling_config()?)?;
    let markdown = report.to_markdown();
    let provenance = Provenance::new("bench", &config)?;
    match out_dir(common)? {
        Some(d) => {
            emit_json(&json!({ "provenance": provenance, "report": report }), Some(d), "bench.json")?;
            write_atomic(&d.join("tables.md"), markdown.as_bytes())?;
        }
        None => print!("{markdown}\nprovenance: {}\n", serde_json::to_string(&provenance)?),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Histogram { manifest, common } => histogram_cmd(manifest, common),
        Command::Fit { manifest, common, grid } => fit_cmd(manifest, common, *grid),
        Command::Sample {
            original,
            pool,
            common,
            sampling,
        } => sample_cmd(original, pool, common, sampling),
        Command::Synth { common, ipc } => synth_cmd(common, *ipc),
        Command::Bench { common } => bench_cmd(common),
    }
}

fn error_json(e: &Error) -> serde_json::Value {
    let field = match e {
        Error::Config { field, .. } => Some(field.clone()),
        Error::InvalidParameter { name, .. } => Some((*name).to_owned()),
        Error::Parse { path, line, .. } | Error::DuplicateId { path, line, .. } => {
            Some(format!("{}:{line}", path.display()))
        }
        _ => None,
    };
    json!({ "error": { "kind": e.kind(), "message": e.to_string(), "field": field } })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::FAILURE
        }
    }
}
