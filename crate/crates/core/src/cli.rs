//! Command-line front end. The binary only parses arguments and calls
//! [`run`]; everything here is usable as a library too.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::estimator::{
    benchmark, coverage_check, estimate_from_periodogram, with_threads, BenchmarkConfig, DrawInversion, EstimateConfig,
    DEFAULT_SAMPLES, DEFAULT_SPINS,
};
use crate::io::{self, Meta};
use crate::lsw::{raw_wavelet_periodogram, simulate_lsw, single_scale_spectrum, test_spectrum, Ews};
use crate::wavelet::{Family, InnerProductMatrix, WaveletFilter};

pub const THREADS_ENV: &str = "LSWSPEC_THREADS";
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_LEN: usize = 1024;
/// Signal scale of the default coverage spectrum.
pub const DEFAULT_COVERAGE_SCALE: usize = crate::lsw::TEST_SPECTRUM_MID_SCALE;

#[derive(Debug, Parser)]
#[command(name = "lswspec", version, about = "Bayesian Haar-Fisz estimation of evolutionary wavelet spectra")]
pub struct RunConfig {
    /// Worker threads for estimation and benchmarks (default: all cores).
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate an LSW series from an EWS file (or the built-in test spectrum).
    Simulate(SimulateArgs),
    /// Write the raw wavelet periodogram of a series as a dense J×T CSV.
    Periodogram(PeriodogramArgs),
    /// Estimate the EWS with credible bands; writes PREFIX.json and PREFIX.csv.
    Estimate(EstimateArgs),
    /// Monte Carlo AMSE comparison across smoothing filters.
    Benchmark(BenchmarkArgs),
    /// Empirical per-scale coverage of the credible bands.
    Coverage(CoverageArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Pad {
    Reflect,
    Zero,
}

/// How a series is prepared before analysis.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Series CSV: one value per line, optional header.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    /// Pad a non-dyadic series up to the next power of two.
    #[arg(long, value_enum, conflicts_with = "truncate")]
    pub pad: Option<Pad>,
    /// Keep only the first 2^floor(log2 n) values of a non-dyadic series.
    #[arg(long)]
    pub truncate: bool,
    /// Analyse first differences.
    #[arg(long)]
    pub diff: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// EWS CSV (long `scale,location,value` or dense J×T).
    #[arg(long, value_name = "PATH", conflicts_with = "test_spectrum")]
    pub ews: Option<PathBuf>,
    /// Use the built-in test spectrum of length --len instead of a file.
    #[arg(long)]
    pub test_spectrum: bool,
    #[arg(long, default_value_t = DEFAULT_LEN)]
    pub len: usize,
    /// Synthesis wavelet.
    #[arg(long, default_value = "haar")]
    pub analysis: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output path, `-` for standard output.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct PeriodogramArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "haar")]
    pub analysis: String,
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "haar")]
    pub analysis: String,
    #[arg(long = "smooth", default_value = "la6")]
    pub smoothing: String,
    #[arg(long, default_value_t = DEFAULT_SPINS)]
    pub spins: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Credible levels, comma separated.
    #[arg(long = "levels", value_delimiter = ',', default_values_t = [0.5, 0.9])]
    pub credible_levels: Vec<f64>,
    /// Reject and redraw posterior draws with inconsistent Fisz ratios
    /// instead of clamping them.
    #[arg(long)]
    pub strict_draws: bool,
    /// Output prefix; `.json` and `.csv` are appended.
    #[arg(long, value_name = "PREFIX")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    /// EWS CSV to simulate from (default: see the command help).
    #[arg(long, value_name = "PATH")]
    pub ews: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_LEN)]
    pub len: usize,
}

#[derive(Debug, Clone, Args)]
pub struct BenchmarkArgs {
    /// Spectrum to simulate from; defaults to the built-in test spectrum.
    #[command(flatten)]
    pub spectrum: SpectrumArgs,
    #[arg(long, default_value_t = 100)]
    pub replicates: usize,
    #[arg(long, default_value = "haar")]
    pub analysis: String,
    /// Smoothing filters, comma separated (default: EP1-10 and LA4-10).
    #[arg(long = "smooth", value_delimiter = ',')]
    pub smoothing: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_SPINS)]
    pub spins: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Table CSV; `.rows.csv` and `.timing.csv` siblings are written too.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct CoverageArgs {
    /// Spectrum to simulate from; defaults to a sin² bump of power
    /// --power at scale --scale.
    #[command(flatten)]
    pub spectrum: SpectrumArgs,
    #[arg(long, default_value_t = DEFAULT_COVERAGE_SCALE)]
    pub scale: usize,
    #[arg(long, default_value_t = 1.0)]
    pub power: f64,
    #[arg(long, default_value_t = 50)]
    pub replicates: usize,
    #[arg(long, default_value = "haar")]
    pub analysis: String,
    #[arg(long = "smooth", default_value = "la6")]
    pub smoothing: String,
    #[arg(long, default_value_t = DEFAULT_SPINS)]
    pub spins: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long = "levels", value_delimiter = ',', default_values_t = [0.5, 0.9])]
    pub credible_levels: Vec<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

fn kv(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

fn check_input(path: &Path) -> Result<()> {
    if !path.is_file() {
        return Err(Error::InvalidParameter(format!("input file {} does not exist", path.display())));
    }
    Ok(())
}

fn check_output(path: &Path) -> Result<()> {
    if path == Path::new("-") {
        return Ok(());
    }
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => Err(Error::InvalidParameter(format!(
            "output directory {} does not exist",
            dir.display()
        ))),
        _ => Ok(()),
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

// `table.csv` → `table.rows.csv`
fn sibling(path: &Path, tag: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{tag}.csv"))
}

fn parse_levels(levels: &[f64]) -> Result<Vec<f64>> {
    if levels.is_empty() {
        return Err(Error::InvalidParameter("at least one credible level is required".into()));
    }
    let mut v = levels.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    Ok(v)
}

/// Reflect-pads (mirror without repeating the end point), zero-pads or
/// truncates `x` to a power of two.
pub fn make_dyadic(x: &[f64], pad: Option<Pad>, truncate: bool) -> Result<Vec<f64>> {
    let n = x.len();
    if n >= 2 && n.is_power_of_two() {
        return Ok(x.to_vec());
    }
    if n < 2 {
        return Err(Error::NonDyadicLength(n));
    }
    if truncate {
        return Ok(x[..1 << n.ilog2()].to_vec());
    }
    let target = n.next_power_of_two();
    match pad {
        Some(Pad::Zero) => {
            let mut v = x.to_vec();
            v.resize(target, 0.0);
            Ok(v)
        }
        Some(Pad::Reflect) => {
            // Period of the reflected extension x0..x_{n-1}, x_{n-2}..x1.
            let period = 2 * n - 2;
            Ok((0..target)
                .map(|i| {
                    let r = i % period;
                    x[if r < n { r } else { period - r }]
                })
                .collect())
        }
        None => Err(Error::NonDyadicLength(n)),
    }
}

/// Reads, differences and pads/truncates the input series, recording
/// what was done in `meta`.
pub fn prepare_series(args: &InputArgs, meta: &mut Meta) -> Result<Vec<f64>> {
    let (raw, _) = io::read_series(&args.input)?;
    meta.push(kv("input", args.input.display()));
    meta.push(kv("input_len", raw.len()));
    let x = if args.diff {
        raw.windows(2).map(|w| w[1] - w[0]).collect()
    } else {
        raw
    };
    meta.push(kv("diff", args.diff));
    let y = make_dyadic(&x, args.pad, args.truncate)?;
    let adjust = match (args.pad, args.truncate) {
        _ if y.len() == x.len() => "none".to_string(),
        (_, true) => "truncate".to_string(),
        (Some(Pad::Reflect), _) => "pad-reflect".to_string(),
        (Some(Pad::Zero), _) => "pad-zero".to_string(),
        (None, false) => unreachable!("make_dyadic rejects unadjusted non-dyadic input"),
    };
    meta.push(kv("length_adjustment", adjust));
    meta.push(kv("analysed_len", y.len()));
    Ok(y)
}

fn parse_filter(spec: &str) -> Result<WaveletFilter> {
    spec.parse()
}

/// Every supported smoothing filter in table order: EP1..EP10, LA4..LA10.
pub fn default_filter_grid() -> Vec<WaveletFilter> {
    [Family::ExtremalPhase, Family::LeastAsymmetric]
        .into_iter()
        .flat_map(|f| f.supported_moments().map(move |vm| WaveletFilter::new(f, vm)))
        .collect::<Result<_>>()
        .expect("supported filters construct")
}

fn load_spectrum(args: &SpectrumArgs, default: impl FnOnce(usize) -> Result<Ews>, meta: &mut Meta) -> Result<Ews> {
    match &args.ews {
        Some(p) => {
            meta.push(kv("ews", p.display()));
            Ok(io::read_ews(p)?.0)
        }
        None => {
            meta.push(kv("len", args.len));
            default(args.len)
        }
    }
}

/// Runs one command; returns the paths written (`-` for standard output).
/// Inputs and outputs are validated before any computation starts.
pub fn run(config: &RunConfig) -> Result<Vec<PathBuf>> {
    with_threads(config.threads, || run_command(&config.command))?
}

fn run_command(command: &Command) -> Result<Vec<PathBuf>> {
    match command {
        Command::Simulate(a) => simulate_cmd(a),
        Command::Periodogram(a) => periodogram_cmd(a),
        Command::Estimate(a) => estimate_cmd(a),
        Command::Benchmark(a) => benchmark_cmd(a),
        Command::Coverage(a) => coverage_cmd(a),
    }
}

fn simulate_cmd(a: &SimulateArgs) -> Result<Vec<PathBuf>> {
    let filter = parse_filter(&a.analysis)?;
    check_output(&a.out)?;
    let mut meta = vec![kv("command", "simulate")];
    let ews = match (&a.ews, a.test_spectrum) {
        (Some(p), _) => {
            check_input(p)?;
            meta.push(kv("ews", p.display()));
            io::read_ews(p)?.0
        }
        (None, true) => {
            meta.push(kv("ews", "test_spectrum"));
            meta.push(kv("len", a.len));
            test_spectrum(a.len)?
        }
        (None, false) => return Err(Error::InvalidParameter("give --ews PATH or --test-spectrum".into())),
    };
    meta.push(kv("analysis", filter.name()));
    meta.push(kv("seed", a.seed));
    let x = simulate_lsw(&ews, &filter, a.seed)?;
    io::write_series(&a.out, &x, &meta)?;
    Ok(vec![a.out.clone()])
}

fn periodogram_cmd(a: &PeriodogramArgs) -> Result<Vec<PathBuf>> {
    let filter = parse_filter(&a.analysis)?;
    check_input(&a.input.input)?;
    check_output(&a.out)?;
    let mut meta = vec![kv("command", "periodogram")];
    let x = prepare_series(&a.input, &mut meta)?;
    meta.push(kv("analysis", filter.name()));
    let p = raw_wavelet_periodogram(&x, &filter)?;
    io::write_dense(&a.out, &p.values, &meta)?;
    Ok(vec![a.out.clone()])
}

fn estimate_cmd(a: &EstimateArgs) -> Result<Vec<PathBuf>> {
    let analysis = parse_filter(&a.analysis)?;
    let smoothing = parse_filter(&a.smoothing)?;
    let levels = parse_levels(&a.credible_levels)?;
    check_input(&a.input.input)?;
    let (json, csv) = (with_suffix(&a.out, ".json"), with_suffix(&a.out, ".csv"));
    check_output(&json)?;
    let mut meta = vec![kv("command", "estimate")];
    let x = prepare_series(&a.input, &mut meta)?;
    let cfg = EstimateConfig {
        analysis,
        smoothing,
        spins: a.spins,
        samples: a.samples,
        seed: a.seed,
        credible_levels: levels.clone(),
        draw_inversion: if a.strict_draws {
            DrawInversion::Strict
        } else {
            DrawInversion::Clamp
        },
        ..Default::default()
    };
    meta.extend([
        kv("analysis", cfg.analysis.name()),
        kv("smoothing", cfg.smoothing.name()),
        kv("spins", cfg.spins),
        kv("samples", cfg.samples),
        kv("seed", cfg.seed),
        kv("levels", levels.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")),
        kv("strict_draws", a.strict_draws),
    ]);
    let p = raw_wavelet_periodogram(&x, &cfg.analysis)?;
    let m = InnerProductMatrix::new(&cfg.analysis, p.levels())?;
    let est = estimate_from_periodogram(&p, &m, &cfg)?;
    io::write_estimate_json(&json, &est, &meta)?;
    io::write_estimate_csv(&csv, &est, &meta)?;
    Ok(vec![json, csv])
}

fn benchmark_cmd(a: &BenchmarkArgs) -> Result<Vec<PathBuf>> {
    let analysis = parse_filter(&a.analysis)?;
    let smoothing = if a.smoothing.is_empty() {
        default_filter_grid()
    } else {
        a.smoothing.iter().map(|s| parse_filter(s)).collect::<Result<_>>()?
    };
    if let Some(p) = &a.spectrum.ews {
        check_input(p)?;
    }
    check_output(&a.out)?;
    let mut meta = vec![kv("command", "benchmark")];
    let spectrum = load_spectrum(&a.spectrum, test_spectrum, &mut meta)?;
    meta.extend([
        kv("replicates", a.replicates),
        kv("analysis", analysis.name()),
        kv("smoothing", smoothing.iter().map(WaveletFilter::name).collect::<Vec<_>>().join(" ")),
        kv("spins", a.spins),
        kv("seed", a.seed),
    ]);
    let report = benchmark(&BenchmarkConfig {
        replicates: a.replicates,
        spectrum,
        analysis,
        smoothing,
        spins: a.spins,
        seed: a.seed,
    })?;
    let (rows, timing) = (sibling(&a.out, "rows"), sibling(&a.out, "timing"));
    io::write_text(&a.out, &io::format_benchmark_table(&report, &meta))?;
    io::write_text(&rows, &io::format_benchmark_rows(&report, &meta))?;
    io::write_text(&timing, &io::format_benchmark_timing(&report))?;
    Ok(vec![a.out.clone(), rows, timing])
}

fn coverage_cmd(a: &CoverageArgs) -> Result<Vec<PathBuf>> {
    let analysis = parse_filter(&a.analysis)?;
    let smoothing = parse_filter(&a.smoothing)?;
    let levels = parse_levels(&a.credible_levels)?;
    if let Some(p) = &a.spectrum.ews {
        check_input(p)?;
    }
    check_output(&a.out)?;
    let mut meta = vec![kv("command", "coverage")];
    let truth = load_spectrum(&a.spectrum, |len| single_scale_spectrum(len, a.scale, a.power), &mut meta)?;
    if a.spectrum.ews.is_none() {
        meta.extend([kv("scale", a.scale), kv("power", a.power)]);
    }
    let cfg = EstimateConfig {
        analysis,
        smoothing,
        spins: a.spins,
        samples: a.samples,
        seed: a.seed,
        credible_levels: levels.clone(),
        ..Default::default()
    };
    meta.extend([
        kv("replicates", a.replicates),
        kv("analysis", cfg.analysis.name()),
        kv("smoothing", cfg.smoothing.name()),
        kv("spins", cfg.spins),
        kv("samples", cfg.samples),
        kv("seed", a.seed),
    ]);
    let report = coverage_check(a.replicates, &truth, &cfg, a.seed)?;
    io::write_coverage(&a.out, &report, &meta)?;
    Ok(vec![a.out.clone()])
}
