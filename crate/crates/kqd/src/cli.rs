//! Command-line frontend: `discrepancy`, `test`, `benchmark`, and `type1`.
//!
//! Machine-readable output (JSON results, report tables, report files) is
//! deterministic given the command line and seed; progress and wall-clock
//! timings go to stderr.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::data::SampleSet;
use crate::datagen::GeneratorSpec;
use crate::directions::{
    default_projection_count, sample_directions_with_policy, LandmarkPolicy, ReferenceMeasure,
};
use crate::discrepancies::{
    default_multi_r, ekqd, ekqd_centered, mmd2_linear, mmd2_multi, mmd2_u, mmd2_v,
    sliced_wasserstein, supkqd, KqdConfig, QuantileWeighting, SwMode,
};
use crate::error::{Error, Result};
use crate::io;
use crate::kernels::{Bandwidth, KernelConfig, KernelFamily, KernelSpec};
use crate::rng::substream;
use crate::testing::{
    estimate_rejection_rate, permutation_test, ExperimentReport, StatisticConfig, StatisticKind,
    SweepPoint, TestResult,
};

#[derive(Parser)]
#[command(
    name = "kqd",
    version,
    about = "Kernel quantile discrepancies and two-sample testing",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a discrepancy statistic between two CSV datasets.
    Discrepancy(DiscrepancyArgs),
    /// Permutation two-sample test between two CSV datasets.
    Test(TestArgs),
    /// Rejection-rate benchmark over a parameter sweep.
    Benchmark(BenchmarkArgs),
    /// Type I error of the registered statistics under the null.
    Type1(Type1Args),
}

#[derive(Args)]
struct KernelFlags {
    /// Kernel family: rbf|laplacian|linear|poly.
    #[arg(long, default_value = "rbf")]
    kernel: String,
    /// Bandwidth for rbf/laplacian: 'median' or a positive number.
    #[arg(long, default_value = "median")]
    bandwidth: String,
    /// Degree of the polynomial kernel.
    #[arg(long, default_value_t = 3)]
    degree: u32,
    /// Offset of the polynomial kernel.
    #[arg(long, default_value_t = 1.0)]
    offset: f64,
    /// Count self-pairs when taking the median of pairwise distances.
    #[arg(long)]
    median_include_diagonal: bool,
}

impl KernelFlags {
    fn kernel_config(&self) -> Result<KernelConfig> {
        let family: KernelFamily = self.kernel.parse()?;
        let bandwidth = if self.bandwidth == "median" {
            Bandwidth::Median
        } else {
            let v: f64 = self
                .bandwidth
                .parse()
                .map_err(|_| Error::invalid(format!("bad --bandwidth '{}'", self.bandwidth)))?;
            Bandwidth::Fixed(v)
        };
        Ok(KernelConfig {
            family,
            bandwidth,
            degree: self.degree,
            offset: self.offset,
            median_include_diagonal: self.median_include_diagonal,
        })
    }
}

#[derive(Args)]
struct TuningFlags {
    /// Power of the quantile and Wasserstein statistics.
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Number of projection directions (default: ceil(ln n)).
    #[arg(long)]
    l: Option<usize>,
    /// Landmarks per direction (default: ceil(ln n)).
    #[arg(long)]
    m: Option<usize>,
    /// Quantile weighting: uniform|triangle|reverse-triangle.
    #[arg(long, default_value = "uniform")]
    nu: String,
    /// Subdiagonal count for mmd-multi (default: ceil(ln^2 n)).
    #[arg(long)]
    multi_r: Option<usize>,
    /// Resample landmarks for every direction instead of sharing one draw.
    #[arg(long)]
    fresh_landmarks: bool,
}

fn build_statistic_config(
    kind: StatisticKind,
    kernel: &KernelFlags,
    tuning: &TuningFlags,
) -> Result<StatisticConfig> {
    Ok(StatisticConfig {
        kind,
        kernel: kernel.kernel_config()?,
        p: tuning.p,
        l: tuning.l,
        m: tuning.m,
        weighting: QuantileWeighting::parse(&tuning.nu)?,
        multi_r: tuning.multi_r,
        fresh_landmarks: tuning.fresh_landmarks,
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum OutputFormat {
    Csv,
    Json,
}

fn parse_format(s: &str) -> Result<OutputFormat> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(Error::invalid(format!(
            "unknown format '{other}' (expected csv|json)"
        ))),
    }
}

#[derive(Args)]
struct DiscrepancyArgs {
    /// First dataset (CSV).
    #[arg(long)]
    x: PathBuf,
    /// Second dataset (CSV).
    #[arg(long)]
    y: PathBuf,
    /// Skip the first line of each CSV.
    #[arg(long)]
    has_header: bool,
    /// Statistic to compute.
    #[arg(long, default_value = "ekqd")]
    stat: String,
    #[command(flatten)]
    kernel: KernelFlags,
    #[command(flatten)]
    tuning: TuningFlags,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the result to this path as well.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv|json.
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct TestArgs {
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    y: PathBuf,
    #[arg(long)]
    has_header: bool,
    #[arg(long, default_value = "ekqd")]
    stat: String,
    #[command(flatten)]
    kernel: KernelFlags,
    #[command(flatten)]
    tuning: TuningFlags,
    /// Number of random relabelings of the pooled sample.
    #[arg(long, default_value_t = 300)]
    perms: usize,
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Experiment: power-decay|laplace-gaussian|custom-csv.
    #[arg(long)]
    experiment: String,
    /// Comma-separated statistics to benchmark.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "ekqd,ekqd-centered,supkqd,mmd-u,mmd-multi,mmd-lin"
    )]
    methods: Vec<String>,
    /// Dimension sweep for power-decay.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Sample-size sweep for laplace-gaussian / custom-csv.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Sample size per group for power-decay.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 300)]
    perms: usize,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pool of X points for custom-csv.
    #[arg(long)]
    x: Option<PathBuf>,
    /// Pool of Y points for custom-csv.
    #[arg(long)]
    y: Option<PathBuf>,
    #[arg(long)]
    has_header: bool,
    #[command(flatten)]
    kernel: KernelFlags,
    #[command(flatten)]
    tuning: TuningFlags,
    /// Report file to write.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format: csv|json.
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct Type1Args {
    /// Statistics to check; 'all' expands to the full registry.
    #[arg(long, value_delimiter = ',', default_value = "all")]
    methods: Vec<String>,
    /// Sample size per group.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Data dimension.
    #[arg(long, default_value_t = 5)]
    dim: usize,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 300)]
    perms: usize,
    #[arg(long, default_value_t = 0.05)]
    level: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    kernel: KernelFlags,
    #[command(flatten)]
    tuning: TuningFlags,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: String,
}

/// Entry point for the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_not_found() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Discrepancy(args) => run_discrepancy(args),
        Command::Test(args) => run_test(args),
        Command::Benchmark(args) => run_benchmark(args),
        Command::Type1(args) => run_type1(args),
    }
}

#[derive(Debug, Serialize)]
struct KernelEcho {
    family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    bandwidth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    degree: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    offset: Option<f64>,
}

impl KernelEcho {
    fn from_spec(spec: &KernelSpec) -> Self {
        match *spec {
            KernelSpec::Rbf { bandwidth } => KernelEcho {
                family: "rbf".into(),
                bandwidth: Some(bandwidth),
                degree: None,
                offset: None,
            },
            KernelSpec::Laplacian { bandwidth } => KernelEcho {
                family: "laplacian".into(),
                bandwidth: Some(bandwidth),
                degree: None,
                offset: None,
            },
            KernelSpec::Linear => KernelEcho {
                family: "linear".into(),
                bandwidth: None,
                degree: None,
                offset: None,
            },
            KernelSpec::Polynomial { degree, offset } => KernelEcho {
                family: "poly".into(),
                bandwidth: None,
                degree: Some(degree),
                offset: Some(offset),
            },
        }
    }
}

struct ComputedStatistic {
    distance: f64,
    raw_power: f64,
    kernel: Option<KernelSpec>,
    l: Option<usize>,
    m: Option<usize>,
}

/// One full evaluation of a statistic on a pair of datasets, sampling any
/// directions it needs from a substream of `seed`.
fn compute_statistic(
    x: &SampleSet,
    y: &SampleSet,
    cfg: &StatisticConfig,
    seed: u64,
) -> Result<ComputedStatistic> {
    let kind = cfg.kind;
    let needs_equal_n = !matches!(kind, StatisticKind::MmdU | StatisticKind::MmdV);
    if needs_equal_n && x.n() != y.n() {
        return Err(Error::invalid(format!(
            "{} needs equal sample sizes, got {} and {}",
            kind.name(),
            x.n(),
            y.n()
        )));
    }
    match kind {
        StatisticKind::Ekqd | StatisticKind::SupKqd | StatisticKind::EkqdCentered => {
            let kernel = cfg.kernel.resolve(x, y)?;
            let n = x.n();
            let l = cfg.l.unwrap_or_else(|| default_projection_count(n));
            let m = cfg.m.unwrap_or_else(|| default_projection_count(n));
            let policy = if cfg.fresh_landmarks {
                LandmarkPolicy::PerDirection
            } else {
                LandmarkPolicy::Shared
            };
            let reference = ReferenceMeasure::pooled(x, y)?;
            let mut rng = substream(seed, &[101]);
            let dirs = sample_directions_with_policy(&kernel, &reference, m, l, policy, &mut rng)?;
            let kq = KqdConfig {
                p: cfg.p,
                l,
                m,
                weighting: cfg.weighting.clone(),
                seed,
            };
            let pd = match kind {
                StatisticKind::Ekqd => ekqd(x, y, &kq, &dirs)?,
                StatisticKind::SupKqd => supkqd(x, y, &kq, &dirs)?,
                _ => ekqd_centered(x, y, &kernel, &kq, &dirs)?,
            };
            Ok(ComputedStatistic {
                distance: pd.distance,
                raw_power: pd.pth_power,
                kernel: Some(kernel),
                l: Some(l),
                m: Some(m),
            })
        }
        StatisticKind::Sw | StatisticKind::MaxSw => {
            let l = cfg.l.unwrap_or_else(|| default_projection_count(x.n()));
            let mode = if kind == StatisticKind::Sw {
                SwMode::Expected
            } else {
                SwMode::Max
            };
            let mut rng = substream(seed, &[101]);
            let distance = sliced_wasserstein(x, y, l, cfg.p, &mut rng, mode)?;
            Ok(ComputedStatistic {
                distance,
                raw_power: distance.powi(cfg.p as i32),
                kernel: None,
                l: Some(l),
                m: None,
            })
        }
        StatisticKind::MmdU | StatisticKind::MmdV | StatisticKind::MmdLinear
        | StatisticKind::MmdMulti => {
            let kernel = cfg.kernel.resolve(x, y)?;
            let raw = match kind {
                StatisticKind::MmdU => mmd2_u(x, y, &kernel)?,
                StatisticKind::MmdV => mmd2_v(x, y, &kernel)?,
                StatisticKind::MmdLinear => mmd2_linear(x, y, &kernel)?,
                _ => {
                    let r = cfg.multi_r.unwrap_or_else(|| default_multi_r(x.n()));
                    mmd2_multi(x, y, &kernel, r)?
                }
            };
            Ok(ComputedStatistic {
                distance: raw.max(0.0).sqrt(),
                raw_power: raw,
                kernel: Some(kernel),
                l: None,
                m: None,
            })
        }
    }
}

#[derive(Serialize)]
struct DiscrepancyOutput {
    command: &'static str,
    stat: String,
    distance: f64,
    raw_power: f64,
    p: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    kernel: Option<KernelEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<usize>,
    nu: String,
    n_x: usize,
    n_y: usize,
    dim: usize,
    seed: u64,
    x: String,
    y: String,
}

fn run_discrepancy(args: DiscrepancyArgs) -> Result<()> {
    let format = parse_format(&args.format)?;
    let kind: StatisticKind = args.stat.parse()?;
    let cfg = build_statistic_config(kind, &args.kernel, &args.tuning)?;
    let dx = io::load_csv(&args.x, args.has_header)?;
    let dy = io::load_csv(&args.y, args.has_header)?;
    let start = Instant::now();
    let computed = compute_statistic(&dx.points, &dy.points, &cfg, args.seed)?;
    let elapsed = start.elapsed();
    let output = DiscrepancyOutput {
        command: "discrepancy",
        stat: kind.name().into(),
        distance: computed.distance,
        raw_power: computed.raw_power,
        p: cfg.p,
        kernel: computed.kernel.as_ref().map(KernelEcho::from_spec),
        l: computed.l,
        m: computed.m,
        nu: cfg.weighting.name().into(),
        n_x: dx.points.n(),
        n_y: dy.points.n(),
        dim: dx.points.dim(),
        seed: args.seed,
        x: args.x.display().to_string(),
        y: args.y.display().to_string(),
    };
    let rendered = match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&output)?;
            s.push('\n');
            s
        }
        OutputFormat::Csv => format!(
            "stat,distance,raw_power,n_x,n_y,dim,seed\n{},{},{},{},{},{},{}\n",
            output.stat, output.distance, output.raw_power, output.n_x, output.n_y, output.dim,
            output.seed
        ),
    };
    print!("{rendered}");
    if let Some(out) = &args.out {
        std::fs::write(out, &rendered).map_err(|e| Error::Io {
            path: out.clone(),
            source: e,
        })?;
    }
    eprintln!(
        "computed {} on {}x{} vs {}x{} in {:.3} s",
        kind.name(),
        dx.points.n(),
        dx.points.dim(),
        dy.points.n(),
        dy.points.dim(),
        elapsed.as_secs_f64()
    );
    Ok(())
}

#[derive(Serialize)]
struct TestOutput {
    command: &'static str,
    stat: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    kernel: Option<KernelEcho>,
    n: usize,
    dim: usize,
    perms: usize,
    level: f64,
    seed: u64,
    config: String,
    result: TestResult,
}

fn run_test(args: TestArgs) -> Result<()> {
    let format = parse_format(&args.format)?;
    let kind: StatisticKind = args.stat.parse()?;
    let cfg = build_statistic_config(kind, &args.kernel, &args.tuning)?;
    let dx = io::load_csv(&args.x, args.has_header)?;
    let dy = io::load_csv(&args.y, args.has_header)?;
    let mut rng = substream(args.seed, &[7]);
    let result = permutation_test(&dx.points, &dy.points, &cfg, args.perms, args.level, &mut rng)?;
    let kernel_echo = if kind.uses_kernel() {
        Some(KernelEcho::from_spec(
            &cfg.kernel.resolve(&dx.points, &dy.points)?,
        ))
    } else {
        None
    };
    let wall_time = result.wall_time;
    let output = TestOutput {
        command: "test",
        stat: kind.name().into(),
        kernel: kernel_echo,
        n: dx.points.n(),
        dim: dx.points.dim(),
        perms: args.perms,
        level: args.level,
        seed: args.seed,
        config: cfg.describe(),
        result,
    };
    let rendered = match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&output)?;
            s.push('\n');
            s
        }
        OutputFormat::Csv => format!(
            "stat,statistic,threshold,p_value,reject,n_permutations,seed\n{},{},{},{},{},{},{}\n",
            output.stat,
            output.result.statistic,
            output.result.threshold,
            output.result.p_value,
            output.result.reject,
            output.result.n_permutations,
            output.seed
        ),
    };
    print!("{rendered}");
    if let Some(out) = &args.out {
        std::fs::write(out, &rendered).map_err(|e| Error::Io {
            path: out.clone(),
            source: e,
        })?;
    }
    eprintln!(
        "test finished in {:.3} s (reject = {})",
        wall_time, output.result.reject
    );
    Ok(())
}

enum Experiment {
    PowerDecay,
    LaplaceGaussian,
    CustomCsv,
}

fn parse_experiment(s: &str) -> Result<Experiment> {
    match s {
        "power-decay" => Ok(Experiment::PowerDecay),
        "laplace-gaussian" => Ok(Experiment::LaplaceGaussian),
        "custom-csv" => Ok(Experiment::CustomCsv),
        other => Err(Error::invalid(format!(
            "unknown experiment '{other}' (expected power-decay|laplace-gaussian|custom-csv)"
        ))),
    }
}

fn power_decay_generators(d: usize) -> (GeneratorSpec, GeneratorSpec) {
    let mut variances = vec![1.0; d];
    for v in variances.iter_mut().take(3) {
        *v = 4.0;
    }
    (
        GeneratorSpec::GaussianIso { dim: d },
        GeneratorSpec::GaussianDiag {
            mean: vec![0.0; d],
            variances,
        },
    )
}

fn laplace_gaussian_generators() -> (GeneratorSpec, GeneratorSpec) {
    (
        GeneratorSpec::GaussianIso { dim: 1 },
        GeneratorSpec::Laplace {
            location: 0.0,
            scale: 1.0 / 2.0_f64.sqrt(),
        },
    )
}

/// Median-of-3 wall time of one statistic evaluation, for the runtime table.
fn time_statistic(x: &SampleSet, y: &SampleSet, cfg: &StatisticConfig, seed: u64) -> Result<f64> {
    let mut times = Vec::with_capacity(3);
    for rep in 0..3 {
        let start = Instant::now();
        compute_statistic(x, y, cfg, seed.wrapping_add(rep))?;
        times.push(start.elapsed().as_secs_f64());
    }
    times.sort_unstable_by(f64::total_cmp);
    Ok(times[1])
}

struct SweepCell {
    param_value: f64,
    rate: Option<f64>,
    eval_seconds: Option<f64>,
}

fn render_rate_table(
    param_name: &str,
    sweep: &[f64],
    methods: &[StatisticKind],
    cells: &[Vec<SweepCell>],
    render: impl Fn(&SweepCell) -> String,
) -> String {
    let mut out = String::new();
    out.push_str(&format!("{:<14}", "method"));
    for value in sweep {
        out.push_str(&format!(" {:>10}", format!("{param_name}={value}")));
    }
    out.push('\n');
    for (mi, method) in methods.iter().enumerate() {
        out.push_str(&format!("{:<14}", method.name()));
        for cell in &cells[mi] {
            out.push_str(&format!(" {:>10}", render(cell)));
        }
        out.push('\n');
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn run_sweep(
    methods: &[StatisticKind],
    sweep: &[f64],
    param_name: &str,
    make_generators: impl Fn(f64) -> Result<(GeneratorSpec, GeneratorSpec, usize)>,
    kernel: &KernelFlags,
    tuning: &TuningFlags,
    trials: usize,
    perms: usize,
    level: f64,
    seed: u64,
    config_echo: &str,
) -> Result<(Vec<ExperimentReport>, String, String)> {
    let mut cells: Vec<Vec<SweepCell>> = Vec::with_capacity(methods.len());
    for &kind in methods {
        let cfg = build_statistic_config(kind, kernel, tuning)?;
        let mut row = Vec::with_capacity(sweep.len());
        for &value in sweep {
            let (gen_p, gen_q, n) = make_generators(value)?;
            let started = Instant::now();
            let rate = match estimate_rejection_rate(
                &gen_p, &gen_q, n, trials, &cfg, perms, level, seed,
            ) {
                Ok(rate) => Some(rate),
                Err(e) => {
                    eprintln!(
                        "cell failed: method={} {param_name}={value}: {e}",
                        kind.name()
                    );
                    None
                }
            };
            let eval_seconds = {
                let mut rng = substream(seed, &[909, value.to_bits()]);
                match (gen_p.sample(n, &mut rng), gen_q.sample(n, &mut rng)) {
                    (Ok(x), Ok(y)) => time_statistic(&x, &y, &cfg, seed).ok(),
                    _ => None,
                }
            };
            if let Some(rate) = rate {
                eprintln!(
                    "method={} {param_name}={value} rate={rate:.4} ({:.2} s)",
                    kind.name(),
                    started.elapsed().as_secs_f64()
                );
            }
            row.push(SweepCell {
                param_value: value,
                rate,
                eval_seconds,
            });
        }
        cells.push(row);
    }
    let mut reports = Vec::new();
    for (mi, &kind) in methods.iter().enumerate() {
        let points: Vec<SweepPoint> = cells[mi]
            .iter()
            .filter_map(|c| {
                c.rate.map(|rate| SweepPoint {
                    param_value: c.param_value,
                    rejection_rate: rate,
                })
            })
            .collect();
        reports.push(ExperimentReport {
            method: kind.name().to_string(),
            param_name: param_name.to_string(),
            points,
            trials,
            seed,
            config: config_echo.to_string(),
        });
    }
    let rate_table = render_rate_table(param_name, sweep, methods, &cells, |c| match c.rate {
        Some(r) => format!("{r:.4}"),
        None => "failed".to_string(),
    });
    let time_table = render_rate_table(param_name, sweep, methods, &cells, |c| {
        match c.eval_seconds {
            Some(t) => format!("{t:.4}s"),
            None => "-".to_string(),
        }
    });
    Ok((reports, rate_table, time_table))
}

fn parse_methods(names: &[String]) -> Result<Vec<StatisticKind>> {
    if names.len() == 1 && names[0] == "all" {
        return Ok(StatisticKind::ALL.to_vec());
    }
    names.iter().map(|name| name.parse()).collect()
}

fn write_reports(
    reports: &[ExperimentReport],
    out: Option<&PathBuf>,
    format: OutputFormat,
) -> Result<()> {
    if let Some(path) = out {
        match format {
            OutputFormat::Csv => io::write_reports_csv(reports, path)?,
            OutputFormat::Json => io::write_reports_json(reports, path)?,
        }
        eprintln!("report written to {}", path.display());
    }
    Ok(())
}

fn run_benchmark(args: BenchmarkArgs) -> Result<()> {
    let format = parse_format(&args.format)?;
    let experiment = parse_experiment(&args.experiment)?;
    let methods = parse_methods(&args.methods)?;
    if methods.is_empty() {
        return Err(Error::invalid("at least one method is required"));
    }
    let method_names: Vec<&str> = methods.iter().map(|k| k.name()).collect();
    let config_echo = format!(
        "benchmark --experiment {} --methods {} --trials {} --perms {} --level {} --seed {} --kernel {} --bandwidth {} --degree {} --p {} --nu {}",
        args.experiment,
        method_names.join(","),
        args.trials,
        args.perms,
        args.level,
        args.seed,
        args.kernel.kernel,
        args.kernel.bandwidth,
        args.kernel.degree,
        args.tuning.p,
        args.tuning.nu,
    );

    let (reports, rate_table, time_table) = match experiment {
        Experiment::PowerDecay => {
            let dims = args.dims.clone().unwrap_or_else(|| vec![32, 64, 128, 256, 512]);
            let n = args.n.unwrap_or(200);
            let sweep: Vec<f64> = dims.iter().map(|&d| d as f64).collect();
            run_sweep(
                &methods,
                &sweep,
                "d",
                |value| {
                    let d = value as usize;
                    if d < 3 {
                        return Err(Error::invalid("power-decay needs dimension at least 3"));
                    }
                    let (p, q) = power_decay_generators(d);
                    Ok((p, q, n))
                },
                &args.kernel,
                &args.tuning,
                args.trials,
                args.perms,
                args.level,
                args.seed,
                &config_echo,
            )?
        }
        Experiment::LaplaceGaussian => {
            let sizes = args
                .sizes
                .clone()
                .unwrap_or_else(|| vec![100, 500, 2000, 5000, 10000]);
            let sweep: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
            run_sweep(
                &methods,
                &sweep,
                "n",
                |value| {
                    let (p, q) = laplace_gaussian_generators();
                    Ok((p, q, value as usize))
                },
                &args.kernel,
                &args.tuning,
                args.trials,
                args.perms,
                args.level,
                args.seed,
                &config_echo,
            )?
        }
        Experiment::CustomCsv => {
            let x_path = args
                .x
                .as_ref()
                .ok_or_else(|| Error::invalid("custom-csv needs --x"))?;
            let y_path = args
                .y
                .as_ref()
                .ok_or_else(|| Error::invalid("custom-csv needs --y"))?;
            let pool_x = io::load_csv(x_path, args.has_header)?.points;
            let pool_y = io::load_csv(y_path, args.has_header)?.points;
            let sizes = args
                .sizes
                .clone()
                .ok_or_else(|| Error::invalid("custom-csv needs --sizes"))?;
            let sweep: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
            run_sweep(
                &methods,
                &sweep,
                "n",
                move |value| {
                    Ok((
                        GeneratorSpec::Custom {
                            pool: pool_x.clone(),
                        },
                        GeneratorSpec::Custom {
                            pool: pool_y.clone(),
                        },
                        value as usize,
                    ))
                },
                &args.kernel,
                &args.tuning,
                args.trials,
                args.perms,
                args.level,
                args.seed,
                &config_echo,
            )?
        }
    };

    print!("{rate_table}");
    eprintln!("single-evaluation wall time (median of 3):");
    eprint!("{time_table}");
    write_reports(&reports, args.out.as_ref(), format)?;
    Ok(())
}

fn run_type1(args: Type1Args) -> Result<()> {
    let format = parse_format(&args.format)?;
    let methods = parse_methods(&args.methods)?;
    let config_echo = format!(
        "type1 --n {} --dim {} --trials {} --perms {} --level {} --seed {} --kernel {} --bandwidth {}",
        args.n,
        args.dim,
        args.trials,
        args.perms,
        args.level,
        args.seed,
        args.kernel.kernel,
        args.kernel.bandwidth,
    );
    let gen = GeneratorSpec::GaussianIso { dim: args.dim };
    let sweep = [args.n as f64];
    let (reports, rate_table, time_table) = run_sweep(
        &methods,
        &sweep,
        "n",
        |value| Ok((gen.clone(), gen.clone(), value as usize)),
        &args.kernel,
        &args.tuning,
        args.trials,
        args.perms,
        args.level,
        args.seed,
        &config_echo,
    )?;
    print!("{rate_table}");
    eprintln!("single-evaluation wall time (median of 3):");
    eprint!("{time_table}");
    write_reports(&reports, args.out.as_ref(), format)?;
    Ok(())
}
