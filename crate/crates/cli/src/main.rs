use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use actime::ar::{ar_tau_ci_with, ar_tau_with, ArOptions, CiOptions};
use actime::batch_means::{batch_means_tau, BatchPlan};
use actime::generators::{oracle_tau, SeriesKind, SeriesSpec, TruthRecord};
use actime::harness::{acf_report, emit_csv, emit_plot, read_csv, run_ci_sweep, run_sweep, SweepConfig};
use actime::initial_seq::{initial_sequence, Smoothing};
use actime::spectrum::{periodogram, spectrum_fit_tau};
use actime::{Detail, Method, TauEstimate, TimeSeries};
use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "actime", version, about = "Autocorrelation-time estimators and benchmark sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the autocorrelation time of a series file.
    Estimate(EstimateArgs),
    /// Generate a benchmark series.
    Generate(GenerateArgs),
    /// Run a sweep over series, methods, lengths and seeds.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run the AR method with intervals instead of the point-estimate sweep.
        #[arg(long)]
        ci: bool,
    },
    /// Draw the figure for a results CSV.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Long-run reference autocorrelation time of a series kind.
    Oracle {
        #[arg(long)]
        kind: SeriesKind,
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        replicates: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, f64)>,
    },
    /// Sample autocorrelations with the first zero crossing.
    Acf {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 200)]
        max_lag: usize,
        /// Write `lag,rho` here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct EstimateArgs {
    /// One value per line, or CSV with `index,value`.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    method: Method,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Spectrum-fit polynomial order (1 or 2).
    #[arg(long, default_value_t = 1)]
    order: usize,
    /// Fixed AR order; skips AIC selection.
    #[arg(long)]
    ar_order: Option<usize>,
    #[arg(long)]
    max_order: Option<usize>,
    /// Confidence level of the AR interval.
    #[arg(long)]
    ci: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the periodogram (`freq,power`) here.
    #[arg(long)]
    dump_periodogram: Option<PathBuf>,
    /// Write the pair sums (`m,gamma_raw,gamma_smoothed`) here.
    #[arg(long)]
    dump_gamma: Option<PathBuf>,
}

#[derive(clap::Args)]
struct GenerateArgs {
    #[arg(long)]
    kind: SeriesKind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "param", value_parser = parse_param)]
    params: Vec<(String, f64)>,
    #[arg(long)]
    burn_in: Option<usize>,
    /// Series file; metadata goes to `<out>.meta.json`.
    #[arg(long)]
    out: PathBuf,
    /// Write `index,value` CSV instead of one value per line.
    #[arg(long)]
    csv: bool,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    let v: f64 = v.parse().map_err(|_| format!("bad number in {s:?}"))?;
    Ok((k.to_string(), v))
}

/// Estimator failures exit with this code; config and IO errors with 1.
const ESTIMATE_FAILED: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate(args) => estimate(args),
        Command::Generate(args) => generate(args).map(|_| ExitCode::SUCCESS),
        Command::Sweep { config, out, ci } => sweep(&config, out, ci).map(|_| ExitCode::SUCCESS),
        Command::Plot { input, out } => plot(&input, &out).map(|_| ExitCode::SUCCESS),
        Command::Oracle {
            kind,
            n,
            replicates,
            seed,
            params,
        } => oracle(kind, n, replicates, seed, params).map(|_| ExitCode::SUCCESS),
        Command::Acf { input, max_lag, out } => acf(&input, max_lag, out).map(|_| ExitCode::SUCCESS),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn read_series(path: &Path) -> anyhow::Result<TimeSeries> {
    TimeSeries::read(path).with_context(|| format!("reading {}", path.display()))
}

fn detail_json(detail: &Detail) -> Value {
    match detail {
        Detail::BatchMeans {
            batch_size,
            num_batches,
        } => json!({ "batch_size": batch_size, "num_batches": num_batches }),
        Detail::SpectrumFit {
            order,
            n_points,
            i0_hat,
        } => json!({ "order": order, "n_points": n_points, "i0_hat": i0_hat }),
        Detail::InitialSequence {
            pairs,
            truncation_lag,
            clamped,
        } => json!({ "pairs": pairs, "truncation_lag": truncation_lag, "clamped": clamped }),
        Detail::ArProcess { order } => json!({ "p": order }),
    }
}

fn estimate_json(est: &TauEstimate) -> Value {
    json!({
        "status": "ok",
        "method": est.method.name(),
        "tau": est.tau,
        "n_used": est.n_used,
        "detail": detail_json(&est.detail),
    })
}

fn estimate(args: EstimateArgs) -> anyhow::Result<ExitCode> {
    let series = read_series(&args.input)?;
    if let Some(path) = &args.dump_periodogram {
        if let Ok(p) = periodogram(&series) {
            p.write_csv(path)?;
        }
    }
    let ar = ArOptions {
        order: args.ar_order,
        max_order: args.max_order,
    };
    let result: actime::Result<Value> = match args.method {
        Method::BatchMeans => {
            let plan = args
                .batch_size
                .map(|m| BatchPlan::with_batch_size(series.len(), m))
                .transpose();
            plan.and_then(|plan| batch_means_tau(&series, plan))
                .map(|e| estimate_json(&e))
        }
        Method::SpectrumFit => spectrum_fit_tau(&series, args.order).map(|e| estimate_json(&e)),
        m @ (Method::Ips | Method::Ims | Method::Ics) => {
            let smoothing = match m {
                Method::Ips => Smoothing::Positive,
                Method::Ims => Smoothing::Monotone,
                _ => Smoothing::Convex,
            };
            initial_sequence(&series, smoothing).and_then(|s| {
                if let Some(path) = &args.dump_gamma {
                    s.write_csv(path)?;
                }
                Ok(estimate_json(&s.estimate))
            })
        }
        Method::ArProcess => match args.ci {
            None => ar_tau_with(&series, ar).map(|e| estimate_json(&e)),
            Some(level) => ar_tau_ci_with(
                &series,
                CiOptions {
                    level,
                    n_draws: args.draws,
                    seed: args.seed,
                    ar,
                },
            )
            .map(|iv| {
                let mut v = estimate_json(&iv.estimate);
                v["lower"] = json!(iv.lower);
                v["upper"] = json!(iv.upper);
                v["level"] = json!(iv.level);
                v["n_draws"] = json!(iv.n_draws);
                v["n_rejected"] = json!(iv.n_rejected);
                v
            }),
        },
    };
    match result {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v)?);
            Ok(ExitCode::SUCCESS)
        }
        Err(e @ actime::Error::Io(_)) => Err(e.into()),
        Err(e) => {
            let v = json!({
                "status": e.code(),
                "method": args.method.name(),
                "message": e.to_string(),
            });
            println!("{}", serde_json::to_string_pretty(&v)?);
            Ok(ExitCode::from(ESTIMATE_FAILED))
        }
    }
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn generate(args: GenerateArgs) -> anyhow::Result<()> {
    let mut spec = SeriesSpec::new(args.kind, args.n, args.seed);
    for (k, v) in &args.params {
        spec = spec.with_param(k, *v);
    }
    if let Some(b) = args.burn_in {
        spec = spec.with_burn_in(b);
    }
    let series = spec.generate()?;
    if args.csv {
        series.write_csv(&args.out)?;
    } else {
        series.write_text(&args.out)?;
    }
    let mut meta: BTreeMap<String, Value> = series
        .meta()
        .iter()
        .map(|(k, v)| (k.clone(), json!(v)))
        .collect();
    meta.insert("label".into(), json!(series.label()));
    meta.insert("seed".into(), json!(args.seed));
    let sidecar = sidecar_path(&args.out);
    std::fs::write(&sidecar, serde_json::to_string_pretty(&meta)? + "\n")
        .with_context(|| format!("writing {}", sidecar.display()))?;
    Ok(())
}

fn sweep(config_path: &Path, out: Option<PathBuf>, ci: bool) -> anyhow::Result<()> {
    let config = SweepConfig::from_file(config_path)
        .with_context(|| format!("loading {}", config_path.display()))?;
    let Some(dir) = out.or_else(|| config.output_dir.clone()) else {
        bail!("no output directory: pass --out or set output_dir in the config");
    };
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let (result, stem) = if ci || config.ci.is_some() {
        (run_ci_sweep(&config)?, "intervals")
    } else {
        (run_sweep(&config)?, "results")
    };
    let csv = dir.join(format!("{stem}.csv"));
    emit_csv(&result, &csv)?;
    emit_plot(&result, dir.join(format!("{stem}.svg")))?;
    let failed = result.rows.iter().filter(|r| r.outcome.tau().is_none()).count();
    eprintln!(
        "{} rows ({failed} failed estimates) written to {}",
        result.rows.len(),
        csv.display()
    );
    Ok(())
}

fn plot(input: &Path, out: &Path) -> anyhow::Result<()> {
    let result = read_csv(input).with_context(|| format!("reading {}", input.display()))?;
    std::fs::create_dir_all(out)?;
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
    let path = out.join(format!("{stem}.svg"));
    emit_plot(&result, &path)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn truth_json(t: &TruthRecord) -> Value {
    json!({
        "kind": t.kind.name(),
        "tau_true": t.tau_true,
        "provenance": format!("{:?}", t.provenance),
        "reported": t.reported,
        "detail": t.oracle_detail,
    })
}

fn oracle(kind: SeriesKind, n: usize, replicates: usize, seed: u64, params: Vec<(String, f64)>) -> anyhow::Result<()> {
    let mut spec = SeriesSpec::new(kind, n, seed);
    for (k, v) in &params {
        spec = spec.with_param(k, *v);
    }
    let t = oracle_tau(&spec, n, replicates)?;
    println!("{}", serde_json::to_string_pretty(&truth_json(&t))?);
    Ok(())
}

fn acf(input: &Path, max_lag: usize, out: Option<PathBuf>) -> anyhow::Result<()> {
    let series = read_series(input)?;
    let max_lag = max_lag.min(series.len() - 1);
    let report = acf_report(&series, max_lag)?;
    if let Some(path) = out {
        report.write_csv(path)?;
    }
    let v = json!({
        "n": series.len(),
        "max_lag": max_lag,
        "first_zero_crossing": report.first_zero_crossing,
        "min_rho": report.min_rho,
    });
    println!("{}", serde_json::to_string_pretty(&v)?);
    Ok(())
}
