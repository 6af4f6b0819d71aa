//! Sweeps every estimator over prefixes of the benchmark series.

mod config;
mod output;
mod plot;
mod report;

pub use config::{default_lengths, CiSettings, SweepConfig};
pub use output::{emit_csv, read_csv, CSV_HEADER};
pub use plot::emit_plot;
pub use report::{acf_report, AcfReport};

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use crate::ar::{ar_tau_ci_with, ArOptions, CiOptions};
use crate::error::{Error, Result};
use crate::estimate::Method;
use crate::generators::{reference_truth, SeriesKind, SeriesSpec, TruthRecord};
use crate::series::TimeSeries;

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Ok {
        tau: f64,
        /// Interval bounds, present in confidence-interval sweeps.
        interval: Option<(f64, f64)>,
        n_rejected: Option<usize>,
    },
    Failed {
        code: String,
    },
}

impl Outcome {
    pub fn tau(&self) -> Option<f64> {
        match self {
            Outcome::Ok { tau, .. } => Some(*tau),
            Outcome::Failed { .. } => None,
        }
    }

    pub fn status(&self) -> &str {
        match self {
            Outcome::Ok { .. } => "ok",
            Outcome::Failed { code } => code,
        }
    }
}

/// One (series, method, length, seed) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub series: SeriesKind,
    pub method: Method,
    pub length: usize,
    pub seed: u64,
    pub outcome: Outcome,
    /// Wall time in milliseconds, only when timing is recorded.
    pub ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub truth: BTreeMap<SeriesKind, TruthRecord>,
    /// True when rows carry interval columns.
    pub has_intervals: bool,
}

impl SweepResult {
    pub fn series(&self) -> Vec<SeriesKind> {
        let mut kinds: Vec<SeriesKind> = Vec::new();
        for r in &self.rows {
            if !kinds.contains(&r.series) {
                kinds.push(r.series);
            }
        }
        kinds
    }

    /// Successful estimates for one (series, method, length) across seeds.
    pub fn taus(&self, series: SeriesKind, method: Method, length: usize) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.series == series && r.method == method && r.length == length)
            .filter_map(|r| r.outcome.tau())
            .collect()
    }
}

/// Seed of the chain for `(base, kind, replicate seed)`; SplitMix64 finalizer
/// over a simple combination.
pub fn derive_seed(base: u64, kind: SeriesKind, seed: u64) -> u64 {
    let mut z = base
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((kind.index() as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03))
        .wrapping_add(seed.wrapping_mul(0x94D0_49BB_1331_11EB));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn estimate_cell(
    prefix: &TimeSeries,
    method: Method,
    ci: Option<&CiSettings>,
    cell_seed: u64,
) -> Outcome {
    match ci {
        Some(ci) if method == Method::ArProcess => {
            let opts = CiOptions {
                level: ci.level,
                n_draws: ci.draws,
                seed: cell_seed,
                ar: ArOptions {
                    order: None,
                    max_order: ci.max_order,
                },
            };
            match ar_tau_ci_with(prefix, opts) {
                Ok(iv) => Outcome::Ok {
                    tau: iv.estimate.tau,
                    interval: Some((iv.lower, iv.upper)),
                    n_rejected: Some(iv.n_rejected),
                },
                Err(e) => Outcome::Failed {
                    code: e.code().to_string(),
                },
            }
        }
        _ => match method.estimate(prefix) {
            Ok(est) => Outcome::Ok {
                tau: est.tau,
                interval: None,
                n_rejected: None,
            },
            Err(e) => Outcome::Failed {
                code: e.code().to_string(),
            },
        },
    }
}

fn rows_for_chain(config: &SweepConfig, spec: &SeriesSpec, seed: u64) -> Result<Vec<SweepRow>> {
    let mut spec = spec.clone();
    spec.seed = derive_seed(config.base_seed, spec.kind, seed);
    spec.n = *config.lengths.last().unwrap();
    let chain = spec.generate()?;
    let mut rows = Vec::with_capacity(config.lengths.len() * config.methods.len());
    for &length in &config.lengths {
        let prefix = chain.prefix(length)?;
        for &method in &config.methods {
            let start = Instant::now();
            let cell_seed = derive_seed(spec.seed, spec.kind, length as u64);
            let outcome = estimate_cell(&prefix, method, config.ci.as_ref(), cell_seed);
            let ms = config
                .record_timing
                .then(|| start.elapsed().as_secs_f64() * 1e3);
            rows.push(SweepRow {
                series: spec.kind,
                method,
                length,
                seed,
                outcome,
                ms,
            });
        }
    }
    Ok(rows)
}

fn run(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = (0..config.series.len())
        .flat_map(|s| (0..config.seeds.len()).map(move |k| (s, k)))
        .collect();
    let work = || {
        jobs.par_iter()
            .map(|&(s, k)| rows_for_chain(config, &config.series[s], config.seeds[k]))
            .collect::<Result<Vec<_>>>()
    };
    let chunks = match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let series_pos = |k: SeriesKind| config.series.iter().position(|s| s.kind == k).unwrap();
    let method_pos = |m: Method| config.methods.iter().position(|&x| x == m).unwrap();
    let seed_pos = |s: u64| config.seeds.iter().position(|&x| x == s).unwrap();
    let mut rows: Vec<SweepRow> = chunks.into_iter().flatten().collect();
    rows.sort_by_key(|r| (series_pos(r.series), method_pos(r.method), r.length, seed_pos(r.seed)));
    let truth = config
        .series
        .iter()
        .map(|s| Ok((s.kind, reference_truth(s)?)))
        .collect::<Result<_>>()?;
    Ok(SweepResult {
        rows,
        truth,
        has_intervals: config.ci.is_some(),
    })
}

/// Point estimates for every cell of the grid. Estimator failures become
/// rows with a status code; only config and generator errors are returned.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    let mut config = config.clone();
    config.ci = None;
    run(&config)
}

/// AR-process estimates with Monte Carlo intervals.
pub fn run_ci_sweep(config: &SweepConfig) -> Result<SweepResult> {
    let mut config = config.clone();
    config.methods = vec![Method::ArProcess];
    if config.ci.is_none() {
        config.ci = Some(CiSettings::default());
    }
    run(&config)
}
