use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::estimate::Method;
use crate::generators::{SeriesKind, SeriesSpec};

/// Monte Carlo interval settings for the AR method.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CiSettings {
    pub level: f64,
    pub draws: usize,
    pub max_order: Option<usize>,
}

impl Default for CiSettings {
    fn default() -> Self {
        Self {
            level: 0.95,
            draws: 1000,
            max_order: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Series to sweep; `seed` is replaced per replicate and `n` by the
    /// largest length.
    pub series: Vec<SeriesSpec>,
    /// Strictly increasing prefix lengths.
    pub lengths: Vec<usize>,
    pub methods: Vec<Method>,
    /// Replicate seeds, one chain per (series, seed).
    pub seeds: Vec<u64>,
    pub base_seed: u64,
    pub ci: Option<CiSettings>,
    /// Fill the `ms` column; makes the output run-dependent.
    pub record_timing: bool,
    /// Worker threads; `None` uses rayon's global pool.
    pub workers: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

/// `points` lengths log-spaced from `min` to `max`, rounded and deduplicated.
pub fn log_spaced(min: usize, max: usize, points: usize) -> Vec<usize> {
    if points <= 1 || min >= max {
        return vec![max];
    }
    let (lo, hi) = ((min as f64).ln(), (max as f64).ln());
    let mut out: Vec<usize> = (0..points)
        .map(|i| (lo + (hi - lo) * i as f64 / (points - 1) as f64).exp().round() as usize)
        .collect();
    out[0] = min;
    out[points - 1] = max;
    out.dedup();
    out
}

/// Twenty log-spaced lengths from 10 to 500,000.
pub fn default_lengths() -> Vec<usize> {
    log_spaced(10, 500_000, 20)
}

impl Default for SweepConfig {
    fn default() -> Self {
        let lengths = default_lengths();
        let n = *lengths.last().unwrap();
        Self {
            series: SeriesKind::ALL.iter().map(|&k| SeriesSpec::new(k, n, 0)).collect(),
            lengths,
            methods: Method::COMPARED.to_vec(),
            seeds: vec![1, 2, 3],
            base_seed: 0,
            ci: None,
            record_timing: false,
            workers: None,
            output_dir: None,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.series.is_empty() || self.methods.is_empty() || self.seeds.is_empty() {
            return fail("series, methods and seeds must all be non-empty".into());
        }
        if self.lengths.is_empty() || self.lengths[0] == 0 {
            return fail("lengths must be non-empty and positive".into());
        }
        if self.lengths.windows(2).any(|w| w[0] >= w[1]) {
            return fail(format!("lengths must be strictly increasing: {:?}", self.lengths));
        }
        let max = *self.lengths.last().unwrap();
        for (i, s) in self.series.iter().enumerate() {
            if self.series[..i].iter().any(|t| t.kind == s.kind) {
                return fail(format!("series {} listed twice", s.kind));
            }
            if s.n < max {
                return fail(format!("series {} has n = {} < largest length {max}", s.kind, s.n));
            }
            s.resolved_params()
                .map_err(|e| Error::Config(e.to_string()))?;
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return fail(format!("method {m} listed twice"));
            }
        }
        for (i, s) in self.seeds.iter().enumerate() {
            if self.seeds[..i].contains(s) {
                return fail(format!("seed {s} listed twice"));
            }
        }
        if self.workers == Some(0) {
            return fail("workers must be positive".into());
        }
        if let Some(ci) = &self.ci {
            if !(ci.level > 0.0 && ci.level < 1.0) || ci.draws < 100 {
                return fail(format!("invalid interval settings {ci:?}"));
            }
        }
        Ok(())
    }

    /// Parses the TOML sweep configuration described in the README.
    pub fn from_toml_str(text: &str) -> Result<SweepConfig> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        raw.into_config()
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<SweepConfig> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_toml_str(&text)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeries {
    kind: String,
    n: Option<usize>,
    #[serde(default)]
    params: BTreeMap<String, f64>,
    burn_in: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    min: usize,
    max: usize,
    points: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    series: Option<Vec<RawSeries>>,
    lengths: Option<Vec<usize>>,
    length_grid: Option<RawGrid>,
    methods: Option<Vec<String>>,
    seeds: Option<Vec<u64>>,
    base_seed: Option<u64>,
    ci: Option<CiSettings>,
    #[serde(default)]
    record_timing: bool,
    workers: Option<usize>,
    output_dir: Option<PathBuf>,
}

impl RawConfig {
    fn into_config(self) -> Result<SweepConfig> {
        let defaults = SweepConfig::default();
        let lengths = match (self.lengths, self.length_grid) {
            (Some(_), Some(_)) => {
                return Err(Error::Config("give either lengths or length_grid, not both".into()))
            }
            (Some(l), None) => l,
            (None, Some(g)) => log_spaced(g.min, g.max, g.points),
            (None, None) => defaults.lengths,
        };
        let max = lengths.last().copied().unwrap_or(0);
        let series = match self.series {
            None => SeriesKind::ALL.iter().map(|&k| SeriesSpec::new(k, max, 0)).collect(),
            Some(list) => list
                .into_iter()
                .map(|r| {
                    let kind: SeriesKind = r.kind.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
                    Ok(SeriesSpec {
                        kind,
                        n: r.n.unwrap_or(max),
                        seed: 0,
                        params: r.params,
                        burn_in: r.burn_in,
                    })
                })
                .collect::<Result<_>>()?,
        };
        let methods = match self.methods {
            None => defaults.methods,
            Some(list) => list
                .iter()
                .map(|m| m.parse().map_err(|e: Error| Error::Config(e.to_string())))
                .collect::<Result<_>>()?,
        };
        let config = SweepConfig {
            series,
            lengths,
            methods,
            seeds: self.seeds.unwrap_or(defaults.seeds),
            base_seed: self.base_seed.unwrap_or(0),
            ci: self.ci,
            record_timing: self.record_timing,
            workers: self.workers,
            output_dir: self.output_dir,
        };
        config.validate()?;
        Ok(config)
    }
}
