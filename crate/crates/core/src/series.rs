//! Scalar time series container, moments and the sample autocorrelation function.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Series longer than this use FFT convolution for the autocorrelation.
pub const FFT_ACF_THRESHOLD: usize = 1024;

/// A finite, non-empty sequence of reals with optional provenance.
///
/// The values are fixed at construction; every element is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    label: Option<String>,
    seed: Option<u64>,
    meta: BTreeMap<String, String>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::TooShort("a series needs at least one value".into()));
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self {
            values,
            label: None,
            seed: None,
            meta: BTreeMap::new(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.meta.insert(key.into(), value.to_string());
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }

    /// Population (1/n) variance.
    pub fn variance(&self) -> Result<f64> {
        if self.len() < 2 {
            return Err(Error::DegenerateSeries(
                "variance needs at least two values".into(),
            ));
        }
        Ok(variance(&self.values))
    }

    /// The first `length` values, keeping label, seed and metadata.
    pub fn prefix(&self, length: usize) -> Result<TimeSeries> {
        if length == 0 || length > self.len() {
            return Err(Error::BadLength {
                length,
                n: self.len(),
            });
        }
        Ok(Self {
            values: self.values[..length].to_vec(),
            label: self.label.clone(),
            seed: self.seed,
            meta: self.meta.clone(),
        })
    }

    /// Applies `f` elementwise, rejecting non-finite results.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<TimeSeries> {
        let values = self.values.iter().map(|&v| f(v)).collect();
        let mut out = TimeSeries::new(values)?;
        out.label = self.label.clone();
        out.seed = self.seed;
        out.meta = self.meta.clone();
        Ok(out)
    }

    /// Reads a headerless one-column text file, or a CSV with an
    /// `index,value` header.
    pub fn read(path: impl AsRef<Path>) -> Result<TimeSeries> {
        let file = std::fs::File::open(path.as_ref())?;
        let reader = std::io::BufReader::new(file);
        let mut values = Vec::new();
        let mut csv_mode = false;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if lineno == 0 && line.eq_ignore_ascii_case("index,value") {
                csv_mode = true;
                continue;
            }
            let field = if csv_mode {
                line.rsplit(',').next().unwrap_or(line).trim()
            } else {
                line
            };
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: {:?}", lineno + 1, line)))?;
            values.push(v);
        }
        TimeSeries::new(values)
    }

    /// One value per line, shortest round-trip decimal representation.
    pub fn write_text(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path.as_ref())?);
        for v in &self.values {
            writeln!(w, "{v}")?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path.as_ref())?);
        writeln!(w, "index,value")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{i},{v}")?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Population variance (1/n normalizer) of a non-empty slice.
pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64
}

/// Sample autocorrelations at lags `0..=K`, normalized by `n * s2`.
#[derive(Debug, Clone, PartialEq)]
pub struct AcfVector {
    pub rho: Vec<f64>,
    pub n: usize,
    pub s2: f64,
}

impl AcfVector {
    pub fn max_lag(&self) -> usize {
        self.rho.len() - 1
    }
}

/// Sample autocorrelation function with the biased (1/n) normalizer.
///
/// Uses FFT convolution when the series is longer than
/// [`FFT_ACF_THRESHOLD`], direct summation otherwise.
pub fn sample_acf(series: &TimeSeries, max_lag: usize) -> Result<AcfVector> {
    let n = series.len();
    if n < 2 {
        return Err(Error::DegenerateSeries(
            "autocorrelation needs at least two values".into(),
        ));
    }
    if max_lag > n - 1 {
        return Err(Error::InvalidArgument(format!(
            "max_lag {max_lag} exceeds n - 1 = {}",
            n - 1
        )));
    }
    let acov = if n > FFT_ACF_THRESHOLD {
        autocovariance_fft(series.values(), max_lag)
    } else {
        autocovariance_direct(series.values(), max_lag)
    };
    acf_from_autocovariance(acov, n)
}

fn acf_from_autocovariance(acov: Vec<f64>, n: usize) -> Result<AcfVector> {
    let s2 = acov[0];
    if !(s2 > 0.0) {
        return Err(Error::DegenerateSeries("sample variance is zero".into()));
    }
    let mut rho: Vec<f64> = acov.iter().map(|c| (c / s2).clamp(-1.0, 1.0)).collect();
    rho[0] = 1.0;
    Ok(AcfVector { rho, n, s2 })
}

/// Centered, 1/n-normalized autocovariances by direct O(nK) summation.
pub fn autocovariance_direct(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let m = mean(x);
    let d: Vec<f64> = x.iter().map(|v| v - m).collect();
    (0..=max_lag)
        .map(|k| {
            d[..n - k]
                .iter()
                .zip(&d[k..])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / n as f64
        })
        .collect()
}

/// Centered, 1/n-normalized autocovariances via zero-padded FFT.
pub fn autocovariance_fft(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    let size = (2 * n).next_power_of_two();
    let m = mean(x);
    let mut buf: Vec<Complex<f64>> = x
        .iter()
        .map(|v| Complex::new(v - m, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(size).process(&mut buf);
    let scale = 1.0 / (size as f64 * n as f64);
    let mut acov: Vec<f64> = buf[..=max_lag].iter().map(|c| c.re * scale).collect();
    // lag 0 exactly, so that rho[0] normalizes against the same s2 as the
    // direct path
    acov[0] = variance(x);
    acov
}
