//! Initial positive, monotone and convex sequence estimators built on sums
//! of adjacent autocorrelations.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::estimate::{Detail, Method, TauEstimate};
use crate::series::{sample_acf, AcfVector, TimeSeries};

/// Floor applied to the estimate of a strongly antithetic chain.
pub const TAU_FLOOR: f64 = 1e-6;

/// Pair sums `gamma[m] = rho[2m] + rho[2m+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSequence {
    pub gamma: Vec<f64>,
    /// Length of the leading run of strictly positive pair sums.
    pub retained: usize,
}

impl GammaSequence {
    /// Index of the last retained pair, `None` when the first sum is nonpositive.
    pub fn truncation_m(&self) -> Option<usize> {
        self.retained.checked_sub(1)
    }

    pub fn positive_prefix(&self) -> &[f64] {
        &self.gamma[..self.retained]
    }
}

pub fn gamma_pairs(acf: &AcfVector) -> Result<GammaSequence> {
    if acf.rho.len() < 2 {
        return Err(Error::InvalidArgument(
            "pair sums need autocorrelations up to lag 1".into(),
        ));
    }
    // an unpaired trailing lag is dropped
    let gamma: Vec<f64> = acf.rho.chunks_exact(2).map(|p| p[0] + p[1]).collect();
    let retained = gamma.iter().position(|&g| g <= 0.0).unwrap_or(gamma.len());
    Ok(GammaSequence { gamma, retained })
}

/// Running minimum, `out[m] = min(values[0..=m])`.
pub fn running_min(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .scan(f64::INFINITY, |acc, &v| {
            *acc = acc.min(v);
            Some(*acc)
        })
        .collect()
}

/// Greatest convex minorant of the points `(m, values[m])`, evaluated at
/// every `m`. Lower convex hull by a monotone stack, then linear interpolation.
pub fn greatest_convex_minorant(values: &[f64]) -> Vec<f64> {
    let mut hull: Vec<usize> = Vec::with_capacity(values.len());
    for i in 0..values.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // drop b unless slope(a, b) < slope(b, i)
            let lhs = (values[b] - values[a]) * (i - b) as f64;
            let rhs = (values[i] - values[b]) * (b - a) as f64;
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut out = Vec::with_capacity(values.len());
    if let Some(&first) = hull.first() {
        out.push(values[first]);
    }
    for seg in hull.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let slope = (values[b] - values[a]) / (b - a) as f64;
        for i in a + 1..b {
            out.push(values[a] + slope * (i - a) as f64);
        }
        out.push(values[b]);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothing {
    Positive,
    Monotone,
    Convex,
}

impl Smoothing {
    fn method(self) -> Method {
        match self {
            Smoothing::Positive => Method::Ips,
            Smoothing::Monotone => Method::Ims,
            Smoothing::Convex => Method::Ics,
        }
    }
}

/// Pair sums before and after smoothing, plus the resulting estimate.
#[derive(Debug, Clone)]
pub struct InitialSequence {
    pub pairs: GammaSequence,
    /// Smoothed retained prefix; same length as `pairs.retained`.
    pub smoothed: Vec<f64>,
    pub estimate: TauEstimate,
}

impl InitialSequence {
    /// Debug dump with columns `m,gamma_raw,gamma_smoothed`; the smoothed
    /// column is empty past the truncation point.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path.as_ref())?);
        writeln!(w, "m,gamma_raw,gamma_smoothed")?;
        for (m, g) in self.pairs.gamma.iter().enumerate() {
            match self.smoothed.get(m) {
                Some(s) => writeln!(w, "{m},{g},{s}")?,
                None => writeln!(w, "{m},{g},")?,
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Smooths the positive prefix of `pairs`. The convex estimator takes the
/// minorant of the monotone sequence, so the three smoothings are ordered
/// pointwise.
pub fn smooth(pairs: &GammaSequence, smoothing: Smoothing) -> Vec<f64> {
    let prefix = pairs.positive_prefix();
    match smoothing {
        Smoothing::Positive => prefix.to_vec(),
        Smoothing::Monotone => running_min(prefix),
        Smoothing::Convex => greatest_convex_minorant(&running_min(prefix)),
    }
}

/// `2 * sum(gamma) - 1`, floored at [`TAU_FLOOR`].
fn tau_from_pairs(smoothed: &[f64], pairs: &GammaSequence) -> (f64, bool) {
    let raw = if smoothed.is_empty() {
        2.0 * pairs.gamma[0] - 1.0
    } else {
        2.0 * smoothed.iter().sum::<f64>() - 1.0
    };
    if raw > TAU_FLOOR {
        (raw, false)
    } else {
        (TAU_FLOOR, true)
    }
}

pub fn initial_sequence(series: &TimeSeries, smoothing: Smoothing) -> Result<InitialSequence> {
    let n = series.len();
    if n < 4 {
        if n >= 2 && series.variance()? == 0.0 {
            return Err(Error::DegenerateSeries("sample variance is zero".into()));
        }
        return Err(Error::TooShort(format!(
            "initial sequence estimators need n >= 4, got {n}"
        )));
    }
    let acf = sample_acf(series, n - 2)?;
    let pairs = gamma_pairs(&acf)?;
    let smoothed = smooth(&pairs, smoothing);
    let (tau, clamped) = tau_from_pairs(&smoothed, &pairs);
    let estimate = TauEstimate {
        tau,
        method: smoothing.method(),
        n_used: n,
        detail: Detail::InitialSequence {
            pairs: pairs.retained,
            truncation_lag: (2 * pairs.retained).saturating_sub(1),
            clamped,
        },
    };
    Ok(InitialSequence {
        pairs,
        smoothed,
        estimate,
    })
}

/// Initial positive sequence estimator.
pub fn ips_tau(series: &TimeSeries) -> Result<TauEstimate> {
    initial_sequence(series, Smoothing::Positive).map(|s| s.estimate)
}

/// Initial monotone sequence estimator.
pub fn ims_tau(series: &TimeSeries) -> Result<TauEstimate> {
    initial_sequence(series, Smoothing::Monotone).map(|s| s.estimate)
}

/// Initial convex sequence estimator.
pub fn ics_tau(series: &TimeSeries) -> Result<TauEstimate> {
    initial_sequence(series, Smoothing::Convex).map(|s| s.estimate)
}

/// All three estimates from one autocorrelation pass, in IPS, IMS, ICS order.
pub fn all_initial_sequence_taus(series: &TimeSeries) -> Result<[TauEstimate; 3]> {
    let base = initial_sequence(series, Smoothing::Positive)?;
    let mk = |smoothing: Smoothing| {
        let smoothed = smooth(&base.pairs, smoothing);
        let (tau, clamped) = tau_from_pairs(&smoothed, &base.pairs);
        let mut est = base.estimate.clone();
        est.tau = tau;
        est.method = smoothing.method();
        if let Detail::InitialSequence { clamped: c, .. } = &mut est.detail {
            *c = clamped;
        }
        est
    };
    Ok([
        base.estimate.clone(),
        mk(Smoothing::Monotone),
        mk(Smoothing::Convex),
    ])
}
