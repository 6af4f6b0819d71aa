//! Spectral density at frequency zero from a polynomial fit to the
//! low-frequency log-periodogram.

use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::estimate::{Detail, Method, TauEstimate};
use crate::series::{mean, TimeSeries};

/// `E[log X] = -EULER_GAMMA` for `X ~ Exp(1)`.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Raw periodogram at the Fourier frequencies `j/n`, `j = 1..=floor((n-1)/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram {
    pub freqs: Vec<f64>,
    pub power: Vec<f64>,
    pub n: usize,
}

impl Periodogram {
    pub fn len(&self) -> usize {
        self.power.len()
    }

    pub fn is_empty(&self) -> bool {
        self.power.is_empty()
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path.as_ref())?);
        writeln!(w, "freq,power")?;
        for (f, p) in self.freqs.iter().zip(&self.power) {
            writeln!(w, "{f},{p}")?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `I(f_j) = |sum_t (x_t - mean) exp(-2 pi i f_j t)|^2 / n`.
///
/// With this scaling a white-noise series of variance `s2` has `E[I] = s2`,
/// and `sum_j 2 I(f_j) / n` equals `s2` minus the Nyquist term over `n`
/// when `n` is even.
pub fn periodogram(series: &TimeSeries) -> Result<Periodogram> {
    let n = series.len();
    if n < 8 {
        return Err(Error::TooShort(format!("periodogram needs n >= 8, got {n}")));
    }
    let x = series.values();
    let m = mean(x);
    let mut buf: Vec<Complex<f64>> = x.iter().map(|v| Complex::new(v - m, 0.0)).collect();
    if buf.iter().all(|c| c.re == 0.0) {
        return Err(Error::DegenerateSeries("sample variance is zero".into()));
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let count = (n - 1) / 2;
    let inv_n = 1.0 / n as f64;
    let freqs = (1..=count).map(|j| j as f64 * inv_n).collect();
    let power = buf[1..=count].iter().map(|c| c.norm_sqr() * inv_n).collect();
    Ok(Periodogram { freqs, power, n })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumFitResult {
    pub i0_hat: f64,
    pub order: usize,
    pub n_points: usize,
    /// Polynomial coefficients in frequency units, constant term first.
    pub coeffs: Vec<f64>,
}

/// Number of low frequencies regressed on for a series of length `n`.
pub fn regression_points(n: usize) -> usize {
    let mut k = (n as f64).sqrt() as usize;
    while k * k > n {
        k -= 1;
    }
    while (k + 1) * (k + 1) <= n {
        k += 1;
    }
    k.min(n.saturating_sub(1) / 2)
}

/// Least-squares fit of `log I + gamma` on a polynomial in frequency over
/// the lowest `floor(sqrt(n))` Fourier frequencies.
///
/// At least `order + 3` frequencies are required, leaving two residual
/// degrees of freedom; shorter series fail with [`Error::FailedEstimate`].
pub fn spectrum_fit(series: &TimeSeries, order: usize) -> Result<SpectrumFitResult> {
    if !(1..=2).contains(&order) {
        return Err(Error::InvalidArgument(format!(
            "polynomial order must be 1 or 2, got {order}"
        )));
    }
    let n = series.len();
    let n_points = regression_points(n);
    if n_points < order + 3 {
        if series.variance()? == 0.0 {
            return Err(Error::DegenerateSeries("sample variance is zero".into()));
        }
        return Err(Error::FailedEstimate(format!(
            "{n_points} low frequencies available at n = {n}, order {order} needs {}",
            order + 3
        )));
    }
    let pgram = periodogram(series)?;
    let power = &pgram.power[..n_points];
    if power.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::FailedEstimate(
            "zero periodogram ordinate in regression window".into(),
        ));
    }
    // regress on f / f_max to keep the design well conditioned
    let f_max = pgram.freqs[n_points - 1];
    let design = DMatrix::from_fn(n_points, order + 1, |i, k| {
        (pgram.freqs[i] / f_max).powi(k as i32)
    });
    let y = DVector::from_iterator(n_points, power.iter().map(|p| p.ln() + EULER_GAMMA));
    let beta = design
        .svd(true, true)
        .solve(&y, 1e-12)
        .map_err(|e| Error::FailedEstimate(format!("least squares failed: {e}")))?;
    let coeffs: Vec<f64> = beta
        .iter()
        .enumerate()
        .map(|(k, b)| b / f_max.powi(k as i32))
        .collect();
    let i0_hat = coeffs[0].exp();
    if !(i0_hat > 0.0 && i0_hat.is_finite()) {
        return Err(Error::FailedEstimate(format!(
            "spectrum at zero is {i0_hat}"
        )));
    }
    Ok(SpectrumFitResult {
        i0_hat,
        order,
        n_points,
        coeffs,
    })
}

/// `tau = I0 / s^2`.
pub fn spectrum_fit_tau(series: &TimeSeries, order: usize) -> Result<TauEstimate> {
    let fit = spectrum_fit(series, order)?;
    let s2 = series.variance()?;
    Ok(TauEstimate {
        tau: fit.i0_hat / s2,
        method: Method::SpectrumFit,
        n_used: series.len(),
        detail: Detail::SpectrumFit {
            order,
            n_points: fit.n_points,
            i0_hat: fit.i0_hat,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::variance;

    #[test]
    fn constant_series_is_degenerate() {
        let s = TimeSeries::new(vec![1.5; 64]).unwrap();
        assert!(matches!(periodogram(&s), Err(Error::DegenerateSeries(_))));
        assert!(matches!(
            spectrum_fit_tau(&s, 1),
            Err(Error::DegenerateSeries(_))
        ));
        let short = TimeSeries::new(vec![1.5; 10]).unwrap();
        assert!(matches!(
            spectrum_fit_tau(&short, 1),
            Err(Error::DegenerateSeries(_))
        ));
    }

    #[test]
    fn cosine_concentrates_in_one_bin() {
        let n = 64;
        let k = 5;
        let v: Vec<f64> = (0..n)
            .map(|t| (2.0 * std::f64::consts::PI * k as f64 * t as f64 / n as f64).cos())
            .collect();
        let p = periodogram(&TimeSeries::new(v).unwrap()).unwrap();
        assert_eq!(p.len(), 31);
        let peak = p.power[k - 1];
        assert!((p.freqs[k - 1] - k as f64 / n as f64).abs() < 1e-15);
        for (j, &pw) in p.power.iter().enumerate() {
            if j != k - 1 {
                assert!(pw < 1e-10 * peak, "bin {} has {}", j + 1, pw);
            }
        }
    }

    #[test]
    fn parseval_even_and_odd() {
        for n in [37usize, 64, 1001] {
            let v: Vec<f64> = (0..n)
                .map(|t| ((t * 7919 % 101) as f64).sin() + 0.01 * t as f64)
                .collect();
            let s2 = variance(&v);
            let x = TimeSeries::new(v.clone()).unwrap();
            let p = periodogram(&x).unwrap();
            let total: f64 = p.power.iter().map(|i| 2.0 * i / n as f64).sum();
            let nyquist = if n % 2 == 0 {
                let m = mean(&v);
                let re: f64 = v
                    .iter()
                    .enumerate()
                    .map(|(t, x)| if t % 2 == 0 { x - m } else { m - x })
                    .sum();
                re * re / n as f64 / n as f64
            } else {
                0.0
            };
            assert!(
                ((total + nyquist) - s2).abs() < 1e-8 * s2,
                "n={n}: {total} + {nyquist} vs {s2}"
            );
        }
    }

    #[test]
    fn short_series_fail_cleanly() {
        let v: Vec<f64> = (0..10).map(|i| (i as f64 * 1.3).sin()).collect();
        let s = TimeSeries::new(v).unwrap();
        assert!(matches!(spectrum_fit_tau(&s, 1), Err(Error::FailedEstimate(_))));
        assert!(matches!(spectrum_fit_tau(&s, 2), Err(Error::FailedEstimate(_))));
        let v: Vec<f64> = (0..5).map(|i| i as f64).collect();
        assert!(matches!(
            spectrum_fit_tau(&TimeSeries::new(v).unwrap(), 1),
            Err(Error::FailedEstimate(_))
        ));
    }

    #[test]
    fn rejects_bad_order() {
        let v: Vec<f64> = (0..100).map(|i| (i as f64).sin()).collect();
        assert!(spectrum_fit_tau(&TimeSeries::new(v).unwrap(), 3).is_err());
    }

    #[test]
    fn regression_point_counts() {
        assert_eq!(regression_points(10), 3);
        assert_eq!(regression_points(16), 4);
        assert_eq!(regression_points(500_000), 707);
        assert_eq!(regression_points(8), 2);
    }
}
