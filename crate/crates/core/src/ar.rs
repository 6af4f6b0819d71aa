//! Autoregressive fits by Yule-Walker, AIC order selection, the implied
//! autocorrelation time and Monte Carlo intervals for it.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimate::{Detail, Method, TauEstimate};
use crate::series::{sample_acf, AcfVector, TimeSeries};

/// Largest acceptable condition number of the Yule-Walker Toeplitz matrix.
pub const MAX_CONDITION: f64 = 1e12;
/// `|1 - sum(pi)|` below this is treated as a unit root.
pub const UNIT_ROOT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ArFit {
    pub order: usize,
    pub pi: Vec<f64>,
    /// Innovation variance.
    pub sigma_a2: f64,
    /// Asymptotic covariance of the coefficient estimates, `order x order`.
    pub coeff_cov: DMatrix<f64>,
    pub mu: f64,
    /// Sample variance of the series (1/n).
    pub s2: f64,
    /// Sample autocorrelations at lags `1..=order`.
    pub rho: Vec<f64>,
    pub n: usize,
}

impl ArFit {
    /// Autocorrelation time implied by the fit.
    pub fn tau(&self) -> Result<f64> {
        tau_from_coefficients(&self.pi, &self.rho)
    }
}

/// One order of the Levinson-Durbin recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct LevinsonStep {
    pub pi: Vec<f64>,
    /// Innovation variance relative to the series variance, `1 - rho' pi`.
    pub rel_var: f64,
}

/// Solves the Yule-Walker systems for orders `0..=max_order` given
/// autocorrelations `rho[0..=max_order]`.
///
/// Stops early if the relative innovation variance stops being positive.
pub fn levinson_durbin(rho: &[f64], max_order: usize) -> Vec<LevinsonStep> {
    assert!(rho.len() > max_order, "need rho up to lag {max_order}");
    let mut steps = Vec::with_capacity(max_order + 1);
    let mut pi: Vec<f64> = Vec::new();
    let mut v = 1.0;
    steps.push(LevinsonStep {
        pi: pi.clone(),
        rel_var: v,
    });
    for k in 1..=max_order {
        let acc: f64 = pi.iter().enumerate().map(|(j, p)| p * rho[k - 1 - j]).sum();
        let kappa = (rho[k] - acc) / v;
        let mut next = Vec::with_capacity(k);
        for j in 0..k - 1 {
            next.push(pi[j] - kappa * pi[k - 2 - j]);
        }
        next.push(kappa);
        v *= 1.0 - kappa * kappa;
        if !(v > 0.0) {
            break;
        }
        pi = next;
        steps.push(LevinsonStep {
            pi: pi.clone(),
            rel_var: v,
        });
    }
    steps
}

/// Reflection coefficients (partial autocorrelations) of an AR polynomial
/// by the step-down recursion; `Unstable` if any has modulus >= 1, which is
/// equivalent to a companion-matrix spectral radius >= 1.
pub fn reflection_coefficients(pi: &[f64]) -> Result<Vec<f64>> {
    let p = pi.len();
    let mut kappas = vec![0.0; p];
    let mut a = pi.to_vec();
    for k in (1..=p).rev() {
        let kappa = a[k - 1];
        if !(kappa.abs() < 1.0) {
            return Err(Error::Unstable);
        }
        kappas[k - 1] = kappa;
        let denom = 1.0 - kappa * kappa;
        let prev: Vec<f64> = (0..k - 1)
            .map(|j| (a[j] + kappa * a[k - 2 - j]) / denom)
            .collect();
        a = prev;
    }
    Ok(kappas)
}

pub fn is_stationary(pi: &[f64]) -> bool {
    reflection_coefficients(pi).is_ok()
}

/// Largest eigenvalue modulus of the companion matrix of `pi`.
pub fn spectral_radius(pi: &[f64]) -> f64 {
    let p = pi.len();
    if p == 0 {
        return 0.0;
    }
    let companion = DMatrix::from_fn(p, p, |i, j| {
        if i == 0 {
            pi[j]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    companion
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Autocorrelations `rho[0..=max_lag]` of the stationary AR process with
/// coefficients `pi` and unit-variance-normalized output.
pub fn implied_acf_of(pi: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let kappas = reflection_coefficients(pi)?;
    let p = pi.len();
    let mut rho = Vec::with_capacity(max_lag.max(p) + 1);
    rho.push(1.0);
    // Levinson in reverse: rebuild rho from the partial autocorrelations
    let mut a: Vec<f64> = Vec::new();
    let mut v = 1.0;
    for (k, &kappa) in kappas.iter().enumerate().map(|(i, x)| (i + 1, x)) {
        let acc: f64 = a.iter().enumerate().map(|(j, c)| c * rho[k - 1 - j]).sum();
        rho.push(kappa * v + acc);
        let mut next = Vec::with_capacity(k);
        for j in 0..k - 1 {
            next.push(a[j] - kappa * a[k - 2 - j]);
        }
        next.push(kappa);
        a = next;
        v *= 1.0 - kappa * kappa;
    }
    for k in p + 1..=max_lag {
        let r = pi.iter().enumerate().map(|(j, c)| c * rho[k - 1 - j]).sum();
        rho.push(r);
    }
    rho.truncate(max_lag + 1);
    Ok(rho)
}

pub fn implied_acf(fit: &ArFit, max_lag: usize) -> Result<AcfVector> {
    Ok(AcfVector {
        rho: implied_acf_of(&fit.pi, max_lag)?,
        n: fit.n,
        s2: fit.s2,
    })
}

/// `(1 - rho' pi) / (1 - sum(pi))^2`.
pub fn tau_from_coefficients(pi: &[f64], rho: &[f64]) -> Result<f64> {
    debug_assert_eq!(pi.len(), rho.len());
    let explained: f64 = pi.iter().zip(rho).map(|(a, b)| a * b).sum();
    let denom = 1.0 - pi.iter().sum::<f64>();
    if denom.abs() < UNIT_ROOT_TOL {
        return Err(Error::NearUnitRoot(denom.abs()));
    }
    Ok((1.0 - explained) / (denom * denom))
}

/// Default AIC search ceiling, `min(n - 2, ceil(10 log10 n))`.
pub fn default_max_order(n: usize) -> usize {
    let heuristic = (10.0 * (n as f64).log10()).ceil() as usize;
    heuristic.min(n.saturating_sub(2))
}

fn check_series(series: &TimeSeries) -> Result<()> {
    if series.len() < 2 {
        return Err(Error::DegenerateSeries(
            "AR fitting needs at least two values".into(),
        ));
    }
    Ok(())
}

/// `argmin_p n ln(sigma_a2(p)) + 2p` over a Levinson path; ties go to the
/// smaller order.
fn aic_argmin(steps: &[LevinsonStep], n: usize, s2: f64) -> usize {
    let mut best = (0, f64::INFINITY);
    for (p, step) in steps.iter().enumerate() {
        let aic = n as f64 * (s2 * step.rel_var).ln() + 2.0 * p as f64;
        if aic < best.1 {
            best = (p, aic);
        }
    }
    best.0
}

/// AIC-selected order in `0..=max_order`; `None` uses [`default_max_order`].
/// Requests above `n - 2` are clamped.
pub fn select_order_aic(series: &TimeSeries, max_order: Option<usize>) -> Result<usize> {
    check_series(series)?;
    let n = series.len();
    let p_max = max_order
        .unwrap_or_else(|| default_max_order(n))
        .min(n - 2);
    let acf = sample_acf(series, p_max)?;
    let steps = levinson_durbin(&acf.rho, p_max);
    Ok(aic_argmin(&steps, n, acf.s2))
}

fn build_fit(series: &TimeSeries, acf: &AcfVector, step: &LevinsonStep) -> ArFit {
    let p = step.pi.len();
    ArFit {
        order: p,
        pi: step.pi.clone(),
        sigma_a2: acf.s2 * step.rel_var,
        coeff_cov: DMatrix::zeros(p, p),
        mu: series.mean(),
        s2: acf.s2,
        rho: acf.rho[1..=p].to_vec(),
        n: series.len(),
    }
}

/// Fills in `(sigma_a2 / s2) R_p^{-1} / n`.
fn attach_covariance(fit: &mut ArFit, acf: &AcfVector) -> Result<()> {
    let p = fit.order;
    if p == 0 {
        return Ok(());
    }
    let toeplitz = DMatrix::from_fn(p, p, |i, j| acf.rho[i.abs_diff(j)]);
    let eig = toeplitz.clone().symmetric_eigenvalues();
    let (lo, hi) = eig
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e.abs())));
    let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(cond <= MAX_CONDITION) {
        return Err(Error::SingularSystem(cond));
    }
    let inv = toeplitz
        .cholesky()
        .ok_or(Error::SingularSystem(cond))?
        .inverse();
    fit.coeff_cov = inv * (fit.sigma_a2 / fit.s2 / fit.n as f64);
    Ok(())
}

/// Yule-Walker fit of order `p`, including the coefficient covariance.
pub fn yule_walker(series: &TimeSeries, p: usize) -> Result<ArFit> {
    check_series(series)?;
    let n = series.len();
    if p > n - 2 {
        return Err(Error::InvalidArgument(format!(
            "AR order {p} exceeds n - 2 = {}",
            n - 2
        )));
    }
    let acf = sample_acf(series, p)?;
    let steps = levinson_durbin(&acf.rho, p);
    // the recursion stops early when the Toeplitz system is singular
    let step = steps.get(p).ok_or(Error::SingularSystem(f64::INFINITY))?;
    let mut fit = build_fit(series, &acf, step);
    attach_covariance(&mut fit, &acf)?;
    Ok(fit)
}

/// Order selection for [`fit_ar`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ArOptions {
    /// Fixed order; skips the AIC search.
    pub order: Option<usize>,
    /// Ceiling for the AIC search.
    pub max_order: Option<usize>,
}

/// Fits with a fixed or AIC-selected order. The covariance is only
/// computed when `with_covariance` is set.
pub fn fit_ar(series: &TimeSeries, options: ArOptions, with_covariance: bool) -> Result<ArFit> {
    check_series(series)?;
    let n = series.len();
    let p_max = match options.order {
        Some(p) if p > n - 2 => {
            return Err(Error::InvalidArgument(format!(
                "AR order {p} exceeds n - 2 = {}",
                n - 2
            )))
        }
        Some(p) => p,
        None => options
            .max_order
            .unwrap_or_else(|| default_max_order(n))
            .min(n - 2),
    };
    let acf = sample_acf(series, p_max)?;
    let steps = levinson_durbin(&acf.rho, p_max);
    let p = match options.order {
        Some(p) => {
            if steps.len() <= p {
                return Err(Error::SingularSystem(f64::INFINITY));
            }
            p
        }
        None => aic_argmin(&steps, n, acf.s2),
    };
    let mut fit = build_fit(series, &acf, &steps[p]);
    if with_covariance {
        attach_covariance(&mut fit, &acf)?;
    }
    Ok(fit)
}

pub fn ar_tau_with(series: &TimeSeries, options: ArOptions) -> Result<TauEstimate> {
    let fit = fit_ar(series, options, false)?;
    Ok(TauEstimate {
        tau: fit.tau()?,
        method: Method::ArProcess,
        n_used: series.len(),
        detail: Detail::ArProcess { order: fit.order },
    })
}

/// AR-process estimate with the AIC-selected order.
pub fn ar_tau(series: &TimeSeries) -> Result<TauEstimate> {
    ar_tau_with(series, ArOptions::default())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauInterval {
    pub estimate: TauEstimate,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub n_draws: usize,
    pub n_rejected: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiOptions {
    pub level: f64,
    pub n_draws: usize,
    pub seed: u64,
    pub ar: ArOptions,
}

impl Default for CiOptions {
    fn default() -> Self {
        Self {
            level: 0.95,
            n_draws: 1000,
            seed: 0,
            ar: ArOptions::default(),
        }
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Percentile interval from draws of the coefficients around the fit.
///
/// Draw `i` uses its own ChaCha8 stream of `seed`, so the result does not
/// depend on how draws are scheduled across threads.
pub fn ar_tau_ci_with(series: &TimeSeries, options: CiOptions) -> Result<TauInterval> {
    if !(options.level > 0.0 && options.level < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "confidence level must lie in (0, 1), got {}",
            options.level
        )));
    }
    if options.n_draws < 100 {
        return Err(Error::InvalidArgument(format!(
            "need at least 100 draws, got {}",
            options.n_draws
        )));
    }
    let fit = fit_ar(series, options.ar, true)?;
    let tau = fit.tau()?;
    let estimate = TauEstimate {
        tau,
        method: Method::ArProcess,
        n_used: series.len(),
        detail: Detail::ArProcess { order: fit.order },
    };
    if fit.order == 0 {
        return Ok(TauInterval {
            estimate,
            lower: 1.0,
            upper: 1.0,
            level: options.level,
            n_draws: options.n_draws,
            n_rejected: 0,
        });
    }
    let p = fit.order;
    let chol = fit
        .coeff_cov
        .clone()
        .cholesky()
        .ok_or(Error::SingularSystem(f64::INFINITY))?;
    let l = chol.l();
    let center = DVector::from_column_slice(&fit.pi);
    let draws: Vec<Option<f64>> = (0..options.n_draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            rng.set_stream(i as u64);
            let z = DVector::from_fn(p, |_, _| StandardNormal.sample(&mut rng));
            let pi_star = &center + &l * z;
            let rho_star = implied_acf_of(pi_star.as_slice(), p).ok()?;
            tau_from_coefficients(pi_star.as_slice(), &rho_star[1..]).ok()
        })
        .collect();
    let mut taus: Vec<f64> = draws.into_iter().flatten().filter(|t| t.is_finite()).collect();
    let n_rejected = options.n_draws - taus.len();
    if 2 * n_rejected > options.n_draws {
        return Err(Error::TooManyRejections {
            rejected: n_rejected,
            draws: options.n_draws,
        });
    }
    taus.sort_by(f64::total_cmp);
    let alpha = (1.0 - options.level) / 2.0;
    Ok(TauInterval {
        estimate,
        lower: quantile_sorted(&taus, alpha),
        upper: quantile_sorted(&taus, 1.0 - alpha),
        level: options.level,
        n_draws: options.n_draws,
        n_rejected,
    })
}

pub fn ar_tau_ci(series: &TimeSeries, level: f64, n_draws: usize, seed: u64) -> Result<TauInterval> {
    ar_tau_ci_with(
        series,
        CiOptions {
            level,
            n_draws,
            seed,
            ar: ArOptions::default(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wiggly(n: usize) -> TimeSeries {
        let mut x = 0.0;
        let v = (0..n)
            .map(|i| {
                x = 0.6 * x + ((i * 7919 % 1013) as f64 / 1013.0 - 0.5);
                x
            })
            .collect();
        TimeSeries::new(v).unwrap()
    }

    #[test]
    fn order_zero_fit() {
        let s = wiggly(200);
        let fit = yule_walker(&s, 0).unwrap();
        assert!(fit.pi.is_empty());
        assert_eq!(fit.sigma_a2, s.variance().unwrap());
        assert_eq!(fit.tau().unwrap(), 1.0);
    }

    #[test]
    fn order_one_coefficient_is_lag_one_acf() {
        let s = wiggly(300);
        let fit = yule_walker(&s, 1).unwrap();
        let acf = sample_acf(&s, 1).unwrap();
        assert_eq!(fit.pi[0], acf.rho[1]);
        let r = acf.rho[1];
        let closed = (1.0 + r) / (1.0 - r);
        assert!((fit.tau().unwrap() - closed).abs() < 1e-12 * closed);
    }

    #[test]
    fn closed_form_ar1_tau() {
        let tau = tau_from_coefficients(&[0.98], &[0.98]).unwrap();
        assert!((tau - 99.0).abs() < 1e-9 * 99.0);
    }

    #[test]
    fn implied_acf_examples() {
        let rho = implied_acf_of(&[0.5], 6).unwrap();
        for (k, r) in rho.iter().enumerate() {
            assert!((r - 0.5f64.powi(k as i32)).abs() < 1e-15);
        }
        assert_eq!(implied_acf_of(&[], 3).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        let rho = implied_acf_of(&[1.98, -0.99], 2).unwrap();
        assert!((rho[1] - 1.98 / 1.99).abs() < 1e-12);
        assert!((rho[2] - (1.98 * rho[1] - 0.99)).abs() < 1e-12);
    }

    #[test]
    fn ar2_truth() {
        let rho = implied_acf_of(&[1.98, -0.99], 2).unwrap();
        let tau = tau_from_coefficients(&[1.98, -0.99], &rho[1..]).unwrap();
        assert!((tau - 3.97 / 1.99).abs() < 1e-9, "{tau}");
    }

    #[test]
    fn unstable_coefficients() {
        assert!(matches!(implied_acf_of(&[1.0], 3), Err(Error::Unstable)));
        assert!(matches!(implied_acf_of(&[0.5, 0.6], 3), Err(Error::Unstable)));
        assert!(is_stationary(&[1.98, -0.99]));
        assert!(!is_stationary(&[1.98, -1.0]));
    }

    #[test]
    fn spectral_radius_agrees_with_step_down() {
        for pi in [
            vec![0.5],
            vec![1.98, -0.99],
            vec![0.5, 0.6],
            vec![0.3, 0.2, 0.1],
            vec![-1.2, -0.5, 0.1],
            vec![0.9, 0.05, 0.1],
        ] {
            let r = spectral_radius(&pi);
            assert_eq!(r < 1.0, is_stationary(&pi), "{pi:?} radius {r}");
        }
        assert!((spectral_radius(&[1.98, -0.99]) - 0.99f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn levinson_matches_direct_solve() {
        let s = wiggly(500);
        let acf = sample_acf(&s, 6).unwrap();
        let steps = levinson_durbin(&acf.rho, 6);
        for (p, step) in steps.iter().enumerate().skip(1) {
            let r = DMatrix::from_fn(p, p, |i, j| acf.rho[i.abs_diff(j)]);
            let b = DVector::from_column_slice(&acf.rho[1..=p]);
            let direct = r.lu().solve(&b).unwrap();
            for (d, c) in direct.iter().zip(&step.pi) {
                assert!((d - c).abs() < 1e-10);
            }
        }
        assert_eq!(steps.len(), 7);
    }

    #[test]
    fn aic_clamps_order_ceiling() {
        let s = wiggly(10);
        assert_eq!(default_max_order(10), 8);
        let p = select_order_aic(&s, Some(10)).unwrap();
        assert!(p <= 8);
    }

    #[test]
    fn ci_validates_arguments() {
        let s = wiggly(400);
        assert!(ar_tau_ci(&s, 1.0, 1000, 1).is_err());
        assert!(ar_tau_ci(&s, 0.95, 50, 1).is_err());
    }

    #[test]
    fn ci_is_deterministic() {
        let s = wiggly(2000);
        let a = ar_tau_ci(&s, 0.95, 500, 11).unwrap();
        let b = ar_tau_ci(&s, 0.95, 500, 11).unwrap();
        assert_eq!(a, b);
        assert!(a.lower <= a.upper);
    }

    #[test]
    fn constant_series_is_degenerate() {
        let s = TimeSeries::new(vec![4.0; 30]).unwrap();
        assert!(matches!(ar_tau(&s), Err(Error::DegenerateSeries(_))));
        assert!(matches!(yule_walker(&s, 2), Err(Error::DegenerateSeries(_))));
    }
}
