//! Hierarchical normal-means posterior used as the slice-sampling target.
//!
//! `y_j ~ N(theta_j, sigma_j^2)`, `theta_j ~ N(mu, exp(v))`, flat prior on
//! `mu`, inverse-gamma(shape, scale) prior on the group variance `exp(v)`.
//! State layout: `theta_1..theta_J, mu, v`.

use rand::Rng;

use super::slice::{slice_step, StepOut};

/// Effects and standard errors of the classic eight-school study.
pub const SCHOOL_EFFECTS: [f64; 8] = [28.0, 8.0, -3.0, 7.0, -1.0, 1.0, 18.0, 12.0];
pub const SCHOOL_SE: [f64; 8] = [15.0, 10.0, 16.0, 11.0, 9.0, 11.0, 10.0, 18.0];

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchicalNormal {
    pub y: Vec<f64>,
    pub sigma: Vec<f64>,
    pub prior_shape: f64,
    pub prior_scale: f64,
}

impl HierarchicalNormal {
    pub fn eight_schools(prior_shape: f64, prior_scale: f64) -> Self {
        Self {
            y: SCHOOL_EFFECTS.to_vec(),
            sigma: SCHOOL_SE.to_vec(),
            prior_shape,
            prior_scale,
        }
    }

    pub fn groups(&self) -> usize {
        self.y.len()
    }

    pub fn dim(&self) -> usize {
        self.groups() + 2
    }

    /// Unnormalized joint log posterior over `(theta, mu, v)`.
    pub fn log_density(&self, state: &[f64]) -> f64 {
        let j = self.groups();
        let (theta, mu, v) = (&state[..j], state[j], state[j + 1]);
        let lik: f64 = theta
            .iter()
            .zip(&self.y)
            .zip(&self.sigma)
            .map(|((t, y), s)| -0.5 * ((y - t) / s).powi(2))
            .sum();
        let spread: f64 = theta.iter().map(|t| (t - mu).powi(2)).sum();
        lik + self.log_v_conditional(v, spread)
    }

    /// Log density of `v` given the group means, up to a constant;
    /// `spread = sum_j (theta_j - mu)^2`.
    fn log_v_conditional(&self, v: f64, spread: f64) -> f64 {
        let inv = (-v).exp();
        -0.5 * spread * inv - 0.5 * self.groups() as f64 * v - self.prior_shape * v
            - self.prior_scale * inv
    }

    /// Log marginal posterior of `v` with `theta` and `mu` integrated out,
    /// up to a constant.
    pub fn log_marginal_v(&self, v: f64) -> f64 {
        let t2 = v.exp();
        let prec: Vec<f64> = self.sigma.iter().map(|s| 1.0 / (s * s + t2)).collect();
        let total: f64 = prec.iter().sum();
        let mu_hat = self.y.iter().zip(&prec).map(|(y, p)| y * p).sum::<f64>() / total;
        let fit: f64 = self
            .y
            .iter()
            .zip(&prec)
            .map(|(y, p)| 0.5 * p.ln() - 0.5 * (y - mu_hat).powi(2) * p)
            .sum();
        fit - 0.5 * total.ln() - self.prior_shape * v - self.prior_scale * (-v).exp()
    }
}

/// Tuning of the componentwise sampler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepTuning {
    pub mean_step: StepOut,
    pub logvar_step: StepOut,
}

/// Updates every coordinate once, in order, by slice sampling.
pub fn slice_sweep<R: Rng + ?Sized>(
    target: &HierarchicalNormal,
    state: &mut [f64],
    tuning: SweepTuning,
    rng: &mut R,
) {
    let j = target.groups();
    for g in 0..j {
        let (y, s) = (target.y[g], target.sigma[g]);
        let (mu, inv) = (state[j], (-state[j + 1]).exp());
        state[g] = slice_step(
            state[g],
            |t| -0.5 * ((y - t) / s).powi(2) - 0.5 * (t - mu).powi(2) * inv,
            tuning.mean_step,
            rng,
        );
    }
    let inv = (-state[j + 1]).exp();
    let theta = &state[..j];
    state[j] = slice_step(
        state[j],
        |m| -0.5 * inv * theta.iter().map(|t| (t - m).powi(2)).sum::<f64>(),
        tuning.mean_step,
        rng,
    );
    let mu = state[j];
    let spread: f64 = state[..j].iter().map(|t| (t - mu).powi(2)).sum();
    state[j + 1] = slice_step(
        state[j + 1],
        |v| target.log_v_conditional(v, spread),
        tuning.logvar_step,
        rng,
    );
}
