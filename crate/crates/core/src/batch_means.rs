//! Non-overlapping batch means.

use crate::error::{Error, Result};
use crate::estimate::{Detail, Method, TauEstimate};
use crate::series::{mean, variance, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailPolicy {
    /// Elements past `num_batches * batch_size` are ignored.
    DropTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchPlan {
    pub batch_size: usize,
    pub num_batches: usize,
    pub tail_policy: TailPolicy,
}

impl BatchPlan {
    /// Batches of size `floor(n^(2/3))`, as many as fit.
    pub fn default_for(n: usize) -> Result<Self> {
        if n < 8 {
            return Err(Error::TooShort(format!(
                "batch means needs n >= 8, got {n}"
            )));
        }
        Self::with_batch_size(n, icbrt_of_square(n))
    }

    pub fn with_batch_size(n: usize, batch_size: usize) -> Result<Self> {
        if batch_size == 0 {
            return Err(Error::TooShort("batch size must be positive".into()));
        }
        let plan = BatchPlan {
            batch_size,
            num_batches: n / batch_size,
            tail_policy: TailPolicy::DropTail,
        };
        plan.validate(n)?;
        Ok(plan)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.batch_size == 0 || self.num_batches < 2 {
            return Err(Error::TooShort(format!(
                "need at least 2 batches of positive size, got {} of size {}",
                self.num_batches, self.batch_size
            )));
        }
        if self.num_batches * self.batch_size > n {
            return Err(Error::TooShort(format!(
                "{} batches of size {} exceed n = {n}",
                self.num_batches, self.batch_size
            )));
        }
        Ok(())
    }

    pub fn used_len(&self) -> usize {
        self.num_batches * self.batch_size
    }
}

/// Largest m with m^3 <= n^2, i.e. floor(n^(2/3)) without float rounding.
fn icbrt_of_square(n: usize) -> usize {
    let sq = (n as u128) * (n as u128);
    let mut m = (n as f64).powf(2.0 / 3.0).round() as u128;
    while m * m * m > sq {
        m -= 1;
    }
    while (m + 1) * (m + 1) * (m + 1) <= sq {
        m += 1;
    }
    m as usize
}

pub fn default_plan(n: usize) -> Result<BatchPlan> {
    BatchPlan::default_for(n)
}

/// `m * s_m^2 / s^2` over the first `num_batches * m` values.
pub fn batch_means_tau(series: &TimeSeries, plan: Option<BatchPlan>) -> Result<TauEstimate> {
    let n = series.len();
    let plan = match plan {
        Some(p) => {
            p.validate(n)?;
            p
        }
        None => BatchPlan::default_for(n)?,
    };
    let x = &series.values()[..plan.used_len()];
    let s2 = variance(x);
    if !(s2 > 0.0) {
        return Err(Error::DegenerateSeries("sample variance is zero".into()));
    }
    let batch_means: Vec<f64> = x.chunks_exact(plan.batch_size).map(mean).collect();
    let sm2 = variance(&batch_means);
    let tau = plan.batch_size as f64 * sm2 / s2;
    if !(tau > 0.0) {
        return Err(Error::FailedEstimate(
            "batch means are all identical".into(),
        ));
    }
    Ok(TauEstimate {
        tau,
        method: Method::BatchMeans,
        n_used: n,
        detail: Detail::BatchMeans {
            batch_size: plan.batch_size,
            num_batches: plan.num_batches,
        },
    })
}
