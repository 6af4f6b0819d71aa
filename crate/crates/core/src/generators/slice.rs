//! Univariate slice sampling with stepping out and shrinkage.

use rand::Rng;

/// Interval construction settings for one coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOut {
    /// Initial interval width.
    pub width: f64,
    /// Limit on the total number of interval positions, including the
    /// initial one; `None` steps out until both ends leave the slice.
    pub max_steps: Option<usize>,
}

impl StepOut {
    pub fn unlimited(width: f64) -> Self {
        Self {
            width,
            max_steps: None,
        }
    }
}

/// One slice-sampling update of `x0` under the unnormalized log density
/// `log_f`. `log_f(x0)` must be finite.
pub fn slice_step<R: Rng + ?Sized>(
    x0: f64,
    mut log_f: impl FnMut(f64) -> f64,
    tuning: StepOut,
    rng: &mut R,
) -> f64 {
    let w = tuning.width;
    // log of the auxiliary height; Exp(1) below log_f(x0)
    let level = log_f(x0) + rng.random::<f64>().ln();

    let mut left = x0 - w * rng.random::<f64>();
    let mut right = left + w;
    match tuning.max_steps {
        None => {
            while log_f(left) > level {
                left -= w;
            }
            while log_f(right) > level {
                right += w;
            }
        }
        Some(m) => {
            let m = m.max(1);
            let mut j = ((m as f64 * rng.random::<f64>()) as usize).min(m - 1);
            let mut k = (m - 1) - j;
            while j > 0 && log_f(left) > level {
                left -= w;
                j -= 1;
            }
            while k > 0 && log_f(right) > level {
                right += w;
                k -= 1;
            }
        }
    }

    loop {
        let x1 = left + rng.random::<f64>() * (right - left);
        if log_f(x1) > level {
            return x1;
        }
        if x1 < x0 {
            left = x1;
        } else {
            right = x1;
        }
    }
}
