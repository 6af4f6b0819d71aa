#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Lower hull evaluated at each point: the smallest chord value over all
/// pairs `a <= i <= b`. Quadratic in the length per point.
pub fn brute_force_gcm(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let mut best = v[i];
            for a in 0..=i {
                for b in i..n {
                    if a == b {
                        continue;
                    }
                    let t = (i - a) as f64 / (b - a) as f64;
                    best = best.min(v[a] + t * (v[b] - v[a]));
                }
            }
            best
        })
        .collect()
}

/// AR coefficients from reflection coefficients by the step-up recursion.
pub fn step_up(kappas: &[f64]) -> Vec<f64> {
    let mut pi: Vec<f64> = Vec::new();
    for (k, &kappa) in kappas.iter().enumerate().map(|(i, x)| (i + 1, x)) {
        let mut next: Vec<f64> = (0..k - 1).map(|j| pi[j] - kappa * pi[k - 2 - j]).collect();
        next.push(kappa);
        pi = next;
    }
    pi
}

/// Random stationary AR coefficients of order `1..=max_order` whose
/// companion roots all have modulus at most `max_radius`, so the implied
/// ACF decays fast enough to be summed directly.
pub fn random_stationary(rng: &mut ChaCha8Rng, max_order: usize, max_radius: f64) -> Vec<f64> {
    loop {
        let p = rng.random_range(1..=max_order);
        let kappas: Vec<f64> = (0..p).map(|_| rng.random_range(-0.95..0.95)).collect();
        let pi = step_up(&kappas);
        if actime::ar::spectral_radius(&pi) <= max_radius {
            return pi;
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
