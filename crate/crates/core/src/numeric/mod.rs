//! Shared numeric helpers: binomial coefficients (exact and log-space),
//! compensated summation, least squares, and test statistics.

pub mod quad;

use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::ln_gamma;

/// Largest n for which `n choose k` is computed by exact integer arithmetic.
pub const EXACT_CHOOSE_MAX: u64 = 60;

/// Exact binomial coefficient in integer arithmetic. Only valid for n <= 60
/// (C(60,30) still fits comfortably in a u128).
pub fn choose_exact(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// ln C(n, k) via log-gamma; used wherever n may exceed the exact range.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    ln_gamma((n + 1) as f64) - ln_gamma((k + 1) as f64) - ln_gamma((n - k + 1) as f64)
}

/// C(n, k) as f64: exact path for small n, log-space otherwise.
pub fn choose(n: u64, k: u64) -> f64 {
    if n <= EXACT_CHOOSE_MAX {
        choose_exact(n, k) as f64
    } else {
        ln_choose(n, k).exp()
    }
}

pub fn ln_beta_fn(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Kahan–Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Ordinary least squares y = a + b x.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Maximum absolute residual over the fitted points.
    pub max_residual: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Some(LineFit {
        slope,
        intercept,
        max_residual,
    })
}

/// Sample mean and standard error of the mean.
pub fn mean_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    if samples.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn median(samples: &mut [f64]) -> f64 {
    if samples.is_empty() {
        return f64::NAN;
    }
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len();
    if n % 2 == 1 {
        samples[n / 2]
    } else {
        0.5 * (samples[n / 2 - 1] + samples[n / 2])
    }
}

/// Two-sample chi-square homogeneity test on category counts.
/// Returns the p-value; categories with zero combined count are dropped.
pub fn chi_square_two_sample(counts_a: &[u64], counts_b: &[u64]) -> f64 {
    assert_eq!(counts_a.len(), counts_b.len());
    let total_a: u64 = counts_a.iter().sum();
    let total_b: u64 = counts_b.iter().sum();
    if total_a == 0 || total_b == 0 {
        return f64::NAN;
    }
    let grand = (total_a + total_b) as f64;
    let mut stat = 0.0;
    let mut dof: i64 = -1;
    for (&a, &b) in counts_a.iter().zip(counts_b) {
        let col = (a + b) as f64;
        if col == 0.0 {
            continue;
        }
        dof += 1;
        let ea = col * total_a as f64 / grand;
        let eb = col * total_b as f64 / grand;
        stat += (a as f64 - ea).powi(2) / ea + (b as f64 - eb).powi(2) / eb;
    }
    if dof < 1 {
        return 1.0;
    }
    let dist = ChiSquared::new(dof as f64).expect("positive dof");
    1.0 - dist.cdf(stat)
}

/// Goodness-of-fit chi-square of observed counts against given probabilities.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> f64 {
    assert_eq!(observed.len(), probs.len());
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return f64::NAN;
    }
    let mut stat = 0.0;
    let mut dof: i64 = -1;
    for (&o, &p) in observed.iter().zip(probs) {
        let e = p * total as f64;
        if e < 1e-12 {
            continue;
        }
        dof += 1;
        stat += (o as f64 - e).powi(2) / e;
    }
    if dof < 1 {
        return 1.0;
    }
    let dist = ChiSquared::new(dof as f64).expect("positive dof");
    1.0 - dist.cdf(stat)
}

/// Asymptotic two-sample Kolmogorov–Smirnov p-value.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::NAN;
    }
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut d: f64 = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        let fa = i as f64 / na;
        let fb = j as f64 / nb;
        d = d.max((fa - fb).abs());
    }
    let ne = (na * nb / (na + nb)).sqrt();
    let lambda = (ne + 0.12 + 0.11 / ne) * d;
    // Kolmogorov tail series
    let mut p = 0.0;
    for k in 1..=100 {
        let term = 2.0 * (-1.0f64).powi(k as i32 + 1) * (-2.0 * (k as f64 * lambda).powi(2)).exp();
        p += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn choose_small_values() {
        assert_eq!(choose_exact(4, 2), 6);
        assert_eq!(choose_exact(10, 3), 120);
        assert_eq!(choose_exact(60, 30), 118264581564861424);
    }

    #[test]
    fn pascal_identity_exact_to_60() {
        for n in 1..=60u64 {
            for k in 1..=n {
                assert_eq!(
                    choose_exact(n, k) + choose_exact(n, k - 1),
                    choose_exact(n + 1, k),
                    "Pascal failed at n={n} k={k}"
                );
            }
        }
    }

    #[test]
    fn pascal_identity_log_space_beyond_60() {
        for n in [61u64, 80, 100, 200] {
            for k in [2u64, n / 3, n / 2, n - 1] {
                let lhs = ln_choose(n, k).exp() + ln_choose(n, k - 1).exp();
                let rhs = ln_choose(n + 1, k).exp();
                assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn line_fit_recovers_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x).collect();
        let fit = fit_line(&xs, &ys).unwrap();
        assert_relative_eq!(fit.slope, -2.0, epsilon = 1e-12);
        assert_relative_eq!(fit.intercept, 3.0, epsilon = 1e-12);
        assert!(fit.max_residual < 1e-12);
    }

    #[test]
    fn kahan_beats_naive_on_small_terms() {
        let mut k = Kahan::new();
        k.add(1.0);
        for _ in 0..1_000_000 {
            k.add(1e-16);
        }
        assert_relative_eq!(k.value(), 1.0 + 1e-10, max_relative = 1e-12);
    }

    #[test]
    fn chi_square_identical_samples_high_p() {
        let a = [100u64, 200, 300];
        let p = chi_square_two_sample(&a, &a);
        assert!(p > 0.99, "p={p}");
    }
}
