//! Small statistical helpers for Monte Carlo reports.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// z-quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.959_963_984_540_054;

/// A binomial proportion with its Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub lo: f64,
    pub hi: f64,
    /// One-sided 95% upper bound; `3/N` (rule of three) when no successes were seen.
    pub upper_95: f64,
}

/// Wilson score interval at quantile `z`.
pub fn wilson(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let den = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / den;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / den;
    // Clamp so the interval always contains p even after rounding.
    ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
}

impl Proportion {
    pub fn new(successes: u64, trials: u64) -> Self {
        assert!(successes <= trials, "successes exceed trials");
        let p_hat = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        let (lo, hi) = wilson(successes, trials, Z95);
        let upper_95 = if successes == 0 && trials > 0 {
            (3.0 / trials as f64).min(1.0)
        } else {
            // One-sided 95% uses z = 1.645.
            wilson(successes, trials, 1.644_853_626_951_472).1
        };
        Proportion { successes, trials, p_hat, lo, hi, upper_95 }
    }

    /// Binomial standard error `sqrt(p(1-p)/N)` at the estimate.
    pub fn std_err(&self) -> f64 {
        binomial_sigma(self.p_hat, self.trials)
    }
}

/// Standard deviation of the mean of `trials` Bernoulli(`p`) draws.
pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
    if trials == 0 {
        return f64::INFINITY;
    }
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// Pearson chi-square goodness-of-fit result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Tests observed counts against a uniform distribution over `observed.len()` cells.
pub fn chi_square_uniform(observed: &[u64]) -> ChiSquare {
    let total: u64 = observed.iter().sum();
    let expected = vec![total as f64 / observed.len() as f64; observed.len()];
    chi_square(observed, &expected)
}

/// Tests observed counts against expected counts.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> ChiSquare {
    assert_eq!(observed.len(), expected.len());
    assert!(observed.len() >= 2, "need at least two cells");
    let statistic: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let diff = o as f64 - e;
            diff * diff / e
        })
        .sum();
    let dof = observed.len() - 1;
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    ChiSquare { statistic, dof, p_value: 1.0 - dist.cdf(statistic) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_estimate() {
        for &(s, n) in &[(0u64, 10u64), (1, 10), (5, 10), (10, 10), (3, 100_000)] {
            let p = Proportion::new(s, n);
            assert!(p.lo <= p.p_hat && p.p_hat <= p.hi);
            assert!((0.0..=1.0).contains(&p.lo) && (0.0..=1.0).contains(&p.hi));
        }
        assert_eq!(Proportion::new(0, 300).upper_95, 0.01);
    }

    #[test]
    fn wilson_known_value() {
        // 5/10 at 95%: (0.2366, 0.7634).
        let (lo, hi) = wilson(5, 10, Z95);
        assert!((lo - 0.2366).abs() < 1e-4 && (hi - 0.7634).abs() < 1e-4);
    }

    #[test]
    fn chi_square_uniform_cases() {
        let flat = chi_square_uniform(&[100, 100, 100, 100]);
        assert_eq!(flat.statistic, 0.0);
        assert!((flat.p_value - 1.0).abs() < 1e-12);
        let skew = chi_square_uniform(&[400, 0, 0, 0]);
        assert!(skew.p_value < 1e-10);
        // 2 dof, statistic 2 → p = e^{-1}.
        let c = chi_square(&[12, 8, 10], &[10.0, 10.0, 10.0]);
        assert_eq!(c.dof, 2);
        assert!((c.statistic - 0.8).abs() < 1e-12);
        assert!((c.p_value - (-0.4f64).exp()).abs() < 1e-9);
    }
}
