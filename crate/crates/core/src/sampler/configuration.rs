//! Configuration model with whole-matching rejection.

use rand::Rng;

use super::{check_params, SamplerError};
use crate::bits;
use crate::graph::Digraph;

/// Asymptotic probability that a uniform stub matching is simple:
/// `exp(-(d'-1)^2 / 2)` with `d' = min(d, n-d)` (dense cases are sampled
/// through the complement).
pub fn configuration_acceptance_estimate(n: usize, d: usize) -> f64 {
    if d == n {
        return 1.0;
    }
    let dd = d.min(n - d) as f64;
    (-(dd - 1.0) * (dd - 1.0) / 2.0).exp()
}

pub(super) fn check_budget(n: usize, d: usize, budget: u64) -> Result<(), SamplerError> {
    let expected = 1.0 / configuration_acceptance_estimate(n, d);
    if expected > budget as f64 {
        Err(SamplerError::RetryBudget { expected_attempts: expected, budget })
    } else {
        Ok(())
    }
}

/// Exactly uniform sample from `D_{n,d}` with the default retry budget.
pub fn sample_configuration<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<Digraph, SamplerError> {
    sample_with_budget(n, d, super::default_retry_budget(), rng)
}

pub(crate) fn sample_with_budget<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    budget: u64,
    rng: &mut R,
) -> Result<Digraph, SamplerError> {
    check_params(n, d)?;
    if d == n {
        return Ok(Digraph::complete(n));
    }
    check_budget(n, d, budget)?;
    if 2 * d > n {
        // Complementation is a bijection D_{n,d} -> D_{n,n-d}.
        let g = matching_with_rejection(n, n - d, budget, rng)?;
        return Ok(g.complement().expect("n - d < n"));
    }
    matching_with_rejection(n, d, budget, rng)
}

fn matching_with_rejection<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    budget: u64,
    rng: &mut R,
) -> Result<Digraph, SamplerError> {
    let total = n * d;
    let words = bits::words_for(n);
    let mut pool: Vec<u32> = Vec::with_capacity(total);
    let mut row_bits = vec![0u64; n * words];
    for _ in 0..budget {
        // Fresh in-stub pool for every attempt: out-stub p (row p / d) is
        // matched to a uniformly chosen remaining in-stub. A collision rejects
        // the entire matching, which keeps accepted graphs exactly uniform.
        pool.clear();
        pool.extend((0..n as u32).flat_map(|j| std::iter::repeat(j).take(d)));
        row_bits.iter_mut().for_each(|w| *w = 0);
        let mut ok = true;
        for p in 0..total {
            let r = rng.gen_range(p..total);
            pool.swap(p, r);
            let j = pool[p] as usize;
            let row = &mut row_bits[(p / d) * words..(p / d + 1) * words];
            if bits::get(row, j) {
                ok = false;
                break;
            }
            bits::set(row, j);
        }
        if ok {
            return Ok(Digraph::from_row_bits(n, d, row_bits));
        }
    }
    Err(SamplerError::RetryBudget {
        expected_attempts: 1.0 / configuration_acceptance_estimate(n, d),
        budget,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::task_rng;

    #[test]
    fn single_vertex_loop() {
        let mut rng = task_rng(1, 0);
        for _ in 0..10 {
            let g = sample_configuration(1, 1, &mut rng).unwrap();
            assert!(g.has_edge(0, 0));
        }
    }

    #[test]
    fn two_permutations_are_equiprobable() {
        let mut rng = task_rng(2, 0);
        let trials = 10_000;
        let mut identity = 0;
        for _ in 0..trials {
            let g = sample_configuration(2, 1, &mut rng).unwrap();
            if g.has_edge(0, 0) {
                identity += 1;
            }
        }
        let sigma = (trials as f64 * 0.25).sqrt();
        assert!((identity as f64 - trials as f64 / 2.0).abs() <= 3.0 * sigma, "{identity}");
    }

    #[test]
    fn dense_goes_through_complement() {
        let mut rng = task_rng(3, 0);
        let g = sample_configuration(9, 7, &mut rng).unwrap();
        assert_eq!(g.d(), 7);
        assert!(g.check_invariants().is_ok());
    }

    #[test]
    fn refuses_hopeless_budget() {
        let mut rng = task_rng(4, 0);
        assert!(matches!(
            sample_configuration(400, 20, &mut rng),
            Err(SamplerError::RetryBudget { .. })
        ));
    }
}
