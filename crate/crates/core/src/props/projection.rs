//! Frequency of `‖P_S M y‖_∞ < a` for vectors `y` that are constant on `J_λ`
//! and separated from that constant by `2a` on `J`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::PropsError;
use crate::graph::{Digraph, Vertex};
use crate::sampler::{ChainConfig, FrozenColumnSet, SampleSource};
use crate::stats::Proportion;

/// A partition of `[n]` into `I`, `J`, `J_λ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub i_set: Vec<Vertex>,
    pub j_set: Vec<Vertex>,
    pub j_lambda: Vec<Vertex>,
}

/// Validated event, with `y` and `a` scaled to a common integer denominator.
#[derive(Debug, Clone)]
pub struct ProjectionQuery {
    n: usize,
    y: Vec<i128>,
    a: i128,
    s_set: Vec<Vertex>,
    j_len: usize,
}

fn hypothesis(clause: &str) -> PropsError {
    PropsError::Hypothesis(clause.to_string())
}

impl ProjectionQuery {
    pub fn new(
        n: usize,
        part: &Partition,
        lambda: &BigRational,
        y: &[BigRational],
        a: &BigRational,
        s_set: &[Vertex],
    ) -> Result<Self, PropsError> {
        if y.len() != n {
            return Err(PropsError::InvalidParam(format!("y has length {}, expected {n}", y.len())));
        }
        if !a.is_positive() {
            return Err(hypothesis("a > 0"));
        }
        let mut seen = vec![0u8; n];
        for &v in part.i_set.iter().chain(&part.j_set).chain(&part.j_lambda) {
            if v >= n {
                return Err(hypothesis("I, J, J_lambda partition [n]: index out of range"));
            }
            seen[v] += 1;
        }
        if seen.iter().any(|&c| c != 1) {
            return Err(hypothesis("I, J, J_lambda partition [n]"));
        }
        if part.j_set.is_empty() {
            return Err(hypothesis("J nonempty"));
        }
        if part.j_lambda.iter().any(|&l| &y[l] != lambda) {
            return Err(hypothesis("y_l = lambda for l in J_lambda"));
        }
        let two_a = a * BigRational::from_integer(2.into());
        let above = part.j_set.iter().all(|&j| &y[j] - lambda >= two_a);
        let below = part.j_set.iter().all(|&j| lambda - &y[j] >= two_a);
        if !above && !below {
            return Err(hypothesis("y_j - lambda >= 2a for j in J (or lambda - y_j >= 2a for all j in J)"));
        }
        if s_set.iter().any(|&i| i >= n) {
            return Err(PropsError::InvalidParam("S out of range".into()));
        }
        let lcm = y.iter().chain(std::iter::once(a)).fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let scale = |v: &BigRational| -> Result<i128, PropsError> {
            (v.numer() * (&lcm / v.denom()))
                .to_i128()
                .filter(|x| x.unsigned_abs() < 1u128 << 100)
                .ok_or_else(|| PropsError::InvalidParam("entries of y or a too large".into()))
        };
        Ok(ProjectionQuery {
            n,
            y: y.iter().map(scale).collect::<Result<_, _>>()?,
            a: scale(a)?,
            s_set: s_set.to_vec(),
            j_len: part.j_set.len(),
        })
    }

    /// `max_{i ∈ S} |(M y)_i| < a`.
    pub fn holds(&self, g: &Digraph) -> bool {
        debug_assert_eq!(g.n(), self.n);
        self.s_set.iter().all(|&i| {
            let s: i128 = g.out_neighbors(i).iter().map(|&j| self.y[j as usize]).sum();
            s.abs() < self.a
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionEstimate {
    pub samples: u64,
    pub hits: u64,
    pub frequency: Proportion,
    /// `-d|J| ln(n / (d|J|))`, shape only.
    pub exponent_shape: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn projection_anticoncentration(
    n: usize,
    d: usize,
    part: &Partition,
    lambda: &BigRational,
    y: &[BigRational],
    a: &BigRational,
    s_set: &[Vertex],
    samples: u64,
    frozen: Option<FrozenColumnSet>,
    cfg: &ChainConfig,
    master_seed: u64,
) -> Result<ProjectionEstimate, PropsError> {
    let q = ProjectionQuery::new(n, part, lambda, y, a, s_set)?;
    let source = match frozen {
        Some(f) => SampleSource::conditional(n, d, f, cfg)?,
        None => SampleSource::new(n, d, cfg)?,
    };
    let hits = (0..source.num_chunks(samples))
        .into_par_iter()
        .map(|c| {
            let mut h = 0u64;
            source.run_chunk(master_seed, c, samples, |_, g| h += q.holds(g) as u64).map(|_| h)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let dj = (d * q.j_len) as f64;
    Ok(ProjectionEstimate {
        samples,
        hits,
        frequency: Proportion::new(hits, samples),
        exponent_shape: -dj * (n as f64 / dj).ln(),
    })
}

/// Convenience: rational vector from integers.
pub fn rational_vector(v: &[i64]) -> Vec<BigRational> {
    v.iter().map(|&x| BigRational::from_integer(x.into())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::Method;

    fn q(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    fn part(n: usize, j: &[usize]) -> Partition {
        Partition { i_set: vec![], j_set: j.to_vec(), j_lambda: (0..n).filter(|v| !j.contains(v)).collect() }
    }

    #[test]
    fn empty_s_is_vacuous() {
        let cfg = ChainConfig { method: Method::Configuration, ..Default::default() };
        let y = rational_vector(&[1, 1, 0, 0, 0, 0]);
        let e = projection_anticoncentration(6, 2, &part(6, &[0, 1]), &q(0, 1), &y, &q(1, 2), &[], 200, None, &cfg, 1)
            .unwrap();
        assert_eq!(e.hits, 200);
        assert_eq!(e.frequency.p_hat, 1.0);
    }

    #[test]
    fn zero_vector_is_rejected() {
        let y = rational_vector(&[0; 6]);
        let err = ProjectionQuery::new(6, &part(6, &[0, 1]), &q(0, 1), &y, &q(1, 2), &[0]).unwrap_err();
        assert!(matches!(err, PropsError::Hypothesis(ref c) if c.contains("2a")));
        let err = ProjectionQuery::new(6, &part(6, &[0, 1]), &q(0, 1), &y, &q(0, 1), &[0]).unwrap_err();
        assert!(matches!(err, PropsError::Hypothesis(ref c) if c == "a > 0"));
    }

    #[test]
    fn rational_entries_are_compared_exactly() {
        // Rows of the consecutive circulant: R_i = {i, i+1}.
        let g = Digraph::consecutive_circulant(4, 2).unwrap();
        let p = Partition { i_set: vec![1], j_set: vec![0], j_lambda: vec![2, 3] };
        let y = vec![q(1, 2), q(1, 5), q(0, 1), q(0, 1)];
        let holds = |s: &[usize]| ProjectionQuery::new(4, &p, &q(0, 1), &y, &q(1, 4), s).unwrap().holds(&g);
        assert!(holds(&[2]));
        assert!(holds(&[1]));
        assert!(!holds(&[0]));
        assert!(!holds(&[1, 3]));
        // (My)_1 = 1/4 is not strictly below a = 1/4.
        let y = vec![q(1, 2), q(1, 4), q(0, 1), q(0, 1)];
        assert!(!ProjectionQuery::new(4, &p, &q(0, 1), &y, &q(1, 4), &[1]).unwrap().holds(&g));
    }
}
