//! Almost-constant vectors and the event that no null vector is almost constant.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use super::{is_singular, kernel_basis, IntMatrix, RankError};
use crate::frac::Frac;
use crate::rng::LabRng;

/// Random integer combinations tried when a kernel has dimension >= 2.
pub const EAC_COMBINATIONS: usize = 1000;
/// Coefficients of those combinations are drawn from `[-3, 3]`.
pub const EAC_COEFF_RANGE: i64 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AcReport {
    pub p: Frac,
    pub is_almost_constant: bool,
    #[serde(serialize_with = "ser_opt_rational")]
    pub lambda: Option<BigRational>,
    pub match_count: usize,
    pub n: usize,
}

fn ser_opt_rational<S: serde::Serializer>(v: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(r) => s.serialize_some(&r.to_string()),
        None => s.serialize_none(),
    }
}

fn check_p(p: Frac) -> Result<(), RankError> {
    if p.in_open(Frac::from_integer(0), Frac::new(1, 2)) {
        Ok(())
    } else {
        Err(RankError::BadFraction(p.to_string()))
    }
}

/// Is `x` in `AC(p)`: do at least `(1-p) n` coordinates share one value?
pub fn ac_check(x: &[BigRational], p: Frac) -> Result<AcReport, RankError> {
    check_p(p)?;
    if x.iter().all(Zero::is_zero) {
        return Err(RankError::ZeroVector);
    }
    let mut counts: HashMap<&BigRational, usize> = HashMap::new();
    for v in x {
        *counts.entry(v).or_default() += 1;
    }
    // Most frequent value; ties go to the smallest value.
    let (value, count) = counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(a.0)))
        .expect("nonempty vector");
    let n = x.len();
    let ok = p.one_minus().bounds_below(count as u64, n as u64);
    Ok(AcReport {
        p,
        is_almost_constant: ok,
        lambda: ok.then(|| value.clone()),
        match_count: count,
        n,
    })
}

/// [`ac_check`] for integer vectors.
pub fn ac_check_int(x: &[BigInt], p: Frac) -> Result<AcReport, RankError> {
    let r: Vec<BigRational> = x.iter().map(|v| BigRational::from_integer(v.clone())).collect();
    ac_check(&r, p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EacCertainty {
    /// No almost-constant null vector exists (proved).
    CertifiedTrue,
    /// An almost-constant null vector was found.
    CertifiedFalse,
    /// None found among basis vectors and random combinations; not a proof.
    HeuristicTrue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EacOutcome {
    pub certainty: EacCertainty,
    pub right_kernel_dim: usize,
    pub left_kernel_dim: usize,
    /// `"right"` or `"left"` and the almost-constant null vector, when found.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_witness")]
    pub witness: Option<(String, Vec<BigInt>)>,
    pub combinations_tested: usize,
}

fn ser_witness<S: serde::Serializer>(w: &Option<(String, Vec<BigInt>)>, s: S) -> Result<S::Ok, S::Error> {
    match w {
        Some((side, v)) => {
            let strs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            s.serialize_some(&(side, strs))
        }
        None => s.serialize_none(),
    }
}

impl EacOutcome {
    /// Whether the event holds (heuristically or certified).
    pub fn holds(&self) -> bool {
        self.certainty != EacCertainty::CertifiedFalse
    }
}

/// Searches one kernel for an `AC(p)` vector. Returns `(found, combos_tested)`.
fn search_kernel(
    basis: &[Vec<BigInt>],
    p: Frac,
    rng: &mut LabRng,
) -> Result<(Option<Vec<BigInt>>, usize), RankError> {
    for v in basis {
        if ac_check_int(v, p)?.is_almost_constant {
            return Ok((Some(v.clone()), 0));
        }
    }
    if basis.len() < 2 {
        return Ok((None, 0));
    }
    let n = basis[0].len();
    let mut tested = 0;
    for _ in 0..EAC_COMBINATIONS {
        let coeffs: Vec<i64> = (0..basis.len())
            .map(|_| rng.gen_range(-EAC_COEFF_RANGE..=EAC_COEFF_RANGE))
            .collect();
        if coeffs.iter().all(|&c| c == 0) {
            continue;
        }
        tested += 1;
        let mut x = vec![BigInt::zero(); n];
        for (c, b) in coeffs.iter().zip(basis) {
            if *c != 0 {
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi += bi * *c;
                }
            }
        }
        // Basis vectors are independent, so a nonzero combination is nonzero.
        if ac_check_int(&x, p)?.is_almost_constant {
            super::canonicalize(&mut x);
            return Ok((Some(x), tested));
        }
    }
    Ok((None, tested))
}

/// Event `E^AC(p)`: every `x` in `AC(p)` has `Mx != 0` and `x^T M != 0`.
///
/// One-dimensional kernels are decided exactly because `AC(p)` membership is
/// invariant under scaling. Larger kernels are probed with basis vectors and
/// [`EAC_COMBINATIONS`] random combinations, labeled heuristic if nothing is found.
pub fn eac_event(m: &IntMatrix, p: Frac, seed: u64) -> Result<EacOutcome, RankError> {
    check_p(p)?;
    if m.is_square() && !is_singular(m)?.singular {
        return Ok(EacOutcome {
            certainty: EacCertainty::CertifiedTrue,
            right_kernel_dim: 0,
            left_kernel_dim: 0,
            witness: None,
            combinations_tested: 0,
        });
    }
    let right = kernel_basis(m);
    let left = kernel_basis(&m.transpose());
    let mut rng = LabRng::seed_from_u64(seed);
    let mut tested = 0;
    let mut witness = None;
    for (side, basis) in [("right", &right), ("left", &left)] {
        let (found, t) = search_kernel(basis, p, &mut rng)?;
        tested += t;
        if let Some(v) = found {
            witness = Some((side.to_string(), v));
            break;
        }
    }
    let certainty = if witness.is_some() {
        EacCertainty::CertifiedFalse
    } else if right.len() >= 2 || left.len() >= 2 {
        EacCertainty::HeuristicTrue
    } else {
        EacCertainty::CertifiedTrue
    };
    Ok(EacOutcome {
        certainty,
        right_kernel_dim: right.len(),
        left_kernel_dim: left.len(),
        witness,
        combinations_tested: tested,
    })
}
