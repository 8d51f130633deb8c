//! Exact singularity decisions with checkable certificates.
//!
//! Strategy: rank modulo three random primes in `[2^30, 2^31)`. Rank mod p
//! never exceeds the rational rank, so one full-rank reduction proves
//! nonsingularity. A "singular" verdict is only returned after exact
//! fraction-free elimination confirms it, together with integer null
//! vectors on both sides.

mod ac;
mod bareiss;
mod modp;

pub use ac::{ac_check, ac_check_int, eac_event, AcReport, EacCertainty, EacOutcome, EAC_COMBINATIONS, EAC_COEFF_RANGE};
pub use bareiss::{canonical_integer_vector, canonicalize, echelon, exact_rank, hadamard_log2, kernel_basis, Echelon};
pub use modp::{eliminate_mod_p, is_prime, random_word_prime, rank_mod_p, ModpElimination};

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::graph::Digraph;
use crate::rng::LabRng;
use rand::SeedableRng;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum RankError {
    #[error("modulus {0} is not a prime below 2^32")]
    NotPrime(u64),
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("the zero vector has no almost-constant structure")]
    ZeroVector,
    #[error("parameter p = {0} must lie in (0, 1/2)")]
    BadFraction(String),
}

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        IntMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let data: Vec<i64> = rows.iter().flat_map(|row| {
            assert_eq!(row.len(), c);
            row.iter().copied()
        }).collect();
        IntMatrix::new(r, c, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::new(n, n, vec![0; n * n]);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn filled(rows: usize, cols: usize, v: i64) -> Self {
        IntMatrix::new(rows, cols, vec![v; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[i64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = vec![0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        IntMatrix::new(self.cols, self.rows, t)
    }

    /// `M x` in exact arithmetic.
    pub fn mul_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut s = BigInt::zero();
                for (a, b) in self.row(i).iter().zip(x) {
                    if *a != 0 && !b.is_zero() {
                        s += b * *a;
                    }
                }
                s
            })
            .collect()
    }

    /// `y^T M` in exact arithmetic.
    pub fn vec_mul(&self, y: &[BigInt]) -> Vec<BigInt> {
        self.transpose().mul_vec(y)
    }

    /// Rows and columns have one common sum.
    pub fn has_constant_margins(&self) -> bool {
        if !self.is_square() || self.rows == 0 {
            return false;
        }
        let s: i64 = self.row(0).iter().sum();
        (0..self.rows).all(|i| self.row(i).iter().sum::<i64>() == s)
            && (0..self.cols).all(|j| (0..self.rows).map(|i| self.get(i, j)).sum::<i64>() == s)
    }
}

impl From<&Digraph> for IntMatrix {
    fn from(g: &Digraph) -> Self {
        let n = g.n();
        let mut data = vec![0i64; n * n];
        for (i, j) in g.edges() {
            data[i * n + j] = 1;
        }
        IntMatrix::new(n, n, data)
    }
}

/// Evidence backing a rank verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Elimination modulo `prime` found `n` pivots.
    FullRankModP { prime: u64, pivots: Vec<(usize, usize)> },
    /// Nonzero coprime integer vectors with `M x = 0` and `y^T M = 0`.
    NullVectors { right: Vec<BigInt>, left: Vec<BigInt> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankCertificate {
    pub rank: usize,
    pub singular: bool,
    pub witness: Witness,
}

#[derive(Serialize, Deserialize)]
struct CertificateJson {
    rank: usize,
    singular: bool,
    witness_kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prime: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pivots: Option<Vec<(usize, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    null_right: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    null_left: Option<Vec<String>>,
}

impl Serialize for RankCertificate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let strings = |v: &[BigInt]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let json = match &self.witness {
            Witness::FullRankModP { prime, pivots } => CertificateJson {
                rank: self.rank,
                singular: self.singular,
                witness_kind: "full_rank_mod_p".into(),
                prime: Some(*prime),
                pivots: Some(pivots.clone()),
                null_right: None,
                null_left: None,
            },
            Witness::NullVectors { right, left } => CertificateJson {
                rank: self.rank,
                singular: self.singular,
                witness_kind: "null_vectors".into(),
                prime: None,
                pivots: None,
                null_right: Some(strings(right)),
                null_left: Some(strings(left)),
            },
        };
        json.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RankCertificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let j = CertificateJson::deserialize(d)?;
        let parse = |v: Vec<String>| {
            v.into_iter()
                .map(|s| s.parse::<BigInt>().map_err(|_| D::Error::custom(format!("bad integer {s:?}"))))
                .collect::<Result<Vec<_>, _>>()
        };
        let witness = match j.witness_kind.as_str() {
            "full_rank_mod_p" => Witness::FullRankModP {
                prime: j.prime.ok_or_else(|| D::Error::missing_field("prime"))?,
                pivots: j.pivots.unwrap_or_default(),
            },
            "null_vectors" => Witness::NullVectors {
                right: parse(j.null_right.ok_or_else(|| D::Error::missing_field("null_right"))?)?,
                left: parse(j.null_left.ok_or_else(|| D::Error::missing_field("null_left"))?)?,
            },
            other => return Err(D::Error::custom(format!("unknown witness_kind {other:?}"))),
        };
        Ok(RankCertificate { rank: j.rank, singular: j.singular, witness })
    }
}

impl RankCertificate {
    /// Re-checks the witness against `m` from scratch.
    pub fn verify(&self, m: &IntMatrix) -> bool {
        if !m.is_square() || self.singular != (self.rank < m.rows()) {
            return false;
        }
        match &self.witness {
            Witness::FullRankModP { prime, pivots } => {
                !self.singular
                    && matches!(eliminate_mod_p(m, *prime), Ok(e) if e.rank == m.rows() && (pivots.is_empty() || e.pivots == *pivots))
            }
            Witness::NullVectors { right, left } => {
                let good = |v: &[BigInt]| {
                    v.len() == m.rows() && v.iter().any(|x| !x.is_zero()) && {
                        let mut c = v.to_vec();
                        canonicalize(&mut c);
                        c == v
                    }
                };
                self.singular
                    && good(right)
                    && good(left)
                    && m.mul_vec(right).iter().all(Zero::is_zero)
                    && m.vec_mul(left).iter().all(Zero::is_zero)
            }
        }
    }
}

/// Holds the three random primes used for modular screening.
#[derive(Debug, Clone)]
pub struct RankEngine {
    primes: [u64; 3],
    seed: u64,
}

impl RankEngine {
    pub fn new(seed: u64) -> Self {
        let mut rng = LabRng::seed_from_u64(seed);
        let mut primes = [0u64; 3];
        for k in 0..3 {
            loop {
                let p = random_word_prime(&mut rng);
                if !primes[..k].contains(&p) {
                    primes[k] = p;
                    break;
                }
            }
        }
        RankEngine { primes, seed }
    }

    pub fn primes(&self) -> [u64; 3] {
        self.primes
    }

    /// Exact singularity decision with certificate.
    pub fn certify(&self, m: &IntMatrix) -> Result<RankCertificate, RankError> {
        if !m.is_square() {
            return Err(RankError::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        let n = m.rows();
        for &p in &self.primes {
            let e = eliminate_mod_p(m, p)?;
            if e.rank == n {
                return Ok(RankCertificate {
                    rank: n,
                    singular: false,
                    witness: Witness::FullRankModP { prime: p, pivots: e.pivots },
                });
            }
        }
        let ech = echelon(m);
        let rank = ech.rank();
        if rank == n {
            // Every screening prime divides det M. Keep drawing primes; only
            // finitely many divide a nonzero determinant.
            let mut rng = LabRng::seed_from_u64(self.seed ^ 0xD1B5_4A32_D192_ED03);
            loop {
                let p = random_word_prime(&mut rng);
                let e = eliminate_mod_p(m, p)?;
                if e.rank == n {
                    return Ok(RankCertificate {
                        rank,
                        singular: false,
                        witness: Witness::FullRankModP { prime: p, pivots: e.pivots },
                    });
                }
            }
        }
        let right = bareiss::kernel_from_echelon(&ech).into_iter().next().expect("rank < n");
        let left = kernel_basis(&m.transpose()).into_iter().next().expect("rank < n");
        Ok(RankCertificate { rank, singular: true, witness: Witness::NullVectors { right, left } })
    }
}

impl Default for RankEngine {
    fn default() -> Self {
        RankEngine::new(0x5EED_0F_5EED)
    }
}

fn default_engine() -> &'static RankEngine {
    static ENGINE: OnceLock<RankEngine> = OnceLock::new();
    ENGINE.get_or_init(RankEngine::default)
}

/// Decides singularity of a square integer matrix exactly.
pub fn is_singular(m: &IntMatrix) -> Result<RankCertificate, RankError> {
    default_engine().certify(m)
}

/// Convenience wrapper for adjacency matrices.
pub fn certify_graph(g: &Digraph) -> RankCertificate {
    is_singular(&IntMatrix::from(g)).expect("adjacency matrices are square")
}

/// Exact integer vector from a slice of machine integers.
pub fn int_vector(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_is_nonsingular() {
        let g = Digraph::circulant(7, &[3]).unwrap();
        let c = certify_graph(&g);
        assert!(!c.singular);
        assert_eq!(c.rank, 7);
        assert!(c.verify(&IntMatrix::from(&g)));
    }

    #[test]
    fn all_ones_is_singular() {
        let m = IntMatrix::filled(4, 4, 1);
        let c = is_singular(&m).unwrap();
        assert!(c.singular);
        assert_eq!(c.rank, 1);
        assert_eq!(c.witness, Witness::NullVectors { right: int_vector(&[1, -1, 0, 0]), left: int_vector(&[1, -1, 0, 0]) });
        assert!(c.verify(&m));
    }

    #[test]
    fn circulant_null_vector() {
        let g = Digraph::circulant(4, &[0, 1]).unwrap();
        let c = certify_graph(&g);
        assert!(c.singular);
        match &c.witness {
            Witness::NullVectors { right, .. } => assert_eq!(right, &int_vector(&[1, -1, 1, -1])),
            w => panic!("{w:?}"),
        }
    }

    #[test]
    fn json_uses_decimal_strings() {
        let c = is_singular(&IntMatrix::filled(3, 3, 1)).unwrap();
        let v: serde_json::Value = serde_json::to_value(&c).unwrap();
        assert_eq!(v["witness_kind"], "null_vectors");
        assert_eq!(v["null_right"][1], "-1");
        let back: RankCertificate = serde_json::from_value(v).unwrap();
        assert_eq!(back, c);
        let ns = is_singular(&IntMatrix::identity(3)).unwrap();
        let v = serde_json::to_value(&ns).unwrap();
        assert!(v["prime"].is_u64());
        assert!(v.get("null_right").is_none());
    }

    #[test]
    fn tampered_certificates_fail() {
        let m = IntMatrix::filled(3, 3, 1);
        let mut c = is_singular(&m).unwrap();
        c.witness = Witness::NullVectors { right: int_vector(&[1, 1, 0]), left: int_vector(&[1, -1, 0]) };
        assert!(!c.verify(&m));
        let id = IntMatrix::identity(3);
        let bad = RankCertificate { rank: 3, singular: false, witness: Witness::FullRankModP { prime: 9, pivots: vec![] } };
        assert!(!bad.verify(&id));
    }
}
