//! Rank over prime fields.

use rand::Rng;

use super::{IntMatrix, RankError};

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Uniform random prime in `[2^30, 2^31)`.
pub fn random_word_prime<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    loop {
        let c = rng.gen_range((1u64 << 30)..(1u64 << 31)) | 1;
        if is_prime(c) {
            return c;
        }
    }
}

/// Result of elimination mod `p`: the rank and the pivot row chosen for each pivot column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModpElimination {
    pub rank: usize,
    /// `(column, original row index)` per pivot, in elimination order.
    pub pivots: Vec<(usize, usize)>,
}

/// Rank of `m` over `GF(p)`.
pub fn rank_mod_p(m: &IntMatrix, p: u64) -> Result<usize, RankError> {
    eliminate_mod_p(m, p).map(|e| e.rank)
}

/// Gaussian elimination over `GF(p)` taking the first nonzero entry as pivot.
pub fn eliminate_mod_p(m: &IntMatrix, p: u64) -> Result<ModpElimination, RankError> {
    if p >= 1 << 32 || !is_prime(p) {
        return Err(RankError::NotPrime(p));
    }
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<u64> = m.data().iter().map(|&v| v.rem_euclid(p as i64) as u64).collect();
    let mut row_id: Vec<usize> = (0..rows).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a[i * cols + c] != 0) else {
            continue;
        };
        if piv != r {
            for j in 0..cols {
                a.swap(piv * cols + j, r * cols + j);
            }
            row_id.swap(piv, r);
        }
        let inv = inv_mod(a[r * cols + c], p);
        for j in c..cols {
            a[r * cols + j] = a[r * cols + j] * inv % p;
        }
        for i in r + 1..rows {
            let f = a[i * cols + c];
            if f == 0 {
                continue;
            }
            // p < 2^32, so f * x < 2^64.
            let neg = p - f;
            for j in c..cols {
                let x = a[r * cols + j];
                if x != 0 {
                    a[i * cols + j] = (a[i * cols + j] + neg * x) % p;
                }
            }
        }
        pivots.push((c, row_id[r]));
        r += 1;
    }
    Ok(ModpElimination { rank: r, pivots })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        assert!(is_prime(2));
        assert!(is_prime(1_000_000_007));
        assert!(is_prime((1 << 31) - 1));
        assert!(!is_prime(1));
        assert!(!is_prime(561));
        assert!(!is_prime(1_000_000_007u64 * 3));
        let mut rng = crate::rng::task_rng(0, 0);
        for _ in 0..20 {
            let p = random_word_prime(&mut rng);
            assert!(((1 << 30)..(1 << 31)).contains(&p) && is_prime(p));
        }
    }

    #[test]
    fn rank_examples() {
        let p = 1_000_000_007;
        assert_eq!(rank_mod_p(&IntMatrix::identity(5), p).unwrap(), 5);
        assert_eq!(rank_mod_p(&IntMatrix::filled(4, 4, 1), p).unwrap(), 1);
        let circ = IntMatrix::from_rows(&[
            vec![1, 1, 0, 0],
            vec![0, 1, 1, 0],
            vec![0, 0, 1, 1],
            vec![1, 0, 0, 1],
        ]);
        assert_eq!(rank_mod_p(&circ, p).unwrap(), 3);
        assert_eq!(rank_mod_p(&circ, 15), Err(RankError::NotPrime(15)));
    }

    #[test]
    fn small_prime_can_drop_rank() {
        // det = 2, singular mod 2 only.
        let m = IntMatrix::from_rows(&[vec![1, 1], vec![-1, 1]]);
        assert_eq!(rank_mod_p(&m, 2).unwrap(), 1);
        assert_eq!(rank_mod_p(&m, 3).unwrap(), 2);
    }
}
