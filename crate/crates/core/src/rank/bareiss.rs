//! Fraction-free (Bareiss) elimination and exact kernels.
//!
//! Every intermediate entry is a minor of the input, so entries are bounded by
//! the Hadamard bound `prod_i max(1, |row_i|)`. When that bound fits in 61
//! bits the elimination runs in `i128`; otherwise in arbitrary precision.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

/// Echelon form produced by fraction-free elimination.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub rows: usize,
    pub cols: usize,
    /// Row-major, `rank` meaningful rows.
    pub entries: Vec<BigInt>,
    pub pivot_cols: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivot_cols.len()
    }

    fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

trait Scalar: Clone + PartialEq {
    fn nil() -> Self;
    fn is_nil(&self) -> bool;
    /// `(a*b - c*e) / div`, exact.
    fn cross_div(a: &Self, b: &Self, c: &Self, e: &Self, div: &Self) -> Self;
    fn to_big(&self) -> BigInt;
}

impl Scalar for i128 {
    fn nil() -> Self {
        0
    }
    fn is_nil(&self) -> bool {
        *self == 0
    }
    #[inline]
    fn cross_div(a: &Self, b: &Self, c: &Self, e: &Self, div: &Self) -> Self {
        let v = a * b - c * e;
        debug_assert_eq!(v % div, 0);
        v / div
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for BigInt {
    fn nil() -> Self {
        Zero::zero()
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
    fn cross_div(a: &Self, b: &Self, c: &Self, e: &Self, div: &Self) -> Self {
        let v = a * b - c * e;
        if div.is_one() {
            v
        } else {
            debug_assert!(Zero::is_zero(&(&v % div)));
            v / div
        }
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

fn eliminate<T: Scalar>(rows: usize, cols: usize, mut a: Vec<T>, one: T) -> (Vec<T>, Vec<usize>) {
    let mut prev = one;
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !a[i * cols + c].is_nil()) else {
            continue;
        };
        if piv != r {
            for j in 0..cols {
                a.swap(piv * cols + j, r * cols + j);
            }
        }
        let p = a[r * cols + c].clone();
        for i in r + 1..rows {
            let f = a[i * cols + c].clone();
            for j in c + 1..cols {
                let v = T::cross_div(&p, &a[i * cols + j], &f, &a[r * cols + j], &prev);
                a[i * cols + j] = v;
            }
            a[i * cols + c] = T::nil();
        }
        // Columns left of c in rows below r are already zero.
        prev = p;
        pivot_cols.push(c);
        r += 1;
    }
    (a, pivot_cols)
}

/// `log2` of the Hadamard bound of `m`.
pub fn hadamard_log2(m: &IntMatrix) -> f64 {
    (0..m.rows())
        .map(|i| {
            let sq: f64 = m.row(i).iter().map(|&v| (v as f64) * (v as f64)).sum();
            if sq <= 1.0 {
                0.0
            } else {
                0.5 * sq.log2()
            }
        })
        .sum()
}

/// Fraction-free echelon form of `m`.
pub fn echelon(m: &IntMatrix) -> Echelon {
    let (rows, cols) = (m.rows(), m.cols());
    let max_entry = m.data().iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
    let (entries, pivot_cols) = if hadamard_log2(m) <= 60.0 && max_entry < (1 << 60) {
        let a: Vec<i128> = m.data().iter().map(|&v| v as i128).collect();
        let (a, p) = eliminate(rows, cols, a, 1i128);
        (a.iter().map(Scalar::to_big).collect(), p)
    } else {
        let a: Vec<BigInt> = m.data().iter().map(|&v| BigInt::from(v)).collect();
        eliminate(rows, cols, a, BigInt::one())
    };
    Echelon { rows, cols, entries, pivot_cols }
}

pub fn exact_rank(m: &IntMatrix) -> usize {
    echelon(m).rank()
}

/// Scales a rational vector to coprime integers with positive first nonzero entry.
pub fn canonical_integer_vector(x: &[BigRational]) -> Vec<BigInt> {
    let lcm = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let mut ints: Vec<BigInt> = x.iter().map(|v| v.numer() * (&lcm / v.denom())).collect();
    canonicalize(&mut ints);
    ints
}

/// Divides out the content and fixes the sign in place.
pub fn canonicalize(v: &mut [BigInt]) {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return;
    }
    let neg = v.iter().find(|x| !x.is_zero()).map(|x| x.is_negative()).unwrap_or(false);
    for x in v.iter_mut() {
        *x = &*x / &g;
        if neg {
            *x = -&*x;
        }
    }
}

/// Basis of the rational right kernel; one vector per non-pivot column,
/// each canonical (coprime, first nonzero entry positive).
pub fn kernel_basis(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let e = echelon(m);
    kernel_from_echelon(&e)
}

pub(crate) fn kernel_from_echelon(e: &Echelon) -> Vec<Vec<BigInt>> {
    let cols = e.cols;
    let rank = e.rank();
    let mut is_pivot = vec![false; cols];
    for &c in &e.pivot_cols {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut x: Vec<BigRational> = vec![BigRational::zero(); cols];
        x[free] = BigRational::one();
        for t in (0..rank).rev() {
            let pc = e.pivot_cols[t];
            let mut s = BigRational::zero();
            for j in pc + 1..cols {
                if !x[j].is_zero() && !e.at(t, j).is_zero() {
                    s += BigRational::from_integer(e.at(t, j).clone()) * &x[j];
                }
            }
            x[pc] = -s / BigRational::from_integer(e.at(t, pc).clone());
        }
        basis.push(canonical_integer_vector(&x));
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn all_ones_kernel() {
        let k = kernel_basis(&IntMatrix::filled(3, 3, 1));
        assert_eq!(k, vec![big(&[1, -1, 0]), big(&[1, 0, -1])]);
    }

    #[test]
    fn circulant_kernel() {
        let circ = IntMatrix::from_rows(&[
            vec![1, 1, 0, 0],
            vec![0, 1, 1, 0],
            vec![0, 0, 1, 1],
            vec![1, 0, 0, 1],
        ]);
        assert_eq!(exact_rank(&circ), 3);
        assert_eq!(kernel_basis(&circ), vec![big(&[1, -1, 1, -1])]);
    }

    #[test]
    fn bigint_path_matches_small_path() {
        // 5x5 with large entries forces the BigInt path.
        let big_rows = vec![
            vec![1 << 40, 3, 5, 7, 11],
            vec![2, 1 << 41, 1, 1, 1],
            vec![(1 << 40) + 2, (1 << 41) + 3, 6, 8, 12],
            vec![0, 1, 0, 1 << 39, 0],
            vec![9, 0, 1, 0, 1 << 38],
        ];
        let m = IntMatrix::from_rows(&big_rows);
        assert!(hadamard_log2(&m) > 60.0);
        assert_eq!(exact_rank(&m), 4);
        for x in kernel_basis(&m) {
            assert!(m.mul_vec(&x).iter().all(|v| v.is_zero()));
        }
    }

    #[test]
    fn rectangular_kernel() {
        let m = IntMatrix::from_rows(&[vec![1, 2, 3], vec![2, 4, 6]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 2);
        for x in &k {
            assert!(m.mul_vec(x).iter().all(|v| v.is_zero()));
        }
    }
}
