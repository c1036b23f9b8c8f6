//! Fraction-free determinants.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::scalar::ExactScalar;

/// Integral domain in which Bareiss divisions are exact.
pub trait ExactDivRing: Clone {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn mul(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `self / rhs`, assuming `rhs` divides `self`.
    fn div_exact(&self, rhs: &Self) -> Self;
    fn one() -> Self;
}

impl ExactDivRing for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, rhs: &Self) -> Self {
        debug_assert!(Zero::is_zero(&(self % rhs)));
        self / rhs
    }
    fn one() -> Self {
        One::one()
    }
}

/// Determinant of a square matrix by Bareiss elimination with row pivoting.
pub fn bareiss_det<T: ExactDivRing>(mut m: Vec<Vec<T>>) -> T {
    let n = m.len();
    assert!(m.iter().all(|row| row.len() == n), "matrix must be square");
    if n == 0 {
        return T::one();
    }
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = v.div_exact(&prev);
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        det.neg()
    } else {
        det
    }
}

/// Exact determinant of a rational matrix: clears each row's denominators,
/// runs Bareiss over the integers, and divides the scale back out.
pub fn det(m: &[Vec<ExactScalar>]) -> ExactScalar {
    let mut scale = <BigInt as One>::one();
    let int_rows: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| {
            let l = ExactScalar::denominator_lcm(row);
            let rows = row
                .iter()
                .map(|v| v.numer() * (&l / v.denom()))
                .collect();
            scale *= l;
            rows
        })
        .collect();
    ExactScalar::from_bigints(bareiss_det(int_rows), scale).expect("nonzero scale")
}
