//! Univariate polynomials and rational functions over the rationals, used
//! for exact ε-derivatives of finite group actions.

use std::fmt;

use crate::expr::{Binding, EvalError, Expr};
use crate::linalg::ExactDivRing;
use crate::scalar::ExactScalar;

/// Coefficients from the constant term up; no trailing zeros.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct UniPoly(Vec<ExactScalar>);

impl UniPoly {
    pub fn new(mut coeffs: Vec<ExactScalar>) -> Self {
        while coeffs.last().is_some_and(ExactScalar::is_zero) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    pub fn constant(c: ExactScalar) -> Self {
        UniPoly::new(vec![c])
    }

    /// The indeterminate itself.
    pub fn monic_linear() -> Self {
        UniPoly::new(vec![ExactScalar::zero(), ExactScalar::one()])
    }

    pub fn coeffs(&self) -> &[ExactScalar] {
        &self.0
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> ExactScalar {
        self.0.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&ExactScalar> {
        self.0.last()
    }

    pub fn eval(&self, t: &ExactScalar) -> ExactScalar {
        self.0
            .iter()
            .rev()
            .fold(ExactScalar::zero(), |acc, c| acc * t + c)
    }

    pub fn derivative(&self) -> Self {
        UniPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * ExactScalar::from_int(i as i64))
                .collect(),
        )
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.0.len().max(rhs.0.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        UniPoly::new(self.0.iter().map(|v| v * c).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(UniPoly::constant(ExactScalar::one()), |acc, _| {
            ExactDivRing::mul(&acc, self)
        })
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lc = d.leading().expect("nonzero").clone();
        let mut rem = self.0.clone();
        let mut quot = vec![ExactScalar::zero(); self.0.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let c = rem.last().expect("nonempty") / &lc;
            for (i, dc) in d.0.iter().enumerate() {
                rem[shift + i] -= &(&c * dc);
            }
            quot[shift] = c;
            rem.pop();
            while rem.last().is_some_and(ExactScalar::is_zero) {
                rem.pop();
            }
        }
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(lc) => self.scale(&lc.checked_recip().expect("nonzero")),
            None => self.clone(),
        }
    }

    /// Monic greatest common divisor (zero when both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !ExactDivRing::is_zero(&b) {
            let r = a.divrem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }
}

impl ExactDivRing for UniPoly {
    fn zero() -> Self {
        UniPoly::default()
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn mul(&self, rhs: &Self) -> Self {
        if self.0.is_empty() || rhs.0.is_empty() {
            return UniPoly::default();
        }
        let mut out = vec![ExactScalar::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
    fn neg(&self) -> Self {
        UniPoly(self.0.iter().map(|c| -c).collect())
    }
    fn div_exact(&self, rhs: &Self) -> Self {
        let (q, r) = self.divrem(rhs);
        debug_assert!(r.0.is_empty(), "inexact polynomial division");
        q
    }
    fn one() -> Self {
        UniPoly::constant(ExactScalar::one())
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Reduced quotient of univariate polynomials with a monic denominator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UniRatFunc {
    num: UniPoly,
    den: UniPoly,
}

impl UniRatFunc {
    /// `None` when `den` is zero.
    pub fn new(num: UniPoly, den: UniPoly) -> Option<Self> {
        if ExactDivRing::is_zero(&den) {
            return None;
        }
        let g = num.gcd(&den);
        let (num, den) = if g.degree().unwrap_or(0) > 0 {
            (num.divrem(&g).0, den.divrem(&g).0)
        } else {
            (num, den)
        };
        let lc = den.leading().expect("nonzero").checked_recip().expect("nonzero");
        Some(UniRatFunc { num: num.scale(&lc), den: den.scale(&lc) })
    }

    pub fn from_poly(p: UniPoly) -> Self {
        UniRatFunc { num: p, den: ExactDivRing::one() }
    }

    pub fn numerator(&self) -> &UniPoly {
        &self.num
    }

    pub fn denominator(&self) -> &UniPoly {
        &self.den
    }

    /// Rational function of `var` obtained from `e` after binding every
    /// other variable.
    pub fn from_expr(e: &Expr, var: &str, binding: &Binding) -> Result<Self, EvalError> {
        let div_zero = || EvalError::DivisionByZero(e.to_string());
        Ok(match e {
            Expr::Const(c) => UniRatFunc::from_poly(UniPoly::constant(c.clone())),
            Expr::Var(v) if v.name() == var => UniRatFunc::from_poly(UniPoly::monic_linear()),
            Expr::Var(_) => UniRatFunc::from_poly(UniPoly::constant(e.eval(binding)?)),
            Expr::Neg(a) => {
                let a = Self::from_expr(a, var, binding)?;
                UniRatFunc { num: a.num.neg(), den: a.den }
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let a = Self::from_expr(a, var, binding)?;
                let mut b = Self::from_expr(b, var, binding)?;
                if matches!(e, Expr::Sub(..)) {
                    b.num = b.num.neg();
                }
                let num = ExactDivRing::mul(&a.num, &b.den).add(&ExactDivRing::mul(&b.num, &a.den));
                UniRatFunc::new(num, ExactDivRing::mul(&a.den, &b.den)).expect("nonzero")
            }
            Expr::Mul(a, b) => {
                let a = Self::from_expr(a, var, binding)?;
                let b = Self::from_expr(b, var, binding)?;
                UniRatFunc::new(
                    ExactDivRing::mul(&a.num, &b.num),
                    ExactDivRing::mul(&a.den, &b.den),
                )
                .expect("nonzero")
            }
            Expr::Div(a, b) => {
                let a = Self::from_expr(a, var, binding)?;
                let b = Self::from_expr(b, var, binding)?;
                UniRatFunc::new(
                    ExactDivRing::mul(&a.num, &b.den),
                    ExactDivRing::mul(&a.den, &b.num),
                )
                .ok_or_else(div_zero)?
            }
            Expr::Pow(a, n) => {
                let a = Self::from_expr(a, var, binding)?;
                UniRatFunc { num: a.num.pow(*n), den: a.den.pow(*n) }
            }
        })
    }
}
