//! Canonical forms: sparse polynomials over exact rationals, and quotients of
//! them. These decide equality and give every expression a unique printed
//! form.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{Binding, EvalError, Expr, Var};
use crate::scalar::ExactScalar;

/// Power product, stored as `(variable, exponent)` pairs in [`Var`] order with
/// positive exponents.
///
/// Ordered by total degree, then by exponent of the highest variable,
/// smaller first. This is a monomial order, so it works for division.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, v: &Var) -> u32 {
        self.0
            .iter()
            .find(|(w, _)| w == v)
            .map_or(0, |(_, e)| *e)
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    fn merge(&self, other: &Self, f: impl Fn(u32, u32) -> Option<u32>) -> Option<Self> {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            let ord = match (self.0.get(i), other.0.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            let (v, e) = match ord {
                Ordering::Less => {
                    i += 1;
                    (self.0[i - 1].0.clone(), f(self.0[i - 1].1, 0)?)
                }
                Ordering::Greater => {
                    j += 1;
                    (other.0[j - 1].0.clone(), f(0, other.0[j - 1].1)?)
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (self.0[i - 1].0.clone(), f(self.0[i - 1].1, other.0[j - 1].1)?)
                }
            };
            if e > 0 {
                out.push((v, e));
            }
        }
        Some(Monomial(out))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.merge(other, |a, b| Some(a + b)).expect("total")
    }

    /// `self / other` when `other` divides `self`.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        self.merge(other, |a, b| a.checked_sub(b))
    }

    /// Greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        self.merge(other, |a, b| Some(a.min(b))).expect("total")
    }

    fn to_factors(&self) -> Vec<Expr> {
        self.0
            .iter()
            .map(|(v, e)| Expr::pow(Expr::Var(v.clone()), *e))
            .collect()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let (mut i, mut j) = (self.0.len(), other.0.len());
            while i > 0 || j > 0 {
                let a = i.checked_sub(1).map(|k| &self.0[k]);
                let b = j.checked_sub(1).map(|k| &other.0[k]);
                let step = match (a, b) {
                    (Some(a), Some(b)) => match a.0.cmp(&b.0) {
                        Ordering::Equal => {
                            i -= 1;
                            j -= 1;
                            a.1.cmp(&b.1)
                        }
                        Ordering::Greater => {
                            i -= 1;
                            Ordering::Greater
                        }
                        Ordering::Less => {
                            j -= 1;
                            Ordering::Less
                        }
                    },
                    (Some(_), None) => Ordering::Greater,
                    (None, Some(_)) => Ordering::Less,
                    (None, None) => Ordering::Equal,
                };
                if step != Ordering::Equal {
                    return step;
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

/// Sparse polynomial with exact rational coefficients. No stored coefficient
/// is zero, so structural equality is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, ExactScalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(ExactScalar::one())
    }

    pub fn constant(c: ExactScalar) -> Self {
        Poly::monomial(Monomial::one(), c)
    }

    pub fn var(name: &str) -> Self {
        Poly::monomial(Monomial::var(Var::new(name)), ExactScalar::one())
    }

    pub fn monomial(m: Monomial, c: ExactScalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<ExactScalar> {
        match self.terms.len() {
            0 => Some(ExactScalar::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ExactScalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn leading(&self) -> Option<(&Monomial, &ExactScalar)> {
        self.terms.iter().next_back()
    }

    pub fn coefficient(&self, m: &Monomial) -> ExactScalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect()
    }

    fn add_term(&mut self, m: Monomial, c: ExactScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &ExactScalar) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, k)| (m.clone(), k * c))
                .collect(),
        }
    }

    fn mul_term(&self, m: &Monomial, c: &ExactScalar) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(n, k)| (n.mul(m), k * c))
                .collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::one(),
            Some(first) => it.fold(first.clone(), |acc, m| acc.gcd(m)),
        }
    }

    fn div_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(n, k)| (n.checked_div(m).expect("monomial divides"), k.clone()))
                .collect(),
        }
    }

    /// `self / divisor` when the division is exact.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (lm, lc) = divisor.leading()?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((m, c)) = rem.leading() {
            let qm = m.checked_div(lm)?;
            let qc = c / lc;
            rem = &rem - &divisor.mul_term(&qm, &qc);
            quot.add_term(qm, qc);
        }
        Some(quot)
    }

    pub fn eval(&self, binding: &Binding) -> Result<ExactScalar, EvalError> {
        let mut acc = ExactScalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in &m.0 {
                let x = binding
                    .get(v.name())
                    .ok_or_else(|| EvalError::UnboundVariable(v.name().to_string()))?;
                t *= &x.pow(*e);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Expression tree in canonical term order: `1 + u1^2`, `3*u2^2 + 4*u1*u3`.
    pub fn to_expr(&self) -> Expr {
        let mut acc: Option<Expr> = None;
        for (m, c) in &self.terms {
            acc = Some(match acc {
                None => first_term(m, c),
                Some(prev) => {
                    let t = term(m, &c.abs());
                    if c.is_negative() {
                        Expr::Sub(Box::new(prev), Box::new(t))
                    } else {
                        Expr::Add(Box::new(prev), Box::new(t))
                    }
                }
            });
        }
        acc.unwrap_or_else(Expr::zero)
    }
}

fn chain(factors: Vec<Expr>) -> Expr {
    factors
        .into_iter()
        .reduce(|a, b| Expr::Mul(Box::new(a), Box::new(b)))
        .expect("nonempty")
}

fn term(m: &Monomial, c: &ExactScalar) -> Expr {
    if m.is_one() {
        return Expr::Const(c.clone());
    }
    let mut factors = m.to_factors();
    if !c.is_one() {
        factors.insert(0, Expr::Const(c.clone()));
    }
    chain(factors)
}

fn first_term(m: &Monomial, c: &ExactScalar) -> Expr {
    if m.is_one() || *c != -ExactScalar::one() {
        return term(m, c);
    }
    let mut factors = m.to_factors();
    factors[0] = Expr::Neg(Box::new(factors[0].clone()));
    chain(factors)
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_expr(), f)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (a, x) in &self.terms {
            for (b, y) in &rhs.terms {
                out.add_term(a.mul(b), x * y);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-ExactScalar::one())
    }
}

/// Quotient `num/den` of polynomials, `den ≠ 0`.
///
/// Kept normalized: a constant denominator is folded into the numerator,
/// common monomial factors and exact polynomial divisors are cancelled, and
/// the leading coefficient of the denominator is 1. There is no general
/// multivariate gcd, so two equal functions may still have different
/// representations; use [`RatFunc::equals`] to compare.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// `None` when `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Option<RatFunc> {
        if den.is_zero() {
            return None;
        }
        Some(RatFunc::normalized(num, den))
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        RatFunc { num: p, den: Poly::one() }
    }

    fn normalized(num: Poly, den: Poly) -> RatFunc {
        if num.is_zero() {
            return RatFunc::from_poly(Poly::zero());
        }
        if let Some(c) = den.as_constant() {
            return RatFunc::from_poly(num.scale(&c.checked_recip().expect("nonzero")));
        }
        let common = num.monomial_content().gcd(&den.monomial_content());
        let (num, den) = if common.is_one() {
            (num, den)
        } else {
            (num.div_monomial(&common), den.div_monomial(&common))
        };
        if let Some(q) = num.div_exact(&den) {
            return RatFunc::from_poly(q);
        }
        let lc = den.leading().expect("nonzero").1.checked_recip().expect("nonzero");
        RatFunc { num: num.scale(&lc), den: den.scale(&lc) }
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    /// Canonical form of `e`; `None` when some denominator in `e` is
    /// identically zero.
    pub fn from_expr(e: &Expr) -> Option<RatFunc> {
        Some(match e {
            Expr::Const(c) => RatFunc::from_poly(Poly::constant(c.clone())),
            Expr::Var(v) => RatFunc::from_poly(Poly::var(v.name())),
            Expr::Neg(a) => {
                let a = RatFunc::from_expr(a)?;
                RatFunc { num: -&a.num, den: a.den }
            }
            Expr::Add(a, b) => RatFunc::from_expr(a)?.add(&RatFunc::from_expr(b)?),
            Expr::Sub(a, b) => RatFunc::from_expr(a)?.sub(&RatFunc::from_expr(b)?),
            Expr::Mul(a, b) => RatFunc::from_expr(a)?.mul(&RatFunc::from_expr(b)?),
            Expr::Div(a, b) => RatFunc::from_expr(a)?.div(&RatFunc::from_expr(b)?)?,
            Expr::Pow(a, n) => {
                let a = RatFunc::from_expr(a)?;
                RatFunc { num: a.num.pow(*n), den: a.den.pow(*n) }
            }
        })
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if self.den == other.den {
            return RatFunc::normalized(&self.num + &other.num, self.den.clone());
        }
        RatFunc::normalized(
            &(&self.num * &other.den) + &(&other.num * &self.den),
            &self.den * &other.den,
        )
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&RatFunc { num: -&other.num, den: other.den.clone() })
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        RatFunc::normalized(&self.num * &other.num, &self.den * &other.den)
    }

    /// `None` when `other` is zero.
    pub fn div(&self, other: &RatFunc) -> Option<RatFunc> {
        if other.num.is_zero() {
            return None;
        }
        Some(RatFunc::normalized(
            &self.num * &other.den,
            &self.den * &other.num,
        ))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn equals(&self, other: &RatFunc) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }

    pub fn as_poly(&self) -> Option<Poly> {
        if self.den == Poly::one() {
            Some(self.num.clone())
        } else {
            None
        }
    }

    pub fn to_expr(&self) -> Expr {
        if self.den == Poly::one() {
            self.num.to_expr()
        } else {
            Expr::Div(Box::new(self.num.to_expr()), Box::new(self.den.to_expr()))
        }
    }
}
