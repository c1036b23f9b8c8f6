//! Minimal symbolic expression kernel.
//!
//! Expressions are trees over exact rational constants, named variables and
//! the field operations plus non-negative integer powers. There are no
//! transcendental nodes. Everything a vector field, a finite group action or
//! a jet-space prolongation needs fits in this language.

mod parse;
mod poly;
mod print;

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::scalar::ExactScalar;

pub use parse::{parse, ParseError};
pub use poly::{Monomial, Poly, RatFunc};

/// Variable name.
///
/// Ordered so that `x < u < u0 < u1 < … < u10 < …` come first, then every
/// other name alphabetically; polynomial printing follows this order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// Index `i` when the name is `u<i>`.
    pub fn jet_index(&self) -> Option<usize> {
        let digits = self.0.strip_prefix('u')?;
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        digits.parse().ok()
    }

    fn sort_key(&self) -> (u8, usize, &str) {
        match self.0.as_str() {
            "x" => (0, 0, ""),
            "u" => (1, 0, ""),
            name => match self.jet_index() {
                Some(i) => (2, i, ""),
                None => (3, 0, name),
            },
        }
    }
}

impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var(s.to_string())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Expr {
    Const(ExactScalar),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("division by zero in `{0}`")]
    DivisionByZero(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("expression already mentions u{0}; raise the jet order before differentiating")]
    OrderOverflow(usize),
}

/// Values for the free variables of an expression.
pub type Binding = HashMap<String, ExactScalar>;

/// Builds a [`Binding`] from `(name, value)` pairs.
pub fn binding<'a>(pairs: impl IntoIterator<Item = (&'a str, ExactScalar)>) -> Binding {
    pairs
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

impl Expr {
    pub fn constant(c: ExactScalar) -> Expr {
        Expr::Const(c)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(ExactScalar::from_int(n))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(Var::new(name))
    }

    pub fn as_const(&self) -> Option<&ExactScalar> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(ExactScalar::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(ExactScalar::is_one)
    }

    // Folding constructors. They only remove neutral elements and fold
    // constant-constant arithmetic; they never reorder or expand.

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            _ if a.is_zero() => b,
            _ if b.is_zero() => a,
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
            _ => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            _ if b.is_zero() => a,
            _ if a.is_zero() => Expr::neg(b),
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            _ if a.is_zero() || b.is_zero() => Expr::zero(),
            _ if a.is_one() => b,
            _ if b.is_one() => a,
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    /// Folds only when the divisor is a nonzero constant one or both sides
    /// are constants; a zero constant divisor is kept so evaluation reports it.
    pub fn div(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            _ if b.is_one() => a,
            (Expr::Const(x), Expr::Const(y)) if !y.is_zero() => Expr::Const(x / y),
            _ if a.is_zero() && !b.is_zero() => Expr::zero(),
            _ => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn pow(a: Expr, n: u32) -> Expr {
        match (&a, n) {
            (_, 0) => Expr::one(),
            (_, 1) => a,
            (Expr::Const(c), _) => Expr::Const(c.pow(n)),
            _ => Expr::Pow(Box::new(a), n),
        }
    }

    pub fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
        terms.into_iter().fold(Expr::zero(), Expr::add)
    }

    /// Free variables, in [`Var`] order.
    pub fn variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect_vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(v) => v.name() == name,
            Expr::Neg(a) | Expr::Pow(a, _) => a.mentions(name),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.mentions(name) || b.mentions(name)
            }
        }
    }

    pub fn has_quotient(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => false,
            Expr::Div(..) => true,
            Expr::Neg(a) | Expr::Pow(a, _) => a.has_quotient(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.has_quotient() || b.has_quotient()
            }
        }
    }

    /// Exact value under `binding`.
    pub fn eval(&self, binding: &Binding) -> Result<ExactScalar, EvalError> {
        Ok(match self {
            Expr::Const(c) => c.clone(),
            Expr::Var(v) => binding
                .get(v.name())
                .cloned()
                .ok_or_else(|| EvalError::UnboundVariable(v.name().to_string()))?,
            Expr::Neg(a) => -a.eval(binding)?,
            Expr::Add(a, b) => a.eval(binding)? + b.eval(binding)?,
            Expr::Sub(a, b) => a.eval(binding)? - b.eval(binding)?,
            Expr::Mul(a, b) => a.eval(binding)? * b.eval(binding)?,
            Expr::Div(a, b) => {
                let num = a.eval(binding)?;
                let den = b.eval(binding)?;
                num.checked_div(&den)
                    .ok_or_else(|| EvalError::DivisionByZero(self.to_string()))?
            }
            Expr::Pow(a, n) => a.eval(binding)?.pow(*n),
        })
    }

    /// Replaces every occurrence of `name` by `value`.
    pub fn substitute(&self, name: &str, value: &Expr) -> Expr {
        match self {
            Expr::Const(_) => self.clone(),
            Expr::Var(v) if v.name() == name => value.clone(),
            Expr::Var(_) => self.clone(),
            Expr::Neg(a) => Expr::neg(a.substitute(name, value)),
            Expr::Add(a, b) => Expr::add(a.substitute(name, value), b.substitute(name, value)),
            Expr::Sub(a, b) => Expr::sub(a.substitute(name, value), b.substitute(name, value)),
            Expr::Mul(a, b) => Expr::mul(a.substitute(name, value), b.substitute(name, value)),
            Expr::Div(a, b) => Expr::div(a.substitute(name, value), b.substitute(name, value)),
            Expr::Pow(a, n) => Expr::pow(a.substitute(name, value), *n),
        }
    }

    /// Symbolic partial derivative with respect to `var`.
    pub fn partial(&self, var: &str) -> Expr {
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Var(v) => {
                if v.name() == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Neg(a) => Expr::neg(a.partial(var)),
            Expr::Add(a, b) => Expr::add(a.partial(var), b.partial(var)),
            Expr::Sub(a, b) => Expr::sub(a.partial(var), b.partial(var)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.partial(var), (**b).clone()),
                Expr::mul((**a).clone(), b.partial(var)),
            ),
            Expr::Div(a, b) => {
                let da = a.partial(var);
                let db = b.partial(var);
                if db.is_zero() {
                    Expr::div(da, (**b).clone())
                } else {
                    Expr::div(
                        Expr::sub(
                            Expr::mul(da, (**b).clone()),
                            Expr::mul((**a).clone(), db),
                        ),
                        Expr::pow((**b).clone(), 2),
                    )
                }
            }
            Expr::Pow(_, 0) => Expr::zero(),
            Expr::Pow(a, n) => Expr::mul(
                Expr::mul(
                    Expr::int(i64::from(*n)),
                    Expr::pow((**a).clone(), n - 1),
                ),
                a.partial(var),
            ),
        }
    }

    /// Total derivative `D_x = ∂_x + Σ_{i<order} u_{i+1} ∂_{u_i}` on the jet
    /// family `x, u0, …, u<order>`.
    pub fn total_derivative(&self, order: usize) -> Result<Expr, JetError> {
        let family = JetVariableFamily::new(order);
        if let Some(top) = self
            .variables()
            .iter()
            .filter_map(Var::jet_index)
            .filter(|&i| i >= order)
            .max()
        {
            return Err(JetError::OrderOverflow(top));
        }
        let mut out = self.partial("x");
        for i in 0..order {
            let name = family.u_name(i);
            if self.mentions(&name) {
                out = Expr::add(out, Expr::mul(family.u(i + 1), self.partial(&name)));
            }
        }
        Ok(out)
    }

    /// Canonical rational-function form; `None` when a denominator is
    /// identically zero.
    pub fn to_ratfunc(&self) -> Option<RatFunc> {
        RatFunc::from_expr(self)
    }

    /// Canonical polynomial form; `None` for expressions with quotients that
    /// do not reduce to a polynomial over constants.
    pub fn to_poly(&self) -> Option<Poly> {
        let rf = self.to_ratfunc()?;
        rf.as_poly()
    }

    /// Rebuilds the expression from its canonical form so that equal
    /// expressions print identically. Expressions with an identically zero
    /// denominator are returned unchanged.
    pub fn simplify(&self) -> Expr {
        match self.to_ratfunc() {
            Some(rf) => rf.to_expr(),
            None => self.clone(),
        }
    }

    /// Decides whether `self − other` vanishes identically.
    ///
    /// Quotients are cleared, `a/b = c/d` iff `a·d = c·b` as polynomials. This
    /// treats `x/x` as equal to `1` (equality off the poles). An expression
    /// whose denominator vanishes identically equals nothing.
    pub fn equal(&self, other: &Expr) -> bool {
        match (self.to_ratfunc(), other.to_ratfunc()) {
            (Some(a), Some(b)) => a.equals(&b),
            _ => false,
        }
    }
}

/// The jet coordinates `x, u0, u1, …, uN` standing for `x, u, u', …, u^(N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JetVariableFamily {
    order: usize,
}

impl JetVariableFamily {
    pub fn new(order: usize) -> Self {
        JetVariableFamily { order }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn u_name(&self, i: usize) -> String {
        format!("u{i}")
    }

    pub fn u(&self, i: usize) -> Expr {
        Expr::Var(Var(self.u_name(i)))
    }

    pub fn x(&self) -> Expr {
        Expr::var("x")
    }

    pub fn names(&self) -> Vec<String> {
        std::iter::once("x".to_string())
            .chain((0..=self.order).map(|i| self.u_name(i)))
            .collect()
    }

    /// True when every variable of `e` belongs to the family.
    pub fn contains(&self, e: &Expr) -> bool {
        e.variables().iter().all(|v| {
            v.name() == "x" || v.jet_index().is_some_and(|i| i <= self.order)
        })
    }

    /// Binding of `x, u0, …` to the given values.
    pub fn bind(&self, x: &ExactScalar, jet: &[ExactScalar]) -> Binding {
        let mut b = Binding::new();
        b.insert("x".into(), x.clone());
        for (i, v) in jet.iter().enumerate() {
            b.insert(self.u_name(i), v.clone());
        }
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(p("x^2").eval(&binding([("x", q(3, 1))])).unwrap(), q(9, 1));
        assert_eq!(p("-x").eval(&binding([("x", q(1, 2))])).unwrap(), q(-1, 2));
        let err = p("u/x")
            .eval(&binding([("x", q(0, 1)), ("u", q(1, 1))]))
            .unwrap_err();
        assert_eq!(err, EvalError::DivisionByZero("u/x".into()));
        assert_eq!(
            p("x + y").eval(&binding([("x", q(1, 1))])).unwrap_err(),
            EvalError::UnboundVariable("y".into())
        );
    }

    #[test]
    fn partial_examples() {
        assert!(p("x^2").partial("x").equal(&p("2*x")));
        assert!(p("u").partial("x").is_zero());
        assert!(p("x*u").partial("u").equal(&p("x")));
        assert!(p("1/x").partial("x").equal(&p("-1/x^2")));
        assert!(Expr::Pow(Box::new(p("x")), 0).partial("x").is_zero());
    }

    #[test]
    fn total_derivative_examples() {
        assert!(p("u0").total_derivative(1).unwrap().equal(&p("u1")));
        assert!(p("x*u1")
            .total_derivative(2)
            .unwrap()
            .equal(&p("u1 + x*u2")));
        assert!(p("u0^2")
            .total_derivative(1)
            .unwrap()
            .equal(&p("2*u0*u1")));
        assert_eq!(
            p("u0*u2").total_derivative(2),
            Err(JetError::OrderOverflow(2))
        );
    }

    #[test]
    fn equality_examples() {
        assert!(p("(x+u)^2").equal(&p("x^2 + 2*x*u + u^2")));
        assert!(p("x/x").equal(&p("1")));
        assert!(!p("x").equal(&p("u")));
        assert!(p("1/(x+1) + 1/(x-1)").equal(&p("2*x/(x^2-1)")));
        assert!(!p("1/(x-x)").equal(&p("1/(x-x)")));
    }

    #[test]
    fn variable_order() {
        let mut vs: Vec<Var> = ["eps", "u10", "u2", "x", "u0", "u", "a"]
            .into_iter()
            .map(Var::from)
            .collect();
        vs.sort();
        let names: Vec<&str> = vs.iter().map(Var::name).collect();
        assert_eq!(names, ["x", "u", "u0", "u2", "u10", "a", "eps"]);
    }

    #[test]
    fn substitution() {
        let e = p("x/(1+eps)");
        let at0 = e.substitute("eps", &Expr::zero());
        assert!(at0.equal(&p("x")));
    }

    #[test]
    fn jet_family() {
        let f = JetVariableFamily::new(2);
        assert_eq!(f.names(), ["x", "u0", "u1", "u2"]);
        assert!(f.contains(&p("x*u2 + u0")));
        assert!(!f.contains(&p("u3")));
        assert!(!f.contains(&p("u")));
    }
}
