//! Classical prolongation of a vector field `ξ ∂_x + φ ∂_u` to jet space,
//! in three independent formulations that check each other.

use serde::Serialize;
use thiserror::Error;

use crate::expr::{EvalError, Expr, JetError, JetVariableFamily, ParseError};
use crate::scalar::ExactScalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetOracleError {
    #[error("vector field component mentions `{0}`; only x and u are allowed")]
    ForeignVariable(String),
    #[error("order {requested} exceeds the jet order cap {cap}")]
    OrderCap { requested: usize, cap: usize },
    #[error("jet values: expected {expected}, got {got}")]
    JetLength { expected: usize, got: usize },
    #[error("component `{which}`: {source}")]
    Parse { which: &'static str, source: ParseError },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// `ξ(x,u) ∂_x + φ(x,u) ∂_u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorField {
    xi: Expr,
    phi: Expr,
}

impl VectorField {
    pub fn new(xi: Expr, phi: Expr) -> Result<Self, JetOracleError> {
        for e in [&xi, &phi] {
            if let Some(v) = e.variables().into_iter().find(|v| v.name() != "x" && v.name() != "u") {
                return Err(JetOracleError::ForeignVariable(v.name().to_string()));
            }
        }
        Ok(VectorField { xi, phi })
    }

    pub fn parse(xi: &str, phi: &str) -> Result<Self, JetOracleError> {
        let xi = crate::expr::parse(xi).map_err(|source| JetOracleError::Parse { which: "xi", source })?;
        let phi = crate::expr::parse(phi).map_err(|source| JetOracleError::Parse { which: "phi", source })?;
        VectorField::new(xi, phi)
    }

    /// `ξ = −x`, `φ = u`.
    pub fn scaling() -> Self {
        VectorField::parse("-x", "u").expect("builtin")
    }

    /// `ξ = −u`, `φ = x`.
    pub fn rotation() -> Self {
        VectorField::parse("-u", "x").expect("builtin")
    }

    /// `ξ = 1`, `φ = 0`.
    pub fn translation() -> Self {
        VectorField::parse("1", "0").expect("builtin")
    }

    /// `ξ = x²`, `φ = 0`.
    pub fn projective() -> Self {
        VectorField::parse("x^2", "0").expect("builtin")
    }

    pub fn zero() -> Self {
        VectorField::parse("0", "0").expect("builtin")
    }

    /// Named built-in field: `scaling`, `rotation`, `translation`, `projective`.
    pub fn builtin(name: &str) -> Option<Self> {
        Some(match name {
            "scaling" => VectorField::scaling(),
            "rotation" => VectorField::rotation(),
            "translation" => VectorField::translation(),
            "projective" => VectorField::projective(),
            _ => return None,
        })
    }

    pub fn xi(&self) -> &Expr {
        &self.xi
    }

    pub fn phi(&self) -> &Expr {
        &self.phi
    }

    /// `(ξ(x,u), φ(x,u))`.
    pub fn eval(&self, x: &ExactScalar, u: &ExactScalar) -> Result<(ExactScalar, ExactScalar), EvalError> {
        let b = crate::expr::binding([("x", x.clone()), ("u", u.clone())]);
        Ok((self.xi.eval(&b)?, self.phi.eval(&b)?))
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: &ExactScalar, other: &VectorField, b: &ExactScalar) -> VectorField {
        let lin = |p: &Expr, q: &Expr| {
            Expr::add(
                Expr::mul(Expr::Const(a.clone()), p.clone()),
                Expr::mul(Expr::Const(b.clone()), q.clone()),
            )
        };
        VectorField { xi: lin(&self.xi, &other.xi), phi: lin(&self.phi, &other.phi) }
    }

    fn on_jet(e: &Expr) -> Expr {
        e.substitute("u", &Expr::var("u0"))
    }
}

/// Components `φ_[0], …, φ_[n]` over the jet variables `x, u0, …`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(into = "Vec<String>")]
pub struct ProlongedVectorField {
    components: Vec<Expr>,
}

impl From<ProlongedVectorField> for Vec<String> {
    fn from(p: ProlongedVectorField) -> Self {
        p.printed()
    }
}

impl ProlongedVectorField {
    pub fn order(&self) -> usize {
        self.components.len() - 1
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn component(&self, k: usize) -> &Expr {
        &self.components[k]
    }

    pub fn printed(&self) -> Vec<String> {
        self.components.iter().map(Expr::to_string).collect()
    }

    /// Componentwise symbolic equality.
    pub fn equal(&self, other: &ProlongedVectorField) -> bool {
        self.components.len() == other.components.len()
            && self.components.iter().zip(&other.components).all(|(a, b)| a.equal(b))
    }

    /// Values of all components at the jet `(x, u, u′, …)`; `jet` must hold
    /// at least `order + 1` values.
    pub fn eval(&self, x: &ExactScalar, jet: &[ExactScalar]) -> Result<Vec<ExactScalar>, JetOracleError> {
        if jet.len() < self.components.len() {
            return Err(JetOracleError::JetLength { expected: self.components.len(), got: jet.len() });
        }
        let b = JetVariableFamily::new(jet.len() - 1).bind(x, jet);
        Ok(self.components.iter().map(|c| c.eval(&b)).collect::<Result<_, _>>()?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JetOptions {
    pub max_order: usize,
}

impl Default for JetOptions {
    fn default() -> Self {
        JetOptions { max_order: 8 }
    }
}

/// Total derivative on a family just large enough for `e`.
fn d(e: &Expr) -> Expr {
    let order = e
        .variables()
        .iter()
        .filter_map(|v| v.jet_index())
        .max()
        .map_or(1, |m| m + 1);
    e.total_derivative(order).expect("family covers expression").simplify()
}

fn u(i: usize) -> Expr {
    JetVariableFamily::new(i).u(i)
}

fn check_cap(n: usize, opts: &JetOptions) -> Result<(), JetOracleError> {
    if n > opts.max_order {
        Err(JetOracleError::OrderCap { requested: n, cap: opts.max_order })
    } else {
        Ok(())
    }
}

/// `φ_[k] = D_x φ_[k−1] − u_k·D_x ξ`.
pub fn jet_prolong_recursive(vf: &VectorField, n: usize) -> Result<ProlongedVectorField, JetOracleError> {
    jet_prolong_recursive_with(vf, n, &JetOptions::default())
}

pub fn jet_prolong_recursive_with(vf: &VectorField, n: usize, opts: &JetOptions) -> Result<ProlongedVectorField, JetOracleError> {
    check_cap(n, opts)?;
    let xi = VectorField::on_jet(vf.xi());
    let dxi = d(&xi);
    let mut components = vec![VectorField::on_jet(vf.phi()).simplify()];
    for k in 1..=n {
        let prev = &components[k - 1];
        let next = Expr::sub(d(prev), Expr::mul(u(k), dxi.clone())).simplify();
        components.push(next);
    }
    Ok(ProlongedVectorField { components })
}

/// `φ_[k] = D^k φ − Σ_{i=1}^{k} C(k, i−1)·u_i·D^{k−i+1} ξ`.
pub fn jet_prolong_expanded(vf: &VectorField, n: usize) -> Result<ProlongedVectorField, JetOracleError> {
    jet_prolong_expanded_with(vf, n, &JetOptions::default())
}

pub fn jet_prolong_expanded_with(vf: &VectorField, n: usize, opts: &JetOptions) -> Result<ProlongedVectorField, JetOracleError> {
    check_cap(n, opts)?;
    let mut dphi = vec![VectorField::on_jet(vf.phi()).simplify()];
    let mut dxi = vec![VectorField::on_jet(vf.xi()).simplify()];
    for j in 1..=n + 1 {
        dphi.push(d(&dphi[j - 1]));
        dxi.push(d(&dxi[j - 1]));
    }
    let components = (0..=n)
        .map(|k| {
            let sum = Expr::sum((1..=k).map(|i| {
                Expr::mul(
                    Expr::Const(ExactScalar::binomial(k, i - 1)),
                    Expr::mul(u(i), dxi[k - i + 1].clone()),
                )
            }));
            Expr::sub(dphi[k].clone(), sum).simplify()
        })
        .collect();
    Ok(ProlongedVectorField { components })
}

/// `φ_[k] = D^k[φ − u_1 ξ] + u_{k+1} ξ`.
pub fn jet_prolong_characteristic(vf: &VectorField, n: usize) -> Result<ProlongedVectorField, JetOracleError> {
    jet_prolong_characteristic_with(vf, n, &JetOptions::default())
}

pub fn jet_prolong_characteristic_with(vf: &VectorField, n: usize, opts: &JetOptions) -> Result<ProlongedVectorField, JetOracleError> {
    check_cap(n, opts)?;
    let xi = VectorField::on_jet(vf.xi());
    let mut q = Expr::sub(VectorField::on_jet(vf.phi()), Expr::mul(u(1), xi.clone())).simplify();
    let mut components = Vec::with_capacity(n + 1);
    for k in 0..=n {
        components.push(Expr::add(q.clone(), Expr::mul(u(k + 1), xi.clone())).simplify());
        q = d(&q);
    }
    Ok(ProlongedVectorField { components })
}

/// The characteristic `φ − u_1 ξ`.
pub fn characteristic(vf: &VectorField) -> Expr {
    Expr::sub(
        VectorField::on_jet(vf.phi()),
        Expr::mul(u(1), VectorField::on_jet(vf.xi())),
    )
    .simplify()
}

/// `(u(x), u′(x), …, u^(n)(x))` of a curve given as an expression in `x`.
pub fn curve_jet(curve: &Expr, x: &ExactScalar, n: usize) -> Result<Vec<ExactScalar>, EvalError> {
    let b = crate::expr::binding([("x", x.clone())]);
    let mut e = curve.clone();
    let mut out = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        out.push(e.eval(&b)?);
        e = e.partial("x");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::scalar::q;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn scaling_components() {
        let pv = jet_prolong_recursive(&VectorField::scaling(), 5).unwrap();
        for k in 0..=5 {
            assert_eq!(pv.component(k).to_string(), format!("{}*u{k}", k + 1).replace("1*", ""));
        }
        let ex = jet_prolong_expanded(&VectorField::scaling(), 2).unwrap();
        assert_eq!(ex.component(2).to_string(), "3*u2");
        let ch = jet_prolong_characteristic(&VectorField::scaling(), 1).unwrap();
        assert_eq!(ch.component(1).to_string(), "2*u1");
    }

    #[test]
    fn rotation_components() {
        let rec = jet_prolong_recursive(&VectorField::rotation(), 3).unwrap();
        assert_eq!(rec.printed(), ["x", "1 + u1^2", "3*u1*u2", "3*u2^2 + 4*u1*u3"]);
        let ex = jet_prolong_expanded(&VectorField::rotation(), 3).unwrap();
        assert_eq!(ex.component(3).to_string(), "3*u2^2 + 4*u1*u3");
        let ch = jet_prolong_characteristic(&VectorField::rotation(), 3).unwrap();
        assert!(ch.equal(&rec) && ex.equal(&rec));
        assert!(characteristic(&VectorField::rotation()).equal(&p("x + u0*u1")));
    }

    #[test]
    fn trivial_fields() {
        let z = jet_prolong_recursive(&VectorField::zero(), 4).unwrap();
        assert!(z.components().iter().all(Expr::is_zero));
        let t = jet_prolong_characteristic(&VectorField::translation(), 4).unwrap();
        assert!(t.components().iter().all(Expr::is_zero));
        let vert = VectorField::parse("0", "x*u^2").unwrap();
        let ex = jet_prolong_expanded(&vert, 2).unwrap();
        assert!(ex.component(2).equal(&p("2*u0*u1 + x*(2*u1^2 + 2*u0*u2) + 2*u0*u1")));
    }

    #[test]
    fn caps_and_validation() {
        let opts = JetOptions { max_order: 2 };
        assert!(matches!(
            jet_prolong_recursive_with(&VectorField::scaling(), 3, &opts),
            Err(JetOracleError::OrderCap { requested: 3, cap: 2 })
        ));
        assert!(matches!(VectorField::parse("y", "0"), Err(JetOracleError::ForeignVariable(_))));
        assert!(VectorField::parse("x +", "0").is_err());
    }

    #[test]
    fn evaluation_on_a_curve() {
        let jet = curve_jet(&p("x^5"), &q(1, 1), 3).unwrap();
        assert_eq!(jet, vec![q(1, 1), q(5, 1), q(20, 1), q(60, 1)]);
        let rec = jet_prolong_recursive(&VectorField::rotation(), 3).unwrap();
        let vals = rec.eval(&q(1, 1), &jet).unwrap();
        assert_eq!(vals[1], q(26, 1));
        assert_eq!(vals[3], q(2400, 1));
    }
}
