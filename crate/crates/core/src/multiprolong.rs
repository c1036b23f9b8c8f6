//! Infinitesimal action of a vector field on the multispace coordinates.
//!
//! Three independent routes to `φ^(k)_[k]`: the determinant formula, the
//! recursion over the divided-difference tableau, and the exact ε-derivative
//! of a finite group action.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::deltaop::{DeltaError, WindowFunction};
use crate::expr::{binding, Binding, EvalError, Expr, ParseError};
use crate::jetoracle::{JetOracleError, VectorField};
use crate::lattice::{self, DividedDifferenceTableau, LatticeError, PointedCurveSamples};
use crate::linalg::{bareiss_det, ExactDivRing};
use crate::scalar::ExactScalar;
use crate::unipoly::{UniPoly, UniRatFunc};

/// Name of the group parameter in finite actions.
pub const EPS: &str = "eps";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProlongError {
    #[error("order {k} exceeds lattice order {order}")]
    OrderExceedsLattice { k: usize, order: usize },
    #[error("action component mentions `{0}`; only x, u and {EPS} are allowed")]
    ForeignVariable(String),
    #[error("action is not the identity at {EPS} = 0: {which} reduces to `{got}`")]
    NotIdentity { which: &'static str, got: String },
    #[error("transformed Vandermonde determinant vanishes at {EPS} = 0")]
    DegenerateAction,
    #[error("the `rotation` action is not rational in {EPS}; use the vector field with the numeric or jet paths")]
    NonRationalAction,
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("component `{which}`: {source}")]
    Parse { which: &'static str, source: ParseError },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Delta(#[from] DeltaError),
    #[error(transparent)]
    Jet(#[from] JetOracleError),
}

/// `(x̃(x,u;ε), ũ(x,u;ε))`, the identity at `ε = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneParamAction {
    xtilde: Expr,
    utilde: Expr,
}

impl OneParamAction {
    pub fn new(xtilde: Expr, utilde: Expr) -> Result<Self, ProlongError> {
        for e in [&xtilde, &utilde] {
            if let Some(v) = e
                .variables()
                .into_iter()
                .find(|v| !matches!(v.name(), "x" | "u" | EPS))
            {
                return Err(ProlongError::ForeignVariable(v.name().to_string()));
            }
        }
        for (which, e, id) in [("xtilde", &xtilde, "x"), ("utilde", &utilde, "u")] {
            let at0 = e.substitute(EPS, &Expr::zero());
            if !at0.equal(&Expr::var(id)) {
                return Err(ProlongError::NotIdentity { which, got: at0.simplify().to_string() });
            }
        }
        Ok(OneParamAction { xtilde, utilde })
    }

    pub fn parse(xtilde: &str, utilde: &str) -> Result<Self, ProlongError> {
        let xt = crate::expr::parse(xtilde).map_err(|source| ProlongError::Parse { which: "xtilde", source })?;
        let ut = crate::expr::parse(utilde).map_err(|source| ProlongError::Parse { which: "utilde", source })?;
        OneParamAction::new(xt, ut)
    }

    /// `x̃ = x/(1+ε)`, `ũ = (1+ε)u`.
    pub fn scaling() -> Self {
        OneParamAction::parse("x/(1 + eps)", "(1 + eps)*u").expect("builtin")
    }

    /// `x̃ = x + ε`, `ũ = u`.
    pub fn translation() -> Self {
        OneParamAction::parse("x + eps", "u").expect("builtin")
    }

    /// `x̃ = x/(1 − εx)`, `ũ = u`.
    pub fn projective() -> Self {
        OneParamAction::parse("x/(1 - eps*x)", "u").expect("builtin")
    }

    pub fn builtin(name: &str) -> Result<Self, ProlongError> {
        match name {
            "scaling" => Ok(OneParamAction::scaling()),
            "translation" => Ok(OneParamAction::translation()),
            "projective" => Ok(OneParamAction::projective()),
            "rotation" => Err(ProlongError::NonRationalAction),
            other => Err(ProlongError::UnknownAction(other.to_string())),
        }
    }

    pub fn xtilde(&self) -> &Expr {
        &self.xtilde
    }

    pub fn utilde(&self) -> &Expr {
        &self.utilde
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Direct,
    Recursive,
    FiniteAction,
}

/// Per-order values `ξ^(k)_(k)`, `φ^(k)_(k)`, `μ^(k)_ℓ` and `φ^(k)_[k]` at
/// basepoint 0. Scalars serialize as `p/q` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProlongationResult {
    pub order: usize,
    pub method: Method,
    pub xi: Vec<ExactScalar>,
    pub phi: Vec<ExactScalar>,
    pub mu: Vec<Vec<ExactScalar>>,
    pub phibracket: Vec<ExactScalar>,
}

fn check_order(s: &PointedCurveSamples, k: usize) -> Result<(), ProlongError> {
    if k > s.order() {
        Err(ProlongError::OrderExceedsLattice { k, order: s.order() })
    } else {
        Ok(())
    }
}

/// Pointwise values `ξ(x_i, u_i)` and `φ(x_i, u_i)`.
fn field_values(vf: &VectorField, s: &PointedCurveSamples) -> Result<(Vec<ExactScalar>, Vec<ExactScalar>), ProlongError> {
    let mut xi = Vec::with_capacity(s.x().len());
    let mut phi = Vec::with_capacity(s.x().len());
    for (x, u) in s.x().iter().zip(s.u()) {
        let (a, b) = vf.eval(x, u)?;
        xi.push(a);
        phi.push(b);
    }
    Ok((xi, phi))
}

/// Divided-difference tableaux of `ξ_i` and `φ_i`.
pub fn sample_field(
    vf: &VectorField,
    s: &PointedCurveSamples,
) -> Result<(DividedDifferenceTableau, DividedDifferenceTableau), ProlongError> {
    let (xi, phi) = field_values(vf, s)?;
    Ok((
        DividedDifferenceTableau::build(s.lattice(), &xi)?,
        DividedDifferenceTableau::build(s.lattice(), &phi)?,
    ))
}

/// Row `μ^(k)_0, …, μ^(k)_k`.
pub fn mu_row(s: &PointedCurveSamples, k: usize) -> Result<Vec<ExactScalar>, ProlongError> {
    Ok((0..=k).map(|l| lattice::mu(s, k, l)).collect::<Result<_, _>>()?)
}

fn direct_sum(
    vf: &VectorField,
    s: &PointedCurveSamples,
    k: usize,
    first_l: usize,
) -> Result<ExactScalar, ProlongError> {
    check_order(s, k)?;
    let w = s.window(0, k);
    let (xi, phi) = field_values(vf, &w)?;
    let phi_k = lattice::multispace_coord(&w.with_values(phi)?, k)?;
    let mut sum = ExactScalar::zero();
    for l in first_l..=k {
        let weights: Vec<ExactScalar> = w
            .x()
            .iter()
            .zip(&xi)
            .map(|(x, v)| {
                let lx = match l {
                    0 => ExactScalar::zero(),
                    _ => ExactScalar::from_int(l as i64) * x.pow(l as u32 - 1),
                };
                lx * v
            })
            .collect();
        let coord = lattice::multispace_coord(&w.with_values(weights)?, k)?;
        sum += lattice::mu(&w, k, l)? * coord;
    }
    Ok(phi_k - sum / ExactScalar::factorial(k))
}

/// `φ^(k)_[k] = φ^(k)_(k) − (1/k!)·Σ_{ℓ=1}^{k} μ^(k)_ℓ·(ℓ x^{ℓ−1} ξ)^(k)_(k)`
/// on the first `k+1` samples, by determinants.
pub fn infinitesimal_direct(vf: &VectorField, s: &PointedCurveSamples, k: usize) -> Result<ExactScalar, ProlongError> {
    direct_sum(vf, s, k, 1)
}

/// [`infinitesimal_direct`] with the sum started at `ℓ = 0`; the extra
/// summand vanishes.
pub fn infinitesimal_direct_from_zero(vf: &VectorField, s: &PointedCurveSamples, k: usize) -> Result<ExactScalar, ProlongError> {
    direct_sum(vf, s, k, 0)
}

/// All orders `0..=n` by the determinant formula.
pub fn prolong_direct(vf: &VectorField, s: &PointedCurveSamples, n: usize) -> Result<ProlongationResult, ProlongError> {
    check_order(s, n)?;
    let (xt, pt) = sample_field(vf, s)?;
    Ok(ProlongationResult {
        order: n,
        method: Method::Direct,
        xi: (0..=n).map(|k| xt.get(k, 0).clone()).collect(),
        phi: (0..=n).map(|k| pt.get(k, 0).clone()).collect(),
        mu: (0..=n).map(|k| mu_row(s, k)).collect::<Result<_, _>>()?,
        phibracket: (0..=n).map(|k| infinitesimal_direct(vf, s, k)).collect::<Result<_, _>>()?,
    })
}

/// Rows `φ^(k)_[k]` over all basepoints for `k = 0..=n`, by
/// `φ^(k+1)_[k+1] = Δ/Δx[φ^(k)_[k]] − u^(k+1)_(k+1)·(ξ_{k+1+r} − ξ_r)/(x_{k+1+r} − x_r)`.
pub fn recursive_rows(vf: &VectorField, s: &PointedCurveSamples, n: usize) -> Result<Vec<WindowFunction>, ProlongError> {
    check_order(s, n)?;
    let (xi, phi) = field_values(vf, s)?;
    let ut = lattice::tableau(s);
    let lat = s.lattice();
    let x = s.x();
    let mut rows = vec![WindowFunction::from_points(phi, "phibracket[0]")];
    for k in 0..n {
        let m = k + 1;
        let du = WindowFunction::from_tableau_row(&ut, m, "u");
        let dxi = WindowFunction::new(
            m,
            0,
            (0..du.len())
                .map(|r| (&xi[m + r] - &xi[r]) / (&x[m + r] - &x[r]))
                .collect(),
            format!("(S^{m} - id)[xi]/(x_{m} - x_0)"),
        );
        let next = rows[k].delta(lat)?.sub(&du.mul(&dxi)?)?;
        rows.push(WindowFunction::new(m, 0, next.values().to_vec(), format!("phibracket[{m}]")));
    }
    Ok(rows)
}

/// All orders `0..=n` by the recursion.
pub fn infinitesimal_recursive(vf: &VectorField, s: &PointedCurveSamples, n: usize) -> Result<ProlongationResult, ProlongError> {
    let rows = recursive_rows(vf, s, n)?;
    let (xt, pt) = sample_field(vf, s)?;
    Ok(ProlongationResult {
        order: n,
        method: Method::Recursive,
        xi: (0..=n).map(|k| xt.get(k, 0).clone()).collect(),
        phi: (0..=n).map(|k| pt.get(k, 0).clone()).collect(),
        mu: (0..=n).map(|k| mu_row(s, k)).collect::<Result<_, _>>()?,
        phibracket: rows.iter().map(|w| w.get(0).clone()).collect(),
    })
}

/// `(∂_ε x̃|₀, ∂_ε ũ|₀)`.
pub fn check_action_consistency(action: &OneParamAction) -> Result<VectorField, ProlongError> {
    let at0 = |e: &Expr| e.partial(EPS).substitute(EPS, &Expr::zero()).simplify();
    Ok(VectorField::new(at0(action.xtilde()), at0(action.utilde()))?)
}

fn ratfunc(e: &Expr, b: &Binding) -> Result<UniRatFunc, ProlongError> {
    Ok(UniRatFunc::from_expr(e, EPS, b)?)
}

/// `d/dε|₀` of `k!·d^(k)(ũ, x̃^k)/d̃^(k)` on the first `k+1` transformed
/// samples, computed exactly in `Q(ε)`.
pub fn finite_action_derivative(action: &OneParamAction, s: &PointedCurveSamples, k: usize) -> Result<ExactScalar, ProlongError> {
    check_order(s, k)?;
    let mut vander = Vec::with_capacity(k + 1);
    let mut numer = Vec::with_capacity(k + 1);
    let mut col_dens = UniPoly::one();
    for (x, u) in s.x().iter().zip(s.u()).take(k + 1) {
        let b = binding([("x", x.clone()), ("u", u.clone())]);
        let xt = ratfunc(action.xtilde(), &b)?;
        let ut = ratfunc(action.utilde(), &b)?;
        let (a, bd) = (xt.numerator(), xt.denominator());
        // row of x̃^j scaled by bd^k: a^j·bd^(k−j)
        let row: Vec<UniPoly> = (0..=k)
            .map(|j| a.pow(j as u32).mul(&bd.pow((k - j) as u32)))
            .collect();
        let e = ut.denominator();
        let mut nrow: Vec<UniPoly> = row.iter().map(|p| p.mul(e)).collect();
        nrow[k] = ut.numerator().mul(&bd.pow(k as u32));
        col_dens = col_dens.mul(e);
        vander.push(row);
        numer.push(nrow);
    }
    let num = bareiss_det(numer).scale(&ExactScalar::factorial(k));
    let den = bareiss_det(vander).mul(&col_dens);
    let d0 = den.coeff(0);
    if d0.is_zero() {
        return Err(ProlongError::DegenerateAction);
    }
    let (n0, n1, d1) = (num.coeff(0), num.coeff(1), den.coeff(1));
    Ok((n1 * &d0 - n0 * d1) / (&d0 * &d0))
}

/// All orders `0..=n` from the finite action; `xi`, `phi` and `mu` are those
/// of the induced vector field.
pub fn prolong_finite_action(action: &OneParamAction, s: &PointedCurveSamples, n: usize) -> Result<ProlongationResult, ProlongError> {
    let vf = check_action_consistency(action)?;
    let mut res = prolong_direct(&vf, s, n)?;
    res.method = Method::FiniteAction;
    res.phibracket = (0..=n)
        .map(|k| finite_action_derivative(action, s, k))
        .collect::<Result<_, _>>()?;
    Ok(res)
}
