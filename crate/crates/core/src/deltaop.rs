//! The discrete derivative `Δ/Δx`, the shift `S`, and their calculus on
//! lattice windows.
//!
//! A [`WindowFunction`] of order `k` holds one value per window of `k+1`
//! consecutive lattice points. Entry `r` belongs to the window starting at
//! lattice index `offset + r`; shifting drops the first entry and advances
//! the offset.

use thiserror::Error;

use crate::lattice::{DividedDifferenceTableau, Lattice};
use crate::scalar::ExactScalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeltaError {
    #[error("{0}: needs at least two basepoints")]
    EmptyDomain(String),
    #[error("{what}: windows reach lattice index {needed} but the lattice has order {order}")]
    LatticeTooSmall { what: String, needed: usize, order: usize },
    #[error("mixed-order product of order {left} and order {right} windows is not defined off an evenly spaced lattice")]
    MixedOrder { left: usize, right: usize },
    #[error("windows `{left}` and `{right}` are not aligned (offsets {left_offset} and {right_offset}, lengths {left_len} and {right_len})")]
    ShapeMismatch {
        left: String,
        right: String,
        left_offset: usize,
        right_offset: usize,
        left_len: usize,
        right_len: usize,
    },
    #[error("zero denominator in `{what}` at basepoint {basepoint}")]
    ZeroDenominator { what: String, basepoint: usize },
    #[error("lattice is not evenly spaced")]
    NotUniform,
    #[error("the Leibniz expansion for order {order} windows needs an evenly spaced lattice")]
    LeibnizNeedsUniform { order: usize },
}

/// Outcome of an identity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityCheck {
    Holds,
    /// First basepoint where the two sides differ.
    Fails { basepoint: usize },
}

impl IdentityCheck {
    pub fn holds(self) -> bool {
        self == IdentityCheck::Holds
    }

    fn compare(lhs: &[ExactScalar], rhs: &[ExactScalar]) -> Self {
        debug_assert_eq!(lhs.len(), rhs.len());
        match lhs.iter().zip(rhs).position(|(a, b)| a != b) {
            Some(basepoint) => IdentityCheck::Fails { basepoint },
            None => IdentityCheck::Holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowFunction {
    order: usize,
    offset: usize,
    values: Vec<ExactScalar>,
    provenance: String,
}

impl WindowFunction {
    pub fn new(order: usize, offset: usize, values: Vec<ExactScalar>, provenance: impl Into<String>) -> Self {
        WindowFunction { order, offset, values, provenance: provenance.into() }
    }

    /// Order-0 values at the lattice points.
    pub fn from_points(values: Vec<ExactScalar>, provenance: impl Into<String>) -> Self {
        WindowFunction::new(0, 0, values, provenance)
    }

    /// Row `k` of a divided-difference tableau.
    pub fn from_tableau_row(t: &DividedDifferenceTableau, k: usize, provenance: &str) -> Self {
        WindowFunction::new(k, 0, t.row(k).to_vec(), format!("{provenance}[{k}]"))
    }

    /// The constant `c` on every order-`k` window of `lat`.
    pub fn constant(lat: &Lattice, order: usize, c: ExactScalar) -> Self {
        let n = lat.len() - order;
        WindowFunction::new(order, 0, vec![c.clone(); n], format!("const {c}"))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn values(&self) -> &[ExactScalar] {
        &self.values
    }

    pub fn get(&self, r: usize) -> &ExactScalar {
        &self.values[r]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    fn truncated(&self, len: usize) -> &[ExactScalar] {
        &self.values[..len]
    }

    /// `(S w)[r] = w[r+1]`.
    pub fn shift(&self) -> Result<WindowFunction, DeltaError> {
        if self.values.len() < 2 {
            return Err(DeltaError::EmptyDomain(format!("S[{}]", self.provenance)));
        }
        Ok(WindowFunction::new(
            self.order,
            self.offset + 1,
            self.values[1..].to_vec(),
            format!("S[{}]", self.provenance),
        ))
    }

    pub fn shift_n(&self, n: usize) -> Result<WindowFunction, DeltaError> {
        (0..n).try_fold(self.clone(), |w, _| w.shift())
    }

    /// `Δ/Δx[w](x_r) = (k+1)/(x_{k+r+1} − x_r)·(w[r+1] − w[r])`, with
    /// lattice indices counted from the window offset.
    pub fn delta(&self, lat: &Lattice) -> Result<WindowFunction, DeltaError> {
        let what = format!("Δ[{}]", self.provenance);
        if self.values.len() < 2 {
            return Err(DeltaError::EmptyDomain(what));
        }
        let last = self.offset + self.values.len() - 1 + self.order;
        if last > lat.order() {
            return Err(DeltaError::LatticeTooSmall { what, needed: last, order: lat.order() });
        }
        let k = self.order;
        let x = lat.points();
        let scale = ExactScalar::from_int(k as i64 + 1);
        let values = (0..self.values.len() - 1)
            .map(|r| {
                let base = self.offset + r;
                &scale * (&self.values[r + 1] - &self.values[r]) / (&x[base + k + 1] - &x[base])
            })
            .collect();
        Ok(WindowFunction::new(k + 1, self.offset, values, what))
    }

    pub fn delta_n(&self, lat: &Lattice, n: usize) -> Result<WindowFunction, DeltaError> {
        (0..n).try_fold(self.clone(), |w, _| w.delta(lat))
    }

    fn aligned(&self, other: &WindowFunction) -> Result<(), DeltaError> {
        if self.order != other.order {
            return Err(DeltaError::MixedOrder { left: self.order, right: other.order });
        }
        if self.offset != other.offset || self.values.len() != other.values.len() {
            return Err(DeltaError::ShapeMismatch {
                left: self.provenance.clone(),
                right: other.provenance.clone(),
                left_offset: self.offset,
                right_offset: other.offset,
                left_len: self.values.len(),
                right_len: other.values.len(),
            });
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &WindowFunction,
        op: &str,
        f: impl Fn(&ExactScalar, &ExactScalar) -> ExactScalar,
    ) -> Result<WindowFunction, DeltaError> {
        self.aligned(other)?;
        Ok(WindowFunction::new(
            self.order,
            self.offset,
            self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect(),
            format!("({} {op} {})", self.provenance, other.provenance),
        ))
    }

    pub fn add(&self, other: &WindowFunction) -> Result<WindowFunction, DeltaError> {
        self.zip_with(other, "+", |a, b| a + b)
    }

    pub fn sub(&self, other: &WindowFunction) -> Result<WindowFunction, DeltaError> {
        self.zip_with(other, "-", |a, b| a - b)
    }

    /// Pointwise product of two windows of the same order.
    pub fn mul(&self, other: &WindowFunction) -> Result<WindowFunction, DeltaError> {
        self.zip_with(other, "*", |a, b| a * b)
    }

    pub fn div(&self, other: &WindowFunction) -> Result<WindowFunction, DeltaError> {
        self.aligned(other)?;
        let what = format!("({} / {})", self.provenance, other.provenance);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(r, (a, b))| {
                a.checked_div(b)
                    .ok_or_else(|| DeltaError::ZeroDenominator { what: what.clone(), basepoint: r })
            })
            .collect::<Result<_, _>>()?;
        Ok(WindowFunction::new(self.order, self.offset, values, what))
    }

    pub fn scale(&self, c: &ExactScalar) -> WindowFunction {
        WindowFunction::new(
            self.order,
            self.offset,
            self.values.iter().map(|v| v * c).collect(),
            format!("{c}*{}", self.provenance),
        )
    }

    /// Product of windows of any orders on an evenly spaced lattice, where
    /// `Δ/Δx = (S − id)/h` regardless of order. The result has the larger
    /// order and is defined on the common basepoints.
    pub fn mul_uniform(&self, other: &WindowFunction, lat: &Lattice) -> Result<WindowFunction, DeltaError> {
        lat.uniform_step().ok_or(DeltaError::NotUniform)?;
        if self.offset != other.offset {
            return Err(DeltaError::ShapeMismatch {
                left: self.provenance.clone(),
                right: other.provenance.clone(),
                left_offset: self.offset,
                right_offset: other.offset,
                left_len: self.values.len(),
                right_len: other.values.len(),
            });
        }
        let len = self.values.len().min(other.values.len());
        Ok(WindowFunction::new(
            self.order.max(other.order),
            self.offset,
            (0..len).map(|r| &self.values[r] * &other.values[r]).collect(),
            format!("({} * {})", self.provenance, other.provenance),
        ))
    }
}

/// Checks `Δ[uv] = Δ[u]·v + S[u]·Δ[v]` at every basepoint.
pub fn product_rule_check(u: &WindowFunction, v: &WindowFunction, lat: &Lattice) -> Result<IdentityCheck, DeltaError> {
    let lhs = u.mul(v)?.delta(lat)?;
    let (du, dv, su) = (u.delta(lat)?, v.delta(lat)?, u.shift()?);
    let n = lhs.len();
    let rhs: Vec<ExactScalar> = (0..n)
        .map(|r| du.get(r) * v.get(r) + su.get(r) * dv.get(r))
        .collect();
    Ok(IdentityCheck::compare(lhs.values(), &rhs))
}

/// Checks `Δ[u/v] = (v·Δ[u] − u·Δ[v])/(v·S[v])` at every basepoint.
pub fn quotient_rule_check(u: &WindowFunction, v: &WindowFunction, lat: &Lattice) -> Result<IdentityCheck, DeltaError> {
    let lhs = u.div(v)?.delta(lat)?;
    let (du, dv, sv) = (u.delta(lat)?, v.delta(lat)?, v.shift()?);
    let what = format!("quotient rule for {} / {}", u.provenance(), v.provenance());
    let rhs = (0..lhs.len())
        .map(|r| {
            let den = v.get(r) * sv.get(r);
            (v.get(r) * du.get(r) - u.get(r) * dv.get(r))
                .checked_div(&den)
                .ok_or_else(|| DeltaError::ZeroDenominator { what: what.clone(), basepoint: r })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IdentityCheck::compare(lhs.values(), &rhs))
}

/// Right-hand side `Σ_k C(n,k)·S^k[Δ^{n−k}u]·Δ^k[v]` of the discrete
/// Leibniz rule.
///
/// The rule holds for order-0 windows on any lattice and for windows of any
/// order on an evenly spaced one; other inputs are rejected.
pub fn leibniz_expand(u: &WindowFunction, v: &WindowFunction, lat: &Lattice, n: usize) -> Result<WindowFunction, DeltaError> {
    u.aligned(v)?;
    if u.order() > 0 && lat.uniform_step().is_none() {
        return Err(DeltaError::LeibnizNeedsUniform { order: u.order() });
    }
    let len = u.len().checked_sub(n).filter(|&l| l > 0).ok_or_else(|| {
        DeltaError::EmptyDomain(format!("Δ^{n}[{} * {}]", u.provenance(), v.provenance()))
    })?;
    let mut acc = vec![ExactScalar::zero(); len];
    for k in 0..=n {
        let a = u.delta_n(lat, n - k)?.shift_n(k)?;
        let b = v.delta_n(lat, k)?;
        let c = ExactScalar::binomial(n, k);
        for (r, slot) in acc.iter_mut().enumerate() {
            *slot += &c * a.get(r) * b.get(r);
        }
    }
    Ok(WindowFunction::new(
        u.order() + n,
        u.offset(),
        acc,
        format!("leibniz{n}[{} * {}]", u.provenance(), v.provenance()),
    ))
}

/// Compares [`leibniz_expand`] with `Δ^n` of the pointwise product.
pub fn leibniz_check(u: &WindowFunction, v: &WindowFunction, lat: &Lattice, n: usize) -> Result<IdentityCheck, DeltaError> {
    let rhs = leibniz_expand(u, v, lat, n)?;
    let lhs = u.mul(v)?.delta_n(lat, n)?;
    Ok(IdentityCheck::compare(lhs.values(), rhs.values()))
}

/// Checks `Δ[S[w]]` on `Γ_{r+1}` against `S[Δ[w]]` on `Γ_r`.
pub fn commute_shift_check(w: &WindowFunction, lat: &Lattice) -> Result<IdentityCheck, DeltaError> {
    let lhs = w.shift()?.delta(lat)?;
    let rhs = w.delta(lat)?.shift()?;
    let n = lhs.len().min(rhs.len());
    Ok(IdentityCheck::compare(lhs.truncated(n), rhs.truncated(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{tableau, PointedCurveSamples};
    use crate::scalar::q;

    fn ints(v: &[i64]) -> Vec<ExactScalar> {
        v.iter().map(|&x| ExactScalar::from_int(x)).collect()
    }

    fn squares() -> (Lattice, DividedDifferenceTableau) {
        let lat = Lattice::from_ints(&[0, 1, 2]).unwrap();
        let s = PointedCurveSamples::new(lat.clone(), ints(&[0, 1, 4])).unwrap();
        (lat, tableau(&s))
    }

    #[test]
    fn shifts() {
        let (_, t) = squares();
        let t1 = WindowFunction::from_tableau_row(&t, 1, "T");
        let s = t1.shift().unwrap();
        assert_eq!(s.values(), ints(&[3]).as_slice());
        assert_eq!(s.offset(), 1);
        assert!(s.shift().is_err());
        let c = WindowFunction::from_points(ints(&[7, 7, 7]), "c");
        assert_eq!(c.shift().unwrap().shift().unwrap().values(), ints(&[7]).as_slice());
    }

    #[test]
    fn delta_matches_tableau() {
        let (lat, t) = squares();
        let t0 = WindowFunction::from_tableau_row(&t, 0, "T");
        let t1 = WindowFunction::from_tableau_row(&t, 1, "T");
        assert_eq!(t1.delta(&lat).unwrap().values(), ints(&[2]).as_slice());
        assert_eq!(t0.delta(&lat).unwrap().values(), t.row(1));
        assert_eq!(t0.delta_n(&lat, 2).unwrap().values(), ints(&[2]).as_slice());
        assert_eq!(t0.delta_n(&lat, 0).unwrap(), t0);
        let c = WindowFunction::constant(&lat, 0, q(5, 1));
        assert!(c.delta(&lat).unwrap().values().iter().all(ExactScalar::is_zero));
        assert!(t0.delta_n(&lat, 3).is_err());
    }

    #[test]
    fn shifted_delta_uses_shifted_windows() {
        let lat = Lattice::from_ints(&[0, 1, 3, 7]).unwrap();
        let w = WindowFunction::from_points(ints(&[0, 1, 9, 49]), "u");
        // Δ[S[w]] at r = 0 is the order-1 divided difference on (1, 3)
        assert_eq!(w.shift().unwrap().delta(&lat).unwrap().get(0), &q(4, 1));
    }

    #[test]
    fn calculus_rules() {
        let lat = Lattice::from_ints(&[0, 1, 2]).unwrap();
        let x = WindowFunction::from_points(ints(&[0, 1, 2]), "x");
        let prod = x.mul(&x).unwrap().delta(&lat).unwrap();
        assert_eq!(prod.get(0), &q(1, 1));
        assert!(product_rule_check(&x, &x, &lat).unwrap().holds());
        let one = WindowFunction::constant(&lat, 0, q(1, 1));
        let xp1 = x.add(&one).unwrap();
        assert!(quotient_rule_check(&xp1, &xp1, &lat).unwrap().holds());
        assert!(quotient_rule_check(&x, &one, &lat).unwrap().holds());
        assert!(matches!(
            quotient_rule_check(&one, &x, &lat),
            Err(DeltaError::ZeroDenominator { basepoint: 0, .. })
        ));
        assert!(commute_shift_check(&x, &lat).unwrap().holds());
    }

    #[test]
    fn leibniz() {
        let lat = Lattice::from_ints(&[0, 1, 2, 3]).unwrap();
        let x = WindowFunction::from_points(ints(&[0, 1, 2, 3]), "x");
        let expanded = leibniz_expand(&x, &x, &lat, 2).unwrap();
        assert_eq!(expanded.values(), x.mul(&x).unwrap().delta_n(&lat, 2).unwrap().values());
        let skewed = Lattice::from_ints(&[0, 1, 3, 7]).unwrap();
        let w = WindowFunction::new(1, 0, ints(&[1, 2, 4]), "w");
        assert!(matches!(
            leibniz_expand(&w, &w, &skewed, 1),
            Err(DeltaError::LeibnizNeedsUniform { order: 1 })
        ));
        assert!(leibniz_check(&w, &w, &lat, 2).unwrap().holds());
    }

    #[test]
    fn mixed_orders() {
        let lat = Lattice::from_ints(&[0, 2, 4]).unwrap();
        let u = WindowFunction::from_points(ints(&[1, 2, 3]), "u");
        let du = u.delta(&lat).unwrap();
        assert!(matches!(u.mul(&du), Err(DeltaError::MixedOrder { left: 0, right: 1 })));
        let p = u.mul_uniform(&du, &lat).unwrap();
        assert_eq!((p.order(), p.len()), (1, 2));
        let skewed = Lattice::from_ints(&[0, 1, 4]).unwrap();
        assert_eq!(u.mul_uniform(&du, &skewed), Err(DeltaError::NotUniform));
    }

    #[test]
    fn uniform_prefactor() {
        let lat = Lattice::new(vec![q(1, 3), q(1, 2), q(2, 3), q(5, 6)]).unwrap();
        let h = lat.uniform_step().unwrap();
        for k in 0..3 {
            for r in 0..3 - k {
                let pre = ExactScalar::from_int(k as i64 + 1) / (lat.point(k + r + 1) - lat.point(r));
                assert_eq!(pre, h.checked_recip().unwrap());
            }
        }
    }
}
