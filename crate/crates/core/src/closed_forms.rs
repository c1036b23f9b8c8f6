//! Closed-form expansions of `φ^(k)_[k]` for the rotation field `ξ = −u`,
//! `φ = x`, written in terms of the tableau `u^(k)_(k)` at basepoints 0, 1
//! and 2. Each is returned term by term so callers can report which term
//! disagrees.

use thiserror::Error;

use crate::lattice::{tableau, PointedCurveSamples};
use crate::scalar::ExactScalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClosedFormError {
    #[error("needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("needs an evenly spaced lattice")]
    NotUniform,
}

/// A named summand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub label: &'static str,
    pub value: ExactScalar,
}

pub fn total(terms: &[Term]) -> ExactScalar {
    terms.iter().map(|t| &t.value).sum()
}

fn need(s: &PointedCurveSamples, n: usize) -> Result<(), ClosedFormError> {
    if s.x().len() < n {
        Err(ClosedFormError::TooFewPoints { needed: n, got: s.x().len() })
    } else {
        Ok(())
    }
}

/// `((S^m − id)/(x_{r+m} − x_r))[−u_0]` at basepoint `r`.
fn xi_slope(s: &PointedCurveSamples, r: usize, m: usize) -> ExactScalar {
    let (x, u) = (s.x(), s.u());
    (-&u[r + m] + &u[r]) / (&x[r + m] - &x[r])
}

/// `1 − u^(1)_(1)·((S − id)/(x_1 − x_0))[−u_0]`, equal to `1 + (u^(1)_(1))²`.
pub fn rotation_order1(s: &PointedCurveSamples) -> Result<Vec<Term>, ClosedFormError> {
    need(s, 2)?;
    let t = tableau(s);
    Ok(vec![
        Term { label: "1", value: ExactScalar::one() },
        Term { label: "-u1*(S-id)/(x1-x0)[-u0]", value: -(t.get(1, 0) * xi_slope(s, 0, 1)) },
    ])
}

/// `u2·u1 + S[u1]·u2 − u2·((S² − id)/(x_2 − x_0))[−u_0]`.
pub fn rotation_order2(s: &PointedCurveSamples) -> Result<Vec<Term>, ClosedFormError> {
    need(s, 3)?;
    let t = tableau(s);
    let (u1, u2) = (t.get(1, 0), t.get(2, 0));
    Ok(vec![
        Term { label: "u2*u1", value: u2 * u1 },
        Term { label: "S[u1]*u2", value: t.get(1, 1) * u2 },
        Term { label: "-u2*(S^2-id)/(x2-x0)[-u0]", value: -(u2 * xi_slope(s, 0, 2)) },
    ])
}

/// Order 3 on any lattice:
///
/// ```text
/// u3·u1 + (3/2)·((x2−x0)/(x3−x0))·S[u2]·u2 + (3/2)·((x3−x1)/(x3−x0))·S[u2]·S[u2]
///   + S[u1]·u3 − u3·B − S[u2]·(3(S − id)/(x3 − x0))[B] − u3·((S³ − id)/(x3 − x0))[−u0]
/// ```
///
/// with `B = ((S² − id)/(x2 − x0))[−u0]`.
pub fn rotation_order3(s: &PointedCurveSamples) -> Result<Vec<Term>, ClosedFormError> {
    need(s, 4)?;
    let t = tableau(s);
    let x = s.x();
    let (u1, u2, u3) = (t.get(1, 0), t.get(2, 0), t.get(3, 0));
    let (su1, su2) = (t.get(1, 1), t.get(2, 1));
    let span = &x[3] - &x[0];
    let half3 = ExactScalar::new(3, 2);
    let b0 = xi_slope(s, 0, 2);
    let b1 = xi_slope(s, 1, 2);
    Ok(vec![
        Term { label: "u3*u1", value: u3 * u1 },
        Term { label: "(3/2)((x2-x0)/(x3-x0))S[u2]*u2", value: &half3 * (&x[2] - &x[0]) / &span * su2 * u2 },
        Term { label: "(3/2)((x3-x1)/(x3-x0))S[u2]*S[u2]", value: &half3 * (&x[3] - &x[1]) / &span * su2 * su2 },
        Term { label: "S[u1]*u3", value: su1 * u3 },
        Term { label: "-u3*B", value: -(u3 * &b0) },
        Term { label: "-S[u2]*3(S-id)/(x3-x0)[B]", value: -(su2 * ExactScalar::from_int(3) * (&b1 - &b0) / &span) },
        Term { label: "-u3*(S^3-id)/(x3-x0)[-u0]", value: -(u3 * xi_slope(s, 0, 3)) },
    ])
}

/// Order 3 on an evenly spaced lattice with step `h`, where the weights
/// above reduce to 1 and the slopes to `(S^m − id)/(m·h)`:
///
/// ```text
/// u3·u1 + S[u2]·u2 + S[u2]·S[u2] + S[u1]·u3 − u3·((S² − id)/(2h))[−u0]
///   − S[u2]·((S − id)/h)[((S² − id)/(2h))[−u0]] − u3·((S³ − id)/(3h))[−u0]
/// ```
pub fn rotation_order3_uniform(s: &PointedCurveSamples) -> Result<Vec<Term>, ClosedFormError> {
    need(s, 4)?;
    let h = s.lattice().uniform_step().ok_or(ClosedFormError::NotUniform)?;
    let t = tableau(s);
    let u = s.u();
    let (u1, u2, u3) = (t.get(1, 0), t.get(2, 0), t.get(3, 0));
    let (su1, su2) = (t.get(1, 1), t.get(2, 1));
    let slope = |r: usize, m: usize| (-&u[r + m] + &u[r]) / (ExactScalar::from_int(m as i64) * &h);
    let (b0, b1) = (slope(0, 2), slope(1, 2));
    Ok(vec![
        Term { label: "u3*u1", value: u3 * u1 },
        Term { label: "S[u2]*u2", value: su2 * u2 },
        Term { label: "S[u2]*S[u2]", value: su2 * su2 },
        Term { label: "S[u1]*u3", value: su1 * u3 },
        Term { label: "-u3*(S^2-id)/(2h)[-u0]", value: -(u3 * &b0) },
        Term { label: "-S[u2]*(S-id)/h[(S^2-id)/(2h)[-u0]]", value: -(su2 * (&b1 - &b0) / &h) },
        Term { label: "-u3*(S^3-id)/(3h)[-u0]", value: -(u3 * slope(0, 3)) },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetoracle::VectorField;
    use crate::lattice::Lattice;
    use crate::multiprolong::infinitesimal_recursive;
    use crate::scalar::q;

    #[test]
    fn closed_forms_match_recursion() {
        let s = PointedCurveSamples::new(
            Lattice::new(vec![q(1, 3), q(-2, 1), q(5, 2), q(4, 1)]).unwrap(),
            vec![q(1, 1), q(7, 3), q(-1, 2), q(2, 1)],
        )
        .unwrap();
        let rec = infinitesimal_recursive(&VectorField::rotation(), &s, 3).unwrap();
        assert_eq!(total(&rotation_order1(&s).unwrap()), rec.phibracket[1]);
        assert_eq!(total(&rotation_order2(&s).unwrap()), rec.phibracket[2]);
        assert_eq!(total(&rotation_order3(&s).unwrap()), rec.phibracket[3]);
        assert_eq!(rotation_order3_uniform(&s), Err(ClosedFormError::NotUniform));

        let s = PointedCurveSamples::new(
            Lattice::new(vec![q(1, 3), q(5, 6), q(4, 3), q(11, 6)]).unwrap(),
            vec![q(1, 1), q(7, 3), q(-1, 2), q(2, 1)],
        )
        .unwrap();
        let rec = infinitesimal_recursive(&VectorField::rotation(), &s, 3).unwrap();
        assert_eq!(total(&rotation_order3_uniform(&s).unwrap()), rec.phibracket[3]);
        let general = rotation_order3(&s).unwrap();
        let uniform = rotation_order3_uniform(&s).unwrap();
        for (g, u) in general.iter().zip(&uniform) {
            assert_eq!(g.value, u.value, "{} vs {}", g.label, u.label);
        }
    }
}
