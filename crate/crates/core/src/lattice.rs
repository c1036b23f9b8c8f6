//! Lattices, Vandermonde determinants, divided differences and the
//! multispace coordinates `u^(k)_(k)` and `μ^(k)_ℓ`.
//!
//! A window of order `k` based at `r` is the run of consecutive points
//! `x_r, …, x_{r+k}` in the given ordering.

use std::collections::HashMap;
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{binding, EvalError, Expr, Poly};
use crate::linalg;
use crate::scalar::ExactScalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("lattice points {first} and {second} coincide (x = {value})")]
    DuplicatePoint { first: usize, second: usize, value: ExactScalar },
    #[error("lattice is empty")]
    Empty,
    #[error("{what}: expected {expected} values, got {got}")]
    LengthMismatch { what: &'static str, expected: usize, got: usize },
    #[error("column index {index} out of range for a lattice of order {order}")]
    ColumnOutOfRange { index: usize, order: usize },
    #[error("columns {0} and {0} cannot both be replaced")]
    ColumnCollision(usize),
    #[error("order {k} exceeds lattice order {order}")]
    OrderOutOfRange { k: usize, order: usize },
    #[error("column {l} exceeds order {k}")]
    MuIndex { l: usize, k: usize },
    #[error("abscissa {x} has multiplicity {mult} but only {supplied} derivative values")]
    MissingDerivativeData { x: ExactScalar, mult: usize, supplied: usize },
    #[error("abscissa {x} has multiplicity 0")]
    ZeroMultiplicity { x: ExactScalar },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Ordered, pairwise distinct abscissas `x_0, …, x_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Lattice {
    points: Vec<ExactScalar>,
}

impl Lattice {
    pub fn new(points: Vec<ExactScalar>) -> Result<Self, LatticeError> {
        if points.is_empty() {
            return Err(LatticeError::Empty);
        }
        let mut seen: HashMap<&ExactScalar, usize> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            if let Some(&j) = seen.get(p) {
                return Err(LatticeError::DuplicatePoint { first: j, second: i, value: p.clone() });
            }
            seen.insert(p, i);
        }
        Ok(Lattice { points })
    }

    pub fn from_ints(xs: &[i64]) -> Result<Self, LatticeError> {
        Lattice::new(xs.iter().map(|&x| ExactScalar::from_int(x)).collect())
    }

    pub fn points(&self) -> &[ExactScalar] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &ExactScalar {
        &self.points[i]
    }

    /// `n`, one less than the number of points.
    pub fn order(&self) -> usize {
        self.points.len() - 1
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points `x_r, …, x_{r+k}`.
    pub fn window(&self, r: usize, k: usize) -> Lattice {
        Lattice { points: self.points[r..=r + k].to_vec() }
    }

    /// Common spacing `h` when `x_i = x_0 + i·h` for all `i`.
    pub fn uniform_step(&self) -> Option<ExactScalar> {
        if self.points.len() < 2 {
            return None;
        }
        let h = &self.points[1] - &self.points[0];
        self.points
            .windows(2)
            .all(|w| &w[1] - &w[0] == h)
            .then_some(h)
    }
}

/// Points `(x_i, u_i)` of a discrete curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointedCurveSamples {
    lattice: Lattice,
    u: Vec<ExactScalar>,
}

impl PointedCurveSamples {
    pub fn new(lattice: Lattice, u: Vec<ExactScalar>) -> Result<Self, LatticeError> {
        if u.len() != lattice.len() {
            return Err(LatticeError::LengthMismatch {
                what: "u-values",
                expected: lattice.len(),
                got: u.len(),
            });
        }
        Ok(PointedCurveSamples { lattice, u })
    }

    pub fn from_pairs(pairs: &[(ExactScalar, ExactScalar)]) -> Result<Self, LatticeError> {
        let lattice = Lattice::new(pairs.iter().map(|p| p.0.clone()).collect())?;
        PointedCurveSamples::new(lattice, pairs.iter().map(|p| p.1.clone()).collect())
    }

    /// Samples `u_i = curve(x_i)` of an expression in `x`.
    pub fn from_curve(curve: &Expr, lattice: Lattice) -> Result<Self, LatticeError> {
        let u = lattice
            .points()
            .iter()
            .map(|x| curve.eval(&binding([("x", x.clone())])))
            .collect::<Result<Vec<_>, _>>()?;
        PointedCurveSamples::new(lattice, u)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn x(&self) -> &[ExactScalar] {
        self.lattice.points()
    }

    pub fn u(&self) -> &[ExactScalar] {
        &self.u
    }

    pub fn order(&self) -> usize {
        self.lattice.order()
    }

    /// The order-`k` window based at `r`.
    pub fn window(&self, r: usize, k: usize) -> PointedCurveSamples {
        PointedCurveSamples {
            lattice: self.lattice.window(r, k),
            u: self.u[r..=r + k].to_vec(),
        }
    }

    /// Same lattice, new ordinates.
    pub fn with_values(&self, u: Vec<ExactScalar>) -> Result<Self, LatticeError> {
        PointedCurveSamples::new(self.lattice.clone(), u)
    }

    /// Reorders the points; `perm[i]` is the old index of the new `i`-th point.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, LatticeError> {
        let x = perm.iter().map(|&i| self.x()[i].clone()).collect();
        let u = perm.iter().map(|&i| self.u[i].clone()).collect();
        PointedCurveSamples::new(Lattice::new(x)?, u)
    }

    fn check_order(&self, k: usize) -> Result<(), LatticeError> {
        if k > self.order() {
            Err(LatticeError::OrderOutOfRange { k, order: self.order() })
        } else {
            Ok(())
        }
    }
}

/// One abscissa of a confluent sample with its derivative data
/// `u, u', …, u^(mult−1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfluentNode {
    pub x: ExactScalar,
    pub derivatives: Vec<ExactScalar>,
}

impl ConfluentNode {
    pub fn multiplicity(&self) -> usize {
        self.derivatives.len()
    }
}

/// Distinct abscissas with multiplicities, listed so that repeated points are
/// contiguous.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfluentSamples {
    nodes: Vec<ConfluentNode>,
}

impl ConfluentSamples {
    /// Each entry is `(x, multiplicity, derivative data)`. Extra derivative
    /// values beyond the multiplicity are ignored.
    pub fn new(entries: Vec<(ExactScalar, usize, Vec<ExactScalar>)>) -> Result<Self, LatticeError> {
        Lattice::new(entries.iter().map(|e| e.0.clone()).collect())?;
        let nodes = entries
            .into_iter()
            .map(|(x, mult, mut derivatives)| {
                if mult == 0 {
                    return Err(LatticeError::ZeroMultiplicity { x });
                }
                if derivatives.len() < mult {
                    return Err(LatticeError::MissingDerivativeData {
                        x,
                        mult,
                        supplied: derivatives.len(),
                    });
                }
                derivatives.truncate(mult);
                Ok(ConfluentNode { x, derivatives })
            })
            .collect::<Result<_, _>>()?;
        Ok(ConfluentSamples { nodes })
    }

    /// Distinct samples, each with multiplicity 1.
    pub fn from_samples(s: &PointedCurveSamples) -> Self {
        ConfluentSamples {
            nodes: s
                .x()
                .iter()
                .zip(s.u())
                .map(|(x, u)| ConfluentNode { x: x.clone(), derivatives: vec![u.clone()] })
                .collect(),
        }
    }

    /// `u` sampled with its derivatives from a polynomial or rational curve.
    pub fn from_curve(curve: &Expr, abscissas: &[(ExactScalar, usize)]) -> Result<Self, LatticeError> {
        let entries = abscissas
            .iter()
            .map(|(x, mult)| {
                let b = binding([("x", x.clone())]);
                let mut d = curve.clone();
                let mut derivs = Vec::with_capacity(*mult);
                for _ in 0..*mult {
                    derivs.push(d.eval(&b)?);
                    d = d.partial("x");
                }
                Ok((x.clone(), *mult, derivs))
            })
            .collect::<Result<Vec<_>, LatticeError>>()?;
        ConfluentSamples::new(entries)
    }

    pub fn nodes(&self) -> &[ConfluentNode] {
        &self.nodes
    }

    /// Total point count `Σ n_i`.
    pub fn total_points(&self) -> usize {
        self.nodes.iter().map(ConfluentNode::multiplicity).sum()
    }
}

/// Triangular array `T[k][r] = u^(k)_(k)` of the window of order `k` based at
/// `r`. Serializes as an array of arrays of `p/q` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DividedDifferenceTableau {
    rows: Vec<Vec<ExactScalar>>,
}

impl DividedDifferenceTableau {
    /// Builds the full tableau of the values over `lattice` by
    /// `T[k+1][r] = (k+1)·(T[k][r+1] − T[k][r])/(x_{k+1+r} − x_r)`.
    pub fn build(lattice: &Lattice, values: &[ExactScalar]) -> Result<Self, LatticeError> {
        if values.len() != lattice.len() {
            return Err(LatticeError::LengthMismatch {
                what: "tableau base row",
                expected: lattice.len(),
                got: values.len(),
            });
        }
        let x = lattice.points();
        let mut rows = vec![values.to_vec()];
        for k in 0..lattice.order() {
            let prev = &rows[k];
            let scale = ExactScalar::from_int(k as i64 + 1);
            let next = (0..prev.len() - 1)
                .map(|r| &scale * (&prev[r + 1] - &prev[r]) / (&x[k + 1 + r] - &x[r]))
                .collect();
            rows.push(next);
        }
        Ok(DividedDifferenceTableau { rows })
    }

    pub fn from_rows(rows: Vec<Vec<ExactScalar>>) -> Self {
        DividedDifferenceTableau { rows }
    }

    pub fn order(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn row(&self, k: usize) -> &[ExactScalar] {
        &self.rows[k]
    }

    pub fn rows(&self) -> &[Vec<ExactScalar>] {
        &self.rows
    }

    pub fn get(&self, k: usize, r: usize) -> &ExactScalar {
        &self.rows[k][r]
    }
}

/// Multispace coordinates `(x_0, …, x_n; u^(0)_(0), …, u^(n)_(n))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultispaceJet {
    pub points: Vec<ExactScalar>,
    pub coords: Vec<ExactScalar>,
}

impl MultispaceJet {
    pub fn from_samples(s: &PointedCurveSamples) -> Self {
        let t = tableau(s);
        MultispaceJet {
            points: s.x().to_vec(),
            coords: (0..=s.order()).map(|k| t.get(k, 0).clone()).collect(),
        }
    }
}

fn vandermonde(points: &[ExactScalar]) -> Vec<Vec<ExactScalar>> {
    points
        .iter()
        .map(|x| (0..points.len()).map(|j| x.pow(j as u32)).collect())
        .collect()
}

/// Vandermonde determinant by fraction-free elimination.
pub fn vdet(lat: &Lattice) -> ExactScalar {
    linalg::det(&vandermonde(lat.points()))
}

/// Vandermonde determinant by the product formula `∏_{i<j}(x_j − x_i)`.
pub fn vdet_product(lat: &Lattice) -> ExactScalar {
    let x = lat.points();
    let mut acc = ExactScalar::one();
    for j in 0..x.len() {
        for i in 0..j {
            acc *= &(&x[j] - &x[i]);
        }
    }
    acc
}

fn check_column(lat: &Lattice, col: &[ExactScalar], index: usize) -> Result<(), LatticeError> {
    if index > lat.order() {
        return Err(LatticeError::ColumnOutOfRange { index, order: lat.order() });
    }
    if col.len() != lat.len() {
        return Err(LatticeError::LengthMismatch {
            what: "replacement column",
            expected: lat.len(),
            got: col.len(),
        });
    }
    Ok(())
}

/// Determinant of the Vandermonde matrix with the `x^ℓ` column (indexed from
/// 0) replaced by `col`.
pub fn vdet_replace(lat: &Lattice, col: &[ExactScalar], l: usize) -> Result<ExactScalar, LatticeError> {
    check_column(lat, col, l)?;
    let mut m = vandermonde(lat.points());
    for (row, v) in m.iter_mut().zip(col) {
        row[l] = v.clone();
    }
    Ok(linalg::det(&m))
}

/// Determinant with column `i` replaced by `u` and column `j` by `v`.
pub fn vdet_replace2(
    lat: &Lattice,
    (u, i): (&[ExactScalar], usize),
    (v, j): (&[ExactScalar], usize),
) -> Result<ExactScalar, LatticeError> {
    check_column(lat, u, i)?;
    check_column(lat, v, j)?;
    if i == j {
        return Err(LatticeError::ColumnCollision(i));
    }
    let mut m = vandermonde(lat.points());
    for (r, row) in m.iter_mut().enumerate() {
        row[i] = u[r].clone();
        row[j] = v[r].clone();
    }
    Ok(linalg::det(&m))
}

/// `[z_0, …, z_n]` by the prefix recursion
/// `[z_0,…,z_k] = ([z_0,…,z_{k−2},z_k] − [z_0,…,z_{k−1}])/(x_k − x_{k−1})`.
pub fn dd_recursive(s: &PointedCurveSamples) -> ExactScalar {
    fn go(
        idx: &[usize],
        s: &PointedCurveSamples,
        memo: &mut HashMap<Vec<usize>, ExactScalar>,
    ) -> ExactScalar {
        if let [i] = idx {
            return s.u()[*i].clone();
        }
        if let Some(v) = memo.get(idx) {
            return v.clone();
        }
        let m = idx.len();
        let (last, before) = (idx[m - 1], idx[m - 2]);
        let mut skip_before = idx[..m - 2].to_vec();
        skip_before.push(last);
        let a = go(&skip_before, s, memo);
        let b = go(&idx[..m - 1], s, memo);
        let v = (a - b) / (&s.x()[last] - &s.x()[before]);
        memo.insert(idx.to_vec(), v.clone());
        v
    }
    let idx: Vec<usize> = (0..s.x().len()).collect();
    go(&idx, s, &mut HashMap::new())
}

/// Confluent (Hermite) divided difference over all points, repeated
/// abscissas taken contiguously. A single abscissa of multiplicity `k+1`
/// gives `u^(k)(x_0)/k!`.
pub fn dd_confluent(cs: &ConfluentSamples) -> ExactScalar {
    let mut z: Vec<(&ExactScalar, &ConfluentNode)> = Vec::new();
    for node in cs.nodes() {
        for _ in 0..node.multiplicity() {
            z.push((&node.x, node));
        }
    }
    let mut row: Vec<ExactScalar> = z.iter().map(|(_, n)| n.derivatives[0].clone()).collect();
    for j in 1..z.len() {
        row = (0..z.len() - j)
            .map(|r| {
                let (x0, node) = z[r];
                let x1 = z[r + j].0;
                if x0 == x1 {
                    &node.derivatives[j] / ExactScalar::factorial(j)
                } else {
                    (&row[r + 1] - &row[r]) / (x1 - x0)
                }
            })
            .collect();
    }
    row.swap_remove(0)
}

/// Interpolating polynomial in Newton form
/// `Σ_k (u^(k)_(k)/k!)·∏_{j<k}(x − x_j)`.
pub fn newton_interpolant(s: &PointedCurveSamples) -> Expr {
    let t = tableau(s);
    let x = Expr::var("x");
    let mut terms = Vec::new();
    let mut basis = Expr::one();
    for k in 0..=s.order() {
        let coeff = t.get(k, 0) / ExactScalar::factorial(k);
        terms.push(Expr::mul(Expr::Const(coeff), basis.clone()));
        basis = Expr::mul(basis, Expr::sub(x.clone(), Expr::Const(s.x()[k].clone())));
    }
    Expr::sum(terms)
}

/// The interpolant expanded in monomials of `x`.
pub fn newton_monomial(s: &PointedCurveSamples) -> Poly {
    newton_interpolant(s)
        .to_poly()
        .expect("interpolant is a polynomial")
}

/// `u^(k)_(k) = k!·d^(k)(u, x^k)/d^(k)` on the first `k+1` points, by
/// determinants.
pub fn multispace_coord(s: &PointedCurveSamples, k: usize) -> Result<ExactScalar, LatticeError> {
    mu(s, k, k)
}

/// `μ^(k)_ℓ = k!·d^(k)(u, x^ℓ)/d^(k)` on the first `k+1` points.
pub fn mu(s: &PointedCurveSamples, k: usize, l: usize) -> Result<ExactScalar, LatticeError> {
    s.check_order(k)?;
    if l > k {
        return Err(LatticeError::MuIndex { l, k });
    }
    let w = s.window(0, k);
    let num = vdet_replace(w.lattice(), w.u(), l)?;
    Ok(ExactScalar::factorial(k) * num / vdet(w.lattice()))
}

/// Divided-difference tableau of the samples.
pub fn tableau(s: &PointedCurveSamples) -> DividedDifferenceTableau {
    DividedDifferenceTableau::build(s.lattice(), s.u()).expect("matching lengths")
}

/// CSV input for curve samples.
pub mod csv_io {
    use super::*;

    #[derive(Debug, Error)]
    pub enum CsvError {
        #[error("line {line}: {message}")]
        Line { line: u64, message: String },
        #[error("lines {first} and {second}: duplicate abscissa {value}")]
        DuplicateRows { first: u64, second: u64, value: ExactScalar },
        #[error("no data rows")]
        Empty,
        #[error("csv: {0}")]
        Csv(#[from] csv::Error),
        #[error("{0}")]
        Invalid(#[from] LatticeError),
    }

    fn records<R: Read>(reader: R, expected: &[&str]) -> Result<Vec<(u64, Vec<String>)>, CsvError> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .flexible(true)
            .comment(Some(b'#'))
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        let got: Vec<&str> = headers.iter().collect();
        if got.len() < expected.len() || got[..expected.len()] != *expected {
            return Err(CsvError::Line {
                line: 1,
                message: format!("expected header `{}`, got `{}`", expected.join(","), got.join(",")),
            });
        }
        let mut out = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            out.push((line, rec.iter().map(str::to_string).collect()));
        }
        if out.is_empty() {
            return Err(CsvError::Empty);
        }
        Ok(out)
    }

    fn cell(line: u64, name: &str, raw: &str) -> Result<ExactScalar, CsvError> {
        raw.parse().map_err(|_| CsvError::Line {
            line,
            message: format!("column `{name}`: `{raw}` is not an exact rational"),
        })
    }

    fn check_distinct(rows: &[(u64, ExactScalar)]) -> Result<(), CsvError> {
        let mut seen: HashMap<&ExactScalar, u64> = HashMap::new();
        for (line, x) in rows {
            if let Some(&first) = seen.get(x) {
                return Err(CsvError::DuplicateRows { first, second: *line, value: x.clone() });
            }
            seen.insert(x, *line);
        }
        Ok(())
    }

    /// Reads `x,u` rows.
    pub fn read_samples<R: Read>(reader: R) -> Result<PointedCurveSamples, CsvError> {
        let mut xs = Vec::new();
        let mut us = Vec::new();
        for (line, rec) in records(reader, &["x", "u"])? {
            if rec.len() != 2 {
                return Err(CsvError::Line {
                    line,
                    message: format!("expected 2 fields, got {}", rec.len()),
                });
            }
            xs.push((line, cell(line, "x", &rec[0])?));
            us.push(cell(line, "u", &rec[1])?);
        }
        check_distinct(&xs)?;
        let lattice = Lattice::new(xs.into_iter().map(|p| p.1).collect())?;
        Ok(PointedCurveSamples::new(lattice, us)?)
    }

    /// Reads `x,mult,d0,d1,…` rows.
    pub fn read_confluent<R: Read>(reader: R) -> Result<ConfluentSamples, CsvError> {
        let mut xs = Vec::new();
        let mut entries = Vec::new();
        for (line, rec) in records(reader, &["x", "mult"])? {
            if rec.len() < 3 {
                return Err(CsvError::Line { line, message: "expected x, mult and at least d0".into() });
            }
            let x = cell(line, "x", &rec[0])?;
            let mult: usize = rec[1].parse().map_err(|_| CsvError::Line {
                line,
                message: format!("column `mult`: `{}` is not a positive integer", rec[1]),
            })?;
            let derivs = rec[2..]
                .iter()
                .filter(|c| !c.is_empty())
                .enumerate()
                .map(|(i, c)| cell(line, &format!("d{i}"), c))
                .collect::<Result<Vec<_>, _>>()?;
            if mult == 0 || derivs.len() < mult {
                return Err(CsvError::Line {
                    line,
                    message: format!(
                        "multiplicity {} needs {} derivative values, got {}",
                        rec[1],
                        mult.max(1),
                        derivs.len()
                    ),
                });
            }
            xs.push((line, x.clone()));
            entries.push((x, mult, derivs));
        }
        check_distinct(&xs)?;
        Ok(ConfluentSamples::new(entries)?)
    }
}
