//! Coalescent limits: lattices `x + t_i·h_m` with `h_m = h_0·2^{−m}`, exact
//! evaluation at every `h_m`, and Richardson extrapolation in high-precision
//! binary floating point.

use dashu_float::ops::Abs;
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::{IBig, UBig};
use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::exec::Execution;
use crate::expr::{EvalError, Expr};
use crate::jetoracle::{curve_jet, jet_prolong_recursive, JetOracleError, VectorField};
use crate::lattice::{tableau, Lattice, LatticeError, PointedCurveSamples};
use crate::multiprolong::{recursive_rows, ProlongError};
use crate::scalar::ExactScalar;

/// Binary float with round-half-to-even.
pub type HighFloat = FBig<HalfEven, 2>;

pub const MIN_PRECISION_BITS: usize = 80;
pub const DEFAULT_PRECISION_BITS: usize = 128;
/// Minimum estimated convergence order for a pass. Chosen empirically: one-sided
/// divided differences are first-order accurate for analytic curves.
pub const ORDER_GATE: f64 = 0.9;
pub const TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoalesceError {
    #[error("schedule offsets must start at 0 and be distinct")]
    BadOffsets,
    #[error("schedule needs h0 > 0")]
    BadStep,
    #[error("schedule needs at least 3 halvings, got {0}")]
    TooFewSteps(usize),
    #[error("order {k} needs at least {} offsets, schedule has {have}", k + 1)]
    TooFewOffsets { k: usize, have: usize },
    #[error("extrapolation needs at least 4 values, got {0}")]
    TooFewValues(usize),
    #[error("precision must be at least {MIN_PRECISION_BITS} bits, got {0}")]
    Precision(usize),
    #[error("singular evaluation at h = {h}: {detail}")]
    Singular { h: ExactScalar, detail: String },
    #[error("oracle is singular at x = {x}: {detail}")]
    SingularOracle { x: ExactScalar, detail: String },
    #[error("curve must be an expression in x alone; found `{0}`")]
    CurveVariable(String),
    #[error(transparent)]
    Jet(#[from] JetOracleError),
    #[error(transparent)]
    Prolong(#[from] ProlongError),
}

/// Base point `x`, offsets `t_0 = 0, t_1, …, t_n`, scales `h_m = h_0·2^{−m}`
/// for `m = 0..=steps`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoalescenceSchedule {
    pub x: ExactScalar,
    pub offsets: Vec<ExactScalar>,
    pub h0: ExactScalar,
    pub steps: usize,
}

impl CoalescenceSchedule {
    pub fn new(x: ExactScalar, offsets: Vec<ExactScalar>, h0: ExactScalar, steps: usize) -> Result<Self, CoalesceError> {
        if offsets.first().is_none_or(|t| !t.is_zero()) || Lattice::new(offsets.clone()).is_err() {
            return Err(CoalesceError::BadOffsets);
        }
        if h0.is_negative() || h0.is_zero() {
            return Err(CoalesceError::BadStep);
        }
        if steps < 3 {
            return Err(CoalesceError::TooFewSteps(steps));
        }
        Ok(CoalescenceSchedule { x, offsets, h0, steps })
    }

    /// Offsets `0, 1, …, k`, `h_0 = 1/8`, 12 halvings.
    pub fn default_for(x: ExactScalar, k: usize) -> Self {
        let offsets = (0..=k as i64).map(ExactScalar::from_int).collect();
        CoalescenceSchedule::new(x, offsets, ExactScalar::new(1, 8), 12).expect("valid default")
    }

    pub fn h(&self, m: usize) -> ExactScalar {
        &self.h0 / ExactScalar::from(BigInt::from(1u8) << m)
    }

    pub fn hs(&self) -> Vec<ExactScalar> {
        (0..=self.steps).map(|m| self.h(m)).collect()
    }

    pub fn lattice(&self, m: usize) -> Lattice {
        let h = self.h(m);
        Lattice::new(self.offsets.iter().map(|t| &self.x + t * &h).collect()).expect("distinct offsets")
    }
}

pub fn coalescent_lattices(sched: &CoalescenceSchedule) -> Vec<Lattice> {
    (0..=sched.steps).map(|m| sched.lattice(m)).collect()
}

fn to_ibig(n: &BigInt) -> IBig {
    let (sign, bytes) = n.to_bytes_le();
    let mag = IBig::from(UBig::from_le_bytes(&bytes));
    if sign == Sign::Minus {
        -mag
    } else {
        mag
    }
}

/// Rounds an exact rational to `bits` of precision.
pub fn to_high(v: &ExactScalar, bits: usize) -> HighFloat {
    let n = HighFloat::from(to_ibig(v.numer())).with_precision(bits).value();
    let d = HighFloat::from(to_ibig(v.denom())).with_precision(bits).value();
    n / d
}

fn to_f64(v: &HighFloat) -> f64 {
    v.to_f64().value()
}

/// Full-precision decimal rendering.
pub fn decimal(v: &HighFloat) -> String {
    v.to_decimal().value().to_string()
}

#[derive(Debug, Clone)]
pub struct LimitEstimate {
    /// Richardson-accelerated limit `2·v_M − v_{M−1}`.
    pub value: HighFloat,
    /// Last raw value `v_M`.
    pub raw: HighFloat,
    /// Diagnostic only: a second sweep `(4·L_M − L_{M−1})/3` over the
    /// first-sweep values `L_m = 2·v_m − v_{m−1}`. Not used for pass/fail.
    pub second_sweep: HighFloat,
    /// `log2(r_{m}/r_{m+1})` for the last pair of nonzero residuals before
    /// the final one; `None` when the sequence is exactly constant.
    pub order: Option<f64>,
    /// `|v_m − value|`.
    pub residuals: Vec<f64>,
    /// First index from which residuals are non-increasing.
    pub onset: Option<usize>,
    pub diverged: bool,
    /// Every value equal, so the limit is attained exactly.
    pub exact: bool,
    pub precision_bits: usize,
}

/// Extrapolates a sequence indexed by `m` with `h_m = h_0·2^{−m}`.
pub fn estimate_limit(values: &[ExactScalar], precision_bits: usize) -> Result<LimitEstimate, CoalesceError> {
    if precision_bits < MIN_PRECISION_BITS {
        return Err(CoalesceError::Precision(precision_bits));
    }
    if values.len() < 4 {
        return Err(CoalesceError::TooFewValues(values.len()));
    }
    let exact = values.windows(2).all(|w| w[0] == w[1]);
    let v: Vec<HighFloat> = values.iter().map(|x| to_high(x, precision_bits)).collect();
    let m = v.len() - 1;
    let two = HighFloat::from(2u8).with_precision(precision_bits).value();
    let limit = &two * &v[m] - &v[m - 1];
    let prev = &two * &v[m - 1] - &v[m - 2];
    let three = HighFloat::from(3u8).with_precision(precision_bits).value();
    let four = HighFloat::from(4u8).with_precision(precision_bits).value();
    let second_sweep = (&four * &limit - &prev) / &three;
    let residuals: Vec<f64> = v.iter().map(|x| to_f64(&(x - &limit).abs())).collect();
    let diffs: Vec<f64> = v.windows(2).map(|w| to_f64(&(&w[1] - &w[0]).abs())).collect();
    let ratios: Vec<f64> = diffs
        .windows(2)
        .map(|w| if w[0] == 0.0 { if w[1] == 0.0 { 0.0 } else { f64::INFINITY } } else { w[1] / w[0] })
        .collect();
    let tail = &ratios[ratios.len().saturating_sub(3)..];
    let diverged = !exact && !tail.is_empty() && tail.iter().all(|&r| r > 1.0);
    let order = if exact {
        None
    } else {
        // the last pair (m−1, m) is 2:1 by construction of the sweep
        (0..m - 1)
            .rev()
            .find(|&i| residuals[i] > 0.0 && residuals[i + 1] > 0.0)
            .map(|i| (residuals[i] / residuals[i + 1]).log2())
    };
    let onset = if diverged {
        None
    } else {
        let mut start = m;
        while start > 0 && residuals[start - 1] >= residuals[start] {
            start -= 1;
        }
        Some(start)
    };
    Ok(LimitEstimate {
        value: limit,
        raw: v[m].clone(),
        second_sweep,
        order,
        residuals,
        onset,
        diverged,
        exact,
        precision_bits,
    })
}

/// [`estimate_limit`] for floating-point data; each value is converted
/// exactly before extrapolation.
pub fn estimate_limit_f64(values: &[f64], precision_bits: usize) -> Result<LimitEstimate, CoalesceError> {
    let exact: Vec<ExactScalar> = values
        .iter()
        .map(|&x| BigRational::from_float(x).map(ExactScalar::from_rational).unwrap_or_default())
        .collect();
    estimate_limit(&exact, precision_bits)
}

#[derive(Debug, Clone, Copy)]
pub struct CoalesceOptions {
    pub precision_bits: usize,
    pub execution: Execution,
}

impl Default for CoalesceOptions {
    fn default() -> Self {
        CoalesceOptions { precision_bits: DEFAULT_PRECISION_BITS, execution: Execution::default() }
    }
}

/// Convergence report. Exact scalars are `p/q` strings; `limit` and
/// `order` are floats for plotting.
#[derive(Debug, Clone, Serialize)]
pub struct CoalescenceReport {
    pub quantity: String,
    pub k: usize,
    pub x: ExactScalar,
    pub offsets: Vec<ExactScalar>,
    pub h: Vec<ExactScalar>,
    pub value: Vec<ExactScalar>,
    pub limit: f64,
    pub limit_decimal: String,
    pub raw_limit: f64,
    /// Diagnostic; see [`LimitEstimate::second_sweep`].
    pub second_sweep_limit: f64,
    pub second_sweep_error: f64,
    pub order: Option<f64>,
    pub oracle: ExactScalar,
    pub abs_error: f64,
    pub tolerance: f64,
    pub residuals: Vec<f64>,
    pub onset: Option<usize>,
    pub diverged: bool,
    pub exact: bool,
    pub order_gate: f64,
    pub order_gate_basis: &'static str,
    pub precision_bits: usize,
    pub pass: bool,
}

impl CoalescenceReport {
    fn build(
        quantity: &str,
        k: usize,
        sched: &CoalescenceSchedule,
        values: Vec<ExactScalar>,
        oracle: ExactScalar,
        est: LimitEstimate,
    ) -> Self {
        let o = to_high(&oracle, est.precision_bits);
        let abs_error = to_f64(&(&est.value - &o).abs());
        let tol = TOLERANCE.max(TOLERANCE * oracle.to_f64().abs());
        let order_ok = est.exact || est.order.is_some_and(|p| p >= ORDER_GATE);
        let pass = !est.diverged && order_ok && abs_error <= tol;
        CoalescenceReport {
            quantity: quantity.to_string(),
            k,
            x: sched.x.clone(),
            offsets: sched.offsets.clone(),
            h: sched.hs(),
            value: values,
            limit: to_f64(&est.value),
            limit_decimal: decimal(&est.value),
            raw_limit: to_f64(&est.raw),
            second_sweep_limit: to_f64(&est.second_sweep),
            second_sweep_error: to_f64(&(&est.second_sweep - &o).abs()),
            order: est.order,
            oracle,
            abs_error,
            tolerance: tol,
            residuals: est.residuals,
            onset: est.onset,
            diverged: est.diverged,
            exact: est.exact,
            order_gate: ORDER_GATE,
            order_gate_basis: "empirical",
            precision_bits: est.precision_bits,
            pass,
        }
    }
}

fn check_curve(curve: &Expr) -> Result<(), CoalesceError> {
    match curve.variables().into_iter().find(|v| v.name() != "x") {
        Some(v) => Err(CoalesceError::CurveVariable(v.name().to_string())),
        None => Ok(()),
    }
}

fn sample(curve: &Expr, sched: &CoalescenceSchedule, m: usize) -> Result<PointedCurveSamples, CoalesceError> {
    PointedCurveSamples::from_curve(curve, sched.lattice(m)).map_err(|e| CoalesceError::Singular {
        h: sched.h(m),
        detail: match e {
            LatticeError::Eval(inner) => inner.to_string(),
            other => other.to_string(),
        },
    })
}

fn oracle_jet(curve: &Expr, x: &ExactScalar, k: usize) -> Result<Vec<ExactScalar>, CoalesceError> {
    curve_jet(curve, x, k).map_err(|e: EvalError| CoalesceError::SingularOracle { x: x.clone(), detail: e.to_string() })
}

fn run<F>(sched: &CoalescenceSchedule, k: usize, opts: &CoalesceOptions, f: F) -> Result<Vec<ExactScalar>, CoalesceError>
where
    F: Fn(usize) -> Result<ExactScalar, CoalesceError> + Sync + Send,
{
    if opts.precision_bits < MIN_PRECISION_BITS {
        return Err(CoalesceError::Precision(opts.precision_bits));
    }
    if sched.offsets.len() < k + 1 {
        return Err(CoalesceError::TooFewOffsets { k, have: sched.offsets.len() });
    }
    opts.execution.map_range(sched.steps + 1, f).into_iter().collect()
}

/// Limit of `u^(k)_(k)` against the symbolic `k`-th derivative of the curve.
pub fn verify_coord_limit(
    curve: &Expr,
    k: usize,
    sched: &CoalescenceSchedule,
    opts: &CoalesceOptions,
) -> Result<CoalescenceReport, CoalesceError> {
    check_curve(curve)?;
    let values = run(sched, k, opts, |m| {
        let s = sample(curve, sched, m)?;
        Ok(tableau(&s.window(0, k)).get(k, 0).clone())
    })?;
    let oracle = oracle_jet(curve, &sched.x, k)?.swap_remove(k);
    let est = estimate_limit(&values, opts.precision_bits)?;
    Ok(CoalescenceReport::build("coordinate", k, sched, values, oracle, est))
}

/// Limit of `φ^(k)_[k]` (by the recursion) against the jet-space
/// prolongation evaluated on the jet of the curve.
pub fn verify_infinitesimal_limit(
    vf: &VectorField,
    curve: &Expr,
    k: usize,
    sched: &CoalescenceSchedule,
    opts: &CoalesceOptions,
) -> Result<CoalescenceReport, CoalesceError> {
    check_curve(curve)?;
    let values = run(sched, k, opts, |m| {
        let s = sample(curve, sched, m)?;
        let rows = recursive_rows(vf, &s.window(0, k), k).map_err(|e| match e {
            ProlongError::Eval(inner) => CoalesceError::Singular { h: sched.h(m), detail: inner.to_string() },
            other => other.into(),
        })?;
        Ok(rows[k].get(0).clone())
    })?;
    let jet = oracle_jet(curve, &sched.x, k)?;
    let oracle = jet_prolong_recursive(vf, k)?
        .eval(&sched.x, &jet)
        .map_err(|e| CoalesceError::SingularOracle { x: sched.x.clone(), detail: e.to_string() })?
        .swap_remove(k);
    let est = estimate_limit(&values, opts.precision_bits)?;
    Ok(CoalescenceReport::build("infinitesimal", k, sched, values, oracle, est))
}
