//! Randomized verification suites.
//!
//! Every check draws its inputs from [`trial_rng`] keyed by the check name
//! and trial index, so reports are reproducible from the seed alone and do
//! not depend on whether trials ran in parallel.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::closed_forms;
use crate::coalesce::{
    verify_coord_limit, verify_infinitesimal_limit, CoalesceOptions, CoalescenceReport, CoalescenceSchedule,
    DEFAULT_PRECISION_BITS,
};
use crate::deltaop::{
    commute_shift_check, leibniz_check, product_rule_check, quotient_rule_check, IdentityCheck, WindowFunction,
};
use crate::exec::Execution;
use crate::expr::{binding, parse, Expr};
use crate::jetoracle::{
    curve_jet, jet_prolong_characteristic, jet_prolong_expanded, jet_prolong_recursive, VectorField,
};
use crate::lattice::{
    dd_confluent, dd_recursive, mu, multispace_coord, newton_interpolant, newton_monomial, tableau, vdet,
    vdet_product, vdet_replace, vdet_replace2, ConfluentSamples, Lattice, PointedCurveSamples,
};
use crate::multiprolong::{
    check_action_consistency, finite_action_derivative, infinitesimal_direct, infinitesimal_direct_from_zero,
    infinitesimal_recursive, OneParamAction,
};
use crate::random::{self, trial_rng, DEFAULT_SEED};
use crate::scalar::ExactScalar;

const MAX_LISTED_FAILURES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    All,
    Identities,
    Oracles,
    Coalesce,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::All => "all",
            Suite::Identities => "identities",
            Suite::Oracles => "oracles",
            Suite::Coalesce => "coalesce",
        })
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Suite::All),
            "identities" => Ok(Suite::Identities),
            "oracles" => Ok(Suite::Oracles),
            "coalesce" => Ok(Suite::Coalesce),
            other => Err(format!("unknown suite `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    pub trials: usize,
    pub execution: Execution,
    pub precision_bits: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: DEFAULT_SEED,
            trials: 100,
            execution: Execution::default(),
            precision_bits: DEFAULT_PRECISION_BITS,
        }
    }
}

impl VerifyConfig {
    fn coalesce_options(&self) -> CoalesceOptions {
        CoalesceOptions { precision_bits: self.precision_bits, execution: self.execution }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub trials: usize,
    pub passed: usize,
    pub pass: bool,
    /// The first few failures, `trial N: message`.
    pub failures: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    fn from_outcomes(name: &str, outcomes: Vec<Result<(), String>>) -> Self {
        let trials = outcomes.len();
        let failures: Vec<String> = outcomes
            .into_iter()
            .enumerate()
            .filter_map(|(t, r)| r.err().map(|e| format!("trial {t}: {e}")))
            .collect();
        let passed = trials - failures.len();
        CheckResult {
            name: name.to_string(),
            trials,
            passed,
            pass: failures.is_empty(),
            failures: failures.into_iter().take(MAX_LISTED_FAILURES).collect(),
            note: None,
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

type Outcome = Result<(), String>;

fn run_trials<F>(name: &str, cfg: &VerifyConfig, trials: usize, f: F) -> CheckResult
where
    F: Fn(&mut ChaCha8Rng) -> Outcome + Sync + Send,
{
    let outcomes = cfg.execution.map_range(trials, |t| f(&mut trial_rng(cfg.seed, name, t)));
    CheckResult::from_outcomes(name, outcomes)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn holds(check: Result<IdentityCheck, impl fmt::Display>, what: &str) -> Outcome {
    match check {
        Ok(IdentityCheck::Holds) => Ok(()),
        Ok(IdentityCheck::Fails { basepoint }) => Err(format!("{what} fails at basepoint {basepoint}")),
        Err(e) => Err(format!("{what}: {e}")),
    }
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

fn window(order: usize, values: Vec<ExactScalar>, name: &str) -> WindowFunction {
    WindowFunction::new(order, 0, values, name)
}

// ---------------------------------------------------------------- identities

pub fn check_vandermonde_product(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("vandermonde-product", cfg, trials, |rng| {
        let n = rng.gen_range(0..=6);
        let lat = random::lattice(rng, n);
        let (a, b) = (vdet(&lat), vdet_product(&lat));
        ensure(a == b, || format!("elimination {a} vs product {b} on {:?}", lat.points()))
    })
}

/// `d·d([u,xⁱ];[v,xʲ]) = d(u,xⁱ)·d(v,xʲ) − d(v,xⁱ)·d(u,xʲ)` for every ordered
/// pair `i ≠ j`.
pub fn check_determinant_identity(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("determinant-identity", cfg, trials, |rng| {
        let k = rng.gen_range(1..=5);
        let lat = random::lattice(rng, k);
        let u = random::values(rng, k + 1);
        let v = random::values(rng, k + 1);
        let d = vdet(&lat);
        for i in 0..=k {
            for j in (0..=k).filter(|&j| j != i) {
                let both = vdet_replace2(&lat, (&u, i), (&v, j)).map_err(err)?;
                let rhs = vdet_replace(&lat, &u, i).map_err(err)? * vdet_replace(&lat, &v, j).map_err(err)?
                    - vdet_replace(&lat, &v, i).map_err(err)? * vdet_replace(&lat, &u, j).map_err(err)?;
                ensure(&d * both == rhs, || format!("k = {k}, columns ({i}, {j})"))?;
            }
        }
        Ok(())
    })
}

/// Tableau, determinant ratio and prefix recursion give the same divided
/// differences.
pub fn check_divided_differences(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("divided-differences", cfg, trials, |rng| {
        let n = rng.gen_range(1..=6);
        let s = random::samples(rng, n);
        let t = tableau(&s);
        for k in 0..=n {
            let w = s.window(0, k);
            let by_det = multispace_coord(&s, k).map_err(err)? / ExactScalar::factorial(k);
            let by_rec = dd_recursive(&w);
            let by_tab = t.get(k, 0) / ExactScalar::factorial(k);
            ensure(by_det == by_rec && by_rec == by_tab, || {
                format!("k = {k}: determinant {by_det}, recursion {by_rec}, tableau {by_tab}")
            })?;
        }
        Ok(())
    })
}

/// `μ^(k)_ℓ/k!` is the coefficient of `x^ℓ` in the interpolant, checked on
/// polynomial data against Taylor coefficients at 0.
pub fn check_coefficient_extraction(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("coefficient-extraction", cfg, trials, |rng| {
        let k = rng.gen_range(1..=5);
        let p = random::polynomial(rng, &["x"], k as u32);
        let s = PointedCurveSamples::from_curve(&p, random::lattice(rng, k)).map_err(err)?;
        let taylor = curve_jet(&p, &ExactScalar::zero(), k).map_err(err)?;
        for l in 0..=k {
            let got = mu(&s, k, l).map_err(err)? / ExactScalar::factorial(k);
            let want = &taylor[l] / ExactScalar::factorial(l);
            ensure(got == want, || format!("p = {p}, ℓ = {l}: {got} vs {want}"))?;
        }
        Ok(())
    })
}

pub fn check_interpolation(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("interpolation", cfg, trials, |rng| {
        let n = rng.gen_range(0..=6);
        let s = random::samples(rng, n);
        let newton = newton_interpolant(&s);
        let mono = newton_monomial(&s);
        for (x, u) in s.x().iter().zip(s.u()) {
            let b = binding([("x", x.clone())]);
            let a = newton.eval(&b).map_err(err)?;
            let m = mono.eval(&b).map_err(err)?;
            ensure(&a == u && &m == u, || format!("at x = {x}: newton {a}, monomial {m}, sample {u}"))?;
        }
        ensure(mono.degree().unwrap_or(0) as usize <= n, || format!("degree of {mono} exceeds {n}"))
    })
}

pub fn check_permutation_symmetry(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("permutation-symmetry", cfg, trials, |rng| {
        use rand::seq::SliceRandom;
        let n = rng.gen_range(1..=6);
        let s = random::samples(rng, n);
        let mut perm: Vec<usize> = (0..=n).collect();
        perm.shuffle(rng);
        let p = s.permuted(&perm).map_err(err)?;
        let (a, b) = (dd_recursive(&s), dd_recursive(&p));
        ensure(a == b, || format!("permutation {perm:?}: {a} vs {b}"))
    })
}

/// For a polynomial of degree `≤ k`, `u^(k)_(k)` is its constant `k`-th
/// derivative on every lattice.
pub fn check_polynomial_exactness(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("polynomial-exactness", cfg, trials, |rng| {
        let k = rng.gen_range(0..=6);
        let deg = rng.gen_range(0..=k) as u32;
        let p = random::curve(rng, deg);
        let s = PointedCurveSamples::from_curve(&p, random::lattice(rng, k)).map_err(err)?;
        let got = multispace_coord(&s, k).map_err(err)?;
        let want = curve_jet(&p, &random::scalar(rng), k).map_err(err)?.swap_remove(k);
        ensure(got == want, || format!("p = {p}, k = {k}: {got} vs {want}"))
    })
}

/// A single node of multiplicity `k+1` gives `p^(k)(x₀)/k!`; all-distinct
/// nodes agree with the prefix recursion.
pub fn check_confluent(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("confluent", cfg, trials, |rng| {
        let k = rng.gen_range(0..=5);
        let deg = rng.gen_range(0..=7);
        let p = random::curve(rng, deg);
        let x0 = random::scalar(rng);
        let cs = ConfluentSamples::from_curve(&p, &[(x0.clone(), k + 1)]).map_err(err)?;
        let got = dd_confluent(&cs);
        let want = curve_jet(&p, &x0, k).map_err(err)?.swap_remove(k) / ExactScalar::factorial(k);
        ensure(got == want, || format!("p = {p}, x0 = {x0}, k = {k}: {got} vs {want}"))?;
        let m = rng.gen_range(0..=6);
        let s = random::samples(rng, m);
        let (a, b) = (dd_confluent(&ConfluentSamples::from_samples(&s)), dd_recursive(&s));
        ensure(a == b, || format!("distinct nodes: confluent {a} vs recursive {b}"))
    })
}

/// Each tableau row is `Δ/Δx` of the row above.
pub fn check_tableau_delta(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("tableau-delta", cfg, trials, |rng| {
        let n = rng.gen_range(1..=6);
        let s = random::samples(rng, n);
        let t = tableau(&s);
        for k in 0..n {
            let next = WindowFunction::from_tableau_row(&t, k, "u").delta(s.lattice()).map_err(err)?;
            ensure(next.values() == t.row(k + 1), || format!("row {}", k + 1))?;
        }
        Ok(())
    })
}

fn random_order_windows<R: Rng>(rng: &mut R, nonzero: bool) -> (Lattice, WindowFunction, WindowFunction) {
    let n = rng.gen_range(2..=6);
    let lat = random::lattice(rng, n);
    let order = rng.gen_range(0..n - 1);
    let len = n + 1 - order;
    let u = random::values(rng, len);
    let v = if nonzero { random::nonzero_values(rng, len) } else { random::values(rng, len) };
    (lat, window(order, u, "u"), window(order, v, "v"))
}

pub fn check_product_rule(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("product-rule", cfg, trials, |rng| {
        let (lat, u, v) = random_order_windows(rng, false);
        holds(product_rule_check(&u, &v, &lat), "product rule")
    })
}

pub fn check_quotient_rule(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("quotient-rule", cfg, trials, |rng| {
        let (lat, u, v) = random_order_windows(rng, true);
        holds(quotient_rule_check(&u, &v, &lat), "quotient rule")
    })
}

pub fn check_shift_commute(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("shift-commute", cfg, trials, |rng| {
        let (lat, u, _) = random_order_windows(rng, false);
        holds(commute_shift_check(&u, &lat), "shift commutation")
    })
}

/// Leibniz rule for `n ≤ 4`: order-0 windows on arbitrary lattices and
/// windows of order 1–2 on evenly spaced ones.
pub fn check_leibniz(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("leibniz", cfg, trials, |rng| {
        let n = rng.gen_range(1..=4);
        let uniform = rng.gen_bool(0.5);
        let order = if uniform { rng.gen_range(0..=2) } else { 0 };
        let size = order + n + rng.gen_range(1..=2);
        let lat = if uniform { random::uniform_lattice(rng, size) } else { random::lattice(rng, size) };
        let len = size + 1 - order;
        let u = window(order, random::values(rng, len), "u");
        let v = window(order, random::values(rng, len), "v");
        holds(leibniz_check(&u, &v, &lat, n), &format!("Leibniz n = {n}, order {order}"))
    })
}

pub fn check_delta_linearity(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("delta-linearity", cfg, trials, |rng| {
        let (lat, u, v) = random_order_windows(rng, false);
        let (a, b) = (random::scalar(rng), random::scalar(rng));
        let lhs = u.scale(&a).add(&v.scale(&b)).and_then(|w| w.delta(&lat)).map_err(err)?;
        let (du, dv) = (u.delta(&lat).map_err(err)?, v.delta(&lat).map_err(err)?);
        let rhs = du.scale(&a).add(&dv.scale(&b)).map_err(err)?;
        ensure(lhs.values() == rhs.values(), || format!("a = {a}, b = {b}"))
    })
}

/// On `x_i = x_0 + i·h`, `Δ/Δx = (S − id)/h` at every order.
pub fn check_uniform_prefactor(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("uniform-prefactor", cfg, trials, |rng| {
        let n = rng.gen_range(1..=6);
        let lat = random::uniform_lattice(rng, n);
        let h = lat.uniform_step().expect("uniform");
        let order = rng.gen_range(0..n);
        let w = window(order, random::values(rng, n + 1 - order), "w");
        let d = w.delta(&lat).map_err(err)?;
        let want: Vec<ExactScalar> = w.values().windows(2).map(|p| (&p[1] - &p[0]) / &h).collect();
        ensure(d.values() == want.as_slice(), || format!("order {order}, h = {h}"))
    })
}

// ------------------------------------------------------------------- oracles

/// Scaling `ξ = −x`, `φ = u`: `φ^(k)_[k] = (k+1)·u^(k)_(k)` for `k = 1…5`.
pub fn check_scaling_golden(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("scaling-golden", cfg, trials, |rng| {
        let n = rng.gen_range(5..=6);
        let s = random::samples(rng, n);
        let vf = VectorField::scaling();
        let t = tableau(&s);
        let rec = infinitesimal_recursive(&vf, &s, 5).map_err(err)?;
        for k in 1..=5 {
            let want = ExactScalar::from_int(k as i64 + 1) * t.get(k, 0);
            let direct = infinitesimal_direct(&vf, &s, k).map_err(err)?;
            ensure(direct == want && rec.phibracket[k] == want, || {
                format!("k = {k}: direct {direct}, recursive {}, expected {want}", rec.phibracket[k])
            })?;
        }
        Ok(())
    })
}

pub fn check_direct_recursive(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("direct-recursive", cfg, trials, |rng| {
        let n = rng.gen_range(1..=5);
        let vf = random::vector_field(rng);
        let s = random::samples(rng, n);
        let rec = infinitesimal_recursive(&vf, &s, n).map_err(err)?;
        for k in 0..=n {
            let direct = infinitesimal_direct(&vf, &s, k).map_err(err)?;
            ensure(direct == rec.phibracket[k], || {
                format!("ξ = {}, φ = {}, k = {k}: {direct} vs {}", vf.xi(), vf.phi(), rec.phibracket[k])
            })?;
        }
        Ok(())
    })
}

/// The ε-derivative of the acted-on coordinates equals the direct formula
/// for the action's infinitesimal generator, `k ≤ 4`, for each built-in
/// rational action.
pub fn check_finite_action(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    let actions = [
        ("scaling", OneParamAction::scaling()),
        ("translation", OneParamAction::translation()),
        ("projective", OneParamAction::projective()),
    ];
    run_trials("finite-action", cfg, trials, |rng| {
        let s = random::samples(rng, 4);
        for (name, action) in &actions {
            let vf = check_action_consistency(action).map_err(err)?;
            for k in 0..=4 {
                let fin = finite_action_derivative(action, &s, k).map_err(err)?;
                let direct = infinitesimal_direct(&vf, &s, k).map_err(err)?;
                ensure(fin == direct, || format!("{name}, k = {k}: finite {fin} vs direct {direct}"))?;
            }
        }
        Ok(())
    })
}

pub fn check_jet_forms(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("jet-forms", cfg, trials, |rng| {
        let n = rng.gen_range(1..=4);
        let vf = random::vector_field(rng);
        let a = jet_prolong_recursive(&vf, n).map_err(err)?;
        let b = jet_prolong_expanded(&vf, n).map_err(err)?;
        let c = jet_prolong_characteristic(&vf, n).map_err(err)?;
        ensure(a.equal(&b) && a.equal(&c), || format!("ξ = {}, φ = {}, n = {n}", vf.xi(), vf.phi()))
    })
}

/// Prolongation is linear in the vector field.
pub fn check_jet_linearity(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("jet-linearity", cfg, trials, |rng| {
        let n = rng.gen_range(1..=3);
        let (v, w) = (random::vector_field(rng), random::vector_field(rng));
        let (a, b) = (random::scalar(rng), random::scalar(rng));
        let lhs = jet_prolong_recursive(&v.combine(&a, &w, &b), n).map_err(err)?;
        let pv = jet_prolong_recursive(&v, n).map_err(err)?;
        let pw = jet_prolong_recursive(&w, n).map_err(err)?;
        for k in 0..=n {
            let rhs = Expr::add(
                Expr::mul(Expr::Const(a.clone()), pv.component(k).clone()),
                Expr::mul(Expr::Const(b.clone()), pw.component(k).clone()),
            );
            ensure(lhs.component(k).equal(&rhs), || format!("component {k}"))?;
        }
        Ok(())
    })
}

/// Including the `ℓ = 0` term in the direct sum changes nothing.
pub fn check_sum_from_zero(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("sum-from-zero", cfg, trials, |rng| {
        let n = rng.gen_range(1..=5);
        let vf = random::vector_field(rng);
        let s = random::samples(rng, n);
        for k in 0..=n {
            let a = infinitesimal_direct(&vf, &s, k).map_err(err)?;
            let b = infinitesimal_direct_from_zero(&vf, &s, k).map_err(err)?;
            ensure(a == b, || format!("k = {k}: {a} vs {b}"))?;
        }
        Ok(())
    })
}

pub fn check_base_row(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("base-row", cfg, trials, |rng| {
        let n = rng.gen_range(0..=4);
        let vf = random::vector_field(rng);
        let s = random::samples(rng, n);
        let rec = infinitesimal_recursive(&vf, &s, n).map_err(err)?;
        let (_, phi) = vf.eval(&s.x()[0], &s.u()[0]).map_err(err)?;
        ensure(rec.phibracket[0] == phi, || format!("{} vs φ(x0, u0) = {phi}", rec.phibracket[0]))
    })
}

/// Rotation recursion against the closed forms of orders 1–3, including
/// `1 + (u^(1)_(1))²` at order 1 and the evenly spaced order-3 reduction.
pub fn check_rotation_closed_forms(cfg: &VerifyConfig, trials: usize) -> CheckResult {
    run_trials("rotation-closed-forms", cfg, trials, |rng| {
        let vf = VectorField::rotation();
        let n = rng.gen_range(3..=5);
        let s = random::samples(rng, n);
        let rec = infinitesimal_recursive(&vf, &s, 3).map_err(err)?;
        let t = tableau(&s);
        let squared = ExactScalar::one() + t.get(1, 0) * t.get(1, 0);
        let forms = [
            (1, closed_forms::rotation_order1(&s)),
            (2, closed_forms::rotation_order2(&s)),
            (3, closed_forms::rotation_order3(&s)),
        ];
        ensure(rec.phibracket[1] == squared, || format!("order 1: {} vs 1 + u1^2 = {squared}", rec.phibracket[1]))?;
        for (k, form) in forms {
            let v = closed_forms::total(&form.map_err(err)?);
            ensure(v == rec.phibracket[k], || format!("order {k}: closed form {v} vs {}", rec.phibracket[k]))?;
        }
        let us = random::uniform_samples(rng, n);
        let rec = infinitesimal_recursive(&vf, &us, 3).map_err(err)?;
        let v = closed_forms::total(&closed_forms::rotation_order3_uniform(&us).map_err(err)?);
        ensure(v == rec.phibracket[3], || format!("evenly spaced order 3: {v} vs {}", rec.phibracket[3]))
    })
}

/// Fixed expected printed prolongations for rotation and scaling.
pub fn check_jet_golden(cfg: &VerifyConfig) -> CheckResult {
    let _ = cfg;
    let mut outcomes = Vec::new();
    let rot = jet_prolong_recursive(&VectorField::rotation(), 3).map(|p| p.printed());
    let want = ["x", "1 + u1^2", "3*u1*u2", "3*u2^2 + 4*u1*u3"];
    outcomes.push(match rot {
        Ok(p) => ensure(p == want, || format!("rotation: {p:?}")),
        Err(e) => Err(e.to_string()),
    });
    outcomes.push((|| {
        let p = jet_prolong_recursive(&VectorField::scaling(), 5).map_err(err)?;
        for k in 0..=5 {
            let want = parse(&format!("{}*u{k}", k + 1)).map_err(err)?;
            ensure(p.component(k).equal(&want), || format!("scaling component {k}: {}", p.component(k)))?;
        }
        Ok(())
    })());
    CheckResult::from_outcomes("jet-golden", outcomes)
}

// ------------------------------------------------------------------ coalesce

fn report_outcome(r: Result<CoalescenceReport, impl fmt::Display>) -> Outcome {
    match r {
        Ok(r) if r.pass => Ok(()),
        Ok(r) => Err(format!(
            "{} k = {}: limit {} vs {}, error {:.3e} > {:.3e} or order {:?} < {}; second sweep error {:.3e}",
            r.quantity, r.k, r.limit_decimal, r.oracle, r.abs_error, r.tolerance, r.order, r.order_gate,
            r.second_sweep_error
        )),
        Err(e) => Err(e.to_string()),
    }
}

fn x5() -> Expr {
    parse("x^5").expect("literal")
}

/// `u^(k)_(k) → u^(k)(1)` for `u = x⁵`, `k = 1…4`.
pub fn check_coordinate_limits(cfg: &VerifyConfig) -> CheckResult {
    let opts = cfg.coalesce_options();
    let outcomes = (1..=4)
        .map(|k| report_outcome(verify_coord_limit(&x5(), k, &CoalescenceSchedule::default_for(ExactScalar::one(), k), &opts)))
        .collect();
    CheckResult::from_outcomes("coordinate-limits", outcomes)
}

/// `φ^(k)_[k] → φ_[k]` for rotation on `u = x⁵` at `x = 1`, `k = 1…3`.
pub fn check_rotation_limits(cfg: &VerifyConfig) -> CheckResult {
    let opts = cfg.coalesce_options();
    let outcomes = (1..=3)
        .map(|k| {
            report_outcome(verify_infinitesimal_limit(
                &VectorField::rotation(),
                &x5(),
                k,
                &CoalescenceSchedule::default_for(ExactScalar::one(), k),
                &opts,
            ))
        })
        .collect();
    CheckResult::from_outcomes("rotation-limits", outcomes).with_note(
        "single first-order Richardson sweep; second_sweep_error in the coalesce report is diagnostic only",
    )
}

/// Scaling on a polynomial of degree `k`: every lattice value already equals
/// the limit.
pub fn check_scaling_exact_limits(cfg: &VerifyConfig) -> CheckResult {
    let opts = cfg.coalesce_options();
    let outcomes = (1..=4)
        .map(|k| {
            let curve = random::curve(&mut trial_rng(cfg.seed, "scaling-exact-limits", k), k as u32);
            let r = verify_infinitesimal_limit(
                &VectorField::scaling(),
                &curve,
                k,
                &CoalescenceSchedule::default_for(ExactScalar::new(1, 2), k),
                &opts,
            );
            match r {
                Ok(r) if !r.exact => Err(format!("curve {curve}, k = {k}: values not constant")),
                Ok(r) if r.residuals.iter().any(|&x| x != 0.0) => Err(format!("curve {curve}: nonzero residual")),
                other => report_outcome(other),
            }
        })
        .collect();
    CheckResult::from_outcomes("scaling-exact-limits", outcomes)
}

/// Offsets `0, 1, …, k` and `0, 1, 3, …` give the same limit within the
/// sum of both tolerances.
pub fn check_offset_independence(cfg: &VerifyConfig) -> CheckResult {
    let opts = cfg.coalesce_options();
    let one = ExactScalar::one();
    let outcomes = (1..=3)
        .map(|k| {
            let a = CoalescenceSchedule::default_for(one.clone(), k);
            let offsets = (0..=k as i64).map(|i| ExactScalar::from_int(if i == 0 { 0 } else { 2 * i - 1 })).collect();
            let b = CoalescenceSchedule::new(one.clone(), offsets, a.h0.clone(), a.steps).map_err(err)?;
            let ra = verify_coord_limit(&x5(), k, &a, &opts).map_err(err)?;
            let rb = verify_coord_limit(&x5(), k, &b, &opts).map_err(err)?;
            let gap = (ra.limit - rb.limit).abs();
            ensure(gap <= ra.tolerance + rb.tolerance, || {
                format!("k = {k}: limits {} and {} differ by {gap:.3e}", ra.limit_decimal, rb.limit_decimal)
            })
        })
        .collect();
    CheckResult::from_outcomes("offset-independence", outcomes)
}

/// `u = 1/(1+x)` at `x = 0`, `k = 1`: limit `−1`.
pub fn check_rational_curve_limit(cfg: &VerifyConfig) -> CheckResult {
    let curve = parse("1/(1 + x)").expect("literal");
    let r = verify_coord_limit(&curve, 1, &CoalescenceSchedule::default_for(ExactScalar::zero(), 1), &cfg.coalesce_options());
    CheckResult::from_outcomes("rational-curve-limit", vec![report_outcome(r)])
}

// -------------------------------------------------------------------- suites

pub fn identities(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let t = cfg.trials;
    vec![
        check_vandermonde_product(cfg, t),
        check_determinant_identity(cfg, t),
        check_divided_differences(cfg, t),
        check_coefficient_extraction(cfg, t),
        check_interpolation(cfg, t),
        check_permutation_symmetry(cfg, t),
        check_polynomial_exactness(cfg, t),
        check_confluent(cfg, t),
        check_tableau_delta(cfg, t),
        check_product_rule(cfg, t),
        check_quotient_rule(cfg, t),
        check_shift_commute(cfg, t),
        check_leibniz(cfg, t),
        check_delta_linearity(cfg, t),
        check_uniform_prefactor(cfg, t),
    ]
}

pub fn oracles(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let t = cfg.trials;
    vec![
        check_scaling_golden(cfg, t.div_ceil(2)),
        check_direct_recursive(cfg, 2 * t),
        check_finite_action(cfg, t),
        check_jet_forms(cfg, t),
        check_jet_linearity(cfg, t),
        check_sum_from_zero(cfg, t),
        check_base_row(cfg, t),
        check_rotation_closed_forms(cfg, t),
        check_jet_golden(cfg),
    ]
}

pub fn coalesce(cfg: &VerifyConfig) -> Vec<CheckResult> {
    vec![
        check_coordinate_limits(cfg),
        check_rotation_limits(cfg),
        check_scaling_exact_limits(cfg),
        check_offset_independence(cfg),
        check_rational_curve_limit(cfg),
    ]
}

pub fn run(suite: Suite, cfg: &VerifyConfig) -> VerifyReport {
    let checks = match suite {
        Suite::Identities => identities(cfg),
        Suite::Oracles => oracles(cfg),
        Suite::Coalesce => coalesce(cfg),
        Suite::All => {
            let mut all = identities(cfg);
            all.extend(oracles(cfg));
            all.extend(coalesce(cfg));
            all
        }
    };
    let pass = checks.iter().all(|c| c.pass);
    VerifyReport { suite, seed: cfg.seed, trials: cfg.trials, checks, pass }
}
