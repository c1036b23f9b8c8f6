//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). The exit status is 0 even when
//! a criterion fails so that the report is always produced in a full test
//! run; set `ACCEPTANCE_STRICT=1` to exit 1 on any failure.

use std::time::Instant;

use multispace::closed_forms::{self, Term};
use multispace::coalesce::{verify_coord_limit, verify_infinitesimal_limit, CoalescenceReport};
use multispace::jetoracle::VectorField;
use multispace::lattice::tableau;
use multispace::multiprolong::infinitesimal_recursive;
use multispace::random::{self, trial_rng};
use multispace::verify::{self, CheckResult, VerifyConfig};
use multispace::{parse, CoalescenceSchedule, ExactScalar, PointedCurveSamples};

struct Criterion {
    id: usize,
    title: &'static str,
    checks: Vec<CheckResult>,
    details: Vec<String>,
}

impl Criterion {
    fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// The order-3 evenly spaced expansion with `2·S[u2]·u2` in place of
/// `S[u2]·u2 + S[u2]·S[u2]` and a plus sign on the `S[u2]·(S − id)/h[…]`
/// term, the form that is commonly quoted.
fn quoted_order3_variant(s: &PointedCurveSamples) -> ExactScalar {
    let t = tableau(s);
    let h = s.lattice().uniform_step().expect("uniform");
    let u = s.u();
    let slope = |r: usize, m: usize| (-&u[r + m] + &u[r]) / (ExactScalar::from_int(m as i64) * &h);
    let (b0, b1) = (slope(0, 2), slope(1, 2));
    let (u1, u2, u3, su1, su2) = (t.get(1, 0), t.get(2, 0), t.get(3, 0), t.get(1, 1), t.get(2, 1));
    u3 * u1 + ExactScalar::from_int(2) * su2 * u2 + su1 * u3 - u3 * &b0 + su2 * (&b1 - &b0) / &h - u3 * slope(0, 3)
}

fn rotation_golden(cfg: &VerifyConfig, trials: usize) -> (Vec<CheckResult>, Vec<String>) {
    let vf = VectorField::rotation();
    let low = cfg.execution.map_range(trials, |t| {
        let mut rng = trial_rng(cfg.seed, "acceptance-rotation-low", t);
        let n = 2 + t % 3;
        let s = random::samples(&mut rng, n);
        let rec = infinitesimal_recursive(&vf, &s, 2).map_err(|e| e.to_string())?;
        let u1 = tableau(&s).get(1, 0).clone();
        let one = closed_forms::total(&closed_forms::rotation_order1(&s).map_err(|e| e.to_string())?);
        let two = closed_forms::total(&closed_forms::rotation_order2(&s).map_err(|e| e.to_string())?);
        if rec.phibracket[1] != ExactScalar::one() + &u1 * &u1 || rec.phibracket[1] != one {
            return Err(format!("order 1: {} vs 1 + u1^2 = {}", rec.phibracket[1], ExactScalar::one() + &u1 * &u1));
        }
        if rec.phibracket[2] != two {
            return Err(format!("order 2: {} vs {two}", rec.phibracket[2]));
        }
        Ok(())
    });
    let uniform = cfg.execution.map_range(trials, |t| {
        let mut rng = trial_rng(cfg.seed, "acceptance-rotation-uniform", t);
        let s = random::uniform_samples(&mut rng, 3 + t % 3);
        let rec = infinitesimal_recursive(&vf, &s, 3).map_err(|e| e.to_string())?;
        let terms: Vec<Term> = closed_forms::rotation_order3_uniform(&s).map_err(|e| e.to_string())?;
        let general = closed_forms::rotation_order3(&s).map_err(|e| e.to_string())?;
        for (a, b) in terms.iter().zip(&general) {
            if a.value != b.value {
                return Err(format!("term {} = {} but general-lattice term {} = {}", a.label, a.value, b.label, b.value));
            }
        }
        let sum = closed_forms::total(&terms);
        if sum != rec.phibracket[3] {
            return Err(format!("order 3: {sum} vs {}", rec.phibracket[3]));
        }
        Ok(quoted_order3_variant(&s) == rec.phibracket[3])
    });
    let quoted_matches = uniform.iter().filter(|r| matches!(r, Ok(true))).count();
    let checks = vec![
        outcome_check("rotation-orders-1-2", low),
        outcome_check("rotation-order-3-evenly-spaced", uniform.into_iter().map(|r| r.map(|_| ())).collect()),
    ];
    let details = vec![format!(
        "diagnostic: quoted order-3 variant (2*S[u2]*u2, +S[u2]*(S-id)/h[...]) equals the recursion in {quoted_matches}/{trials} evenly spaced trials"
    )];
    (checks, details)
}

fn outcome_check(name: &str, outcomes: Vec<Result<(), String>>) -> CheckResult {
    let trials = outcomes.len();
    let failures: Vec<String> = outcomes
        .into_iter()
        .enumerate()
        .filter_map(|(t, r)| r.err().map(|e| format!("trial {t}: {e}")))
        .collect();
    CheckResult {
        name: name.to_string(),
        trials,
        passed: trials - failures.len(),
        pass: failures.is_empty(),
        failures: failures.into_iter().take(5).collect(),
        note: None,
    }
}

fn limit_line(r: &CoalescenceReport) -> String {
    format!(
        "{} k={}: limit {:.12} oracle {} rel.err {:.2e} (tol {:.1e}) order {:.4} {}; second sweep rel.err {:.2e}",
        r.quantity,
        r.k,
        r.limit,
        r.oracle,
        r.abs_error / r.oracle.to_f64().abs().max(1.0),
        r.tolerance / r.oracle.to_f64().abs().max(1.0),
        r.order.unwrap_or(f64::NAN),
        if r.pass { "pass" } else { "FAIL" },
        r.second_sweep_error / r.oracle.to_f64().abs().max(1.0),
    )
}

fn coalescent_limits(cfg: &VerifyConfig) -> (Vec<CheckResult>, Vec<String>) {
    let opts = multispace::coalesce::CoalesceOptions { precision_bits: cfg.precision_bits, execution: cfg.execution };
    let x5 = parse("x^5").expect("literal");
    let one = ExactScalar::one();
    let mut details = Vec::new();
    let mut coord = Vec::new();
    for k in 1..=4 {
        let r = verify_coord_limit(&x5, k, &CoalescenceSchedule::default_for(one.clone(), k), &opts);
        coord.push(match r {
            Ok(r) => {
                details.push(limit_line(&r));
                if r.pass { Ok(()) } else { Err(format!("coordinate k={k} outside gate")) }
            }
            Err(e) => Err(e.to_string()),
        });
    }
    let mut rot = Vec::new();
    for k in 1..=3 {
        let r = verify_infinitesimal_limit(
            &VectorField::rotation(),
            &x5,
            k,
            &CoalescenceSchedule::default_for(one.clone(), k),
            &opts,
        );
        rot.push(match r {
            Ok(r) => {
                details.push(limit_line(&r));
                if r.pass { Ok(()) } else { Err(format!("rotation k={k} outside gate")) }
            }
            Err(e) => Err(e.to_string()),
        });
    }
    (vec![outcome_check("coordinate-limits-x5", coord), outcome_check("rotation-limits-x5", rot)], details)
}

fn main() {
    let cfg = VerifyConfig::default();
    let start = Instant::now();
    let (rot_checks, rot_details) = rotation_golden(&cfg, 100);
    let (lim_checks, lim_details) = coalescent_limits(&cfg);
    let criteria = vec![
        Criterion {
            id: 1,
            title: "scaling golden case, 50 lattices, k = 1..5, exact",
            checks: vec![verify::check_scaling_golden(&cfg, 50)],
            details: vec![],
        },
        Criterion {
            id: 2,
            title: "rotation closed forms: orders 1-2 on random inputs, order 3 term by term on evenly spaced lattices",
            checks: rot_checks,
            details: rot_details,
        },
        Criterion {
            id: 3,
            title: "direct = recursive, 200 trials, n <= 5, field degree <= 2",
            checks: vec![verify::check_direct_recursive(&cfg, 200)],
            details: vec![],
        },
        Criterion {
            id: 4,
            title: "finite-action derivative = direct formula, scaling/translation/projective, k <= 4, 100 trials",
            checks: vec![verify::check_finite_action(&cfg, 100)],
            details: vec![],
        },
        Criterion {
            id: 5,
            title: "determinant identity, all column pairs, k <= 5, 100 trials",
            checks: vec![verify::check_determinant_identity(&cfg, 100)],
            details: vec![],
        },
        Criterion {
            id: 6,
            title: "product, quotient, shift-commutation and Leibniz (n <= 4) rules, 100 trials each",
            checks: vec![
                verify::check_product_rule(&cfg, 100),
                verify::check_quotient_rule(&cfg, 100),
                verify::check_shift_commute(&cfg, 100),
                verify::check_leibniz(&cfg, 100),
            ],
            details: vec![],
        },
        Criterion {
            id: 7,
            title: "three jet prolongation forms agree, n <= 4; rotation orders 2 and 3",
            checks: vec![verify::check_jet_forms(&cfg, 100), verify::check_jet_golden(&cfg)],
            details: vec![],
        },
        Criterion {
            id: 8,
            title: "interpolation, determinant vs recursive divided differences, polynomial exactness, 100 trials",
            checks: vec![
                verify::check_interpolation(&cfg, 100),
                verify::check_divided_differences(&cfg, 100),
                verify::check_polynomial_exactness(&cfg, 100),
            ],
            details: vec![],
        },
        Criterion {
            id: 9,
            title: "coalescent limits: x^5 coordinates k <= 4, rotation k <= 3, order >= 0.9, 1e-8 relative",
            checks: lim_checks,
            details: lim_details,
        },
        Criterion {
            id: 10,
            title: "confluent divided differences, k <= 5, 100 trials",
            checks: vec![verify::check_confluent(&cfg, 100)],
            details: vec![],
        },
    ];

    println!("acceptance (seed {}, {} bits)", cfg.seed, cfg.precision_bits);
    for c in &criteria {
        println!("criterion {:>2}: {}  {}", c.id, if c.pass() { "PASS" } else { "FAIL" }, c.title);
        for check in &c.checks {
            println!("    {} {}/{}", check.name, check.passed, check.trials);
            for f in &check.failures {
                println!("      {f}");
            }
        }
        for d in &c.details {
            println!("    {d}");
        }
    }
    let failed: Vec<usize> = criteria.iter().filter(|c| !c.pass()).map(|c| c.id).collect();
    println!(
        "summary: {}/{} criteria pass{} ({:.1?})",
        criteria.len() - failed.len(),
        criteria.len(),
        if failed.is_empty() { String::new() } else { format!("; failing: {failed:?}") },
        start.elapsed()
    );
    if !failed.is_empty() && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
