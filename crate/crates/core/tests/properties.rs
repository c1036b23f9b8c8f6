use multispace::deltaop::{leibniz_expand, IdentityCheck};
use multispace::expr::{binding, parse, Expr};
use multispace::jetoracle::{
    curve_jet, jet_prolong_characteristic, jet_prolong_expanded, jet_prolong_recursive, VectorField,
};
use multispace::lattice::{
    dd_confluent, dd_recursive, mu, multispace_coord, newton_interpolant, tableau, vdet,
    vdet_replace, vdet_replace2, ConfluentSamples, Lattice, PointedCurveSamples,
};
use multispace::multiprolong::{
    check_action_consistency, finite_action_derivative, infinitesimal_direct, infinitesimal_direct_from_zero,
    infinitesimal_recursive, OneParamAction,
};
use multispace::{ExactScalar, JetVariableFamily, WindowFunction};
use proptest::prelude::*;
use proptest::sample::select;

fn rational() -> impl Strategy<Value = ExactScalar> {
    (-12i64..=12, 1i64..=6).prop_map(|(p, q)| ExactScalar::new(p, q))
}

fn nonzero_rational() -> impl Strategy<Value = ExactScalar> {
    rational().prop_filter("nonzero", |v| !v.is_zero())
}

fn lattice(min: usize, max: usize) -> impl Strategy<Value = Lattice> {
    prop::collection::vec(rational(), min + 1..=max + 1).prop_filter_map("distinct points", |v| Lattice::new(v).ok())
}

fn uniform_lattice(min: usize, max: usize) -> impl Strategy<Value = Lattice> {
    (rational(), nonzero_rational(), min..=max).prop_map(|(x0, h, n)| {
        Lattice::new((0..=n as i64).map(|i| &x0 + &h * ExactScalar::from_int(i)).collect()).unwrap()
    })
}

fn samples(min: usize, max: usize) -> impl Strategy<Value = PointedCurveSamples> {
    lattice(min, max).prop_flat_map(|lat| {
        let n = lat.len();
        (Just(lat), prop::collection::vec(rational(), n))
    })
    .prop_map(|(lat, u)| PointedCurveSamples::new(lat, u).unwrap())
}

/// Polynomial in `vars` of total degree ≤ `degree` with coefficients that
/// are zero about a third of the time.
fn polynomial(vars: &'static [&'static str], degree: u32) -> impl Strategy<Value = Expr> {
    let mut monos: Vec<Vec<u32>> = vec![vec![]];
    for _ in vars {
        monos = monos
            .into_iter()
            .flat_map(|m| {
                let used: u32 = m.iter().sum();
                (0..=degree - used).map(move |e| {
                    let mut m = m.clone();
                    m.push(e);
                    m
                })
            })
            .collect();
    }
    let n = monos.len();
    prop::collection::vec(prop_oneof![1 => Just(ExactScalar::zero()), 2 => rational()], n).prop_map(move |cs| {
        Expr::sum(monos.iter().zip(cs).filter(|(_, c)| !c.is_zero()).map(|(m, c)| {
            vars.iter()
                .zip(m)
                .fold(Expr::Const(c), |acc, (v, &e)| Expr::mul(acc, Expr::pow(Expr::var(v), e)))
        }))
    })
}

fn vector_field() -> impl Strategy<Value = VectorField> {
    (polynomial(&["x", "u"], 2), polynomial(&["x", "u"], 2)).prop_map(|(a, b)| VectorField::new(a, b).unwrap())
}

/// Raw expression trees, built without the folding constructors.
fn raw_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        rational().prop_map(Expr::Const),
        select(vec!["x", "u0", "u1", "u2"]).prop_map(Expr::var),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(Box::new(a), Box::new(b))),
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (inner, 0u32..=3).prop_map(|(a, n)| Expr::Pow(Box::new(a), n)),
        ]
    })
}

fn holds(c: IdentityCheck) -> bool {
    c.holds()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, ..ProptestConfig::default() })]

    #[test]
    fn printed_canonical_forms_reparse_to_themselves(e in raw_expr()) {
        let canon = e.simplify();
        let printed = canon.to_string();
        let back = parse(&printed).unwrap();
        prop_assert_eq!(back.to_string(), printed);
    }

    #[test]
    fn raw_trees_survive_print_and_parse(e in raw_expr()) {
        prop_assume!(e.to_ratfunc().is_some());
        let back = parse(&e.to_string()).unwrap();
        prop_assert!(back.equal(&e), "{} reparsed as {}", e, back);
    }

    #[test]
    fn partial_derivative_is_linear(
        e1 in raw_expr(), e2 in raw_expr(), a in rational(), b in rational(),
        v in select(vec!["x", "u0", "u1"]),
    ) {
        prop_assume!(e1.to_ratfunc().is_some() && e2.to_ratfunc().is_some());
        let combo = Expr::add(Expr::mul(Expr::Const(a.clone()), e1.clone()), Expr::mul(Expr::Const(b.clone()), e2.clone()));
        let lhs = combo.partial(v);
        let rhs = Expr::add(Expr::mul(Expr::Const(a), e1.partial(v)), Expr::mul(Expr::Const(b), e2.partial(v)));
        prop_assert!(lhs.equal(&rhs));
    }

    #[test]
    fn total_derivative_is_linear(e1 in raw_expr(), e2 in raw_expr(), a in rational(), b in rational()) {
        prop_assume!(e1.to_ratfunc().is_some() && e2.to_ratfunc().is_some());
        let combo = Expr::add(Expr::mul(Expr::Const(a.clone()), e1.clone()), Expr::mul(Expr::Const(b.clone()), e2.clone()));
        let lhs = combo.total_derivative(3).unwrap();
        let rhs = Expr::add(
            Expr::mul(Expr::Const(a), e1.total_derivative(3).unwrap()),
            Expr::mul(Expr::Const(b), e2.total_derivative(3).unwrap()),
        );
        prop_assert!(lhs.equal(&rhs));
    }

    /// Along a polynomial curve, the forward quotient of `e` converges to the
    /// symbolic total derivative at first order (or better).
    #[test]
    fn total_derivative_matches_forward_differences(
        e in polynomial(&["x", "u0", "u1", "u2"], 3),
        curve in polynomial(&["x"], 4),
        x in rational(),
    ) {
        let family = JetVariableFamily::new(3);
        let along = |t: &ExactScalar| -> ExactScalar {
            let jet = curve_jet(&curve, t, 3).unwrap();
            e.eval(&family.bind(t, &jet)).unwrap()
        };
        let exact = e.total_derivative(3).unwrap().eval(&family.bind(&x, &curve_jet(&curve, &x, 4).unwrap())).unwrap();
        let f0 = along(&x);
        let errors: Vec<ExactScalar> = (3..=10u32)
            .map(|m| {
                let h = ExactScalar::new(1, 1 << m);
                ((along(&(&x + &h)) - &f0) / &h - &exact).abs()
            })
            .collect();
        let (a, b) = (&errors[errors.len() - 2], &errors[errors.len() - 1]);
        if !a.is_zero() {
            let order = (a.to_f64() / b.to_f64()).log2();
            prop_assert!(order > 0.9, "order {order}, errors {errors:?}");
        } else {
            prop_assert!(b.is_zero());
        }
    }

    #[test]
    fn determinant_and_recursive_divided_differences_agree(s in samples(0, 6)) {
        let n = s.order();
        prop_assert_eq!(
            multispace_coord(&s, n).unwrap(),
            ExactScalar::factorial(n) * dd_recursive(&s)
        );
    }

    #[test]
    fn mu_extracts_interpolant_coefficients(s in samples(0, 5)) {
        let k = s.order();
        let taylor = curve_jet(&newton_interpolant(&s), &ExactScalar::zero(), k).unwrap();
        let d = vdet(s.lattice());
        for l in 0..=k {
            let a_l = &taylor[l] / ExactScalar::factorial(l);
            prop_assert_eq!(vdet_replace(s.lattice(), s.u(), l).unwrap(), &d * &a_l);
            prop_assert_eq!(mu(&s, k, l).unwrap(), ExactScalar::factorial(k) * a_l);
        }
    }

    #[test]
    fn newton_interpolant_reproduces_samples(s in samples(0, 6)) {
        let p = newton_interpolant(&s);
        for (x, u) in s.x().iter().zip(s.u()) {
            prop_assert_eq!(&p.eval(&binding([("x", x.clone())])).unwrap(), u);
        }
    }

    #[test]
    fn divided_differences_are_symmetric(s in samples(1, 6), seed in any::<u64>()) {
        let n = s.x().len();
        let mut perm: Vec<usize> = (0..n).collect();
        // deterministic Fisher-Yates from the drawn seed
        let mut state = seed;
        for i in (1..n).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (state >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(dd_recursive(&s), dd_recursive(&s.permuted(&perm).unwrap()));
    }

    #[test]
    fn low_degree_polynomials_are_exact(lat in lattice(0, 6), p in polynomial(&["x"], 6), at in rational()) {
        let k = lat.order();
        let deg = p.to_poly().unwrap().degree().unwrap_or(0) as usize;
        prop_assume!(deg <= k);
        let s = PointedCurveSamples::from_curve(&p, lat).unwrap();
        prop_assert_eq!(multispace_coord(&s, k).unwrap(), curve_jet(&p, &at, k).unwrap().swap_remove(k));
    }

    #[test]
    fn confluent_nodes(p in polynomial(&["x"], 7), x0 in rational(), k in 0usize..=5, s in samples(0, 6)) {
        let cs = ConfluentSamples::from_curve(&p, &[(x0.clone(), k + 1)]).unwrap();
        let want = curve_jet(&p, &x0, k).unwrap().swap_remove(k) / ExactScalar::factorial(k);
        prop_assert_eq!(dd_confluent(&cs), want);
        prop_assert_eq!(dd_confluent(&ConfluentSamples::from_samples(&s)), dd_recursive(&s));
    }

    #[test]
    fn tableau_rows_are_deltas(s in samples(1, 8)) {
        let t = tableau(&s);
        for k in 0..s.order() {
            let d = WindowFunction::from_tableau_row(&t, k, "u").delta(s.lattice()).unwrap();
            prop_assert_eq!(d.values(), t.row(k + 1));
        }
    }

    #[test]
    fn leibniz_on_any_lattice_at_order_zero(
        lat in lattice(5, 7),
        n in 1usize..=4,
        seed_u in prop::collection::vec(rational(), 8),
        seed_v in prop::collection::vec(rational(), 8),
    ) {
        let len = lat.len();
        let u = WindowFunction::from_points(seed_u[..len].to_vec(), "u");
        let v = WindowFunction::from_points(seed_v[..len].to_vec(), "v");
        let expanded = leibniz_expand(&u, &v, &lat, n).unwrap();
        let direct = u.mul(&v).unwrap().delta_n(&lat, n).unwrap();
        prop_assert_eq!(expanded.values(), direct.values());
    }

    #[test]
    fn leibniz_on_uniform_lattices_at_any_order(
        lat in uniform_lattice(7, 8),
        order in 0usize..=2,
        n in 1usize..=4,
        seed_u in prop::collection::vec(rational(), 9),
        seed_v in prop::collection::vec(rational(), 9),
    ) {
        let len = lat.len() - order;
        let u = WindowFunction::new(order, 0, seed_u[..len].to_vec(), "u");
        let v = WindowFunction::new(order, 0, seed_v[..len].to_vec(), "v");
        prop_assert!(holds(multispace::deltaop::leibniz_check(&u, &v, &lat, n).unwrap()));
    }

    #[test]
    fn uniform_prefactor_is_one_over_h(lat in uniform_lattice(1, 6)) {
        let h = lat.uniform_step().unwrap();
        let x = lat.points();
        for k in 0..lat.order() {
            for r in 0..lat.order() - k {
                let pre = ExactScalar::from_int(k as i64 + 1) / (&x[k + r + 1] - &x[r]);
                prop_assert_eq!(pre, h.checked_recip().unwrap());
            }
        }
    }

    #[test]
    fn delta_is_linear(s in samples(1, 6), v in prop::collection::vec(rational(), 7), a in rational(), b in rational()) {
        let n = s.x().len();
        let u = WindowFunction::from_points(s.u().to_vec(), "u");
        let w = WindowFunction::from_points(v[..n].to_vec(), "v");
        let lat = s.lattice();
        let lhs = u.scale(&a).add(&w.scale(&b)).unwrap().delta(lat).unwrap();
        let rhs = u.delta(lat).unwrap().scale(&a).add(&w.delta(lat).unwrap().scale(&b)).unwrap();
        prop_assert_eq!(lhs.values(), rhs.values());
    }

    #[test]
    fn direct_equals_recursive(vf in vector_field(), s in samples(1, 5)) {
        let n = s.order();
        let rec = infinitesimal_recursive(&vf, &s, n).unwrap();
        for k in 0..=n {
            prop_assert_eq!(&infinitesimal_direct(&vf, &s, k).unwrap(), &rec.phibracket[k]);
            prop_assert_eq!(&infinitesimal_direct_from_zero(&vf, &s, k).unwrap(), &rec.phibracket[k]);
        }
        let (_, phi0) = vf.eval(&s.x()[0], &s.u()[0]).unwrap();
        prop_assert_eq!(&rec.phibracket[0], &phi0);
    }

    #[test]
    fn finite_actions_match_their_generators(s in samples(4, 4), which in 0usize..3) {
        let action = [OneParamAction::scaling(), OneParamAction::translation(), OneParamAction::projective()][which].clone();
        let vf = check_action_consistency(&action).unwrap();
        for k in 0..=4 {
            prop_assert_eq!(finite_action_derivative(&action, &s, k).unwrap(), infinitesimal_direct(&vf, &s, k).unwrap());
        }
    }

    #[test]
    fn determinant_identity(lat in lattice(1, 5), seed in prop::collection::vec((rational(), rational()), 6)) {
        let k = lat.order();
        let u: Vec<ExactScalar> = seed[..=k].iter().map(|p| p.0.clone()).collect();
        let v: Vec<ExactScalar> = seed[..=k].iter().map(|p| p.1.clone()).collect();
        let d = vdet(&lat);
        for i in 0..=k {
            for j in (0..=k).filter(|&j| j != i) {
                let lhs = &d * vdet_replace2(&lat, (&u, i), (&v, j)).unwrap();
                let rhs = vdet_replace(&lat, &u, i).unwrap() * vdet_replace(&lat, &v, j).unwrap()
                    - vdet_replace(&lat, &v, i).unwrap() * vdet_replace(&lat, &u, j).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn three_jet_forms_agree(vf in vector_field(), n in 1usize..=4) {
        let a = jet_prolong_recursive(&vf, n).unwrap();
        prop_assert!(a.equal(&jet_prolong_expanded(&vf, n).unwrap()));
        prop_assert!(a.equal(&jet_prolong_characteristic(&vf, n).unwrap()));
    }

    #[test]
    fn components_stop_at_their_own_order(vf in vector_field(), n in 1usize..=4) {
        let p = jet_prolong_characteristic(&vf, n).unwrap();
        for (k, c) in p.components().iter().enumerate() {
            let top = c.simplify().variables().iter().filter_map(|v| v.jet_index()).max().unwrap_or(0);
            prop_assert!(top <= k, "component {k} mentions u{top}");
        }
    }

    #[test]
    fn prolongation_is_linear_in_the_field(v in vector_field(), w in vector_field(), a in rational(), b in rational()) {
        let n = 3;
        let lhs = jet_prolong_recursive(&v.combine(&a, &w, &b), n).unwrap();
        let (pv, pw) = (jet_prolong_recursive(&v, n).unwrap(), jet_prolong_recursive(&w, n).unwrap());
        for k in 0..=n {
            let rhs = Expr::add(
                Expr::mul(Expr::Const(a.clone()), pv.component(k).clone()),
                Expr::mul(Expr::Const(b.clone()), pw.component(k).clone()),
            );
            prop_assert!(lhs.component(k).equal(&rhs));
        }
    }
}
