//! Seeded generators for randomized trials.
//!
//! Each trial draws from its own ChaCha stream derived from
//! `(seed, stream, trial)`, so a trial's inputs do not depend on which
//! other trials ran or in what order.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::Expr;
use crate::jetoracle::VectorField;
use crate::lattice::{Lattice, PointedCurveSamples};
use crate::scalar::ExactScalar;

pub const DEFAULT_SEED: u64 = 20_240_917;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for one trial of one named stream.
pub fn trial_rng(seed: u64, stream: &str, trial: usize) -> ChaCha8Rng {
    let tag = stream
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3));
    let s = splitmix(splitmix(seed ^ tag) ^ trial as u64);
    ChaCha8Rng::seed_from_u64(s)
}

/// `p/q` with `p ∈ [−12, 12]`, `q ∈ [1, 6]`.
pub fn scalar<R: Rng>(rng: &mut R) -> ExactScalar {
    ExactScalar::new(rng.gen_range(-12..=12), rng.gen_range(1..=6))
}

pub fn nonzero_scalar<R: Rng>(rng: &mut R) -> ExactScalar {
    loop {
        let v = scalar(rng);
        if !v.is_zero() {
            return v;
        }
    }
}

/// `n+1` distinct random points in random order.
pub fn lattice<R: Rng>(rng: &mut R, n: usize) -> Lattice {
    let mut pts: Vec<ExactScalar> = Vec::with_capacity(n + 1);
    while pts.len() < n + 1 {
        let v = scalar(rng);
        if !pts.contains(&v) {
            pts.push(v);
        }
    }
    pts.shuffle(rng);
    Lattice::new(pts).expect("distinct")
}

/// `x_i = x_0 + i·h` with random `x_0` and `h ≠ 0`.
pub fn uniform_lattice<R: Rng>(rng: &mut R, n: usize) -> Lattice {
    let x0 = scalar(rng);
    let h = nonzero_scalar(rng);
    Lattice::new((0..=n).map(|i| &x0 + &h * ExactScalar::from_int(i as i64)).collect()).expect("distinct")
}

pub fn values<R: Rng>(rng: &mut R, n: usize) -> Vec<ExactScalar> {
    (0..n).map(|_| scalar(rng)).collect()
}

pub fn nonzero_values<R: Rng>(rng: &mut R, n: usize) -> Vec<ExactScalar> {
    (0..n).map(|_| nonzero_scalar(rng)).collect()
}

pub fn samples<R: Rng>(rng: &mut R, n: usize) -> PointedCurveSamples {
    let lat = lattice(rng, n);
    let u = values(rng, n + 1);
    PointedCurveSamples::new(lat, u).expect("matching lengths")
}

pub fn uniform_samples<R: Rng>(rng: &mut R, n: usize) -> PointedCurveSamples {
    let lat = uniform_lattice(rng, n);
    let u = values(rng, n + 1);
    PointedCurveSamples::new(lat, u).expect("matching lengths")
}

/// Random polynomial in `vars` of total degree at most `degree`, each
/// monomial present with probability 1/2.
pub fn polynomial<R: Rng>(rng: &mut R, vars: &[&str], degree: u32) -> Expr {
    fn exponents(nvars: usize, degree: u32) -> Vec<Vec<u32>> {
        if nvars == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for e in 0..=degree {
            for mut rest in exponents(nvars - 1, degree - e) {
                rest.insert(0, e);
                out.push(rest);
            }
        }
        out
    }
    let terms = exponents(vars.len(), degree).into_iter().filter_map(|exps| {
        if !rng.gen_bool(0.5) {
            return None;
        }
        let c = Expr::Const(scalar(rng));
        let mono = vars
            .iter()
            .zip(exps)
            .fold(Expr::one(), |acc, (v, e)| Expr::mul(acc, Expr::pow(Expr::var(v), e)));
        Some(Expr::mul(c, mono))
    });
    Expr::sum(terms.collect::<Vec<_>>())
}

/// Vector field with polynomial components of degree at most 2 in `(x, u)`.
pub fn vector_field<R: Rng>(rng: &mut R) -> VectorField {
    let xi = polynomial(rng, &["x", "u"], 2);
    let phi = polynomial(rng, &["x", "u"], 2);
    VectorField::new(xi, phi).expect("x, u only")
}

/// Polynomial curve in `x` of exact degree `degree`.
pub fn curve<R: Rng>(rng: &mut R, degree: u32) -> Expr {
    let lower = polynomial(rng, &["x"], degree.saturating_sub(1));
    let top = Expr::mul(Expr::Const(nonzero_scalar(rng)), Expr::pow(Expr::var("x"), degree));
    Expr::add(lower, top)
}
