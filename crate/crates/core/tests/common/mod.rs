//! Family generators shared by the integration tests.
//!
//! Every planted family is built backwards from a chosen `(a_1, a_2)` using
//! the oracle route only (`forced_head` plus `exact_recurrence_oracle`), never
//! the solver's closed forms.
#![allow(dead_code)]

use num_traits::{Signed, Zero};
use oscillift::oracle::{exact_recurrence_oracle, forced_head};
use oscillift::rational::{int, ratio, Rational};
use oscillift::{CaseTag, Definiteness, PeriodicRecurrence};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn fam(beta: [i64; 4], gamma: [i64; 3]) -> PeriodicRecurrence {
    PeriodicRecurrence::k2(beta.map(int), gamma.map(int), Definiteness::Positive).unwrap()
}

pub fn small(rng: &mut StdRng) -> Rational {
    ratio(rng.gen_range(-6..=6), rng.gen_range(1..=4))
}

pub fn small_nonzero(rng: &mut StdRng) -> Rational {
    loop {
        let x = small(rng);
        if !x.is_zero() {
            return x;
        }
    }
}

pub fn small_positive(rng: &mut StdRng) -> Rational {
    ratio(rng.gen_range(1..=8), rng.gen_range(1..=4))
}

pub fn random_positive_family(rng: &mut StdRng) -> PeriodicRecurrence {
    let beta = [0; 4].map(|_| small(rng));
    let gamma = [0; 3].map(|_| small_positive(rng));
    PeriodicRecurrence::k2(beta, gamma, Definiteness::Positive).unwrap()
}

/// A family with a lift known by construction.
#[derive(Debug, Clone)]
pub struct Planted {
    pub family: PeriodicRecurrence,
    pub case: CaseTag,
    /// `None` for case II, whose `a_2` is not planted.
    pub a: Option<(Rational, Rational)>,
    /// λ (cases V, VI) or θ (cases VII, VIII)
    pub param: Option<f64>,
    pub kappa: Option<Rational>,
}

fn build(beta: [Rational; 4], gamma: [Rational; 3]) -> Option<PeriodicRecurrence> {
    if gamma.iter().any(|g| !g.is_positive()) {
        return None;
    }
    PeriodicRecurrence::k2(beta, gamma, Definiteness::Positive).ok()
}

/// The head forced by `(a_1, a_2)` closes and the oracle agrees through degree 12.
pub fn has_lift(p: &PeriodicRecurrence, a1: &Rational, a2: &Rational) -> bool {
    let Some(h) = forced_head(p, a1, a2) else { return false };
    h.e1.is_zero()
        && h.e2.is_zero()
        && exact_recurrence_oracle(p, a1, a2, (&h.beta_tilde[0], &h.beta_tilde[1]), 12).is_ok()
}

/// `β_n -> s β_n + t`, `γ_n -> s² γ_n`; a lift maps to `(s a_1, s² a_2)`.
pub fn affine(p: &PeriodicRecurrence, s: &Rational, t: &Rational) -> PeriodicRecurrence {
    let beta: Vec<Rational> = p.beta_coeffs().iter().map(|b| s * b + t).collect();
    let gamma: Vec<Rational> = p.gamma_coeffs().iter().map(|g| s * s * g).collect();
    PeriodicRecurrence::new(p.k(), beta, gamma, p.definiteness()).unwrap()
}

fn rational_sqrt(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| Rational::new(rn, rd))
}

/// `a_1 = 0`, `β_1 != β_3`. Pick `a_2` and `u = C/γ_2`; `γ_1`, `β_0`, `γ_2`
/// follow from the head equations.
pub fn case_i(rng: &mut StdRng) -> Planted {
    for _ in 0..100_000 {
        let (b1, b2, b3) = (small(rng), small(rng), small(rng));
        if b1 == b3 {
            continue;
        }
        let g3 = small_positive(rng);
        let a2 = small_nonzero(rng);
        let u = small_nonzero(rng);
        let c = &a2 * (&b1 - &b3) / &g3;
        let t2 = &b2 + &c;
        let d = &a2 - &c * (&b1 - &t2);
        let g1 = &d * &g3 / &a2;
        let b0 = &u + &b1 - &c + &d / &u;
        let big_c = &c * &g1 + &d * (&b0 - &t2);
        let g2 = &big_c / &u;
        let Some(p) = build([b0, b1, b2, b3], [g1, g2, g3]) else { continue };
        if has_lift(&p, &Rational::zero(), &a2) {
            return Planted { family: p, case: CaseTag::I, a: Some((Rational::zero(), a2)), param: None, kappa: None };
        }
    }
    panic!("case I generator exhausted");
}

/// `β_1 = β_3`, `γ_1 = γ_3`, `β_2 != β_0`, otherwise random.
pub fn case_ii(rng: &mut StdRng) -> Planted {
    loop {
        let (b0, b1, b2) = (small(rng), small(rng), small(rng));
        if b0 == b2 {
            continue;
        }
        let (g1, g2) = (small_positive(rng), small_positive(rng));
        let p = build([b0, b1.clone(), b2, b1], [g1.clone(), g2, g1]).unwrap();
        return Planted { family: p, case: CaseTag::II, a: None, param: None, kappa: None };
    }
}

/// `β_1 != β_3` at fixed `κ = a_2/a_1²`. On the normalized tail
/// `β_2 = β_3 = 0`, `γ_2 = γ_3 = 1`, `β_1 = δ`: `E_1` fixes `γ_1` linearly,
/// `E_2` is a quadratic in `β_0`. Choosing `a_1 = 2t/(κ + t²)` and
/// `y = 2a_2δ + a_1 = (q + D/q)/2` with `D = κ(1 - 4κ)a_1⁴` makes its
/// discriminant a rational square.
pub fn distinct_tail(rng: &mut StdRng, kappa: &Rational, case: CaseTag, param: Option<f64>) -> Planted {
    for _ in 0..100_000 {
        let t = small_nonzero(rng);
        let a1 = int(2) * &t / (kappa + &t * &t);
        let a2 = kappa * &a1 * &a1;
        let d = kappa * (int(1) - int(4) * kappa) * &a1 * &a1 * &a1 * &a1;
        let q = small_nonzero(rng);
        let y = (&q + &d / &q) / int(2);
        let delta = (&y - &a1) / (int(2) * &a2);
        if delta.is_zero() {
            continue;
        }
        let probe = |b0: &Rational, g1: &Rational| {
            let p = PeriodicRecurrence::k2(
                [b0.clone(), delta.clone(), int(0), int(0)],
                [g1.clone(), int(1), int(1)],
                Definiteness::Quasi,
            )
            .ok()?;
            forced_head(&p, &a1, &a2)
        };
        let (Some(h1), Some(h2)) = (probe(&int(0), &int(1)), probe(&int(0), &int(2))) else { continue };
        if h1.e1 == h2.e1 {
            continue;
        }
        let g1 = int(1) - &h1.e1 / (&h2.e1 - &h1.e1);
        if !g1.is_positive() {
            continue;
        }
        let e: Vec<Rational> = match (0..3).map(|b| probe(&int(b), &g1).map(|h| h.e2)).collect::<Option<Vec<_>>>() {
            Some(e) => e,
            None => continue,
        };
        let qa = (&e[2] - int(2) * &e[1] + &e[0]) / int(2);
        let qb = &e[1] - &e[0] - &qa;
        let qc = e[0].clone();
        let roots = if qa.is_zero() {
            if qb.is_zero() {
                continue;
            }
            vec![-&qc / &qb]
        } else {
            let Some(s) = rational_sqrt(&(&qb * &qb - int(4) * &qa * &qc)) else { continue };
            vec![(-&qb + &s) / (int(2) * &qa), (-&qb - &s) / (int(2) * &qa)]
        };
        let b0 = roots[rng.gen_range(0..roots.len())].clone();
        let base = build([b0, delta.clone(), int(0), int(0)], [g1.clone(), int(1), int(1)]);
        let Some(base) = base else { continue };
        if !has_lift(&base, &a1, &a2) {
            continue;
        }
        let s = small_nonzero(rng);
        let shift = small(rng);
        let p = affine(&base, &s, &shift);
        let a = (&s * &a1, &s * &s * &a2);
        assert!(has_lift(&p, &a.0, &a.1), "affine map must carry the lift");
        return Planted { family: p, case, a: Some(a), param, kappa: Some(kappa.clone()) };
    }
    panic!("case {case} generator exhausted");
}

/// `β_1 = β_3` at fixed `κ`: every `γ_n = γ`, `β_1 = β_2 = β_3 = β`, with
/// `γ = a_2 + a_2/(e(a_2 e + a_1))` and `β_0 = β + eγ`.
pub fn equal_tail(rng: &mut StdRng, kappa: &Rational, case: CaseTag, param: Option<f64>) -> Planted {
    for _ in 0..100_000 {
        let a1 = small_nonzero(rng);
        let a2 = kappa * &a1 * &a1;
        let e = small_nonzero(rng);
        let den = &e * (&a2 * &e + &a1);
        if den.is_zero() {
            continue;
        }
        let g = &a2 + &a2 / den;
        let b = small(rng);
        let b0 = &b + &e * &g;
        let Some(p) = build([b0, b.clone(), b.clone(), b], [g.clone(), g.clone(), g]) else { continue };
        if has_lift(&p, &a1, &a2) {
            return Planted { family: p, case, a: Some((a1, a2)), param, kappa: Some(kappa.clone()) };
        }
    }
    panic!("case {case} generator exhausted");
}

pub const LAMBDAS: [(i64, i64); 4] = [(1, 2), (-1, 3), (1, 5), (-2, 5)];
pub const KAPPAS_COMPLEX: [(i64, i64); 4] = [(1, 2), (1, 3), (1, 1), (2, 3)];

/// θ with `1/(4cos²(θ/2)) = κ`.
pub fn theta_for(kappa: &Rational) -> f64 {
    let k = oscillift::rational::to_f64(kappa);
    2.0 * (1.0 / (4.0 * k)).sqrt().acos()
}

pub fn planted(rng: &mut StdRng, case: CaseTag) -> Planted {
    let quarter = ratio(1, 4);
    match case {
        CaseTag::I => case_i(rng),
        CaseTag::II => case_ii(rng),
        CaseTag::III => distinct_tail(rng, &quarter, case, None),
        CaseTag::IV => equal_tail(rng, &quarter, case, None),
        CaseTag::V | CaseTag::VI => {
            let (n, d) = LAMBDAS[rng.gen_range(0..LAMBDAS.len())];
            let lambda = ratio(n, d);
            let kappa = oscillift::lift::kappa_from_lambda_exact(&lambda);
            let param = Some(n as f64 / d as f64);
            if case == CaseTag::V {
                distinct_tail(rng, &kappa, case, param)
            } else {
                equal_tail(rng, &kappa, case, param)
            }
        }
        CaseTag::VII | CaseTag::VIII => {
            let (n, d) = KAPPAS_COMPLEX[rng.gen_range(0..KAPPAS_COMPLEX.len())];
            let kappa = ratio(n, d);
            let param = Some(theta_for(&kappa));
            if case == CaseTag::VII {
                distinct_tail(rng, &kappa, case, param)
            } else {
                equal_tail(rng, &kappa, case, param)
            }
        }
    }
}
