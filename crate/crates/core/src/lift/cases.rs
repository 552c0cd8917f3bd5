use num_traits::{One, Zero};

use super::system::{self, HeadSystem};
use super::{
    admissibility_check_with, kappa_from_lambda, kappa_from_theta, require_k2, structural_constants, CaseTag, LiftSolution,
    SolveOptions, StructuralConstants, Transcription,
};
use crate::error::{Error, Result};
use crate::numeric::{high_precision_threshold, real_roots, RealRoot};
use crate::oracle::oracle_compare;
use crate::poly::Poly;
use crate::rational::{abs_f64, format_decimal, ratio, Rational};
use crate::recurrence::PeriodicRecurrence;

const IMAG_TOL: f64 = 1e-9;

struct Coeffs {
    b: [Rational; 4],
    g: [Rational; 3],
}

impl Coeffs {
    fn of(p: &PeriodicRecurrence) -> Self {
        Self {
            b: [0, 1, 2, 3].map(|n| p.beta(n).clone()),
            g: [1, 2, 3].map(|n| p.gamma(n).expect("n >= 1").clone()),
        }
    }
}

/// Decides `x = 0` for a residual of size comparable to `scale`.
fn vanishes(p: &PeriodicRecurrence, x: &Rational, scale: f64, opts: &SolveOptions) -> bool {
    if p.is_exact() {
        x.is_zero()
    } else {
        abs_f64(x) <= opts.eps_residual * scale.max(1.0)
    }
}

struct Draft {
    case: CaseTag,
    a1: Rational,
    a2: Rational,
    beta_tilde: [Rational; 3],
    constants: StructuralConstants,
    param: Option<f64>,
    root: Option<Rational>,
    exact: bool,
    reasons: Vec<String>,
}

fn finish(p: &PeriodicRecurrence, d: Draft, opts: &SolveOptions) -> Result<LiftSolution> {
    let mut reasons = d.reasons;
    let a2_zero = if p.is_exact() && d.exact { d.a2.is_zero() } else { abs_f64(&d.a2) <= opts.eps_zero };
    if a2_zero {
        reasons.insert(0, "a₂=0".to_string());
    }
    if !admissibility_check_with(p, &d.a1, opts.eps_zero) {
        reasons.push("γ₃ + a₁(β₂ − β₃) = 0".to_string());
    }
    let q_family = p.with_head_betas(&d.beta_tilde, d.exact)?;
    let mut sol = LiftSolution {
        case: d.case,
        transcription: opts.transcription,
        a1: d.a1,
        a2: d.a2,
        beta_tilde: d.beta_tilde,
        q_family,
        constants: d.constants,
        param: d.param,
        root: d.root,
        exact: d.exact,
        admissible: false,
        reason: None,
    };
    // an already rejected candidate gains nothing from the oracle
    if reasons.is_empty() {
        let (_, failure) = oracle_compare(p, &sol, opts.oracle_degree, opts.eps_residual);
        if let Some(f) = failure {
            reasons.push(format!("oracle: {f}"));
        }
    }
    sol.admissible = reasons.is_empty();
    sol.reason = (!reasons.is_empty()).then(|| reasons.join("; "));
    Ok(sol)
}

fn distinct_tail(p: &PeriodicRecurrence, opts: &SolveOptions) -> bool {
    !opts.router(p).eq(p.beta(1), p.beta(3))
}

/// `a_1 = 0`, `β_1 != β_3`: `a_2 = -s_1 s_3²`. The reduced head equations
/// give `β̃_2 = β_2 - a_2/s_3`,
/// `β̃_0 = β_0 + a_2 γ_1 (β_3 - β_1 - β_0 + β̃_2)/(γ_2 γ_3)` and
/// `β̃_1 = β_0 + β_1 + a_2/s_3 - β̃_0`; the family must also satisfy `E_2 = 0`.
pub fn solve_case_i(p: &PeriodicRecurrence, opts: &SolveOptions) -> Result<LiftSolution> {
    require_k2(p)?;
    if !distinct_tail(p, opts) {
        return Err(Error::WrongCase("case I needs beta_1 != beta_3".into()));
    }
    let constants = structural_constants(p)?;
    let (s1, s3) = (&constants.s1, constants.s3.clone().expect("beta_1 != beta_3"));
    let Coeffs { b, g } = Coeffs::of(p);
    let a2 = -(s1 * &s3 * &s3);
    let shift = &a2 / &s3;
    let mut reasons = Vec::new();
    let (t0, t1, t2) = match opts.transcription {
        Transcription::Verified => {
            let t2 = &b[2] - &shift;
            let t0 = &b[0] + &a2 * &g[0] * (&b[3] - &b[1] - &b[0] + &t2) / (&g[1] * &g[2]);
            let t1 = &b[0] + &b[1] + &shift - &t0;
            if !a2.is_zero() {
                let c = -&shift;
                let d = &a2 * &g[0] / &g[2];
                let e2 = &t0 * &t1 - &b[0] * &b[1] + &c * &b[0] - &d;
                let scale = abs_f64(&(&t0 * &t1)).max(abs_f64(&(&b[0] * &b[1]))).max(abs_f64(&d));
                if !vanishes(p, &e2, scale, opts) {
                    reasons.push(format!("no lift for this family: head condition E2 = {} != 0", format_decimal(&e2)));
                }
            }
            (t0, t1, t2)
        }
        Transcription::PaperLiteral => {
            let t0 = &b[0] + (&b[3] - &b[1] - &b[0]) * &g[0] / (&g[1] * &g[2]) * &a2;
            let t1 = &b[1] + &shift - &t0;
            (t0, t1, -shift)
        }
    };
    finish(
        p,
        Draft {
            case: CaseTag::I,
            a1: Rational::zero(),
            a2,
            beta_tilde: [t0, t1, t2],
            constants,
            param: None,
            root: None,
            exact: p.is_exact(),
            reasons,
        },
        opts,
    )
}

/// `a_1 = 0`, `β_1 = β_3`, `γ_1 = γ_3`, `β_2 != β_0`:
/// `β̃_0 = β_1 - γ_2/(β_2 - β_0)`, `β̃_1 = β_0 + γ_2/(β_2 - β_0)`, `β̃_2 = β_2`,
/// `a_2 = γ_2(β_1 - β_0)/(β_2 - β_0) - γ_2²/(β_2 - β_0)²`.
pub fn solve_case_ii(p: &PeriodicRecurrence, opts: &SolveOptions) -> Result<LiftSolution> {
    require_k2(p)?;
    let router = opts.router(p);
    let Coeffs { b, g } = Coeffs::of(p);
    if !router.eq(&b[1], &b[3]) {
        return Err(Error::WrongCase("case II needs beta_1 = beta_3".into()));
    }
    if !router.eq(&g[0], &g[2]) {
        return Err(Error::WrongCase("case II needs gamma_1 = gamma_3".into()));
    }
    if router.eq(&b[2], &b[0]) {
        return Err(Error::WrongCase("case II needs beta_2 != beta_0".into()));
    }
    let delta = &b[2] - &b[0];
    let q = &g[1] / &delta;
    let a2 = &q * (&b[1] - &b[0]) - &q * &q;
    let t0 = &b[1] - &q;
    let t1 = &b[0] + &q;
    finish(
        p,
        Draft {
            case: CaseTag::II,
            a1: Rational::zero(),
            a2,
            beta_tilde: [t0, t1, b[2].clone()],
            constants: structural_constants(p)?,
            param: None,
            root: None,
            exact: p.is_exact(),
            reasons: Vec::new(),
        },
        opts,
    )
}

/// `a_1² = 4a_2`, `β_1 != β_3`.
pub fn solve_case_iii(p: &PeriodicRecurrence, opts: &SolveOptions) -> Result<Vec<LiftSolution>> {
    solve_at_kappa(p, &ratio(1, 4), CaseTag::III, None, opts)
}

/// `a_1² = 4a_2`, `β_1 = β_3`.
pub fn solve_case_iv(p: &PeriodicRecurrence, opts: &SolveOptions) -> Result<Vec<LiftSolution>> {
    solve_at_kappa(p, &ratio(1, 4), CaseTag::IV, None, opts)
}

/// `a_2 = λ a_1²/(1+λ)²`, `λ ∈ (-1, 1) \ {0}`, `β_1 != β_3`.
pub fn solve_case_v(p: &PeriodicRecurrence, lambda: f64, opts: &SolveOptions) -> Result<Vec<LiftSolution>> {
    let kappa = kappa_from_lambda(lambda)?;
    solve_at_kappa(p, &kappa, CaseTag::V, Some(lambda), opts)
}

/// `a_2 = λ a_1²/(1+λ)²`, `λ ∈ (-1, 1) \ {0}`, `β_1 = β_3`.
pub fn solve_case_vi(p: &PeriodicRecurrence, lambda: f64, opts: &SolveOptions) -> Result<Vec<LiftSolution>> {
    let kappa = kappa_from_lambda(lambda)?;
    solve_at_kappa(p, &kappa, CaseTag::VI, Some(lambda), opts)
}

/// `λ = e^{iθ}`, `θ ∈ (0, π)`: case VII when `β_1 != β_3`, VIII otherwise.
pub fn solve_case_vii_viii(p: &PeriodicRecurrence, theta: f64, opts: &SolveOptions) -> Result<Vec<LiftSolution>> {
    let kappa = kappa_from_theta(theta, opts.eps_zero)?;
    require_k2(p)?;
    let tag = if distinct_tail(p, opts) { CaseTag::VII } else { CaseTag::VIII };
    solve_at_kappa(p, &kappa, tag, Some(theta), opts)
}

/// Candidates of cases III–VIII at a fixed `κ = a_2/a_1²`. `param` is the λ or
/// θ the caller started from and is only recorded.
pub fn solve_at_kappa(
    p: &PeriodicRecurrence,
    kappa: &Rational,
    tag: CaseTag,
    param: Option<f64>,
    opts: &SolveOptions,
) -> Result<Vec<LiftSolution>> {
    require_k2(p)?;
    if matches!(tag, CaseTag::I | CaseTag::II) {
        return Err(Error::WrongCase(format!("case {tag} has a_1 = 0 and no kappa")));
    }
    if kappa.is_zero() {
        return Err(Error::ParameterDomain("kappa = a_2/a_1^2 must be nonzero".into()));
    }
    let distinct = distinct_tail(p, opts);
    if distinct != tag.needs_distinct_tail() {
        let need = if tag.needs_distinct_tail() { "!=" } else { "=" };
        return Err(Error::WrongCase(format!("case {tag} needs beta_1 {need} beta_3")));
    }
    let mut base = structural_constants(p)?;
    base.kappa = Some(kappa.clone());
    match tag {
        CaseTag::V | CaseTag::VI => base.lambda = param,
        CaseTag::VII | CaseTag::VIII => base.theta = param,
        _ => {}
    }
    match opts.transcription {
        Transcription::Verified => verified_at_kappa(p, kappa, tag, param, distinct, base, opts),
        Transcription::PaperLiteral => literal_at_kappa(p, kappa, tag, param, distinct, base, opts),
    }
}

fn set_w(c: &mut StructuralConstants, tag: CaseTag, w: Rational) {
    if matches!(tag, CaseTag::III | CaseTag::IV) {
        c.w = Some(w);
    } else {
        c.w_lambda = Some(w);
    }
}

fn nonzero_a1(p: &PeriodicRecurrence, a1: &Rational, root: &RealRoot, opts: &SolveOptions) -> bool {
    if p.is_exact() && root.exact {
        !a1.is_zero()
    } else {
        abs_f64(a1) > opts.eps_zero
    }
}

fn magnitude(poly: &Poly, x: &Rational) -> f64 {
    let ax = abs_f64(x);
    poly.coeffs().iter().rev().fold(0.0, |acc, c| acc * ax + abs_f64(c))
}

/// `E_2` vanishes at the root. Irrational roots of an exact family are
/// decided exactly, by locating the root among those of `gcd(F, E_2)`.
fn e2_holds(p: &PeriodicRecurrence, sys: &HeadSystem, f: &Poly, root: &RealRoot, opts: &SolveOptions) -> bool {
    let v = &root.value;
    if p.is_exact() && root.exact {
        return sys.e2.eval(v).is_zero();
    }
    if p.is_exact() {
        let g = f.gcd(&sys.e2);
        if g.degree().unwrap_or(0) == 0 {
            return false;
        }
        let tol = high_precision_threshold(opts.digits);
        return real_roots(&g, IMAG_TOL, opts.digits)
            .iter()
            .any(|r| abs_f64(&(&r.value - v)) <= tol * (1.0 + abs_f64(v)));
    }
    abs_f64(&sys.e2.eval(v)) <= opts.eps_residual * magnitude(&sys.e2, v).max(1.0)
}

fn verified_at_kappa(
    p: &PeriodicRecurrence,
    kappa: &Rational,
    tag: CaseTag,
    param: Option<f64>,
    distinct: bool,
    base: StructuralConstants,
    opts: &SolveOptions,
) -> Result<Vec<LiftSolution>> {
    let sys = HeadSystem::new(p, kappa, distinct);
    let f = if sys.e1.is_zero() { sys.e2.clone() } else { sys.e1.clone() };
    if f.is_zero() {
        return Ok(Vec::new());
    }
    let router = opts.router(p);
    let tail_constant = router.eq(p.beta(2), p.beta(3)) && router.eq(p.gamma(2)?, p.gamma(3)?);
    let mut out = Vec::new();
    for root in real_roots(&f, IMAG_TOL, opts.digits) {
        let v = &root.value;
        let a1 = sys.a1.eval(v);
        if !nonzero_a1(p, &a1, &root, opts) {
            continue;
        }
        let mut reasons = Vec::new();
        if !tail_constant {
            reasons.push("no lift for this family: a₁ ≠ 0 needs a constant tail (β₂ = β₃, γ₂ = γ₃)".to_string());
        }
        if !e2_holds(p, &sys, &f, &root, opts) {
            reasons.push(format!("no lift for this family: head condition E2 = {} != 0 at this root", format_decimal(&sys.e2.eval(v))));
        }
        let mut constants = base.clone();
        set_w(&mut constants, tag, sys.w.eval(v));
        constants.c = Some(sys.big_c.eval(v));
        out.push(finish(
            p,
            Draft {
                case: tag,
                a2: sys.a2.eval(v),
                beta_tilde: [sys.t0.eval(v), sys.t1.eval(v), sys.t2.eval(v)],
                a1,
                constants,
                param,
                root: Some(v.clone()),
                exact: p.is_exact() && root.exact,
                reasons,
            },
            opts,
        )?);
    }
    Ok(out)
}

fn literal_at_kappa(
    p: &PeriodicRecurrence,
    kappa: &Rational,
    tag: CaseTag,
    param: Option<f64>,
    distinct: bool,
    base: StructuralConstants,
    opts: &SolveOptions,
) -> Result<Vec<LiftSolution>> {
    let l = Rational::one() / kappa;
    let Coeffs { b, g } = Coeffs::of(p);
    let quarter = tag == CaseTag::III || tag == CaseTag::IV;
    let poly = if distinct {
        if quarter {
            system::paper_case_iii_quartic(p)
        } else {
            system::paper_lambda_quartic(p, &l)
        }
        .expect("beta_1 != beta_3")
    } else if quarter {
        system::paper_case_iv_quadratic(p)
    } else {
        system::paper_a1_quadratic(p, kappa)
    };
    if poly.is_zero() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for root in real_roots(&poly, IMAG_TOL, opts.digits) {
        let v = root.value.clone();
        let (a1, w) = if distinct {
            let s2 = base.s2.as_ref().expect("distinct");
            let s3 = base.s3.as_ref().expect("distinct");
            (&l * (s3 * &v + s2), v.clone())
        } else {
            (v.clone(), -(&g[1] / &g[2]))
        };
        if !nonzero_a1(p, &a1, &root, opts) {
            continue;
        }
        let a2 = kappa * &a1 * &a1;
        let factor = if quarter { system::case_iii_beta0_factor(&w) } else { system::lambda_beta0_factor(&w, &l) };
        let c = system::paper_c(p, &w, &a1, &a2, &factor);
        let shift = &c / &g[1];
        let t0 = &b[0] - &shift;
        let t1 = &b[1] + &shift + &a1 * &w;
        let t2 = &b[2] - &a1 * (&w + Rational::one());
        let mut constants = base.clone();
        set_w(&mut constants, tag, w);
        constants.c = Some(c);
        out.push(finish(
            p,
            Draft {
                case: tag,
                a1,
                a2,
                beta_tilde: [t0, t1, t2],
                constants,
                param,
                root: Some(v),
                exact: p.is_exact() && root.exact,
                reasons: Vec::new(),
            },
            opts,
        )?);
    }
    Ok(out)
}
