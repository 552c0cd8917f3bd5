//! Lifts `Q_n = P_n + a_1 P_{n-1} + a_2 P_{n-2}` of a period-2 family that
//! keep every `γ_n`, so that P and Q share their oscillator algebra.
//!
//! Solutions fall into eight cases by `a_1 = 0`, the sign of `a_1² - 4a_2`
//! and whether `β_1 = β_3`. Cases III–VIII are parameterized by
//! `κ = a_2/a_1²`: `κ = 1/4`, `κ = λ/(1+λ)²` for real `λ`, and
//! `κ = 1/(4cos²(θ/2))` for `λ = e^{iθ}`.

mod cases;
mod certify;
mod system;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{from_f64, int, snap, to_f64, Rational, Router};
use crate::recurrence::PeriodicRecurrence;
use crate::poly::Poly;

pub use certify::{certify_exact, Certificate};
pub use cases::{solve_at_kappa, solve_case_i, solve_case_ii, solve_case_iii, solve_case_iv, solve_case_v, solve_case_vi, solve_case_vii_viii};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
}

impl CaseTag {
    pub const ALL: [CaseTag; 8] = [CaseTag::I, CaseTag::II, CaseTag::III, CaseTag::IV, CaseTag::V, CaseTag::VI, CaseTag::VII, CaseTag::VIII];

    /// Cases that require `β_1 != β_3`.
    pub fn needs_distinct_tail(self) -> bool {
        matches!(self, CaseTag::I | CaseTag::III | CaseTag::V | CaseTag::VII)
    }

    pub fn branch_name(self) -> &'static str {
        match self {
            CaseTag::I | CaseTag::II => "i",
            CaseTag::III | CaseTag::IV => "ii",
            CaseTag::V | CaseTag::VI => "iii",
            CaseTag::VII | CaseTag::VIII => "iv",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::I => "I",
            CaseTag::II => "II",
            CaseTag::III => "III",
            CaseTag::IV => "IV",
            CaseTag::V => "V",
            CaseTag::VI => "VI",
            CaseTag::VII => "VII",
            CaseTag::VIII => "VIII",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CaseTag::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown case {s:?}")))
    }
}

/// Which set of closed forms the solver applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transcription {
    /// Head equations re-derived from the relation and checked by the oracle.
    #[default]
    Verified,
    /// The printed closed forms, kept for auditing.
    PaperLiteral,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StructuralConstants {
    pub s1: Rational,
    /// absent when `β_1 = β_3`
    pub s2: Option<Rational>,
    pub s3: Option<Rational>,
    /// cases III/IV
    pub w: Option<Rational>,
    /// cases V–VIII
    pub w_lambda: Option<Rational>,
    /// `a_2/a_1²`
    pub kappa: Option<Rational>,
    pub lambda: Option<f64>,
    pub theta: Option<f64>,
    /// the applicable `C_{β,γ}`, `D_{β,γ}`, `C_λ` or `D_λ`
    pub c: Option<Rational>,
}

/// `s_1`, and `s_2`, `s_3` when `β_1 != β_3`.
pub fn structural_constants(p: &PeriodicRecurrence) -> Result<StructuralConstants> {
    require_k2(p)?;
    let (s1, s23) = system::s_values(p);
    Ok(StructuralConstants { s1, s2: s23.as_ref().map(|s| s.0.clone()), s3: s23.map(|s| s.1), ..Default::default() })
}

/// `γ_3 + a_1(β_2 - β_3) != 0`, decided as `|γ_3 + a_1(β_2 - β_3)| > ε_zero·scale`
/// with `scale = max(|γ_3|, |a_1(β_2 - β_3)|, 1)`.
pub fn admissibility_check(p: &PeriodicRecurrence, a1: &Rational) -> bool {
    admissibility_check_with(p, a1, EPS_ZERO)
}

pub fn admissibility_check_with(p: &PeriodicRecurrence, a1: &Rational, eps_zero: f64) -> bool {
    let g3 = p.gamma(3).expect("n >= 1");
    let shift = a1 * (p.beta(2) - p.beta(3));
    let value = to_f64(&(g3 + &shift));
    let scale = to_f64(g3).abs().max(to_f64(&shift).abs()).max(1.0);
    value != 0.0 && value.abs() > eps_zero * scale
}

pub const EPS_ZERO: f64 = 1e-10;
pub const EPS_CASE: f64 = 1e-9;
pub const EPS_RESIDUAL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub transcription: Transcription,
    pub eps_zero: f64,
    pub eps_case: f64,
    pub eps_residual: f64,
    /// decimal digits carried by irrational roots
    pub digits: u32,
    pub oracle_degree: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            transcription: Transcription::Verified,
            eps_zero: EPS_ZERO,
            eps_case: EPS_CASE,
            eps_residual: EPS_RESIDUAL,
            digits: crate::numeric::working_digits(),
            oracle_degree: crate::oracle::ORACLE_DEGREE,
        }
    }
}

impl SolveOptions {
    pub fn paper_literal() -> Self {
        Self { transcription: Transcription::PaperLiteral, ..Self::default() }
    }

    pub(crate) fn router(&self, p: &PeriodicRecurrence) -> Router {
        Router::new(p.is_exact(), self.eps_case)
    }
}

/// One candidate `(a_1, a_2, β̃_0, β̃_1, β̃_2)` with its Q family.
/// Inadmissible candidates are kept so the caller can see why they failed.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftSolution {
    pub case: CaseTag,
    pub transcription: Transcription,
    pub a1: Rational,
    pub a2: Rational,
    pub beta_tilde: [Rational; 3],
    /// head `β̃_0, β̃_1`, tail `β̃_2, β_3`, γ unchanged
    pub q_family: PeriodicRecurrence,
    pub constants: StructuralConstants,
    /// λ for cases V/VI, θ for VII/VIII
    pub param: Option<f64>,
    /// the polynomial root the solution came from: `w` when `β_1 != β_3`, `a_1` otherwise
    pub root: Option<Rational>,
    /// all values are exact rationals (otherwise they carry `digits` digits)
    pub exact: bool,
    pub admissible: bool,
    pub reason: Option<String>,
}

impl LiftSolution {
    pub fn branch(&self) -> Result<Branch> {
        theorem11_classify(to_f64(&self.a1), to_f64(&self.a2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "branch", rename_all = "lowercase")]
pub enum Branch {
    /// `a_1 = 0`
    I,
    /// `a_1² = 4a_2`
    II,
    /// `a_1² > 4a_2`, with λ the root in (-1, 1) of `a_1²λ = a_2(1+λ)²`
    III { lambda: f64 },
    /// `a_1² < 4a_2`, with `λ = e^{iθ}`
    IV { theta: f64 },
}

impl Branch {
    pub fn name(&self) -> &'static str {
        match self {
            Branch::I => "i",
            Branch::II => "ii",
            Branch::III { .. } => "iii",
            Branch::IV { .. } => "iv",
        }
    }
}

pub fn theorem11_classify(a1: f64, a2: f64) -> Result<Branch> {
    theorem11_classify_with(a1, a2, EPS_CASE)
}

pub fn theorem11_classify_with(a1: f64, a2: f64, eps_case: f64) -> Result<Branch> {
    if a2 == 0.0 {
        return Err(Error::ZeroA2);
    }
    if a1 == 0.0 {
        return Ok(Branch::I);
    }
    let sq = a1 * a1;
    let gap = sq - 4.0 * a2;
    if gap.abs() <= eps_case * sq.max(4.0 * a2.abs()).max(1.0) {
        return Ok(Branch::II);
    }
    if gap > 0.0 {
        // a_2 λ² + (2a_2 - a_1²) λ + a_2 = 0; the roots multiply to 1
        let b = 2.0 * a2 - sq;
        let disc = (a1.abs() * gap.sqrt()).abs();
        let q = -0.5 * (b + b.signum() * disc);
        Ok(Branch::III { lambda: a2 / q })
    } else {
        let half = (sq / (4.0 * a2)).sqrt().clamp(0.0, 1.0);
        Ok(Branch::IV { theta: 2.0 * half.acos() })
    }
}

/// `κ = λ/(1+λ)²` for `λ ∈ (-1, 1) \ {0}`. The float is read as the simplest
/// rational within `1e-15` (denominator up to 10⁶), else exactly.
pub fn kappa_from_lambda(lambda: f64) -> Result<Rational> {
    if !(lambda > -1.0 && lambda < 1.0) || lambda == 0.0 {
        return Err(Error::ParameterDomain(format!("lambda = {lambda} must lie in (-1, 1) without 0")));
    }
    let l = snap(lambda, 1_000_000, 1e-15).map_or_else(|| from_f64(lambda), Ok)?;
    Ok(kappa_from_lambda_exact(&l))
}

pub fn kappa_from_lambda_exact(lambda: &Rational) -> Rational {
    let one_plus = lambda + int(1);
    lambda / (&one_plus * &one_plus)
}

/// `κ = λ/(1+λ)²` at `λ = e^{iθ}`, which is real and equals `1/(4cos²(θ/2))`.
/// Computed in complex arithmetic; the real part is snapped to the simplest
/// rational within `1e-13` (denominator up to 10⁴) when one exists.
pub fn kappa_from_theta(theta: f64, eps_zero: f64) -> Result<Rational> {
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(Error::ParameterDomain(format!("theta = {theta} must lie in (0, pi)")));
    }
    let lam = Complex64::from_polar(1.0, theta);
    let one_plus = lam + 1.0;
    let kappa = lam / (one_plus * one_plus);
    if kappa.im.abs() > eps_zero * kappa.norm().max(1.0) {
        return Err(Error::ParameterDomain(format!("kappa({theta}) has imaginary part {}", kappa.im)));
    }
    snap(kappa.re, 10_000, 1e-13).map_or_else(|| from_f64(kappa.re), Ok)
}

fn require_k2(p: &PeriodicRecurrence) -> Result<()> {
    if p.k() != 2 {
        return Err(Error::InvalidFamily(format!("lift solver needs a period-2 family, got k = {}", p.k())));
    }
    Ok(())
}

/// The verified defining polynomial at `κ`: `E_1` as a polynomial in `w`
/// (`β_1 != β_3`) or in `a_1` (`β_1 = β_3`). At `κ = 1/4` with `β_1 != β_3`
/// this is the quartic of Case III; its root `w = -s_2/s_3` gives `a_1 = 0`.
pub fn verified_defining_polynomial(p: &PeriodicRecurrence, kappa: &Rational) -> Result<Poly> {
    require_k2(p)?;
    let distinct = p.beta(1) != p.beta(3);
    Ok(system::HeadSystem::new(p, kappa, distinct).e1)
}

/// The Case III quartic as printed (`None` when `β_1 = β_3`).
pub fn paper_case_iii_quartic(p: &PeriodicRecurrence) -> Option<Poly> {
    system::paper_case_iii_quartic(p)
}

/// The printed λ-quartic for `L = (1+λ)²/λ = 1/κ` (`None` when `β_1 = β_3`).
pub fn paper_lambda_quartic(p: &PeriodicRecurrence, l: &Rational) -> Option<Poly> {
    system::paper_lambda_quartic(p, l)
}

pub fn paper_case_iv_quadratic(p: &PeriodicRecurrence) -> Poly {
    system::paper_case_iv_quadratic(p)
}

pub fn paper_case_vi_quadratic(p: &PeriodicRecurrence, kappa: &Rational) -> Poly {
    system::paper_a1_quadratic(p, kappa)
}

#[derive(Debug, Clone, Copy)]
enum Job {
    Fixed(CaseTag),
    Lambda(f64),
    Theta(f64),
}

/// Every candidate of every case applicable to P, admissible or not, in
/// deterministic order: case tag, then λ or θ, then root.
pub fn enumerate_candidates(
    p: &PeriodicRecurrence,
    lambda_grid: &[f64],
    theta_grid: &[f64],
    opts: &SolveOptions,
) -> Result<Vec<LiftSolution>> {
    require_k2(p)?;
    for &l in lambda_grid {
        kappa_from_lambda(l)?;
    }
    for &t in theta_grid {
        kappa_from_theta(t, opts.eps_zero)?;
    }
    let distinct = !opts.router(p).eq(p.beta(1), p.beta(3));
    let mut jobs = vec![Job::Fixed(if distinct { CaseTag::I } else { CaseTag::II })];
    jobs.push(Job::Fixed(if distinct { CaseTag::III } else { CaseTag::IV }));
    jobs.extend(lambda_grid.iter().map(|&l| Job::Lambda(l)));
    jobs.extend(theta_grid.iter().map(|&t| Job::Theta(t)));

    let batches: Vec<Result<Vec<LiftSolution>>> = jobs
        .par_iter()
        .map(|job| match *job {
            Job::Fixed(CaseTag::I) => solve_case_i(p, opts).map(|s| vec![s]),
            Job::Fixed(CaseTag::II) => match solve_case_ii(p, opts) {
                Ok(s) => Ok(vec![s]),
                Err(Error::WrongCase(_)) => Ok(Vec::new()),
                Err(e) => Err(e),
            },
            Job::Fixed(CaseTag::III) => solve_case_iii(p, opts),
            Job::Fixed(_) => solve_case_iv(p, opts),
            Job::Lambda(l) if distinct => solve_case_v(p, l, opts),
            Job::Lambda(l) => solve_case_vi(p, l, opts),
            Job::Theta(t) => solve_case_vii_viii(p, t, opts),
        })
        .collect();
    let mut out = Vec::new();
    for b in batches {
        out.extend(b?);
    }
    out.sort_by(|a, b| {
        a.case
            .cmp(&b.case)
            .then(a.param.unwrap_or(0.0).total_cmp(&b.param.unwrap_or(0.0)))
            .then(a.root.cmp(&b.root))
    });
    Ok(out)
}

/// The admissible subset of [`enumerate_candidates`].
pub fn enumerate_solutions(
    p: &PeriodicRecurrence,
    lambda_grid: &[f64],
    theta_grid: &[f64],
    opts: &SolveOptions,
) -> Result<Vec<LiftSolution>> {
    Ok(enumerate_candidates(p, lambda_grid, theta_grid, opts)?.into_iter().filter(|s| s.admissible).collect())
}
