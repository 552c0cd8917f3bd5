//! Independent checks of a lift: exact derivation of the Q recurrence from
//! the linear relation, floating-point residuals, Gauss quadrature and the
//! constraint checks for general period k.

use nalgebra::SymmetricEigen;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lift::LiftSolution;
use crate::oscillator::algebras_equal;
use crate::poly::Poly;
use crate::rational::{abs_f64, format_rational, relative, to_f64, Rational};
use crate::recurrence::PeriodicRecurrence;

/// Degree through which solutions are checked by default.
pub const ORACLE_DEGREE: usize = 12;
pub const RESIDUAL_DEGREE: usize = 20;
pub const SAMPLE_COUNT: usize = 50;
pub const GRAM_DEGREE: usize = 15;

/// Recurrence coefficients read off from the Q polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutput {
    /// `β̃_0, …, β̃_{n_max}`
    pub beta: Vec<Rational>,
    /// `γ̃_1, …, γ̃_{n_max}`
    pub gamma: Vec<Rational>,
    /// Largest remainder relative to the size of `x Q_n - Q_{n+1}`; zero in exact mode.
    pub max_remainder: f64,
}

impl OracleOutput {
    pub fn gamma_at(&self, n: usize) -> Option<&Rational> {
        n.checked_sub(1).and_then(|i| self.gamma.get(i))
    }
}

fn relation_polys(p: &PeriodicRecurrence, a1: &Rational, a2: &Rational, head: (&Rational, &Rational), n_max: usize) -> Vec<Poly> {
    let ps = p.monic_polys(n_max + 1);
    let g1 = p.gamma(1).expect("gamma_1");
    let q1 = Poly::linear_monic(head.0);
    let q2 = &(&q1.shift_up() - &q1.scale(head.1)) - &Poly::constant(g1.clone());
    let mut qs = vec![Poly::constant(Rational::one()), q1, q2];
    for n in 3..=n_max + 1 {
        qs.push(&(&ps[n] + &ps[n - 1].scale(a1)) + &ps[n - 2].scale(a2));
    }
    qs
}

fn derive(
    p: &PeriodicRecurrence,
    a1: &Rational,
    a2: &Rational,
    head: (&Rational, &Rational),
    n_max: usize,
    threshold: Option<f64>,
) -> Result<OracleOutput> {
    if n_max < 3 {
        return Err(Error::ParameterDomain(format!("oracle needs n_max >= 3, got {n_max}")));
    }
    let qs = relation_polys(p, a1, a2, head, n_max);
    let mut beta = Vec::with_capacity(n_max + 1);
    let mut gamma = Vec::with_capacity(n_max);
    let mut worst = 0.0f64;
    for n in 0..=n_max {
        let r = &qs[n].shift_up() - &qs[n + 1];
        let b = r.coeff(n);
        let mut rest = &r - &qs[n].scale(&b);
        if n >= 1 {
            let g = rest.coeff(n - 1);
            rest = &rest - &qs[n - 1].scale(&g);
            gamma.push(g);
        }
        beta.push(b);
        if rest.is_zero() {
            continue;
        }
        let size = relative(&rest.max_abs_coeff(), &r.max_abs_coeff().max(Rational::one()));
        worst = worst.max(size);
        match threshold {
            Some(t) if size <= t => {}
            _ => {
                return Err(Error::Oracle {
                    degree: n,
                    detail: format!(
                        "x Q_{n} - Q_{} - β̃ Q_{n} - γ̃ Q_{} leaves a remainder of relative size {size:e}",
                        n + 1,
                        n.saturating_sub(1)
                    ),
                })
            }
        }
    }
    Ok(OracleOutput { beta, gamma, max_remainder: worst })
}

/// Builds `Q_0 = 1`, `Q_1 = x - β̃_0`, `Q_2 = (x - β̃_1) Q_1 - γ_1` from the
/// candidate head and `Q_n = P_n + a_1 P_{n-1} + a_2 P_{n-2}` for `n >= 3`,
/// then reads `(β̃_n, γ̃_n)` off `x Q_n - Q_{n+1}` for `n = 0..=n_max`.
/// Fails at the first degree whose remainder is not identically zero.
pub fn exact_recurrence_oracle(
    p: &PeriodicRecurrence,
    a1: &Rational,
    a2: &Rational,
    head: (&Rational, &Rational),
    n_max: usize,
) -> Result<OracleOutput> {
    derive(p, a1, a2, head, n_max, None)
}

/// Same derivation for parameters known only approximately (irrational
/// roots, float input); remainders up to `threshold` are accepted.
pub fn tolerant_recurrence_oracle(
    p: &PeriodicRecurrence,
    a1: &Rational,
    a2: &Rational,
    head: (&Rational, &Rational),
    n_max: usize,
    threshold: f64,
) -> Result<OracleOutput> {
    derive(p, a1, a2, head, n_max, Some(threshold))
}

/// Head of Q obtained by running the Q recurrence backwards from the
/// relation-generated `Q_3`, `Q_4`, together with the two scalar defects that
/// must vanish for a genuine lift.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcedHead {
    pub beta_tilde: [Rational; 3],
    /// leading coefficient of the back-substituted `Q_2` before normalization
    pub q2_leading: Rational,
    /// linear coefficient of `x Q_2 - Q_3 - β̃_2 Q_2` minus `γ_2`
    pub e1: Rational,
    /// constant-term mismatch between `Q_2` and `(x - β̃_1)(x - β̃_0) - γ_1`
    pub e2: Rational,
}

pub fn forced_head(p: &PeriodicRecurrence, a1: &Rational, a2: &Rational) -> Option<ForcedHead> {
    let ps = p.monic_polys(4);
    let q3 = &(&ps[3] + &ps[2].scale(a1)) + &ps[1].scale(a2);
    let q4 = &(&ps[4] + &ps[3].scale(a1)) + &ps[2].scale(a2);
    let g3 = p.gamma(3).ok()?;
    let raw = &(&q3.shift_up() - &q3.scale(p.beta(3))) - &q4;
    let raw = raw.scale(&(Rational::one() / g3));
    let lead = raw.coeff(2);
    if lead.is_zero() || raw.degree() != Some(2) {
        return None;
    }
    let q2 = raw.monic();
    let s = &q2.shift_up() - &q3;
    let t2 = s.coeff(2);
    let r = &s - &q2.scale(&t2);
    let slope = r.coeff(1);
    if slope.is_zero() {
        return None;
    }
    let t0 = -r.coeff(0) / &slope;
    let t1 = -q2.coeff(1) - &t0;
    let g1 = p.gamma(1).ok()?;
    let g2 = p.gamma(2).ok()?;
    let e2 = &t0 * &t1 - g1 - q2.coeff(0);
    Some(ForcedHead { beta_tilde: [t0, t1, t2], q2_leading: lead, e1: slope - g2, e2 })
}

/// Chebyshev points of the first kind mapped to `[a, b]`, ascending.
pub fn chebyshev_points(count: usize, a: f64, b: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..count)
        .map(|j| {
            let t = ((2 * j + 1) as f64 * std::f64::consts::PI / (2 * count) as f64).cos();
            0.5 * (a + b) + 0.5 * (b - a) * t
        })
        .collect();
    pts.sort_by(|x, y| x.total_cmp(y));
    pts
}

/// `max |Q_n(x) - (P_n + a_1 P_{n-1} + a_2 P_{n-2})(x)| / max(1, |Q_n(x)|)`
/// over `n = 3..=n_max` and `samples` Chebyshev points in `[-4, 4]`, with
/// `Q_n` evaluated from the solution's own recurrence.
pub fn linear_relation_residual(p: &PeriodicRecurrence, sol: &LiftSolution, n_max: usize, samples: usize) -> f64 {
    let a1 = to_f64(&sol.a1);
    let a2 = to_f64(&sol.a2);
    chebyshev_points(samples, -4.0, 4.0)
        .par_iter()
        .map(|&x| {
            let pv = p.monic_values(n_max, x);
            let qv = sol.q_family.monic_values(n_max, x);
            (3..=n_max)
                .map(|n| {
                    let lhs = qv[n];
                    let rhs = pv[n] + a1 * pv[n - 1] + a2 * pv[n - 2];
                    (lhs - rhs).abs() / lhs.abs().max(1.0)
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Exact version for a single degree: the largest coefficient of
/// `Q_n - P_n - a_1 P_{n-1} - a_2 P_{n-2}`.
pub fn linear_relation_residual_exact(p: &PeriodicRecurrence, sol: &LiftSolution, n: usize) -> Rational {
    if n < 2 {
        return Rational::zero();
    }
    let ps = p.monic_polys(n);
    let q = sol.q_family.monic_polys(n).pop().expect("nonempty");
    let diff = &(&(&q - &ps[n]) - &ps[n - 1].scale(&sol.a1)) - &ps[n - 2].scale(&sol.a2);
    diff.max_abs_coeff()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Golub-Welsch rule of order `m` from the symmetric Jacobi matrix.
pub fn gauss_quadrature(family: &PeriodicRecurrence, m: usize) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::Dimension { min: 1, got: 0 });
    }
    let sym = family.symmetrize()?;
    let eig = SymmetricEigen::new(sym.symmetric_jacobi(m));
    let mut pairs: Vec<(f64, f64)> = (0..m).map(|j| (eig.eigenvalues[j], eig.eigenvectors[(0, j)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(QuadratureRule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GramReport {
    pub offdiag: f64,
    pub diag_dev: f64,
}

/// Gram matrix of `φ_0..φ_{n_max}` under the rule of order `2 n_max + 2`.
///
/// `√w_j φ_n(x_j)` is read from the eigenvectors, up to a sign per node that
/// cancels in the products. Forward
/// recurrence at a node outside the essential spectrum follows the decaying
/// solution and amplifies rounding by the growth of the dominant one.
pub fn quadrature_orthogonality(family: &PeriodicRecurrence, n_max: usize) -> Result<GramReport> {
    let m = 2 * n_max + 2;
    let sym = family.symmetrize()?;
    let eig = SymmetricEigen::new(sym.symmetric_jacobi(m));
    let u = &eig.eigenvectors;
    let mut report = GramReport { offdiag: 0.0, diag_dev: 0.0 };
    for n in 0..=n_max {
        for k in n..=n_max {
            let g: f64 = (0..m).map(|j| u[(n, j)] * u[(k, j)]).sum();
            if n == k {
                report.diag_dev = report.diag_dev.max((g - 1.0).abs());
            } else {
                report.offdiag = report.offdiag.max(g.abs());
            }
        }
    }
    Ok(report)
}

/// `∫ x^p dμ` for `p = 0..=p_max`, exactly, as `(J^p)_{00}` of the monic Jacobi matrix.
pub fn exact_moments(family: &PeriodicRecurrence, p_max: usize) -> Vec<Rational> {
    let size = p_max / 2 + 2;
    let mut v = vec![Rational::zero(); size];
    v[0] = Rational::one();
    let mut out = Vec::with_capacity(p_max + 1);
    for _ in 0..=p_max {
        out.push(v[0].clone());
        // row vector e_0ᵀ J^p times J: J[n][n] = β_n, J[n][n+1] = 1, J[n+1][n] = γ_{n+1}
        let next: Vec<Rational> = (0..size)
            .map(|n| {
                let mut acc = &v[n] * family.beta(n);
                if n > 0 {
                    acc += &v[n - 1];
                }
                if n + 1 < size {
                    acc += &v[n + 1] * family.gamma(n + 1).expect("n >= 1");
                }
                acc
            })
            .collect();
        v = next;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleRow {
    pub n: usize,
    pub beta: String,
    pub gamma: Option<String>,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub solution: usize,
    pub case: String,
    pub residual: f64,
    pub oracle_match: bool,
    pub oracle_recurrence: Vec<OracleRow>,
    pub gram_offdiag: Option<f64>,
    pub gram_diag_dev: Option<f64>,
    pub algebras_equal: bool,
    pub verdict: Verdict,
    pub reasons: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyTolerances {
    pub residual: f64,
    pub gram: f64,
    /// accepted oracle remainder when the inputs are not exact rationals
    pub oracle: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        Self { residual: 1e-9, gram: 1e-10, oracle: 1e-9 }
    }
}

fn close(a: &Rational, b: &Rational, exact: bool, tol: f64) -> bool {
    if exact {
        return a == b;
    }
    let scale = abs_f64(a).max(abs_f64(b)).max(1.0);
    abs_f64(&(a - b)) <= tol * scale
}

/// Oracle comparison of a solution's Q family against the coefficients
/// derived from the linear relation. Returns the rows and a failure message.
pub fn oracle_compare(
    p: &PeriodicRecurrence,
    sol: &LiftSolution,
    n_max: usize,
    inexact_tol: f64,
) -> (Vec<OracleRow>, Option<String>) {
    let exact = p.is_exact() && sol.exact;
    let tol = if exact {
        0.0
    } else if p.is_exact() {
        crate::numeric::high_precision_threshold(crate::numeric::working_digits())
    } else {
        inexact_tol
    };
    let head = (&sol.beta_tilde[0], &sol.beta_tilde[1]);
    let out = if exact {
        exact_recurrence_oracle(p, &sol.a1, &sol.a2, head, n_max)
    } else {
        tolerant_recurrence_oracle(p, &sol.a1, &sol.a2, head, n_max, tol)
    };
    let out = match out {
        Ok(o) => o,
        Err(e) => return (Vec::new(), Some(e.to_string())),
    };
    let mut rows = Vec::with_capacity(n_max + 1);
    let mut failure = None;
    for n in 0..=n_max {
        let beta_ok = close(&out.beta[n], sol.q_family.beta(n), exact, tol);
        let gamma_ok = match out.gamma_at(n) {
            Some(g) => close(g, p.gamma(n).expect("n >= 1"), exact, tol),
            None => true,
        };
        if failure.is_none() && !(beta_ok && gamma_ok) {
            failure = Some(if gamma_ok {
                format!("oracle beta~_{n} = {} differs from the solution's", format_rational(&out.beta[n]))
            } else {
                format!(
                    "oracle gamma~_{n} = {} differs from gamma_{n}",
                    format_rational(out.gamma_at(n).expect("present"))
                )
            });
        }
        rows.push(OracleRow {
            n,
            beta: format_rational(&out.beta[n]),
            gamma: out.gamma_at(n).map(format_rational),
            matches: beta_ok && gamma_ok,
        });
    }
    (rows, failure)
}

pub fn verify_solution(p: &PeriodicRecurrence, sol: &LiftSolution, id: usize, tol: &VerifyTolerances) -> VerificationReport {
    let mut reasons = Vec::new();
    let (rows, failure) = oracle_compare(p, sol, ORACLE_DEGREE, tol.oracle);
    if let Some(f) = &failure {
        reasons.push(f.clone());
    }
    let residual = linear_relation_residual(p, sol, RESIDUAL_DEGREE, SAMPLE_COUNT);
    if !(residual <= tol.residual) {
        reasons.push(format!("linear relation residual {residual:e} exceeds {:e}", tol.residual));
    }
    let gram = if sol.q_family.is_positive() { quadrature_orthogonality(&sol.q_family, GRAM_DEGREE).ok() } else { None };
    if let Some(g) = gram {
        if !(g.offdiag <= tol.gram && g.diag_dev <= tol.gram) {
            reasons.push(format!("Gram matrix off by {:e} (off-diagonal) / {:e} (diagonal)", g.offdiag, g.diag_dev));
        }
    }
    let equal = algebras_equal(p, &sol.q_family);
    if !equal {
        reasons.push("gamma sequences of P and Q differ".into());
    }
    VerificationReport {
        solution: id,
        case: sol.case.to_string(),
        residual,
        oracle_match: failure.is_none(),
        oracle_recurrence: rows,
        gram_offdiag: gram.map(|g| g.offdiag),
        gram_diag_dev: gram.map(|g| g.diag_dev),
        algebras_equal: equal,
        verdict: if reasons.is_empty() { Verdict::Pass } else { Verdict::Fail },
        reasons,
    }
}

/// Verifies each solution independently; reports keep the input order.
pub fn verify_all(p: &PeriodicRecurrence, sols: &[LiftSolution], tol: &VerifyTolerances) -> Vec<VerificationReport> {
    sols.par_iter().enumerate().map(|(i, s)| verify_solution(p, s, i, tol)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub holds: bool,
    /// first index at which the condition fails
    pub first_failure: Option<usize>,
}

impl ConditionCheck {
    fn scan(range: impl IntoIterator<Item = usize>, mut ok: impl FnMut(usize) -> bool) -> Self {
        let first_failure = range.into_iter().find(|&n| !ok(n));
        Self { holds: first_failure.is_none(), first_failure }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Alternative {
    /// `a_1 = 0`
    A,
    /// `a_1 != 0`, `β_n = β_k` for `n >= k`
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KGeneralReport {
    pub k: usize,
    pub checked_through: usize,
    pub alternative: Alternative,
    pub alternative_holds: ConditionCheck,
    /// `γ̃_n = γ_n`, read off the relation-generated `Q_n`, `n >= k+2`
    pub condition1: ConditionCheck,
    /// `a_k != 0` and `γ_n != 0`
    pub condition2: ConditionCheck,
    /// `β̃_n = β_n` and `γ_n + a_1(β_{n-1} - β_n) != 0`
    pub condition3: ConditionCheck,
    /// `γ_n - γ_{n-k} = a_1(β_{n-1} - β_n)`, `n >= k+2`
    pub condition4: ConditionCheck,
    pub gamma_periodic: ConditionCheck,
    /// whether the derived `γ̃_n` also equals `γ_n + a_1(β_{n-1} - β_n)`
    pub conditions_1_and_3_agree: bool,
}

impl KGeneralReport {
    pub fn all_pass(&self) -> bool {
        self.condition1.holds && self.condition2.holds && self.condition3.holds && self.condition4.holds && self.alternative_holds.holds
    }
}

/// Checks the necessary conditions for `Q_n = P_n + a_1 P_{n-1} + … + a_k P_{n-k}`
/// to share the oscillator algebra of `P`, on indices up to `3k + 4`.
/// Coefficients of Q are derived only where `Q_{n-1}, Q_n, Q_{n+1}` all come
/// from the relation, so the head of Q is not needed.
pub fn k_general_constraints(p: &PeriodicRecurrence, a: &[Rational], k: usize) -> Result<KGeneralReport> {
    if k == 0 || a.len() != k {
        return Err(Error::ParameterDomain(format!("need k >= 1 coefficients a_1..a_k, got k = {k}, {} values", a.len())));
    }
    if a[k - 1].is_zero() {
        return Err(Error::ZeroA2);
    }
    let top = 3 * k + 4;
    let ps = p.monic_polys(top + 1);
    let q = |n: usize| -> Poly {
        let mut out = ps[n].clone();
        for (j, aj) in a.iter().enumerate() {
            out = &out + &ps[n - j - 1].scale(aj);
        }
        out
    };
    let a1 = &a[0];
    let g = |n: usize| p.gamma(n).expect("n >= 1").clone();
    let drop_term = |n: usize| a1 * (p.beta(n - 1) - p.beta(n));

    let mut derived: Vec<Option<(Rational, Rational)>> = vec![None; top + 1];
    for (n, slot) in derived.iter_mut().enumerate().skip(k + 2) {
        let (qm, qn, qp) = (q(n - 1), q(n), q(n + 1));
        let r = &qn.shift_up() - &qp;
        let b = r.coeff(n);
        let rest = &r - &qn.scale(&b);
        let gm = rest.coeff(n - 1);
        if (&rest - &qm.scale(&gm)).is_zero() {
            *slot = Some((b, gm));
        }
    }

    let condition1 = ConditionCheck::scan(k + 2..=top, |n| derived[n].as_ref().is_some_and(|(_, gt)| *gt == g(n)));
    let condition2 = ConditionCheck::scan(1..=top, |n| !g(n).is_zero());
    let condition3 = ConditionCheck::scan(k + 1..=top, |n| {
        let beta_ok = derived[n].as_ref().map_or(n < k + 2, |(bt, _)| bt == p.beta(n));
        beta_ok && !(g(n) + drop_term(n)).is_zero()
    });
    let condition4 = ConditionCheck::scan(k + 2..=top, |n| g(n) - g(n - k) == drop_term(n));
    let gamma_periodic = ConditionCheck::scan(k + 2..=top, |n| g(n) == g(n - k));
    let conditions_1_and_3_agree = (k + 2..=top).all(|n| derived[n].as_ref().is_some_and(|(_, gt)| *gt == g(n) + drop_term(n)));
    let (alternative, alternative_holds) = if a1.is_zero() {
        (Alternative::A, ConditionCheck { holds: true, first_failure: None })
    } else {
        (Alternative::B, ConditionCheck::scan(k..=top, |n| p.beta(n) == p.beta(k)))
    };
    Ok(KGeneralReport {
        k,
        checked_through: top,
        alternative,
        alternative_holds,
        condition1,
        condition2,
        condition3,
        condition4,
        gamma_periodic,
        conditions_1_and_3_agree,
    })
}

/// Number of zero/nonzero patterns of `a_1..a_{k-1}` with `a_k != 0`.
pub fn variant_count(k: usize) -> Result<u64> {
    match k {
        0 => Err(Error::ParameterDomain("period k must be at least 1".into())),
        1..=64 => Ok(1u64 << (k - 1)),
        _ => Err(Error::ParameterDomain(format!("2^(k-1) overflows for k = {k}"))),
    }
}
