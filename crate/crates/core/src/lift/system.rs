//! The head equations of a lift, written as polynomials in one unknown.
//!
//! With `c = (a_1 γ_2 + a_2(β_1 - β_3))/γ_3` and `d = a_2 γ_1/γ_3`, the
//! relation forces `Q_2 = P_2 + c P_1 + d`. Matching the Q recurrence at
//! `n = 1, 2` then gives
//!
//! ```text
//! β̃_2 = β_2 + c - a_1
//! C   = c γ_1 + d(β_0 - β̃_2)
//! β̃_0 = β_0 - C/γ_2,   β̃_1 = β_1 - c + C/γ_2
//! E_1 = c(β_1 - β̃_2) + d - a_2                 = 0
//! E_2 = β̃_0 β̃_1 - β_0 β_1 + c β_0 - d          = 0
//! ```
//!
//! and, for `a_1 != 0`, a constant tail `β_2 = β_3`, `γ_2 = γ_3`.

use num_traits::One;

use crate::poly::Poly;
use crate::rational::{int, ratio, Rational};
use crate::recurrence::PeriodicRecurrence;

fn k(c: &Rational) -> Poly {
    Poly::constant(c.clone())
}

/// Every head quantity as a polynomial in the unknown `v`, which is `w`
/// (or `w_λ`) when `β_1 != β_3` and `a_1` itself otherwise.
#[derive(Debug, Clone)]
pub(crate) struct HeadSystem {
    pub a1: Poly,
    pub a2: Poly,
    pub w: Poly,
    #[cfg_attr(not(test), allow(dead_code))]
    pub c: Poly,
    pub big_c: Poly,
    pub t0: Poly,
    pub t1: Poly,
    pub t2: Poly,
    pub e1: Poly,
    pub e2: Poly,
}

impl HeadSystem {
    /// `a_2 = κ a_1²`; `a_1 = (s_3 w + s_2)/κ` when `distinct`, else `a_1 = v`.
    pub fn new(p: &PeriodicRecurrence, kappa: &Rational, distinct: bool) -> Self {
        let b: Vec<&Rational> = (0..4).map(|n| p.beta(n)).collect();
        let g: Vec<&Rational> = (1..4).map(|n| p.gamma(n).expect("n >= 1")).collect();
        let (a1, w) = if distinct {
            let l = Rational::one() / kappa;
            let s2 = g[1] / (b[3] - b[1]);
            let s3 = g[2] / (b[3] - b[1]);
            (Poly::new(vec![&l * s2, &l * s3]), Poly::x())
        } else {
            (Poly::x(), k(&(-(g[1] / g[2]))))
        };
        let a2 = (&a1 * &a1).scale(kappa);
        let inv_g3 = Rational::one() / g[2];
        let c = (&a1.scale(g[1]) + &a2.scale(&(b[1] - b[3]))).scale(&inv_g3);
        let d = a2.scale(&(g[0] * &inv_g3));
        let t2 = &(&k(b[2]) + &c) - &a1;
        let big_c = &c.scale(g[0]) + &(&d * &(&k(b[0]) - &t2));
        let shift = big_c.scale(&(Rational::one() / g[1]));
        let t0 = &k(b[0]) - &shift;
        let t1 = &(&k(b[1]) - &c) + &shift;
        let e1 = &(&(&c * &(&k(b[1]) - &t2)) + &d) - &a2;
        let e2 = &(&(&(&t0 * &t1) - &k(&(b[0] * b[1]))) + &c.scale(b[0])) - &d;
        Self { a1, a2, w, c, big_c, t0, t1, t2, e1, e2 }
    }
}

/// `s_1`, and `s_2, s_3` when `β_1 != β_3`.
pub(crate) fn s_values(p: &PeriodicRecurrence) -> (Rational, Option<(Rational, Rational)>) {
    let (b1, b2, b3) = (p.beta(1), p.beta(2), p.beta(3));
    let (g1, g2, g3) = (p.gamma(1).unwrap(), p.gamma(2).unwrap(), p.gamma(3).unwrap());
    let s1 = (g3 - g1 - (b2 - b1) * (b3 - b1)) / g3;
    if b3 == b1 {
        return (s1, None);
    }
    (s1, Some((g2 / (b3 - b1), g3 / (b3 - b1))))
}

fn tail_constant_term(p: &PeriodicRecurrence, s1: &Rational, s2: &Rational) -> Rational {
    let ratio_g = p.gamma(2).unwrap() / p.gamma(3).unwrap();
    s1 * s2 + ratio_g * (p.beta(2) - p.beta(1))
}

/// The Case III quartic exactly as printed:
/// `16s_3²w⁴ + 32s_2s_3w³ + (16s_2² + 4s_3²)w² + (4s_2 + s_1s_3)w + s_1s_2 + (γ_2/γ_3)(β_2 - β_1)`.
pub(crate) fn paper_case_iii_quartic(p: &PeriodicRecurrence) -> Option<Poly> {
    let (s1, Some((s2, s3))) = s_values(p) else { return None };
    Some(Poly::new(vec![
        tail_constant_term(p, &s1, &s2),
        int(4) * &s2 + &s1 * &s3,
        int(16) * &s2 * &s2 + int(4) * &s3 * &s3,
        int(32) * &s2 * &s3,
        int(16) * &s3 * &s3,
    ]))
}

/// The printed λ-quartic with `L = (1+λ)²/λ`:
/// `L²s_3²w⁴ + 2Ls_2s_3w³ + (L²s_2² + Ls_3)w² + (Ls_2 + s_1s_3)w + s_1s_2 + (γ_2/γ_3)(β_2 - β_1)`.
pub(crate) fn paper_lambda_quartic(p: &PeriodicRecurrence, l: &Rational) -> Option<Poly> {
    let (s1, Some((s2, s3))) = s_values(p) else { return None };
    let l2 = l * l;
    Some(Poly::new(vec![
        tail_constant_term(p, &s1, &s2),
        l * &s2 + &s1 * &s3,
        &l2 * &s2 * &s2 + l * &s3,
        int(2) * l * &s2 * &s3,
        &l2 * &s3 * &s3,
    ]))
}

/// The printed quadratic in `a_1` for `β_1 = β_3`:
/// `(γ_2²/γ_3²)a_1² - a_1[γ_2/γ_3 + κ(γ_1/γ_3 - 1)] + (γ_2/γ_3)(β_2 - β_1)`.
/// At `κ = 1/4` this is the Case IV display.
pub(crate) fn paper_a1_quadratic(p: &PeriodicRecurrence, kappa: &Rational) -> Poly {
    let (g1, g2, g3) = (p.gamma(1).unwrap(), p.gamma(2).unwrap(), p.gamma(3).unwrap());
    let r = g2 / g3;
    Poly::new(vec![
        &r * (p.beta(2) - p.beta(1)),
        -(&r + kappa * (g1 / g3 - int(1))),
        &r * &r,
    ])
}

/// The Case IV display with its own constants, `γ_1/(4γ_3) - 1/4`.
pub(crate) fn paper_case_iv_quadratic(p: &PeriodicRecurrence) -> Poly {
    let (g1, g2, g3) = (p.gamma(1).unwrap(), p.gamma(2).unwrap(), p.gamma(3).unwrap());
    let r = g2 / g3;
    Poly::new(vec![
        &r * (p.beta(2) - p.beta(1)),
        -(&r + g1 / (int(4) * g3) - ratio(1, 4)),
        &r * &r,
    ])
}

/// Printed `C` with its `β_0` factor left to the caller: the Case III form
/// uses `4w³ + 4w + 1`, the λ form uses `L(w² + w) + 1`.
pub(crate) fn paper_c(p: &PeriodicRecurrence, w: &Rational, a1: &Rational, a2: &Rational, beta0_factor: &Rational) -> Rational {
    let (b0, b1, b2) = (p.beta(0), p.beta(1), p.beta(2));
    let (g1, g3) = (p.gamma(1).unwrap(), p.gamma(3).unwrap());
    let bracket = -(g1 / g3) * (b2 - a1 * (w + int(1))) + b0 * beta0_factor;
    a2 * bracket - a1 * w * (b0 * (b1 + b2) + g1)
}

pub(crate) fn case_iii_beta0_factor(w: &Rational) -> Rational {
    int(4) * w * w * w + int(4) * w + int(1)
}

pub(crate) fn lambda_beta0_factor(w: &Rational, l: &Rational) -> Rational {
    l * (w * w + w) + int(1)
}

/// `C` from the reduced system for a given `w`, `a_1`, `a_2`:
/// `a_2[-(γ_1/γ_3)(β_2 - a_1(w+1)) + β_0 γ_1/γ_3] - a_1 w γ_1`.
#[cfg(test)]
pub(crate) fn reduced_c(p: &PeriodicRecurrence, w: &Rational, a1: &Rational, a2: &Rational) -> Rational {
    let (b0, b2) = (p.beta(0), p.beta(2));
    let (g1, g3) = (p.gamma(1).unwrap(), p.gamma(3).unwrap());
    let r = g1 / g3;
    a2 * (-(&r) * (b2 - a1 * (w + int(1))) + b0 * &r) - a1 * w * g1
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::recurrence::Definiteness;

    fn fam(beta: [Rational; 4], gamma: [Rational; 3]) -> PeriodicRecurrence {
        PeriodicRecurrence::k2(beta, gamma, Definiteness::Positive).unwrap()
    }

    #[test]
    fn reduced_c_matches_system() {
        let p = fam([int(1), ratio(1, 3), int(2), int(2)], [ratio(5, 2), int(3), int(3)]);
        let kappa = ratio(2, 9);
        let sys = HeadSystem::new(&p, &kappa, true);
        for w in [ratio(-3, 2), int(0), ratio(7, 5)] {
            let a1 = sys.a1.eval(&w);
            let a2 = sys.a2.eval(&w);
            assert_eq!(sys.big_c.eval(&w), reduced_c(&p, &w, &a1, &a2));
            assert_eq!(sys.c.eval(&w), -(&a1 * &w));
            assert_eq!(sys.t2.eval(&w), p.beta(2) - &a1 * (&w + int(1)));
        }
    }

    #[test]
    fn verified_quartic_has_the_a1_factor() {
        let p = fam([int(0), int(1), int(-1), int(-1)], [int(2), int(1), int(1)]);
        let sys = HeadSystem::new(&p, &ratio(1, 4), true);
        assert_eq!(sys.e1.degree(), Some(4));
        let (_, r) = sys.e1.div_rem(&sys.a1);
        assert!(r.is_zero());
    }

    #[test]
    fn lambda_quadratic_at_quarter_is_case_iv() {
        let p = fam([int(0), int(1), int(3), int(1)], [int(2), int(5), int(7)]);
        assert_eq!(paper_a1_quadratic(&p, &ratio(1, 4)), paper_case_iv_quadratic(&p));
    }
}
