//! Exact certificate for lifts whose parameter is an irrational root.
//!
//! Such a candidate is a root `v` of the square-free defining polynomial
//! `F`. The oracle is rerun with coefficients in `Q[v]`: every remainder and
//! every coefficient mismatch becomes a polynomial in `v`, and the lift is
//! genuine iff all of them vanish at `v`. That holds iff `v` is still a root
//! of their running gcd with `F`, which a Sturm count on an interval
//! isolating `v` decides exactly.

use num_traits::{One, Signed};
use serde::Serialize;

use super::system::HeadSystem;
use super::{LiftSolution, Transcription};
use crate::error::{Error, Result};
use crate::numeric::sturm_count;
use crate::oracle::oracle_compare;
use crate::poly::Poly;
use crate::rational::Rational;
use crate::recurrence::PeriodicRecurrence;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub holds: bool,
    /// the root was irrational and the check ran in `Q[v]`
    pub algebraic: bool,
    /// degree of the factor of `F` that every condition shares; 0 on failure
    pub factor_degree: usize,
    pub failure: Option<String>,
}

/// Polynomial in `x` with coefficients in `Q[v]`, stored lowest degree first.
type KPoly = Vec<Poly>;

struct Field {
    modulus: Poly,
}

impl Field {
    fn reduce(&self, a: &Poly) -> Poly {
        a.div_rem(&self.modulus).1
    }

    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.reduce(&(a * b))
    }

    /// Narrows the modulus to the part where `c` vanishes.
    fn impose(&mut self, c: &Poly) {
        let c = self.reduce(c);
        if !c.is_zero() {
            self.modulus = self.modulus.gcd(&c);
        }
    }

    fn alive(&self) -> bool {
        self.modulus.degree().unwrap_or(0) > 0
    }
}

fn constant(c: &Rational) -> Poly {
    Poly::constant(c.clone())
}

fn lift_rational(p: &Poly) -> KPoly {
    p.coeffs().iter().map(constant).collect()
}

fn coeff(p: &KPoly, i: usize) -> Poly {
    p.get(i).cloned().unwrap_or_else(Poly::zero)
}

fn sub(a: &KPoly, b: &KPoly) -> KPoly {
    (0..a.len().max(b.len())).map(|i| &coeff(a, i) - &coeff(b, i)).collect()
}

fn add(a: &KPoly, b: &KPoly) -> KPoly {
    (0..a.len().max(b.len())).map(|i| &coeff(a, i) + &coeff(b, i)).collect()
}

fn scale(k: &Field, a: &KPoly, c: &Poly) -> KPoly {
    a.iter().map(|x| k.mul(x, c)).collect()
}

fn shift_up(a: &KPoly) -> KPoly {
    let mut out = vec![Poly::zero()];
    out.extend(a.iter().cloned());
    out
}

/// Decides whether `sol` is an exact lift of `p`: through the rational oracle
/// when the solution is rational, in `Q[v]` otherwise.
pub fn certify_exact(p: &PeriodicRecurrence, sol: &LiftSolution, n_max: usize) -> Result<Certificate> {
    if !p.is_exact() {
        return Err(Error::NonRational("an exact certificate needs a family with rational coefficients".into()));
    }
    if sol.exact {
        let (_, failure) = oracle_compare(p, sol, n_max, 0.0);
        return Ok(Certificate { holds: failure.is_none(), algebraic: false, factor_degree: 1, failure });
    }
    if sol.transcription != Transcription::Verified {
        return Err(Error::WrongCase("irrational paper-literal candidates have no algebraic certificate".into()));
    }
    let (Some(kappa), Some(v)) = (&sol.constants.kappa, &sol.root) else {
        return Err(Error::WrongCase(format!("case {} solution carries no root to certify", sol.case)));
    };
    let distinct = p.beta(1) != p.beta(3);
    let sys = HeadSystem::new(p, kappa, distinct);
    let f = if sys.e1.is_zero() { sys.e2.clone() } else { sys.e1.clone() };
    if f.is_zero() {
        return Err(Error::WrongCase("defining polynomial vanishes identically".into()));
    }
    let f = f.square_free();
    let delta = Rational::new(1.into(), num_traits::pow(num_bigint::BigInt::from(10), 40)) * (Rational::one() + v.abs());
    let (lo, hi) = (v - &delta, v + &delta);
    if sturm_count(&f, &lo, &hi) != 1 {
        return Err(Error::Oracle { degree: 0, detail: "root is not isolated at 1e-40".into() });
    }

    let mut k = Field { modulus: f };
    k.impose(&sys.e2);
    let fail = |k: &Field, n: usize, what: &str| Certificate {
        holds: false,
        algebraic: true,
        factor_degree: k.modulus.degree().unwrap_or(0),
        failure: Some(format!("{what} does not vanish at the root (degree {n})")),
    };
    if !k.alive() {
        return Ok(fail(&k, 2, "head condition E2"));
    }

    let ps = p.monic_polys(n_max + 1);
    let g1 = constant(p.gamma(1)?);
    let q1: KPoly = vec![-&sys.t0, Poly::constant(Rational::one())];
    let q2 = sub(&sub(&shift_up(&q1), &scale(&k, &q1, &sys.t1)), &vec![g1]);
    let mut qs = vec![vec![Poly::constant(Rational::one())], q1, q2];
    for n in 3..=n_max + 1 {
        let q = add(
            &add(&lift_rational(&ps[n]), &scale(&k, &lift_rational(&ps[n - 1]), &sys.a1)),
            &scale(&k, &lift_rational(&ps[n - 2]), &sys.a2),
        );
        qs.push(q);
    }
    let head = [&sys.t0, &sys.t1, &sys.t2];
    for n in 0..=n_max {
        let r = sub(&shift_up(&qs[n]), &qs[n + 1]);
        let b = k.reduce(&coeff(&r, n));
        let mut rest = sub(&r, &scale(&k, &qs[n], &b));
        let want_beta = if n < 3 { head[n].clone() } else { constant(p.beta(n)) };
        k.impose(&(&b - &want_beta));
        if n >= 1 {
            let g = k.reduce(&coeff(&rest, n - 1));
            rest = sub(&rest, &scale(&k, &qs[n - 1], &g));
            k.impose(&(&g - &constant(p.gamma(n)?)));
        }
        for c in &rest {
            k.impose(c);
        }
        if !k.alive() {
            return Ok(fail(&k, n, "oracle remainder"));
        }
    }
    let holds = sturm_count(&k.modulus, &lo, &hi) == 1;
    Ok(Certificate {
        holds,
        algebraic: true,
        factor_degree: k.modulus.degree().unwrap_or(0),
        failure: (!holds).then(|| "the surviving factor has no root at this candidate".to_string()),
    })
}
