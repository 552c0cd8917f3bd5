//! Floating-point support: double-double accumulation, companion-matrix root
//! finding and exact refinement of real roots of rational polynomials.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::poly::Poly;
use crate::rational::{convergents, from_f64, to_f64, Rational};

/// Default number of decimal digits carried by refined roots.
pub const DEFAULT_DIGITS: u32 = 50;

/// Working precision in decimal digits; `OSCILLIFT_PRECISION` overrides it.
pub fn working_digits() -> u32 {
    std::env::var("OSCILLIFT_PRECISION")
        .ok()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .map(|d| d.clamp(20, 2000))
        .unwrap_or(DEFAULT_DIGITS)
}

/// Residual threshold matching a working precision: 1e-20 at 50 digits.
pub fn high_precision_threshold(digits: u32) -> f64 {
    10f64.powi(-((digits as i32 * 2) / 5))
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        (s, b - (s - a))
    }

    pub fn add(self, o: Self) -> Self {
        let (s, e) = Self::two_sum(self.hi, o.hi);
        let (t, f) = Self::two_sum(self.lo, o.lo);
        let (s, e) = Self::quick_two_sum(s, e + t);
        let (hi, lo) = Self::quick_two_sum(s, e + f);
        Self { hi, lo }
    }

    pub fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    pub fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = Self::quick_two_sum(p, e);
        Self { hi, lo }
    }
}

/// Real roots of `p`, ascending, from the eigenvalues of its companion
/// matrix. A root is kept when `|Im| <= imag_tol * (1 + |Re|)`.
pub fn real_roots_f64(p: &Poly, imag_tol: f64) -> Vec<f64> {
    let Some(deg) = p.degree() else { return Vec::new() };
    let coeffs = p.to_f64();
    let mut zeros = 0;
    while zeros < deg && coeffs[zeros] == 0.0 {
        zeros += 1;
    }
    let c = &coeffs[zeros..];
    let n = deg - zeros;
    let mut roots: Vec<f64> = vec![0.0; zeros.min(1)];
    match n {
        0 => {}
        1 => roots.push(-c[0] / c[1]),
        _ => {
            let lead = c[n];
            let mut m = DMatrix::<f64>::zeros(n, n);
            for i in 1..n {
                m[(i, i - 1)] = 1.0;
            }
            for i in 0..n {
                m[(i, n - 1)] = -c[i] / lead;
            }
            for z in m.complex_eigenvalues().iter() {
                if z.im.abs() <= imag_tol * (1.0 + z.re.abs()) {
                    roots.push(polish(&coeffs, z.re));
                }
            }
        }
    }
    roots.sort_by(|a, b| a.total_cmp(b));
    roots
}

fn polish(coeffs: &[f64], mut x: f64) -> f64 {
    for _ in 0..3 {
        let (mut f, mut df) = (0.0, 0.0);
        for &c in coeffs.iter().rev() {
            df = df * x + f;
            f = f * x + c;
        }
        if df == 0.0 || !f.is_finite() {
            break;
        }
        let step = f / df;
        if !step.is_finite() || step.abs() > 1e-6 * (1.0 + x.abs()) {
            break;
        }
        x -= step;
    }
    x
}

/// A real root carried exactly when rational, otherwise as a rational
/// approximation accurate to the working precision.
#[derive(Debug, Clone, PartialEq)]
pub struct RealRoot {
    pub approx: f64,
    pub value: Rational,
    pub exact: bool,
}

/// Real roots of a rational polynomial. Multiple roots are reported once.
pub fn real_roots(p: &Poly, imag_tol: f64, digits: u32) -> Vec<RealRoot> {
    let sf = p.square_free();
    let mut out: Vec<RealRoot> = Vec::new();
    for r in real_roots_f64(&sf, imag_tol) {
        let root = refine_root(&sf, r, digits);
        if out.iter().all(|o| o.value != root.value) {
            out.push(root);
        }
    }
    out.sort_by(|a, b| a.value.cmp(&b.value));
    out
}

/// Refines an approximate simple root of `p`: first looks for an exact
/// rational root among the convergents of `approx`, then bisects with exact
/// arithmetic to `digits` decimal digits.
pub fn refine_root(p: &Poly, approx: f64, digits: u32) -> RealRoot {
    let Ok(x) = from_f64(approx) else {
        return RealRoot { approx, value: Rational::zero(), exact: false };
    };
    let window = 1e-7 * (1.0 + approx.abs());
    for c in convergents(&x).take(48) {
        if (to_f64(&c) - approx).abs() > window {
            continue;
        }
        if p.eval(&c).is_zero() {
            return RealRoot { approx: to_f64(&c), value: c, exact: true };
        }
    }

    let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 8;
    let sign = |v: &Rational| p.eval(v).signum();
    let mut delta = 1e-13 * (1.0 + approx.abs());
    let bracket = loop {
        let lo = from_f64(approx - delta).expect("finite");
        let hi = from_f64(approx + delta).expect("finite");
        let (sl, sh) = (sign(&lo), sign(&hi));
        if sl.is_zero() {
            return RealRoot { approx: to_f64(&lo), value: lo, exact: true };
        }
        if sh.is_zero() {
            return RealRoot { approx: to_f64(&hi), value: hi, exact: true };
        }
        if sl != sh {
            break Some((lo, hi, sl));
        }
        delta *= 4.0;
        if delta > 1e-3 * (1.0 + approx.abs()) {
            break None;
        }
    };
    let Some((lo, hi, _)) = bracket else {
        return RealRoot { approx, value: x, exact: false };
    };
    // A rational root p/q of the primitive integer polynomial has q | L, so
    // once the bracket is narrower than 1/(2L) the only candidate is
    // round(xL)/L.
    let lead = integer_leading(p);
    let lead_bits = lead.bits() as u32;
    let bits = bits.max(lead_bits + 8 + (approx.abs() + 2.0).log2().ceil() as u32);
    let tol = Rational::new(1.into(), num_traits::pow(num_bigint::BigInt::from(10), digits as usize))
        * (Rational::from_integer(1.into()) + x.abs());
    let tol = tol.min(Rational::new(1.into(), lead.clone() * 4));
    // bisect on the grid m/2^bits, with P(m/2^b)·2^{bd} evaluated in integers
    let ints = primitive_integer(p);
    let scale = |v: &Rational| v * Rational::from_integer(BigInt::one() << bits);
    let mut lo_m = scale(&lo).floor().to_integer();
    let mut hi_m = scale(&hi).ceil().to_integer();
    let s_lo = dyadic_sign(&ints, &lo_m, bits);
    let s_hi = dyadic_sign(&ints, &hi_m, bits);
    if s_lo == 0 || s_hi == 0 || s_lo == s_hi {
        return RealRoot { approx, value: x, exact: false };
    }
    let tol_m = scale(&tol).floor().to_integer().max(BigInt::one());
    while &hi_m - &lo_m > tol_m {
        let mid: BigInt = (&lo_m + &hi_m) >> 1;
        let sm = dyadic_sign(&ints, &mid, bits);
        if sm == 0 {
            let v = Rational::new(mid, BigInt::one() << bits);
            return RealRoot { approx: to_f64(&v), value: v, exact: true };
        }
        if sm == s_lo {
            lo_m = mid;
        } else {
            hi_m = mid;
        }
    }
    let value = Rational::new((&lo_m + &hi_m) >> 1, BigInt::one() << bits);
    let lead_r = Rational::from_integer(lead.clone());
    let candidate = Rational::new((&value * &lead_r).round().to_integer(), lead);
    if candidate >= lo && candidate <= hi && p.eval(&candidate).is_zero() {
        return RealRoot { approx: to_f64(&candidate), value: candidate, exact: true };
    }
    RealRoot { approx: to_f64(&value), value, exact: false }
}

/// Coefficients of `p` scaled to a primitive integer polynomial.
fn primitive_integer(p: &Poly) -> Vec<BigInt> {
    use num_integer::Integer;
    let den = p.coeffs().iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.coeffs().iter().map(|c| (c * Rational::from_integer(den.clone())).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if content.is_zero() {
        return ints;
    }
    ints.into_iter().map(|c| c / &content).collect()
}

/// `|leading coefficient|` of `p` scaled to a primitive integer polynomial.
fn integer_leading(p: &Poly) -> BigInt {
    primitive_integer(p).last().map(|c| c.abs()).filter(|c| !c.is_zero()).unwrap_or_else(BigInt::one)
}

/// Sign of `P(m/2^b)`.
fn dyadic_sign(ints: &[BigInt], m: &BigInt, b: u32) -> i8 {
    let d = ints.len().saturating_sub(1);
    let mut acc = ints.last().cloned().unwrap_or_default();
    for i in (0..d).rev() {
        acc = acc * m + (&ints[i] << (b as usize * (d - i)));
    }
    match acc.sign() {
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
        num_bigint::Sign::Plus => 1,
    }
}

/// Number of distinct real roots of `p` in `(lo, hi]`, by Sturm's theorem.
pub fn sturm_count(p: &Poly, lo: &Rational, hi: &Rational) -> usize {
    if p.degree().unwrap_or(0) == 0 {
        return 0;
    }
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(-&r);
    }
    let changes = |x: &Rational| {
        let signs: Vec<Rational> = seq.iter().map(|q| q.eval(x).signum()).filter(|v| !v.is_zero()).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    changes(lo).saturating_sub(changes(hi))
}
