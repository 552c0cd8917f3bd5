//! Exact rational helpers shared by the recurrence, lift and oracle code.
//!
//! Every coefficient is stored as a [`Rational`]. Finite `f64` values are
//! dyadic rationals, so converting them is lossless; the conversion back to
//! `f64` rounds to nearest.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Lossless conversion of a finite float.
pub fn from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::NonRational(format!("{x} is not finite")))
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn abs_f64(x: &Rational) -> f64 {
    to_f64(x).abs()
}

/// Parses `"p/q"`, an integer, or an exact decimal such as `"-1.25e-3"`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
        let q: BigInt = q.trim().parse().map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("not a number: {s:?}"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("{int_part}{frac_part}0").parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32 - 1;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(all);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if neg { -value } else { value })
}

/// `"p/q"` (or `"p"` for integers).
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Shortest decimal that round-trips through `f64`.
pub fn format_decimal(x: &Rational) -> String {
    format!("{:?}", to_f64(x))
}

/// Simplest rational within `rel_tol` of `x` whose denominator does not
/// exceed `max_den`, found from the continued-fraction convergents.
pub fn snap(x: f64, max_den: u64, rel_tol: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let exact = from_f64(x).ok()?;
    let tol = rel_tol * x.abs().max(f64::MIN_POSITIVE);
    for conv in convergents(&exact).take(64) {
        if conv.denom() > &BigInt::from(max_den) {
            break;
        }
        if (to_f64(&conv) - x).abs() <= tol {
            return Some(conv);
        }
    }
    None
}

/// Continued-fraction convergents of an exact rational.
pub fn convergents(x: &Rational) -> impl Iterator<Item = Rational> {
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    std::iter::from_fn(move || {
        if den.is_zero() {
            return None;
        }
        let (a, r) = num.div_mod_floor(&den);
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        num = std::mem::replace(&mut den, r);
        Some(Rational::new(h.clone(), k.clone()))
    })
}

/// Equality decision for case routing: exact for exact-input families,
/// relative tolerance otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Router {
    pub exact: bool,
    pub eps: f64,
}

impl Router {
    pub fn new(exact: bool, eps: f64) -> Self {
        Self { exact, eps }
    }

    pub fn eq(&self, a: &Rational, b: &Rational) -> bool {
        if self.exact {
            return a == b;
        }
        let (x, y) = (to_f64(a), to_f64(b));
        (x - y).abs() <= self.eps * x.abs().max(y.abs()).max(1.0)
    }

    pub fn is_zero(&self, a: &Rational, scale: f64) -> bool {
        if self.exact {
            return a.is_zero();
        }
        abs_f64(a) <= self.eps * scale.max(1.0)
    }
}

/// Magnitude of `x` relative to `scale`, used for high-precision residual tests.
pub fn relative(x: &Rational, scale: &Rational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let s = if scale.is_zero() { Rational::one() } else { scale.abs() };
    to_f64(&(x.abs() / s))
}

/// Rounds `x` to a dyadic rational with `bits` fractional bits. Keeps the
/// size of refined roots bounded.
pub fn round_dyadic(x: &Rational, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = x * Rational::from_integer(scale.clone());
    Rational::new(scaled.round().to_integer(), scale)
}
