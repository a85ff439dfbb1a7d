//! Exact rational helpers shared by the spline, kernel and CLI layers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use num_rational::BigRational as Rational;

/// Maximum number of fractional digits accepted in decimal rational literals.
pub const MAX_DECIMAL_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational `{text}` at position {position}")]
    Malformed { text: String, position: usize },
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("`{text}` has {digits} fractional digits (at most {MAX_DECIMAL_DIGITS} allowed)")]
    TooManyDigits { text: String, digits: usize },
}

/// Builds `num/den` in lowest terms. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_f64(q: &Rational) -> f64 {
    // BigRational::to_f64 rounds correctly even when numerator and
    // denominator individually overflow f64.
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact rational value of a finite float.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn floor_to_i64(q: &Rational) -> i64 {
    q.floor().to_integer().to_i64().expect("rational out of i64 range")
}

/// Reduces `q` modulo one into `[0, 1)`.
pub fn fract_unit(q: &Rational) -> Rational {
    q - q.floor()
}

/// Least common multiple of two positive rationals: the smallest positive
/// rational that is an integer multiple of both.
pub fn lcm(a: &Rational, b: &Rational) -> Rational {
    let num = a.numer().lcm(b.numer());
    let den = a.denom().gcd(b.denom());
    Rational::new(num, den)
}

/// Parses `p/q`, an integer, or a decimal with at most twelve fractional
/// digits. Decimals are converted exactly (`0.1` is `1/10`).
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(RationalParseError::Empty);
    }
    let malformed = |position: usize| RationalParseError::Malformed {
        text: s.to_string(),
        position,
    };
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_integer(num.trim()).ok_or_else(|| malformed(0))?;
        let d = parse_integer(den.trim()).ok_or_else(|| malformed(num.len() + 1))?;
        if d.is_zero() {
            return Err(RationalParseError::ZeroDenominator(s.to_string()));
        }
        return Ok(Rational::new(n, d));
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let offset = s.len() - body.len();
    let (whole, frac) = match body.split_once('.') {
        Some((w, f)) => (w, f),
        None => (body, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return Err(malformed(offset));
    }
    if let Some(i) = whole.find(|c: char| !c.is_ascii_digit()) {
        return Err(malformed(offset + i));
    }
    if let Some(i) = frac.find(|c: char| !c.is_ascii_digit()) {
        return Err(malformed(offset + whole.len() + 1 + i));
    }
    if frac.len() > MAX_DECIMAL_DIGITS {
        return Err(RationalParseError::TooManyDigits {
            text: s.to_string(),
            digits: frac.len(),
        });
    }
    let digits = format!("{whole}{frac}");
    let mut num: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| malformed(offset))?
    };
    if negative {
        num = -num;
    }
    let den = BigInt::from(10u32).pow(frac.len() as u32);
    Ok(Rational::new(num, den))
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Always renders as `p/q`, including integers (`1/1`).
pub struct PQ<'a>(pub &'a Rational);

impl fmt::Display for PQ<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

pub fn pq(q: &Rational) -> String {
    PQ(q).to_string()
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}
