//! Exact rational numbers used for every probability in the crate.

use num_bigint::BigInt;
use num_traits::Zero;
use std::fmt;

pub use num_rational::BigRational as Rational;

/// Failure to read a probability or embedding literal exactly.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LiteralError {
    #[error("empty numeric literal")]
    Empty,
    #[error("`{0}` is not an exact literal (use `a/b` or a terminating decimal such as `0.25`)")]
    Inexact(String),
    #[error("`{0}` has a zero denominator")]
    ZeroDenominator(String),
}

/// Parses `a/b`, an integer, or a terminating decimal into an exact rational.
///
/// `0.5` and `1/2` parse to the same value. Repeating-decimal notations,
/// exponents and non-ASCII digits are rejected.
pub fn parse_rational(text: &str) -> Result<Rational, LiteralError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(LiteralError::Empty);
    }
    let inexact = || LiteralError::Inexact(s.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_integer(num.trim()).ok_or_else(inexact)?;
        let den_str = den.trim();
        if den_str.starts_with(['+', '-']) {
            return Err(inexact());
        }
        let den = parse_integer(den_str).ok_or_else(inexact)?;
        if den.is_zero() {
            return Err(LiteralError::ZeroDenominator(s.to_string()));
        }
        return Ok(Rational::new(num, den));
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(inexact());
    }
    let digits_ok = |d: &str| d.bytes().all(|b| b.is_ascii_digit());
    if !digits_ok(int_part) || !digits_ok(frac_part) || (body.contains('.') && frac_part.is_empty())
    {
        return Err(inexact());
    }
    let mut all = String::with_capacity(int_part.len() + frac_part.len());
    all.push_str(int_part);
    all.push_str(frac_part);
    let mut value: BigInt = all.parse().map_err(|_| inexact())?;
    if negative {
        value = -value;
    }
    let scale = num_traits::pow(BigInt::from(10u32), frac_part.len());
    Ok(Rational::new(value, scale))
}

fn parse_integer(s: &str) -> Option<BigInt> {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Canonical text form: `n` for integers, `n/d` otherwise (lowest terms).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Lossy conversion for display only.
pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub(crate) fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

/// Wrapper that prints a rational in canonical form.
pub struct Display<'a>(pub &'a Rational);

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(self.0))
    }
}
