//! Exact rational helpers shared by every module.
//!
//! All geometry in this crate is carried out over `BigRational`; nothing in
//! the verification path ever touches a float.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed rational literal `{0}`")]
pub struct ParseRationalError(pub String);

/// Parses `p/q`, `p`, or a finite decimal such as `-1.25`.
///
/// An ASCII `-` or a Unicode minus sign (U+2212) is accepted as the sign.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let trimmed = text.trim();
    let (negative, body) = match trimmed.strip_prefix('-').or_else(|| trimmed.strip_prefix('\u{2212}')) {
        Some(rest) => (true, rest),
        None => (false, trimmed.strip_prefix('+').unwrap_or(trimmed)),
    };
    if body.is_empty() || body.starts_with(['-', '+', '\u{2212}']) {
        return Err(err());
    }
    let value = if let Some((num, den)) = body.split_once('/') {
        let num = parse_natural(num).ok_or_else(err)?;
        let den = parse_natural(den).ok_or_else(err)?;
        if den.is_zero() {
            return Err(err());
        }
        Rational::new(num, den)
    } else if let Some((int, frac)) = body.split_once('.') {
        if int.is_empty() && frac.is_empty() {
            return Err(err());
        }
        let int = if int.is_empty() { BigInt::zero() } else { parse_natural(int).ok_or_else(err)? };
        let frac_val = if frac.is_empty() { BigInt::zero() } else { parse_natural(frac).ok_or_else(err)? };
        let scale = num_traits::pow(BigInt::from(10u32), frac.len());
        Rational::new(int * &scale + frac_val, scale)
    } else {
        Rational::from_integer(parse_natural(body).ok_or_else(err)?)
    };
    Ok(if negative { -value } else { value })
}

fn parse_natural(digits: &str) -> Option<BigInt> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::parse_bytes(digits.as_bytes(), 10)
}

/// Canonical text form: `p` for integers and `p/q` otherwise, ASCII minus.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Bits in the binary expansion of a natural number, i.e. `ceil(log2(n+1))`.
pub fn natural_size(n: &BigUint) -> u64 {
    n.bits()
}

/// Sign bit plus magnitude bits.
pub fn integer_size(k: &BigInt) -> u64 {
    1 + natural_size(k.magnitude())
}

/// Numerator size plus denominator size, with the fraction in lowest terms.
pub fn rational_size(q: &Rational) -> u64 {
    // BigRational keeps itself reduced with a positive denominator.
    integer_size(q.numer()) + integer_size(q.denom())
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Truncates a decimal string (as printed by solvers, optionally ending in
/// `?`) to at most `digits` fractional digits and reads it exactly.
pub fn truncated_decimal(text: &str, digits: usize) -> Result<Rational, ParseRationalError> {
    let clean = text.trim().trim_end_matches('?');
    match clean.split_once('.') {
        Some((int, frac)) => {
            let keep = &frac[..frac.len().min(digits)];
            if keep.is_empty() {
                parse_rational(int)
            } else {
                parse_rational(&format!("{int}.{keep}"))
            }
        }
        None => parse_rational(clean),
    }
}

/// Floor of the square root of a nonnegative rational scaled to `2^-bits`
/// resolution: returns `r` with `r <= sqrt(q)` and `sqrt(q) - r < 2^-bits`.
pub fn sqrt_lower(q: &Rational, bits: u32) -> Rational {
    assert!(!q.is_negative(), "square root of a negative rational");
    let scale = BigInt::one() << bits;
    // sqrt(p/d) = sqrt(p*d)/d; scale numerator by 2^(2 bits) before taking isqrt.
    let radicand = q.numer() * q.denom() * &scale * &scale;
    let root = radicand.sqrt();
    Rational::new(root, q.denom() * scale)
}
