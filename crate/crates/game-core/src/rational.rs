//! Exact rational arithmetic and the `"p/q"` exchange form.
//!
//! All probabilities and payoffs in this workspace are arbitrary-precision
//! rationals; nothing on a decision path ever goes through floating point.
//! [`Rational`] is `num`'s `BigRational`, which maintains the canonical form
//! we rely on everywhere (numerator and denominator coprime, denominator
//! positive), so two equal values always compare and render identically.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational number in canonical form (gcd 1, positive denominator).
pub type Rational = BigRational;

/// Shorthand constructor from machine integers, mostly for tests and
/// literal probabilities. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RationalParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal '{0}' (expected 'p' or 'p/q')")]
    Malformed(String),
    #[error("zero denominator in rational literal '{0}'")]
    ZeroDenominator(String),
}

/// Parses the exchange form: an optionally signed integer `p`, or `p/q`.
///
/// The result is canonical regardless of how the input was written
/// (`"2/4"` parses to the same value as `"1/2"`).
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(RationalParseError::Empty);
    }
    let mut parts = s.splitn(2, '/');
    let num_part = parts.next().unwrap().trim();
    let den_part = parts.next().map(str::trim);
    let num: BigInt = num_part
        .parse()
        .map_err(|_| RationalParseError::Malformed(text.to_owned()))?;
    let den: BigInt = match den_part {
        None => BigInt::one(),
        Some(d) => d
            .parse()
            .map_err(|_| RationalParseError::Malformed(text.to_owned()))?,
    };
    if den.is_zero() {
        return Err(RationalParseError::ZeroDenominator(text.to_owned()));
    }
    Ok(Rational::new(num, den))
}

/// Renders in the exchange form: `"p"` when the denominator is 1, `"p/q"`
/// otherwise. Inverse of [`parse_rational`] on canonical output.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// True iff `r` lies in the closed unit interval.
pub fn in_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}
