//! Exact-number helpers: rational parsing and tolerance-aware comparison.

use crate::error::{Error, Result};
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive};

/// Relative comparison tolerance used for inexact (f64) scale arithmetic.
pub const REL_TOL: f64 = 1e-12;

/// Tolerance scaled to the magnitude of the reference value.
pub fn tol_at(reference: f64) -> f64 {
    REL_TOL * reference.abs().max(1.0)
}

/// Equality within the relative tolerance anchored at the larger magnitude.
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= tol_at(a.abs().max(b.abs()))
}

/// Parses `p/q`, an integer, or a finite decimal into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational64> {
    let text = text.trim();
    let bad = || Error::InvalidArgument(format!("cannot parse `{text}` as a rational number"));
    if text.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = text.split_once('/') {
        let p: i64 = num.trim().parse().map_err(|_| bad())?;
        let q: i64 = den.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(p, q));
    }
    if let Some((int_part, frac_part)) = text.split_once('.') {
        let negative = int_part.trim_start().starts_with('-');
        let whole: i64 = if int_part.is_empty() || int_part == "-" || int_part == "+" {
            0
        } else {
            int_part.parse().map_err(|_| bad())?
        };
        if frac_part.is_empty() {
            return Ok(Rational64::from_integer(whole));
        }
        if !frac_part.bytes().all(|b| b.is_ascii_digit()) || frac_part.len() > 15 {
            return Err(bad());
        }
        let digits: i64 = frac_part.parse().map_err(|_| bad())?;
        let scale = 10i64.pow(frac_part.len() as u32);
        let frac = Rational64::new(digits, scale);
        let whole = Rational64::from_integer(whole);
        return Ok(if negative { whole - frac } else { whole + frac });
    }
    let int: i64 = text.parse().map_err(|_| bad())?;
    Ok(Rational64::from_integer(int))
}

/// Parses a real number given as a decimal or an exact `p/q` rational.
pub fn parse_real(text: &str) -> Result<f64> {
    if let Ok(r) = parse_rational(text) {
        return Ok(rat_to_f64(r));
    }
    text.trim()
        .parse::<f64>()
        .map_err(|_| Error::InvalidArgument(format!("cannot parse `{text}` as a number")))
}

pub fn rat_to_f64(r: Rational64) -> f64 {
    r.to_f64()
        .unwrap_or_else(|| *r.numer() as f64 / *r.denom() as f64)
}

/// Signed rational power with odd-root semantics, shared by the expression
/// evaluator. `x^(p/q)` is real for negative `x` only when `q` is odd.
pub fn rational_pow(x: f64, exp: Rational64) -> Result<f64> {
    let exp = exp.reduced();
    let p = *exp.numer();
    let q = *exp.denom();
    debug_assert!(q > 0);
    if x == 0.0 {
        if exp.is_negative() {
            return Err(Error::DivisionByZero(0.0));
        }
        return Ok(if p == 0 { 1.0 } else { 0.0 });
    }
    if x > 0.0 {
        return Ok(x.powf(rat_to_f64(exp)));
    }
    if q % 2 == 0 {
        return Err(Error::NegativeBaseUndefined(x));
    }
    // Odd real root: sign survives the root, the integer power decides parity.
    let magnitude = x.abs().powf(rat_to_f64(exp));
    Ok(if p % 2 == 0 { magnitude } else { -magnitude })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/3").unwrap(), Rational64::new(1, 3));
        assert_eq!(parse_rational("0.25").unwrap(), Rational64::new(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), Rational64::new(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), Rational64::from_integer(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn rational_pow_odd_roots() {
        assert_eq!(rational_pow(8.0, Rational64::new(1, 3)).unwrap(), 2.0);
        assert_eq!(rational_pow(-8.0, Rational64::new(1, 3)).unwrap(), -2.0);
        let v = rational_pow(-8.0, Rational64::new(2, 3)).unwrap();
        assert!((v - 4.0).abs() <= 1e-12 * 4.0);
        assert!(rational_pow(-4.0, Rational64::new(1, 2)).is_err());
        assert_eq!(rational_pow(-2.0, Rational64::new(3, 1)).unwrap(), -8.0);
    }
}
