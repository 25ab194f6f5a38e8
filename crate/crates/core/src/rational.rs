//! Exact rational helpers. Every probability and utility in the crate is a
//! [`Q`]; nothing in the forward engine touches floating point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(numer: i64, denom: i64) -> Q {
    Q::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Q {
    Q::from_integer(BigInt::from(value))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Parses `"p/q"` or a bare integer `"p"`. Rejects a zero denominator.
pub fn parse_rational(text: &str) -> Result<Q, String> {
    let text = text.trim();
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let numer: BigInt = numer
        .parse()
        .map_err(|_| format!("invalid rational numerator in {text:?}"))?;
    let denom: BigInt = denom
        .parse()
        .map_err(|_| format!("invalid rational denominator in {text:?}"))?;
    if denom.is_zero() {
        return Err(format!("zero denominator in {text:?}"));
    }
    Ok(Q::new(numer, denom))
}

/// Canonical `"p/q"` form: reduced, positive denominator, always with a slash.
pub fn format_rational(value: &Q) -> String {
    // BigRational keeps itself reduced with a positive denominator.
    format!("{}/{}", value.numer(), value.denom())
}

/// `"p/q (0.5000)"`, used by human-readable output only.
pub fn format_with_decimal(value: &Q) -> String {
    format!("{} ({:.4})", format_rational(value), to_f64(value))
}

pub fn to_f64(value: &Q) -> f64 {
    let numer = value.numer().to_f64().unwrap_or(f64::NAN);
    let denom = value.denom().to_f64().unwrap_or(f64::NAN);
    numer / denom
}

pub fn is_positive(value: &Q) -> bool {
    value.is_positive()
}

pub fn sum<'a>(values: impl IntoIterator<Item = &'a Q>) -> Q {
    values.into_iter().fold(Q::zero(), |acc, v| acc + v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse_rational("1/2").unwrap(), q(1, 2));
        assert_eq!(parse_rational("2/4").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-3").unwrap(), int(-3));
        assert_eq!(parse_rational(" 5 / 10 ").unwrap(), q(1, 2));
    }

    #[test]
    fn rejects_zero_denominator_and_garbage() {
        assert!(parse_rational("1/0").unwrap_err().contains("zero denominator"));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/2/3").is_err());
    }

    #[test]
    fn canonical_output() {
        assert_eq!(format_rational(&q(2, 4)), "1/2");
        assert_eq!(format_rational(&q(3, -6)), "-1/2");
        assert_eq!(format_rational(&int(4)), "4/1");
        assert_eq!(format_rational(&zero()), "0/1");
        assert_eq!(format_with_decimal(&q(1, 4)), "1/4 (0.2500)");
    }
}
