use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::AlgebraError;

/// Arbitrary-precision rational, always stored in lowest terms with a
/// positive denominator.
pub type Rat = BigRational;

/// Shorthand for `p/q` as a [`Rat`]. Panics on `q == 0`.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator or denominator out of f64 range; fall back on the sign
        if r.is_zero() {
            0.0
        } else if r > &Rat::zero() {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    })
}

/// Parses `p`, `p/q`, or a decimal such as `-0.125` into an exact rational.
///
/// Decimals are converted exactly (`0.5` is `1/2`); exponents are not accepted.
pub fn parse_rational(text: &str) -> Result<Rat, AlgebraError> {
    let bad = || AlgebraError::BadRational(text.to_string());
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let value = if let Some((p, q)) = body.split_once('/') {
        let p = parse_digits(p).ok_or_else(bad)?;
        let q = parse_digits(q).ok_or_else(bad)?;
        if q.is_zero() {
            return Err(bad());
        }
        Rat::new(p, q)
    } else if let Some((int, frac)) = body.split_once('.') {
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        let int = if int.is_empty() {
            BigInt::zero()
        } else {
            parse_digits(int).ok_or_else(bad)?
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac = if frac.is_empty() {
            BigInt::zero()
        } else {
            parse_digits(frac).ok_or_else(bad)?
        };
        Rat::new(int * &scale + frac, scale)
    } else {
        Rat::from_integer(parse_digits(body).ok_or_else(bad)?)
    };
    Ok(if neg { -value } else { value })
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

pub(crate) fn is_one(r: &Rat) -> bool {
    r.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(parse_rational("0.5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("3.").unwrap(), rat(3, 1));
    }

    #[test]
    fn fractions_are_normalized() {
        let r = parse_rational("6/4").unwrap();
        assert_eq!(r, rat(3, 2));
        assert_eq!(r.to_string(), "3/2");
        assert_eq!(parse_rational("0/7").unwrap().to_string(), "0");
    }

    #[test]
    fn malformed_literals_rejected() {
        for bad in ["", "1/0", "a", "1e3", "1/-2", ".", "--1"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }
}
