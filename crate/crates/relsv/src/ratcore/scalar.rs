//! Exact rational scalars.
//!
//! The scalar type is `num_rational::BigRational`, which keeps values in
//! lowest terms with a positive denominator.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::str::FromStr;

use super::RatError;

pub type Scalar = BigRational;

pub fn q(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn big(n: BigInt) -> Scalar {
    BigRational::from_integer(n)
}

/// Integer power with a signed exponent. Zero to a negative power is an error.
pub fn pow(x: &Scalar, e: i64) -> Result<Scalar, RatError> {
    if e < 0 {
        if x.is_zero() {
            return Err(RatError::DivisionByZero);
        }
        return Ok(num_traits::pow(x.recip(), e.unsigned_abs() as usize));
    }
    Ok(num_traits::pow(x.clone(), e as usize))
}

pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Renders as "p/q", or "p" when the denominator is 1.
pub fn render(x: &Scalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse(s: &str) -> Result<Scalar, RatError> {
    let s = s.trim();
    let v = BigRational::from_str(s).map_err(|_| RatError::Parse(s.to_string()))?;
    if v.denom().is_negative() {
        return Err(RatError::Parse(s.to_string()));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_and_sign() {
        let x = q(6, -4);
        assert_eq!(x.numer(), &BigInt::from(-3));
        assert_eq!(x.denom(), &BigInt::from(2));
        assert_eq!(render(&x), "-3/2");
        assert_eq!(render(&int(7)), "7");
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["0", "-5", "7/960", "-1/24"] {
            assert_eq!(render(&parse(s).unwrap()), s);
        }
        assert_eq!(parse("4/6").unwrap(), q(2, 3));
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn signed_powers() {
        assert_eq!(pow(&q(2, 3), -2).unwrap(), q(9, 4));
        assert_eq!(pow(&q(2, 3), 0).unwrap(), int(1));
        assert!(pow(&int(0), -1).is_err());
        assert_eq!(factorial(5), BigInt::from(120));
    }
}
