//! Exact rational arithmetic: a thin layer over arbitrary-precision rationals
//! plus the `p/q` textual form used throughout the crate.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar. All arithmetic in the crate is exact; no floats.
pub type Rat = BigRational;

/// Rational from an integer.
pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `n/d` (`d != 0`).
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"`, `"p/q"`, or `"-p/q"` into a reduced rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let err = || Error::Parse(format!("invalid rational '{s}'"));
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().map_err(|_| err())?;
            Ok(Rat::from_integer(n))
        }
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().map_err(|_| err())?;
            let d: BigInt = den.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Rat::new(n, d))
        }
    }
}

/// Formats a rational as `p` or `p/q` (reduced, `q > 0`).
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest integer to `r`, rounding half away from zero.
pub fn round_to_integer(r: &Rat) -> Rat {
    let half = Rat::new(BigInt::from(1), BigInt::from(2));
    if r.is_negative() {
        -((-r + half).floor())
    } else {
        (r + half).floor()
    }
}
