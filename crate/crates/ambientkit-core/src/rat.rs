//! Arbitrary-precision rational scalars.
//!
//! Every coefficient in the crate is an exact rational. `num_rational`'s
//! `BigRational` already maintains the canonical form we rely on (lowest
//! terms, positive denominator, zero stored as 0/1), so this module only adds
//! construction and string-format helpers. Rationals serialize as `"p/q"` in
//! lowest terms, or as a bare integer string when the denominator is one.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// The rational `n`.
pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// The rational `p/q`. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rat {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Parse a rational from `p/q` or bare-integer form.
///
/// Decimal notation is rejected on purpose: weights must be exact.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    if s.contains('.') {
        return Err(Error::Parse(format!(
            "decimal notation is not accepted, write `{s}` as an exact fraction p/q"
        )));
    }
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("`{t}` is not an integer")))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(BigRational::new(parse_int(p)?, den))
        }
    }
}

/// Canonical string form: `p/q` in lowest terms, bare integer when `q == 1`.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Whether `2r` is an integer. Weight tuples all of whose doubled entries are
/// non-integers form the generic set on which the chain complexes are exact.
pub fn twice_is_integer(r: &Rat) -> bool {
    (r * rat_int(2)).denom().is_one()
}

/// Rising product `x (x+1) ... (x+m-1)`, with the empty product equal to one.
pub fn rising_product(x: &Rat, m: u32) -> Rat {
    let mut acc = Rat::one();
    let mut term = x.clone();
    for _ in 0..m {
        acc *= &term;
        term += Rat::one();
    }
    acc
}

/// Sign-stable comparison helper used by tests.
pub fn is_negative(r: &Rat) -> bool {
    r.is_negative()
}
