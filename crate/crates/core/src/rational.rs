//! Exact rational arithmetic helpers and the `"p/q"` string encoding used in
//! all JSON inputs and outputs.

use num::bigint::BigInt;
use num::{BigRational, One, Signed, Zero};

/// Exact rational number used throughout the crate.
pub type Rat = BigRational;

/// Builds an exact rational from an integer numerator and denominator.
///
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses a rational from its string form.
///
/// Accepts `"p/q"` with optional sign on `p`, or a bare integer `"p"`.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (num_s, den_s) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num_s
        .parse()
        .map_err(|_| format!("invalid rational numerator in {s:?}"))?;
    let den: BigInt = den_s
        .parse()
        .map_err(|_| format!("invalid rational denominator in {s:?}"))?;
    if den.is_zero() {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(num, den))
}

/// Formats a rational as `"p/q"` in lowest terms with a positive denominator.
///
/// Integers render with an explicit `/1` so the output grammar is uniform.
pub fn format_rat(r: &Rat) -> String {
    let r = r.clone().reduced();
    let (mut num, mut den) = (r.numer().clone(), r.denom().clone());
    if den.is_negative() {
        num = -num;
        den = -den;
    }
    format!("{num}/{den}")
}

/// True iff `r` is zero.
pub fn is_zero(r: &Rat) -> bool {
    r.is_zero()
}

/// The rational one, for summation checks.
pub fn one() -> Rat {
    BigRational::one()
}
