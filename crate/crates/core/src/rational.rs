//! Text form of exact rationals: `"a/b"` or a bare integer.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};

/// Formats as `"num/den"`.
pub fn fmt_q(x: &Rational64) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn fmt_bigq(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn split(s: &str) -> (&str, Option<&str>) {
    match s.split_once('/') {
        Some((a, b)) => (a.trim(), Some(b.trim())),
        None => (s.trim(), None),
    }
}

pub fn parse_q(s: &str) -> Result<Rational64> {
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    let (a, b) = split(s);
    let num: i64 = a.parse().map_err(|_| bad())?;
    let den: i64 = match b {
        Some(b) => b.parse().map_err(|_| bad())?,
        None => 1,
    };
    if den == 0 {
        return Err(bad());
    }
    Ok(Rational64::new(num, den))
}

pub fn parse_bigq(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    let (a, b) = split(s);
    let num: BigInt = a.parse().map_err(|_| bad())?;
    let den: BigInt = match b {
        Some(b) => b.parse().map_err(|_| bad())?,
        None => BigInt::from(1),
    };
    if den == BigInt::from(0) {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}
