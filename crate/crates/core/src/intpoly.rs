//! Integer polynomials in `T`, the building blocks of zeta functions.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Polynomial with arbitrary-precision integer coefficients, constant term
/// first, trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    pub coeffs: Vec<BigInt>,
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}")?;
                    }
                    if i == 1 {
                        write!(f, "T")?
                    } else {
                        write!(f, "T^{i}")?
                    }
                }
            }
        }
        Ok(())
    }
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn one() -> Self {
        Self::from_i64s(&[1])
    }

    /// `1 - a T`.
    pub fn linear(a: impl Into<BigInt>) -> Self {
        Self::new(vec![BigInt::one(), -a.into()])
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree, with the zero polynomial reported as 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Whether the constant term is 1, i.e. the polynomial is in `1 + Tℤ[T]`.
    pub fn is_zeta_factor(&self) -> bool {
        self.coeffs.first().is_some_and(|c| c.is_one())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::default();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// `P(cT)`.
    pub fn scale_var(&self, c: &BigInt) -> Self {
        let mut f = BigInt::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &f);
            f *= c;
        }
        Self::new(out)
    }

    /// Power sums `s_k = Σ α_i^k`, `k = 1..=count`, of the reciprocal roots
    /// of a polynomial `∏(1 - α_i T)`.
    pub fn power_sums(&self, count: usize) -> Vec<BigInt> {
        let c = |i: usize| self.coeff(i);
        let mut s: Vec<BigInt> = Vec::with_capacity(count);
        for k in 1..=count {
            let mut v = -BigInt::from(k) * c(k);
            for i in 1..k {
                v -= &s[i - 1] * c(k - i);
            }
            s.push(v);
        }
        s
    }

    /// The polynomial `∏(1 - α_i T)` of the given degree whose reciprocal
    /// roots have power sums `s` (Newton's identities). Fails when the
    /// coefficients are not integers.
    pub fn from_power_sums(s: &[BigRational], degree: usize) -> Result<Self> {
        if s.len() < degree {
            return Err(Error::Insufficient(format!(
                "{} power sums for a degree-{degree} factor",
                s.len()
            )));
        }
        let mut c: Vec<BigRational> = vec![BigRational::one()];
        for k in 1..=degree {
            let mut acc = BigRational::zero();
            for i in 1..=k {
                acc += &s[i - 1] * &c[k - i];
            }
            c.push(-acc / BigRational::from_integer(BigInt::from(k)));
        }
        let mut out = Vec::with_capacity(c.len());
        for (k, x) in c.into_iter().enumerate() {
            if !x.is_integer() {
                return Err(Error::NonIntegral(format!("coefficient of T^{k} is {x}")));
            }
            out.push(x.to_integer());
        }
        Ok(Self::new(out))
    }

    /// Reversed polynomial `T^deg P(1/T)`.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    /// Power series of `1/P` up to and including `T^len-1`. Requires `P(0) = ±1`.
    pub fn inverse_series(&self, len: usize) -> Vec<BigInt> {
        let c0 = self.coeff(0);
        assert!(c0.abs().is_one(), "constant term must be a unit");
        let mut out: Vec<BigInt> = Vec::with_capacity(len);
        for k in 0..len {
            let mut v = if k == 0 { BigInt::one() } else { BigInt::zero() };
            for i in 1..=k.min(self.deg()) {
                v -= self.coeff(i) * &out[k - i];
            }
            out.push(v * &c0);
        }
        out
    }

    /// Coefficients as `i64`, when they all fit.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| c.to_i64()).collect()
    }

    /// Coefficients as a JSON array of numbers (strings for huge values).
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.coeffs.iter().map(bigint_json).collect())
    }

    /// Exact quotient `self / other`, or `None` when `other` does not divide.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        let d = other.degree()?;
        let lead = other.coeffs[d].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() < d + 1 {
            return if rem.iter().all(|c| c.is_zero()) { Some(Self::default()) } else { None };
        }
        let mut q = vec![BigInt::zero(); rem.len() - d];
        for i in (0..q.len()).rev() {
            let (qi, r) = rem[i + d].div_rem(&lead);
            if !r.is_zero() {
                return None;
            }
            for j in 0..=d {
                rem[i + j] -= &qi * &other.coeffs[j];
            }
            q[i] = qi;
        }
        rem.iter().all(|c| c.is_zero()).then(|| Self::new(q))
    }
}

/// JSON number for integers that fit `i64`/`u64`, decimal string otherwise.
pub fn bigint_json(x: &BigInt) -> serde_json::Value {
    if let Some(v) = x.to_i64() {
        serde_json::Value::from(v)
    } else if let Some(v) = x.to_u64() {
        serde_json::Value::from(v)
    } else {
        serde_json::Value::String(x.to_string())
    }
}

/// Reads a JSON integer written by [`bigint_json`].
pub fn bigint_from_json(v: &serde_json::Value) -> Result<BigInt> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(|| Error::InvalidInput(format!("not an integer: {n}"))),
        serde_json::Value::String(s) => {
            s.parse().map_err(|_| Error::InvalidInput(format!("not an integer: {s}")))
        }
        _ => Err(Error::InvalidInput(format!("not an integer: {v}"))),
    }
}

/// `ord_p(x)` for nonzero `x`.
pub fn ord_p(x: &BigInt, p: u64) -> u32 {
    assert!(!x.is_zero());
    let p = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    loop {
        let (q, r) = y.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        y = q;
        v += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(x: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(x))
    }

    #[test]
    fn newton_identities_round_trip() {
        let p = IntPolynomial::from_i64s(&[1, -20, 343]);
        let s = p.power_sums(4);
        assert_eq!(s[0], BigInt::from(20));
        assert_eq!(s[1], BigInt::from(20 * 20 - 2 * 343));
        let sq: Vec<BigRational> = s.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        assert_eq!(IntPolynomial::from_power_sums(&sq, 2).unwrap(), p);
    }

    #[test]
    fn non_integral_power_sums_rejected() {
        let r = IntPolynomial::from_power_sums(&[q(1), q(0)], 2);
        assert!(matches!(r, Err(Error::NonIntegral(_))));
    }

    #[test]
    fn series_and_division() {
        let p = IntPolynomial::linear(3);
        assert_eq!(p.inverse_series(4), vec![1, 3, 9, 27].into_iter().map(BigInt::from).collect::<Vec<_>>());
        let a = IntPolynomial::linear(2).mul(&IntPolynomial::linear(5));
        assert_eq!(a.div_exact(&IntPolynomial::linear(5)).unwrap(), IntPolynomial::linear(2));
        assert!(a.div_exact(&IntPolynomial::linear(3)).is_none());
        assert_eq!(a.to_string(), "1 - 7T + 10T^2");
    }

    #[test]
    fn valuations() {
        assert_eq!(ord_p(&BigInt::from(343), 7), 3);
        assert_eq!(ord_p(&BigInt::from(-20), 7), 0);
        assert_eq!(ord_p(&BigInt::from(40), 2), 3);
    }
}
