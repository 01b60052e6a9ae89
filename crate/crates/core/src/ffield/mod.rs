//! Exact arithmetic in `F_p` and its extensions `F_{p^k}`.
//!
//! A field is modelled as `F_p[t]/(m(t))` where `m` is the canonical monic
//! irreducible polynomial of degree `k`: the first irreducible one when monic
//! polynomials are sorted by coefficient vector, constant term most
//! significant. Elements are coefficient vectors of length `k`.
//!
//! The [`zech`] submodule provides logarithm tables for fast enumeration.

mod fp_poly;
pub mod zech;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

pub use zech::ZechField;

/// Largest supported characteristic; keeps products of residues inside `u64`.
pub const MAX_PRIME: u64 = 1 << 31;

/// Deterministic primality test for `n < 2^64` (trial division is plenty at
/// the sizes accepted here).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Writes `q = p^a` and returns `a`, or `None` when `q` is not a power of `p`.
pub fn log_p(q: u64, p: u64) -> Option<usize> {
    if q < p {
        return None;
    }
    let mut a = 0;
    let mut x = q;
    while x % p == 0 {
        x /= p;
        a += 1;
    }
    (x == 1 && a > 0).then_some(a)
}

/// Description of a finite field `F_{p^k}`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldDesc {
    pub p: u64,
    pub k: usize,
    /// Monic modulus, constant term first, length `k + 1`.
    pub modulus: Vec<u64>,
}

/// An element of some `F_{p^k}`: a residue polynomial of degree below `k`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElem {
    pub coeffs: Vec<u64>,
}

impl fmt::Debug for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}[{:?}]", self.p, self.k, self.modulus)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, _) => write!(f, "{c}*t")?,
                (_, 1) => write!(f, "t^{i}")?,
                _ => write!(f, "{c}*t^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl FieldElem {
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// Builds the canonical model of `F_{p^k}`.
pub fn make_field(p: u64, k: usize) -> Result<FieldDesc> {
    FieldDesc::new(p, k)
}

impl FieldDesc {
    /// Builds the canonical model of `F_{p^k}`.
    pub fn new(p: u64, k: usize) -> Result<Self> {
        if !is_prime(p) || p >= MAX_PRIME {
            return Err(Error::NotPrime(p));
        }
        if k < 1 {
            return Err(Error::InvalidDegree(k));
        }
        if k == 1 {
            return Ok(FieldDesc { p, k, modulus: vec![0, 1] });
        }
        // Odometer over (c_0, ..., c_{k-1}) with c_0 most significant.
        let mut digits = vec![0u64; k];
        loop {
            let mut m = digits.clone();
            m.push(1);
            if fp_poly::is_irreducible(&m, p) {
                return Ok(FieldDesc { p, k, modulus: m });
            }
            let mut i = k;
            loop {
                if i == 0 {
                    // Irreducibles exist in every degree, so this is unreachable.
                    return Err(Error::InvalidDegree(k));
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < p {
                    break;
                }
                digits[i] = 0;
            }
        }
    }

    /// Number of elements, `p^k`, or `None` if it overflows `u128`.
    pub fn size(&self) -> Option<u128> {
        (self.p as u128).checked_pow(self.k as u32)
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem { coeffs: vec![0; self.k] }
    }

    pub fn one(&self) -> FieldElem {
        self.from_int(1)
    }

    /// The class of the integer `c` (reduced mod `p`).
    pub fn from_int(&self, c: i64) -> FieldElem {
        let mut e = self.zero();
        e.coeffs[0] = c.rem_euclid(self.p as i64) as u64;
        e
    }

    /// The generator `t` of the polynomial model (equal to `0` when `k = 1`).
    pub fn t(&self) -> FieldElem {
        self.from_poly(&[0, 1])
    }

    /// Reduces an arbitrary coefficient list modulo the field modulus.
    pub fn from_poly(&self, coeffs: &[u64]) -> FieldElem {
        let c: Vec<u64> = coeffs.iter().map(|&x| x % self.p).collect();
        let r = fp_poly::rem(&c, &self.modulus, self.p);
        self.pad(r)
    }

    /// Checks that `x` is a well-formed element of this field.
    pub fn contains(&self, x: &FieldElem) -> bool {
        x.coeffs.len() == self.k && x.coeffs.iter().all(|&c| c < self.p)
    }

    fn check(&self, x: &FieldElem) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::FieldMismatch(format!("{x:?} is not an element of {self:?}")))
        }
    }

    fn pad(&self, mut v: Vec<u64>) -> FieldElem {
        v.resize(self.k, 0);
        FieldElem { coeffs: v }
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let p = self.p;
        FieldElem {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| (x + y) % p).collect(),
        }
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let p = self.p;
        FieldElem {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| (x + p - y) % p).collect(),
        }
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        let p = self.p;
        FieldElem { coeffs: a.coeffs.iter().map(|&x| (p - x) % p).collect() }
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        if self.k == 1 {
            return FieldElem { coeffs: vec![a.coeffs[0] * b.coeffs[0] % self.p] };
        }
        let r = fp_poly::mul_mod(&a.coeffs, &b.coeffs, &self.modulus, self.p);
        self.pad(r)
    }

    /// Multiplies by an integer scalar.
    pub fn scale(&self, a: &FieldElem, c: i64) -> FieldElem {
        let c = c.rem_euclid(self.p as i64) as u64;
        let p = self.p;
        FieldElem { coeffs: a.coeffs.iter().map(|&x| x * c % p).collect() }
    }

    /// `a^e` for a nonnegative exponent.
    pub fn pow(&self, a: &FieldElem, mut e: u128) -> FieldElem {
        let mut result = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        result
    }

    /// `a^e` for a signed exponent; negative powers of zero are an error.
    pub fn pow_signed(&self, a: &FieldElem, e: i64) -> Result<FieldElem> {
        if e >= 0 {
            Ok(self.pow(a, e as u128))
        } else {
            let inv = self.invert(a)?;
            Ok(self.pow(&inv, e.unsigned_abs() as u128))
        }
    }

    /// Multiplicative inverse.
    pub fn invert(&self, x: &FieldElem) -> Result<FieldElem> {
        self.check(x)?;
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // x^(p^k - 2); the exponent fits u128 for every field we can build.
        let size = self.size().ok_or_else(|| Error::InvalidDegree(self.k))?;
        Ok(self.pow(x, size - 2))
    }

    pub fn div(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, &self.invert(b)?))
    }

    fn check_base(&self, base_q: u64) -> Result<usize> {
        log_p(base_q, self.p).ok_or(Error::NotAPowerOfP { q: base_q, p: self.p })
    }

    /// `x^(q^j)` by repeated `q`-th powering.
    pub fn frobenius_power(&self, x: &FieldElem, base_q: u64, j: u64) -> Result<FieldElem> {
        self.check(x)?;
        self.check_base(base_q)?;
        let mut y = x.clone();
        for _ in 0..j {
            y = self.pow(&y, base_q as u128);
        }
        Ok(y)
    }

    /// Whether `x` lies in the subfield `F_{q^d}`, where `q = p^a` and
    /// `a * d` must divide `k`.
    pub fn in_subfield(&self, x: &FieldElem, q: u64, d: usize) -> Result<bool> {
        let a = self.check_base(q)?;
        if d == 0 || self.k % (a * d) != 0 {
            return Err(Error::IncompatibleDegrees(format!(
                "F_{{{q}^{d}}} is not a subfield of F_{{{}^{}}}",
                self.p, self.k
            )));
        }
        Ok(&self.frobenius_power(x, q, d as u64)? == x)
    }

    /// Absolute trace `x + x^p + ... + x^(p^(k-1))`, as a residue mod `p`.
    pub fn trace_to_prime(&self, x: &FieldElem) -> u64 {
        let mut acc = self.zero();
        let mut y = x.clone();
        for i in 0..self.k {
            acc = self.add(&acc, &y);
            if i + 1 < self.k {
                y = self.pow(&y, self.p as u128);
            }
        }
        debug_assert!(acc.coeffs[1..].iter().all(|&c| c == 0));
        acc.coeffs[0]
    }

    /// Position of `x` in the lexicographic element order (`c_0` most
    /// significant).
    pub fn index_of(&self, x: &FieldElem) -> u128 {
        x.coeffs.iter().fold(0u128, |acc, &c| acc * self.p as u128 + c as u128)
    }

    /// Inverse of [`FieldDesc::index_of`].
    pub fn element_at(&self, mut index: u128) -> FieldElem {
        let mut coeffs = vec![0u64; self.k];
        for c in coeffs.iter_mut().rev() {
            *c = (index % self.p as u128) as u64;
            index /= self.p as u128;
        }
        FieldElem { coeffs }
    }

    /// All elements in lexicographic order. Only sensible for small fields.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        let size = self.size().unwrap_or(u128::MAX);
        (0..size).map(move |i| self.element_at(i))
    }

    /// Evaluates a polynomial with coefficients in this field at `x`.
    pub fn eval_poly(&self, coeffs: &[FieldElem], x: &FieldElem) -> FieldElem {
        let mut acc = self.zero();
        for c in coeffs.iter().rev() {
            acc = self.add(&self.mul(&acc, x), c);
        }
        acc
    }
}

/// The canonical embedding `F_{p^a} -> F_{p^b}` for `a | b`, sending `t` to
/// the lexicographically least root of the source modulus in the target.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub from: FieldDesc,
    pub into: FieldDesc,
    /// Image of `t`.
    pub root: FieldElem,
}

impl Embedding {
    pub fn new(from: &FieldDesc, into: &FieldDesc) -> Result<Self> {
        if from.p != into.p {
            return Err(Error::FieldMismatch(format!("{from:?} vs {into:?}")));
        }
        if into.k % from.k != 0 {
            return Err(Error::IncompatibleDegrees(format!(
                "degree {} does not divide {}",
                from.k, into.k
            )));
        }
        let m: Vec<FieldElem> = from.modulus.iter().map(|&c| into.from_int(c as i64)).collect();
        let root = if from.k == 1 {
            into.zero()
        } else if from == into {
            into.t()
        } else {
            Self::least_root(&m, into)?
        };
        Ok(Embedding { from: from.clone(), into: into.clone(), root })
    }

    fn least_root(m: &[FieldElem], into: &FieldDesc) -> Result<FieldElem> {
        // Roots live in the subfield of size p^a; when the target has a Zech
        // table we scan only that subfield, otherwise every element.
        let a = m.len() - 1;
        if let Ok(z) = ZechField::get(into.p, into.k) {
            let mut best: Option<(u128, FieldElem)> = None;
            for x in z.subfield_elements(a) {
                let e = z.to_elem(x);
                if into.eval_poly(m, &e).is_zero() {
                    let idx = into.index_of(&e);
                    if best.as_ref().map_or(true, |(b, _)| idx < *b) {
                        best = Some((idx, e));
                    }
                }
            }
            return best.map(|(_, e)| e).ok_or(Error::NoRoot);
        }
        into.elements().find(|e| into.eval_poly(m, e).is_zero()).ok_or(Error::NoRoot)
    }

    pub fn embed(&self, x: &FieldElem) -> Result<FieldElem> {
        if !self.from.contains(x) {
            return Err(Error::FieldMismatch(format!("{x:?} is not in {:?}", self.from)));
        }
        if self.from.k == 1 {
            return Ok(self.into.from_int(x.coeffs[0] as i64));
        }
        let coeffs: Vec<FieldElem> =
            x.coeffs.iter().map(|&c| self.into.from_int(c as i64)).collect();
        Ok(self.into.eval_poly(&coeffs, &self.root))
    }
}

/// Canonical image of `x` under `from -> into`.
pub fn embed(x: &FieldElem, from: &FieldDesc, into: &FieldDesc) -> Result<FieldElem> {
    Embedding::new(from, into)?.embed(x)
}
