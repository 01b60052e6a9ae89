//! From count sequences to exact zeta functions: rational reconstruction,
//! nontrivial factors of toric hypersurfaces, Weil weights, functional
//! equations, moment factors of the Calabi-Yau family, slope zeta functions,
//! congruence scans and Euler-factor tables.

use crate::counting::{self, FamilySpec};
use crate::error::{Error, Result};
use crate::intpoly::{bigint_json, IntPolynomial};
use crate::lattice::LatticePolytope;
use crate::linalg::{binomial, solve};
use crate::newtonpolygon::{newton_polygon_of, prime_power, slope_multiset, Q};
use crate::rational::fmt_q;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::json;
use std::collections::BTreeMap;

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn bq(x: BigInt) -> BigRational {
    BigRational::from_integer(x)
}

/// An exact rational zeta function `numerator / denominator`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaFactorization {
    pub numerator: IntPolynomial,
    pub denominator: IntPolynomial,
    /// Factored view `(factor, multiplicity)`, poles with negative
    /// multiplicity.
    pub factors: Vec<(IntPolynomial, i64)>,
    /// Number of counts the reconstruction was fitted and checked against.
    pub counts_used: usize,
    /// Set when the fitted total degree equals the bound; more counts are
    /// needed to rule out a larger degree.
    pub degree_bound_tight: bool,
}

impl ZetaFactorization {
    pub fn from_parts(numerator: IntPolynomial, denominator: IntPolynomial) -> Self {
        let factors = vec![(numerator.clone(), 1), (denominator.clone(), -1)];
        ZetaFactorization { numerator, denominator, factors, counts_used: 0, degree_bound_tight: false }
    }

    /// Total degree `deg numerator + deg denominator`.
    pub fn total_degree(&self) -> usize {
        self.numerator.deg() + self.denominator.deg()
    }

    /// The counts `N_1..N_len` with `Z = exp(Σ N_k T^k / k)`.
    pub fn counts(&self, len: usize) -> Vec<BigInt> {
        let a = self.denominator.power_sums(len);
        let b = self.numerator.power_sums(len);
        a.into_iter().zip(b).map(|(x, y)| x - y).collect()
    }

    /// Power-series coefficients of `Z` up to `T^(len-1)`.
    pub fn series(&self, len: usize) -> Vec<BigInt> {
        let inv = self.denominator.inverse_series(len);
        (0..len)
            .map(|k| (0..=k).map(|i| self.numerator.coeff(i) * &inv[k - i]).sum())
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "numerator": self.numerator.to_json(),
            "denominator": self.denominator.to_json(),
            "factors": self.factors.iter().map(|(p, m)| json!({"factor": p.to_json(), "multiplicity": m})).collect::<Vec<_>>(),
            "counts_used": self.counts_used,
            "degree_bound_tight": self.degree_bound_tight,
        })
    }
}

/// Coefficients `z_0..z_len` of `exp(Σ N_k T^k / k)`, by `k z_k = Σ N_i z_{k-i}`.
fn zeta_series(counts: &[BigInt]) -> Vec<BigRational> {
    let mut z = vec![BigRational::one()];
    for k in 1..=counts.len() {
        let mut acc = BigRational::zero();
        for i in 1..=k {
            acc += bq(counts[i - 1].clone()) * &z[k - i];
        }
        z.push(acc / bq(big(k as i64)));
    }
    z
}

/// Linear complexity of a sequence over ℚ (Berlekamp-Massey).
pub fn linear_complexity(seq: &[BigRational]) -> usize {
    let mut c = vec![BigRational::one()];
    let mut b = vec![BigRational::one()];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut last = BigRational::one();
    for i in 0..seq.len() {
        let mut disc = seq[i].clone();
        for j in 1..=l.min(c.len() - 1) {
            disc += &c[j] * &seq[i - j];
        }
        if disc.is_zero() {
            m += 1;
            continue;
        }
        let coef = &disc / &last;
        let old = c.clone();
        if c.len() < b.len() + m {
            c.resize(b.len() + m, BigRational::zero());
        }
        for (j, bj) in b.iter().enumerate() {
            c[j + m] -= &coef * bj;
        }
        if 2 * l <= i {
            l = i + 1 - l;
            b = old;
            last = disc;
            m = 1;
        } else {
            m += 1;
        }
    }
    l
}

/// The unique rational function in `1 + Tℤ[[T]]` of total degree at most
/// `max_order` whose logarithmic derivative reproduces `counts`.
///
/// Requires `counts.len() >= 2 * max_order`; every count is checked. The
/// linear complexity of the counts gives a lower bound for the search.
pub fn recurrence_reconstruct(counts: &[BigInt], max_order: usize) -> Result<ZetaFactorization> {
    if counts.len() < 2 * max_order {
        return Err(Error::Insufficient(format!(
            "{} counts cannot pin down total degree {max_order}; need {}",
            counts.len(),
            2 * max_order
        )));
    }
    let len = counts.len();
    let z = zeta_series(counts);
    let seq: Vec<BigRational> = counts.iter().cloned().map(bq).collect();
    let lower = linear_complexity(&seq).min(max_order);
    for s in lower..=max_order {
        for b in 0..=s {
            let a = s - b;
            let Some(v) = denominator_for(&z, a, b) else { continue };
            // V(T) Z(T) must be a polynomial of degree ≤ a up to T^len.
            let coeff = |j: usize| -> BigRational {
                (0..=b.min(j)).map(|i| &v[i] * &z[j - i]).sum()
            };
            if (a + 1..=len).any(|j| !coeff(j).is_zero()) {
                continue;
            }
            let u: Vec<BigRational> = (0..=a).map(coeff).collect();
            let to_int = |xs: &[BigRational], what: &str| -> Result<IntPolynomial> {
                let mut out = Vec::with_capacity(xs.len());
                for (i, x) in xs.iter().enumerate() {
                    if !x.is_integer() {
                        return Err(Error::NonIntegral(format!("{what} coefficient of T^{i} is {x}")));
                    }
                    out.push(x.to_integer());
                }
                Ok(IntPolynomial::new(out))
            };
            let num = to_int(&u, "numerator")?;
            let den = to_int(&v, "denominator")?;
            let mut zf = ZetaFactorization::from_parts(num, den);
            zf.counts_used = len;
            zf.degree_bound_tight = s == max_order && max_order > 0;
            if zf.counts(len) != counts {
                return Err(Error::Inconsistent("reconstruction does not reproduce the counts".into()));
            }
            return Ok(zf);
        }
    }
    Err(Error::Insufficient(format!("no rational function of total degree ≤ {max_order} fits the counts")))
}

/// `V = 1 + v_1 T + ... + v_b T^b` killing the coefficients `a+1..a+b` of
/// `V Z`, when that system is nonsingular.
fn denominator_for(z: &[BigRational], a: usize, b: usize) -> Option<Vec<BigRational>> {
    if b == 0 {
        return Some(vec![BigRational::one()]);
    }
    if a + b >= z.len() {
        return None;
    }
    // Σ_{i=1}^{b} v_i z_{j-i} = -z_j for j = a+1..a+b.
    let zat = |t: i64| if t < 0 { BigRational::zero() } else { z[t as usize].clone() };
    let mat: Vec<Vec<BigRational>> = (a + 1..=a + b)
        .map(|j| (1..=b).map(|i| zat(j as i64 - i as i64)).collect())
        .collect();
    let rhs: Vec<BigRational> = (a + 1..=a + b).map(|j| -zat(j as i64)).collect();
    let sol = solve(&mat, &rhs)?;
    let mut v = vec![BigRational::one()];
    v.extend(sol);
    Some(v)
}

/// `t_k = -Σ_{i=0}^{n-1} (-1)^{n-i} C(n, i+1) q^{ik}`: counts of the trivial
/// factor of a nondegenerate toric hypersurface in `n` variables.
pub fn toric_trivial_counts(n: usize, q: u64, len: usize) -> Vec<BigInt> {
    counting::toric_trivial_counts(n, &big(q as i64), len)
}

/// The degree-`(d(Δ) - 1)` factor `P_f` of the zeta function of a
/// Δ-regular `f`, from its torus counts over `F_{q^k}`, `k = 1..`.
///
/// Uses `N_k = t_k - (-1)^n s_k(P_f)`. Counts beyond the degree are used as
/// checks.
pub fn nontrivial_factor(delta: &LatticePolytope, counts: &[BigInt], q: u64) -> Result<IntPolynomial> {
    let n = delta.n;
    let deg = delta.normalized_volume()? as usize - 1;
    if counts.len() < deg {
        return Err(Error::Insufficient(format!("{} counts for a degree-{deg} factor", counts.len())));
    }
    let t = toric_trivial_counts(n, q, counts.len());
    let sign = if n % 2 == 0 { big(1) } else { big(-1) };
    let s: Vec<BigInt> = t.iter().zip(counts).map(|(tk, nk)| &sign * (tk - nk)).collect();
    let sq: Vec<BigRational> = s.iter().cloned().map(bq).collect();
    let p = IntPolynomial::from_power_sums(&sq, deg)?;
    if p.power_sums(s.len()) != s {
        return Err(Error::Inconsistent(format!(
            "degree-{deg} factor {p} does not reproduce all {} counts",
            s.len()
        )));
    }
    Ok(p)
}

/// How an unknown factor enters the zeta function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorRole {
    /// A factor of the numerator: contributes `-s_k` to the counts.
    Zero,
    /// A factor of the denominator: contributes `+s_k`.
    Pole,
}

/// Solves for an unknown factor of the given degree once the known part of
/// the counts (as a list of count contributions) is removed. All supplied
/// counts are checked against the result.
pub fn reconstruct_with_known(
    counts: &[BigInt],
    known: &[BigInt],
    unknown_degree: usize,
    role: FactorRole,
) -> Result<IntPolynomial> {
    if known.len() < counts.len() {
        return Err(Error::InvalidInput("fewer known terms than counts".into()));
    }
    let s: Vec<BigInt> = counts
        .iter()
        .zip(known)
        .map(|(c, k)| match role {
            FactorRole::Pole => c - k,
            FactorRole::Zero => k - c,
        })
        .collect();
    let sq: Vec<BigRational> = s.iter().cloned().map(bq).collect();
    let p = IntPolynomial::from_power_sums(&sq, unknown_degree)?;
    if p.power_sums(s.len()) != s {
        return Err(Error::Inconsistent(format!("factor {p} of degree {unknown_degree} does not reproduce the counts")));
    }
    Ok(p)
}

/// Complex roots of a polynomial (constant term first) by the Aberth
/// iteration followed by Newton polishing.
pub fn complex_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    let deg = c.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let monic: Vec<Complex64> = c.iter().map(|&x| Complex64::new(x / lead, 0.0)).collect();
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for a in monic.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    };
    // Cauchy bound for the initial circle.
    let radius = 1.0 + monic[..deg].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let r0 = radius.min(monic[0].norm().powf(1.0 / deg as f64).max(1e-300) * 2.0).max(1e-12);
    let mut z: Vec<Complex64> =
        (0..deg).map(|k| Complex64::from_polar(r0, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64)).collect();
    for _ in 0..2000 {
        let mut moved = 0.0f64;
        for i in 0..deg {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..deg).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / z[i].norm().max(1e-300));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..5 {
            let (p, dp) = eval(*zi);
            let step = p / dp;
            if step.is_finite() && step.norm() < 1e-6 * zi.norm().max(1.0) {
                *zi -= step;
            }
        }
    }
    z
}

/// Relative tolerance for accepting a modulus as `q^{w/2}`.
pub const WEIGHT_TOLERANCE: f64 = 1e-6;

/// Weights of the reciprocal roots of `P` with respect to `q`.
#[derive(Clone, Debug, PartialEq)]
pub enum WeilVerdict {
    /// Every `|α| = q^{w/2}` with integer `w`; weights sorted.
    Pure { weights: Vec<i64>, max_relative_error: f64 },
    /// Some modulus is not of that form.
    Impure { moduli: Vec<f64> },
}

impl WeilVerdict {
    pub fn weights(&self) -> Option<&[i64]> {
        match self {
            WeilVerdict::Pure { weights, .. } => Some(weights),
            WeilVerdict::Impure { .. } => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            WeilVerdict::Pure { weights, max_relative_error } => {
                json!({"verdict": "pure", "weights": weights, "max_relative_error": max_relative_error})
            }
            WeilVerdict::Impure { moduli } => json!({"verdict": "impure", "moduli": moduli}),
        }
    }
}

/// Reciprocal roots `α` of `P = ∏(1 - αT)`.
pub fn reciprocal_roots(p: &IntPolynomial) -> Vec<Complex64> {
    let rev: Vec<f64> = p.reversed().coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::INFINITY)).collect();
    // Reversal drops leading zeros of P; pad to keep zero roots out.
    complex_roots(&rev)
}

pub fn weil_weights(p: &IntPolynomial, q: u64) -> Result<WeilVerdict> {
    if !p.is_zeta_factor() {
        return Err(Error::InvalidInput(format!("{p} does not have constant term 1")));
    }
    let lq = (q as f64).ln();
    let mut weights = Vec::new();
    let mut moduli = Vec::new();
    let mut worst = 0.0f64;
    let mut pure = true;
    for a in reciprocal_roots(p) {
        let m = a.norm();
        moduli.push(m);
        let w = (2.0 * m.ln() / lq).round();
        let expected = (q as f64).powf(w / 2.0);
        let err = (m / expected - 1.0).abs();
        worst = worst.max(err);
        if err > WEIGHT_TOLERANCE {
            pure = false;
        }
        weights.push(w as i64);
    }
    if !pure {
        return Ok(WeilVerdict::Impure { moduli });
    }
    weights.sort();
    Ok(WeilVerdict::Pure { weights, max_relative_error: worst })
}

/// Whether `T^r q^{wr/2} P(1/(q^w T)) = ε P(T)`; returns `ε` when it holds.
pub fn functional_equation_check(p: &IntPolynomial, q: u64, w: u32, r: usize) -> Option<i8> {
    if p.degree() != Some(r) {
        return None;
    }
    let c = |j: usize| p.coeff(j);
    let qq = big(q as i64);
    let root = {
        let s = qq.sqrt();
        (&s * &s == qq).then_some(s)
    };
    // c_j q^{w(r-2j)/2} == ε c_{r-j}
    let scaled = |j: usize| -> Option<BigRational> {
        let e = w as i64 * (r as i64 - 2 * j as i64);
        if c(j).is_zero() {
            return Some(BigRational::zero());
        }
        let (base, exp) = if e % 2 == 0 {
            (qq.clone(), e / 2)
        } else {
            (root.clone()?, e)
        };
        let pw = bq(base.pow(exp.unsigned_abs() as u32));
        let f = if exp >= 0 { pw } else { pw.recip() };
        Some(bq(c(j)) * f)
    };
    let mut sign: Option<i8> = None;
    for j in 0..=r {
        let lhs = scaled(j)?;
        let rhs = bq(c(r - j));
        if lhs.is_zero() && rhs.is_zero() {
            continue;
        }
        let s = if lhs == rhs {
            1
        } else if lhs == -rhs.clone() {
            -1
        } else {
            return None;
        };
        match sign {
            None => sign = Some(s),
            Some(prev) if prev != s => return None,
            _ => {}
        }
    }
    Some(sign.unwrap_or(1))
}

/// `Z_d(f, T)` from the moment sequence `M_d(f ⊗ F_{q^k})`, `k = 1..`.
pub fn moment_zeta(counts: &[BigInt], max_order: usize) -> Result<ZetaFactorization> {
    recurrence_reconstruct(counts, max_order)
}

/// `A_d` and `S_d` for the Calabi-Yau family in `n` variables, as factored
/// products `(1 - q^e T)^m` recorded as `(e, m)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyTrivialFactors {
    pub q: u64,
    pub a_d: Vec<(u64, i64)>,
    pub s_d: Vec<(u64, i64)>,
}

fn collect_factors(items: impl IntoIterator<Item = (u64, i64)>) -> Vec<(u64, i64)> {
    let mut m: BTreeMap<u64, i64> = BTreeMap::new();
    for (e, k) in items {
        *m.entry(e).or_default() += k;
    }
    m.into_iter().filter(|(_, k)| *k != 0).collect()
}

/// Expands `∏ (1 - q^e T)^m` as `(numerator, denominator)`.
pub fn expand_factors(q: u64, factors: &[(u64, i64)]) -> (IntPolynomial, IntPolynomial) {
    let mut num = IntPolynomial::one();
    let mut den = IntPolynomial::one();
    for &(e, m) in factors {
        let f = IntPolynomial::linear(big(q as i64).pow(e as u32));
        if m > 0 {
            num = num.mul(&f.pow(m as u32));
        } else {
            den = den.mul(&f.pow((-m) as u32));
        }
    }
    (num, den)
}

impl CyTrivialFactors {
    pub fn to_json(&self) -> serde_json::Value {
        let fmt = |v: &[(u64, i64)]| {
            v.iter().map(|(e, m)| json!({"q_power": e, "multiplicity": m})).collect::<Vec<_>>()
        };
        let (an, ad) = expand_factors(self.q, &self.a_d);
        json!({
            "q": self.q,
            "A_d": fmt(&self.a_d),
            "A_d_numerator": an.to_json(),
            "A_d_denominator": ad.to_json(),
            "S_d": fmt(&self.s_d),
        })
    }
}

/// The factors `A_d(T)` (four parity cases) and `S_d(T)` of the moment
/// zeta function factorization, in factored form.
pub fn cy_trivial_factors(n: usize, d: usize, q: u64) -> Result<CyTrivialFactors> {
    if n < 2 || d < 1 {
        return Err(Error::InvalidInput(format!("need n ≥ 2 and d ≥ 1, got n = {n}, d = {d}")));
    }
    let (n64, d64) = (n as u64, d as u64);
    let a_d = match (n % 2 == 0, d % 2 == 0) {
        (true, true) => vec![
            (d64 * (n64 - 1) / 2, 1),
            (d64 * (n64 - 1) / 2 + 1, 1),
            (d64 * (n64 - 2) / 2 + 1, 1),
        ],
        (true, false) => vec![(d64 * (n64 - 2) / 2 + 1, 1)],
        (false, false) => vec![(d64 * (n64 - 1) / 2, 1)],
        (false, true) => vec![(d64 * (n64 - 1) / 2 + 1, -1)],
    };
    let mut s = Vec::new();
    for k in 0..=(n64 - 2) / 2 {
        s.push((d64 * k, 1));
        s.push((d64 * k + 1, -1));
    }
    for i in 0..n64 {
        let sign = if (i + 1) % 2 == 0 { 1 } else { -1 };
        s.push((d64 * i + 1, sign * binomial(n64, i + 1) as i64));
    }
    Ok(CyTrivialFactors { q, a_d: collect_factors(a_d), s_d: collect_factors(s) })
}

/// Counts contributed by the trivial factor of `Z_d` for the two-variable
/// Calabi-Yau family: `M_d(k) = t_d(k) + s_k(R_d) - q^k s_k(R_{d-2})`.
///
/// With `Q = q^k`, `σ = #{y : y^3 = 27}` in `F_Q` (3 if `Q ≡ 1 mod 3`,
/// else 1) and `χ = ±1` as `Q ≡ ±1 mod 3`:
/// `t_1 = Q^2 - 2Q + 1`, `t_2 = Q^3 + Q^2 - 2Q + 1 - σQ` and, for `d ≥ 3`,
/// `t_d = Q^{d+1} - 2Q + 1 - Q - σ χ^{d-2} Q`.
pub fn cy2_trivial_counts(d: usize, q: u64, len: usize) -> Vec<BigInt> {
    (1..=len)
        .map(|k| {
            let big_q = big(q as i64).pow(k as u32);
            let one_mod_3 = (&big_q % 3u32) == BigInt::one();
            let sigma = if one_mod_3 { big(3) } else { big(1) };
            let chi = if one_mod_3 { big(1) } else { big(-1) };
            match d {
                0 => big(0),
                1 => big_q.pow(2) - 2 * &big_q + 1,
                2 => big_q.pow(3) + big_q.pow(2) - 2 * &big_q + 1 - &sigma * &big_q,
                _ => {
                    big_q.pow(d as u32 + 1) - 3 * &big_q + 1 - sigma * chi.pow(d as u32 - 2) * &big_q
                }
            }
        })
        .collect()
}

/// `R_d` with its verdicts.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentFactor {
    pub p: u64,
    pub d: usize,
    pub r_d: IntPolynomial,
    pub weights: WeilVerdict,
    pub fe_sign: Option<i8>,
    pub counts_used: usize,
}

impl MomentFactor {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "p": self.p,
            "d": self.d,
            "factor": self.r_d.to_json(),
            "verdicts": {
                "degree": self.r_d.deg(),
                "weights": self.weights.to_json(),
                "functional_equation": self.fe_sign,
                "counts_used": self.counts_used,
            },
        })
    }
}

/// Extracts `R_d` for the two-variable Calabi-Yau family over `F_q` from
/// the moments `M_d(f ⊗ F_{q^k})`, `k = 1..=counts.len()`, given `R_{d-2}`.
///
/// With fewer than `2(d-1)` counts the functional equation of weight `d+1`
/// supplies the upper half of the coefficients; both signs are tried and
/// only one may survive. The result must have degree `2(d-1)`, be pure of
/// weight `d+1` and reproduce every count.
pub fn extract_r_d(d: usize, q: u64, counts: &[BigInt], r_prev: &IntPolynomial) -> Result<MomentFactor> {
    let (p, _) = prime_power(q)?;
    if p == 3 {
        return Err(Error::InvalidInput("characteristic 3 is excluded".into()));
    }
    if d <= 1 {
        return Ok(MomentFactor {
            p,
            d,
            r_d: IntPolynomial::one(),
            weights: WeilVerdict::Pure { weights: Vec::new(), max_relative_error: 0.0 },
            fe_sign: Some(1),
            counts_used: counts.len(),
        });
    }
    let len = counts.len();
    let trivial = cy2_trivial_counts(d, q, len);
    let prev = r_prev.power_sums(len);
    // s_k(R_d) = M_d(k) - t_d(k) + q^k s_k(R_{d-2})
    let s: Vec<BigInt> = (0..len)
        .map(|i| &counts[i] - &trivial[i] + big(q as i64).pow(i as u32 + 1) * &prev[i])
        .collect();
    let r = 2 * (d - 1);
    let w = (d + 1) as u32;
    let sq: Vec<BigRational> = s.iter().cloned().map(bq).collect();
    let candidates: Vec<IntPolynomial> = if len >= r {
        vec![IntPolynomial::from_power_sums(&sq, r)?]
    } else {
        if len < d - 1 {
            return Err(Error::Insufficient(format!("R_{d} needs at least {} moments, got {len}", d - 1)));
        }
        let low = IntPolynomial::from_power_sums(&sq[..d - 1], d - 1)?;
        let mut out = Vec::new();
        for eps in [1i64, -1] {
            let mut c = vec![BigInt::zero(); r + 1];
            for j in 0..d - 1 {
                c[j] = low.coeff(j);
                // c_{r-j} = ε c_j q^{w(r-2j)/2}
                let e = (w as usize * (r - 2 * j)) / 2;
                c[r - j] = big(eps) * low.coeff(j) * big(q as i64).pow(e as u32);
            }
            // Middle coefficient from the power sum s_{d-1} when available.
            let mut cand = IntPolynomial::new(c.clone());
            if len >= d - 1 {
                let mid = d - 1;
                let mut acc = BigRational::zero();
                for i in 1..=mid {
                    acc += &sq[i - 1] * bq(cand.coeff(mid - i));
                }
                let cm = -acc / bq(big(mid as i64));
                if !cm.is_integer() {
                    continue;
                }
                c[mid] = cm.to_integer();
                cand = IntPolynomial::new(c);
            }
            if cand.power_sums(len) == s && functional_equation_check(&cand, q, w, r) == Some(eps as i8) {
                out.push(cand);
            }
        }
        out.dedup();
        out
    };
    let mut good: Vec<MomentFactor> = Vec::new();
    for cand in candidates {
        if cand.power_sums(len) != s || cand.degree() != Some(r) {
            continue;
        }
        let weights = weil_weights(&cand, q)?;
        if weights.weights().map_or(true, |ws| ws.iter().any(|&x| x != w as i64)) {
            continue;
        }
        let fe_sign = functional_equation_check(&cand, q, w, r);
        good.push(MomentFactor { p, d, r_d: cand, weights, fe_sign, counts_used: len });
    }
    match good.len() {
        1 => Ok(good.pop().unwrap()),
        0 => Err(Error::Inconsistent(format!(
            "no degree-{r} polynomial pure of weight {w} matches the moments {counts:?} (power sums {s:?})"
        ))),
        _ => Err(Error::Insufficient(format!("both functional-equation signs fit; supply more than {len} moments"))),
    }
}

/// `R_d` for the two-variable family over `F_p` computed from scratch,
/// recursing through `R_{d-2}`.
pub fn cy2_r_d(p: u64, d: usize, kmax: usize, cap: u128) -> Result<MomentFactor> {
    let family = FamilySpec::calabi_yau(2, p)?;
    let prev = if d >= 2 { cy2_r_d(p, d - 2, kmax, cap)?.r_d } else { IntPolynomial::one() };
    if d <= 1 {
        return extract_r_d(d, p, &[], &prev);
    }
    let counts = counting::moment_sequence(&family, d, kmax, cap)?;
    extract_r_d(d, p, &counts, &prev)
}

/// `∏(1 - U^{s} T)^{m}` with slopes `s ≥ 0` and net multiplicities `m`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SlopeZeta {
    pub factors: BTreeMap<Q, i64>,
}

impl SlopeZeta {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Q, i64)>) -> Self {
        let mut factors = BTreeMap::new();
        for (s, m) in pairs {
            *factors.entry(s).or_insert(0) += m;
        }
        factors.retain(|_, m| *m != 0);
        SlopeZeta { factors }
    }

    pub fn mul(&self, other: &SlopeZeta) -> SlopeZeta {
        Self::from_pairs(self.factors.iter().chain(&other.factors).map(|(s, m)| (*s, *m)))
    }

    pub fn reciprocal(&self) -> SlopeZeta {
        Self::from_pairs(self.factors.iter().map(|(s, m)| (*s, -m)))
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    /// `Σ m · s`: the total slope mass.
    pub fn slope_mass(&self) -> Q {
        self.factors.iter().map(|(s, m)| s * Q::from_integer(*m)).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!(self
            .factors
            .iter()
            .map(|(s, m)| json!({"slope": fmt_q(s), "exponent": m}))
            .collect::<Vec<_>>())
    }
}

/// Slopes of the reciprocal roots of one factor, each counted once.
pub fn factor_slopes(p: &IntPolynomial, q: u64) -> Result<Vec<(Q, i64)>> {
    let np = newton_polygon_of(p, q)?;
    let mut out = Vec::new();
    for (s, len) in slope_multiset(&np) {
        if !len.is_integer() {
            return Err(Error::Inconsistent(format!("side of non-integral length {len}")));
        }
        out.push((s, len.to_integer()));
    }
    Ok(out)
}

/// Slope zeta function of a factored zeta function: zeros of `Z` give
/// exponent `+1`, poles `-1`.
pub fn slope_zeta(z: &ZetaFactorization, q: u64) -> Result<SlopeZeta> {
    let mut pairs = Vec::new();
    for (f, m) in &z.factors {
        for (s, len) in factor_slopes(f, q)? {
            pairs.push((s, len * m));
        }
    }
    Ok(SlopeZeta::from_pairs(pairs))
}

/// A violated congruence `M_{d1} ≢ M_{d2} (mod l^k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub d1: usize,
    pub d2: usize,
    pub k: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateResult {
    pub modulus: usize,
    /// Pairs compared across all `k`.
    pub pairs_checked: usize,
    pub violations: Vec<Violation>,
}

impl CandidateResult {
    /// No violation among at least one compared pair.
    pub fn passes(&self) -> bool {
        self.pairs_checked > 0 && self.violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceReport {
    pub l: u64,
    pub k_max: u32,
    pub results: Vec<CandidateResult>,
    /// Smallest candidate passing with at least one compared pair.
    pub smallest_passing: Option<usize>,
}

impl CongruenceReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "l": self.l,
            "k_max": self.k_max,
            "smallest_passing": self.smallest_passing,
            "candidates": self.results.iter().map(|r| json!({
                "D": r.modulus,
                "pairs_checked": r.pairs_checked,
                "passes": r.passes(),
                "violations": r.violations.iter().map(|v| json!([v.d1, v.d2, v.k])).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// For each candidate `D` and `k ≤ k_max`, checks
/// `M_{d1} ≡ M_{d2} (mod l^k)` whenever `d1 ≡ d2 (mod D l^{k-1})`.
pub fn congruence_scan(moments: &BTreeMap<usize, BigInt>, l: u64, k_max: u32, candidates: &[usize]) -> CongruenceReport {
    let ds: Vec<usize> = moments.keys().cloned().collect();
    let mut results = Vec::new();
    for &dm in candidates {
        let mut pairs = 0;
        let mut violations = Vec::new();
        for k in 1..=k_max {
            let modulus = big(l as i64).pow(k);
            let period = dm * (l as usize).pow(k - 1);
            for (i, &d1) in ds.iter().enumerate() {
                for &d2 in &ds[i + 1..] {
                    if period == 0 || (d2 - d1) % period != 0 {
                        continue;
                    }
                    pairs += 1;
                    if !(&moments[&d1] - &moments[&d2]).mod_floor(&modulus).is_zero() {
                        violations.push(Violation { d1, d2, k });
                    }
                }
            }
        }
        results.push(CandidateResult { modulus: dm, pairs_checked: pairs, violations });
    }
    let smallest_passing = results.iter().filter(|r| r.passes()).map(|r| r.modulus).min();
    CongruenceReport { l, k_max, results, smallest_passing }
}

/// One row of an Euler-factor table.
#[derive(Clone, Debug, PartialEq)]
pub enum EulerRow {
    Factor { p: u64, d: usize, factor: ZetaFactorization, verdicts: serde_json::Value },
    Moment(MomentFactor),
    Skipped { p: u64, d: usize, reason: String },
    Failed { p: u64, d: usize, error: String },
}

impl EulerRow {
    pub fn p(&self) -> u64 {
        match self {
            EulerRow::Factor { p, .. } | EulerRow::Skipped { p, .. } | EulerRow::Failed { p, .. } => *p,
            EulerRow::Moment(m) => m.p,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            EulerRow::Factor { p, d, factor, verdicts } => json!({
                "p": p,
                "d": d,
                "factor": {"numerator": factor.numerator.to_json(), "denominator": factor.denominator.to_json()},
                "verdicts": verdicts,
            }),
            EulerRow::Moment(m) => m.to_json(),
            EulerRow::Skipped { p, d, reason } => json!({"p": p, "d": d, "factor": null, "verdicts": {"skipped": reason}}),
            EulerRow::Failed { p, d, error } => json!({"p": p, "d": d, "factor": null, "verdicts": {"error": error}}),
        }
    }
}

/// Which family an Euler table is built for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EulerRecipe {
    /// The Calabi-Yau family in `n` variables.
    CalabiYau { n: usize },
}

/// Per-prime factors of `Z_d(f ⊗ F_p, T)`, computed in parallel and sorted
/// by prime. For the two-variable family and `d ≥ 2` the row holds `R_d`;
/// otherwise the whole moment zeta function (total degree at most
/// `max_order`). Primes dividing `n + 1` are skipped.
pub fn euler_factor_table(
    recipe: EulerRecipe,
    d: usize,
    primes: &[u64],
    kmax: usize,
    max_order: usize,
    cap: u128,
) -> Vec<EulerRow> {
    let EulerRecipe::CalabiYau { n } = recipe;
    let mut rows: Vec<EulerRow> = primes
        .par_iter()
        .map(|&p| {
            if !crate::ffield::is_prime(p) {
                return EulerRow::Failed { p, d, error: format!("{p} is not prime") };
            }
            if (n as u64 + 1) % p == 0 {
                return EulerRow::Skipped { p, d, reason: format!("p divides n + 1 = {}", n + 1) };
            }
            let run = || -> Result<EulerRow> {
                if n == 2 && d >= 2 {
                    return Ok(EulerRow::Moment(cy2_r_d(p, d, kmax, cap)?));
                }
                let family = FamilySpec::calabi_yau(n, p)?;
                let counts = counting::moment_sequence(&family, d, kmax.max(2 * max_order), cap)?;
                let z = moment_zeta(&counts, max_order)?;
                let verdicts = json!({"total_degree": z.total_degree(), "degree_bound_tight": z.degree_bound_tight});
                Ok(EulerRow::Factor { p, d, factor: z, verdicts })
            };
            run().unwrap_or_else(|e| EulerRow::Failed { p, d, error: e.to_string() })
        })
        .collect();
    rows.sort_by_key(|r| r.p());
    rows
}

/// Coefficients `a_1..a_len` of `q ∏_{m≥1} (1 - q^{3m})^8`.
pub fn eta_product_coefficients(len: usize) -> Vec<BigInt> {
    // Series of ∏ (1 - x^{3m})^8 in x up to x^{len-1}.
    let mut s = vec![BigInt::zero(); len];
    s[0] = BigInt::one();
    let mut m = 1;
    while 3 * m < len {
        for _ in 0..8 {
            for i in (3 * m..len).rev() {
                let t = s[i - 3 * m].clone();
                s[i] -= t;
            }
        }
        m += 1;
    }
    // a_{i+1} is the coefficient of x^i.
    s
}

/// Value as a JSON number or string.
pub fn counts_json(counts: &[BigInt]) -> serde_json::Value {
    serde_json::Value::Array(counts.iter().map(bigint_json).collect())
}
