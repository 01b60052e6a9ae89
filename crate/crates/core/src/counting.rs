//! Exact point counts over finite fields.
//!
//! Everything here funnels into one enumeration kernel: each variable ranges
//! over a subfield `F_{p^a}` of a common work field, either over the torus
//! `F_{p^a}^*` or over the affine line. One variable is eliminated by
//! counting roots of the univariate polynomial left after fixing the others,
//! so the cost is the product of the other domain sizes times a root count.
//! Arithmetic uses Zech logarithms and per-term partial logarithms that are
//! updated incrementally as the enumeration advances.

use crate::error::{Error, Result};
use crate::ffield::zech::{Log, ZechField};
use crate::ffield::{log_p, Embedding, FieldDesc, FieldElem};
use crate::laurent::LaurentPoly;
use crate::linalg::binomial;
use crate::zetareconstruct::recurrence_reconstruct;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::json;
use std::collections::BTreeSet;
use std::time::Instant;

/// Default bound on the number of enumerated tuples.
pub const DEFAULT_CAP: u128 = 1_000_000_000;

const DEAD: u32 = u32::MAX;

/// Range of one variable: `F_{p^a}^*` or `F_{p^a}`, with `a` the absolute
/// degree over the prime field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Torus(usize),
    Affine(usize),
}

impl Domain {
    pub fn degree(self) -> usize {
        match self {
            Domain::Torus(a) | Domain::Affine(a) => a,
        }
    }

    pub fn is_affine(self) -> bool {
        matches!(self, Domain::Affine(_))
    }

    /// Number of points of the domain.
    pub fn size(self, p: u64) -> u128 {
        let q = (p as u128).pow(self.degree() as u32);
        if self.is_affine() {
            q
        } else {
            q - 1
        }
    }
}

/// Count and the number of enumerated tuples that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tally {
    pub count: u128,
    pub work: u128,
}

fn check_domains(f: &LaurentPoly, domains: &[Domain]) -> Result<()> {
    if domains.len() != f.n {
        return Err(Error::InvalidInput(format!("{} domains for {} variables", domains.len(), f.n)));
    }
    if domains.iter().any(|d| d.degree() == 0) {
        return Err(Error::InvalidDegree(0));
    }
    for (j, d) in domains.iter().enumerate() {
        if d.is_affine() && f.terms.keys().any(|u| u[j] < 0) {
            return Err(Error::InvalidInput(format!(
                "variable {} ranges over the affine line but has a negative exponent",
                j + 1
            )));
        }
    }
    Ok(())
}

/// Work field degree: lcm of the coefficient field degree and the domains.
fn work_degree(field: &FieldDesc, degrees: impl IntoIterator<Item = usize>) -> usize {
    degrees.into_iter().fold(field.k, |acc, a| acc.lcm(&a))
}

/// One enumerated variable as seen by [`Enumerator`].
struct EnumVar {
    values: Vec<Log>,
    /// Exponent of this variable in each term, reduced mod the group order.
    exps: Vec<u64>,
    /// Whether each term has a positive exponent (dies when the value is 0).
    positive: Vec<bool>,
}

/// Enumerates the product of variable domains, maintaining the log of every
/// term's partial product (`DEAD` when the term vanishes).
struct Enumerator<'a> {
    z: &'a ZechField,
    base: Vec<u32>,
    vars: Vec<EnumVar>,
}

impl<'a> Enumerator<'a> {
    fn new(z: &'a ZechField, base: Vec<u32>, term_exps: &[Vec<i64>], cols: &[usize], domains: &[Domain]) -> Self {
        let order = z.order() as i64;
        let vars = cols
            .iter()
            .map(|&j| {
                let dom = domains[j];
                let values: Vec<Log> = z
                    .subfield_elements(dom.degree())
                    .filter(|&v| dom.is_affine() || v != z.zero())
                    .collect();
                EnumVar {
                    values,
                    exps: term_exps.iter().map(|u| u[j].rem_euclid(order) as u64).collect(),
                    positive: term_exps.iter().map(|u| u[j] > 0).collect(),
                }
            })
            .collect();
        Enumerator { z, base, vars }
    }

    fn size(&self) -> u128 {
        self.vars.iter().map(|v| v.values.len() as u128).product()
    }

    fn step(&self, var: &EnumVar, cur: &[u32], value: Log, out: &mut [u32]) {
        let order = self.z.order() as u64;
        if value == self.z.zero() {
            for t in 0..cur.len() {
                out[t] = if var.positive[t] { DEAD } else { cur[t] };
            }
        } else {
            let v = value as u64;
            for t in 0..cur.len() {
                out[t] = if cur[t] == DEAD { DEAD } else { ((cur[t] as u64 + var.exps[t] * v) % order) as u32 };
            }
        }
    }

    /// Sums `leaf(state, term_logs)` over every tuple.
    fn run<S, I, F>(&self, init: I, leaf: F) -> u128
    where
        I: Fn() -> S + Sync,
        F: Fn(&mut S, &[u32]) -> u128 + Sync,
    {
        let m = self.vars.len();
        let nt = self.base.len();
        if m == 0 {
            return leaf(&mut init(), &self.base);
        }
        self.vars[0]
            .values
            .par_iter()
            .map_init(
                || (init(), vec![vec![0u32; nt]; m]),
                |(state, bufs), &v| {
                    let (first, rest) = bufs.split_first_mut().unwrap();
                    self.step(&self.vars[0], &self.base, v, first);
                    self.recurse(1, first, rest, state, &leaf)
                },
            )
            .sum()
    }

    fn recurse<S, F>(&self, level: usize, cur: &[u32], bufs: &mut [Vec<u32>], state: &mut S, leaf: &F) -> u128
    where
        F: Fn(&mut S, &[u32]) -> u128,
    {
        if level == self.vars.len() {
            return leaf(state, cur);
        }
        let (next, rest) = bufs.split_first_mut().unwrap();
        let mut acc = 0u128;
        for &v in &self.vars[level].values {
            self.step(&self.vars[level], cur, v, next);
            acc += self.recurse(level + 1, next, rest, state, leaf);
        }
        acc
    }
}

/// Coefficient logs of `f` in the work field `z`.
pub(crate) fn coefficient_logs(f: &LaurentPoly, z: &ZechField) -> Result<Vec<u32>> {
    let emb = Embedding::new(&f.field, &z.desc)?;
    f.terms.values().map(|c| Ok(z.from_elem(&emb.embed(c)?))).collect()
}

/// Number of points `x` with `x_j` in `domains[j]` and `f(x) = 0`.
pub fn count_in_domains(f: &LaurentPoly, domains: &[Domain], cap: u128) -> Result<Tally> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    check_domains(f, domains)?;
    let p = f.field.p;
    let present: Vec<usize> = (0..f.n).filter(|&j| f.terms.keys().any(|u| u[j] != 0)).collect();
    let free: u128 = (0..f.n)
        .filter(|j| !present.contains(j))
        .map(|j| domains[j].size(p))
        .try_fold(1u128, |acc, s| acc.checked_mul(s))
        .ok_or_else(|| Error::cap("free variable product", u128::MAX, u128::MAX))?;
    if present.is_empty() {
        // f is a nonzero constant.
        return Ok(Tally { count: 0, work: 1 });
    }
    let l = work_degree(&f.field, present.iter().map(|&j| domains[j].degree()));
    let size = (p as u128).checked_pow(l as u32).unwrap_or(u128::MAX);
    let z = ZechField::get(p, l).map_err(|_| Error::cap(format!("work field F_{{{p}^{l}}}"), size, crate::ffield::zech::ZECH_CAP as u128))?;
    let elim = *present.iter().max_by_key(|&&j| domains[j].degree()).unwrap();
    let others: Vec<usize> = present.iter().cloned().filter(|&j| j != elim).collect();
    let term_exps: Vec<Vec<i64>> = f.terms.keys().cloned().collect();
    let base = coefficient_logs(f, &z)?;
    let en = Enumerator::new(&z, base, &term_exps, &others, domains);
    let work = en.size();
    if work > cap {
        return Err(Error::cap("enumerated tuples", work, cap));
    }

    let dom = domains[elim];
    let a = dom.degree();
    let shift = if dom.is_affine() { 0 } else { term_exps.iter().map(|u| u[elim]).min().unwrap() };
    let slot: Vec<usize> = term_exps.iter().map(|u| (u[elim] - shift) as usize).collect();
    let deg = *slot.iter().max().unwrap();
    let zero = z.zero();
    let whole = dom.size(p);
    let zr: &ZechField = &z;
    let count = en.run(
        || vec![zero; deg + 1],
        |h, logs| {
            h.iter_mut().for_each(|c| *c = zero);
            for (t, &lg) in logs.iter().enumerate() {
                if lg != DEAD {
                    h[slot[t]] = zr.add(h[slot[t]], lg);
                }
            }
            let Some(lo) = h.iter().position(|&c| c != zero) else { return whole };
            let roots = zr.count_nonzero_roots(&h[lo..], a) as u128;
            if dom.is_affine() && lo > 0 {
                roots + 1
            } else {
                roots
            }
        },
    );
    Ok(Tally { count: count * free, work })
}

/// Reference count by evaluating `f` at every point with generic field
/// arithmetic. Independent of the log tables; meant for small instances.
pub fn count_in_domains_naive(f: &LaurentPoly, domains: &[Domain], cap: u128) -> Result<u128> {
    check_domains(f, domains)?;
    let p = f.field.p;
    let l = work_degree(&f.field, domains.iter().map(|d| d.degree()));
    let ext = FieldDesc::new(p, l)?;
    let total: u128 = domains.iter().map(|d| d.size(p)).product();
    if total > cap {
        return Err(Error::cap("naive enumeration", total, cap));
    }
    let pq = p;
    let values: Vec<Vec<FieldElem>> = domains
        .iter()
        .map(|d| {
            ext.elements()
                .filter(|x| (d.is_affine() || !x.is_zero()) && ext.in_subfield(x, pq, d.degree()).unwrap())
                .collect()
        })
        .collect();
    let mut idx = vec![0usize; f.n];
    let mut count = 0u128;
    if values.iter().any(|v| v.is_empty()) {
        return Ok(0);
    }
    loop {
        let point: Vec<FieldElem> = idx.iter().enumerate().map(|(j, &i)| values[j][i].clone()).collect();
        if f.evaluate_affine(&point, &ext)?.is_zero() {
            count += 1;
        }
        let mut j = f.n;
        loop {
            if j == 0 {
                return Ok(count);
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < values[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// Absolute degree of `F_q` after checking that `f` is defined over it.
fn base_degree(field: &FieldDesc, q: u64) -> Result<usize> {
    let e = log_p(q, field.p).ok_or(Error::NotAPowerOfP { q, p: field.p })?;
    if e % field.k != 0 {
        return Err(Error::IncompatibleDegrees(format!(
            "coefficients in F_{{{}^{}}} are not in F_{q}",
            field.p, field.k
        )));
    }
    Ok(e)
}

/// `#{x ∈ (F_{q^k}^*)^n : f(x) = 0}`.
pub fn count_points(f: &LaurentPoly, q: u64, k: usize) -> Result<u128> {
    Ok(count_points_capped(f, q, k, DEFAULT_CAP)?.count)
}

pub fn count_points_capped(f: &LaurentPoly, q: u64, k: usize, cap: u128) -> Result<Tally> {
    if k == 0 {
        return Err(Error::InvalidDegree(0));
    }
    let e = base_degree(&f.field, q)?;
    count_in_domains(f, &vec![Domain::Torus(e * k); f.n], cap)
}

/// A one-parameter family `f(x_1, ..., x_n, y)` over `F_q`, fibred over the
/// affine `y`-line, together with optional coordinate maps used for
/// partial moments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    /// Polynomial in `n + 1` variables; the last one is the parameter.
    pub f: LaurentPoly,
    pub q: u64,
    /// Coordinate maps `f_1, ..., f_m` on the total space (empty: the
    /// projections to every coordinate).
    pub maps: Vec<LaurentPoly>,
}

impl FamilySpec {
    pub fn new(f: LaurentPoly, q: u64) -> Result<Self> {
        base_degree(&f.field, q)?;
        if f.n < 2 {
            return Err(Error::InvalidInput("a family needs at least one variable and the parameter".into()));
        }
        let y = f.n - 1;
        if !f.terms.keys().any(|u| u[y] != 0) {
            return Err(Error::InvalidInput("the parameter does not occur".into()));
        }
        if f.terms.keys().any(|u| u[y] < 0) {
            return Err(Error::InvalidInput("the parameter must occur with nonnegative exponents".into()));
        }
        Ok(FamilySpec { f, q, maps: Vec::new() })
    }

    /// The family `x_1 + ... + x_n + 1/(x_1 ... x_n) - y` over `F_q`.
    pub fn calabi_yau(n: usize, q: u64) -> Result<Self> {
        let p = crate::newtonpolygon::prime_power(q)?.0;
        let field = FieldDesc::new(p, 1)?;
        let mut terms = Vec::new();
        for i in 0..n {
            let mut u = vec![0; n + 1];
            u[i] = 1;
            terms.push((u, field.one()));
        }
        let mut u = vec![-1; n + 1];
        u[n] = 0;
        terms.push((u, field.one()));
        let mut u = vec![0; n + 1];
        u[n] = 1;
        terms.push((u, field.from_int(-1)));
        Self::new(LaurentPoly::from_terms(n + 1, &field, terms)?, q)
    }

    pub fn with_maps(mut self, maps: Vec<LaurentPoly>) -> Result<Self> {
        for m in &maps {
            if m.n != self.f.n || m.field.p != self.f.field.p {
                return Err(Error::InvalidInput("coordinate map has the wrong shape".into()));
            }
        }
        self.maps = maps;
        Ok(self)
    }

    /// Number of fibre variables.
    pub fn n(&self) -> usize {
        self.f.n - 1
    }

    fn base_degree(&self) -> usize {
        base_degree(&self.f.field, self.q).expect("checked on construction")
    }

    /// The field `F_q` of parameter values.
    pub fn base_field(&self) -> Result<FieldDesc> {
        FieldDesc::new(self.f.field.p, self.base_degree())
    }

    /// Fibre polynomial `f(·, y)` for `y ∈ ext`.
    pub fn fibre(&self, y: &FieldElem, ext: &FieldDesc) -> Result<LaurentPoly> {
        self.f.substitute(self.f.n - 1, y, ext)
    }
}

/// Torus points of the fibre over `y ∈ F_q` with coordinates in `F_{q^d}`.
pub fn count_fibre(family: &FamilySpec, y: &FieldElem, d: usize) -> Result<u128> {
    count_fibre_capped(family, y, d, DEFAULT_CAP)
}

pub fn count_fibre_capped(family: &FamilySpec, y: &FieldElem, d: usize, cap: u128) -> Result<u128> {
    let base = family.base_field()?;
    if !base.contains(y) {
        return Err(Error::FieldMismatch(format!("{y:?} is not in F_{}", family.q)));
    }
    let g = family.fibre(y, &base)?;
    if g.is_zero() {
        return Ok(Domain::Torus(family.base_degree() * d).size(base.p).pow(g.n as u32));
    }
    Ok(count_points_capped(&g, family.q, d, cap)?.count)
}

/// `M_d(f ⊗ F_{q^k}) = Σ_{y ∈ F_{q^k}} #f^{-1}(y)(F_{q^{dk}})`.
///
/// Counted directly when the work field `F_{q^{dk}}` has log tables, and
/// otherwise by fitting each fibre's zeta function from counts over smaller
/// extensions and evaluating it at degree `d`.
pub fn moment(family: &FamilySpec, d: usize, k: usize, cap: u128) -> Result<BigInt> {
    if d == 0 || k == 0 {
        return Err(Error::InvalidDegree(0));
    }
    let e = family.base_degree();
    let p = family.f.field.p;
    let l = work_degree(&family.f.field, [e * d * k]);
    if (p as u128).checked_pow(l as u32).is_some_and(|s| s <= crate::ffield::zech::ZECH_CAP as u128) {
        let mut domains = vec![Domain::Torus(e * d * k); family.n()];
        domains.push(Domain::Affine(e * k));
        return Ok(BigInt::from(count_in_domains(&family.f, &domains, cap)?.count));
    }
    moment_via_fibres(family, d, k, cap)
}

/// `[M_d(f ⊗ F_{q^k}) for k = 1..=kmax]`.
pub fn moment_sequence(family: &FamilySpec, d: usize, kmax: usize, cap: u128) -> Result<Vec<BigInt>> {
    (1..=kmax).map(|k| moment(family, d, k, cap)).collect()
}

/// Power sums `Σ_{i=0}^{n-1} -(-1)^{n-i} C(n, i+1) Q^{ij}` of the trivial
/// factor of a nondegenerate toric hypersurface in `n` variables over
/// `F_Q`, for `j = 1..=count`.
pub fn toric_trivial_counts(n: usize, big_q: &BigInt, count: usize) -> Vec<BigInt> {
    (1..=count)
        .map(|j| {
            let mut acc = BigInt::zero();
            for i in 0..n {
                let sign: i64 = if (n - i) % 2 == 0 { -1 } else { 1 };
                let c = BigInt::from(binomial(n as u64, i as u64 + 1));
                acc += BigInt::from(sign) * c * num_traits::pow(big_q.clone(), i * j);
            }
            acc
        })
        .collect()
}

/// Fibre-by-fibre moment. For each Frobenius orbit of `y ∈ F_{q^k}`, the
/// fibre counts over `F_{q^{kj}}` (small `j`) minus the toric trivial part
/// are fitted by a rational function whose order is bounded by
/// `d(Δ_y) - 1` and evaluated at `j = d`.
pub fn moment_via_fibres(family: &FamilySpec, d: usize, k: usize, cap: u128) -> Result<BigInt> {
    let e = family.base_degree();
    let p = family.f.field.p;
    let base = FieldDesc::new(p, e * k)?;
    let qk = BigInt::from(p).pow((e * k) as u32);
    let qk_u64 = p.checked_pow((e * k) as u32).ok_or_else(|| Error::cap("fibre field", u128::MAX, u64::MAX as u128))?;
    let n = family.n();
    let mut total = BigInt::zero();
    let mut done: BTreeSet<u128> = BTreeSet::new();
    for y in base.elements() {
        let idx = base.index_of(&y);
        if done.contains(&idx) {
            continue;
        }
        // Frobenius orbit of y over F_q.
        let mut orbit = BTreeSet::new();
        let mut c = y.clone();
        loop {
            orbit.insert(base.index_of(&c));
            c = base.frobenius_power(&c, family.q, 1)?;
            if c == y {
                break;
            }
        }
        done.extend(orbit.iter().cloned());
        let g = family.fibre(&y, &base)?;
        let value = if g.is_zero() {
            BigInt::from(Domain::Torus(e * k * d).size(p)).pow(n as u32)
        } else {
            fibre_count_extrapolated(&g, qk_u64, &qk, d, cap)?
        };
        total += value * BigInt::from(orbit.len());
    }
    Ok(total)
}

/// `#{g = 0}` over `F_{Q^d}` from a rational fit of the counts over `F_{Q^j}`.
pub fn fibre_count_extrapolated(g: &LaurentPoly, big_q: u64, big_q_int: &BigInt, d: usize, cap: u128) -> Result<BigInt> {
    let n = g.n;
    let bound = g
        .newton_polytope()
        .and_then(|delta| delta.normalized_volume())
        .map(|v| v.saturating_sub(1) as usize)
        .ok();
    let p = g.field.p;
    let e = log_p(big_q, p).ok_or(Error::NotAPowerOfP { q: big_q, p })?;
    // Extensions with log tables available.
    let mut jmax = 0;
    while (p as u128).pow((e * (jmax + 1)) as u32) <= crate::ffield::zech::ZECH_CAP as u128 {
        jmax += 1;
    }
    let order = match bound {
        Some(b) => b,
        None => jmax.saturating_sub(1) / 2,
    };
    let want = (2 * order + 2).max(1);
    let jlen = want.min(jmax);
    if jlen < 2 * order {
        return Err(Error::Insufficient(format!(
            "fibre zeta of order {order} needs {} counts, only {jlen} extensions fit",
            2 * order
        )));
    }
    if d <= jlen {
        return Ok(BigInt::from(count_points_capped(g, big_q, d, cap)?.count));
    }
    let trivial = toric_trivial_counts(n, big_q_int, d.max(jlen));
    let mut residual = Vec::with_capacity(jlen);
    for j in 1..=jlen {
        let c = BigInt::from(count_points_capped(g, big_q, j, cap)?.count);
        residual.push(c - &trivial[j - 1]);
    }
    let fit = recurrence_reconstruct(&residual, order)?;
    let r = fit.counts(d);
    Ok(&trivial[d - 1] + &r[d - 1])
}

/// Maps given as monomials `x_j` (coefficient one).
fn projection_index(m: &LaurentPoly) -> Option<usize> {
    if m.terms.len() != 1 {
        return None;
    }
    let (u, c) = m.terms.iter().next().unwrap();
    if *c != m.field.one() {
        return None;
    }
    let ones: Vec<usize> = (0..u.len()).filter(|&j| u[j] == 1).collect();
    (ones.len() == 1 && u.iter().filter(|&&x| x != 0).count() == 1).then(|| ones[0])
}

/// `M_{d_1, ..., d_m}(f ⊗ F_{q^k})`: points `x` of the total space
/// (torus in the fibre variables, affine in the parameter) with
/// `f_i(x) ∈ F_{q^{d_i k}}` for every map.
///
/// When the maps are the coordinate projections this is a direct kernel
/// count with per-variable domains. Otherwise the points are enumerated over
/// `F_{q^{lcm(d) k}}`, which assumes the maps jointly embed the total space.
pub fn partial_moment(family: &FamilySpec, degrees: &[usize], k: usize, cap: u128) -> Result<BigInt> {
    let nv = family.f.n;
    let e = family.base_degree();
    if degrees.iter().any(|&d| d == 0) || k == 0 {
        return Err(Error::InvalidDegree(0));
    }
    let maps: Vec<LaurentPoly> = if family.maps.is_empty() {
        (0..nv)
            .map(|j| {
                let mut u = vec![0; nv];
                u[j] = 1;
                LaurentPoly::from_terms(nv, &family.f.field, [(u, family.f.field.one())])
            })
            .collect::<Result<_>>()?
    } else {
        family.maps.clone()
    };
    if maps.len() != degrees.len() {
        return Err(Error::InvalidInput(format!("{} degrees for {} maps", degrees.len(), maps.len())));
    }
    let kinds: Vec<Domain> =
        (0..nv).map(|j| if j + 1 == nv { Domain::Affine(1) } else { Domain::Torus(1) }).collect();
    let proj: Option<Vec<usize>> = maps.iter().map(projection_index).collect();
    if let Some(idx) = proj {
        let distinct: BTreeSet<usize> = idx.iter().cloned().collect();
        if distinct.len() == nv && idx.len() == nv {
            let mut domains = kinds.clone();
            for (i, &j) in idx.iter().enumerate() {
                let a = e * degrees[i] * k;
                domains[j] = if kinds[j].is_affine() { Domain::Affine(a) } else { Domain::Torus(a) };
            }
            return Ok(BigInt::from(count_in_domains(&family.f, &domains, cap)?.count));
        }
    }
    partial_moment_general(family, &maps, degrees, k, cap)
}

fn partial_moment_general(
    family: &FamilySpec,
    maps: &[LaurentPoly],
    degrees: &[usize],
    k: usize,
    cap: u128,
) -> Result<BigInt> {
    let nv = family.f.n;
    let e = family.base_degree();
    let l = degrees.iter().fold(1usize, |a, &d| a.lcm(&d)) * k * e;
    let l = work_degree(&family.f.field, [l]);
    let p = family.f.field.p;
    let z = ZechField::get(p, l)?;
    let domains: Vec<Domain> =
        (0..nv).map(|j| if j + 1 == nv { Domain::Affine(l) } else { Domain::Torus(l) }).collect();
    check_domains(&family.f, &domains)?;
    let total: u128 = domains.iter().map(|d| d.size(p)).product();
    if total > cap {
        return Err(Error::cap("enumerated tuples", total, cap));
    }
    let f_logs = LogPoly::new(&family.f, &z)?;
    let map_logs: Vec<LogPoly> = maps.iter().map(|m| LogPoly::new(m, &z)).collect::<Result<_>>()?;
    let steps: Vec<u32> = degrees.iter().map(|&d| z.subfield_step(e * d * k)).collect();
    let values: Vec<Vec<Log>> = domains
        .iter()
        .map(|d| z.subfield_elements(l).filter(|&v| d.is_affine() || v != z.zero()).collect())
        .collect();
    let last = nv - 1;
    let mut count = 0u128;
    let mut point = vec![0u32; nv];
    let mut idx = vec![0usize; last];
    loop {
        for j in 0..last {
            point[j] = values[j][idx[j]];
        }
        for &yv in &values[last] {
            point[last] = yv;
            if f_logs.eval(&z, &point) == Some(z.zero())
                && map_logs.iter().zip(&steps).all(|(m, &s)| m.eval(&z, &point).is_some_and(|v| z.in_subfield(v, s)))
            {
                count += 1;
            }
        }
        let mut j = last;
        loop {
            if j == 0 {
                return Ok(BigInt::from(count));
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < values[j].len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// A polynomial with coefficients stored as logs in a work field.
struct LogPoly {
    terms: Vec<(Vec<i64>, Log)>,
}

impl LogPoly {
    fn new(f: &LaurentPoly, z: &ZechField) -> Result<Self> {
        let logs = coefficient_logs(f, z)?;
        Ok(LogPoly { terms: f.terms.keys().cloned().zip(logs).collect() })
    }

    /// Value at a point given by logs; `None` if a negative power of zero
    /// is needed.
    fn eval(&self, z: &ZechField, point: &[Log]) -> Option<Log> {
        let mut acc = z.zero();
        for (u, c) in &self.terms {
            let mut t = *c;
            for (j, &e) in u.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if point[j] == z.zero() {
                    if e < 0 {
                        return None;
                    }
                    t = z.zero();
                    break;
                }
                t = z.mul(t, z.pow(point[j], e));
            }
            acc = z.add(acc, t);
        }
        Some(acc)
    }
}

/// `Σ_{y ∈ F_{q^k}^{n'}} Σ_{x ∈ F_{q^{dk}}^n} p·[Tr(g(x, y)) = 0]`: the number
/// of solutions of `x_0^p - x_0 = g(x, y)` with `x_0 ∈ F_{q^{dk}}`.
///
/// `g` is a polynomial in `n_x + n_y` variables, the first `n_x` forming the
/// `x`-block.
pub fn artin_schreier_moment(g: &LaurentPoly, n_x: usize, q: u64, d: usize, k: usize, cap: u128) -> Result<BigInt> {
    if d == 0 || k == 0 {
        return Err(Error::InvalidDegree(0));
    }
    if n_x > g.n {
        return Err(Error::InvalidInput("x-block larger than the variable count".into()));
    }
    let e = base_degree(&g.field, q)?;
    let p = g.field.p;
    let mut domains = vec![Domain::Affine(e * d * k); n_x];
    domains.extend(std::iter::repeat(Domain::Affine(e * k)).take(g.n - n_x));
    check_domains(g, &domains)?;
    let l = work_degree(&g.field, [e * d * k]);
    let z = ZechField::get(p, l)?;
    let trace = z.trace_table();
    let cols: Vec<usize> = (0..g.n).collect();
    let term_exps: Vec<Vec<i64>> = g.terms.keys().cloned().collect();
    let base = coefficient_logs(g, &z)?;
    let en = Enumerator::new(&z, base, &term_exps, &cols, &domains);
    let work = en.size();
    if work > cap {
        return Err(Error::cap("enumerated tuples", work, cap));
    }
    let zero = z.zero();
    let zr: &ZechField = &z;
    let hits = en.run(
        || (),
        |_, logs| {
            let mut acc = zero;
            for &lg in logs {
                if lg != DEAD {
                    acc = zr.add(acc, lg);
                }
            }
            u128::from(trace[acc as usize] == 0)
        },
    );
    Ok(BigInt::from(hits) * BigInt::from(p))
}

/// `g(x_{1,·}, y) + ... + g(x_{d,·}, y)`: `d` disjoint copies of the
/// `x`-block sharing the `y`-block. Variables are ordered block by block
/// followed by `y`; the returned names are `x{block}_{j}` and `y{j}`.
pub fn fibered_sum(g: &LaurentPoly, n_x: usize, d: usize) -> Result<(LaurentPoly, Vec<String>)> {
    if d == 0 {
        return Err(Error::InvalidDegree(0));
    }
    if n_x > g.n {
        return Err(Error::InvalidInput("x-block larger than the variable count".into()));
    }
    let n_y = g.n - n_x;
    let nv = d * n_x + n_y;
    let mut terms = Vec::new();
    for b in 0..d {
        for (u, c) in &g.terms {
            let mut w = vec![0i64; nv];
            w[b * n_x..(b + 1) * n_x].copy_from_slice(&u[..n_x]);
            w[d * n_x..].copy_from_slice(&u[n_x..]);
            terms.push((w, c.clone()));
        }
    }
    let mut names = Vec::with_capacity(nv);
    for b in 1..=d {
        for j in 1..=n_x {
            names.push(format!("x{b}_{j}"));
        }
    }
    for j in 1..=n_y {
        names.push(format!("y{j}"));
    }
    Ok((LaurentPoly::from_terms(nv, &g.field, terms)?, names))
}

/// Outcome of the smoothness test on a leading form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeligneVerdict {
    /// `p` divides the degree.
    DegreeDivisibleByP,
    /// No singular projective point over `F_{p^j}` for `j ≤ bound`.
    SmoothUpTo(usize),
    /// A common projective zero of `g_m` and its partials over `F_{p^j}`.
    SingularWitness { extension: usize, point: Vec<FieldElem> },
}

impl DeligneVerdict {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            DeligneVerdict::DegreeDivisibleByP => json!({"verdict": "p_divides_degree"}),
            DeligneVerdict::SmoothUpTo(b) => json!({"verdict": "smooth_up_to", "bound": b}),
            DeligneVerdict::SingularWitness { extension, point } => json!({
                "verdict": "singular",
                "extension": extension,
                "point": point.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            }),
        }
    }
}

/// Checks the hypotheses on `g` of degree `m`: `p ∤ m` and a smooth leading
/// form `g_m`, searching projective points over `F_{p^j}`, `j ≤ bound`.
pub fn deligne_polynomial_check(g: &LaurentPoly, m: i64, bound: usize, cap: u128) -> Result<DeligneVerdict> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let p = g.field.p;
    if m <= 0 {
        return Err(Error::InvalidInput(format!("degree {m} must be positive")));
    }
    if (m as u64) % p == 0 {
        return Ok(DeligneVerdict::DegreeDivisibleByP);
    }
    if g.terms.keys().flatten().any(|&e| e < 0) {
        return Err(Error::InvalidInput("negative exponents in a polynomial".into()));
    }
    let gm = g.homogeneous_part(m);
    if gm.is_zero() {
        return Err(Error::InvalidInput(format!("no terms of degree {m}")));
    }
    let nv = g.n;
    let mut system = vec![gm.clone()];
    for i in 0..nv {
        let d = gm.partial(i)?;
        if !d.is_zero() {
            system.push(d);
        }
    }
    if nv == 0 {
        return Err(Error::InvalidInput("no variables".into()));
    }
    for j in 1..=bound {
        let ext = FieldDesc::new(p, j.lcm(&g.field.k))?;
        let size = ext.size().unwrap_or(u128::MAX);
        let points = size.checked_pow(nv as u32 - 1).unwrap_or(u128::MAX).saturating_mul(nv as u128);
        if points > cap {
            return Err(Error::cap("projective points", points, cap));
        }
        let elems: Vec<FieldElem> = ext.elements().collect();
        // Normalized representatives: first nonzero coordinate equal to 1.
        for lead in 0..nv {
            let free = nv - lead - 1;
            let mut idx = vec![0usize; free];
            loop {
                let mut point = vec![ext.zero(); nv];
                point[lead] = ext.one();
                for (t, &i) in idx.iter().enumerate() {
                    point[lead + 1 + t] = elems[i].clone();
                }
                let mut singular = true;
                for s in &system {
                    if !s.evaluate_affine(&point, &ext)?.is_zero() {
                        singular = false;
                        break;
                    }
                }
                if singular {
                    return Ok(DeligneVerdict::SingularWitness { extension: ext.k, point });
                }
                let mut t = free;
                let mut advanced = false;
                while t > 0 {
                    t -= 1;
                    idx[t] += 1;
                    if idx[t] < elems.len() {
                        advanced = true;
                        break;
                    }
                    idx[t] = 0;
                }
                if !advanced {
                    break;
                }
            }
        }
    }
    Ok(DeligneVerdict::SmoothUpTo(bound))
}

/// One count result with provenance, serialized as a JSON line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountRecord {
    pub op: String,
    pub q: u64,
    pub k: usize,
    /// Moment degree, list of partial degrees, or `null`.
    pub d: serde_json::Value,
    pub value: BigInt,
    pub elapsed_ms: u128,
}

impl CountRecord {
    pub fn timed(op: &str, q: u64, k: usize, d: serde_json::Value, f: impl FnOnce() -> Result<BigInt>) -> Result<Self> {
        let start = Instant::now();
        let value = f()?;
        Ok(CountRecord { op: op.into(), q, k, d, value, elapsed_ms: start.elapsed().as_millis() })
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "op": self.op,
            "q": self.q,
            "k": self.k,
            "d": self.d,
            "value": crate::intpoly::bigint_json(&self.value),
            "elapsed_ms": self.elapsed_ms as u64,
        })
    }
}

/// `((Q - 1)^n - (-1)^n) / Q` with `Q = q^d`, the centre of the fibre-count
/// estimate for the Calabi-Yau family.
pub fn cy_fibre_centre(n: usize, q: u64, d: usize) -> num_rational::BigRational {
    let big_q = BigInt::from(q).pow(d as u32);
    let sign = if n % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    num_rational::BigRational::new((&big_q - 1u32).pow(n as u32) - sign, big_q)
}
