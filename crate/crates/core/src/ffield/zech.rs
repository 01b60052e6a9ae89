//! Zech-logarithm tables for fast arithmetic in small fields.
//!
//! A nonzero element is stored as its discrete logarithm with respect to a
//! fixed primitive element `g`; zero is the sentinel [`ZechField::zero`].
//! Multiplication is addition of logarithms and addition goes through the
//! table `zech[n] = log(1 + g^n)`. Tables are built once per `(p, k)` and
//! shared process-wide.

use super::{FieldDesc, FieldElem};
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Largest field size for which tables are built.
pub const ZECH_CAP: u64 = 1 << 23;

pub type Log = u32;

pub struct ZechField {
    pub desc: FieldDesc,
    /// Field size.
    pub q: u64,
    /// Multiplicative order `q - 1`; also the log used for zero.
    order: u32,
    /// Packed element (little-endian base `p` digits) for each log.
    exp: Vec<u32>,
    /// Log for each packed element; `order` for zero.
    log: Vec<u32>,
    zech: Vec<u32>,
    neg_one: u32,
    generator: FieldElem,
    trace: OnceLock<Vec<u32>>,
}

impl std::fmt::Debug for ZechField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ZechField({:?})", self.desc)
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

type Cache = Mutex<HashMap<(u64, usize), Arc<ZechField>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl ZechField {
    /// Shared tables for `F_{p^k}`, built on first use.
    pub fn get(p: u64, k: usize) -> Result<Arc<ZechField>> {
        let size = (p as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        if size > ZECH_CAP as u128 {
            return Err(Error::cap(format!("log tables for F_{{{p}^{k}}}"), size, ZECH_CAP as u128));
        }
        if let Some(z) = cache().lock().unwrap().get(&(p, k)) {
            return Ok(z.clone());
        }
        let desc = FieldDesc::new(p, k)?;
        let z = Arc::new(Self::build(desc));
        let mut guard = cache().lock().unwrap();
        Ok(guard.entry((p, k)).or_insert(z).clone())
    }

    fn build(desc: FieldDesc) -> ZechField {
        let p = desc.p;
        let k = desc.k;
        let q = p.pow(k as u32);
        let order = (q - 1) as u32;
        let factors = prime_factors(q - 1);
        let one = desc.one();
        let generator = (1..q as u128)
            .map(|i| desc.element_at(i))
            .find(|g| factors.iter().all(|&r| desc.pow(g, ((q - 1) / r) as u128) != one))
            .expect("multiplicative group is cyclic");

        let mut exp = vec![0u32; order as usize];
        let mut log = vec![order; q as usize];
        let mut cur = vec![0u64; k];
        cur[0] = 1;
        let mut buf = vec![0u64; 2 * k];
        for l in 0..order {
            let packed = pack(&cur, p);
            exp[l as usize] = packed;
            log[packed as usize] = l;
            mul_in_place(&mut cur, &generator.coeffs, &desc.modulus, p, &mut buf);
        }
        let mut zech = vec![order; order as usize];
        for n in 0..order as usize {
            let v = exp[n] as u64;
            let c0 = v % p;
            let w = v - c0 + (c0 + 1) % p;
            zech[n] = log[w as usize];
        }
        let neg_one = if p == 2 { 0 } else { order / 2 };
        ZechField { desc, q, order, exp, log, zech, neg_one, generator, trace: OnceLock::new() }
    }

    #[inline]
    pub fn zero(&self) -> Log {
        self.order
    }

    #[inline]
    pub fn one(&self) -> Log {
        0
    }

    /// Order of the multiplicative group.
    #[inline]
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn generator(&self) -> &FieldElem {
        &self.generator
    }

    #[inline]
    pub fn is_zero(&self, a: Log) -> bool {
        a == self.order
    }

    #[inline]
    pub fn mul(&self, a: Log, b: Log) -> Log {
        if a == self.order || b == self.order {
            return self.order;
        }
        let s = a as u64 + b as u64;
        let o = self.order as u64;
        (if s >= o { s - o } else { s }) as Log
    }

    #[inline]
    pub fn add(&self, a: Log, b: Log) -> Log {
        if a == self.order {
            return b;
        }
        if b == self.order {
            return a;
        }
        let n = if b >= a { b - a } else { b + self.order - a };
        let z = self.zech[n as usize];
        if z == self.order {
            return self.order;
        }
        self.mul(a, z)
    }

    #[inline]
    pub fn neg(&self, a: Log) -> Log {
        self.mul(a, self.neg_one)
    }

    #[inline]
    pub fn sub(&self, a: Log, b: Log) -> Log {
        self.add(a, self.neg(b))
    }

    /// Inverse of a nonzero element.
    #[inline]
    pub fn inv(&self, a: Log) -> Log {
        debug_assert!(a != self.order);
        if a == 0 {
            0
        } else {
            self.order - a
        }
    }

    #[inline]
    pub fn div(&self, a: Log, b: Log) -> Log {
        self.mul(a, self.inv(b))
    }

    /// `a^e` for a signed exponent (`a` nonzero when `e < 0`).
    pub fn pow(&self, a: Log, e: i64) -> Log {
        if a == self.order {
            return if e == 0 { 0 } else { self.order };
        }
        let o = self.order as i128;
        ((a as i128 * e as i128).rem_euclid(o)) as Log
    }

    /// `g^l`, reducing `l` modulo the group order.
    #[inline]
    pub fn from_log(&self, l: u64) -> Log {
        (l % self.order as u64) as Log
    }

    pub fn from_int(&self, c: i64) -> Log {
        let v = c.rem_euclid(self.desc.p as i64) as usize;
        self.log[v]
    }

    pub fn from_elem(&self, x: &FieldElem) -> Log {
        self.log[pack(&x.coeffs, self.desc.p) as usize]
    }

    pub fn to_elem(&self, a: Log) -> FieldElem {
        let mut coeffs = vec![0u64; self.desc.k];
        if a != self.order {
            let mut v = self.exp[a as usize] as u64;
            for c in coeffs.iter_mut() {
                *c = v % self.desc.p;
                v /= self.desc.p;
            }
        }
        FieldElem { coeffs }
    }

    /// Log step generating the subfield `F_{p^a}^*`, i.e. `(q-1)/(p^a-1)`.
    pub fn subfield_step(&self, a: usize) -> u32 {
        assert!(a >= 1 && self.desc.k % a == 0, "F_{{p^{a}}} is not a subfield");
        let sub = self.desc.p.pow(a as u32) - 1;
        ((self.q - 1) / sub) as u32
    }

    #[inline]
    pub fn in_subfield(&self, x: Log, step: u32) -> bool {
        x == self.order || x % step == 0
    }

    /// Elements of `F_{p^a}` (zero first, then by increasing log).
    pub fn subfield_elements(&self, a: usize) -> impl Iterator<Item = Log> + '_ {
        let step = self.subfield_step(a);
        std::iter::once(self.order).chain((0..self.order).step_by(step as usize))
    }

    /// A square root, for odd characteristic.
    pub fn sqrt(&self, a: Log) -> Option<Log> {
        if a == self.order {
            return Some(a);
        }
        if self.desc.p == 2 {
            // Squaring is bijective; a = g^l with l + order even when needed.
            let l = if a % 2 == 0 { a / 2 } else { ((a as u64 + self.order as u64) / 2) as u32 };
            return Some(l);
        }
        (a % 2 == 0).then_some(a / 2)
    }

    /// Absolute trace to `F_p` of every element, indexed by log
    /// (index `order` holds the trace of zero).
    pub fn trace_table(&self) -> &[u32] {
        self.trace.get_or_init(|| {
            let p = self.desc.p;
            let basis: Vec<u64> = (0..self.desc.k)
                .map(|i| {
                    let mut c = vec![0u64; self.desc.k];
                    c[i] = 1;
                    self.desc.trace_to_prime(&FieldElem { coeffs: c })
                })
                .collect();
            let mut out = Vec::with_capacity(self.order as usize + 1);
            for l in 0..=self.order {
                let mut v = if l == self.order { 0 } else { self.exp[l as usize] as u64 };
                let mut t = 0u64;
                for &b in &basis {
                    t += (v % p) * b;
                    v /= p;
                }
                out.push((t % p) as u32);
            }
            out
        })
    }

    // ---- univariate polynomials with log coefficients, constant term first ----

    pub fn poly_trim(&self, a: &mut Vec<Log>) {
        while a.last() == Some(&self.order) {
            a.pop();
        }
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn poly_degree(&self, a: &[Log]) -> Option<usize> {
        a.iter().rposition(|&c| c != self.order)
    }

    pub fn poly_eval(&self, a: &[Log], x: Log) -> Log {
        let mut acc = self.order;
        for &c in a.iter().rev() {
            acc = self.add(self.mul(acc, x), c);
        }
        acc
    }

    fn make_monic(&self, a: &mut [Log]) {
        let lead = *a.last().unwrap();
        let inv = self.inv(lead);
        for c in a.iter_mut() {
            *c = self.mul(*c, inv);
        }
    }

    /// Remainder of `a` modulo a monic polynomial `m` (in place).
    fn poly_rem_monic(&self, a: &mut Vec<Log>, m: &[Log]) {
        let dm = m.len() - 1;
        while a.len() > dm {
            let top = a.len() - 1;
            let c = a[top];
            if c != self.order {
                let nc = self.neg(c);
                for (i, &mi) in m.iter().enumerate().take(dm) {
                    let idx = top - dm + i;
                    a[idx] = self.add(a[idx], self.mul(nc, mi));
                }
            }
            a.pop();
        }
        self.poly_trim(a);
    }

    pub fn poly_gcd(&self, a: &[Log], b: &[Log]) -> Vec<Log> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        self.poly_trim(&mut x);
        self.poly_trim(&mut y);
        while !y.is_empty() {
            self.make_monic(&mut y);
            self.poly_rem_monic(&mut x, &y);
            std::mem::swap(&mut x, &mut y);
        }
        if !x.is_empty() {
            self.make_monic(&mut x);
        }
        x
    }

    /// `X^e mod m` for monic `m` of degree at least 1.
    fn x_pow_mod(&self, e: u64, m: &[Log]) -> Vec<Log> {
        let d = m.len() - 1;
        let z = self.order;
        let mut r = vec![z, 0];
        self.poly_rem_monic(&mut r, m);
        let bits = 64 - e.leading_zeros();
        let mut sq = vec![z; 2 * d];
        for i in (0..bits - 1).rev() {
            sq.clear();
            sq.resize((2 * r.len()).max(1), z);
            for (a, &ra) in r.iter().enumerate() {
                if ra == z {
                    continue;
                }
                for (b, &rb) in r.iter().enumerate() {
                    sq[a + b] = self.add(sq[a + b], self.mul(ra, rb));
                }
            }
            self.poly_trim(&mut sq);
            self.poly_rem_monic(&mut sq, m);
            std::mem::swap(&mut r, &mut sq);
            if (e >> i) & 1 == 1 {
                r.insert(0, z);
                self.poly_rem_monic(&mut r, m);
            }
        }
        r
    }

    /// Number of distinct nonzero roots of `h` lying in `F_{p^a}`, where the
    /// constant term of `h` is nonzero.
    pub fn count_nonzero_roots(&self, h: &[Log], a: usize) -> u64 {
        let z = self.order;
        let Some(deg) = self.poly_degree(h) else {
            return self.desc.p.pow(a as u32) - 1;
        };
        debug_assert!(h[0] != z);
        let step = self.subfield_step(a);
        match deg {
            0 => 0,
            1 => {
                let r = self.neg(self.div(h[0], h[1]));
                u64::from(r % step == 0)
            }
            2 if self.desc.p != 2 => {
                let (c, b, a2) = (h[0], h[1], h[2]);
                let four = self.from_int(4);
                let disc = self.sub(self.mul(b, b), self.mul(four, self.mul(a2, c)));
                let two_a = self.mul(self.from_int(2), a2);
                if disc == z {
                    let r = self.neg(self.div(b, two_a));
                    return u64::from(r % step == 0);
                }
                let Some(s) = self.sqrt(disc) else { return 0 };
                let nb = self.neg(b);
                let r1 = self.div(self.add(nb, s), two_a);
                let r2 = self.div(self.sub(nb, s), two_a);
                u64::from(r1 % step == 0) + u64::from(r2 % step == 0)
            }
            _ => {
                let sub_size = self.desc.p.pow(a as u32);
                if sub_size <= 4 * deg as u64 + 8 {
                    return (0..self.order)
                        .step_by(step as usize)
                        .filter(|&x| self.poly_eval(&h[..=deg], x) == z)
                        .count() as u64;
                }
                let mut m = h[..=deg].to_vec();
                self.make_monic(&mut m);
                let mut xq = self.x_pow_mod(sub_size, &m);
                // xq - X
                if xq.len() < 2 {
                    xq.resize(2, z);
                }
                xq[1] = self.sub(xq[1], 0);
                self.poly_trim(&mut xq);
                let g = self.poly_gcd(&m, &xq);
                g.len().saturating_sub(1) as u64
            }
        }
    }

    /// The distinct nonzero roots of `h` in `F_{p^a}`, by increasing log.
    pub fn nonzero_roots(&self, h: &[Log], a: usize) -> Vec<Log> {
        let step = self.subfield_step(a);
        let z = self.order;
        if self.poly_degree(h).is_none() {
            return (0..self.order).step_by(step as usize).collect();
        }
        if self.count_nonzero_roots_any(h, a) == 0 {
            return Vec::new();
        }
        (0..self.order).step_by(step as usize).filter(|&x| self.poly_eval(h, x) == z).collect()
    }

    fn count_nonzero_roots_any(&self, h: &[Log], a: usize) -> u64 {
        let mut g = h.to_vec();
        self.poly_trim(&mut g);
        let lead_zeros = g.iter().take_while(|&&c| c == self.order).count();
        self.count_nonzero_roots(&g[lead_zeros..], a)
    }
}

fn pack(coeffs: &[u64], p: u64) -> u32 {
    coeffs.iter().rev().fold(0u64, |acc, &c| acc * p + c) as u32
}

/// `cur <- cur * g mod m` over `F_p`, with scratch space `buf` of length `2k`.
fn mul_in_place(cur: &mut [u64], g: &[u64], m: &[u64], p: u64, buf: &mut [u64]) {
    let k = cur.len();
    for b in buf.iter_mut() {
        *b = 0;
    }
    for (i, &x) in cur.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in g.iter().enumerate() {
            buf[i + j] = (buf[i + j] + x * y) % p;
        }
    }
    // m is monic of degree k.
    for top in (k..2 * k - 1).rev() {
        let c = buf[top];
        if c == 0 {
            continue;
        }
        for i in 0..k {
            let idx = top - k + i;
            buf[idx] = (buf[idx] + (p - c) * m[i]) % p;
        }
        buf[top] = 0;
    }
    cur.copy_from_slice(&buf[..k]);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_agree_with_generic_arithmetic() {
        for (p, k) in [(2u64, 1usize), (2, 4), (3, 3), (7, 2), (5, 1), (13, 1)] {
            let z = ZechField::get(p, k).unwrap();
            let f = &z.desc;
            let elems: Vec<FieldElem> = f.elements().collect();
            for x in &elems {
                let lx = z.from_elem(x);
                assert_eq!(&z.to_elem(lx), x);
                for y in elems.iter().step_by(3) {
                    let ly = z.from_elem(y);
                    assert_eq!(z.to_elem(z.add(lx, ly)), f.add(x, y));
                    assert_eq!(z.to_elem(z.mul(lx, ly)), f.mul(x, y));
                    assert_eq!(z.to_elem(z.sub(lx, ly)), f.sub(x, y));
                }
            }
        }
    }

    #[test]
    fn subfield_logs_match_frobenius_test() {
        let z = ZechField::get(2, 6).unwrap();
        for a in [1usize, 2, 3, 6] {
            let via_logs: Vec<FieldElem> = z.subfield_elements(a).map(|l| z.to_elem(l)).collect();
            assert_eq!(via_logs.len() as u64, 2u64.pow(a as u32));
            for e in &via_logs {
                assert!(z.desc.in_subfield(e, 2, a).unwrap());
            }
        }
    }

    #[test]
    fn trace_table_matches_direct_trace() {
        let z = ZechField::get(3, 4).unwrap();
        let t = z.trace_table();
        for l in 0..=z.order() {
            assert_eq!(t[l as usize] as u64, z.desc.trace_to_prime(&z.to_elem(l)));
        }
    }

    #[test]
    fn root_counts_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for (p, k) in [(2u64, 6usize), (3, 4), (7, 2), (5, 3)] {
            let z = ZechField::get(p, k).unwrap();
            let subs: Vec<usize> = (1..=k).filter(|a| k % a == 0).collect();
            for _ in 0..300 {
                let deg = rng.gen_range(1..=5);
                let mut h: Vec<Log> = (0..=deg).map(|_| rng.gen_range(0..=z.order())).collect();
                if h[0] == z.zero() {
                    h[0] = 0;
                }
                for &a in &subs {
                    let step = z.subfield_step(a);
                    let brute = (0..z.order())
                        .step_by(step as usize)
                        .filter(|&x| z.poly_eval(&h, x) == z.zero())
                        .count() as u64;
                    assert_eq!(z.count_nonzero_roots(&h, a), brute, "p={p} k={k} a={a} h={h:?}");
                }
            }
        }
    }
}
