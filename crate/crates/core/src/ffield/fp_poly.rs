//! Dense univariate polynomials over a prime field `F_p`, coefficient lists
//! with the constant term first. Only what field construction needs.

pub(crate) fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

pub(crate) fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x + p - y) % p;
    }
    trim(&mut out);
    out
}

pub(crate) fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p);
    while r.len() > dm {
        let top = r.len() - 1;
        let c = r[top] * lead_inv % p;
        if c != 0 {
            for (i, &mi) in m.iter().enumerate() {
                let idx = top - dm + i;
                r[idx] = (r[idx] + p - c * mi % p) % p;
            }
        }
        trim(&mut r);
    }
    r
}

pub(crate) fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    rem(&prod, m, p)
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

/// `t^(p^i) mod m` for i = 1..=upto, by repeated p-th powering.
fn frobenius_orbit_of_t(m: &[u64], p: u64, upto: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::with_capacity(upto);
    let mut cur = rem(&[0, 1], m, p);
    for _ in 0..upto {
        cur = pow_poly(&cur, p, m, p);
        out.push(cur.clone());
    }
    out
}

fn pow_poly(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod(&result, &b, m, p);
        }
        b = mul_mod(&b, &b, m, p);
        e >>= 1;
    }
    result
}

/// Ben-Or test: monic `m` of degree k is irreducible iff it shares no factor
/// with `t^(p^i) - t` for 1 <= i <= k/2.
pub(crate) fn is_irreducible(m: &[u64], p: u64) -> bool {
    let k = m.len() - 1;
    if k == 1 {
        return true;
    }
    if m[0] == 0 {
        return false;
    }
    for tp in frobenius_orbit_of_t(m, p, k / 2) {
        let h = sub(&tp, &[0, 1], p);
        let g = gcd(m, &h, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent check: trial division by every monic polynomial of degree
    // 1..=k/2.
    fn irreducible_by_trial_division(m: &[u64], p: u64) -> bool {
        let k = m.len() - 1;
        for d in 1..=k / 2 {
            let count = p.pow(d as u32);
            for idx in 0..count {
                let mut f = vec![0u64; d + 1];
                let mut x = idx;
                for c in f.iter_mut().take(d) {
                    *c = x % p;
                    x /= p;
                }
                f[d] = 1;
                if rem(m, &f, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn ben_or_matches_trial_division() {
        for p in [2u64, 3, 5] {
            for k in 2..=4usize {
                let total = p.pow(k as u32);
                for idx in 0..total {
                    let mut m = vec![0u64; k + 1];
                    let mut x = idx;
                    for c in m.iter_mut().take(k) {
                        *c = x % p;
                        x /= p;
                    }
                    m[k] = 1;
                    assert_eq!(
                        is_irreducible(&m, p),
                        irreducible_by_trial_division(&m, p),
                        "p={p} m={m:?}"
                    );
                }
            }
        }
    }
}
