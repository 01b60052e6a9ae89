//! Small exact linear-algebra helpers over ℤ and ℚ.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Determinant of a square integer matrix by fraction-free elimination.
/// Returns `None` on `i128` overflow.
pub fn det_i128(m: &[Vec<i128>]) -> Option<i128> {
    let n = m.len();
    if n == 0 {
        return Some(1);
    }
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&r| a[r][k] != 0) else {
                return Some(0);
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j].checked_mul(a[k][k])?.checked_sub(a[i][k].checked_mul(a[k][j])?)?;
                a[i][j] = num / prev;
            }
        }
        prev = a[k][k];
    }
    a[n - 1][n - 1].checked_mul(sign)
}

/// Determinant of a square `i64` matrix, `None` on overflow.
pub fn det(m: &[Vec<i64>]) -> Option<i128> {
    let mm: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    det_i128(&mm)
}

fn to_q(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Reduced row echelon form over ℚ; returns the pivot columns.
pub fn rref(rows: &mut [Vec<BigRational>]) -> Vec<usize> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(pr) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, pr);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..nrows {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..ncols {
                    let v = &rows[r][j] * &f;
                    rows[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of an integer matrix.
pub fn rank(rows: &[Vec<i64>]) -> usize {
    let mut q: Vec<Vec<BigRational>> = rows.iter().map(|r| r.iter().map(|&x| to_q(x)).collect()).collect();
    rref(&mut q).len()
}

/// A primitive integer basis of `{a : row . a = 0 for every row}`.
pub fn integer_nullspace(rows: &[Vec<i64>], ncols: usize) -> Vec<Vec<i64>> {
    let mut q: Vec<Vec<BigRational>> = rows.iter().map(|r| r.iter().map(|&x| to_q(x)).collect()).collect();
    let pivots = rref(&mut q);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::new();
    for &f in &free {
        let mut v = vec![BigRational::zero(); ncols];
        v[f] = BigRational::one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = -q[i][f].clone();
        }
        out.push(primitive(&v));
    }
    out
}

/// Scales a rational vector to a primitive integer vector.
pub fn primitive(v: &[BigRational]) -> Vec<i64> {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &l).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return vec![0; v.len()];
    }
    ints.iter()
        .map(|x| i64::try_from(&(x / &g)).expect("coordinates fit in i64"))
        .collect()
}

/// Divides an integer vector by the gcd of its entries.
pub fn make_primitive(v: &mut [i64]) {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g > 1 {
        for x in v.iter_mut() {
            *x /= g;
        }
    }
}

/// Solves the square system `A x = b` over ℚ; `None` when singular.
pub fn solve(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut rows: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut r = r.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut rows);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(rows.iter().map(|r| r[n].clone()).collect())
}

/// `C(n, k)` as a signed integer (zero when `k > n`).
pub fn binomial(n: u64, k: u64) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: i128 = 1;
    for i in 0..k {
        r = r * (n - i) as i128 / (i + 1) as i128;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinants() {
        assert_eq!(det(&[vec![1, 2], vec![3, 4]]), Some(-2));
        assert_eq!(det(&[vec![0, 1], vec![1, 0]]), Some(-1));
        assert_eq!(det(&[vec![1, 2], vec![2, 4]]), Some(0));
        assert_eq!(
            det(&[vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]),
            Some(-1)
        );
        assert_eq!(det(&[vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 0]]), Some(0));
    }

    #[test]
    fn nullspace_of_a_plane() {
        let ns = integer_nullspace(&[vec![1, 1, 1]], 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert_eq!(v.iter().sum::<i64>(), 0);
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(0, 0), 1);
    }
}
