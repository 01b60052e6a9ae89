//! Bounded search for Δ-regularity: common torus zeros of a face
//! restriction and all of its toric partial derivatives.

use crate::counting::coefficient_logs;
use crate::error::{Error, Result};
use crate::ffield::zech::{Log, ZechField, ZECH_CAP};
use crate::ffield::{FieldDesc, FieldElem};
use crate::lattice::Face;
use crate::laurent::LaurentPoly;
use rayon::prelude::*;
use serde_json::json;

/// Default cap on torus prefixes enumerated per face and extension.
pub const DEFAULT_REGULARITY_CAP: u128 = 50_000_000;

/// Outcome of [`is_delta_regular`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegularityVerdict {
    /// No common zero on any face over `F_{q^j}`, `j ≤ bound`. This is not
    /// a proof of regularity over the algebraic closure.
    RegularUpTo(usize),
    SingularWitness(Witness),
}

/// A common torus zero of `f^{Δ'}` and its toric partials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub face: Face,
    /// The point lies in `F_{q^extension}`.
    pub extension: usize,
    pub field: FieldDesc,
    pub point: Vec<FieldElem>,
}

impl RegularityVerdict {
    pub fn is_regular(&self) -> bool {
        matches!(self, RegularityVerdict::RegularUpTo(_))
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            RegularityVerdict::RegularUpTo(b) => json!({
                "verdict": "regular_up_to",
                "bound": b,
                "note": "bounded search; not a proof of regularity over the algebraic closure",
            }),
            RegularityVerdict::SingularWitness(w) => json!({
                "verdict": "singular",
                "face": w.face.vertices,
                "face_dim": w.face.dim,
                "extension": w.extension,
                "field": {"p": w.field.p, "k": w.field.k},
                "point": w.point.iter().map(|x| x.coeffs.clone()).collect::<Vec<_>>(),
            }),
        }
    }
}

/// Largest `b` with `(q^b - 1)^(n-1)` prefixes within `cap` and the work
/// field within the table limit; at least 1.
pub fn default_bound(f: &LaurentPoly, cap: u128) -> usize {
    let (p, a) = (f.field.p as u128, f.field.k as u32);
    let mut b = 1usize;
    loop {
        let next = b + 1;
        let size = p.checked_pow(a * next as u32);
        let ok = size.is_some_and(|s| {
            s <= ZECH_CAP as u128 && (s - 1).checked_pow(f.n.saturating_sub(1) as u32).is_some_and(|c| c <= cap)
        });
        if !ok || next > 8 {
            return b;
        }
        b = next;
    }
}

/// Searches every face of `Δ(f)`, in increasing dimension, for a common
/// zero in `(F_{q^j}^*)^n`, `j = 1..=bound`. The first witness in face
/// order is returned after exact re-verification.
pub fn is_delta_regular(f: &LaurentPoly, bound: usize, cap: u128) -> Result<RegularityVerdict> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if bound == 0 {
        return Err(Error::InvalidInput("extension bound must be at least 1".into()));
    }
    let delta = f.newton_polytope()?;
    let faces = delta.faces();
    let restricted: Vec<(Face, LaurentPoly)> = faces
        .into_iter()
        .map(|face| {
            let terms = f.terms.iter().filter(|(u, _)| delta.face_contains(&face, u));
            let g = LaurentPoly { n: f.n, terms: terms.map(|(u, c)| (u.clone(), c.clone())).collect(), field: f.field.clone() };
            (face, g)
        })
        .collect();
    let found: Vec<Result<Option<Witness>>> = restricted
        .par_iter()
        .map(|(face, g)| {
            // A single monomial never vanishes on the torus.
            if g.terms.len() <= 1 {
                return Ok(None);
            }
            for j in 1..=bound {
                if let Some(point) = common_zero(g, j, cap, face)? {
                    return Ok(Some(point));
                }
            }
            Ok(None)
        })
        .collect();
    for r in found {
        if let Some(w) = r? {
            verify_witness(f, &w)?;
            return Ok(RegularityVerdict::SingularWitness(w));
        }
    }
    Ok(RegularityVerdict::RegularUpTo(bound))
}

/// Checks that `w` is an exact common zero of `f^{Δ'}` and its partials.
pub fn verify_witness(f: &LaurentPoly, w: &Witness) -> Result<()> {
    let g = f.face_restrict(&w.face)?.extend_to(&w.field)?;
    let mut eqs = vec![g.clone()];
    for i in 0..f.n {
        eqs.push(g.toric_partial(i)?);
    }
    for e in &eqs {
        if !e.evaluate(&w.point, &w.field)?.is_zero() {
            return Err(Error::Inconsistent(format!("witness {:?} fails {e}", w.point)));
        }
    }
    Ok(())
}

fn common_zero(g: &LaurentPoly, j: usize, cap: u128, face: &Face) -> Result<Option<Witness>> {
    let n = g.n;
    let (p, a) = (g.field.p, g.field.k);
    let l = a * j;
    let size = (p as u128).checked_pow(l as u32).unwrap_or(u128::MAX);
    let prefixes = (size - 1).checked_pow(n as u32 - 1).unwrap_or(u128::MAX);
    if prefixes > cap || size > ZECH_CAP as u128 {
        return Err(Error::cap(format!("face {:?} over F_{{{p}^{l}}}", face.vertices), prefixes.max(size), cap));
    }
    let z = ZechField::get(p, l)?;
    let order = z.order();
    let coeffs = coefficient_logs(g, &z)?;
    let exps: Vec<Vec<i64>> = g.terms.keys().cloned().collect();
    // Log of the integer u_i, or zero, per term and variable.
    let weights: Vec<Vec<Log>> = exps.iter().map(|u| u.iter().map(|&e| z.from_int(e)).collect()).collect();
    let last = n - 1;
    let lo = exps.iter().map(|u| u[last]).min().unwrap_or(0);
    let hi = exps.iter().map(|u| u[last]).max().unwrap_or(0);
    let width = (hi - lo) as usize + 1;
    let m = order as i64;
    let mut prefix = vec![0u32; last];
    let mut partial_logs = vec![0u32; exps.len()];
    let mut h = vec![order; width];
    loop {
        for (t, u) in exps.iter().enumerate() {
            let mut acc = coeffs[t] as i64;
            for (i, &x) in prefix.iter().enumerate() {
                acc += u[i] * x as i64;
            }
            partial_logs[t] = acc.rem_euclid(m) as u32;
        }
        h.iter_mut().for_each(|c| *c = order);
        for (t, u) in exps.iter().enumerate() {
            let k = (u[last] - lo) as usize;
            h[k] = z.add(h[k], partial_logs[t]);
        }
        for root in z.nonzero_roots(&h, l) {
            let ok = (0..n).all(|i| {
                let mut s = order;
                for (t, u) in exps.iter().enumerate() {
                    if weights[t][i] == order {
                        continue;
                    }
                    let v = (partial_logs[t] as i64 + u[last] * root as i64).rem_euclid(m) as u32;
                    s = z.add(s, z.mul(v, weights[t][i]));
                }
                s == order
            });
            if ok {
                let mut point: Vec<FieldElem> = prefix.iter().map(|&x| z.to_elem(x)).collect();
                point.push(z.to_elem(root));
                return Ok(Some(Witness { face: face.clone(), extension: j, field: z.desc.clone(), point }));
            }
        }
        // Next prefix in lexicographic order.
        let mut i = 0;
        loop {
            if i == last {
                return Ok(None);
            }
            prefix[i] += 1;
            if prefix[i] < order {
                break;
            }
            prefix[i] = 0;
            i += 1;
        }
    }
}

/// Parameters `y ∈ F_q` with `y^(n+1) = (n+1)^(n+1)`: the singular fibres of
/// the Calabi-Yau family in `n` variables.
pub fn cy_singular_parameters(n: usize, q: u64) -> Result<Vec<FieldElem>> {
    let (p, a) = crate::newtonpolygon::prime_power(q)?;
    let field = FieldDesc::new(p, a as usize)?;
    let target = field.pow(&field.from_int((n + 1) as i64), (n + 1) as u128);
    Ok(field.elements().filter(|y| field.pow(y, (n + 1) as u128) == target).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::FamilySpec;

    fn fp(p: u64) -> FieldDesc {
        FieldDesc::new(p, 1).unwrap()
    }

    #[test]
    fn double_root_is_singular() {
        let f = LaurentPoly::parse("x1^2 - 2*x1 + 1", 1, &fp(7)).unwrap();
        match is_delta_regular(&f, 2, DEFAULT_REGULARITY_CAP).unwrap() {
            RegularityVerdict::SingularWitness(w) => {
                assert_eq!(w.point, vec![fp(7).one()]);
                assert_eq!(w.face.dim, 1);
            }
            v => panic!("{v:?}"),
        }
        let g = LaurentPoly::parse("x1^2 - 3*x1 + 2", 1, &fp(7)).unwrap();
        assert_eq!(is_delta_regular(&g, 2, DEFAULT_REGULARITY_CAP).unwrap(), RegularityVerdict::RegularUpTo(2));
    }

    #[test]
    fn cy_fibres() {
        let fam = FamilySpec::calabi_yau(2, 7).unwrap();
        let field = fp(7);
        let y0 = fam.fibre(&field.zero(), &field).unwrap();
        assert_eq!(is_delta_regular(&y0, 2, DEFAULT_REGULARITY_CAP).unwrap(), RegularityVerdict::RegularUpTo(2));
        let y6 = fam.fibre(&field.from_int(6), &field).unwrap();
        match is_delta_regular(&y6, 1, DEFAULT_REGULARITY_CAP).unwrap() {
            RegularityVerdict::SingularWitness(w) => {
                assert_eq!(w.point, vec![field.from_int(2), field.from_int(2)]);
            }
            v => panic!("{v:?}"),
        }
        let singular: Vec<u64> =
            cy_singular_parameters(2, 7).unwrap().iter().map(|y| y.coeffs[0]).collect();
        assert_eq!(singular, vec![3, 5, 6]);
        for y in 0..7 {
            let fy = fam.fibre(&field.from_int(y), &field).unwrap();
            let regular = is_delta_regular(&fy, 2, DEFAULT_REGULARITY_CAP).unwrap().is_regular();
            assert_eq!(regular, !singular.contains(&(y as u64)), "y = {y}");
        }
    }

    #[test]
    fn witness_persists_with_bound() {
        let f = LaurentPoly::parse("x1^2 - 2*x1 + 1", 1, &fp(5)).unwrap();
        for b in 1..=3 {
            assert!(!is_delta_regular(&f, b, DEFAULT_REGULARITY_CAP).unwrap().is_regular());
        }
    }

    #[test]
    fn cap_reported() {
        let f = LaurentPoly::parse("x1 + x2 + x3 + 1", 3, &fp(7)).unwrap();
        assert!(matches!(is_delta_regular(&f, 3, 1000), Err(Error::CapExceeded { .. })));
    }
}
