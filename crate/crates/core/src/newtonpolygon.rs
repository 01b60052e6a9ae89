//! q-adic Newton polygons, comparison with Hodge polygons, ordinarity
//! verdicts and sampled generic Newton polygons.

use crate::counting::count_points_capped;
use crate::error::{Error, Result};
use crate::ffield::FieldDesc;
use crate::lattice::LatticePolytope;
use crate::laurent::LaurentPoly;
use crate::regularity::{is_delta_regular, RegularityVerdict};
use crate::zetareconstruct::nontrivial_factor;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use crate::intpoly::{ord_p, IntPolynomial};
use crate::rational::{fmt_q, parse_q};
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use serde_json::json;

pub type Q = Rational64;

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

/// A lower-convex polygon starting at the origin, given by its vertices in
/// increasing abscissa.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexPolygonQ {
    pub vertices: Vec<(Q, Q)>,
}

impl Default for ConvexPolygonQ {
    fn default() -> Self {
        ConvexPolygonQ { vertices: vec![(q(0), q(0))] }
    }
}

impl ConvexPolygonQ {
    /// Polygon with the given `(slope, horizontal length)` sides, sorted by
    /// slope; sides of zero length are dropped and equal slopes merged.
    pub fn from_sides(sides: &[(Q, Q)]) -> Self {
        let mut s: Vec<(Q, Q)> = sides.iter().filter(|(_, l)| !l.is_zero()).cloned().collect();
        s.sort();
        let mut merged: Vec<(Q, Q)> = Vec::new();
        for (slope, len) in s {
            match merged.last_mut() {
                Some(last) if last.0 == slope => last.1 += len,
                _ => merged.push((slope, len)),
            }
        }
        let mut v = vec![(q(0), q(0))];
        for (slope, len) in merged {
            let (x, y) = *v.last().unwrap();
            v.push((x + len, y + slope * len));
        }
        ConvexPolygonQ { vertices: v }
    }

    /// Lower convex hull of a point set containing the origin; at equal
    /// abscissa only the lowest point is kept.
    pub fn lower_hull(points: &[(Q, Q)]) -> Self {
        let mut pts: Vec<(Q, Q)> = points.to_vec();
        pts.sort();
        pts.dedup_by(|b, a| a.0 == b.0);
        let mut hull: Vec<(Q, Q)> = Vec::new();
        for p in pts {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                // Drop b unless it lies strictly below segment a-p.
                let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
                if cross <= q(0) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        ConvexPolygonQ { vertices: hull }
    }

    /// `(slope, horizontal length)` for each side.
    pub fn slopes(&self) -> Vec<(Q, Q)> {
        self.vertices
            .windows(2)
            .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0), w[1].0 - w[0].0))
            .collect()
    }

    pub fn endpoint(&self) -> (Q, Q) {
        *self.vertices.last().unwrap()
    }

    pub fn width(&self) -> Q {
        self.endpoint().0 - self.vertices[0].0
    }

    /// Height of the polygon above abscissa `x`, if within range.
    pub fn value_at(&self, x: Q) -> Option<Q> {
        let first = self.vertices[0];
        if x < first.0 || x > self.endpoint().0 {
            return None;
        }
        for w in self.vertices.windows(2) {
            if x <= w[1].0 {
                let t = (x - w[0].0) / (w[1].0 - w[0].0);
                return Some(w[0].1 + t * (w[1].1 - w[0].1));
            }
        }
        Some(first.1)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "vertices": self.vertices.iter().map(|(x, y)| json!([fmt_q(x), fmt_q(y)])).collect::<Vec<_>>()
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = || Error::InvalidInput("polygon JSON needs {\"vertices\": [[x, y], ...]}".into());
        let verts = v.get("vertices").and_then(|x| x.as_array()).ok_or_else(bad)?;
        let mut out = Vec::new();
        for pt in verts {
            let pair = pt.as_array().filter(|a| a.len() == 2).ok_or_else(bad)?;
            let coord = |c: &serde_json::Value| match c {
                serde_json::Value::String(s) => parse_q(s),
                serde_json::Value::Number(n) => n.as_i64().map(q).ok_or_else(bad),
                _ => Err(bad()),
            };
            out.push((coord(&pair[0])?, coord(&pair[1])?));
        }
        if out.is_empty() {
            return Err(bad());
        }
        Ok(ConvexPolygonQ { vertices: out })
    }
}

/// The smallest prime dividing `q` and the exponent `a` with `q = p^a`.
pub fn prime_power(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::InvalidInput(format!("{q} is not a prime power")));
    }
    let mut p = 2;
    while q % p != 0 {
        p += 1;
    }
    let a = crate::ffield::log_p(q, p)
        .ok_or_else(|| Error::InvalidInput(format!("{q} is not a prime power")))?;
    Ok((p, a as u32))
}

/// Lower hull of `(k, ord_q(c_k))` over the nonzero coefficients.
pub fn newton_polygon_of(poly: &IntPolynomial, qq: u64) -> Result<ConvexPolygonQ> {
    if !poly.is_zeta_factor() {
        return Err(Error::InvalidInput(format!("{poly} does not have constant term 1")));
    }
    let (p, a) = prime_power(qq)?;
    let pts: Vec<(Q, Q)> = poly
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (q(k as i64), Q::new(ord_p(c, p) as i64, a as i64)))
        .collect();
    Ok(ConvexPolygonQ::lower_hull(&pts))
}

/// Slopes with their horizontal lengths.
pub fn slope_multiset(np: &ConvexPolygonQ) -> Vec<(Q, Q)> {
    np.slopes()
}

/// Outcome of comparing a Newton polygon with a Hodge polygon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolygonComparison {
    pub above: bool,
    pub endpoints_match: bool,
    /// First abscissa where the first polygon is strictly higher, with the
    /// size of the gap there.
    pub first_gap: Option<(Q, Q)>,
}

impl PolygonComparison {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "above": self.above,
            "endpoints_match": self.endpoints_match,
            "first_gap": self.first_gap.map(|(x, g)| json!({"x": fmt_q(&x), "gap": fmt_q(&g)})),
        })
    }
}

/// Pointwise comparison of `np` against `hp` at every vertex abscissa of
/// both polygons within their common range.
pub fn lies_above(np: &ConvexPolygonQ, hp: &ConvexPolygonQ) -> PolygonComparison {
    let endpoints_match = np.vertices[0] == hp.vertices[0] && np.endpoint() == hp.endpoint();
    let hi = np.endpoint().0.min(hp.endpoint().0);
    let mut xs: Vec<Q> = np.vertices.iter().chain(&hp.vertices).map(|v| v.0).filter(|&x| x <= hi).collect();
    xs.sort();
    xs.dedup();
    let mut above = true;
    let mut first_gap = None;
    for x in xs {
        let (Some(a), Some(b)) = (np.value_at(x), hp.value_at(x)) else { continue };
        if a < b {
            above = false;
        } else if a > b && first_gap.is_none() {
            first_gap = Some((x, a - b));
        }
    }
    PolygonComparison { above, endpoints_match, first_gap }
}

/// SVG drawing of a Newton polygon over a Hodge polygon, with the region
/// between them shaded.
pub fn overlay_svg(np: &ConvexPolygonQ, hp: &ConvexPolygonQ) -> String {
    let to_f = |x: &Q| *x.numer() as f64 / *x.denom() as f64;
    let all: Vec<(f64, f64)> = np.vertices.iter().chain(&hp.vertices).map(|(x, y)| (to_f(x), to_f(y))).collect();
    let max_x = all.iter().map(|p| p.0).fold(1.0, f64::max);
    let max_y = all.iter().map(|p| p.1).fold(1.0, f64::max);
    let (w, h, m) = (480.0, 360.0, 30.0);
    let sx = (w - 2.0 * m) / max_x;
    let sy = (h - 2.0 * m) / max_y;
    let pt = |(x, y): (f64, f64)| format!("{:.2},{:.2}", m + x * sx, h - m - y * sy);
    let line = |poly: &ConvexPolygonQ| {
        poly.vertices.iter().map(|(x, y)| pt((to_f(x), to_f(y)))).collect::<Vec<_>>().join(" ")
    };
    let mut shade: Vec<String> = np.vertices.iter().map(|(x, y)| pt((to_f(x), to_f(y)))).collect();
    shade.extend(hp.vertices.iter().rev().map(|(x, y)| pt((to_f(x), to_f(y)))));
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
            "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
            "  <polygon points=\"{shade}\" fill=\"#f4c7a1\" fill-opacity=\"0.6\" stroke=\"none\"/>\n",
            "  <polyline points=\"{hp}\" fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"2\"/>\n",
            "  <polyline points=\"{np}\" fill=\"none\" stroke=\"#b8321a\" stroke-width=\"2\" stroke-dasharray=\"6 3\"/>\n",
            "  <text x=\"{m}\" y=\"18\" font-family=\"sans-serif\" font-size=\"12\">NP (dashed) over HP (solid)</text>\n",
            "</svg>\n"
        ),
        w = w,
        h = h,
        m = m,
        shade = shade.join(" "),
        hp = line(hp),
        np = line(np),
    )
}

/// Ordinarity verdict for one Laurent polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct OrdinarityVerdict {
    pub ordinary: bool,
    pub factor: IntPolynomial,
    pub np: ConvexPolygonQ,
    pub hp: ConvexPolygonQ,
    pub comparison: PolygonComparison,
    pub regularity: RegularityVerdict,
}

impl OrdinarityVerdict {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "ordinary": self.ordinary,
            "factor": self.factor.to_json(),
            "NP": self.np.to_json(),
            "HP": self.hp.to_json(),
            "comparison": self.comparison.to_json(),
            "regularity": self.regularity.to_json(),
        })
    }
}

/// Torus counts of `f` over `F_{q^k}`, `k = 1..=len`.
pub fn torus_counts(f: &LaurentPoly, q: u64, len: usize, cap: u128) -> Result<Vec<BigInt>> {
    (1..=len).map(|k| Ok(BigInt::from(count_points_capped(f, q, k, cap)?.count))).collect()
}

/// Compares `NP(P_f)` with `HP(Δ(f))` for a Δ-regular `f` over `F_q`, given
/// its torus counts over `F_{q^k}`, `k = 1..`. Regularity is searched up to
/// `regularity_bound`.
pub fn is_ordinary(
    f: &LaurentPoly,
    q: u64,
    counts: &[BigInt],
    regularity_bound: usize,
    cap: u128,
) -> Result<OrdinarityVerdict> {
    let regularity = is_delta_regular(f, regularity_bound, cap)?;
    if let RegularityVerdict::SingularWitness(w) = &regularity {
        return Err(Error::NotRegular(format!(
            "common zero {:?} on the face {:?} over F_{{{}^{}}}",
            w.point.iter().map(|x| x.coeffs.clone()).collect::<Vec<_>>(),
            w.face.vertices,
            w.field.p,
            w.field.k
        )));
    }
    let delta = f.newton_polytope()?;
    let hodge = delta.hodge_numbers()?;
    let factor = nontrivial_factor(&delta, counts, q)?;
    let np = newton_polygon_of(&factor, q)?;
    let hp = hodge.hp.clone();
    let comparison = lies_above(&np, &hp);
    let ordinary = np == hp;
    Ok(OrdinarityVerdict { ordinary, factor, np, hp, comparison, regularity })
}

/// Sampling parameters for [`gnp_sample`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GnpConfig {
    /// Coefficients are drawn from `F_{p^extension}`; Newton polygons are
    /// normalized for `q = p^extension`.
    pub extension: usize,
    pub regularity_bound: usize,
    pub cap: u128,
}

impl GnpConfig {
    pub fn new(extension: usize, regularity_bound: usize, cap: u128) -> Self {
        GnpConfig { extension, regularity_bound, cap }
    }
}

/// The sampled generic Newton polygon: an upper estimate of `GNP(Δ, p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GnpSample {
    pub gnp: ConvexPolygonQ,
    pub hp: ConvexPolygonQ,
    pub trials: usize,
    pub regular_samples: usize,
    /// Regular samples whose Newton polygon equals `gnp`.
    pub attaining: usize,
    /// Newton polygon of every regular sample, in trial order.
    pub polygons: Vec<ConvexPolygonQ>,
}

impl GnpSample {
    pub fn equals_hp(&self) -> bool {
        self.gnp == self.hp
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "sampled_gnp": self.gnp.to_json(),
            "HP": self.hp.to_json(),
            "equals_HP": self.equals_hp(),
            "comparison": lies_above(&self.gnp, &self.hp).to_json(),
            "trials": self.trials,
            "regular_samples": self.regular_samples,
            "attaining_fraction": if self.regular_samples == 0 { 0.0 } else { self.attaining as f64 / self.regular_samples as f64 },
            "note": "sampled estimate, not a proof",
        })
    }
}

/// A random `f` with Newton polytope `Δ` over `field`: every lattice point
/// of `Δ` gets a uniform coefficient, vertices a uniform nonzero one.
pub fn random_polynomial<R: Rng>(delta: &LatticePolytope, field: &FieldDesc, rng: &mut R, cap: u128) -> Result<LaurentPoly> {
    let size = field.size().ok_or_else(|| Error::InvalidInput("field too large to sample".into()))?;
    let points = delta.lattice_points(1, cap)?;
    let mut terms = Vec::with_capacity(points.len());
    for u in points {
        let vertex = delta.vertices.contains(&u);
        let lo = u128::from(vertex);
        let c = field.element_at(rng.gen_range(lo..size));
        terms.push((u, c));
    }
    LaurentPoly::from_terms(delta.n, field, terms)
}

/// Lower convex minorant of a set of polygons sharing their left endpoint.
fn lowest_polygon(polys: &[ConvexPolygonQ]) -> ConvexPolygonQ {
    let pts: Vec<(Q, Q)> = polys.iter().flat_map(|p| p.vertices.iter().cloned()).collect();
    let right = polys.iter().map(|p| p.endpoint().0).max().unwrap_or_else(Q::zero);
    // Keep only the common right endpoint's lowest point so the hull ends there.
    let pts: Vec<(Q, Q)> = pts.into_iter().filter(|v| v.0 <= right).collect();
    ConvexPolygonQ::lower_hull(&pts)
}

/// Samples `trials` random polynomials with Newton polytope `Δ` over
/// `F_{p^extension}`, discards irregular ones and returns the lowest
/// Newton polygon met. Trial `i` uses its own stream of a ChaCha generator
/// seeded by `seed`, so the result does not depend on scheduling.
pub fn gnp_sample(delta: &LatticePolytope, p: u64, trials: usize, seed: u64, config: &GnpConfig) -> Result<GnpSample> {
    if trials == 0 {
        return Err(Error::InvalidInput("at least one trial is required".into()));
    }
    let field = FieldDesc::new(p, config.extension)?;
    let q = field.size().and_then(|s| u64::try_from(s).ok()).ok_or_else(|| Error::InvalidInput("field too large".into()))?;
    let hodge = delta.hodge_numbers()?;
    let len = hodge.d as usize - 1;
    let results: Vec<Result<Option<ConvexPolygonQ>>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let f = random_polynomial(delta, &field, &mut rng, config.cap)?;
            if !is_delta_regular(&f, config.regularity_bound, config.cap)?.is_regular() {
                return Ok(None);
            }
            let counts = torus_counts(&f, q, len, config.cap)?;
            let factor = nontrivial_factor(delta, &counts, q)?;
            Ok(Some(newton_polygon_of(&factor, q)?))
        })
        .collect();
    let mut polygons = Vec::new();
    for r in results {
        if let Some(np) = r? {
            polygons.push(np);
        }
    }
    if polygons.is_empty() {
        return Err(Error::Insufficient(format!("all {trials} samples were irregular")));
    }
    let gnp = lowest_polygon(&polygons);
    let attaining = polygons.iter().filter(|np| **np == gnp).count();
    Ok(GnpSample { gnp, hp: hodge.hp, trials, regular_samples: polygons.len(), attaining, polygons })
}

/// `lcm` helper shared with the lattice module.
pub(crate) fn lcm_all(values: &[u64]) -> u64 {
    values.iter().fold(1u64, |acc, &v| acc.lcm(&v))
}
