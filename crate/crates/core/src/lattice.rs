//! Lattice polytopes: hulls, faces, dilate lattice-point counts, normalized
//! volume, Hodge numbers and Hodge polygons, polar duals, semigroup
//! exponents and convex triangulation checks.
//!
//! All geometry is exact; no floating point is used here.

use crate::error::{Error, Result};
use crate::linalg::{binomial, det, integer_nullspace, make_primitive, rank, solve};
use crate::newtonpolygon::{lcm_all, ConvexPolygonQ, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::One;
use serde_json::json;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

/// Largest ambient dimension accepted by [`convex_hull`].
pub const MAX_DIM: usize = 6;

/// Default bound on the number of lattice points scanned by box scans.
pub const DEFAULT_SCAN_CAP: u128 = 200_000_000;

/// The inequality `normal · x ≥ offset` (or an equation when used as such).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Halfspace {
    pub normal: Vec<i64>,
    pub offset: i64,
}

impl Halfspace {
    pub fn value(&self, x: &[i64]) -> i64 {
        self.normal.iter().zip(x).map(|(a, b)| a * b).sum::<i64>() - self.offset
    }

    fn value_dilated(&self, x: &[i64], k: i64) -> i64 {
        self.normal.iter().zip(x).map(|(a, b)| a * b).sum::<i64>() - k * self.offset
    }
}

/// A convex lattice polytope with its exact facet description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePolytope {
    pub n: usize,
    pub dim: usize,
    /// Extreme points in lexicographic order.
    pub vertices: Vec<Vec<i64>>,
    /// Facets within the affine hull.
    pub halfspaces: Vec<Halfspace>,
    /// Equations cutting out the affine hull (empty when full-dimensional).
    pub equations: Vec<Halfspace>,
}

/// A nonempty face, described by the facets containing it and its vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub halfspaces: Vec<usize>,
    pub vertices: Vec<Vec<i64>>,
    pub dim: usize,
}

/// Convex hull of a finite set of lattice points.
pub fn convex_hull(points: &[Vec<i64>]) -> Result<LatticePolytope> {
    let first = points.first().ok_or_else(|| Error::InvalidInput("empty point set".into()))?;
    let n = first.len();
    if n == 0 || n > MAX_DIM {
        return Err(Error::InvalidInput(format!("ambient dimension {n} outside 1..={MAX_DIM}")));
    }
    if points.iter().any(|p| p.len() != n) {
        return Err(Error::InvalidInput("points of mixed dimension".into()));
    }
    let pts: Vec<Vec<i64>> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let p0 = pts[0].clone();
    let diffs: Vec<Vec<i64>> = pts[1..].iter().map(|p| sub(p, &p0)).collect();
    let dim = if diffs.is_empty() { 0 } else { rank(&diffs) };

    let equations: Vec<Halfspace> = if dim == n {
        Vec::new()
    } else {
        integer_nullspace(&diffs, n)
            .into_iter()
            .map(|a| {
                let offset = dot(&a, &p0);
                Halfspace { normal: a, offset }
            })
            .collect()
    };

    if dim == 0 {
        return Ok(LatticePolytope { n, dim, vertices: vec![p0], halfspaces: Vec::new(), equations });
    }

    // Coordinates on which the projection of the affine hull is injective.
    let mut cols: Vec<usize> = Vec::new();
    for c in 0..n {
        let mut trial = cols.clone();
        trial.push(c);
        let sub_rows: Vec<Vec<i64>> = diffs.iter().map(|d| trial.iter().map(|&j| d[j]).collect()).collect();
        if rank(&sub_rows) == trial.len() {
            cols = trial;
        }
        if cols.len() == dim {
            break;
        }
    }
    let proj: Vec<Vec<i64>> = pts.iter().map(|p| cols.iter().map(|&j| p[j]).collect()).collect();
    let facets = full_dim_facets(&proj)?;
    let halfspaces: Vec<Halfspace> = facets
        .iter()
        .map(|h| {
            let mut normal = vec![0i64; n];
            for (i, &c) in cols.iter().enumerate() {
                normal[c] = h.normal[i];
            }
            Halfspace { normal, offset: h.offset }
        })
        .collect();
    let vertices: Vec<Vec<i64>> = pts
        .iter()
        .zip(&proj)
        .filter(|(_, pp)| {
            let tight: Vec<Vec<i64>> =
                facets.iter().filter(|h| h.value(pp) == 0).map(|h| h.normal.clone()).collect();
            !tight.is_empty() && rank(&tight) == dim
        })
        .map(|(p, _)| p.clone())
        .collect();
    Ok(LatticePolytope { n, dim, vertices, halfspaces, equations })
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Facets of a full-dimensional point set in `ℤ^d`, by testing the
/// hyperplane through every `d`-subset.
fn full_dim_facets(pts: &[Vec<i64>]) -> Result<Vec<Halfspace>> {
    let d = pts[0].len();
    if d == 1 {
        let lo = pts.iter().map(|p| p[0]).min().unwrap();
        let hi = pts.iter().map(|p| p[0]).max().unwrap();
        return Ok(vec![Halfspace { normal: vec![-1], offset: -hi }, Halfspace { normal: vec![1], offset: lo }]);
    }
    let m = pts.len();
    let mut found: BTreeSet<Halfspace> = BTreeSet::new();
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        let base = &pts[idx[0]];
        let rows: Vec<Vec<i64>> = idx[1..].iter().map(|&i| sub(&pts[i], base)).collect();
        if let Some(mut normal) = cofactor_normal(&rows, d)? {
            make_primitive(&mut normal);
            let offset = dot(&normal, base);
            let vals: Vec<i64> = pts.iter().map(|p| dot(&normal, p) - offset).collect();
            if vals.iter().all(|&v| v >= 0) {
                found.insert(Halfspace { normal, offset });
            } else if vals.iter().all(|&v| v <= 0) {
                found.insert(Halfspace { normal: normal.iter().map(|x| -x).collect(), offset: -offset });
            }
        }
        // Next combination.
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(found.into_iter().collect());
            }
            i -= 1;
            if idx[i] < m - d + i {
                idx[i] += 1;
                for j in i + 1..d {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Normal vector to the span of `d - 1` vectors in `ℤ^d` (generalised cross
/// product), or `None` if they are dependent.
fn cofactor_normal(rows: &[Vec<i64>], d: usize) -> Result<Option<Vec<i64>>> {
    let mut normal = Vec::with_capacity(d);
    for j in 0..d {
        let minor: Vec<Vec<i64>> =
            rows.iter().map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, &x)| x).collect()).collect();
        let m = det(&minor).ok_or_else(|| Error::InvalidInput("coordinates too large".into()))?;
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let v = i64::try_from(sign * m).map_err(|_| Error::InvalidInput("coordinates too large".into()))?;
        normal.push(v);
    }
    Ok(normal.iter().any(|&x| x != 0).then_some(normal))
}

impl LatticePolytope {
    /// Whether `x` lies in the `k`-th dilate.
    pub fn contains_dilated(&self, x: &[i64], k: i64) -> bool {
        self.equations.iter().all(|h| h.value_dilated(x, k) == 0)
            && self.halfspaces.iter().all(|h| h.value_dilated(x, k) >= 0)
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.contains_dilated(x, 1)
    }

    /// Whether the origin lies in the relative interior.
    pub fn origin_interior(&self) -> bool {
        self.dim == self.n && self.halfspaces.iter().all(|h| h.offset < 0)
    }

    /// All nonempty faces, ordered by dimension and then vertex list.
    pub fn faces(&self) -> Vec<Face> {
        let on_facet: Vec<BTreeSet<usize>> = self
            .halfspaces
            .iter()
            .map(|h| (0..self.vertices.len()).filter(|&i| h.value(&self.vertices[i]) == 0).collect())
            .collect();
        let all: BTreeSet<usize> = (0..self.vertices.len()).collect();
        let mut seen: HashSet<BTreeSet<usize>> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(all.clone());
        queue.push_back(all);
        while let Some(s) = queue.pop_front() {
            for f in &on_facet {
                let t: BTreeSet<usize> = s.intersection(f).cloned().collect();
                if !t.is_empty() && t != s && seen.insert(t.clone()) {
                    queue.push_back(t);
                }
            }
        }
        let mut faces: Vec<Face> = seen
            .into_iter()
            .map(|s| {
                let halfspaces: Vec<usize> =
                    (0..on_facet.len()).filter(|&i| s.is_subset(&on_facet[i])).collect();
                let vertices: Vec<Vec<i64>> = s.iter().map(|&i| self.vertices[i].clone()).collect();
                let dim = affine_rank(&vertices);
                Face { halfspaces, vertices, dim }
            })
            .collect();
        faces.sort_by(|a, b| (a.dim, &a.vertices).cmp(&(b.dim, &b.vertices)));
        faces
    }

    /// The face of this polytope with the same vertex set as `face`.
    pub fn find_face(&self, face: &Face) -> Option<Face> {
        self.faces().into_iter().find(|f| f.vertices == face.vertices)
    }

    pub fn has_face(&self, face: &Face) -> bool {
        self.find_face(face).is_some()
    }

    /// Whether the lattice point `u` lies on `face` (a face of this polytope).
    pub fn face_contains(&self, face: &Face, u: &[i64]) -> bool {
        let Some(own) = self.find_face(face) else { return false };
        self.contains(u) && own.halfspaces.iter().all(|&i| self.halfspaces[i].value(u) == 0)
    }

    fn bounding_box(&self) -> (Vec<i64>, Vec<i64>) {
        let lo = (0..self.n).map(|j| self.vertices.iter().map(|v| v[j]).min().unwrap()).collect();
        let hi = (0..self.n).map(|j| self.vertices.iter().map(|v| v[j]).max().unwrap()).collect();
        (lo, hi)
    }

    /// Lattice points of `kΔ`, in lexicographic order.
    pub fn lattice_points(&self, k: i64, cap: u128) -> Result<Vec<Vec<i64>>> {
        let mut out = Vec::new();
        self.scan_dilate(k, cap, |x| out.push(x.to_vec()))?;
        Ok(out)
    }

    fn scan_dilate(&self, k: i64, cap: u128, mut visit: impl FnMut(&[i64])) -> Result<()> {
        if k == 0 {
            visit(&vec![0; self.n]);
            return Ok(());
        }
        let (lo, hi) = self.bounding_box();
        let lo: Vec<i64> = lo.iter().map(|x| x * k).collect();
        let hi: Vec<i64> = hi.iter().map(|x| x * k).collect();
        let size: u128 = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as u128).product();
        if size > cap {
            return Err(Error::cap("dilate box scan", size, cap));
        }
        let mut x = lo.clone();
        loop {
            if self.contains_dilated(&x, k) {
                visit(&x);
            }
            let mut i = self.n;
            loop {
                if i == 0 {
                    return Ok(());
                }
                i -= 1;
                if x[i] < hi[i] {
                    x[i] += 1;
                    break;
                }
                x[i] = lo[i];
            }
        }
    }

    /// `W_Δ(k)`: the number of lattice points in `kΔ`.
    pub fn dilate_lattice_count(&self, k: u64) -> Result<u64> {
        self.dilate_lattice_count_capped(k, DEFAULT_SCAN_CAP)
    }

    pub fn dilate_lattice_count_capped(&self, k: u64, cap: u128) -> Result<u64> {
        let mut count = 0u64;
        self.scan_dilate(k as i64, cap, |_| count += 1)?;
        Ok(count)
    }

    fn require_full(&self) -> Result<()> {
        if self.dim != self.n {
            return Err(Error::Degenerate { dim: self.dim, n: self.n });
        }
        Ok(())
    }

    /// `d(Δ) = n! Vol(Δ)`, as the `n`-th finite difference of `W_Δ` at 0.
    pub fn normalized_volume(&self) -> Result<u64> {
        self.require_full()?;
        let n = self.n as u64;
        let mut acc: i128 = 0;
        for i in 0..=n {
            let w = self.dilate_lattice_count(i)? as i128;
            let sign = if (n - i) % 2 == 0 { 1 } else { -1 };
            acc += sign * binomial(n, i) * w;
        }
        u64::try_from(acc).map_err(|_| Error::Inconsistent(format!("negative volume {acc}")))
    }

    /// `W`, `h`, `d` and the Hodge polygon.
    pub fn hodge_numbers(&self) -> Result<HodgeData> {
        self.require_full()?;
        let n = self.n;
        let w: Vec<u64> = (0..=n as u64 + 1).map(|k| self.dilate_lattice_count(k)).collect::<Result<_>>()?;
        let mut h: Vec<i64> = Vec::with_capacity(n + 2);
        for k in 0..=n + 1 {
            let mut acc: i128 = 0;
            for i in 0..=k {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                acc += sign * binomial(n as u64 + 1, i as u64) * w[k - i] as i128;
            }
            h.push(acc as i64);
        }
        if h[n + 1] != 0 {
            return Err(Error::Inconsistent(format!("h({}) = {} should vanish", n + 1, h[n + 1])));
        }
        h.truncate(n + 1);
        if let Some(k) = h.iter().position(|&x| x < 0) {
            return Err(Error::Inconsistent(format!("h({k}) = {} is negative", h[k])));
        }
        let d = self.normalized_volume()?;
        let total: i64 = h.iter().sum();
        if total as u64 != d {
            return Err(Error::Inconsistent(format!("sum of Hodge numbers {total} != d = {d}")));
        }
        let mut data = HodgeData { n, w, h, d, hp: ConvexPolygonQ::default() };
        data.hp = hodge_polygon(&data);
        Ok(data)
    }

    /// Polar dual and reflexivity. Requires the origin in the interior.
    pub fn polar_dual(&self) -> Result<PolarDual> {
        self.require_full()?;
        if !self.origin_interior() {
            return Err(Error::OriginNotInterior);
        }
        let mut dual: Vec<Vec<Rational64>> = self
            .halfspaces
            .iter()
            .map(|h| h.normal.iter().map(|&a| Rational64::new(a, -h.offset)).collect())
            .collect();
        dual.sort();
        let is_reflexive = dual.iter().all(|v| v.iter().all(|x| x.is_integer()));

        // Double dual: scale the dual to a lattice polytope and dualise again.
        let l = dual.iter().flatten().fold(1i64, |acc, x| acc.lcm(x.denom()));
        let scaled: Vec<Vec<i64>> =
            dual.iter().map(|v| v.iter().map(|x| (x * l).to_integer()).collect()).collect();
        let hull = convex_hull(&scaled)?;
        let mut back: Vec<Vec<Rational64>> = hull
            .halfspaces
            .iter()
            .map(|h| h.normal.iter().map(|&a| Rational64::new(a * l, -h.offset)).collect())
            .collect();
        back.sort();
        let mine: Vec<Vec<Rational64>> =
            self.vertices.iter().map(|v| v.iter().map(|&x| Rational64::from_integer(x)).collect()).collect();
        if back != mine || hull.vertices.len() != dual.len() {
            return Err(Error::Inconsistent("double dual differs from the polytope".into()));
        }
        Ok(PolarDual { vertices: dual, is_reflexive })
    }

    /// The polytope scaled by an integer factor.
    pub fn dilate(&self, k: i64) -> Result<LatticePolytope> {
        convex_hull(&self.vertices.iter().map(|v| v.iter().map(|x| x * k).collect()).collect::<Vec<_>>())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({"n": self.n, "vertices": self.vertices})
    }

    /// Reads `{"n": int, "vertices": [[int, ...], ...]}`.
    pub fn from_json(v: &serde_json::Value) -> Result<LatticePolytope> {
        let bad = |m: &str| Error::InvalidInput(format!("polytope JSON: {m}"));
        let n = v.get("n").and_then(|x| x.as_u64()).ok_or_else(|| bad("missing n"))? as usize;
        let verts = v.get("vertices").and_then(|x| x.as_array()).ok_or_else(|| bad("missing vertices"))?;
        let mut pts = Vec::new();
        for p in verts {
            let coords = p.as_array().ok_or_else(|| bad("vertex is not an array"))?;
            let c: Option<Vec<i64>> = coords.iter().map(|x| x.as_i64()).collect();
            let c = c.ok_or_else(|| bad("non-integer coordinate"))?;
            if c.len() != n {
                return Err(bad("vertex length differs from n"));
            }
            pts.push(c);
        }
        convex_hull(&pts)
    }
}

fn affine_rank(pts: &[Vec<i64>]) -> usize {
    if pts.len() <= 1 {
        return 0;
    }
    let diffs: Vec<Vec<i64>> = pts[1..].iter().map(|p| sub(p, &pts[0])).collect();
    rank(&diffs)
}

/// Dilate counts, Hodge numbers, degree and Hodge polygon of a polytope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeData {
    pub n: usize,
    /// `W_Δ(0..=n+1)`.
    pub w: Vec<u64>,
    /// `h_Δ(0..=n)`.
    pub h: Vec<i64>,
    pub d: u64,
    pub hp: ConvexPolygonQ,
}

impl HodgeData {
    pub fn to_json(&self) -> serde_json::Value {
        json!({"n": self.n, "W": self.w, "h": self.h, "d": self.d, "HP": self.hp.to_json()})
    }
}

/// Sides of slope `k - 1` and length `h(k)` for `k = 1..=n`.
pub fn hodge_polygon(h: &HodgeData) -> ConvexPolygonQ {
    let sides: Vec<(Q, Q)> =
        (1..h.h.len()).map(|k| (Q::from_integer(k as i64 - 1), Q::from_integer(h.h[k]))).collect();
    ConvexPolygonQ::from_sides(&sides)
}

/// Vertices of the polar dual and whether they are all integral.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarDual {
    pub vertices: Vec<Vec<Rational64>>,
    pub is_reflexive: bool,
}

impl PolarDual {
    pub fn to_json(&self) -> serde_json::Value {
        let v: Vec<Vec<String>> =
            self.vertices.iter().map(|p| p.iter().map(crate::rational::fmt_q).collect()).collect();
        json!({"vertices": v, "is_reflexive": self.is_reflexive})
    }
}

/// Result of a bounded search for a semigroup exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exponent {
    Resolved(u64),
    /// No `D ≤ bound` works for the elements examined.
    Unresolved(u64),
}

impl Exponent {
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Exponent::Resolved(d) => json!({"value": d}),
            Exponent::Unresolved(b) => json!({"unresolved": b}),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemigroupExponents {
    pub i: Exponent,
    pub i_inf: Exponent,
    pub search_bound: u64,
    /// Smallest weight used for `I_∞`.
    pub threshold: u64,
}

/// Bounded search for `I(Δ)` and `I_∞(Δ)`.
///
/// For each `D = 1..=bound`, every lattice point `u` of `kΔ` with
/// `k ≤ bound` is tested for `D·(k, u)` being a sum of `D·k` lattice points
/// of `Δ`. `I_∞` only looks at weights `k ≥ ceil(bound / 2)`.
pub fn semigroup_exponents(delta: &LatticePolytope, search_bound: u64) -> Result<SemigroupExponents> {
    delta.require_full()?;
    let gens = delta.lattice_points(1, DEFAULT_SCAN_CAP)?;
    let threshold = search_bound.div_ceil(2).max(1);
    let mut memo: HashMap<(i64, Vec<i64>), bool> = HashMap::new();
    let mut i_res = None;
    let mut i_inf_res = None;
    let levels: Vec<(u64, Vec<Vec<i64>>)> = (1..=search_bound)
        .map(|k| Ok((k, delta.lattice_points(k as i64, DEFAULT_SCAN_CAP)?)))
        .collect::<Result<_>>()?;
    for d in 1..=search_bound {
        let mut ok_all = true;
        let mut ok_inf = true;
        for (k, pts) in &levels {
            for u in pts {
                if !ok_inf && (!ok_all || *k >= threshold) {
                    break;
                }
                let w: Vec<i64> = u.iter().map(|x| x * d as i64).collect();
                if !decomposes(delta, &gens, (d * k) as i64, &w, &mut memo) {
                    ok_all = false;
                    if *k >= threshold {
                        ok_inf = false;
                    }
                }
            }
        }
        if ok_all && i_res.is_none() {
            i_res = Some(d);
        }
        if ok_inf && i_inf_res.is_none() {
            i_inf_res = Some(d);
        }
        if i_res.is_some() && i_inf_res.is_some() {
            break;
        }
    }
    let wrap = |r: Option<u64>| r.map_or(Exponent::Unresolved(search_bound), Exponent::Resolved);
    Ok(SemigroupExponents { i: wrap(i_res), i_inf: wrap(i_inf_res), search_bound, threshold })
}

/// Whether `w` is a sum of `m` lattice points of `Δ`.
fn decomposes(
    delta: &LatticePolytope,
    gens: &[Vec<i64>],
    m: i64,
    w: &[i64],
    memo: &mut HashMap<(i64, Vec<i64>), bool>,
) -> bool {
    if m == 0 {
        return w.iter().all(|&x| x == 0);
    }
    if !delta.contains_dilated(w, m) {
        return false;
    }
    if m == 1 {
        return true;
    }
    let key = (m, w.to_vec());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let mut result = false;
    for g in gens {
        let rest = sub(w, g);
        if delta.contains_dilated(&rest, m - 1) && decomposes(delta, gens, m - 1, &rest, memo) {
            result = true;
            break;
        }
    }
    memo.insert(key, result);
    result
}

/// Which part of the triangulation check failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriangulationCondition {
    /// A cell is not a lattice `n`-simplex inside `Δ`.
    Simplex,
    /// The cells do not tile `Δ` face to face.
    Cover,
    /// The lift is not strictly convex.
    Convexity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TriangulationVerdict {
    Pass { cell_volumes: Vec<u64> },
    Fail { condition: TriangulationCondition, message: String, witness: Vec<Vec<i64>> },
}

impl TriangulationVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, TriangulationVerdict::Pass { .. })
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            TriangulationVerdict::Pass { cell_volumes } => json!({"verdict": "pass", "cell_volumes": cell_volumes}),
            TriangulationVerdict::Fail { condition, message, witness } => json!({
                "verdict": "fail",
                "condition": format!("{condition:?}").to_lowercase(),
                "message": message,
                "witness": witness,
            }),
        }
    }
}

/// Checks that `cells` (index lists into `points`) form a convex (regular)
/// lattice triangulation of `delta` induced by `heights`.
///
/// The checks are: every cell is a lattice `n`-simplex in `Δ`; the volumes
/// add up to `d(Δ)` and every interior codimension-one face is shared by
/// exactly two cells lying on opposite sides, every boundary one by exactly
/// one cell; and for each cell, every other point lifts strictly above the
/// affine function interpolating the heights on that cell.
pub fn verify_convex_triangulation(
    delta: &LatticePolytope,
    points: &[Vec<i64>],
    cells: &[Vec<usize>],
    heights: &[BigRational],
) -> Result<TriangulationVerdict> {
    let n = delta.n;
    if heights.len() != points.len() {
        return Err(Error::InvalidInput(format!(
            "{} heights for {} points",
            heights.len(),
            points.len()
        )));
    }
    if points.iter().any(|p| p.len() != n) {
        return Err(Error::InvalidInput("point dimension differs from the polytope".into()));
    }
    for c in cells {
        if c.iter().any(|&i| i >= points.len()) {
            return Err(Error::InvalidInput(format!("cell {c:?} references a missing point")));
        }
    }
    delta.require_full()?;
    let fail = |condition, message: String, witness: Vec<Vec<i64>>| {
        Ok(TriangulationVerdict::Fail { condition, message, witness })
    };
    let verts = |c: &[usize]| c.iter().map(|&i| points[i].clone()).collect::<Vec<_>>();

    // (a) simplices.
    let mut volumes = Vec::with_capacity(cells.len());
    for (ci, c) in cells.iter().enumerate() {
        let distinct: BTreeSet<usize> = c.iter().cloned().collect();
        if c.len() != n + 1 || distinct.len() != n + 1 {
            return fail(TriangulationCondition::Simplex, format!("cell {ci} does not have {} vertices", n + 1), verts(c));
        }
        if let Some(&i) = c.iter().find(|&&i| !delta.contains(&points[i])) {
            return fail(TriangulationCondition::Simplex, format!("cell {ci} has a vertex outside the polytope"), vec![points[i].clone()]);
        }
        let rows: Vec<Vec<i64>> = c[1..].iter().map(|&i| sub(&points[i], &points[c[0]])).collect();
        let v = det(&rows).ok_or_else(|| Error::InvalidInput("coordinates too large".into()))?;
        if v == 0 {
            return fail(TriangulationCondition::Simplex, format!("cell {ci} is degenerate"), verts(c));
        }
        volumes.push(v.unsigned_abs() as u64);
    }

    // (b) volumes and codimension-one adjacency.
    let d = delta.normalized_volume()?;
    let total: u64 = volumes.iter().sum();
    if total != d {
        return fail(TriangulationCondition::Cover, format!("cell volumes sum to {total}, polytope has {d}"), Vec::new());
    }
    let mut ridges: HashMap<Vec<usize>, Vec<(usize, i128)>> = HashMap::new();
    for (ci, c) in cells.iter().enumerate() {
        for skip in 0..=n {
            let mut ridge: Vec<usize> = c.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, &i)| i).collect();
            ridge.sort();
            let side = side_of(points, &ridge, &points[c[skip]])?;
            ridges.entry(ridge).or_default().push((ci, side));
        }
    }
    let mut keys: Vec<&Vec<usize>> = ridges.keys().collect();
    keys.sort();
    for ridge in keys {
        let users = &ridges[ridge];
        let on_boundary = delta.halfspaces.iter().any(|h| ridge.iter().all(|&i| h.value(&points[i]) == 0));
        let ok = if on_boundary {
            users.len() == 1
        } else {
            users.len() == 2 && users[0].1 * users[1].1 < 0
        };
        if !ok {
            let what = if on_boundary { "boundary" } else { "interior" };
            return fail(
                TriangulationCondition::Cover,
                format!("{what} ridge shared by {} cells", users.len()),
                verts(ridge),
            );
        }
    }

    // (c) strict convexity of the lift.
    for (ci, c) in cells.iter().enumerate() {
        let a: Vec<Vec<BigRational>> = c
            .iter()
            .map(|&i| {
                let mut row: Vec<BigRational> = points[i].iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect();
                row.push(BigRational::one());
                row
            })
            .collect();
        let b: Vec<BigRational> = c.iter().map(|&i| heights[i].clone()).collect();
        let coef = solve(&a, &b).ok_or_else(|| Error::Inconsistent("singular cell".into()))?;
        for (j, p) in points.iter().enumerate() {
            if c.contains(&j) {
                continue;
            }
            let mut val = coef[n].clone();
            for (t, &x) in p.iter().enumerate() {
                val += &coef[t] * BigRational::from_integer(BigInt::from(x));
            }
            if heights[j] <= val {
                return fail(
                    TriangulationCondition::Convexity,
                    format!("point {j} does not lift strictly above cell {ci}"),
                    vec![p.clone()],
                );
            }
        }
    }
    Ok(TriangulationVerdict::Pass { cell_volumes: volumes })
}

/// Sign of `x` relative to the hyperplane through the ridge points.
fn side_of(points: &[Vec<i64>], ridge: &[usize], x: &[i64]) -> Result<i128> {
    let base = &points[ridge[0]];
    let mut rows: Vec<Vec<i64>> = ridge[1..].iter().map(|&i| sub(&points[i], base)).collect();
    rows.push(sub(x, base));
    let v = det(&rows).ok_or_else(|| Error::InvalidInput("coordinates too large".into()))?;
    Ok(v.signum())
}

/// `lcm` of the cell volumes and whether `p ≡ 1` modulo it.
pub fn ordinarity_prediction(cells: &[LatticePolytope], p: u64) -> Result<(u64, bool)> {
    let vols: Vec<u64> = cells.iter().map(|c| c.normalized_volume()).collect::<Result<_>>()?;
    let l = lcm_all(&vols);
    Ok((l, p % l == 1 % l))
}

/// Reads a triangulation file `{"cells", "points", "heights"}`.
pub fn triangulation_from_json(
    v: &serde_json::Value,
) -> Result<(Vec<Vec<i64>>, Vec<Vec<usize>>, Vec<BigRational>)> {
    let bad = |m: &str| Error::InvalidInput(format!("triangulation JSON: {m}"));
    let points: Vec<Vec<i64>> = v
        .get("points")
        .and_then(|x| x.as_array())
        .ok_or_else(|| bad("missing points"))?
        .iter()
        .map(|p| {
            p.as_array()
                .and_then(|a| a.iter().map(|x| x.as_i64()).collect::<Option<Vec<_>>>())
                .ok_or_else(|| bad("bad point"))
        })
        .collect::<Result<_>>()?;
    let cells: Vec<Vec<usize>> = v
        .get("cells")
        .and_then(|x| x.as_array())
        .ok_or_else(|| bad("missing cells"))?
        .iter()
        .map(|c| {
            c.as_array()
                .and_then(|a| a.iter().map(|x| x.as_u64().map(|u| u as usize)).collect::<Option<Vec<_>>>())
                .ok_or_else(|| bad("bad cell"))
        })
        .collect::<Result<_>>()?;
    let heights: Vec<BigRational> = v
        .get("heights")
        .and_then(|x| x.as_array())
        .ok_or_else(|| bad("missing heights"))?
        .iter()
        .map(|h| match h {
            serde_json::Value::String(s) => crate::rational::parse_bigq(s),
            serde_json::Value::Number(n) => {
                n.as_i64().map(|x| BigRational::from_integer(BigInt::from(x))).ok_or_else(|| bad("bad height"))
            }
            _ => Err(bad("bad height")),
        })
        .collect::<Result<_>>()?;
    Ok((points, cells, heights))
}

/// The standard simplex `conv{0, e_1, ..., e_n}` scaled by `k`.
pub fn standard_simplex(n: usize, k: i64) -> LatticePolytope {
    let mut pts = vec![vec![0i64; n]];
    for i in 0..n {
        let mut e = vec![0i64; n];
        e[i] = k;
        pts.push(e);
    }
    convex_hull(&pts).expect("standard simplex")
}
