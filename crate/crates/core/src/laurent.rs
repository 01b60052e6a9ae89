//! Laurent polynomials in `n` variables over a finite field.

use crate::error::{Error, Result};
use crate::ffield::{Embedding, FieldDesc, FieldElem};
use crate::lattice::{convex_hull, Face, LatticePolytope};
use std::collections::BTreeMap;
use std::fmt;

/// Largest absolute exponent accepted by the parser.
pub const MAX_EXPONENT: i64 = 1 << 20;

#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    pub n: usize,
    /// Exponent vector to nonzero coefficient.
    pub terms: BTreeMap<Vec<i64>, FieldElem>,
    pub field: FieldDesc,
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (u, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            let coeff = if self.field.k == 1 { c.coeffs[0].to_string() } else { format!("({c})") };
            write!(f, "{coeff}")?;
            for (j, &e) in u.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", j + 1)?,
                    _ => write!(f, "*x{}^{}", j + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

impl LaurentPoly {
    pub fn zero(n: usize, field: &FieldDesc) -> Self {
        LaurentPoly { n, terms: BTreeMap::new(), field: field.clone() }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, combining
    /// like terms and dropping zeros.
    pub fn from_terms(
        n: usize,
        field: &FieldDesc,
        terms: impl IntoIterator<Item = (Vec<i64>, FieldElem)>,
    ) -> Result<Self> {
        let mut f = Self::zero(n, field);
        for (u, c) in terms {
            if u.len() != n {
                return Err(Error::InvalidInput(format!("exponent {u:?} has length != {n}")));
            }
            if !field.contains(&c) {
                return Err(Error::FieldMismatch(format!("{c:?} not in {field:?}")));
            }
            f.add_term(u, c);
        }
        Ok(f)
    }

    fn add_term(&mut self, u: Vec<i64>, c: FieldElem) {
        let entry = self.terms.entry(u.clone()).or_insert_with(|| self.field.zero());
        *entry = self.field.add(entry, &c);
        if entry.is_zero() {
            self.terms.remove(&u);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exponent vectors of the terms, in lexicographic order.
    pub fn support(&self) -> Vec<Vec<i64>> {
        self.terms.keys().cloned().collect()
    }

    /// Parses text such as `"x1 + x2 + x1^-1*x2^-1 - 3"`.
    pub fn parse(text: &str, n: usize, field: &FieldDesc) -> Result<Self> {
        parse_laurent(text, n, field)
    }

    /// Value at a torus point whose coordinates lie in `ext`, an extension of
    /// the coefficient field.
    pub fn evaluate(&self, point: &[FieldElem], ext: &FieldDesc) -> Result<FieldElem> {
        if point.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "point has {} coordinates, expected {}",
                point.len(),
                self.n
            )));
        }
        let emb = Embedding::new(&self.field, ext)?;
        let mut inverses = Vec::with_capacity(self.n);
        for x in point {
            if !ext.contains(x) {
                return Err(Error::FieldMismatch(format!("{x:?} not in {ext:?}")));
            }
            if x.is_zero() {
                return Err(Error::ZeroCoordinate);
            }
            inverses.push(ext.invert(x)?);
        }
        let mut acc = ext.zero();
        for (u, c) in &self.terms {
            let mut term = emb.embed(c)?;
            for (j, &e) in u.iter().enumerate() {
                if e != 0 {
                    let base = if e > 0 { &point[j] } else { &inverses[j] };
                    term = ext.mul(&term, &ext.pow(base, e.unsigned_abs() as u128));
                }
            }
            acc = ext.add(&acc, &term);
        }
        Ok(acc)
    }

    /// Value at a point of `ext^n` where zero coordinates are allowed for
    /// variables that only occur with nonnegative exponents.
    pub fn evaluate_affine(&self, point: &[FieldElem], ext: &FieldDesc) -> Result<FieldElem> {
        if point.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "point has {} coordinates, expected {}",
                point.len(),
                self.n
            )));
        }
        let emb = Embedding::new(&self.field, ext)?;
        let mut acc = ext.zero();
        for (u, c) in &self.terms {
            let mut term = emb.embed(c)?;
            for (j, &e) in u.iter().enumerate() {
                if e != 0 {
                    term = ext.mul(&term, &ext.pow_signed(&point[j], e).map_err(|_| Error::ZeroCoordinate)?);
                }
            }
            acc = ext.add(&acc, &term);
        }
        Ok(acc)
    }

    /// Convex hull of the exponent vectors.
    pub fn newton_polytope(&self) -> Result<LatticePolytope> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        convex_hull(&self.support())
    }

    /// The terms whose exponents lie on `face`, which must be a face of the
    /// Newton polytope.
    pub fn face_restrict(&self, face: &Face) -> Result<LaurentPoly> {
        let delta = self.newton_polytope()?;
        if !delta.has_face(face) {
            return Err(Error::ForeignFace);
        }
        let terms = self
            .terms
            .iter()
            .filter(|(u, _)| delta.face_contains(face, u))
            .map(|(u, c)| (u.clone(), c.clone()));
        Ok(LaurentPoly { n: self.n, terms: terms.collect(), field: self.field.clone() })
    }

    /// `x_i * df/dx_i` for the 0-based variable index `i`.
    pub fn toric_partial(&self, i: usize) -> Result<LaurentPoly> {
        if i >= self.n {
            return Err(Error::InvalidInput(format!("variable index {i} out of range")));
        }
        let mut out = Self::zero(self.n, &self.field);
        for (u, c) in &self.terms {
            let c2 = self.field.scale(c, u[i]);
            if !c2.is_zero() {
                out.terms.insert(u.clone(), c2);
            }
        }
        Ok(out)
    }

    /// Ordinary partial derivative `df/dx_i` (0-based index).
    pub fn partial(&self, i: usize) -> Result<LaurentPoly> {
        if i >= self.n {
            return Err(Error::InvalidInput(format!("variable index {i} out of range")));
        }
        let mut out = Self::zero(self.n, &self.field);
        for (u, c) in &self.terms {
            let c2 = self.field.scale(c, u[i]);
            if !c2.is_zero() {
                let mut v = u.clone();
                v[i] -= 1;
                out.add_term(v, c2);
            }
        }
        Ok(out)
    }

    /// Multiplies every coefficient by a nonzero scalar.
    pub fn scale(&self, c: &FieldElem) -> LaurentPoly {
        let terms = self
            .terms
            .iter()
            .map(|(u, a)| (u.clone(), self.field.mul(a, c)))
            .filter(|(_, a)| !a.is_zero());
        LaurentPoly { n: self.n, terms: terms.collect(), field: self.field.clone() }
    }

    /// Sum of two polynomials over the same field and variables.
    pub fn add(&self, other: &LaurentPoly) -> Result<LaurentPoly> {
        if self.n != other.n || self.field != other.field {
            return Err(Error::FieldMismatch("adding polynomials of different shape".into()));
        }
        let mut out = self.clone();
        for (u, c) in &other.terms {
            out.add_term(u.clone(), c.clone());
        }
        Ok(out)
    }

    /// The same polynomial with coefficients pushed into an extension field.
    pub fn extend_to(&self, ext: &FieldDesc) -> Result<LaurentPoly> {
        let emb = Embedding::new(&self.field, ext)?;
        let mut terms = BTreeMap::new();
        for (u, c) in &self.terms {
            terms.insert(u.clone(), emb.embed(c)?);
        }
        Ok(LaurentPoly { n: self.n, terms, field: ext.clone() })
    }

    /// Substitutes the value `v` (in `ext`, an extension of the coefficient
    /// field) for variable `i`, returning a polynomial over `ext` in the
    /// remaining `n - 1` variables.
    pub fn substitute(&self, i: usize, v: &FieldElem, ext: &FieldDesc) -> Result<LaurentPoly> {
        if i >= self.n {
            return Err(Error::InvalidInput(format!("variable index {i} out of range")));
        }
        let lifted = self.extend_to(ext)?;
        let mut out = LaurentPoly::zero(self.n - 1, ext);
        for (u, c) in &lifted.terms {
            let e = u[i];
            let factor = if e == 0 {
                ext.one()
            } else if v.is_zero() {
                if e < 0 {
                    return Err(Error::ZeroCoordinate);
                }
                ext.zero()
            } else {
                ext.pow_signed(v, e)?
            };
            let c2 = ext.mul(c, &factor);
            if c2.is_zero() {
                continue;
            }
            let mut w = u.clone();
            w.remove(i);
            out.add_term(w, c2);
        }
        Ok(out)
    }

    /// Largest total degree among the terms (all exponents nonnegative).
    pub fn total_degree(&self) -> Option<i64> {
        self.terms.keys().map(|u| u.iter().sum()).max()
    }

    /// The terms of total degree exactly `m`.
    pub fn homogeneous_part(&self, m: i64) -> LaurentPoly {
        let terms = self
            .terms
            .iter()
            .filter(|(u, _)| u.iter().sum::<i64>() == m)
            .map(|(u, c)| (u.clone(), c.clone()));
        LaurentPoly { n: self.n, terms: terms.collect(), field: self.field.clone() }
    }
}

/// Parses a Laurent polynomial in `x1..xn`.
pub fn parse_laurent(text: &str, n: usize, field: &FieldDesc) -> Result<LaurentPoly> {
    Parser::new(text, n, field, None).parse()
}

/// Parses a family polynomial in `x1..x(n-1)` and a named parameter that
/// becomes the last variable.
pub fn parse_laurent_with_parameter(
    text: &str,
    n: usize,
    field: &FieldDesc,
    parameter: &str,
) -> Result<LaurentPoly> {
    Parser::new(text, n, field, Some(parameter)).parse()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
    field: &'a FieldDesc,
    parameter: Option<&'a str>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, n: usize, field: &'a FieldDesc, parameter: Option<&'a str>) -> Self {
        Parser { src: text.as_bytes(), pos: 0, n, field, parameter }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<LaurentPoly> {
        let mut poly = LaurentPoly::zero(self.n, self.field);
        let mut first = true;
        loop {
            let sign = match self.peek() {
                None if first => return self.err("empty polynomial"),
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    1
                }
                Some(b'-') => {
                    self.pos += 1;
                    -1
                }
                Some(_) if first => 1,
                Some(c) => return self.err(format!("expected '+' or '-', found '{}'", c as char)),
            };
            first = false;
            let (u, c) = self.term()?;
            let c = if sign < 0 { self.field.neg(&c) } else { c };
            poly.add_term(u, c);
        }
        Ok(poly)
    }

    fn term(&mut self) -> Result<(Vec<i64>, FieldElem)> {
        let mut u = vec![0i64; self.n];
        let mut coeff = self.field.one();
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let v = self.unsigned()?;
                    let r = (v % self.field.p as u128) as i64;
                    coeff = self.field.scale(&coeff, r);
                }
                Some(b'(') => {
                    self.pos += 1;
                    let neg = self.peek() == Some(b'-');
                    if neg {
                        self.pos += 1;
                    }
                    if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                        return self.err("expected an integer inside parentheses");
                    }
                    let v = (self.unsigned()? % self.field.p as u128) as i64;
                    coeff = self.field.scale(&coeff, if neg { -v } else { v });
                    if self.peek() != Some(b')') {
                        return self.err("expected ')'");
                    }
                    self.pos += 1;
                }
                Some(c) if c.is_ascii_alphabetic() => {
                    let var = self.variable()?;
                    let e = if self.peek() == Some(b'^') {
                        self.pos += 1;
                        self.exponent()?
                    } else {
                        1
                    };
                    u[var] += e;
                    if u[var].abs() > MAX_EXPONENT {
                        return self.err(format!("exponent exceeds {MAX_EXPONENT}"));
                    }
                }
                _ => return self.err("expected a coefficient or a variable"),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((u, coeff))
    }

    fn unsigned(&mut self) -> Result<u128> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        s.parse::<u128>().or_else(|_| {
            self.pos = start;
            self.err("integer too large")
        })
    }

    fn exponent(&mut self) -> Result<i64> {
        let paren = self.peek() == Some(b'(');
        if paren {
            self.pos += 1;
        }
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            return self.err("expected an exponent");
        }
        let v = self.unsigned()?;
        if v > MAX_EXPONENT as u128 {
            return self.err(format!("exponent exceeds {MAX_EXPONENT}"));
        }
        if paren {
            if self.peek() != Some(b')') {
                return self.err("expected ')'");
            }
            self.pos += 1;
        }
        Ok(if neg { -(v as i64) } else { v as i64 })
    }

    fn variable(&mut self) -> Result<usize> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        if let Some(par) = self.parameter {
            if name == par {
                return Ok(self.n - 1);
            }
        }
        let limit = if self.parameter.is_some() { self.n - 1 } else { self.n };
        let idx = name
            .strip_prefix('x')
            .and_then(|s| s.parse::<usize>().ok())
            .filter(|&j| j >= 1 && j <= limit);
        match idx {
            Some(j) => Ok(j - 1),
            None => {
                self.pos = start;
                self.err(format!("unknown variable '{name}'"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::make_field;

    fn f7() -> FieldDesc {
        make_field(7, 1).unwrap()
    }

    #[test]
    fn parse_examples() {
        let f = parse_laurent("x1 + x2 + x1^-1*x2^-1 - 3", 2, &f7()).unwrap();
        assert_eq!(f.support(), vec![vec![-1, -1], vec![0, 0], vec![0, 1], vec![1, 0]]);
        assert_eq!(f.terms[&vec![0, 0]], f7().from_int(4));
        assert!(parse_laurent("x1 - x1", 1, &f7()).unwrap().is_zero());
        let f5 = make_field(5, 1).unwrap();
        let g = parse_laurent("2*x1^2*x2^-3", 2, &f5).unwrap();
        assert_eq!(g.terms.len(), 1);
        assert_eq!(g.terms[&vec![2, -3]], f5.from_int(2));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_laurent("x3", 2, &f7()), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(parse_laurent("x1 +", 1, &f7()), Err(Error::Parse { .. })));
        assert!(matches!(parse_laurent("x1^", 1, &f7()), Err(Error::Parse { .. })));
        assert!(matches!(parse_laurent("x1^2000000", 1, &f7()), Err(Error::Parse { .. })));
        assert!(matches!(parse_laurent("", 1, &f7()), Err(Error::Parse { .. })));
    }

    #[test]
    fn parse_parameter_and_parentheses() {
        let f = parse_laurent_with_parameter("x1 + x2 + x1^(-1)*x2^(-1) - y", 3, &f7(), "y").unwrap();
        assert_eq!(f.terms[&vec![0, 0, 1]], f7().from_int(-1));
        let g = parse_laurent("(-2)*x1 + 3 x1", 1, &f7());
        assert!(g.is_err());
        let g = parse_laurent("(-2)*x1 + 3*x1", 1, &f7()).unwrap();
        assert_eq!(g.terms[&vec![1]], f7().from_int(1));
    }

    #[test]
    fn evaluation_examples() {
        let f = f7();
        let one = f.one();
        let g = parse_laurent("x1 + x2 + x1^-1*x2^-1", 2, &f).unwrap();
        assert_eq!(g.evaluate(&[one.clone(), one.clone()], &f).unwrap(), f.from_int(3));
        let h = parse_laurent("x1 - 1", 1, &f).unwrap();
        assert!(h.evaluate(&[one.clone()], &f).unwrap().is_zero());
        let c = parse_laurent("x1 + x2 + x1^-1*x2^-1 - 3", 2, &f).unwrap();
        assert!(c.evaluate(&[one.clone(), one.clone()], &f).unwrap().is_zero());
        assert_eq!(c.evaluate(&[one, f.zero()], &f), Err(Error::ZeroCoordinate));
    }

    #[test]
    fn evaluation_in_extension() {
        let f = f7();
        let f49 = make_field(7, 2).unwrap();
        let g = parse_laurent("x1^2 + 1", 1, &f).unwrap();
        // t^2 + 1 = 0 in F_49 by construction of the modulus.
        assert!(g.evaluate(&[f49.t()], &f49).unwrap().is_zero());
    }

    #[test]
    fn newton_polytope_examples() {
        let f = f7();
        let g = parse_laurent("x1 + x2 + x1^-1*x2^-1 - 3", 2, &f).unwrap();
        let d = g.newton_polytope().unwrap();
        assert_eq!(d.vertices, vec![vec![-1, -1], vec![0, 1], vec![1, 0]]);
        let single = parse_laurent("5*x1^2*x2", 2, &f).unwrap().newton_polytope().unwrap();
        assert_eq!(single.vertices.len(), 1);
        let sq = parse_laurent("1 + 2*x1 + 3*x2 + 4*x1*x2", 2, &f).unwrap();
        assert_eq!(sq.newton_polytope().unwrap().vertices.len(), 4);
        assert_eq!(
            g.scale(&f.from_int(3)).newton_polytope().unwrap(),
            g.newton_polytope().unwrap()
        );
        assert_eq!(LaurentPoly::zero(2, &f).newton_polytope(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn face_restriction_examples() {
        let f = f7();
        let g = parse_laurent("x1 + x2 + x1^-1*x2^-1", 2, &f).unwrap();
        let delta = g.newton_polytope().unwrap();
        let faces = delta.faces();
        let whole = faces.last().unwrap();
        assert_eq!(g.face_restrict(whole).unwrap(), g);
        let vertex = faces.iter().find(|fc| fc.vertices == vec![vec![1, 0]]).unwrap();
        assert_eq!(g.face_restrict(vertex).unwrap(), parse_laurent("x1", 2, &f).unwrap());
        let edge = faces.iter().find(|fc| fc.vertices == vec![vec![0, 1], vec![1, 0]]).unwrap();
        let r = g.face_restrict(edge).unwrap();
        assert_eq!(r, parse_laurent("x1 + x2", 2, &f).unwrap());
        // Idempotent along the chain edge -> vertex.
        let rv = r.face_restrict(&r.newton_polytope().unwrap().faces()[0]).unwrap();
        assert_eq!(rv.terms.len(), 1);

        let other = parse_laurent("x1 + 1", 2, &f).unwrap();
        let foreign = &other.newton_polytope().unwrap().faces()[2];
        assert_eq!(g.face_restrict(foreign), Err(Error::ForeignFace));
    }

    #[test]
    fn toric_partial_examples() {
        let f = f7();
        let g = parse_laurent("x1 + x2", 2, &f).unwrap();
        assert_eq!(g.toric_partial(0).unwrap(), parse_laurent("x1", 2, &f).unwrap());
        let h = parse_laurent("x1^7", 1, &f).unwrap();
        assert!(h.toric_partial(0).unwrap().is_zero());
        let c = parse_laurent("x1 + x2 + x1^-1*x2^-1", 2, &f).unwrap();
        assert_eq!(
            c.toric_partial(1).unwrap(),
            parse_laurent("x2 - x1^-1*x2^-1", 2, &f).unwrap()
        );
    }

    #[test]
    fn toric_partial_is_termwise_exponent_scaling() {
        let f = make_field(5, 1).unwrap();
        let g = parse_laurent("3*x1^4*x2^-2 + x1^-7 + 2*x2^5 + x1*x2", 2, &f).unwrap();
        for i in 0..2 {
            let d = g.toric_partial(i).unwrap();
            for (u, c) in &g.terms {
                let expected = f.scale(c, u[i]);
                match d.terms.get(u) {
                    Some(v) => assert_eq!(v, &expected),
                    None => assert!(expected.is_zero()),
                }
            }
        }
    }

    #[test]
    fn substitution() {
        let f = f7();
        let g = parse_laurent_with_parameter("x1 + x1^-1 - y", 2, &f, "y").unwrap();
        let fib = g.substitute(1, &f.from_int(2), &f).unwrap();
        assert_eq!(fib, parse_laurent("x1 + x1^-1 - 2", 1, &f).unwrap());
    }
}
