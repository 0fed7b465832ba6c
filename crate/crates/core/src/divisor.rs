//! Multihomogeneous polynomials on `(P^1)^r`.
//!
//! Factor `i` has coordinates `x_i, y_i`. A polynomial of multidegree
//! `(d_1, ..., d_r)` has `a_i + b_i = d_i` in every monomial, where `a_i`
//! and `b_i` are the exponents of `x_i` and `y_i`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Exponents `[a_1, b_1, ..., a_r, b_r]`.
pub type Exponents = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiHomogPoly {
    r: usize,
    degrees: Vec<u32>,
    terms: BTreeMap<Exponents, Rational>,
}

fn multidegree(r: usize, e: &[u32]) -> Vec<u32> {
    (0..r).map(|i| e[2 * i] + e[2 * i + 1]).collect()
}

fn format_monomial(e: &[u32]) -> String {
    let mut parts = Vec::new();
    for (k, &p) in e.iter().enumerate() {
        let var = format!("{}{}", if k % 2 == 0 { 'x' } else { 'y' }, k / 2 + 1);
        match p {
            0 => {}
            1 => parts.push(var),
            _ => parts.push(format!("{var}^{p}")),
        }
    }
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl MultiHomogPoly {
    pub fn zero(r: usize) -> Self {
        MultiHomogPoly {
            r,
            degrees: vec![0; r],
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(r: usize, c: Rational) -> Self {
        let mut p = Self::zero(r);
        if !c.is_zero() {
            p.terms.insert(vec![0; 2 * r], c);
        }
        p
    }

    pub fn one(r: usize) -> Self {
        Self::constant(r, Rational::one())
    }

    /// Builds a polynomial from terms, merging duplicates and checking that
    /// all surviving monomials share one multidegree.
    pub fn from_terms(r: usize, terms: impl IntoIterator<Item = (Exponents, Rational)>) -> Result<Self> {
        let mut map: BTreeMap<Exponents, Rational> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != 2 * r {
                return Err(Error::DimensionMismatch {
                    expected: 2 * r,
                    found: e.len(),
                });
            }
            *map.entry(e).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        let Some(first) = map.keys().next() else {
            return Ok(Self::zero(r));
        };
        let degrees = multidegree(r, first);
        for e in map.keys() {
            if multidegree(r, e) != degrees {
                return Err(Error::Inhomogeneous {
                    term: format_monomial(e),
                    expected: degrees,
                });
            }
        }
        Ok(MultiHomogPoly { r, degrees, terms: map })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Multidegree; `(0, ..., 0)` for the zero polynomial.
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, Rational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_r(&self, other: &Self) -> Result<()> {
        if self.r == other.r {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.r,
                found: other.r,
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_r(other)?;
        let terms = self.terms.iter().chain(&other.terms).map(|(e, c)| (e.clone(), c.clone()));
        Self::from_terms(self.r, terms)
    }

    pub fn neg(&self) -> Self {
        MultiHomogPoly {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.r);
        }
        MultiHomogPoly {
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_r(other)?;
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                terms.push((e, c1 * c2));
            }
        }
        Self::from_terms(self.r, terms)
    }

    /// `x_i -> x_i^{e_i}`, `y_i -> y_i^{e_i}`.
    pub fn substitute_powers(&self, exps: &[u32]) -> Result<Self> {
        if exps.len() != self.r {
            return Err(Error::DimensionMismatch {
                expected: self.r,
                found: exps.len(),
            });
        }
        if exps.contains(&0) {
            return Err(Error::InvalidArgument("substitution exponents must be positive".into()));
        }
        let terms = self.terms.iter().map(|(e, c)| {
            let e: Exponents = e.iter().enumerate().map(|(k, a)| a * exps[k / 2]).collect();
            (e, c.clone())
        });
        Self::from_terms(self.r, terms)
    }

    /// Sets `[x_i : y_i] = [p.0 : p.1]`; the result no longer depends on
    /// factor `i` (its exponents become zero).
    pub fn restrict(&self, i: usize, p: &(Rational, Rational)) -> Result<Self> {
        if !(1..=self.r).contains(&i) {
            return Err(Error::VertexOutOfRange { vertex: i, r: self.r });
        }
        if p.0.is_zero() && p.1.is_zero() {
            return Err(Error::InvalidPoint);
        }
        let k = i - 1;
        let terms = self.terms.iter().map(|(e, c)| {
            let value = c * pow(&p.0, e[2 * k]) * pow(&p.1, e[2 * k + 1]);
            let mut e = e.clone();
            e[2 * k] = 0;
            e[2 * k + 1] = 0;
            (e, value)
        });
        Self::from_terms(self.r, terms)
    }

    /// Evaluates at a point of `(P^1)^r` given by affine representatives.
    pub fn evaluate(&self, point: &[(Rational, Rational)]) -> Result<Rational> {
        if point.len() != self.r {
            return Err(Error::DimensionMismatch {
                expected: self.r,
                found: point.len(),
            });
        }
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| {
                point
                    .iter()
                    .enumerate()
                    .fold(c.clone(), |acc, (k, (x, y))| acc * pow(x, e[2 * k]) * pow(y, e[2 * k + 1]))
            })
            .sum())
    }
}

fn pow(x: &Rational, n: u32) -> Rational {
    num_traits::pow(x.clone(), n as usize)
}

impl fmt::Display for MultiHomogPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // largest exponent tuple first, so x-heavy monomials lead
        for (n, (e, c)) in self.terms.iter().rev().enumerate() {
            let negative = c < &Rational::zero();
            let mag = rational::format(&if negative { -c } else { c.clone() });
            match (n, negative) {
                (0, false) => {}
                (0, true) => f.write_str("-")?,
                (_, false) => f.write_str(" + ")?,
                (_, true) => f.write_str(" - ")?,
            }
            let mono = format_monomial(e);
            match (mag.as_str(), mono.as_str()) {
                (_, "1") => f.write_str(&mag)?,
                ("1", _) => f.write_str(&mono)?,
                _ => write!(f, "{mag}*{mono}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for MultiHomogPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Parses `+ - * / ^`, parentheses, rational constants and the variables
/// `x1..xr`, `y1..yr`. Division is only allowed by nonzero constants.
pub fn parse_poly(text: &str, r: usize) -> Result<MultiHomogPoly> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be positive".into()));
    }
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        r,
    };
    let raw = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    MultiHomogPoly::from_terms(r, raw)
}

// Unchecked polynomial used while parsing: any mix of degrees.
type Raw = BTreeMap<Exponents, Rational>;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    r: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            message: message.to_string(),
        }
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

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn expr(&mut self) -> Result<Raw> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = raw_add(acc, t, false);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = raw_add(acc, t, true);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Raw> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.unary()?;
                    acc = raw_mul(&acc, &f);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let f = self.unary()?;
                    let c = raw_constant(&f, 2 * self.r).ok_or(Error::Parse {
                        pos: at,
                        message: "can only divide by a constant".into(),
                    })?;
                    if c.is_zero() {
                        return Err(Error::Parse {
                            pos: at,
                            message: "division by zero".into(),
                        });
                    }
                    let inv = c.recip();
                    acc.values_mut().for_each(|v| *v *= &inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Raw> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                let u = self.unary()?;
                Ok(u.into_iter().map(|(e, c)| (e, -c)).collect())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Raw> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let n: u32 = self
            .digits()
            .ok_or_else(|| self.error("expected a non-negative integer exponent"))?
            .parse()
            .map_err(|_| self.error("exponent too large"))?;
        let mut acc: Raw = [(vec![0; 2 * self.r], Rational::one())].into_iter().collect();
        for _ in 0..n {
            acc = raw_mul(&acc, &base);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Raw> {
        let n = 2 * self.r;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c @ (b'x' | b'y')) => {
                let start = self.pos;
                self.pos += 1;
                let idx: usize = self
                    .digits()
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| self.error("expected a variable index after x or y"))?;
                if !(1..=self.r).contains(&idx) {
                    return Err(Error::Parse {
                        pos: start,
                        message: format!("variable index {idx} outside 1..={}", self.r),
                    });
                }
                let mut e = vec![0; n];
                e[2 * (idx - 1) + usize::from(c == b'y')] = 1;
                Ok([(e, Rational::one())].into_iter().collect())
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits().expect("digit");
                let v = rational::parse(&d).map_err(|_| self.error("bad number"))?;
                Ok([(vec![0; n], v)].into_iter().filter(|(_, v)| !v.is_zero()).collect())
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

fn raw_add(mut a: Raw, b: Raw, negate: bool) -> Raw {
    for (e, c) in b {
        let entry = a.entry(e).or_insert_with(Rational::zero);
        if negate {
            *entry -= c;
        } else {
            *entry += c;
        }
    }
    a.retain(|_, c| !c.is_zero());
    a
}

fn raw_mul(a: &Raw, b: &Raw) -> Raw {
    let mut out = Raw::new();
    for (e1, c1) in a {
        for (e2, c2) in b {
            let e: Exponents = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert_with(Rational::zero) += c1 * c2;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn raw_constant(a: &Raw, n: usize) -> Option<Rational> {
    match a.len() {
        0 => Some(Rational::zero()),
        1 => a.get(&vec![0; n]).cloned(),
        _ => None,
    }
}

/// Whether `prod(factors) = f` exactly. The multidegrees must add up unless
/// `f` or a factor is zero.
pub fn verify_factorization(f: &MultiHomogPoly, factors: &[MultiHomogPoly]) -> Result<bool> {
    let mut product = MultiHomogPoly::one(f.r());
    for h in factors {
        product = product.mul(h)?;
    }
    let any_zero = f.is_zero() || factors.iter().any(MultiHomogPoly::is_zero);
    if !any_zero && product.degrees() != f.degrees() {
        return Err(Error::InvalidArgument(format!(
            "factor multidegrees add up to {:?}, but f has multidegree {:?}",
            product.degrees(),
            f.degrees()
        )));
    }
    Ok(product == *f)
}

/// Whether `V(f)` contains the codimension-two fibre over
/// `(pt_i, pt_j) in P^1 x P^1`, i.e. `f` vanishes identically there.
pub fn contains_double_fiber(
    f: &MultiHomogPoly,
    i: usize,
    pt_i: &(Rational, Rational),
    j: usize,
    pt_j: &(Rational, Rational),
) -> Result<bool> {
    if i == j {
        return Err(Error::InvalidArgument("the two factors must differ".into()));
    }
    Ok(f.restrict(i, pt_i)?.restrict(j, pt_j)?.is_zero())
}

/// Parses `"i:[a:b]"` into a factor index and a projective point.
pub fn parse_fiber(text: &str) -> Result<(usize, (Rational, Rational))> {
    let bad = |m: &str| Error::Parse {
        pos: 0,
        message: format!("{m} in fibre {text:?}; expected i:[a:b]"),
    };
    let (idx, point) = text.split_once(':').ok_or_else(|| bad("missing ':'"))?;
    let idx: usize = idx.trim().parse().map_err(|_| bad("bad factor index"))?;
    let inner = point
        .trim()
        .strip_prefix('[')
        .and_then(|p| p.strip_suffix(']'))
        .ok_or_else(|| bad("missing brackets"))?;
    let (a, b) = inner.split_once(':').ok_or_else(|| bad("missing ':' in point"))?;
    let pt = (rational::parse(a)?, rational::parse(b)?);
    if pt.0.is_zero() && pt.1.is_zero() {
        return Err(Error::InvalidPoint);
    }
    Ok((idx, pt))
}
