//! Finite-dimensional associative Q-algebras given by structure constants.
//!
//! Every algebra is validated when it is built: associativity on all basis
//! triples, the unit law, and (when present) that the involution is an
//! involutive anti-automorphism fixing the unit.

mod dmatrix;
mod matrix;
mod quaternion;

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linear::{RatMatrix, RatVector};
use crate::rational::Rational;

pub use dmatrix::DMatrix;
pub(crate) use dmatrix::mul_flat;
pub use matrix::{matrix_algebra, split_model};
pub use quaternion::{
    hilbert_symbol, is_prime, quaternion_algebra, quaternion_for_prime, ramified_places, relevant_places,
    ramified_exactly_at, Place, QuaternionParams,
};

/// Sparse coefficient list, sorted by basis index, no zero entries.
type Sparse = Vec<(usize, Rational)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureAlgebra {
    dim: usize,
    labels: Vec<String>,
    // consts[i * dim + j] = b_i * b_j
    consts: Vec<Sparse>,
    unit: Option<RatVector>,
    // involution[i] = sigma(b_i)
    involution: Option<Vec<Sparse>>,
    quaternion: Option<QuaternionParams>,
}

/// Builds and validates an algebra from dense structure constants.
///
/// `struct_consts[i][j]` is the coefficient vector of `b_i * b_j`, and row
/// `i` of `involution` is the coefficient vector of the image of `b_i`.
pub fn make_algebra(
    dim: usize,
    struct_consts: &[Vec<RatVector>],
    unit: Option<RatVector>,
    involution: Option<RatMatrix>,
) -> Result<StructureAlgebra> {
    if dim == 0 {
        return Err(Error::InvalidArgument("algebra dimension must be positive".into()));
    }
    if struct_consts.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: struct_consts.len(),
        });
    }
    let mut consts = Vec::with_capacity(dim * dim);
    for row in struct_consts {
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: row.len(),
            });
        }
        for v in row {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            consts.push(to_sparse(v));
        }
    }
    if let Some(u) = &unit {
        if u.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: u.len(),
            });
        }
    }
    let involution = match involution {
        Some(m) if m.rows() != dim || m.cols() != dim => {
            return Err(Error::ShapeMismatch(format!(
                "involution is {}x{}, algebra has dimension {dim}",
                m.rows(),
                m.cols()
            )))
        }
        Some(m) => Some(m.row_vectors().iter().map(to_sparse).collect()),
        None => None,
    };
    let labels = (1..=dim).map(|i| format!("b{i}")).collect();
    StructureAlgebra::from_parts(labels, consts, unit, involution, None)
}

fn to_sparse(v: &RatVector) -> Sparse {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

fn to_dense(dim: usize, s: &Sparse) -> RatVector {
    let mut v = RatVector::zeros(dim);
    for (i, c) in s {
        v[*i] = c.clone();
    }
    v
}

/// Merges unsorted `(index, coefficient)` terms into canonical sparse form.
fn normalize(mut terms: Vec<(usize, Rational)>) -> Sparse {
    terms.sort_by_key(|t| t.0);
    let mut out: Sparse = Vec::with_capacity(terms.len());
    for (i, c) in terms {
        match out.last_mut() {
            Some((j, acc)) if *j == i => *acc += c,
            _ => out.push((i, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

impl StructureAlgebra {
    pub(crate) fn from_parts(
        labels: Vec<String>,
        consts: Vec<Sparse>,
        unit: Option<RatVector>,
        involution: Option<Vec<Sparse>>,
        quaternion: Option<QuaternionParams>,
    ) -> Result<Self> {
        let algebra = StructureAlgebra {
            dim: labels.len(),
            labels,
            consts,
            unit,
            involution,
            quaternion,
        };
        algebra.check_associativity()?;
        algebra.check_unit()?;
        algebra.check_involution()?;
        Ok(algebra)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Replaces the basis labels used for display.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self) -> Option<&RatVector> {
        self.unit.as_ref()
    }

    pub fn has_involution(&self) -> bool {
        self.involution.is_some()
    }

    pub fn quaternion_params(&self) -> Option<&QuaternionParams> {
        self.quaternion.as_ref()
    }

    /// Dense coefficient vector of `b_i * b_j`.
    pub fn structure_constant(&self, i: usize, j: usize) -> RatVector {
        to_dense(self.dim, &self.consts[i * self.dim + j])
    }

    /// Dense matrix whose row `i` is the image of `b_i`.
    pub fn involution_matrix(&self) -> Option<RatMatrix> {
        self.involution.as_ref().map(|rows| {
            let rows: Vec<RatVector> = rows.iter().map(|r| to_dense(self.dim, r)).collect();
            RatMatrix::from_rows(&rows).expect("square by construction")
        })
    }

    pub(crate) fn basis_product(&self, i: usize, j: usize) -> &[(usize, Rational)] {
        &self.consts[i * self.dim + j]
    }

    fn sparse_mul(&self, x: &[(usize, Rational)], y: &[(usize, Rational)]) -> Sparse {
        let mut terms = Vec::new();
        for (i, a) in x {
            for (j, b) in y {
                let ab = a * b;
                for (k, c) in self.basis_product(*i, *j) {
                    terms.push((*k, &ab * c));
                }
            }
        }
        normalize(terms)
    }

    fn check_associativity(&self) -> Result<()> {
        let n = self.dim;
        let bad = (0..n).into_par_iter().find_map_first(|i| {
            for j in 0..n {
                let ij = self.basis_product(i, j);
                for k in 0..n {
                    let left = self.sparse_mul(ij, &vec![(k, Rational::one())]);
                    let right = self.sparse_mul(&vec![(i, Rational::one())], self.basis_product(j, k));
                    if left != right {
                        return Some(Error::NonAssociative(i, j, k));
                    }
                }
            }
            None
        });
        bad.map_or(Ok(()), Err)
    }

    fn check_unit(&self) -> Result<()> {
        let Some(u) = &self.unit else { return Ok(()) };
        let u = to_sparse(u);
        for i in 0..self.dim {
            let b = vec![(i, Rational::one())];
            if self.sparse_mul(&u, &b) != b || self.sparse_mul(&b, &u) != b {
                return Err(Error::NotAUnit(i));
            }
        }
        Ok(())
    }

    fn apply_sparse_involution(&self, rows: &[Sparse], x: &[(usize, Rational)]) -> Sparse {
        let mut terms = Vec::new();
        for (i, a) in x {
            for (k, c) in &rows[*i] {
                terms.push((*k, a * c));
            }
        }
        normalize(terms)
    }

    fn check_involution(&self) -> Result<()> {
        let Some(rows) = &self.involution else { return Ok(()) };
        let n = self.dim;
        for i in 0..n {
            if self.apply_sparse_involution(rows, &rows[i]) != vec![(i, Rational::one())] {
                return Err(Error::InvolutionNotInvolutive(i));
            }
        }
        let bad = (0..n).into_par_iter().find_map_first(|i| {
            (0..n).find_map(|j| {
                let left = self.apply_sparse_involution(rows, self.basis_product(i, j));
                let right = self.sparse_mul(&rows[j], &rows[i]);
                (left != right).then_some(Error::InvolutionNotAntiMultiplicative(i, j))
            })
        });
        if let Some(e) = bad {
            return Err(e);
        }
        if let Some(u) = &self.unit {
            let su = self.apply_sparse_involution(rows, &to_sparse(u));
            if su != to_sparse(u) {
                return Err(Error::InvolutionMovesUnit);
            }
        }
        Ok(())
    }

    fn check_len(&self, v: &RatVector) -> Result<()> {
        if v.len() == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            })
        }
    }

    /// `out += x * y` on raw coefficient slices of length `dim`.
    pub(crate) fn mul_acc(&self, x: &[Rational], y: &[Rational], out: &mut [Rational]) {
        let ys: Vec<usize> = (0..self.dim).filter(|&j| !y[j].is_zero()).collect();
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for &j in &ys {
                let terms = self.basis_product(i, j);
                if terms.is_empty() {
                    continue;
                }
                let ab = a * &y[j];
                for (k, c) in terms {
                    out[*k] += &ab * c;
                }
            }
        }
    }

    /// Product of coefficient vectors. Lengths are the caller's responsibility.
    pub fn mul_vec(&self, x: &RatVector, y: &RatVector) -> RatVector {
        let mut out = vec![Rational::zero(); self.dim];
        self.mul_acc(x.as_slice(), y.as_slice(), &mut out);
        out.into()
    }

    pub(crate) fn involution_into(&self, x: &[Rational], out: &mut [Rational]) -> Result<()> {
        let rows = self.involution.as_ref().ok_or(Error::MissingInvolution)?;
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, c) in &rows[i] {
                out[*k] += a * c;
            }
        }
        Ok(())
    }

    pub fn involution_vec(&self, x: &RatVector) -> Result<RatVector> {
        let mut out = vec![Rational::zero(); self.dim];
        self.involution_into(x.as_slice(), &mut out)?;
        Ok(out.into())
    }

    pub fn is_commutative_on(&self, xs: &[RatVector]) -> bool {
        xs.iter().enumerate().all(|(i, x)| {
            xs[i + 1..]
                .iter()
                .all(|y| self.mul_vec(x, y) == self.mul_vec(y, x))
        })
    }

    pub fn element(self: &Arc<Self>, coeffs: RatVector) -> Result<AlgElement> {
        AlgElement::new(self.clone(), coeffs)
    }

    pub fn basis_element(self: &Arc<Self>, i: usize) -> AlgElement {
        AlgElement {
            algebra: self.clone(),
            coeffs: RatVector::unit(self.dim, i),
        }
    }

    pub fn zero_element(self: &Arc<Self>) -> AlgElement {
        AlgElement {
            algebra: self.clone(),
            coeffs: RatVector::zeros(self.dim),
        }
    }

    pub fn one(self: &Arc<Self>) -> Result<AlgElement> {
        let u = self.unit.clone().ok_or(Error::MissingUnit)?;
        Ok(AlgElement {
            algebra: self.clone(),
            coeffs: u,
        })
    }
}

/// An element of a [`StructureAlgebra`].
#[derive(Clone, Debug)]
pub struct AlgElement {
    algebra: Arc<StructureAlgebra>,
    coeffs: RatVector,
}

impl PartialEq for AlgElement {
    fn eq(&self, other: &Self) -> bool {
        self.same_algebra(other) && self.coeffs == other.coeffs
    }
}

impl AlgElement {
    pub fn new(algebra: Arc<StructureAlgebra>, coeffs: RatVector) -> Result<Self> {
        algebra.check_len(&coeffs)?;
        Ok(AlgElement { algebra, coeffs })
    }

    pub fn algebra(&self) -> &Arc<StructureAlgebra> {
        &self.algebra
    }

    pub fn coeffs(&self) -> &RatVector {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> RatVector {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    fn same_algebra(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra) || *self.algebra == *other.algebra
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.same_algebra(other) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    fn with(&self, coeffs: RatVector) -> Self {
        AlgElement {
            algebra: self.algebra.clone(),
            coeffs,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.with(self.algebra.mul_vec(&self.coeffs, &other.coeffs)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.with(self.coeffs.add(&other.coeffs)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.with(self.coeffs.sub(&other.coeffs)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.with(self.coeffs.scaled(c))
    }

    pub fn neg(&self) -> Self {
        self.with(self.coeffs.neg())
    }

    /// `self^n` for `n >= 1`; `n = 0` needs a unit.
    pub fn pow(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return self.algebra.one();
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn involution(&self) -> Result<Self> {
        Ok(self.with(self.algebra.involution_vec(&self.coeffs)?))
    }
}

impl fmt::Display for AlgElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (c, label) in self.coeffs.iter().zip(&self.algebra.labels) {
            if c.is_zero() {
                continue;
            }
            let mag = crate::rational::format(&c.abs());
            let sign = if c < &Rational::zero() { "-" } else { "+" };
            match (wrote, sign) {
                (false, "+") => {}
                (false, _) => write!(f, "-")?,
                (true, s) => write!(f, " {s} ")?,
            }
            if mag == "1" {
                write!(f, "{label}")?;
            } else {
                write!(f, "{mag}*{label}")?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}
