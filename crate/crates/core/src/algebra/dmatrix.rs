use std::sync::Arc;

use num_traits::Zero;

use super::{AlgElement, StructureAlgebra};
use crate::error::{Error, Result};
use crate::linear::RatVector;
use crate::rational::Rational;

/// A `rows x cols` matrix with entries in an involutive base algebra.
///
/// Flattened coefficients are row-major over entries, then base-coefficient
/// order within each entry, which matches the basis order of
/// [`matrix_algebra`](super::matrix_algebra) for square matrices.
#[derive(Clone, Debug)]
pub struct DMatrix {
    base: Arc<StructureAlgebra>,
    rows: usize,
    cols: usize,
    data: RatVector,
}

impl PartialEq for DMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data == other.data
            && (Arc::ptr_eq(&self.base, &other.base) || *self.base == *other.base)
    }
}

impl DMatrix {
    pub fn zeros(base: Arc<StructureAlgebra>, rows: usize, cols: usize) -> Self {
        let len = rows * cols * base.dim();
        DMatrix {
            base,
            rows,
            cols,
            data: RatVector::zeros(len),
        }
    }

    /// Identity-like matrix: the base unit on the main diagonal.
    pub fn identity(base: Arc<StructureAlgebra>, n: usize) -> Result<Self> {
        Self::scalar_diagonal(base, n, n)
    }

    /// Unit on positions `(i, i)` for `i < min(rows, cols)`.
    pub fn scalar_diagonal(base: Arc<StructureAlgebra>, rows: usize, cols: usize) -> Result<Self> {
        let unit = base.unit().cloned().ok_or(Error::MissingUnit)?;
        let mut m = Self::zeros(base, rows, cols);
        for i in 0..rows.min(cols) {
            m.set_entry(i, i, &unit);
        }
        Ok(m)
    }

    pub fn from_flat(base: Arc<StructureAlgebra>, rows: usize, cols: usize, data: RatVector) -> Result<Self> {
        let expected = rows * cols * base.dim();
        if data.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: data.len(),
            });
        }
        Ok(DMatrix {
            base,
            rows,
            cols,
            data,
        })
    }

    /// Builds from row-major entry coefficient vectors.
    pub fn from_entries(base: Arc<StructureAlgebra>, rows: usize, cols: usize, entries: &[RatVector]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let mut m = Self::zeros(base, rows, cols);
        for (idx, e) in entries.iter().enumerate() {
            if e.len() != m.base.dim() {
                return Err(Error::DimensionMismatch {
                    expected: m.base.dim(),
                    found: e.len(),
                });
            }
            m.set_entry(idx / cols, idx % cols, e);
        }
        Ok(m)
    }

    /// Interprets an element of `M_n(base)` as an `n x n` matrix.
    pub fn from_element(base: Arc<StructureAlgebra>, n: usize, x: &AlgElement) -> Result<Self> {
        Self::from_flat(base, n, n, x.coeffs().clone())
    }

    pub fn base(&self) -> &Arc<StructureAlgebra> {
        &self.base
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn flatten(&self) -> &RatVector {
        &self.data
    }

    pub fn into_flat(self) -> RatVector {
        self.data
    }

    fn offset(&self, r: usize, c: usize) -> usize {
        (r * self.cols + c) * self.base.dim()
    }

    fn entry_slice(&self, r: usize, c: usize) -> &[Rational] {
        let d = self.base.dim();
        let o = self.offset(r, c);
        &self.data.as_slice()[o..o + d]
    }

    pub fn entry(&self, r: usize, c: usize) -> AlgElement {
        AlgElement {
            algebra: self.base.clone(),
            coeffs: self.entry_slice(r, c).to_vec().into(),
        }
    }

    pub fn set_entry(&mut self, r: usize, c: usize, coeffs: &RatVector) {
        let o = self.offset(r, c);
        for (k, x) in coeffs.iter().enumerate() {
            self.data[o + k] = x.clone();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.is_zero()
    }

    fn check_base(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.base, &other.base) || *self.base == *other.base {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = mul_flat(
            &self.base,
            (self.rows, self.cols, other.cols),
            self.data.as_slice(),
            other.data.as_slice(),
        );
        Ok(DMatrix {
            base: self.base.clone(),
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_base(other)?;
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch(format!(
                "{:?} plus {:?}",
                self.shape(),
                other.shape()
            )));
        }
        Ok(DMatrix {
            data: self.data.add(&other.data),
            ..self.clone()
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        DMatrix {
            data: self.data.scaled(c),
            ..self.clone()
        }
    }

    /// Transpose with the base involution applied entrywise.
    pub fn dagger_transpose(&self) -> Result<Self> {
        Ok(DMatrix {
            base: self.base.clone(),
            rows: self.cols,
            cols: self.rows,
            data: dagger_flat(&self.base, self.rows, self.cols, self.data.as_slice())?,
        })
    }

    /// Applies a base-coefficient linear map to every entry.
    pub fn map_entries<F>(&self, target: Arc<StructureAlgebra>, f: F) -> Result<Self>
    where
        F: Fn(&RatVector) -> Result<RatVector>,
    {
        let mut m = Self::zeros(target, self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let image = f(&self.entry_slice(r, c).to_vec().into())?;
                if image.len() != m.base.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: m.base.dim(),
                        found: image.len(),
                    });
                }
                m.set_entry(r, c, &image);
            }
        }
        Ok(m)
    }

    /// Entries as nested coefficient string lists, `rows x cols x dim(base)`.
    pub fn to_nested_strings(&self) -> Vec<Vec<Vec<String>>> {
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| self.entry(r, c).coeffs().to_strings())
                    .collect()
            })
            .collect()
    }
}

/// Product of flattened `rows x inner` and `inner x cols` matrices over `base`.
pub(crate) fn mul_flat(
    base: &StructureAlgebra,
    (rows, inner, cols): (usize, usize, usize),
    x: &[Rational],
    y: &[Rational],
) -> RatVector {
    let d = base.dim();
    let mut out = vec![Rational::zero(); rows * cols * d];
    for r in 0..rows {
        for k in 0..inner {
            let a = &x[(r * inner + k) * d..(r * inner + k + 1) * d];
            if a.iter().all(Zero::is_zero) {
                continue;
            }
            for c in 0..cols {
                let b = &y[(k * cols + c) * d..(k * cols + c + 1) * d];
                let o = (r * cols + c) * d;
                base.mul_acc(a, b, &mut out[o..o + d]);
            }
        }
    }
    out.into()
}

/// Dagger-transpose of a flattened `rows x cols` matrix.
pub(crate) fn dagger_flat(base: &StructureAlgebra, rows: usize, cols: usize, x: &[Rational]) -> Result<RatVector> {
    let d = base.dim();
    let mut out = vec![Rational::zero(); x.len()];
    for r in 0..rows {
        for c in 0..cols {
            let src = (r * cols + c) * d;
            let o = (c * rows + r) * d;
            base.involution_into(&x[src..src + d], &mut out[o..o + d])?;
        }
    }
    Ok(out.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::quaternion_algebra;
    use crate::rational::int;

    fn hamilton() -> Arc<StructureAlgebra> {
        Arc::new(quaternion_algebra(&int(-1), &int(-1)).unwrap())
    }

    fn q(xs: &[i64]) -> RatVector {
        RatVector::from_ints(xs)
    }

    #[test]
    fn identity_is_self_dual() {
        let d = hamilton();
        let id = DMatrix::identity(d, 3).unwrap();
        assert_eq!(id.dagger_transpose().unwrap(), id);
    }

    #[test]
    fn dagger_transpose_by_hand() {
        let d = hamilton();
        let zero = q(&[0, 0, 0, 0]);
        // [[i, 0], [j, 0]] -> [[-i, -j], [0, 0]]
        let m = DMatrix::from_entries(d.clone(), 2, 2, &[q(&[0, 1, 0, 0]), zero.clone(), q(&[0, 0, 1, 0]), zero.clone()]).unwrap();
        let expected = DMatrix::from_entries(d, 2, 2, &[q(&[0, -1, 0, 0]), q(&[0, 0, -1, 0]), zero.clone(), zero]).unwrap();
        let t = m.dagger_transpose().unwrap();
        assert_eq!(t, expected);
        assert_eq!(t.dagger_transpose().unwrap(), m);
    }

    #[test]
    fn rectangular_shapes() {
        let d = hamilton();
        let a = DMatrix::from_entries(d.clone(), 1, 2, &[q(&[1, 2, 0, 0]), q(&[0, 0, 3, 1])]).unwrap();
        let t = a.dagger_transpose().unwrap();
        assert_eq!(t.shape(), (2, 1));
        let p = a.mul(&t).unwrap();
        assert_eq!(p.shape(), (1, 1));
        // a a^dagger = N(1+2i) + N(3j+k) = 5 + 10
        assert_eq!(p.entry(0, 0).coeffs(), &q(&[15, 0, 0, 0]));
        assert!(matches!(a.mul(&a), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn product_reverses_under_dagger() {
        let d = hamilton();
        let a = DMatrix::from_entries(d.clone(), 2, 1, &[q(&[1, 2, -1, 0]), q(&[0, 3, 1, 1])]).unwrap();
        let b = DMatrix::from_entries(d, 1, 2, &[q(&[2, 0, 1, -1]), q(&[1, 1, 1, 1])]).unwrap();
        let ab = a.mul(&b).unwrap();
        assert_eq!(
            ab.dagger_transpose().unwrap(),
            b.dagger_transpose().unwrap().mul(&a.dagger_transpose().unwrap()).unwrap()
        );
    }
}
