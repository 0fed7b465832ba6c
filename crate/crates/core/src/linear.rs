//! Dense exact linear algebra: vectors, matrices, and subspaces kept in
//! reduced row-echelon form.
//!
//! A [`Subspace`] is canonical: two subspaces of the same ambient space are
//! equal exactly when their stored bases are identical, so `==` is a
//! mathematical equality test.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RatVector(Vec<Rational>);

impl RatVector {
    pub fn zeros(len: usize) -> Self {
        RatVector(vec![Rational::zero(); len])
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v[index] = Rational::one();
        v
    }

    pub fn from_ints(values: &[i64]) -> Self {
        values.iter().map(|&n| rational::int(n)).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Rational> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn first_nonzero(&self) -> Option<usize> {
        self.0.iter().position(|c| !c.is_zero())
    }

    /// Indices of nonzero entries.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.0[i].is_zero()).collect()
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zeros(self.len());
        }
        self.0.iter().map(|x| x * c).collect()
    }

    pub fn scale_mut(&mut self, c: &Rational) {
        for x in &mut self.0 {
            if !x.is_zero() {
                *x *= c;
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()
    }

    pub fn neg(&self) -> Self {
        self.0.iter().map(|a| -a).collect()
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            if !b.is_zero() {
                *a += b;
            }
        }
    }

    /// `self -= c * other`, skipping zero entries of `other`.
    pub fn sub_scaled(&mut self, c: &Rational, other: &Self) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            if !b.is_zero() {
                *a -= c * b;
            }
        }
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(rational::format).collect()
    }

    pub fn from_strings<S: AsRef<str>>(items: &[S]) -> Result<Self> {
        items.iter().map(|s| rational::parse(s.as_ref())).collect()
    }
}

impl From<Vec<Rational>> for RatVector {
    fn from(v: Vec<Rational>) -> Self {
        RatVector(v)
    }
}

impl FromIterator<Rational> for RatVector {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        RatVector(iter.into_iter().collect())
    }
}

impl Index<usize> for RatVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl IndexMut<usize> for RatVector {
    fn index_mut(&mut self, i: usize) -> &mut Rational {
        &mut self.0[i]
    }
}

impl fmt::Display for RatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(", "))
    }
}

impl Serialize for RatVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let items = Vec::<serde_json::Value>::deserialize(d)?;
        items
            .iter()
            .map(rational::from_json)
            .collect::<Result<RatVector>>()
            .map_err(serde::de::Error::custom)
    }
}

/// Row-major dense rational matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: &[RatVector]) -> Result<Self> {
        let cols = rows.first().map_or(0, RatVector::len);
        check_lengths(rows, cols)?;
        Ok(RatMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.iter().cloned()).collect(),
        })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        let rows: Vec<RatVector> = rows.iter().map(|r| RatVector::from_ints(r)).collect();
        Self::from_rows(&rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rational) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> RatVector {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec().into()
    }

    pub fn row_vectors(&self) -> Vec<RatVector> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn column(&self, c: usize) -> RatVector {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &RatVector) -> Result<RatVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let support = v.support();
        Ok((0..self.rows)
            .map(|r| {
                let mut acc = Rational::zero();
                for &c in &support {
                    let a = self.get(r, c);
                    if !a.is_zero() {
                        acc += a * &v[c];
                    }
                }
                acc
            })
            .collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        out.data[r * other.cols + c] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        Echelon::from_rows(self.cols, self.row_vectors()).dim()
    }
}

fn check_lengths(rows: &[RatVector], len: usize) -> Result<()> {
    match rows.iter().find(|r| r.len() != len) {
        Some(bad) => Err(Error::DimensionMismatch {
            expected: len,
            found: bad.len(),
        }),
        None => Ok(()),
    }
}

/// A subspace of `Q^n` stored by its reduced row-echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<RatVector>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: (0..ambient_dim)
                .map(|i| RatVector::unit(ambient_dim, i))
                .collect(),
            pivots: (0..ambient_dim).collect(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    pub fn basis(&self) -> &[RatVector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check(&self, len: usize) -> Result<()> {
        if len == self.ambient_dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: len,
            })
        }
    }

    /// Residual of `v` after subtracting its projection along the pivots.
    /// Zero exactly when `v` lies in the subspace.
    pub fn reduce(&self, v: &RatVector) -> Result<RatVector> {
        self.check(v.len())?;
        Ok(reduce_against(&self.basis, &self.pivots, v.clone()))
    }

    pub fn contains(&self, v: &RatVector) -> Result<bool> {
        Ok(self.reduce(v)?.is_zero())
    }

    /// Coordinates of `v` in the stored basis, or `None` if `v` is outside.
    pub fn coordinates(&self, v: &RatVector) -> Result<Option<Vec<Rational>>> {
        if !self.contains(v)? {
            return Ok(None);
        }
        Ok(Some(self.pivots.iter().map(|&p| v[p].clone()).collect()))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        other.check(self.ambient_dim)?;
        for v in &self.basis {
            if !other.contains(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check(other.ambient_dim)?;
        let mut ech = Echelon::from_subspace(self.clone());
        for v in &other.basis {
            ech.insert(v.clone());
        }
        Ok(ech.finish())
    }

    pub fn equal(&self, other: &Subspace) -> Result<bool> {
        self.check(other.ambient_dim)?;
        Ok(self == other)
    }

    /// Image under a linear map applied to each basis vector.
    pub fn map<F>(&self, target_dim: usize, f: F) -> Result<Subspace>
    where
        F: Fn(&RatVector) -> Result<RatVector>,
    {
        let images = self.basis.iter().map(f).collect::<Result<Vec<_>>>()?;
        echelonize(target_dim, &images)
    }
}

impl Serialize for Subspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Subspace", 3)?;
        st.serialize_field("ambient_dim", &self.ambient_dim)?;
        st.serialize_field("dim", &self.dim())?;
        st.serialize_field("basis", &self.basis)?;
        st.end()
    }
}

fn reduce_against(rows: &[RatVector], pivots: &[usize], mut v: RatVector) -> RatVector {
    for (row, &p) in rows.iter().zip(pivots) {
        if !v[p].is_zero() {
            let c = v[p].clone();
            v.sub_scaled(&c, row);
        }
    }
    v
}

/// Incremental reduced row-echelon builder.
#[derive(Clone, Debug)]
pub struct Echelon {
    ambient_dim: usize,
    rows: Vec<RatVector>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(ambient_dim: usize) -> Self {
        Echelon {
            ambient_dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_subspace(s: Subspace) -> Self {
        Echelon {
            ambient_dim: s.ambient_dim,
            rows: s.basis,
            pivots: s.pivots,
        }
    }

    /// Unchecked convenience for callers that already validated lengths.
    pub fn from_rows(ambient_dim: usize, rows: impl IntoIterator<Item = RatVector>) -> Self {
        let mut ech = Self::new(ambient_dim);
        for r in rows {
            ech.insert(r);
        }
        ech
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ambient_dim
    }

    pub fn contains(&self, v: &RatVector) -> bool {
        reduce_against(&self.rows, &self.pivots, v.clone()).is_zero()
    }

    /// Adds `v` to the span. Returns `true` if the dimension grew.
    pub fn insert(&mut self, v: RatVector) -> bool {
        debug_assert_eq!(v.len(), self.ambient_dim);
        let mut v = reduce_against(&self.rows, &self.pivots, v);
        let Some(p) = v.first_nonzero() else {
            return false;
        };
        let inv = v[p].recip();
        v.scale_mut(&inv);
        for row in &mut self.rows {
            if !row[p].is_zero() {
                let c = row[p].clone();
                row.sub_scaled(&c, &v);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, v);
        self.pivots.insert(at, p);
        true
    }

    pub fn finish(self) -> Subspace {
        Subspace {
            ambient_dim: self.ambient_dim,
            basis: self.rows,
            pivots: self.pivots,
        }
    }
}

pub fn echelonize(ambient_dim: usize, rows: &[RatVector]) -> Result<Subspace> {
    check_lengths(rows, ambient_dim)?;
    Ok(Echelon::from_rows(ambient_dim, rows.iter().cloned()).finish())
}

/// One exact solution of `a * x = b`, free variables set to zero, or `None`
/// when the system is inconsistent.
pub fn solve_linear(a: &RatMatrix, b: &RatVector) -> Result<Option<RatVector>> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: b.len(),
        });
    }
    let n = a.cols();
    let augmented: Vec<RatVector> = (0..a.rows())
        .map(|r| {
            let mut row = a.row(r).into_vec();
            row.push(b[r].clone());
            row.into()
        })
        .collect();
    let rref = Echelon::from_rows(n + 1, augmented).finish();
    if rref.pivots().last() == Some(&n) {
        return Ok(None);
    }
    let mut x = RatVector::zeros(n);
    for (row, &p) in rref.basis().iter().zip(rref.pivots()) {
        x[p] = row[n].clone();
    }
    Ok(Some(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use proptest::prelude::*;

    fn v(xs: &[i64]) -> RatVector {
        RatVector::from_ints(xs)
    }

    #[test]
    fn echelonize_examples() {
        let s = echelonize(2, &[v(&[1, 2]), v(&[2, 4])]).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.basis(), &[v(&[1, 2])]);

        assert_eq!(echelonize(3, &[]).unwrap().dim(), 0);

        let s = echelonize(2, &[v(&[0, 1]), v(&[1, 0])]).unwrap();
        assert_eq!(s.basis(), &[v(&[1, 0]), v(&[0, 1])]);
    }

    #[test]
    fn echelonize_rejects_ragged_rows() {
        let err = echelonize(2, &[v(&[1, 2]), v(&[1, 2, 3])]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn contains_examples() {
        let s = echelonize(2, &[v(&[1, 0])]).unwrap();
        assert!(s.contains(&v(&[3, 0])).unwrap());
        assert!(!s.contains(&v(&[0, 1])).unwrap());
        // 5*(1,2) + 1*(0,1) = (5,11)
        let s = echelonize(2, &[v(&[1, 2]), v(&[0, 1])]).unwrap();
        assert!(s.contains(&v(&[5, 11])).unwrap());
        assert!(s.contains(&v(&[1])).is_err());
    }

    #[test]
    fn sums() {
        let x = echelonize(2, &[v(&[1, 0])]).unwrap();
        let y = echelonize(2, &[v(&[0, 1])]).unwrap();
        assert_eq!(x.sum(&y).unwrap(), Subspace::full(2));
        assert_eq!(x.sum(&x).unwrap(), x);
        let a = echelonize(2, &[v(&[1, 1])]).unwrap();
        let b = echelonize(2, &[v(&[1, -1])]).unwrap();
        assert_eq!(a.sum(&b).unwrap().dim(), 2);
        assert!(x.sum(&Subspace::zero(3)).is_err());
        assert!(!x.equal(&y).unwrap());
    }

    #[test]
    fn solve_examples() {
        let id = RatMatrix::identity(3);
        assert_eq!(
            solve_linear(&id, &v(&[4, 5, 6])).unwrap(),
            Some(v(&[4, 5, 6]))
        );
        let zero = RatMatrix::zeros(2, 2);
        assert_eq!(solve_linear(&zero, &v(&[1, 0])).unwrap(), None);
        let a = RatMatrix::from_ints(&[&[1, 1], &[0, 1]]).unwrap();
        assert_eq!(solve_linear(&a, &v(&[3, 1])).unwrap(), Some(v(&[2, 1])));
        // underdetermined: x + y = 2 -> (2, 0)
        let a = RatMatrix::from_ints(&[&[1, 1]]).unwrap();
        assert_eq!(solve_linear(&a, &v(&[2])).unwrap(), Some(v(&[2, 0])));
        assert!(solve_linear(&a, &v(&[1, 2])).is_err());
    }

    fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        prop::collection::vec(prop::collection::vec(-4i64..=4, cols), rows)
    }

    fn to_rows(m: &[Vec<i64>]) -> Vec<RatVector> {
        m.iter().map(|r| RatVector::from_ints(r)).collect()
    }

    proptest! {
        #[test]
        fn echelonize_is_idempotent(m in small_matrix(5, 4)) {
            let s = echelonize(4, &to_rows(&m)).unwrap();
            let again = echelonize(4, s.basis()).unwrap();
            prop_assert_eq!(&s, &again);
            for (row, &p) in s.basis().iter().zip(s.pivots()) {
                prop_assert_eq!(&row[p], &int(1));
                for other in s.basis() {
                    if other != row {
                        prop_assert!(other[p] == int(0));
                    }
                }
            }
            prop_assert!(s.pivots().windows(2).all(|w| w[0] < w[1]));
        }

        #[test]
        fn order_does_not_matter(m in small_matrix(4, 3)) {
            let rows = to_rows(&m);
            let mut rev = rows.clone();
            rev.reverse();
            prop_assert_eq!(echelonize(3, &rows).unwrap(), echelonize(3, &rev).unwrap());
        }

        #[test]
        fn contains_matches_dimension(m in small_matrix(3, 4), w in prop::collection::vec(-4i64..=4, 4)) {
            let s = echelonize(4, &to_rows(&m)).unwrap();
            let w = RatVector::from_ints(&w);
            let grown = s.sum(&echelonize(4, &[w.clone()]).unwrap()).unwrap();
            prop_assert_eq!(s.contains(&w).unwrap(), grown.dim() == s.dim());
        }

        #[test]
        fn solutions_are_exact(
            m in small_matrix(4, 4),
            den in prop::collection::vec(1i64..=5, 4),
            x in prop::collection::vec(-6i64..=6, 4),
        ) {
            // rational matrix: row r scaled by 1/den[r]
            let rows: Vec<RatVector> = m
                .iter()
                .zip(&den)
                .map(|(r, &d)| r.iter().map(|&a| crate::rational::frac(a, d)).collect())
                .collect();
            let a = RatMatrix::from_rows(&rows).unwrap();
            let b = a.mul_vec(&RatVector::from_ints(&x)).unwrap();
            let sol = solve_linear(&a, &b).unwrap().expect("consistent by construction");
            prop_assert_eq!(a.mul_vec(&sol).unwrap(), b);
        }
    }
}
