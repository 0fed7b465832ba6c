//! Arithmetic modulo the Mersenne prime `2^61 - 1`.
//!
//! Used only as a filter: if the reductions of some p-integral vectors are
//! independent mod p, the vectors are independent over Q. Every decision that
//! ends up in a result is confirmed with exact arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::algebra::StructureAlgebra;
use crate::rational::Rational;

pub(crate) const P: u64 = (1 << 61) - 1;

fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

fn inv(a: u64) -> u64 {
    // a^(P-2)
    let (mut base, mut e, mut acc) = (a, P - 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, base);
        }
        base = mul(base, base);
        e >>= 1;
    }
    acc
}

fn reduce_int(n: &BigInt) -> u64 {
    n.mod_floor(&BigInt::from(P)).to_u64().expect("residue fits")
}

/// `None` when the denominator is divisible by `P`.
pub(crate) fn reduce(q: &Rational) -> Option<u64> {
    if q.is_zero() {
        return Some(0);
    }
    let d = reduce_int(q.denom());
    (d != 0).then(|| mul(reduce_int(q.numer()), inv(d)))
}

pub(crate) fn reduce_vec(v: &[Rational]) -> Option<Vec<u64>> {
    v.iter().map(reduce).collect()
}

/// Structure constants of an algebra reduced mod `P`.
pub(crate) struct ModTable {
    dim: usize,
    consts: Vec<Vec<(usize, u64)>>,
}

impl ModTable {
    pub(crate) fn new(a: &StructureAlgebra) -> Option<Self> {
        let n = a.dim();
        let mut consts = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let terms = a
                    .basis_product(i, j)
                    .iter()
                    .map(|(k, c)| reduce(c).map(|r| (*k, r)))
                    .collect::<Option<Vec<_>>>()?;
                consts.push(terms);
            }
        }
        Some(ModTable { dim: n, consts })
    }

    fn mul_acc(&self, x: &[u64], y: &[u64], out: &mut [u64]) {
        for (i, &a) in x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let ab = mul(a, b);
                for &(k, c) in &self.consts[i * self.dim + j] {
                    out[k] = add(out[k], mul(ab, c));
                }
            }
        }
    }

    pub(crate) fn mul(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let mut out = vec![0; self.dim];
        self.mul_acc(x, y, &mut out);
        out
    }

    /// Product of flattened `rows x inner` and `inner x cols` matrices.
    pub(crate) fn mul_flat(&self, (rows, inner, cols): (usize, usize, usize), x: &[u64], y: &[u64]) -> Vec<u64> {
        let d = self.dim;
        let mut out = vec![0; rows * cols * d];
        for r in 0..rows {
            for k in 0..inner {
                let a = &x[(r * inner + k) * d..(r * inner + k + 1) * d];
                if a.iter().all(|&v| v == 0) {
                    continue;
                }
                for c in 0..cols {
                    let b = &y[(k * cols + c) * d..(k * cols + c + 1) * d];
                    let o = (r * cols + c) * d;
                    self.mul_acc(a, b, &mut out[o..o + d]);
                }
            }
        }
        out
    }
}

/// Row echelon form mod `P`, rows kept in insertion order.
#[derive(Clone, Debug)]
pub(crate) struct ModEchelon {
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl ModEchelon {
    pub(crate) fn new() -> Self {
        ModEchelon {
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Adds `v`; returns `true` if it was independent mod `P`.
    pub(crate) fn insert(&mut self, mut v: Vec<u64>) -> bool {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if c != 0 {
                for (x, &y) in v.iter_mut().zip(row) {
                    *x = sub(*x, mul(c, y));
                }
            }
        }
        let Some(p) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let s = inv(v[p]);
        v.iter_mut().for_each(|x| *x = mul(*x, s));
        self.rows.push(v);
        self.pivots.push(p);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn residues() {
        assert_eq!(reduce(&int(-1)), Some(P - 1));
        let half = reduce(&frac(1, 2)).unwrap();
        assert_eq!(mul(half, 2), 1);
        assert_eq!(reduce(&Rational::new(1.into(), BigInt::from(P))), None);
    }

    #[test]
    fn echelon_detects_dependence() {
        let mut e = ModEchelon::new();
        assert!(e.insert(vec![1, 2, 3]));
        assert!(e.insert(vec![0, 1, 1]));
        assert!(!e.insert(vec![2, 5, 7]));
        assert!(e.insert(vec![0, 0, 5]));
        assert!(!e.insert(vec![0, 0, 0]));
    }
}
