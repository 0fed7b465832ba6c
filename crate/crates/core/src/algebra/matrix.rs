//! Matrix algebras over an involutive base, and the split `M_{2g}(Q)` model
//! with its symplectic block involution.

use num_traits::One;

use super::{normalize, Sparse, StructureAlgebra};
use crate::error::{Error, Result};
use crate::linear::RatVector;
use crate::rational::Rational;

/// `M_g(base)` with involution `(a_rs) -> (a_sr^dagger)`.
///
/// Basis index of `e(r,c) (x) b_k` is `(r * g + c) * d + k` with `d = dim(base)`.
pub fn matrix_algebra(base: &StructureAlgebra, g: usize) -> Result<StructureAlgebra> {
    if g == 0 {
        return Err(Error::InvalidArgument("matrix size must be positive".into()));
    }
    let base_unit = base.unit().ok_or(Error::MissingUnit)?;
    let base_inv = base.involution.as_ref().ok_or(Error::MissingInvolution)?;
    let d = base.dim();
    let n = g * g * d;
    let index = |r: usize, c: usize, k: usize| (r * g + c) * d + k;

    let mut consts = vec![Sparse::new(); n * n];
    for r in 0..g {
        for c in 0..g {
            for t in 0..g {
                for k in 0..d {
                    for l in 0..d {
                        let terms = base
                            .basis_product(k, l)
                            .iter()
                            .map(|(m, coef)| (index(r, t, *m), coef.clone()))
                            .collect();
                        // (e_rc b_k)(e_ct b_l) = e_rt (b_k b_l)
                        consts[index(r, c, k) * n + index(c, t, l)] = normalize(terms);
                    }
                }
            }
        }
    }

    let mut involution = vec![Sparse::new(); n];
    for r in 0..g {
        for c in 0..g {
            for k in 0..d {
                involution[index(r, c, k)] = base_inv[k]
                    .iter()
                    .map(|(m, coef)| (index(c, r, *m), coef.clone()))
                    .collect();
            }
        }
    }

    let mut unit = RatVector::zeros(n);
    for r in 0..g {
        for k in 0..d {
            unit[index(r, r, k)] = base_unit[k].clone();
        }
    }

    let mut labels = Vec::with_capacity(n);
    for r in 1..=g {
        for c in 1..=g {
            for label in base.labels() {
                labels.push(if label == "1" {
                    format!("e({r},{c})")
                } else {
                    format!("e({r},{c})*{label}")
                });
            }
        }
    }
    StructureAlgebra::from_parts(labels, consts, Some(unit), Some(involution), None)
}

/// `M_{2g}(Q)` whose involution sends the 2x2 block `(a, b; c, d)` at block
/// position `(I, J)` to `(d, -b; -c, a)` at `(J, I)`.
///
/// Basis index of the matrix unit `e(r,c)` is `r * 2g + c`.
pub fn split_model(g: usize) -> Result<StructureAlgebra> {
    if g == 0 {
        return Err(Error::InvalidArgument("g must be positive".into()));
    }
    let m = 2 * g;
    let n = m * m;
    let one = Rational::one();
    let mut consts = vec![Sparse::new(); n * n];
    for r in 0..m {
        for c in 0..m {
            for t in 0..m {
                consts[(r * m + c) * n + (c * m + t)] = vec![(r * m + t, one.clone())];
            }
        }
    }
    let mut involution = Vec::with_capacity(n);
    for r in 0..m {
        for c in 0..m {
            let (s, t) = (r % 2, c % 2);
            let target_r = 2 * (c / 2) + 1 - t;
            let target_c = 2 * (r / 2) + 1 - s;
            let sign = if s == t { one.clone() } else { -&one };
            involution.push(vec![(target_r * m + target_c, sign)]);
        }
    }
    let mut unit = RatVector::zeros(n);
    for r in 0..m {
        unit[r * m + r] = one.clone();
    }
    let labels = (1..=m)
        .flat_map(|r| (1..=m).map(move |c| format!("e({r},{c})")))
        .collect();
    StructureAlgebra::from_parts(labels, consts, Some(unit), Some(involution), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::quaternion_algebra;
    use crate::linear::RatMatrix;
    use crate::rational::int;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn rationals() -> StructureAlgebra {
        crate::algebra::make_algebra(
            1,
            &[vec![RatVector::from_ints(&[1])]],
            Some(RatVector::from_ints(&[1])),
            Some(RatMatrix::identity(1)),
        )
        .unwrap()
    }

    #[test]
    fn m1_of_base_is_base() {
        let d = quaternion_algebra(&int(-1), &int(-1)).unwrap();
        let m1 = matrix_algebra(&d, 1).unwrap();
        assert_eq!(m1.dim(), 4);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m1.structure_constant(i, j), d.structure_constant(i, j));
            }
        }
        assert_eq!(m1.involution_matrix(), d.involution_matrix());
    }

    #[test]
    fn m2_over_q_has_transpose_involution() {
        let m2 = Arc::new(matrix_algebra(&rationals(), 2).unwrap());
        // basis e11, e12, e21, e22
        assert_eq!(m2.basis_element(1).involution().unwrap(), m2.basis_element(2));
        assert_eq!(m2.basis_element(0).involution().unwrap(), m2.basis_element(0));
    }

    #[test]
    fn dimension_of_mg_d() {
        let d = quaternion_algebra(&int(-1), &int(-3)).unwrap();
        assert_eq!(matrix_algebra(&d, 3).unwrap().dim(), 36);
    }

    #[test]
    fn requires_unit_and_involution() {
        let bare = crate::algebra::make_algebra(1, &[vec![RatVector::from_ints(&[1])]], None, None).unwrap();
        assert_eq!(matrix_algebra(&bare, 2).unwrap_err(), Error::MissingUnit);
        let unital = crate::algebra::make_algebra(
            1,
            &[vec![RatVector::from_ints(&[1])]],
            Some(RatVector::from_ints(&[1])),
            None,
        )
        .unwrap();
        assert_eq!(matrix_algebra(&unital, 2).unwrap_err(), Error::MissingInvolution);
    }

    #[test]
    fn split_model_g1_is_adjugate() {
        let b = Arc::new(split_model(1).unwrap());
        // (a, b; c, d) = (2, 3; 5, 7)
        let x = b.element(RatVector::from_ints(&[2, 3, 5, 7])).unwrap();
        let xd = x.involution().unwrap();
        assert_eq!(xd.coeffs(), &RatVector::from_ints(&[7, -3, -5, 2]));
        // x + x^dagger = trace * 1
        assert_eq!(x.add(&xd).unwrap().coeffs(), &RatVector::from_ints(&[9, 0, 0, 9]));
    }

    #[test]
    fn split_model_involution_on_random_matrices() {
        let b = Arc::new(split_model(2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut random = || {
            let coeffs: Vec<i64> = (0..16).map(|_| rng.gen_range(-9..=9)).collect();
            b.element(RatVector::from_ints(&coeffs)).unwrap()
        };
        for _ in 0..10 {
            let (x, y) = (random(), random());
            assert_eq!(x.involution().unwrap().involution().unwrap(), x);
            assert_eq!(
                x.mul(&y).unwrap().involution().unwrap(),
                y.involution().unwrap().mul(&x.involution().unwrap()).unwrap()
            );
        }
    }
}
