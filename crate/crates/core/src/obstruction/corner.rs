use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{ramified_places, AlgElement, Place, StructureAlgebra};
use crate::error::{Error, Result};
use crate::linear::{echelonize, solve_linear, RatMatrix, RatVector, Subspace};

/// Whether a subspace `E` of `A` is a corner `p A p` for an idempotent `p`.
#[derive(Clone, Debug, Serialize)]
pub struct CornerReport {
    pub is_corner: bool,
    #[serde(serialize_with = "serialize_idempotent")]
    pub idempotent: Option<AlgElement>,
    pub factor_dim: Option<usize>,
    pub is_full: bool,
    pub is_zero: bool,
}

fn serialize_idempotent<S: serde::Serializer>(p: &Option<AlgElement>, s: S) -> Result<S::Ok, S::Error> {
    match p {
        Some(p) => p.coeffs().serialize(s),
        None => s.serialize_none(),
    }
}

impl CornerReport {
    fn not_a_corner() -> Self {
        CornerReport {
            is_corner: false,
            idempotent: None,
            factor_dim: None,
            is_full: false,
            is_zero: false,
        }
    }
}

/// Finds the unit `e` of `E` by one linear solve, then checks `E = e A e`.
pub fn corner_detect(e_span: &Subspace, a: &Arc<StructureAlgebra>) -> Result<CornerReport> {
    let n = a.dim();
    if e_span.ambient_dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: e_span.ambient_dim(),
        });
    }
    let unit = a.unit().ok_or(Error::MissingUnit)?;
    if e_span.is_zero() {
        return Ok(CornerReport {
            is_corner: true,
            idempotent: Some(a.zero_element()),
            factor_dim: Some(0),
            is_full: false,
            is_zero: true,
        });
    }

    // unknowns c_l with e = sum c_l v_l; equations e v_m = v_m and v_m e = v_m
    let basis = e_span.basis();
    let k = basis.len();
    let mut rows: Vec<RatVector> = Vec::with_capacity(2 * k * n);
    let mut rhs: Vec<crate::Rational> = Vec::with_capacity(2 * k * n);
    for vm in basis {
        let left: Vec<RatVector> = basis.iter().map(|vl| a.mul_vec(vl, vm)).collect();
        let right: Vec<RatVector> = basis.iter().map(|vl| a.mul_vec(vm, vl)).collect();
        for products in [&left, &right] {
            for t in 0..n {
                rows.push(products.iter().map(|p| p[t].clone()).collect());
                rhs.push(vm[t].clone());
            }
        }
    }
    let system = RatMatrix::from_rows(&rows)?;
    let Some(c) = solve_linear(&system, &rhs.into())? else {
        return Ok(CornerReport::not_a_corner());
    };
    let mut e = RatVector::zeros(n);
    for (cl, vl) in c.iter().zip(basis) {
        e.add_assign(&vl.scaled(cl));
    }
    if a.mul_vec(&e, &e) != e {
        return Ok(CornerReport::not_a_corner());
    }
    let sandwiches: Vec<RatVector> = (0..n)
        .map(|i| a.mul_vec(&a.mul_vec(&e, &RatVector::unit(n, i)), &e))
        .collect();
    let corner = echelonize(n, &sandwiches)?;
    if corner != *e_span {
        return Ok(CornerReport::not_a_corner());
    }
    Ok(CornerReport {
        is_corner: true,
        is_full: &e == unit,
        factor_dim: Some(corner.dim()),
        idempotent: Some(a.element(e)?),
        is_zero: false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "OBSTRUCTED")]
    Obstructed,
    #[serde(rename = "NOT-OBSTRUCTED")]
    NotObstructed,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Obstructed => "OBSTRUCTED",
            Verdict::NotObstructed => "NOT-OBSTRUCTED",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionVerdict {
    pub verdict: Verdict,
    pub note: String,
}

/// Lifting obstruction: a nonzero corner over a supersingular base means no
/// positive tensor power of the bundle lifts. `E_i` is unchanged by tensor
/// powers, so the verdict applies to every `L^m`, `m > 0`.
pub fn flag_nonliftable(report: &CornerReport, base_is_ramified: bool) -> ObstructionVerdict {
    let (verdict, note) = if !report.is_corner {
        (
            Verdict::Inconclusive,
            "E_i is not a corner p End p; no isogeny factor, no conclusion",
        )
    } else if report.is_zero {
        (Verdict::NotObstructed, "E_i = 0 corresponds to the zero factor")
    } else if base_is_ramified {
        (
            Verdict::Obstructed,
            "nonzero supersingular isogeny factor; E_i(L^m) = E_i(L), so no L^m with m > 0 lifts",
        )
    } else {
        (
            Verdict::NotObstructed,
            "corner over a base that is not a supersingular quaternion algebra",
        )
    };
    ObstructionVerdict {
        verdict,
        note: note.to_string(),
    }
}

/// Whether `base` is a quaternion algebra ramified exactly at one prime and
/// infinity, i.e. the endomorphism algebra of a supersingular elliptic curve.
pub fn base_is_supersingular(base: &StructureAlgebra) -> bool {
    let Some(q) = base.quaternion_params() else {
        return false;
    };
    match ramified_places(&q.a, &q.b) {
        Ok(places) => matches!(places.as_slice(), [Place::Prime(_), Place::Infinity]),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{make_algebra, matrix_algebra, quaternion_algebra, quaternion_for_prime};
    use crate::rational::int;

    fn m2() -> Arc<StructureAlgebra> {
        let q = make_algebra(
            1,
            &[vec![RatVector::from_ints(&[1])]],
            Some(RatVector::from_ints(&[1])),
            Some(RatMatrix::identity(1)),
        )
        .unwrap();
        Arc::new(matrix_algebra(&q, 2).unwrap())
    }

    fn span(a: &StructureAlgebra, xs: &[&[i64]]) -> Subspace {
        let rows: Vec<RatVector> = xs.iter().map(|x| RatVector::from_ints(x)).collect();
        echelonize(a.dim(), &rows).unwrap()
    }

    #[test]
    fn e11_is_a_rank_one_corner() {
        let a = m2();
        let r = corner_detect(&span(&a, &[&[1, 0, 0, 0]]), &a).unwrap();
        assert!(r.is_corner && !r.is_full && !r.is_zero);
        assert_eq!(r.idempotent.unwrap(), a.basis_element(0));
        assert_eq!(r.factor_dim, Some(1));
    }

    #[test]
    fn nilpotent_line_is_not_a_corner() {
        let a = m2();
        let r = corner_detect(&span(&a, &[&[0, 1, 0, 0]]), &a).unwrap();
        assert!(!r.is_corner);
        assert_eq!(flag_nonliftable(&r, true).verdict, Verdict::Inconclusive);
    }

    #[test]
    fn whole_algebra_is_the_full_corner() {
        let a = m2();
        let r = corner_detect(&Subspace::full(4), &a).unwrap();
        assert!(r.is_corner && r.is_full);
        assert_eq!(r.idempotent.as_ref().unwrap(), &a.one().unwrap());
        assert_eq!(r.factor_dim, Some(4));
        assert_eq!(flag_nonliftable(&r, true).verdict, Verdict::Obstructed);
        assert_eq!(flag_nonliftable(&r, false).verdict, Verdict::NotObstructed);
    }

    #[test]
    fn zero_is_the_zero_corner() {
        let a = m2();
        let r = corner_detect(&Subspace::zero(4), &a).unwrap();
        assert!(r.is_corner && r.is_zero);
        assert_eq!(flag_nonliftable(&r, true).verdict, Verdict::NotObstructed);
    }

    #[test]
    fn unital_but_too_small_is_not_a_corner() {
        // diagonal matrices have unit 1 but 1 A 1 = A
        let a = m2();
        let r = corner_detect(&span(&a, &[&[1, 0, 0, 0], &[0, 0, 0, 1]]), &a).unwrap();
        assert!(!r.is_corner);
    }

    #[test]
    fn rejects_wrong_ambient() {
        let a = m2();
        assert!(corner_detect(&Subspace::full(3), &a).is_err());
    }

    #[test]
    fn supersingular_bases() {
        assert!(base_is_supersingular(&quaternion_for_prime(7).unwrap()));
        assert!(base_is_supersingular(&quaternion_algebra(&int(-1), &int(-1)).unwrap()));
        // (1, 1) is split everywhere, (-1, 3) is indefinite
        assert!(!base_is_supersingular(&quaternion_algebra(&int(1), &int(1)).unwrap()));
        assert!(!base_is_supersingular(&quaternion_algebra(&int(-1), &int(3)).unwrap()));
        let q = quaternion_algebra(&int(-3), &int(-5)).unwrap();
        let places = ramified_places(&int(-3), &int(-5)).unwrap();
        assert_eq!(base_is_supersingular(&q), places.len() == 2);
    }
}
