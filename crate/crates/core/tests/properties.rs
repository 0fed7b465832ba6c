use std::sync::Arc;

use num_traits::Zero;
use obstructor::algebra::{hilbert_symbol, matrix_algebra, quaternion_algebra, relevant_places, DMatrix, Place};
use obstructor::closure::{close_under, is_closed, subrng_closure_allow_empty};
use obstructor::descriptor::{graph_from_json, graph_to_json};
use obstructor::obstruction::{
    base_is_supersingular, compute_obstruction, corner_detect, flag_nonliftable, ObstructionGraph,
};
use obstructor::rational::{frac, int};
use obstructor::sample::{random_dmatrix, random_graph, rng, GraphShape};
use obstructor::RatVector;
use proptest::prelude::*;

fn nonzero() -> impl Strategy<Value = i64> {
    prop_oneof![-30i64..=-1, 1i64..=30]
}

fn coeffs(len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-5i64..=5, len)
}

fn graph(seed: u64, p: u64) -> ObstructionGraph {
    let base = Arc::new(obstructor::algebra::quaternion_for_prime(p).unwrap());
    let shape = GraphShape {
        max_r: 3,
        ..GraphShape::default()
    };
    random_graph(&mut rng(seed), &base, &shape).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quaternion_norm_is_central(a in nonzero(), b in nonzero(), x in coeffs(4), y in coeffs(4)) {
        let q = Arc::new(quaternion_algebra(&int(a), &int(b)).unwrap());
        let x = q.element(RatVector::from_ints(&x)).unwrap();
        let y = q.element(RatVector::from_ints(&y)).unwrap();
        let n = x.mul(&x.involution().unwrap()).unwrap();
        prop_assert!(n.coeffs().iter().skip(1).all(Zero::is_zero));
        // the norm is multiplicative
        let nx = n.coeffs()[0].clone();
        let ny = y.mul(&y.involution().unwrap()).unwrap().coeffs()[0].clone();
        let xy = x.mul(&y).unwrap();
        let nxy = xy.mul(&xy.involution().unwrap()).unwrap().coeffs()[0].clone();
        prop_assert_eq!(nxy, nx * ny);
    }

    #[test]
    fn dagger_reverses_matrix_products(seed in 0u64..500, rows in 1usize..3, inner in 1usize..3, cols in 1usize..3) {
        let base = Arc::new(quaternion_algebra(&int(-1), &int(-3)).unwrap());
        let mut r = rng(seed);
        let a = random_dmatrix(&mut r, &base, rows, inner, 3, 0.3).unwrap();
        let b = random_dmatrix(&mut r, &base, inner, cols, 3, 0.3).unwrap();
        let left = a.mul(&b).unwrap().dagger_transpose().unwrap();
        let right = b.dagger_transpose().unwrap().mul(&a.dagger_transpose().unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn hilbert_symbol_identities(a in nonzero(), b in nonzero(), c in nonzero(), d in 1i64..=9) {
        let (a, b) = (frac(a, d), int(b));
        let c2 = int(c * c);
        for v in relevant_places(&a, &(&b * &c2)) {
            prop_assert_eq!(hilbert_symbol(&a, &b, v).unwrap(), hilbert_symbol(&b, &a, v).unwrap());
            prop_assert_eq!(hilbert_symbol(&a, &(&b * &c2), v).unwrap(), hilbert_symbol(&a, &b, v).unwrap());
            prop_assert_eq!(hilbert_symbol(&a, &-a.clone(), v).unwrap(), 1);
        }
        let one_minus = int(1) - &a;
        if !one_minus.is_zero() {
            for v in relevant_places(&a, &one_minus) {
                prop_assert_eq!(hilbert_symbol(&a, &one_minus, v).unwrap(), 1);
            }
        }
        let product: i32 = relevant_places(&a, &b).into_iter().map(|v| hilbert_symbol(&a, &b, v).unwrap()).product();
        prop_assert_eq!(product, 1);
        // 101 divides neither parameter, so both are units there
        prop_assert_eq!(hilbert_symbol(&a, &b, Place::Prime(101)).unwrap(), 1);
    }

    #[test]
    fn filtered_closure_matches_plain_fixed_point(seed in 0u64..1000, count in 1usize..4) {
        let base = matrix_algebra(&quaternion_algebra(&int(-1), &int(-1)).unwrap(), 2).unwrap();
        let a = Arc::new(base);
        let mut r = rng(seed);
        let gens: Vec<_> = (0..count)
            .map(|_| a.element(obstructor::sample::random_vector(&mut r, a.dim(), 1)).unwrap())
            .collect();
        let fast = subrng_closure_allow_empty(&a, &gens).unwrap();
        let seeds: Vec<RatVector> = gens.iter().map(|g| g.coeffs().clone()).collect();
        let (plain, _) = close_under(a.dim(), seeds, |x, y| a.mul_vec(x, y));
        prop_assert_eq!(&fast.span, &plain);
        prop_assert!(is_closed(&a, &fast.span));
    }

    #[test]
    fn e_is_a_dagger_closed_subrng(seed in 0u64..1000) {
        let g = graph(seed, 3);
        for i in 1..=g.r() {
            let e = compute_obstruction(&g, i).unwrap();
            let end = Arc::new(g.end_algebra(i).unwrap());
            prop_assert!(is_closed(&end, &e));
            for v in e.basis() {
                prop_assert!(e.contains(&end.involution_vec(v).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn verdict_is_constant_under_powers(seed in 0u64..1000, m in prop_oneof![-4i64..=-1, 2i64..=5]) {
        let g = graph(seed, 2);
        let powered = g.scaled(&int(m));
        for i in 1..=g.r() {
            let end = Arc::new(g.end_algebra(i).unwrap());
            let e = compute_obstruction(&g, i).unwrap();
            let e_m = compute_obstruction(&powered, i).unwrap();
            prop_assert_eq!(&e, &e_m);
            let ss = base_is_supersingular(g.base());
            let v = flag_nonliftable(&corner_detect(&e, &end).unwrap(), ss);
            let v_m = flag_nonliftable(&corner_detect(&e_m, &end).unwrap(), ss);
            prop_assert_eq!(v, v_m);
        }
    }

    #[test]
    fn graphs_survive_json(seed in 0u64..1000) {
        let g = graph(seed, 5);
        let text = graph_to_json(&g).unwrap();
        let back = graph_from_json(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(graph_to_json(&back).unwrap(), text);
    }
}

#[test]
fn corner_of_a_rank_one_idempotent() {
    // p = diag(1, 0) in M_2(D): pAp is a copy of D
    let base = Arc::new(quaternion_algebra(&int(-1), &int(-1)).unwrap());
    let a = Arc::new(matrix_algebra(&base, 2).unwrap());
    let mut p = DMatrix::zeros(base.clone(), 2, 2);
    p.set_entry(0, 0, &RatVector::from_ints(&[1, 0, 0, 0]));
    let p = a.element(p.into_flat()).unwrap();
    let corner: Vec<RatVector> = (0..a.dim())
        .map(|k| p.mul(&a.basis_element(k)).unwrap().mul(&p).unwrap().into_coeffs())
        .collect();
    let span = obstructor::echelonize(a.dim(), &corner).unwrap();
    let report = corner_detect(&span, &a).unwrap();
    assert!(report.is_corner);
    assert_eq!(report.factor_dim, Some(4));
    assert_eq!(report.idempotent.as_ref(), Some(&p));

    // dropping one direction leaves a unit-less subspace
    let smaller = obstructor::echelonize(a.dim(), &span.basis()[1..]).unwrap();
    assert!(!corner_detect(&smaller, &a).unwrap().is_corner);
}
