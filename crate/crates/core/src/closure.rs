//! Q-subrngs (subalgebras without forced unit) generated by finite sets.
//!
//! The primary algorithm is a fixed-point iteration on subspaces:
//! `V_0 = span(gens)`, `V_{k+1} = V_k + V_k * V_k`, stopping when the
//! dimension stabilises. Only products involving an element added in the
//! previous round are formed, so every pair is multiplied once, and each
//! candidate product is screened mod a large prime before it is formed
//! exactly.
//! [`word_span_oracle`] computes the same span by growing words one
//! generator at a time and is kept as an independent cross-check.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{AlgElement, StructureAlgebra};
use crate::error::{Error, Result};
use crate::linear::{Echelon, RatVector, Subspace};
use crate::modp::{reduce_vec, ModEchelon, ModTable};

#[derive(Clone, Debug, Serialize)]
pub struct SubrngResult {
    pub span: Subspace,
    #[serde(skip)]
    pub generators: Vec<AlgElement>,
    pub closed: bool,
    pub rounds: usize,
}

impl SubrngResult {
    pub fn dim(&self) -> usize {
        self.span.dim()
    }
}

/// Fixed point of `V -> V + V*V` starting from `span(seeds)`.
///
/// Returns the closed span and the number of product rounds performed.
pub fn close_under<F>(ambient_dim: usize, seeds: Vec<RatVector>, mul: F) -> (Subspace, usize)
where
    F: Fn(&RatVector, &RatVector) -> RatVector + Sync,
{
    let mut ech = Echelon::new(ambient_dim);
    let mut elems: Vec<RatVector> = Vec::new();
    for s in seeds {
        if ech.insert(s.clone()) {
            elems.push(s);
        }
    }
    let mut frontier_start = 0;
    let mut rounds = 0;
    while frontier_start < elems.len() && !ech.is_full() {
        rounds += 1;
        let end = elems.len();
        let products: Vec<RatVector> = frontier_pairs(frontier_start, end)
            .par_iter()
            .map(|&(u, v)| mul(&elems[u], &elems[v]))
            .collect();
        for p in products {
            if ech.insert(p.clone()) {
                elems.push(p);
                if ech.is_full() {
                    break;
                }
            }
        }
        frontier_start = end;
    }
    (ech.finish(), rounds)
}

/// Pairs `(u, v)` with `u, v < end` and at least one of them `>= start`.
pub(crate) fn frontier_pairs(start: usize, end: usize) -> Vec<(usize, usize)> {
    (0..end)
        .flat_map(|u| (0..end).map(move |v| (u, v)))
        .filter(|&(u, v)| u >= start || v >= start)
        .collect()
}

/// An exact span together with residues mod p of its spanning elements.
///
/// Candidate products are first reduced mod p; only those independent mod p
/// (hence independent over Q) are formed exactly. Products that look
/// dependent mod p are confirmed exactly by a final pass over all pairs
/// before a span is declared closed.
pub(crate) struct Pool {
    ech: Echelon,
    modular: ModEchelon,
    pub(crate) elems: Vec<RatVector>,
    pub(crate) residues: Vec<Vec<u64>>,
}

impl Pool {
    pub(crate) fn new(ambient_dim: usize) -> Self {
        Pool {
            ech: Echelon::new(ambient_dim),
            modular: ModEchelon::new(),
            elems: Vec::new(),
            residues: Vec::new(),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.elems.len()
    }

    pub(crate) fn is_full(&self) -> bool {
        self.ech.is_full()
    }

    /// Exact insertion; `None` if `v` has no residue mod p.
    pub(crate) fn insert_exact(&mut self, v: RatVector) -> Option<bool> {
        let r = reduce_vec(v.as_slice())?;
        if !self.ech.insert(v.clone()) {
            return Some(false);
        }
        self.modular.insert(r.clone());
        self.elems.push(v);
        self.residues.push(r);
        Some(true)
    }

    /// Records `r` if it is independent mod p of everything admitted so far.
    pub(crate) fn admit(&mut self, r: Vec<u64>) -> bool {
        !self.ech.is_full() && self.modular.insert(r)
    }

    /// Adds the exact value whose residue was just admitted.
    pub(crate) fn push_admitted(&mut self, v: RatVector, r: Vec<u64>) {
        if self.ech.insert(v.clone()) {
            self.elems.push(v);
            self.residues.push(r);
        }
    }

    pub(crate) fn contains(&self, v: &RatVector) -> bool {
        self.ech.contains(v)
    }

    pub(crate) fn finish(self) -> Subspace {
        self.ech.finish()
    }
}

// Closure with the mod-p filter; `None` if some value has no residue.
fn close_filtered<F, G>(ambient_dim: usize, seeds: &[RatVector], mul: &F, mul_mod: G) -> Option<(Subspace, usize)>
where
    F: Fn(&RatVector, &RatVector) -> RatVector + Sync,
    G: Fn(&[u64], &[u64]) -> Vec<u64> + Sync,
{
    let mut pool = Pool::new(ambient_dim);
    for s in seeds {
        pool.insert_exact(s.clone())?;
    }
    let mut start = 0;
    let mut rounds = 0;
    loop {
        while start < pool.len() && !pool.is_full() {
            rounds += 1;
            let end = pool.len();
            let residues: Vec<(usize, usize, Vec<u64>)> = frontier_pairs(start, end)
                .into_par_iter()
                .map(|(u, v)| (u, v, mul_mod(&pool.residues[u], &pool.residues[v])))
                .collect();
            for (u, v, r) in residues {
                if pool.is_full() {
                    break;
                }
                if pool.admit(r.clone()) {
                    let p = mul(&pool.elems[u], &pool.elems[v]);
                    pool.push_admitted(p, r);
                }
            }
            start = end;
        }
        if pool.is_full() {
            break;
        }
        let n = pool.len();
        let missing: Vec<RatVector> = frontier_pairs(0, n)
            .into_par_iter()
            .filter_map(|(u, v)| {
                let p = mul(&pool.elems[u], &pool.elems[v]);
                (!pool.contains(&p)).then_some(p)
            })
            .collect();
        if missing.is_empty() {
            break;
        }
        for p in missing {
            pool.insert_exact(p)?;
        }
    }
    Some((pool.finish(), rounds))
}

fn check_members(a: &Arc<StructureAlgebra>, gens: &[AlgElement]) -> Result<()> {
    for g in gens {
        if !(Arc::ptr_eq(g.algebra(), a) || **g.algebra() == **a) {
            return Err(Error::AlgebraMismatch);
        }
    }
    Ok(())
}

/// Smallest Q-subspace containing `gens` and closed under multiplication.
/// The unit is never adjoined.
///
/// An empty generator list is an error; use [`subrng_closure_allow_empty`]
/// to get the zero subrng instead.
pub fn subrng_closure(a: &Arc<StructureAlgebra>, gens: &[AlgElement]) -> Result<SubrngResult> {
    if gens.is_empty() {
        return Err(Error::InvalidArgument(
            "empty generator set (use subrng_closure_allow_empty for the zero subrng)".into(),
        ));
    }
    subrng_closure_allow_empty(a, gens)
}

pub fn subrng_closure_allow_empty(a: &Arc<StructureAlgebra>, gens: &[AlgElement]) -> Result<SubrngResult> {
    check_members(a, gens)?;
    let seeds: Vec<RatVector> = gens.iter().map(|g| g.coeffs().clone()).collect();
    let mul = |x: &RatVector, y: &RatVector| a.mul_vec(x, y);
    let filtered = ModTable::new(a).and_then(|t| close_filtered(a.dim(), &seeds, &mul, |x, y| t.mul(x, y)));
    let (span, rounds) = match filtered {
        Some(found) => found,
        None => close_under(a.dim(), seeds, mul),
    };
    Ok(SubrngResult {
        span,
        generators: gens.to_vec(),
        closed: true,
        rounds,
    })
}

pub fn generates_fully(a: &Arc<StructureAlgebra>, gens: &[AlgElement]) -> Result<bool> {
    Ok(subrng_closure(a, gens)?.span.is_full())
}

/// `true` when every product of two basis vectors of `span` lies in `span`.
pub fn is_closed(a: &StructureAlgebra, span: &Subspace) -> bool {
    let basis = span.basis();
    basis.par_iter().all(|u| {
        basis
            .iter()
            .all(|v| span.contains(&a.mul_vec(u, v)).unwrap_or(false))
    })
}

/// Span of all words of length `1..=max_len` in the generators.
pub fn word_span_oracle(a: &Arc<StructureAlgebra>, gens: &[AlgElement], max_len: usize) -> Result<Subspace> {
    if max_len == 0 {
        return Err(Error::InvalidArgument("max_len must be at least 1".into()));
    }
    check_members(a, gens)?;
    let gens: Vec<&RatVector> = gens.iter().map(AlgElement::coeffs).collect();
    let level_one = Echelon::from_rows(a.dim(), gens.iter().map(|g| (*g).clone())).finish();
    let mut current = level_one.clone();
    for _ in 1..max_len {
        let next = extend_words(a, &level_one, &current, &gens);
        if next == current {
            break;
        }
        current = next;
    }
    Ok(current)
}

/// Word span at the first length where it stops growing, with that length.
pub fn word_span_stabilized(a: &Arc<StructureAlgebra>, gens: &[AlgElement]) -> Result<(Subspace, usize)> {
    check_members(a, gens)?;
    let gens: Vec<&RatVector> = gens.iter().map(AlgElement::coeffs).collect();
    let level_one = Echelon::from_rows(a.dim(), gens.iter().map(|g| (*g).clone())).finish();
    let mut current = level_one.clone();
    let mut len = 1;
    loop {
        let next = extend_words(a, &level_one, &current, &gens);
        if next == current {
            return Ok((current, len));
        }
        current = next;
        len += 1;
    }
}

// span(gens) + current * gens
fn extend_words(a: &StructureAlgebra, level_one: &Subspace, current: &Subspace, gens: &[&RatVector]) -> Subspace {
    let products: Vec<RatVector> = current
        .basis()
        .par_iter()
        .flat_map_iter(|w| gens.iter().map(move |g| a.mul_vec(w, g)))
        .collect();
    let mut ech = Echelon::from_subspace(level_one.clone());
    for p in products {
        ech.insert(p);
    }
    ech.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{make_algebra, matrix_algebra, quaternion_algebra, quaternion_for_prime};
    use crate::linear::RatMatrix;
    use crate::rational::int;
    use proptest::prelude::*;

    fn rationals() -> StructureAlgebra {
        make_algebra(
            1,
            &[vec![RatVector::from_ints(&[1])]],
            Some(RatVector::from_ints(&[1])),
            Some(RatMatrix::identity(1)),
        )
        .unwrap()
    }

    fn m2() -> Arc<StructureAlgebra> {
        Arc::new(matrix_algebra(&rationals(), 2).unwrap())
    }

    /// Literal enumeration of every word, for tiny inputs only.
    fn literal_words(a: &Arc<StructureAlgebra>, gens: &[AlgElement], max_len: usize) -> Subspace {
        let mut words: Vec<AlgElement> = gens.to_vec();
        let mut all = words.clone();
        for _ in 1..max_len {
            words = words
                .iter()
                .flat_map(|w| gens.iter().map(move |g| w.mul(g).unwrap()))
                .collect();
            all.extend(words.iter().cloned());
        }
        let rows: Vec<RatVector> = all.iter().map(|w| w.coeffs().clone()).collect();
        crate::linear::echelonize(a.dim(), &rows).unwrap()
    }

    #[test]
    fn matrix_units_generate_m2() {
        let a = m2();
        // basis order e11, e12, e21, e22
        let r = subrng_closure(&a, &[a.basis_element(1), a.basis_element(2)]).unwrap();
        assert_eq!(r.dim(), 4);
        assert!(r.closed);
        assert!(generates_fully(&a, &[a.basis_element(1), a.basis_element(2)]).unwrap());
    }

    #[test]
    fn zero_generator_gives_zero_subrng() {
        let a = m2();
        assert_eq!(subrng_closure(&a, &[a.zero_element()]).unwrap().dim(), 0);
        assert!(subrng_closure(&a, &[]).is_err());
        assert_eq!(subrng_closure_allow_empty(&a, &[]).unwrap().dim(), 0);
    }

    #[test]
    fn i_and_its_conjugate_in_hamilton_quaternions() {
        let d = Arc::new(quaternion_algebra(&int(-1), &int(-1)).unwrap());
        let i = d.basis_element(1);
        let r = subrng_closure(&d, &[i.clone(), i.involution().unwrap()]).unwrap();
        let expected = crate::linear::echelonize(4, &[RatVector::from_ints(&[1, 0, 0, 0]), RatVector::from_ints(&[0, 1, 0, 0])]).unwrap();
        assert_eq!(r.span, expected);
        assert!(!generates_fully(&d, &[i.clone(), i.involution().unwrap()]).unwrap());
    }

    #[test]
    fn unit_alone_is_not_enough() {
        let a = m2();
        assert!(!generates_fully(&a, &[a.one().unwrap()]).unwrap());
    }

    #[test]
    fn rejects_foreign_elements() {
        let a = m2();
        let d = Arc::new(quaternion_for_prime(3).unwrap());
        assert_eq!(
            subrng_closure(&a, &[d.basis_element(0)]).unwrap_err(),
            Error::AlgebraMismatch
        );
    }

    #[test]
    fn oracle_basics() {
        let a = m2();
        let gens = [a.basis_element(1), a.basis_element(2)];
        let s1 = word_span_oracle(&a, &gens, 1).unwrap();
        assert_eq!(s1, crate::linear::echelonize(4, &[gens[0].coeffs().clone(), gens[1].coeffs().clone()]).unwrap());
        assert_eq!(word_span_oracle(&a, &gens, 4).unwrap(), word_span_oracle(&a, &gens, 5).unwrap());
        assert_eq!(word_span_oracle(&a, &gens, 4).unwrap(), literal_words(&a, &gens, 4));
        assert!(word_span_oracle(&a, &gens, 0).is_err());
    }

    fn m2_element(a: &Arc<StructureAlgebra>, xs: &[i64]) -> AlgElement {
        a.element(RatVector::from_ints(xs)).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn closure_agrees_with_literal_words(
            xs in prop::collection::vec(prop::collection::vec(-2i64..=2, 4), 1..3)
        ) {
            let a = m2();
            let gens: Vec<AlgElement> = xs.iter().map(|x| m2_element(&a, x)).collect();
            let r = subrng_closure(&a, &gens).unwrap();
            prop_assert_eq!(&r.span, &literal_words(&a, &gens, 5));
            prop_assert!(is_closed(&a, &r.span));
        }

        #[test]
        fn closure_is_monotone_idempotent_and_order_free(
            xs in prop::collection::vec(prop::collection::vec(-2i64..=2, 4), 2..4)
        ) {
            let a = m2();
            let gens: Vec<AlgElement> = xs.iter().map(|x| m2_element(&a, x)).collect();
            let full = subrng_closure(&a, &gens).unwrap().span;
            let part = subrng_closure(&a, &gens[..1]).unwrap().span;
            prop_assert!(part.is_subspace_of(&full).unwrap());

            let again: Vec<AlgElement> = full.basis().iter().map(|v| a.element(v.clone()).unwrap()).collect();
            if !again.is_empty() {
                prop_assert_eq!(&subrng_closure(&a, &again).unwrap().span, &full);
            }

            let mut reversed = gens.clone();
            reversed.reverse();
            prop_assert_eq!(&subrng_closure(&a, &reversed).unwrap().span, &full);
        }
    }
}
