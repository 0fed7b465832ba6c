//! Seeded random inputs: algebra elements, obstruction graphs, covers and
//! conjugation maps. All sampling uses `ChaCha8Rng`, so a seed fixes the
//! output on every platform.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{DMatrix, StructureAlgebra};
use crate::error::Result;
use crate::linear::RatVector;
use crate::obstruction::{BaseMap, Cover, ObstructionGraph};
use crate::rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer coefficients uniform in `[-bound, bound]`.
pub fn random_vector(rng: &mut ChaCha8Rng, len: usize, bound: i64) -> RatVector {
    (0..len).map(|_| rational::int(rng.gen_range(-bound..=bound))).collect()
}

pub fn random_nonzero_vector(rng: &mut ChaCha8Rng, len: usize, bound: i64) -> RatVector {
    loop {
        let v = random_vector(rng, len, bound.max(1));
        if !v.is_zero() {
            return v;
        }
    }
}

/// A `rows x cols` matrix whose entries are zero with probability `sparsity`.
pub fn random_dmatrix(
    rng: &mut ChaCha8Rng,
    base: &Arc<StructureAlgebra>,
    rows: usize,
    cols: usize,
    bound: i64,
    sparsity: f64,
) -> Result<DMatrix> {
    let d = base.dim();
    let entries: Vec<RatVector> = (0..rows * cols)
        .map(|_| {
            if rng.gen_bool(sparsity) {
                RatVector::zeros(d)
            } else {
                random_vector(rng, d, bound)
            }
        })
        .collect();
    DMatrix::from_entries(base.clone(), rows, cols, &entries)
}

/// Shape of the random graphs used by the property suites.
#[derive(Clone, Debug)]
pub struct GraphShape {
    pub max_r: usize,
    pub max_g: usize,
    pub bound: i64,
    pub edge_probability: f64,
    pub entry_sparsity: f64,
}

impl Default for GraphShape {
    fn default() -> Self {
        GraphShape {
            max_r: 4,
            max_g: 2,
            bound: 2,
            edge_probability: 0.6,
            entry_sparsity: 0.5,
        }
    }
}

pub fn random_graph(rng: &mut ChaCha8Rng, base: &Arc<StructureAlgebra>, shape: &GraphShape) -> Result<ObstructionGraph> {
    let r = rng.gen_range(2..=shape.max_r.max(2));
    let sizes: Vec<usize> = (0..r).map(|_| rng.gen_range(1..=shape.max_g.max(1))).collect();
    let mut graph = ObstructionGraph::new(base.clone(), sizes.clone())?;
    for i in 1..=r {
        for j in i + 1..=r {
            if rng.gen_bool(shape.edge_probability) {
                let m = random_dmatrix(rng, base, sizes[j - 1], sizes[i - 1], shape.bound, shape.entry_sparsity)?;
                graph.set_edge(i, j, m)?;
            }
        }
    }
    Ok(graph)
}

fn permutation_block(rng: &mut ChaCha8Rng, base: &Arc<StructureAlgebra>, g: usize, q: &RatVector) -> Result<DMatrix> {
    let mut perm: Vec<usize> = (0..g).collect();
    for k in (1..g).rev() {
        perm.swap(k, rng.gen_range(0..=k));
    }
    let mut m = DMatrix::zeros(base.clone(), g, g);
    for (row, &col) in perm.iter().enumerate() {
        m.set_entry(row, col, q);
    }
    Ok(m)
}

/// A cover of a size-`g` factor: `iota` is `q P`, `[q P; 0]` or
/// `[q1 P1; q2 P2]` for random quaternions `q` and permutations `P`, and
/// `pi` is `iota^dagger`, so `pi iota` is a positive scalar when the base
/// involution is positive.
pub fn random_cover(rng: &mut ChaCha8Rng, base: &Arc<StructureAlgebra>, g: usize, bound: i64) -> Result<Cover> {
    let d = base.dim();
    let count = rng.gen_range(0..3);
    let mut blocks = Vec::new();
    for _ in 0..if count == 2 { 2 } else { 1 } {
        let q = random_nonzero_vector(rng, d, bound);
        blocks.push(permutation_block(rng, base, g, &q)?);
    }
    if count == 1 {
        blocks.push(DMatrix::zeros(base.clone(), 1, g));
    }
    let rows: usize = blocks.iter().map(DMatrix::rows).sum();
    let mut data = Vec::with_capacity(rows * g * d);
    for b in blocks {
        data.extend(b.into_flat().into_vec());
    }
    Cover::from_iota(DMatrix::from_flat(base.clone(), rows, g, data.into())?)
}

/// Conjugation `x -> u x u^{-1}` by a random nonzero `u`.
pub fn random_conjugation(rng: &mut ChaCha8Rng, base: &Arc<StructureAlgebra>, bound: i64) -> Result<BaseMap> {
    let u = random_nonzero_vector(rng, base.dim(), bound);
    BaseMap::conjugation(base.clone(), &u)
}
