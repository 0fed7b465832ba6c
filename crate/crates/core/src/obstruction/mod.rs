//! The loop-composition subrng `E_i` of a line bundle on a product of curves.
//!
//! A line bundle is modelled by its Hom-part only: for each pair `i < j` a
//! matrix `phi_ji : J_i -> J_j` of shape `g_j x g_i` over a shared involutive
//! base algebra `D`. Travelling an edge backwards uses the dagger-transpose,
//! `phi_ij = phi_ji^dagger`. `E_i` is the Q-span of all compositions
//! `phi_{i i_2} phi_{i_2 i_3} ... phi_{i_{m-1} i}` of closed walks at `i`
//! with at least one step; the identity is never included.
//!
//! Vertices are numbered `1..=r` in the public API.

mod corner;
mod transform;

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::algebra::{matrix_algebra, mul_flat, DMatrix, StructureAlgebra};
use crate::closure::Pool;
use crate::modp::ModTable;
use crate::error::{Error, Result};
use crate::linear::{Echelon, RatVector, Subspace};
use crate::rational::Rational;

pub use corner::{base_is_supersingular, corner_detect, flag_nonliftable, CornerReport, ObstructionVerdict, Verdict};
pub use transform::{pullback_transform, specialize_transform, transport_subspace, BaseMap, Cover};

#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionGraph {
    base: Arc<StructureAlgebra>,
    sizes: Vec<usize>,
    // keyed by 0-based (i, j), i < j; value is phi_ji
    edges: BTreeMap<(usize, usize), DMatrix>,
}

impl ObstructionGraph {
    pub fn new(base: Arc<StructureAlgebra>, sizes: Vec<usize>) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::InvalidGraph(format!("need r >= 2 vertices, got {}", sizes.len())));
        }
        if let Some(i) = sizes.iter().position(|&g| g == 0) {
            return Err(Error::InvalidGraph(format!("vertex {} has size 0", i + 1)));
        }
        if base.unit().is_none() {
            return Err(Error::MissingUnit);
        }
        if !base.has_involution() {
            return Err(Error::MissingInvolution);
        }
        Ok(ObstructionGraph {
            base,
            sizes,
            edges: BTreeMap::new(),
        })
    }

    /// Sets `phi_ji` for `i < j`; the matrix must be `g_j x g_i`.
    pub fn set_edge(&mut self, i: usize, j: usize, phi_ji: DMatrix) -> Result<()> {
        self.check_vertex(i)?;
        self.check_vertex(j)?;
        if i >= j {
            return Err(Error::InvalidGraph(format!(
                "edge ({i}, {j}) must have i < j; it stores phi_ji"
            )));
        }
        let expected = (self.sizes[j - 1], self.sizes[i - 1]);
        if phi_ji.shape() != expected {
            return Err(Error::ShapeMismatch(format!(
                "phi_{j}{i} must be {}x{}, got {}x{}",
                expected.0,
                expected.1,
                phi_ji.rows(),
                phi_ji.cols()
            )));
        }
        if !(Arc::ptr_eq(phi_ji.base(), &self.base) || **phi_ji.base() == *self.base) {
            return Err(Error::AlgebraMismatch);
        }
        self.edges.insert((i - 1, j - 1), phi_ji);
        Ok(())
    }

    pub fn with_edge(mut self, i: usize, j: usize, phi_ji: DMatrix) -> Result<Self> {
        self.set_edge(i, j, phi_ji)?;
        Ok(self)
    }

    pub fn base(&self) -> &Arc<StructureAlgebra> {
        &self.base
    }

    pub fn r(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn size(&self, i: usize) -> Result<usize> {
        self.check_vertex(i)?;
        Ok(self.sizes[i - 1])
    }

    /// Errors unless `1 <= i <= r`.
    pub fn check_vertex(&self, i: usize) -> Result<()> {
        if (1..=self.r()).contains(&i) {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: i,
                r: self.r(),
            })
        }
    }

    /// Stored edges as `((i, j), phi_ji)` with `i < j`, 1-based.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), &DMatrix)> {
        self.edges.iter().map(|(&(i, j), m)| ((i + 1, j + 1), m))
    }

    /// `phi_ab : J_b -> J_a` for `a != b`, zero when the edge is absent.
    pub fn hom(&self, a: usize, b: usize) -> Result<DMatrix> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        if a == b {
            return Err(Error::InvalidGraph(format!("no edge from vertex {a} to itself")));
        }
        let (ga, gb) = (self.sizes[a - 1], self.sizes[b - 1]);
        if a > b {
            Ok(self
                .edges
                .get(&(b - 1, a - 1))
                .cloned()
                .unwrap_or_else(|| DMatrix::zeros(self.base.clone(), ga, gb)))
        } else {
            match self.edges.get(&(a - 1, b - 1)) {
                Some(m) => m.dagger_transpose(),
                None => Ok(DMatrix::zeros(self.base.clone(), ga, gb)),
            }
        }
    }

    /// `M_{g_i}(D)`, the ambient algebra of `E_i`.
    pub fn end_algebra(&self, i: usize) -> Result<StructureAlgebra> {
        matrix_algebra(&self.base, self.size(i)?)
    }

    /// Coefficient-space dimension of `Hom(J_b, J_a)`.
    fn hom_dim(&self, a0: usize, b0: usize) -> usize {
        self.base.dim() * self.sizes[a0] * self.sizes[b0]
    }

    /// Every edge multiplied by `m`, modelling the tensor power `L^m`.
    pub fn scaled(&self, m: &Rational) -> Self {
        ObstructionGraph {
            edges: self.edges.iter().map(|(k, v)| (*k, v.scale(m))).collect(),
            ..self.clone()
        }
    }

    fn flat_homs(&self) -> Result<Vec<Option<RatVector>>> {
        let r = self.r();
        let mut out = vec![None; r * r];
        for a in 0..r {
            for b in 0..r {
                if a != b {
                    out[a * r + b] = Some(self.hom(a + 1, b + 1)?.into_flat());
                }
            }
        }
        Ok(out)
    }
}

/// Spans `S[a][b]` of all walk values from `a` to `b`, closed under
/// `S[a][k] * S[k][b] -> S[a][b]`.
#[derive(Clone, Debug)]
pub struct PathSpanTable {
    r: usize,
    spans: Vec<Subspace>,
    pub rounds: usize,
}

impl PathSpanTable {
    /// `S[a][b]`, 1-based.
    pub fn get(&self, a: usize, b: usize) -> &Subspace {
        &self.spans[(a - 1) * self.r + (b - 1)]
    }
}

/// Least fixed point of the path-span iteration, seeded with single edges.
pub fn path_spans(graph: &ObstructionGraph) -> Result<PathSpanTable> {
    match ModTable::new(graph.base()) {
        Some(table) => match path_spans_filtered(graph, &table)? {
            Some(found) => Ok(found),
            None => path_spans_exact(graph),
        },
        None => path_spans_exact(graph),
    }
}

// (target ab, shape, left ak, u, right kb, v)
type Task = (usize, (usize, usize, usize), usize, usize, usize, usize);

fn triple_tasks(graph: &ObstructionGraph, pools: &[Pool], start: &[usize], ends: &[usize]) -> Vec<Task> {
    let r = graph.r();
    let sizes = graph.sizes();
    let mut tasks = Vec::new();
    for a in 0..r {
        for k in 0..r {
            for b in 0..r {
                let (ak, kb, ab) = (a * r + k, k * r + b, a * r + b);
                if pools[ab].is_full() {
                    continue;
                }
                for u in 0..ends[ak] {
                    for v in 0..ends[kb] {
                        if u >= start[ak] || v >= start[kb] {
                            tasks.push((ab, (sizes[a], sizes[k], sizes[b]), ak, u, kb, v));
                        }
                    }
                }
            }
        }
    }
    tasks
}

// Mod-p screened version; `None` if some value has no residue.
fn path_spans_filtered(graph: &ObstructionGraph, table: &ModTable) -> Result<Option<PathSpanTable>> {
    let r = graph.r();
    let base = graph.base();
    let mut pools: Vec<Pool> = (0..r * r).map(|ab| Pool::new(graph.hom_dim(ab / r, ab % r))).collect();
    for (ab, h) in graph.flat_homs()?.into_iter().enumerate() {
        if let Some(h) = h {
            if pools[ab].insert_exact(h).is_none() {
                return Ok(None);
            }
        }
    }
    let mut start = vec![0usize; r * r];
    let mut rounds = 0;
    loop {
        loop {
            let ends: Vec<usize> = pools.iter().map(Pool::len).collect();
            if start == ends {
                break;
            }
            rounds += 1;
            let tasks = triple_tasks(graph, &pools, &start, &ends);
            let residues: Vec<Vec<u64>> = tasks
                .par_iter()
                .map(|&(_, shape, ak, u, kb, v)| table.mul_flat(shape, &pools[ak].residues[u], &pools[kb].residues[v]))
                .collect();
            for (&(ab, shape, ak, u, kb, v), res) in tasks.iter().zip(residues) {
                if pools[ab].admit(res.clone()) {
                    let p = mul_flat(base, shape, pools[ak].elems[u].as_slice(), pools[kb].elems[v].as_slice());
                    pools[ab].push_admitted(p, res);
                }
            }
            start = ends;
        }
        // confirm exactly that every span that is not full is closed
        let ends: Vec<usize> = pools.iter().map(Pool::len).collect();
        let tasks = triple_tasks(graph, &pools, &vec![0; r * r], &ends);
        let missing: Vec<(usize, RatVector)> = tasks
            .par_iter()
            .filter_map(|&(ab, shape, ak, u, kb, v)| {
                let p = mul_flat(base, shape, pools[ak].elems[u].as_slice(), pools[kb].elems[v].as_slice());
                (!pools[ab].contains(&p)).then_some((ab, p))
            })
            .collect();
        if missing.is_empty() {
            break;
        }
        for (ab, p) in missing {
            if pools[ab].insert_exact(p).is_none() {
                return Ok(None);
            }
        }
    }
    Ok(Some(PathSpanTable {
        r,
        spans: pools.into_iter().map(Pool::finish).collect(),
        rounds,
    }))
}

fn path_spans_exact(graph: &ObstructionGraph) -> Result<PathSpanTable> {
    let r = graph.r();
    let sizes = graph.sizes();
    let base = graph.base();
    let homs = graph.flat_homs()?;

    let mut ech: Vec<Echelon> = (0..r * r)
        .map(|ab| Echelon::new(graph.hom_dim(ab / r, ab % r)))
        .collect();
    let mut elems: Vec<Vec<RatVector>> = vec![Vec::new(); r * r];
    for (ab, h) in homs.into_iter().enumerate() {
        if let Some(h) = h {
            if ech[ab].insert(h.clone()) {
                elems[ab].push(h);
            }
        }
    }

    let mut start = vec![0usize; r * r];
    let mut rounds = 0;
    loop {
        let ends: Vec<usize> = elems.iter().map(Vec::len).collect();
        if start == ends {
            break;
        }
        rounds += 1;
        let mut tasks = Vec::new();
        for a in 0..r {
            for k in 0..r {
                for b in 0..r {
                    let (ak, kb, ab) = (a * r + k, k * r + b, a * r + b);
                    if ech[ab].is_full() {
                        continue;
                    }
                    for u in 0..ends[ak] {
                        for v in 0..ends[kb] {
                            if u >= start[ak] || v >= start[kb] {
                                tasks.push((ab, (sizes[a], sizes[k], sizes[b]), ak, u, kb, v));
                            }
                        }
                    }
                }
            }
        }
        let products: Vec<(usize, RatVector)> = tasks
            .par_iter()
            .map(|&(ab, shape, ak, u, kb, v)| {
                let x = elems[ak][u].as_slice();
                let y = elems[kb][v].as_slice();
                (ab, mul_flat(base, shape, x, y))
            })
            .collect();
        for (ab, p) in products {
            if !ech[ab].is_full() && ech[ab].insert(p.clone()) {
                elems[ab].push(p);
            }
        }
        start = ends;
    }
    Ok(PathSpanTable {
        r,
        spans: ech.into_iter().map(Echelon::finish).collect(),
        rounds,
    })
}

/// `E_i`, as a subspace of the coefficient space of `M_{g_i}(D)`.
pub fn compute_obstruction(graph: &ObstructionGraph, i: usize) -> Result<Subspace> {
    graph.check_vertex(i)?;
    Ok(path_spans(graph)?.get(i, i).clone())
}

/// Span of the values of all closed walks at `i` with `2..=max_len` steps,
/// built by extending walks one edge at a time.
pub fn loop_oracle(graph: &ObstructionGraph, i: usize, max_len: usize) -> Result<Subspace> {
    if max_len < 2 {
        return Err(Error::InvalidArgument("loop length must be at least 2".into()));
    }
    graph.check_vertex(i)?;
    let mut walks = WalkSpans::new(graph, i)?;
    for _ in 1..max_len {
        if !walks.extend() {
            break;
        }
    }
    Ok(walks.at(i))
}

/// Loop-oracle span at the first walk length where nothing grows any more,
/// together with that length.
pub fn loop_oracle_stabilized(graph: &ObstructionGraph, i: usize) -> Result<(Subspace, usize)> {
    graph.check_vertex(i)?;
    let mut walks = WalkSpans::new(graph, i)?;
    let mut len = 1;
    while walks.extend() {
        len += 1;
    }
    Ok((walks.at(i), len.max(2)))
}

// Spans of walks from a fixed start vertex with at most `len` steps, per endpoint.
struct WalkSpans<'a> {
    graph: &'a ObstructionGraph,
    start: usize,
    homs: Vec<Option<RatVector>>,
    single: Vec<Subspace>,
    current: Vec<Subspace>,
}

impl<'a> WalkSpans<'a> {
    fn new(graph: &'a ObstructionGraph, i: usize) -> Result<Self> {
        let r = graph.r();
        let s = i - 1;
        let homs = graph.flat_homs()?;
        let single: Vec<Subspace> = (0..r)
            .map(|b| {
                let dim = graph.hom_dim(s, b);
                match &homs[s * r + b] {
                    Some(h) => Echelon::from_rows(dim, [h.clone()]).finish(),
                    None => Subspace::zero(dim),
                }
            })
            .collect();
        Ok(WalkSpans {
            graph,
            start: s,
            homs,
            current: single.clone(),
            single,
        })
    }

    /// One more step; returns whether any span grew.
    fn extend(&mut self) -> bool {
        let r = self.graph.r();
        let sizes = self.graph.sizes();
        let base = self.graph.base();
        let s = self.start;
        let next: Vec<Subspace> = (0..r)
            .into_par_iter()
            .map(|b| {
                let mut ech = Echelon::from_subspace(self.single[b].clone());
                for k in (0..r).filter(|&k| k != b) {
                    let edge = self.homs[k * r + b].as_ref().expect("off-diagonal");
                    if edge.is_zero() {
                        continue;
                    }
                    for w in self.current[k].basis() {
                        ech.insert(mul_flat(base, (sizes[s], sizes[k], sizes[b]), w.as_slice(), edge.as_slice()));
                    }
                }
                ech.finish()
            })
            .collect();
        let grew = next != self.current;
        self.current = next;
        grew
    }

    fn at(&self, i: usize) -> Subspace {
        self.current[i - 1].clone()
    }
}
