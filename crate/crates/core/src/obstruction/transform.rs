//! Transformation laws for `E_i`: pullback along finite covers of the
//! factors, and specialisation along an injective algebra map.

use std::sync::Arc;

use num_traits::Zero;

use super::ObstructionGraph;
use crate::algebra::{DMatrix, StructureAlgebra};
use crate::error::{Error, Result};
use crate::linear::{RatMatrix, RatVector, Subspace};
use crate::rational::{self, Rational};

/// A finite cover `f_i : C'_i -> C_i` on the level of Jacobians:
/// `iota = f_i^*` (`g' x g`), `pi = f_{i,*}` (`g x g'`), `pi * iota = degree`.
///
/// `pi` must be a nonzero rational multiple of `iota^dagger`, because
/// pushforward and pullback are transposes of each other; otherwise reversed
/// edges of the pulled-back graph would not be pullbacks.
#[derive(Clone, Debug)]
pub struct Cover {
    pub iota: DMatrix,
    pub pi: DMatrix,
    pub degree: u64,
}

impl Cover {
    pub fn trivial(base: Arc<StructureAlgebra>, g: usize) -> Result<Self> {
        let id = DMatrix::identity(base, g)?;
        Ok(Cover {
            iota: id.clone(),
            pi: id,
            degree: 1,
        })
    }

    /// `pi = iota^dagger` and `degree` read off from `pi * iota`.
    pub fn from_iota(iota: DMatrix) -> Result<Self> {
        let pi = iota.dagger_transpose()?;
        let prod = pi.mul(&iota)?;
        let d = prod.entry(0, 0).coeffs()[0].clone();
        if !d.is_integer() || d <= Rational::zero() {
            return Err(Error::InvalidCover {
                vertex: 0,
                reason: format!("iota^dagger iota has non-integral or non-positive diagonal {d}"),
            });
        }
        let degree = d.to_integer().try_into().map_err(|_| Error::InvalidCover {
            vertex: 0,
            reason: "degree does not fit in u64".into(),
        })?;
        Ok(Cover { iota, pi, degree })
    }

    fn validate(&self, vertex: usize, g: usize, base: &Arc<StructureAlgebra>) -> Result<usize> {
        let bad = |reason: String| Error::InvalidCover { vertex, reason };
        let g_new = self.iota.rows();
        if self.iota.cols() != g || self.pi.shape() != (g, g_new) {
            return Err(bad(format!(
                "iota is {:?} and pi is {:?}; expected ({g_new}, {g}) and ({g}, {g_new})",
                self.iota.shape(),
                self.pi.shape()
            )));
        }
        if !(Arc::ptr_eq(self.iota.base(), base) || **self.iota.base() == **base)
            || !(Arc::ptr_eq(self.pi.base(), base) || **self.pi.base() == **base)
        {
            return Err(Error::AlgebraMismatch);
        }
        if self.degree == 0 {
            return Err(bad("degree must be positive".into()));
        }
        let expected = DMatrix::identity(base.clone(), g)?.scale(&rational::int(self.degree as i64));
        if self.pi.mul(&self.iota)? != expected {
            return Err(bad(format!("pi * iota is not {} * identity", self.degree)));
        }
        let dual = self.iota.dagger_transpose()?;
        if proportionality(dual.flatten(), self.pi.flatten()).is_none() {
            return Err(bad("pi is not a rational multiple of iota^dagger".into()));
        }
        Ok(g_new)
    }
}

/// `Some(lambda)` with `y = lambda * x` and `lambda != 0`.
fn proportionality(x: &RatVector, y: &RatVector) -> Option<Rational> {
    let i = x.first_nonzero()?;
    let lambda = &y[i] / &x[i];
    (!lambda.is_zero() && &x.scaled(&lambda) == y).then_some(lambda)
}

/// `L' = f^* L`: sizes become `g'_i` and `phi'_ji = iota_j phi_ji pi_i`.
pub fn pullback_transform(graph: &ObstructionGraph, covers: &[Cover]) -> Result<ObstructionGraph> {
    if covers.len() != graph.r() {
        return Err(Error::InvalidArgument(format!(
            "{} covers for {} vertices",
            covers.len(),
            graph.r()
        )));
    }
    let base = graph.base().clone();
    let sizes = covers
        .iter()
        .zip(graph.sizes())
        .enumerate()
        .map(|(i, (c, &g))| c.validate(i + 1, g, &base))
        .collect::<Result<Vec<_>>>()?;
    let mut out = ObstructionGraph::new(base, sizes)?;
    for ((i, j), phi) in graph.edges() {
        let pulled = covers[j - 1].iota.mul(phi)?.mul(&covers[i - 1].pi)?;
        out.set_edge(i, j, pulled)?;
    }
    Ok(out)
}

/// `span{ iota e pi : e in E }`, the predicted `E_i` after pullback.
pub fn transport_subspace(e_span: &Subspace, cover: &Cover) -> Result<Subspace> {
    let base = cover.iota.base().clone();
    let g = cover.iota.cols();
    let g_new = cover.iota.rows();
    e_span.map(base.dim() * g_new * g_new, |v| {
        let e = DMatrix::from_flat(base.clone(), g, g, v.clone())?;
        Ok(cover.iota.mul(&e)?.mul(&cover.pi)?.into_flat())
    })
}

/// An injective unital algebra map `h : source -> target` that commutes with
/// the involutions, given by the images of the source basis vectors.
#[derive(Clone, Debug)]
pub struct BaseMap {
    source: Arc<StructureAlgebra>,
    target: Arc<StructureAlgebra>,
    // row k = h(b_k)
    images: RatMatrix,
}

impl BaseMap {
    pub fn new(source: Arc<StructureAlgebra>, target: Arc<StructureAlgebra>, images: RatMatrix) -> Result<Self> {
        let bad = |m: String| Error::InvalidMap(m);
        if images.rows() != source.dim() || images.cols() != target.dim() {
            return Err(bad(format!(
                "image matrix is {}x{}, expected {}x{}",
                images.rows(),
                images.cols(),
                source.dim(),
                target.dim()
            )));
        }
        let map = BaseMap {
            source,
            target,
            images,
        };
        if map.images.rank() != map.source.dim() {
            return Err(bad("not injective".into()));
        }
        let (su, tu) = (
            map.source.unit().ok_or(Error::MissingUnit)?,
            map.target.unit().ok_or(Error::MissingUnit)?,
        );
        if &map.apply(su)? != tu {
            return Err(bad("does not send 1 to 1".into()));
        }
        let n = map.source.dim();
        for k in 0..n {
            let hk = map.images.row(k);
            for l in 0..n {
                let hl = map.images.row(l);
                let lhs = map.apply(&map.source.structure_constant(k, l))?;
                if lhs != map.target.mul_vec(&hk, &hl) {
                    return Err(bad(format!("not multiplicative on basis pair ({k}, {l})")));
                }
            }
            let bk = RatVector::unit(n, k);
            if map.apply(&map.source.involution_vec(&bk)?)? != map.target.involution_vec(&hk)? {
                return Err(bad(format!("does not commute with the involution on basis element {k}")));
            }
        }
        Ok(map)
    }

    pub fn identity(base: Arc<StructureAlgebra>) -> Result<Self> {
        let n = base.dim();
        Self::new(base.clone(), base, RatMatrix::identity(n))
    }

    /// `x -> u x u^{-1}`, for `u` with `u u^dagger` a nonzero scalar.
    pub fn conjugation(base: Arc<StructureAlgebra>, u: &RatVector) -> Result<Self> {
        let unit = base.unit().ok_or(Error::MissingUnit)?.clone();
        let ud = base.involution_vec(u)?;
        let norm = base.mul_vec(u, &ud);
        let Some(lambda) = proportionality(&unit, &norm) else {
            return Err(Error::InvalidMap("u u^dagger is not a nonzero scalar".into()));
        };
        let u_inv = ud.scaled(&lambda.recip());
        let n = base.dim();
        let rows: Vec<RatVector> = (0..n)
            .map(|k| base.mul_vec(&base.mul_vec(u, &RatVector::unit(n, k)), &u_inv))
            .collect();
        Self::new(base.clone(), base, RatMatrix::from_rows(&rows)?)
    }

    pub fn source(&self) -> &Arc<StructureAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<StructureAlgebra> {
        &self.target
    }

    pub fn apply(&self, x: &RatVector) -> Result<RatVector> {
        self.images.transpose().mul_vec(x)
    }

    pub fn apply_matrix(&self, m: &DMatrix) -> Result<DMatrix> {
        m.map_entries(self.target.clone(), |x| self.apply(x))
    }

    /// Entrywise image of a subspace of `g x g` matrices.
    pub fn map_subspace(&self, e_span: &Subspace, g: usize) -> Result<Subspace> {
        e_span.map(self.target.dim() * g * g, |v| {
            let m = DMatrix::from_flat(self.source.clone(), g, g, v.clone())?;
            Ok(self.apply_matrix(&m)?.into_flat())
        })
    }
}

/// Edgewise image of the graph under `h`.
pub fn specialize_transform(graph: &ObstructionGraph, h: &BaseMap) -> Result<ObstructionGraph> {
    if !(Arc::ptr_eq(graph.base(), h.source()) || **graph.base() == **h.source()) {
        return Err(Error::AlgebraMismatch);
    }
    let mut out = ObstructionGraph::new(h.target().clone(), graph.sizes().to_vec())?;
    for ((i, j), phi) in graph.edges() {
        out.set_edge(i, j, h.apply_matrix(phi)?)?;
    }
    Ok(out)
}
