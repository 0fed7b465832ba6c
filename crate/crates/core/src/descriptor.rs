//! JSON descriptors for algebras and obstruction graphs.
//!
//! Algebras:
//!
//! ```json
//! {"kind": "quaternion", "a": "-1", "b": "-3"}
//! {"kind": "quaternion_for_prime", "p": 5}
//! {"kind": "matrix", "base": {"kind": "quaternion_for_prime", "p": 2}, "g": 2}
//! {"kind": "split", "g": 2}
//! {"kind": "custom", "dim": 2, "consts": [[["1","0"],["0","1"]], [["0","1"],["1","0"]]],
//!  "unit": ["1","0"], "involution": [["1","0"],["0","1"]]}
//! ```
//!
//! In a custom descriptor `consts[i][j]` is the coefficient vector of
//! `b_i * b_j` and `involution[i]` is the image of `b_i`.
//!
//! Graphs use 1-based vertices; the edge `{"i": 1, "j": 2, "matrix": m}`
//! stores `phi_21`, with `m` nested as rows, then columns, then base
//! coefficients.

use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::algebra::{matrix_algebra, quaternion_algebra, quaternion_for_prime, split_model, DMatrix, StructureAlgebra};
use crate::error::{Error, Result};
use crate::linear::{RatMatrix, RatVector, Subspace};
use crate::obstruction::ObstructionGraph;
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlgebraDescriptor {
    Quaternion {
        #[serde(with = "rational::serde_str")]
        a: Rational,
        #[serde(with = "rational::serde_str")]
        b: Rational,
    },
    QuaternionForPrime {
        p: u64,
    },
    Matrix {
        base: Box<AlgebraDescriptor>,
        g: usize,
    },
    Split {
        g: usize,
    },
    Custom {
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
        consts: Vec<Vec<RatVector>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        unit: Option<RatVector>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        involution: Option<Vec<RatVector>>,
    },
}

impl AlgebraDescriptor {
    pub fn build(&self) -> Result<StructureAlgebra> {
        match self {
            AlgebraDescriptor::Quaternion { a, b } => quaternion_algebra(a, b),
            AlgebraDescriptor::QuaternionForPrime { p } => quaternion_for_prime(*p),
            AlgebraDescriptor::Matrix { base, g } => {
                if *g == 0 {
                    return Err(Error::Descriptor("matrix size g must be positive".into()));
                }
                matrix_algebra(&base.build()?, *g)
            }
            AlgebraDescriptor::Split { g } => {
                if *g == 0 {
                    return Err(Error::Descriptor("split model needs g >= 1".into()));
                }
                split_model(*g)
            }
            AlgebraDescriptor::Custom {
                dim,
                labels,
                consts,
                unit,
                involution,
            } => {
                let involution = involution.as_ref().map(|rows| RatMatrix::from_rows(rows)).transpose()?;
                let a = crate::algebra::make_algebra(*dim, consts, unit.clone(), involution)?;
                match labels {
                    Some(l) => a.with_labels(l.clone()),
                    None => Ok(a),
                }
            }
        }
    }

    /// A descriptor that rebuilds `a`: the quaternion form when `a` was
    /// built as a quaternion algebra, otherwise the full structure constants.
    pub fn describe(a: &StructureAlgebra) -> Self {
        if let Some(q) = a.quaternion_params() {
            return match q.p {
                Some(p) => AlgebraDescriptor::QuaternionForPrime { p },
                None => AlgebraDescriptor::Quaternion {
                    a: q.a.clone(),
                    b: q.b.clone(),
                },
            };
        }
        let n = a.dim();
        let default_labels: Vec<String> = (1..=n).map(|k| format!("b{k}")).collect();
        AlgebraDescriptor::Custom {
            dim: n,
            labels: (a.labels() != default_labels.as_slice()).then(|| a.labels().to_vec()),
            consts: (0..n)
                .map(|i| (0..n).map(|j| a.structure_constant(i, j)).collect())
                .collect(),
            unit: a.unit().cloned(),
            involution: a.involution_matrix().map(|m| m.row_vectors()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDescriptor {
    pub i: usize,
    pub j: usize,
    pub matrix: Vec<Vec<RatVector>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDescriptor {
    pub base: AlgebraDescriptor,
    pub r: usize,
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub edges: Vec<EdgeDescriptor>,
}

impl GraphDescriptor {
    pub fn build(&self) -> Result<ObstructionGraph> {
        if self.sizes.len() != self.r {
            return Err(Error::Descriptor(format!(
                "r = {} but {} sizes were given",
                self.r,
                self.sizes.len()
            )));
        }
        let base = Arc::new(self.base.build()?);
        let mut graph = ObstructionGraph::new(base.clone(), self.sizes.clone())?;
        for (n, e) in self.edges.iter().enumerate() {
            let m = nested_to_dmatrix(&base, &e.matrix)
                .map_err(|err| Error::Descriptor(format!("edges[{n}].matrix: {err}")))?;
            graph.set_edge(e.i, e.j, m)?;
        }
        Ok(graph)
    }

    pub fn from_graph(graph: &ObstructionGraph) -> Self {
        GraphDescriptor {
            base: AlgebraDescriptor::describe(graph.base()),
            r: graph.r(),
            sizes: graph.sizes().to_vec(),
            edges: graph
                .edges()
                .map(|((i, j), m)| EdgeDescriptor {
                    i,
                    j,
                    matrix: dmatrix_to_nested(m),
                })
                .collect(),
        }
    }
}

fn nested_to_dmatrix(base: &Arc<StructureAlgebra>, rows: &[Vec<RatVector>]) -> Result<DMatrix> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 {
        return Err(Error::ShapeMismatch("empty matrix".into()));
    }
    if let Some(r) = rows.iter().position(|row| row.len() != cols) {
        return Err(Error::ShapeMismatch(format!("row {r} has {} entries, expected {cols}", rows[r].len())));
    }
    let entries: Vec<RatVector> = rows.iter().flatten().cloned().collect();
    DMatrix::from_entries(base.clone(), rows.len(), cols, &entries)
}

fn dmatrix_to_nested(m: &DMatrix) -> Vec<Vec<RatVector>> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| m.entry(r, c).coeffs().clone()).collect())
        .collect()
}

/// Input for a corner query: an algebra and spanning vectors of a subspace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CornerInput {
    pub algebra: AlgebraDescriptor,
    pub span: Vec<RatVector>,
}

impl CornerInput {
    pub fn build(&self) -> Result<(Arc<StructureAlgebra>, Subspace)> {
        let a = Arc::new(self.algebra.build()?);
        let span = crate::linear::echelonize(a.dim(), &self.span)?;
        Ok((a, span))
    }
}

/// Deserializes JSON text, reporting the path of the offending field.
pub fn from_json_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::Descriptor(format!("at {path}: {}", e.into_inner()))
    })
}

pub fn graph_from_json(text: &str) -> Result<ObstructionGraph> {
    from_json_str::<GraphDescriptor>(text)?.build()
}

pub fn graph_to_json(graph: &ObstructionGraph) -> Result<String> {
    serde_json::to_string_pretty(&GraphDescriptor::from_graph(graph)).map_err(|e| Error::Descriptor(e.to_string()))
}
