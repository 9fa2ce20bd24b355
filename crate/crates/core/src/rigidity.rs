use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::graph::DirectedFormationGraph;

/// Singular values below this fraction of the largest one count as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// A graph together with one planar position per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Framework {
    graph: DirectedFormationGraph,
    positions: Vec<Point>,
}

impl Framework {
    pub fn new(graph: DirectedFormationGraph, positions: Vec<Point>) -> Result<Self> {
        if positions.len() != graph.n() {
            return Err(Error::Validation(format!(
                "framework has {} positions for {} vertices",
                positions.len(),
                graph.n()
            )));
        }
        if let Some(v) = positions.iter().position(|p| !(p.x.is_finite() && p.y.is_finite())) {
            return Err(Error::Validation(format!(
                "position of vertex {} is not finite",
                v + 1
            )));
        }
        Ok(Self { graph, positions })
    }

    pub fn graph(&self) -> &DirectedFormationGraph {
        &self.graph
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }
}

/// Half the Jacobian of the squared-edge-length map: one row per edge, with
/// `(p_a − p_b)ᵀ` in the columns of endpoint `a` and `(p_b − p_a)ᵀ` in those
/// of `b`.
pub fn rigidity_matrix(f: &Framework) -> DMatrix<f64> {
    let n = f.graph().n();
    let edges = f.graph().edges();
    let p = f.positions();
    let mut r = DMatrix::zeros(edges.len(), 2 * n);
    for (row, e) in edges.iter().enumerate() {
        let d = p[e.sink] - p[e.source];
        r[(row, 2 * e.sink)] = d.x;
        r[(row, 2 * e.sink + 1)] = d.y;
        r[(row, 2 * e.source)] = -d.x;
        r[(row, 2 * e.source + 1)] = -d.y;
    }
    r
}

/// Number of singular values above `tol · σ_max`.
pub fn numeric_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max <= 0.0 || !max.is_finite() {
        return 0;
    }
    sv.iter().filter(|s| **s > tol * max).count()
}

pub fn is_infinitesimally_rigid(f: &Framework, tol: f64) -> bool {
    let n = f.graph().n();
    if n < 2 {
        return false;
    }
    numeric_rank(&rigidity_matrix(f), tol) == 2 * n - 3
}
