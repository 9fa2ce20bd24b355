//! Leader-first-follower (LFF) minimally persistent directed graphs.
//!
//! Vertex labels are 1-based at every public boundary that takes or prints
//! labels (`from_labels`, `build_lff`, `label()`); indices stored inside
//! [`Edge`] and [`Triangle`] are 0-based.

use std::fmt;

use crate::error::{Error, Result};

/// Directed edge: `source` measures its position relative to `sink`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub source: usize,
    pub sink: usize,
}

impl Edge {
    /// 1-based `(source, sink)` pair.
    pub fn label(&self) -> (usize, usize) {
        (self.source + 1, self.sink + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedFormationGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl DirectedFormationGraph {
    /// Build from 1-based `(source, sink)` pairs. Only structural checks run
    /// here (range, self-loops, duplicates); the LFF conditions are reported
    /// by [`validate_conditions`].
    pub fn from_labels(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n < 2 {
            return Err(Error::Validation(format!(
                "a formation needs at least 2 agents, got {n}"
            )));
        }
        let mut out: Vec<Edge> = Vec::with_capacity(edges.len());
        for &(j, i) in edges {
            if j == 0 || i == 0 || j > n || i > n {
                return Err(Error::Validation(format!(
                    "edge ({j},{i}) references a vertex outside 1..={n}"
                )));
            }
            if j == i {
                return Err(Error::Validation(format!("self-loop on vertex {j}")));
            }
            let e = Edge {
                source: j - 1,
                sink: i - 1,
            };
            if out.contains(&e) {
                return Err(Error::Validation(format!("duplicate edge ({j},{i})")));
            }
            out.push(e);
        }
        Ok(Self { n, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.source == v).count()
    }

    /// Index of the edge `source -> sink` (0-based vertices), if present.
    pub fn edge_index(&self, source: usize, sink: usize) -> Option<usize> {
        self.edges
            .iter()
            .position(|e| e.source == source && e.sink == sink)
    }

    /// Edge index between two vertices regardless of direction.
    pub fn undirected_edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index(a, b).or_else(|| self.edge_index(b, a))
    }

    pub fn labels(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(Edge::label).collect()
    }
}

/// Grow a graph by Henneberg type-I insertions. `attachments[m]` names the
/// two existing vertices (1-based) that vertex `m + 3` attaches to.
pub fn build_lff(n: usize, attachments: &[(usize, usize)]) -> Result<DirectedFormationGraph> {
    if n < 2 {
        return Err(Error::Validation(format!(
            "a formation needs at least 2 agents, got {n}"
        )));
    }
    if attachments.len() != n - 2 {
        return Err(Error::Validation(format!(
            "{n} agents need {} attachment pairs, got {}",
            n - 2,
            attachments.len()
        )));
    }
    let mut edges = vec![(2, 1)];
    for (m, &(a, b)) in attachments.iter().enumerate() {
        let k = m + 3;
        if a == b {
            return Err(Error::Validation(format!(
                "vertex {k} attaches twice to vertex {a}"
            )));
        }
        let (i, j) = (a.min(b), a.max(b));
        if i == 0 || j >= k {
            return Err(Error::Validation(format!(
                "vertex {k} attaches to ({a},{b}); only vertices 1..={} exist yet",
                k - 1
            )));
        }
        edges.push((k, i));
        edges.push((k, j));
    }
    DirectedFormationGraph::from_labels(n, &edges)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub condition1: bool,
    pub condition2: bool,
    pub edge_count: bool,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.condition1 && self.condition2 && self.edge_count
    }
}

/// Check the out-degree pattern (0, 1, 2, 2, ...), the downward edge
/// direction, and the `2n − 3` edge count.
pub fn validate_conditions(g: &DirectedFormationGraph) -> ValidationReport {
    let mut violations = Vec::new();

    let mut condition1 = true;
    for v in 0..g.n() {
        let expected = match v {
            0 => 0,
            1 => 1,
            _ => 2,
        };
        let got = g.out_degree(v);
        if got != expected {
            condition1 = false;
            violations.push(format!(
                "condition 1: out({}) = {got}, expected {expected}",
                v + 1
            ));
        }
    }

    let mut condition2 = true;
    for e in g.edges() {
        if e.source <= e.sink {
            condition2 = false;
            let (j, i) = e.label();
            violations.push(format!(
                "condition 2: edge ({j},{i}) points from a lower to a higher label"
            ));
        }
    }

    let expected_edges = 2 * g.n() - 3;
    let edge_count = g.edges().len() == expected_edges;
    if !edge_count {
        violations.push(format!(
            "edge count: {} edges, expected 2n-3 = {expected_edges}",
            g.edges().len()
        ));
    }

    ValidationReport {
        condition1,
        condition2,
        edge_count,
        violations,
    }
}

/// Follower triangle `(i, j, k)` with `i < j < k`; `k` has out-edges to `i`
/// and `j`. Fields are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triangle {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

impl Triangle {
    pub fn label(&self) -> TriangleLabel {
        TriangleLabel(self.i + 1, self.j + 1, self.k + 1)
    }
}

/// 1-based triangle label, printed as `(i,j,k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TriangleLabel(pub usize, pub usize, pub usize);

impl fmt::Display for TriangleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0, self.1, self.2)
    }
}

/// Triangles of a Henneberg graph, one per vertex `k ≥ 3`, in increasing `k`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TriangleList(Vec<Triangle>);

impl TriangleList {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Triangle> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Triangle] {
        &self.0
    }

    pub fn labels(&self) -> Vec<TriangleLabel> {
        self.0.iter().map(Triangle::label).collect()
    }
}

impl std::ops::Index<usize> for TriangleList {
    type Output = Triangle;
    fn index(&self, m: usize) -> &Triangle {
        &self.0[m]
    }
}

pub fn triangles_of(g: &DirectedFormationGraph) -> Result<TriangleList> {
    let report = validate_conditions(g);
    if !report.passed() {
        return Err(Error::Validation(report.violations.join("; ")));
    }
    let mut out = Vec::with_capacity(g.n() - 2);
    for k in 2..g.n() {
        let mut sinks: Vec<usize> = g
            .edges()
            .iter()
            .filter(|e| e.source == k)
            .map(|e| e.sink)
            .collect();
        sinks.sort_unstable();
        out.push(Triangle {
            i: sinks[0],
            j: sinks[1],
            k,
        });
    }
    Ok(TriangleList(out))
}
