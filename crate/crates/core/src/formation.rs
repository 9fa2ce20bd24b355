//! Desired formation record: graph, per-edge distances, per-triangle signed
//! areas, and one realizing embedding.

use crate::error::{Error, Result};
use crate::geometry::{self, heron_area, signed_area, Orientation, Point};
use crate::graph::{validate_conditions, triangles_of, DirectedFormationGraph, TriangleList};
use crate::rigidity::Framework;

/// Side lengths of one follower triangle `(i, j, k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleSides {
    /// Base `‖p_j − p_i‖`.
    pub d_ji: f64,
    pub d_ki: f64,
    pub d_kj: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormationSpec {
    graph: DirectedFormationGraph,
    triangles: TriangleList,
    distances: Vec<f64>,
    areas: Vec<f64>,
    embedding: Vec<Point>,
}

fn checked_graph(graph: &DirectedFormationGraph) -> Result<TriangleList> {
    let report = validate_conditions(graph);
    if !report.passed() {
        return Err(Error::Spec(report.violations.join("; ")));
    }
    triangles_of(graph)
}

impl FormationSpec {
    /// Desired formation given by coordinates; distances and areas are read
    /// off the embedding.
    pub fn from_coordinates(graph: DirectedFormationGraph, positions: Vec<Point>) -> Result<Self> {
        let triangles = checked_graph(&graph)?;
        let framework = Framework::new(graph, positions)?;
        let p = framework.positions();
        let mut distances = Vec::with_capacity(framework.graph().edges().len());
        for e in framework.graph().edges() {
            let d = (p[e.source] - p[e.sink]).norm();
            if d <= 0.0 {
                let (j, i) = e.label();
                return Err(Error::Spec(format!(
                    "desired distance d_{j}{i} is zero (agents {j} and {i} coincide)"
                )));
            }
            distances.push(d);
        }
        let mut areas = Vec::with_capacity(triangles.len());
        for t in triangles.iter() {
            let s = signed_area(&p[t.i], &p[t.j], &p[t.k]);
            let sides = [
                (p[t.j] - p[t.i]).norm(),
                (p[t.k] - p[t.i]).norm(),
                (p[t.k] - p[t.j]).norm(),
            ];
            if heron_area(sides[0], sides[1], sides[2]).is_none() || s == 0.0 {
                return Err(Error::Spec(format!(
                    "triangle {} is degenerate in the desired embedding",
                    t.label()
                )));
            }
            areas.push(s);
        }
        let (graph, embedding) = (framework.graph().clone(), framework.positions().to_vec());
        Ok(Self {
            graph,
            triangles,
            distances,
            areas,
            embedding,
        })
    }

    /// Desired formation given by edge lengths (in edge order) and one
    /// orientation per triangle. The embedding is realized incrementally
    /// with agent 1 at the origin and agent 2 on the positive x-axis.
    pub fn from_distances(
        graph: DirectedFormationGraph,
        distances: Vec<f64>,
        orientations: Vec<Orientation>,
    ) -> Result<Self> {
        let triangles = checked_graph(&graph)?;
        if distances.len() != graph.edges().len() {
            return Err(Error::Validation(format!(
                "{} distances for {} edges",
                distances.len(),
                graph.edges().len()
            )));
        }
        if orientations.len() != triangles.len() {
            return Err(Error::Validation(format!(
                "{} orientations for {} triangles",
                orientations.len(),
                triangles.len()
            )));
        }
        for (e, d) in graph.edges().iter().zip(&distances) {
            if !(d.is_finite() && *d > 0.0) {
                let (j, i) = e.label();
                return Err(Error::Spec(format!("desired distance d_{j}{i} = {d} must be > 0")));
            }
        }
        let d21 = distances[graph.edge_index(1, 0).expect("validated graph has edge (2,1)")];
        let mut embedding = vec![Point::zeros(); graph.n()];
        embedding[1] = Point::new(d21, 0.0);
        let mut areas = Vec::with_capacity(triangles.len());
        for (t, orient) in triangles.iter().zip(&orientations) {
            let d_ki = distances[graph.edge_index(t.k, t.i).expect("out-edge of k")];
            let d_kj = distances[graph.edge_index(t.k, t.j).expect("out-edge of k")];
            let base_vec = embedding[t.j] - embedding[t.i];
            let d_ji = base_vec.norm();
            let area = geometry::desired_area_from_distances(d_ji, d_ki, d_kj, *orient)
                .map_err(|_| {
                    Error::Spec(format!(
                        "triangle {} with sides ({d_ji}, {d_ki}, {d_kj}) violates the triangle inequality",
                        t.label()
                    ))
                })?;
            let e = base_vec / d_ji;
            let perp = Point::new(-e.y, e.x);
            let along = (d_ki * d_ki - d_kj * d_kj + d_ji * d_ji) / (2.0 * d_ji);
            let height = 2.0 * area / d_ji;
            embedding[t.k] = embedding[t.i] + e * along + perp * height;
            areas.push(area);
        }
        Ok(Self {
            graph,
            triangles,
            distances,
            areas,
            embedding,
        })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn graph(&self) -> &DirectedFormationGraph {
        &self.graph
    }

    pub fn triangles(&self) -> &TriangleList {
        &self.triangles
    }

    /// Desired distances in edge order.
    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    /// Desired signed areas in triangle order.
    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn embedding(&self) -> &[Point] {
        &self.embedding
    }

    pub fn desired_framework(&self) -> Framework {
        Framework::new(self.graph.clone(), self.embedding.clone())
            .expect("embedding validated at construction")
    }

    /// Side lengths of triangle `m`. The base uses the desired edge length
    /// when `(j, i)` is an edge and the realized embedding otherwise.
    pub fn sides(&self, m: usize) -> TriangleSides {
        let t = self.triangles[m];
        let d = |a: usize, b: usize| match self.graph.undirected_edge_index(a, b) {
            Some(idx) => self.distances[idx],
            None => (self.embedding[a] - self.embedding[b]).norm(),
        };
        TriangleSides {
            d_ji: d(t.j, t.i),
            d_ki: d(t.k, t.i),
            d_kj: d(t.k, t.j),
        }
    }

    /// Orientation of each triangle in the desired formation.
    pub fn orientations(&self) -> Vec<Orientation> {
        self.areas
            .iter()
            .map(|s| {
                if *s > 0.0 {
                    Orientation::CounterClockwise
                } else {
                    Orientation::Clockwise
                }
            })
            .collect()
    }
}
