//! Planar geometry: signed areas, area vectors of Henneberg frameworks,
//! Heron synthesis of desired areas, and the equivalence / congruence /
//! strong-congruence predicates.

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::graph::TriangleList;
use crate::rigidity::Framework;

pub type Point = Vector2<f64>;

/// Default relative tolerance for the framework comparison predicates.
pub const DEFAULT_TOL: f64 = 1e-6;

const HERON_CLAMP: f64 = -1e-12;
const QUAD_CLAMP: f64 = -1e-12;

/// The quarter-turn matrix `[[0, 1], [-1, 0]]` used by every signed-area
/// computation in the crate.
pub fn j_matrix() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, -1.0, 0.0)
}

#[inline]
pub(crate) fn j_mul(v: &Point) -> Point {
    Point::new(v.y, -v.x)
}

#[inline]
pub(crate) fn j_transpose_mul(v: &Point) -> Point {
    Point::new(-v.y, v.x)
}

/// Orientation of an ordered vertex triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::CounterClockwise => 1.0,
            Orientation::Clockwise => -1.0,
        }
    }

    pub fn from_sign(sign: i64) -> Result<Self> {
        match sign {
            1 => Ok(Orientation::CounterClockwise),
            -1 => Ok(Orientation::Clockwise),
            other => Err(Error::Validation(format!(
                "orientation must be +1 or -1, got {other}"
            ))),
        }
    }
}

/// Signed area of the ordered triangle `(p_i, p_j, p_k)`:
/// `½ (p_k − p_i)ᵀ J (p_k − p_j)`. Positive when the vertices run
/// counterclockwise.
pub fn signed_area(p_i: &Point, p_j: &Point, p_k: &Point) -> f64 {
    0.5 * (p_k - p_i).dot(&j_mul(&(p_k - p_j)))
}

/// Area vector χ: one signed area per triangle, in list order.
pub fn chi(framework: &Framework, triangles: &TriangleList) -> Result<Vec<f64>> {
    let n = framework.positions().len();
    if triangles.len() != n.saturating_sub(2) {
        return Err(Error::Validation(format!(
            "triangle list has {} entries, framework with {n} vertices needs {}",
            triangles.len(),
            n.saturating_sub(2)
        )));
    }
    let p = framework.positions();
    triangles
        .iter()
        .map(|t| {
            if t.k >= n {
                return Err(Error::Validation(format!(
                    "triangle {} references a vertex outside the framework",
                    t.label()
                )));
            }
            Ok(signed_area(&p[t.i], &p[t.j], &p[t.k]))
        })
        .collect()
}

/// Strict triangle inequality check on three side lengths.
pub fn is_strict_triangle(a: f64, b: f64, c: f64) -> bool {
    a > 0.0 && b > 0.0 && c > 0.0 && a + b > c && a + c > b && b + c > a
}

/// Unsigned triangle area from side lengths (Heron), evaluated in the
/// cancellation-free ordering. Returns `None` when the strict triangle
/// inequality fails.
pub fn heron_area(a: f64, b: f64, c: f64) -> Option<f64> {
    if !is_strict_triangle(a, b, c) {
        return None;
    }
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    let radicand = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    let radicand = if radicand < 0.0 && radicand > HERON_CLAMP {
        0.0
    } else {
        radicand
    };
    if radicand < 0.0 {
        return None;
    }
    Some(0.25 * radicand.sqrt())
}

/// Desired signed area `±√(d(d − d_ji)(d − d_ki)(d − d_kj))`, `d` the
/// semi-perimeter, with the sign taken from the requested orientation.
pub fn desired_area_from_distances(
    d_ji: f64,
    d_ki: f64,
    d_kj: f64,
    orientation: Orientation,
) -> Result<f64> {
    heron_area(d_ji, d_ki, d_kj)
        .map(|area| orientation.sign() * area)
        .ok_or_else(|| {
            Error::Spec(format!(
                "side lengths ({d_ji}, {d_ki}, {d_kj}) violate the strict triangle inequality"
            ))
        })
}

/// `|a − b| ≤ tol · max(|a|, |b|, 1)`: relative for quantities above unit
/// scale, absolute below it.
pub fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn same_shape(f: &Framework, g: &Framework) -> Result<()> {
    if f.graph() != g.graph() {
        return Err(Error::Validation(
            "frameworks are defined over different graphs".into(),
        ));
    }
    Ok(())
}

/// Edge lengths agree on every graph edge (compared as squared lengths).
pub fn equivalent(f: &Framework, g: &Framework, tol: f64) -> Result<bool> {
    same_shape(f, g)?;
    let (pf, pg) = (f.positions(), g.positions());
    Ok(f.graph().edges().iter().all(|e| {
        let lf = (pf[e.source] - pf[e.sink]).norm_squared();
        let lg = (pg[e.source] - pg[e.sink]).norm_squared();
        approx_eq(lf, lg, tol)
    }))
}

/// All pairwise distances agree.
pub fn congruent(f: &Framework, g: &Framework, tol: f64) -> Result<bool> {
    same_shape(f, g)?;
    let (pf, pg) = (f.positions(), g.positions());
    let n = pf.len();
    for a in 0..n {
        for b in (a + 1)..n {
            let lf = (pf[a] - pf[b]).norm_squared();
            let lg = (pg[a] - pg[b]).norm_squared();
            if !approx_eq(lf, lg, tol) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Equivalent with matching area vectors, which for Henneberg frameworks is
/// the same as congruent with matching area vectors.
pub fn strongly_congruent(
    f: &Framework,
    g: &Framework,
    triangles: &TriangleList,
    tol: f64,
) -> Result<bool> {
    if !equivalent(f, g, tol)? {
        return Ok(false);
    }
    let cf = chi(f, triangles)?;
    let cg = chi(g, triangles)?;
    Ok(cf.iter().zip(&cg).all(|(a, b)| approx_eq(*a, *b, tol)))
}

/// General quadrilateral area from its six pairwise distances, with the
/// diagonals `p3 − p2` and `p4 − p1`.
pub fn quadrilateral_area(p1: &Point, p2: &Point, p3: &Point, p4: &Point) -> Result<f64> {
    let sq = |a: &Point, b: &Point| (a - b).norm_squared();
    let diag = 4.0 * sq(p3, p2) * sq(p4, p1);
    let sides = sq(p2, p1) + sq(p4, p3) - sq(p3, p1) - sq(p4, p2);
    let radicand = diag - sides * sides;
    // round-off scale of the two competing products
    let scale = diag.abs().max(sides * sides).max(f64::MIN_POSITIVE);
    let rel = radicand / scale;
    if rel < QUAD_CLAMP {
        return Err(Error::Domain(format!(
            "quadrilateral radicand {radicand:e} is negative; vertices are not in diagonal labeling"
        )));
    }
    Ok(0.25 * radicand.max(0.0).sqrt())
}

/// Shape restriction on a follower triangle: `|(d_ki² − d_kj²) / d_ji²| < 2√2`.
pub fn triangle_shape_ratio(d_ji: f64, d_ki: f64, d_kj: f64) -> f64 {
    ((d_ki * d_ki - d_kj * d_kj) / (d_ji * d_ji)).abs()
}

pub fn triangle_shape_condition(d_ji: f64, d_ki: f64, d_kj: f64) -> bool {
    triangle_shape_ratio(d_ji, d_ki, d_kj) < 2.0 * std::f64::consts::SQRT_2
}

/// Rotate by `theta` then translate by `offset`.
pub fn isometry(points: &[Point], theta: f64, offset: Point) -> Vec<Point> {
    let rot = nalgebra::Rotation2::new(theta);
    points.iter().map(|p| rot * p + offset).collect()
}

/// Mirror every point across the x-axis.
pub fn reflect_x(points: &[Point]) -> Vec<Point> {
    points.iter().map(|p| Point::new(p.x, -p.y)).collect()
}

/// Mirror `p` across the line through `a` and `b`.
pub fn reflect_across_line(p: &Point, a: &Point, b: &Point) -> Point {
    let dir = (b - a).normalize();
    let rel = p - a;
    let along = dir * rel.dot(&dir);
    a + along * 2.0 - rel
}
