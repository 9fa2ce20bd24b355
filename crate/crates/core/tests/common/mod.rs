//! Fixtures and independent oracles shared by the integration tests. The
//! oracles avoid the library's own numerics: quartic roots come from
//! companion-matrix eigenvalues, ranks from Gaussian elimination, areas
//! from the shoelace formula.

#![allow(dead_code)]

use formctl::geometry::Orientation;
use formctl::{build_lff, FormationSpec, Point};
use nalgebra::{DMatrix, Matrix3};
use rand::Rng;

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

pub fn equilateral_spec() -> FormationSpec {
    let g = build_lff(3, &[(1, 2)]).unwrap();
    FormationSpec::from_distances(g, vec![2.0; 3], vec![Orientation::CounterClockwise]).unwrap()
}

pub fn chain5_positions() -> Vec<Point> {
    vec![
        Point::new(0.0, 0.0),
        Point::new(2.0, 0.0),
        Point::new(1.0, SQRT3),
        Point::new(3.0, SQRT3),
        Point::new(2.0, 2.0 * SQRT3),
    ]
}

/// Five agents, three equilateral side-2 triangles in a strip.
pub fn chain5_spec() -> FormationSpec {
    let g = build_lff(5, &[(1, 2), (2, 3), (3, 4)]).unwrap();
    FormationSpec::from_coordinates(g, chain5_positions()).unwrap()
}

pub fn shoelace(p: &[Point]) -> f64 {
    let n = p.len();
    0.5 * (0..n)
        .map(|k| {
            let (a, b) = (p[k], p[(k + 1) % n]);
            a.x * b.y - b.x * a.y
        })
        .sum::<f64>()
}

/// Real parts of the companion-matrix eigenvalues whose imaginary part is
/// negligible.
pub fn companion_real_roots(coeffs_desc: &[f64]) -> Vec<f64> {
    let lead = coeffs_desc[0];
    let deg = coeffs_desc.len() - 1;
    let mut m = DMatrix::<f64>::zeros(deg, deg);
    for k in 0..deg {
        m[(0, k)] = -coeffs_desc[k + 1] / lead;
    }
    for k in 1..deg {
        m[(k, k - 1)] = 1.0;
    }
    m.complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= 1e-9 * (1.0 + z.norm()))
        .map(|z| z.re)
        .collect()
}

fn cubic_real_roots(a: f64, b: f64, c: f64, d: f64) -> Vec<f64> {
    let m = Matrix3::new(-b / a, -c / a, -d / a, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0);
    m.complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= 1e-6 * (1.0 + z.norm()))
        .map(|z| z.re)
        .collect()
}

fn eval4(c: &[f64; 5], x: f64) -> f64 {
    (((c[0] * x + c[1]) * x + c[2]) * x + c[3]) * x + c[4]
}

/// Real-root oracle for a quartic with nonzero leading coefficient: a real
/// root exists iff the extremum of the quartic on its unbounded side
/// reaches zero. Critical points come from the companion matrix of the
/// derivative, polished by Newton steps.
pub fn oracle_has_real_root(c: [f64; 5]) -> bool {
    let s = c[0].signum();
    let q: [f64; 5] = c.map(|v| v * s);
    let d = [4.0 * q[0], 3.0 * q[1], 2.0 * q[2], q[3]];
    let mut best = f64::INFINITY;
    for mut x in cubic_real_roots(d[0], d[1], d[2], d[3]) {
        for _ in 0..6 {
            let f = ((d[0] * x + d[1]) * x + d[2]) * x + d[3];
            let fp = (3.0 * d[0] * x + 2.0 * d[1]) * x + d[2];
            if fp == 0.0 {
                break;
            }
            x -= f / fp;
        }
        best = best.min(eval4(&q, x));
    }
    best <= 0.0 || !companion_real_roots(&q).is_empty()
}

/// Rank by Gaussian elimination with partial pivoting; pivots below
/// `tol` times the largest entry count as zero.
pub fn rank_by_elimination(m: &DMatrix<f64>, tol: f64) -> usize {
    let mut a = m.clone();
    let (rows, cols) = a.shape();
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let (piv, val) = (rank..rows)
            .map(|r| (r, a[(r, col)].abs()))
            .fold((rank, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if val <= tol * scale {
            continue;
        }
        a.swap_rows(rank, piv);
        for r in rank + 1..rows {
            let f = a[(r, col)] / a[(rank, col)];
            for k in col..cols {
                let v = a[(rank, k)];
                a[(r, k)] -= f * v;
            }
        }
        rank += 1;
    }
    rank
}

/// Random attachment pairs for agents 3..n.
pub fn random_attachments<R: Rng>(rng: &mut R, n: usize) -> Vec<(usize, usize)> {
    (3..=n)
        .map(|k| {
            let i = rng.gen_range(1..k - 1);
            let j = rng.gen_range(i + 1..k);
            (i, j)
        })
        .collect()
}

pub fn random_points<R: Rng>(rng: &mut R, n: usize, half: f64) -> Vec<Point> {
    (0..n)
        .map(|_| Point::new(rng.gen_range(-half..half), rng.gen_range(-half..half)))
        .collect()
}

/// Random strict triangle `(base, leg_i, leg_j)` with sides in `[lo, hi]`.
pub fn random_triangle<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> (f64, f64, f64) {
    loop {
        let (a, b, c) = (rng.gen_range(lo..hi), rng.gen_range(lo..hi), rng.gen_range(lo..hi));
        let m = a.max(b).max(c);
        if a + b + c - m > m * (1.0 + 1e-3) {
            return (a, b, c);
        }
    }
}

/// Triangle with the base on the x-axis and the apex above it.
pub fn embed_triangle(base: f64, d_ki: f64, d_kj: f64) -> [Point; 3] {
    let x = (base * base + d_ki * d_ki - d_kj * d_kj) / (2.0 * base);
    let y = (d_ki * d_ki - x * x).max(0.0).sqrt();
    [Point::new(0.0, 0.0), Point::new(base, 0.0), Point::new(x, y)]
}

/// Direct transcription of the follower's stationary quartic in terms of
/// the two base distances and the gain ratio, used to cross-check the
/// library's symmetric-parameter form.
pub fn follower_quartic(d21: f64, d31: f64, d32: f64, ratio: f64) -> [f64; 5] {
    let r = ratio;
    let rad = 2.0 * d21 * d21 * d32 * d32 - d21.powi(4) + 2.0 * d21 * d21 * d31 * d31 - d32.powi(4)
        + 2.0 * d32 * d32 * d31 * d31
        - d31.powi(4);
    let sq = rad.sqrt();
    let c4 = -2.0 * d21 * d21 * (r - 2.0) * (r - 2.0);
    let c3 = d21 * (r * r - 4.0) * sq;
    let c2 = -0.5 * d21.powi(4) * r.powi(3) + d21 * d21 * (1.5 * d21 * d21 + d32 * d32 + d31 * d31) * r * r
        - 4.0 * d21 * d21 * (d32 * d32 + d31 * d31) * r;
    let c1 = 0.25 * d21 * r * r * (2.0 * d21 * d21 * r - 3.0 * d21 * d21 - 2.0 * d32 * d32 - 2.0 * d31 * d31) * sq;
    let c0 = -0.125 * d21 * d21 * r.powi(3) * rad;
    [c4, c3, c2, c1, c0]
}
