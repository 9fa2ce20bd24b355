//! Gain-ratio synthesis for the follower triangles.
//!
//! For a non-isosceles triangle the ratio `β/α` must keep the stationary
//! quartic free of real roots. The quartic discriminant quantities `Λ`, `P`
//! are expanded exactly as polynomials in the ratio `γ`; after removing the
//! known factors `γ⁶(γ − 2)²` and `(γ − 2)²` the remaining odd-degree
//! polynomials have positive leading coefficients whenever the shape
//! condition holds, so both are positive beyond their largest real roots.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formation::{FormationSpec, TriangleSides};
use crate::geometry::{heron_area, is_strict_triangle, triangle_shape_condition, triangle_shape_ratio, Point};
use crate::poly::Poly;

/// Relative threshold below which `|d_ki − d_kj|` counts as isosceles.
pub const ISOSCELES_REL_TOL: f64 = 1e-9;
/// Ratio floor applied when an isosceles bound is not positive.
pub const MIN_RATIO: f64 = 1e-3;
pub const DEFAULT_MARGIN: f64 = 0.1;
pub const DEFAULT_ALPHA: f64 = 1.0;

/// `a x⁴ + b x³ + c x² + d x + e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
}

impl QuarticCoefficients {
    pub fn new(a: f64, b: f64, c: f64, d: f64, e: f64) -> Self {
        Self { a, b, c, d, e }
    }

    pub fn to_poly(&self) -> Poly {
        Poly::new(vec![self.e, self.d, self.c, self.b, self.a])
    }

    pub fn eval(&self, x: f64) -> f64 {
        (((self.a * x + self.b) * x + self.c) * x + self.d) * x + self.e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantTriple {
    pub lambda: f64,
    pub p: f64,
    pub d: f64,
}

impl DiscriminantTriple {
    /// `Λ > 0 ∧ (P > 0 ∨ D > 0)`: the quartic has no real root.
    pub fn certifies_no_real_root(&self) -> bool {
        self.lambda > 0.0 && (self.p > 0.0 || self.d > 0.0)
    }

    /// The `Λ > 0 ∧ P > 0` branch used for gain synthesis.
    pub fn lambda_and_p_positive(&self) -> bool {
        self.lambda > 0.0 && self.p > 0.0
    }
}

trait Ring: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> {
    fn lift(c: f64) -> Self;
}

impl Ring for f64 {
    fn lift(c: f64) -> Self {
        c
    }
}

impl Ring for Poly {
    fn lift(c: f64) -> Self {
        Poly::constant(c)
    }
}

fn prod<T: Ring>(k: f64, factors: &[&T]) -> T {
    factors
        .iter()
        .fold(T::lift(k), |acc, f| acc * (*f).clone())
}

/// `(Λ, P, D)` over any commutative ring, so the same transcription serves
/// both pointwise evaluation and the expansion in `γ`.
fn discriminant_triple_generic<T: Ring>(a: &T, b: &T, c: &T, d: &T, e: &T) -> (T, T, T) {
    let terms: [(f64, [&T; 6]); 16] = [
        (256.0, [a, a, a, e, e, e]),
        (-192.0, [a, a, b, d, e, e]),
        (-128.0, [a, a, c, c, e, e]),
        (144.0, [a, a, c, d, d, e]),
        (-27.0, [a, a, d, d, d, d]),
        (144.0, [a, b, b, c, e, e]),
        (-6.0, [a, b, b, d, d, e]),
        (-80.0, [a, b, c, c, d, e]),
        (18.0, [a, b, c, d, d, d]),
        (16.0, [a, c, c, c, c, e]),
        (-4.0, [a, c, c, c, d, d]),
        (-27.0, [b, b, b, b, e, e]),
        (18.0, [b, b, b, c, d, e]),
        (-4.0, [b, b, b, d, d, d]),
        (-4.0, [b, b, c, c, c, e]),
        (1.0, [b, b, c, c, d, d]),
    ];
    let lambda = terms
        .iter()
        .fold(T::lift(0.0), |acc, (k, f)| acc + prod(*k, f));
    let p = prod(8.0, &[a, c]) - prod(3.0, &[b, b]);
    let disc_d = prod(64.0, &[a, a, a, e]) - prod(16.0, &[a, a, c, c]) + prod(16.0, &[a, b, b, c])
        - prod(16.0, &[a, a, b, d])
        - prod(3.0, &[b, b, b, b]);
    (lambda, p, disc_d)
}

pub fn discriminant_triple(q: &QuarticCoefficients) -> Result<DiscriminantTriple> {
    if q.a == 0.0 {
        return Err(Error::Domain("leading quartic coefficient is zero".into()));
    }
    let (lambda, p, d) = discriminant_triple_generic(&q.a, &q.b, &q.c, &q.d, &q.e);
    Ok(DiscriminantTriple { lambda, p, d })
}

/// `2δ₁²δ₂² − δ₁⁴ + 2δ₁²δ₃² − δ₂⁴ + 2δ₂²δ₃² − δ₃⁴`, evaluated in factored
/// form. Equals sixteen times the squared triangle area.
pub fn triangle_radicand(d1: f64, d2: f64, d3: f64) -> f64 {
    (d1 + d2 + d3) * (-d1 + d2 + d3) * (d1 - d2 + d3) * (d1 + d2 - d3)
}

fn checked_radicand(d1: f64, d2: f64, d3: f64) -> Result<f64> {
    let r = triangle_radicand(d1, d2, d3);
    if !is_strict_triangle(d1, d2, d3) || r <= 0.0 {
        return Err(Error::Domain(format!(
            "lengths ({d1}, {d2}, {d3}) do not form a nondegenerate triangle"
        )));
    }
    Ok(r)
}

/// Stationary-point quartic in the follower's canonical ordinate, for side
/// lengths `δ₁` (base), `δ₂`, `δ₃` and gain ratio `γ`.
pub fn corollary_quartic(d1: f64, d2: f64, d3: f64, gamma: f64) -> Result<QuarticCoefficients> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!("gain ratio must be positive, got {gamma}")));
    }
    let r = checked_radicand(d1, d2, d3)?;
    let s = r.sqrt();
    let (d1s, d2s, d3s) = (d1 * d1, d2 * d2, d3 * d3);
    let g = gamma;
    Ok(QuarticCoefficients {
        a: -2.0 * d1s * (g - 2.0).powi(2),
        b: d1 * (g * g - 4.0) * s,
        c: -0.5 * d1s * d1s * g.powi(3) + d1s * (1.5 * d1s + d2s + d3s) * g * g
            - 4.0 * d1s * (d2s + d3s) * g,
        d: 0.25 * d1 * g * g * (2.0 * d1s * g - 3.0 * d1s - 2.0 * d2s - 2.0 * d3s) * s,
        e: -0.125 * d1s * g.powi(3) * r,
    })
}

/// The quartic coefficients as polynomials in `γ`, ordered `a, b, c, d, e`.
pub fn follower_quartic_in_gamma(d1: f64, d2: f64, d3: f64) -> Result<[Poly; 5]> {
    let r = checked_radicand(d1, d2, d3)?;
    let s = r.sqrt();
    let (d1s, d2s, d3s) = (d1 * d1, d2 * d2, d3 * d3);
    let g_minus_2 = Poly::new(vec![-2.0, 1.0]);
    Ok([
        g_minus_2.pow(2).scale(-2.0 * d1s),
        Poly::new(vec![-4.0, 0.0, 1.0]).scale(d1 * s),
        Poly::new(vec![
            0.0,
            -4.0 * d1s * (d2s + d3s),
            d1s * (1.5 * d1s + d2s + d3s),
            -0.5 * d1s * d1s,
        ]),
        Poly::new(vec![
            0.0,
            0.0,
            -0.25 * d1 * s * (3.0 * d1s + 2.0 * d2s + 2.0 * d3s),
            0.5 * d1 * d1s * s,
        ]),
        Poly::new(vec![0.0, 0.0, 0.0, -0.125 * d1s * r]),
    ])
}

/// `Λ(γ)`, `P(γ)`, `D(γ)` and the reduced factors
/// `Λ = γ⁶(γ − 2)² Λ_r`, `P = (γ − 2)² P_r`.
#[derive(Debug, Clone)]
pub struct DiscriminantPolys {
    pub lambda: Poly,
    pub p: Poly,
    pub d: Poly,
    pub lambda_reduced: Poly,
    pub p_reduced: Poly,
    /// Largest magnitude among the remainders dropped by the reductions,
    /// relative to the largest coefficient of the unreduced polynomial.
    pub reduction_residual: f64,
}

pub fn discriminant_polys(d1: f64, d2: f64, d3: f64) -> Result<DiscriminantPolys> {
    let [a, b, c, d, e] = follower_quartic_in_gamma(d1, d2, d3)?;
    let (lambda, p, disc_d) = discriminant_triple_generic(&a, &b, &c, &d, &e);

    let max_abs = |q: &Poly| q.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs()));
    // Exact degrees are 15 and 5; higher terms are cancellation noise.
    let (lambda, lam_high) = lambda.truncate(15);
    let (p, p_high) = p.truncate(5);
    let (shifted, low) = lambda.shift_down(6);
    let (l1, r1) = shifted.deflate(2.0);
    let (lambda_reduced, r2) = l1.deflate(2.0);
    let (p1, r3) = p.deflate(2.0);
    let (p_reduced, r4) = p1.deflate(2.0);

    let lam_scale = max_abs(&lambda).max(f64::MIN_POSITIVE);
    let p_scale = max_abs(&p).max(f64::MIN_POSITIVE);
    let lam_res = low
        .iter()
        .chain(&lam_high)
        .chain([r1, r2].iter())
        .fold(0.0f64, |m, c| m.max(c.abs()))
        / lam_scale;
    let p_res = p_high
        .iter()
        .chain([r3, r4].iter())
        .fold(0.0f64, |m, c| m.max(c.abs()))
        / p_scale;

    Ok(DiscriminantPolys {
        lambda,
        p,
        d: disc_d,
        lambda_reduced,
        p_reduced,
        reduction_residual: lam_res.max(p_res),
    })
}

pub fn has_real_root(q: &QuarticCoefficients) -> bool {
    q.to_poly().has_real_root()
}

/// Lower bound on the gain ratio for a non-isosceles triangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaBound {
    /// `max{γ₁*, γ₂*}`.
    pub gamma_bar: f64,
    /// Largest real root of the reduced `Λ` factor.
    pub lambda_root: f64,
    /// Largest real root of the reduced `P` factor.
    pub p_root: f64,
}

impl GammaBound {
    /// `max{γ̄, 2}`: ratios strictly above this value are admissible.
    pub fn threshold(&self) -> f64 {
        self.gamma_bar.max(2.0)
    }
}

/// `γ̄` for the triangle with base `δ₁` and legs `δ₂`, `δ₃`.
pub fn gamma_lower_bound(d1: f64, d2: f64, d3: f64) -> Result<GammaBound> {
    checked_radicand(d1, d2, d3)?;
    if (d2 - d3).abs() <= ISOSCELES_REL_TOL * d2.max(d3) {
        return Err(Error::Domain(format!(
            "legs {d2} and {d3} are equal; use the isosceles bound"
        )));
    }
    if !triangle_shape_condition(d1, d3, d2) {
        return Err(Error::Domain(format!(
            "shape condition fails: |(δ3² − δ2²)/δ1²| = {:.6} ≥ 2√2",
            triangle_shape_ratio(d1, d3, d2)
        )));
    }
    let polys = discriminant_polys(d1, d2, d3)?;
    let lambda_root = polys.lambda_reduced.largest_real_root();
    let p_root = polys.p_reduced.largest_real_root();
    match (lambda_root, p_root) {
        (Some(lambda_root), Some(p_root)) => Ok(GammaBound {
            gamma_bar: lambda_root.max(p_root),
            lambda_root,
            p_root,
        }),
        _ => Err(Error::Domain(format!(
            "no real root found for the reduced discriminant factors of ({d1}, {d2}, {d3})"
        ))),
    }
}

/// `(d_kj² − d_ji²/4) / d_ji²` for a triangle with `d_ki = d_kj`.
pub fn isosceles_bound(d_ji: f64, d_kj: f64) -> Result<f64> {
    if !(d_ji > 0.0 && d_kj > 0.0 && 2.0 * d_kj > d_ji) {
        return Err(Error::Domain(format!(
            "isosceles triangle with base {d_ji} and legs {d_kj} is not valid"
        )));
    }
    Ok((d_kj * d_kj - 0.25 * d_ji * d_ji) / (d_ji * d_ji))
}

fn is_isosceles(sides: &TriangleSides) -> bool {
    (sides.d_ki - sides.d_kj).abs() <= ISOSCELES_REL_TOL * sides.d_ki.max(sides.d_kj)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Isosceles,
    Quartic,
    /// Shape condition fails; no ratio is guaranteed.
    Unguaranteed,
}

/// Per-triangle summary of the gain-ratio bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleBound {
    pub triangle: [usize; 3],
    pub d_ji: f64,
    pub d_ki: f64,
    pub d_kj: f64,
    pub shape_ratio: f64,
    pub shape_ok: bool,
    pub kind: BoundKind,
    pub gamma_bar: Option<f64>,
    /// Ratio the gains must strictly exceed.
    pub bound: Option<f64>,
}

pub fn triangle_bound(label: [usize; 3], sides: TriangleSides) -> Result<TriangleBound> {
    let TriangleSides { d_ji, d_ki, d_kj } = sides;
    let shape_ratio = triangle_shape_ratio(d_ji, d_ki, d_kj);
    let shape_ok = triangle_shape_condition(d_ji, d_ki, d_kj);
    let (kind, gamma_bar, bound) = if is_isosceles(&sides) {
        (BoundKind::Isosceles, None, Some(isosceles_bound(d_ji, d_kj)?))
    } else if shape_ok {
        let g = gamma_lower_bound(d_ji, d_kj, d_ki)?;
        (BoundKind::Quartic, Some(g.gamma_bar), Some(g.threshold()))
    } else {
        (BoundKind::Unguaranteed, None, None)
    };
    Ok(TriangleBound {
        triangle: label,
        d_ji,
        d_ki,
        d_kj,
        shape_ratio,
        shape_ok,
        kind,
        gamma_bar,
        bound,
    })
}

pub fn bound_table(spec: &FormationSpec) -> Result<Vec<TriangleBound>> {
    spec.triangles()
        .iter()
        .enumerate()
        .map(|(m, t)| {
            let l = t.label();
            triangle_bound([l.0, l.1, l.2], spec.sides(m))
        })
        .collect()
}

/// Where a follower's ratio came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GainSource {
    FirstFollower,
    Isosceles { bound: f64 },
    Quartic { gamma_bar: f64, bound: f64 },
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentGain {
    /// 1-based agent label.
    pub agent: usize,
    pub alpha: f64,
    pub beta: f64,
    pub source: GainSource,
}

/// Gains for agents `2..=n`. The leader has none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainSchedule {
    n: usize,
    gains: Vec<AgentGain>,
}

impl GainSchedule {
    /// `alphas`, `betas` hold one entry per agent `2..=n`; `betas[0]` is
    /// ignored.
    pub fn explicit(n: usize, alphas: &[f64], betas: &[f64]) -> Result<Self> {
        if n < 2 || alphas.len() != n - 1 || betas.len() != n - 1 {
            return Err(Error::Validation(format!(
                "explicit gains need {} alphas and betas (agents 2..={n})",
                n.saturating_sub(1)
            )));
        }
        let mut gains = Vec::with_capacity(n - 1);
        for (idx, (&alpha, &beta)) in alphas.iter().zip(betas).enumerate() {
            let agent = idx + 2;
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::Validation(format!("alpha_{agent} = {alpha} must be > 0")));
            }
            if !(beta >= 0.0 && beta.is_finite()) {
                return Err(Error::Validation(format!("beta_{agent} = {beta} must be >= 0")));
            }
            let (beta, source) = if agent == 2 {
                (0.0, GainSource::FirstFollower)
            } else {
                (beta, GainSource::Explicit)
            };
            gains.push(AgentGain {
                agent,
                alpha,
                beta,
                source,
            });
        }
        Ok(Self { n, gains })
    }

    /// Same `α` for every follower and `β = ratio · α` for every ordinary
    /// follower.
    pub fn uniform_ratio(n: usize, alpha: f64, ratio: f64) -> Result<Self> {
        let alphas = vec![alpha; n.saturating_sub(1)];
        let betas: Vec<f64> = alphas.iter().map(|a| a * ratio).collect();
        Self::explicit(n, &alphas, &betas)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[AgentGain] {
        &self.gains
    }

    /// Gains of the 0-based agent index `k ≥ 1`.
    pub fn get(&self, k: usize) -> Option<&AgentGain> {
        k.checked_sub(1).and_then(|idx| self.gains.get(idx))
    }

    pub fn alpha(&self, k: usize) -> f64 {
        self.get(k).map_or(0.0, |g| g.alpha)
    }

    pub fn beta(&self, k: usize) -> f64 {
        self.get(k).map_or(0.0, |g| g.beta)
    }

    pub fn ratio(&self, k: usize) -> Option<f64> {
        self.get(k).filter(|_| k >= 2).map(|g| g.beta / g.alpha)
    }
}

/// Gains that clear every triangle's bound by the relative `margin`.
pub fn recommended_schedule(spec: &FormationSpec, alpha: f64, margin: f64) -> Result<GainSchedule> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Validation(format!("alpha must be > 0, got {alpha}")));
    }
    if !(margin > 0.0 && margin.is_finite()) {
        return Err(Error::Validation(format!("margin must be > 0, got {margin}")));
    }
    let table = bound_table(spec)?;
    let offenders: Vec<String> = table
        .iter()
        .filter(|row| !row.shape_ok)
        .map(|row| {
            format!(
                "({},{},{}) ratio {:.4}",
                row.triangle[0], row.triangle[1], row.triangle[2], row.shape_ratio
            )
        })
        .collect();
    if !offenders.is_empty() {
        return Err(Error::Spec(format!(
            "shape condition |(d_ki² − d_kj²)/d_ji²| < 2√2 fails for triangle(s) {}",
            offenders.join(", ")
        )));
    }

    let mut gains = vec![AgentGain {
        agent: 2,
        alpha,
        beta: 0.0,
        source: GainSource::FirstFollower,
    }];
    for row in &table {
        let bound = row.bound.expect("shape condition holds");
        let (ratio, source) = match row.kind {
            BoundKind::Isosceles => {
                let ratio = if bound > 0.0 {
                    bound * (1.0 + margin)
                } else {
                    MIN_RATIO
                };
                (ratio, GainSource::Isosceles { bound })
            }
            _ => (
                bound * (1.0 + margin),
                GainSource::Quartic {
                    gamma_bar: row.gamma_bar.unwrap_or(bound),
                    bound,
                },
            ),
        };
        gains.push(AgentGain {
            agent: row.triangle[2],
            alpha,
            beta: ratio * alpha,
            source,
        });
    }
    Ok(GainSchedule {
        n: spec.n(),
        gains,
    })
}

fn stationary_residuals(x: f64, y: f64, d21: f64, d31: f64, d32: f64, s: f64, ratio: f64) -> (f64, f64, f64) {
    let k = 0.5 * d21 * d21 - d32 * d32 - d31 * d31;
    let rad = 2.0 * x * x + 2.0 * y * y + k;
    let f1 = rad * x + 0.5 * d21 * (2.0 * d21 * x - d31 * d31 + d32 * d32);
    let f2 = rad * y + ratio * (0.5 * d21 * d21 * y - d21 * s);
    let scale = (2.0 * x * x + 2.0 * y * y + k.abs()) * (x.abs() + y.abs())
        + 0.5 * d21 * (2.0 * d21 * x.abs() + d31 * d31 + d32 * d32)
        + ratio * (0.5 * d21 * d21 * y.abs() + d21 * s.abs());
    (f1, f2, scale.max(f64::MIN_POSITIVE))
}

/// All points where the follower's Lyapunov derivative vanishes, with the
/// base agents placed at `(∓d21/2, 0)`. The desired position is always the
/// first entry.
pub fn stationary_points(d21: f64, d31: f64, d32: f64, s_star: f64, ratio: f64) -> Result<Vec<Point>> {
    checked_radicand(d21, d31, d32)?;
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::Domain(format!("gain ratio must be positive, got {ratio}")));
    }
    let area = heron_area(d21, d31, d32).expect("checked triangle");
    if s_star == 0.0 || ((s_star.abs() - area) / area).abs() > 1e-6 {
        return Err(Error::Domain(format!(
            "signed area {s_star} does not match the triangle area {area}"
        )));
    }
    let sigma = s_star.signum();
    let s_abs = s_star.abs();
    let desired = Point::new((d31 * d31 - d32 * d32) / (2.0 * d21), 2.0 * s_star / d21);

    // candidates in the mirrored frame where the area is positive
    let mut candidates: Vec<(f64, f64)> = Vec::new();
    if (d31 - d32).abs() <= ISOSCELES_REL_TOL * d31.max(d32) {
        let root = (4.0 * d32 * d32 - d21 * d21).sqrt();
        for y in Poly::new(vec![2.0 * ratio * d21 * d21, 4.0 * root, 8.0]).real_roots() {
            candidates.push((0.0, y));
        }
        if ratio != 2.0 {
            let y = ratio * root / (2.0 * (ratio - 2.0));
            let x2 = d32 * d32 - 0.75 * d21 * d21 - y * y;
            if x2 >= 0.0 {
                let x = x2.sqrt();
                candidates.push((x, y));
                candidates.push((-x, y));
            }
        }
    } else {
        let q = corollary_quartic(d21, d32, d31, ratio)?;
        for y in q.to_poly().real_roots() {
            if y == 0.0 {
                continue;
            }
            let denom = d21 * d21 - 0.5 * ratio * d21 * d21 + ratio * d21 * s_abs / y;
            if denom == 0.0 {
                continue;
            }
            let x = 0.5 * d21 * (d31 * d31 - d32 * d32) / denom;
            candidates.push((x, y));
        }
    }

    let scale = d21.max(d31).max(d32);
    let mut out = vec![desired];
    for (x, y) in candidates {
        let p = Point::new(x, sigma * y);
        let (f1, f2, sc) = stationary_residuals(p.x, p.y, d21, d31, d32, s_star, ratio);
        if f1.abs() > 1e-8 * sc || f2.abs() > 1e-8 * sc {
            continue;
        }
        if out.iter().all(|q| (q - p).norm() > 1e-7 * scale) {
            out.push(p);
        }
    }
    out[1..].sort_by(|a, b| a.y.total_cmp(&b.y).then(a.x.total_cmp(&b.x)));
    Ok(out)
}

/// Maximal sub-intervals of `(lo, hi)` on which the stationary quartic of
/// the triangle has no real root, located on a grid of `step` and refined
/// by bisection.
pub fn admissible_ratio_windows(sides: TriangleSides, lo: f64, hi: f64, step: f64) -> Result<Vec<(f64, f64)>> {
    if !(lo > 0.0 && hi > lo && step > 0.0) {
        return Err(Error::Domain(format!(
            "bad scan range ({lo}, {hi}) with step {step}"
        )));
    }
    let TriangleSides { d_ji, d_ki, d_kj } = sides;
    checked_radicand(d_ji, d_kj, d_ki)?;
    let free = |g: f64| -> bool {
        corollary_quartic(d_ji, d_kj, d_ki, g)
            .map(|q| !has_real_root(&q))
            .unwrap_or(false)
    };
    let refine = |mut a: f64, mut b: f64, free_at_a: bool| -> f64 {
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if free(m) == free_at_a {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };

    let steps = ((hi - lo) / step).ceil() as usize;
    let grid: Vec<f64> = (0..=steps).map(|i| (lo + i as f64 * step).min(hi)).collect();
    let mut windows = Vec::new();
    let mut start: Option<f64> = None;
    let mut prev = (grid[0], free(grid[0]));
    if prev.1 {
        start = Some(grid[0]);
    }
    for &g in &grid[1..] {
        let f = free(g);
        if f != prev.1 {
            let edge = refine(prev.0, g, prev.1);
            if f {
                start = Some(edge);
            } else if let Some(s) = start.take() {
                windows.push((s, edge));
            }
        }
        prev = (g, f);
    }
    if let Some(s) = start {
        windows.push((s, hi));
    }
    Ok(windows)
}
