//! Error signals, the distance + signed-area control law, and fixed-step
//! RK4 integration of the single-integrator closed loop.

use crate::error::{Error, Result};
use crate::formation::FormationSpec;
use crate::gains::GainSchedule;
use crate::geometry::{j_transpose_mul, signed_area, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub positions: Vec<Point>,
    pub time: f64,
}

impl AgentState {
    pub fn new(positions: Vec<Point>) -> Self {
        Self {
            positions,
            time: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.time.is_finite() && self.positions.iter().all(|p| p.x.is_finite() && p.y.is_finite())
    }
}

/// Squared-distance errors in edge order and signed-area errors in
/// triangle order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ErrorState {
    pub z: Vec<f64>,
    pub s: Vec<f64>,
}

impl ErrorState {
    pub fn max_abs_z(&self) -> f64 {
        self.z.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_s(&self) -> f64 {
        self.s.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_z().max(self.max_abs_s())
    }
}

pub fn errors(spec: &FormationSpec, positions: &[Point]) -> ErrorState {
    let z = spec
        .graph()
        .edges()
        .iter()
        .zip(spec.distances())
        .map(|(e, d)| (positions[e.source] - positions[e.sink]).norm_squared() - d * d)
        .collect();
    let s = spec
        .triangles()
        .iter()
        .zip(spec.areas())
        .map(|(t, s_star)| signed_area(&positions[t.i], &positions[t.j], &positions[t.k]) - s_star)
        .collect();
    ErrorState { z, s }
}

#[derive(Debug, Clone, Copy)]
enum AgentLaw {
    Leader,
    FirstFollower {
        sink: usize,
        d2: f64,
        alpha: f64,
    },
    Ordinary {
        i: usize,
        j: usize,
        d2_ki: f64,
        d2_kj: f64,
        s_star: f64,
        alpha: f64,
        beta: f64,
    },
}

/// The control law of every agent, resolved once from a spec and gains.
/// Each agent's input depends only on its relative positions to its two
/// out-neighbours (one for the first follower) and on desired quantities.
#[derive(Debug, Clone)]
pub struct Controller {
    laws: Vec<AgentLaw>,
}

impl Controller {
    pub fn new(spec: &FormationSpec, gains: &GainSchedule) -> Result<Self> {
        if gains.n() != spec.n() {
            return Err(Error::Validation(format!(
                "gain schedule is for {} agents, spec has {}",
                gains.n(),
                spec.n()
            )));
        }
        let g = spec.graph();
        let mut laws = vec![AgentLaw::Leader; spec.n()];
        let e21 = g.edge_index(1, 0).expect("validated graph has edge (2,1)");
        let d21 = spec.distances()[e21];
        laws[1] = AgentLaw::FirstFollower {
            sink: 0,
            d2: d21 * d21,
            alpha: gains.alpha(1),
        };
        for (t, s_star) in spec.triangles().iter().zip(spec.areas()) {
            let d_ki = spec.distances()[g.edge_index(t.k, t.i).expect("out-edge")];
            let d_kj = spec.distances()[g.edge_index(t.k, t.j).expect("out-edge")];
            laws[t.k] = AgentLaw::Ordinary {
                i: t.i,
                j: t.j,
                d2_ki: d_ki * d_ki,
                d2_kj: d_kj * d_kj,
                s_star: *s_star,
                alpha: gains.alpha(t.k),
                beta: gains.beta(t.k),
            };
        }
        Ok(Self { laws })
    }

    pub fn n(&self) -> usize {
        self.laws.len()
    }

    /// Velocity input of agent `k`.
    pub fn input(&self, k: usize, p: &[Point]) -> Point {
        match self.laws[k] {
            AgentLaw::Leader => Point::zeros(),
            AgentLaw::FirstFollower { sink, d2, alpha } => {
                let rel = p[k] - p[sink];
                let z = rel.norm_squared() - d2;
                -rel * (alpha * z)
            }
            AgentLaw::Ordinary {
                i,
                j,
                d2_ki,
                d2_kj,
                s_star,
                alpha,
                beta,
            } => {
                let rel_i = p[k] - p[i];
                let rel_j = p[k] - p[j];
                let z_ki = rel_i.norm_squared() - d2_ki;
                let z_kj = rel_j.norm_squared() - d2_kj;
                let s_err = signed_area(&p[i], &p[j], &p[k]) - s_star;
                -(rel_i * z_ki + rel_j * z_kj) * alpha
                    - j_transpose_mul(&(rel_i - rel_j)) * (beta * s_err)
            }
        }
    }

    pub fn velocities_into(&self, p: &[Point], out: &mut [Point]) {
        for (k, u) in out.iter_mut().enumerate() {
            *u = self.input(k, p);
        }
    }

    pub fn velocities(&self, p: &[Point]) -> Vec<Point> {
        let mut out = vec![Point::zeros(); p.len()];
        self.velocities_into(p, &mut out);
        out
    }
}

/// Velocity inputs for every agent at `state`.
pub fn control(spec: &FormationSpec, gains: &GainSchedule, state: &AgentState) -> Result<Vec<Point>> {
    check_len(spec, state)?;
    Ok(Controller::new(spec, gains)?.velocities(&state.positions))
}

fn check_len(spec: &FormationSpec, state: &AgentState) -> Result<()> {
    if state.positions.len() != spec.n() {
        return Err(Error::Validation(format!(
            "state has {} agents, spec has {}",
            state.positions.len(),
            spec.n()
        )));
    }
    Ok(())
}

/// Reusable RK4 stage buffers.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k1: Vec<Point>,
    k2: Vec<Point>,
    k3: Vec<Point>,
    k4: Vec<Point>,
    tmp: Vec<Point>,
}

impl Rk4 {
    pub fn new(n: usize) -> Self {
        let z = vec![Point::zeros(); n];
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }

    /// Advance `p` in place by one classical RK4 step of size `h`.
    pub fn step(&mut self, ctrl: &Controller, p: &mut [Point], h: f64) {
        let n = p.len();
        ctrl.velocities_into(p, &mut self.k1);
        for a in 0..n {
            self.tmp[a] = p[a] + self.k1[a] * (0.5 * h);
        }
        ctrl.velocities_into(&self.tmp, &mut self.k2);
        for a in 0..n {
            self.tmp[a] = p[a] + self.k2[a] * (0.5 * h);
        }
        ctrl.velocities_into(&self.tmp, &mut self.k3);
        for a in 0..n {
            self.tmp[a] = p[a] + self.k3[a] * h;
        }
        ctrl.velocities_into(&self.tmp, &mut self.k4);
        for a in 0..n {
            p[a] += (self.k1[a] + (self.k2[a] + self.k3[a]) * 2.0 + self.k4[a]) * (h / 6.0);
        }
    }
}

pub fn step_rk4(spec: &FormationSpec, gains: &GainSchedule, state: &AgentState, h: f64) -> Result<AgentState> {
    check_len(spec, state)?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Validation(format!("step size must be positive, got {h}")));
    }
    if !state.is_finite() {
        return Err(Error::Integration("state is not finite".into()));
    }
    let ctrl = Controller::new(spec, gains)?;
    let mut next = state.clone();
    Rk4::new(spec.n()).step(&ctrl, &mut next.positions, h);
    next.time += h;
    if !next.is_finite() {
        return Err(Error::Integration(format!(
            "state became non-finite at t = {}",
            next.time
        )));
    }
    Ok(next)
}

/// Closed-form leader / first-follower distance error
/// `d² z₀ / ((z₀ + d²) e^{2d²αt} − z₀)`, the solution of
/// `ż = −2α z (z + d²)`.
pub fn z21_closed_form(z0: f64, d21: f64, alpha2: f64, t: f64) -> Result<f64> {
    let d2 = d21 * d21;
    if z0 <= -d2 {
        return Err(Error::Domain(format!(
            "z21(0) = {z0} ≤ −d21² = {}: leader and first follower are collocated",
            -d2
        )));
    }
    if z0 == 0.0 {
        return Ok(0.0);
    }
    let growth = (2.0 * d2 * alpha2 * t).exp();
    Ok(d2 * z0 / (growth * (z0 + d2) - z0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovValues {
    /// One value per agent; the leader's is zero.
    pub per_agent: Vec<f64>,
    pub total: f64,
}

pub fn lyapunov_from_errors(spec: &FormationSpec, gains: &GainSchedule, err: &ErrorState) -> LyapunovValues {
    let g = spec.graph();
    let mut per_agent = vec![0.0; spec.n()];
    let e21 = g.edge_index(1, 0).expect("edge (2,1)");
    per_agent[1] = 0.25 * gains.alpha(1) * err.z[e21].powi(2);
    for (m, t) in spec.triangles().iter().enumerate() {
        let z_ki = err.z[g.edge_index(t.k, t.i).expect("out-edge")];
        let z_kj = err.z[g.edge_index(t.k, t.j).expect("out-edge")];
        per_agent[t.k] = 0.25 * gains.alpha(t.k) * (z_ki * z_ki + z_kj * z_kj)
            + gains.beta(t.k) * err.s[m].powi(2);
    }
    let total = per_agent.iter().sum();
    LyapunovValues { per_agent, total }
}

pub fn lyapunov(spec: &FormationSpec, gains: &GainSchedule, state: &AgentState) -> Result<LyapunovValues> {
    check_len(spec, state)?;
    Ok(lyapunov_from_errors(spec, gains, &errors(spec, &state.positions)))
}
