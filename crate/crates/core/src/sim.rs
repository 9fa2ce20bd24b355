//! Closed-loop simulation with a finite-time convergence proxy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{errors, lyapunov_from_errors, AgentState, Controller, ErrorState, Rk4};
use crate::error::{Error, Result};
use crate::formation::FormationSpec;
use crate::gains::GainSchedule;
use crate::geometry::{strongly_congruent, Point, DEFAULT_TOL};
use crate::rigidity::Framework;

pub const DEFAULT_STEP: f64 = 1e-3;
pub const DEFAULT_HORIZON: f64 = 200.0;
pub const DEFAULT_EPS: f64 = 1e-6;
pub const DEFAULT_SUSTAIN: usize = 100;
pub const DEFAULT_DECIMATION: usize = 10;
/// Minimum leader / first-follower separation enforced by random sampling.
pub const MIN_LEADER_GAP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ConvergedStrongCongruent,
    /// Settled with zero distance error but a different area vector.
    ConvergedOther,
    NotConverged,
    Diverged,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::ConvergedStrongCongruent => "converged-strong-congruent",
            Verdict::ConvergedOther => "converged-other",
            Verdict::NotConverged => "not-converged",
            Verdict::Diverged => "diverged",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOptions {
    pub h: f64,
    pub t_final: f64,
    pub eps: f64,
    /// Consecutive steps the errors must stay below `eps`.
    pub sustain: usize,
    /// Keep every `n`-th step in the trajectory; `None` keeps only the
    /// endpoints.
    pub record_every: Option<usize>,
    pub override_collocated: bool,
    /// Halve the step and retry once if the state blows up.
    pub retry_on_divergence: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            h: DEFAULT_STEP,
            t_final: DEFAULT_HORIZON,
            eps: DEFAULT_EPS,
            sustain: DEFAULT_SUSTAIN,
            record_every: Some(DEFAULT_DECIMATION),
            override_collocated: false,
            retry_on_divergence: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub positions: Vec<Vec<Point>>,
    pub errors: Vec<ErrorState>,
    pub lyapunov: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn push(&mut self, t: f64, p: &[Point], err: ErrorState, v: f64) {
        self.times.push(t);
        self.positions.push(p.to_vec());
        self.errors.push(err);
        self.lyapunov.push(v);
    }
}

#[derive(Debug, Clone)]
pub struct SimOutcome {
    pub verdict: Verdict,
    pub trajectory: Trajectory,
    pub final_state: AgentState,
    pub final_errors: ErrorState,
    /// Start of the sustained window below `eps`, when convergence occurred.
    pub time_to_threshold: Option<f64>,
    pub h_used: f64,
    pub retried: bool,
    pub steps: usize,
}

fn validate_options(opts: &SimOptions) -> Result<()> {
    let pos = |v: f64| v > 0.0 && v.is_finite();
    if !pos(opts.h) || !pos(opts.t_final) || !pos(opts.eps) {
        return Err(Error::Validation(format!(
            "h, T and eps must be positive (h = {}, T = {}, eps = {})",
            opts.h, opts.t_final, opts.eps
        )));
    }
    if opts.sustain == 0 || opts.record_every == Some(0) {
        return Err(Error::Validation("sustain and decimation must be at least 1".into()));
    }
    Ok(())
}

pub fn leaders_collocated(positions: &[Point]) -> bool {
    positions.len() >= 2 && positions[0] == positions[1]
}

pub fn simulate(
    spec: &FormationSpec,
    gains: &GainSchedule,
    initial: &AgentState,
    opts: &SimOptions,
) -> Result<SimOutcome> {
    validate_options(opts)?;
    if initial.positions.len() != spec.n() {
        return Err(Error::Validation(format!(
            "initial state has {} agents, spec has {}",
            initial.positions.len(),
            spec.n()
        )));
    }
    if !initial.is_finite() {
        return Err(Error::Validation("initial state is not finite".into()));
    }
    if leaders_collocated(&initial.positions) {
        if !opts.override_collocated {
            return Err(Error::Spec(
                "agents 1 and 2 start collocated; they would never move".into(),
            ));
        }
        log::warn!("agents 1 and 2 start collocated; simulating anyway");
    }
    let ctrl = Controller::new(spec, gains)?;

    let first = run(spec, gains, &ctrl, initial, opts, opts.h);
    if first.verdict == Verdict::Diverged && opts.retry_on_divergence {
        log::warn!("diverged with h = {}; retrying with h = {}", opts.h, opts.h / 2.0);
        let mut second = run(spec, gains, &ctrl, initial, opts, opts.h / 2.0);
        second.retried = true;
        return Ok(second);
    }
    Ok(first)
}

fn run(
    spec: &FormationSpec,
    gains: &GainSchedule,
    ctrl: &Controller,
    initial: &AgentState,
    opts: &SimOptions,
    h: f64,
) -> SimOutcome {
    let n = spec.n();
    let mut rk = Rk4::new(n);
    let mut p = initial.positions.clone();
    let mut prev = p.clone();
    let mut vel = vec![Point::zeros(); n];
    let t0 = initial.time;
    let steps = (opts.t_final / h).ceil() as usize;

    let mut traj = Trajectory::default();
    let err0 = errors(spec, &p);
    let v0 = lyapunov_from_errors(spec, gains, &err0).total;
    traj.push(t0, &p, err0.clone(), v0);
    let mut last_err = err0;
    let mut last_recorded = 0usize;

    let mut streak = 0usize;
    let mut settle = 0usize;
    let mut window_start = t0;
    let mut outcome: Option<bool> = None; // Some(true) converged, Some(false) settled
    let mut done_steps = 0usize;

    for step in 1..=steps {
        prev.copy_from_slice(&p);
        rk.step(ctrl, &mut p, h);
        let t = t0 + step as f64 * h;
        if !p.iter().all(|q| q.x.is_finite() && q.y.is_finite()) {
            let err = errors(spec, &prev);
            let state = AgentState {
                positions: prev.clone(),
                time: t - h,
            };
            if last_recorded != step - 1 {
                let v = lyapunov_from_errors(spec, gains, &err).total;
                traj.push(t - h, &prev, err.clone(), v);
            }
            return SimOutcome {
                verdict: Verdict::Diverged,
                trajectory: traj,
                final_state: state,
                final_errors: err,
                time_to_threshold: None,
                h_used: h,
                retried: false,
                steps: step - 1,
            };
        }
        let err = errors(spec, &p);
        let z_ok = err.max_abs_z() < opts.eps;
        if z_ok && err.max_abs_s() < opts.eps {
            if streak == 0 {
                window_start = t;
            }
            streak += 1;
        } else {
            streak = 0;
        }
        if z_ok {
            ctrl.velocities_into(&p, &mut vel);
            let speed = vel.iter().fold(0.0f64, |m, u| m.max(u.norm()));
            if speed < opts.eps {
                settle += 1;
            } else {
                settle = 0;
            }
        } else {
            settle = 0;
        }

        if opts.record_every.is_some_and(|every| step % every == 0) {
            let v = lyapunov_from_errors(spec, gains, &err).total;
            traj.push(t, &p, err.clone(), v);
            last_recorded = step;
        }
        last_err = err;
        done_steps = step;
        if streak >= opts.sustain {
            outcome = Some(true);
            break;
        }
        if settle >= opts.sustain {
            outcome = Some(false);
            break;
        }
    }

    let t_end = t0 + done_steps as f64 * h;
    if last_recorded != done_steps {
        let v = lyapunov_from_errors(spec, gains, &last_err).total;
        traj.push(t_end, &p, last_err.clone(), v);
    }

    let verdict = match outcome {
        None => Verdict::NotConverged,
        Some(_) => {
            if final_is_strongly_congruent(spec, &p, opts.eps) {
                Verdict::ConvergedStrongCongruent
            } else {
                Verdict::ConvergedOther
            }
        }
    };
    SimOutcome {
        verdict,
        trajectory: traj,
        final_state: AgentState {
            positions: p,
            time: t_end,
        },
        final_errors: last_err,
        time_to_threshold: (outcome == Some(true)).then_some(window_start),
        h_used: h,
        retried: false,
        steps: done_steps,
    }
}

/// Independent check of a final configuration against the desired
/// embedding: equal edge lengths and equal area vectors.
pub fn final_is_strongly_congruent(spec: &FormationSpec, positions: &[Point], eps: f64) -> bool {
    let Ok(actual) = Framework::new(spec.graph().clone(), positions.to_vec()) else {
        return false;
    };
    strongly_congruent(&actual, &spec.desired_framework(), spec.triangles(), eps.max(DEFAULT_TOL))
        .unwrap_or(false)
}

/// Axis-aligned sampling box `[x_min, x_max] × [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl SampleBox {
    pub fn square(half_width: f64) -> Self {
        Self {
            x_min: -half_width,
            x_max: half_width,
            y_min: -half_width,
            y_max: half_width,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite())
            && self.x_max > self.x_min
            && self.y_max > self.y_min;
        if !ok {
            return Err(Error::Validation(format!("empty or non-finite sampling box {self:?}")));
        }
        Ok(())
    }
}

/// Uniform random initial positions; agent 2 is resampled until it is at
/// least [`MIN_LEADER_GAP`] away from agent 1.
pub fn sample_initial(n: usize, bbox: &SampleBox, seed: u64) -> Result<AgentState> {
    bbox.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        Point::new(
            rng.gen_range(bbox.x_min..bbox.x_max),
            rng.gen_range(bbox.y_min..bbox.y_max),
        )
    };
    let mut positions: Vec<Point> = (0..n).map(|_| draw(&mut rng)).collect();
    while n >= 2 && (positions[1] - positions[0]).norm() < MIN_LEADER_GAP {
        positions[1] = draw(&mut rng);
    }
    Ok(AgentState::new(positions))
}
