//! Command implementations behind the `formctl` binary. Each command
//! returns a serializable report; the binary prints it and maps it to an
//! exit code.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{InitialConfig, ScenarioConfig};
use crate::csvio::{read_trajectory_file, write_errors_file, write_trajectory_file};
use crate::dynamics::errors;
use crate::error::{Error, Result};
use crate::formation::FormationSpec;
use crate::gains::{bound_table, AgentGain, BoundKind, GainSchedule, TriangleBound};
use crate::geometry::{approx_eq, chi, equivalent, DEFAULT_TOL};
use crate::graph::validate_conditions;
use crate::rigidity::Framework;
use crate::sim::{simulate, SimOptions, SimOutcome, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_SPEC: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_DIVERGED: i32 = 4;
pub const EXIT_IO_PARSE: i32 = 64;

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "FORMCTL_THREADS";

pub fn exit_code_for_error(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Config(_) | Error::Io(_) => EXIT_IO_PARSE,
        Error::Validation(_) | Error::Domain(_) | Error::Spec(_) => EXIT_INVALID_SPEC,
        Error::Integration(_) => EXIT_DIVERGED,
    }
}

pub fn exit_code_for_verdict(v: Verdict) -> i32 {
    match v {
        Verdict::ConvergedStrongCongruent => EXIT_OK,
        Verdict::ConvergedOther | Verdict::NotConverged => EXIT_NOT_CONVERGED,
        Verdict::Diverged => EXIT_DIVERGED,
    }
}

// ---------------------------------------------------------------- validate

#[derive(Debug, Clone, Serialize)]
pub struct ValidateReport {
    pub n: usize,
    pub edge_count: usize,
    pub edge_count_ok: bool,
    pub condition1: bool,
    pub condition2: bool,
    pub violations: Vec<String>,
    pub triangles: Vec<TriangleBound>,
    pub passed: bool,
}

impl ValidateReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_INVALID_SPEC
        }
    }
}

/// Graph conditions, triangle inequality and the shape condition for every
/// triangle. Unrealizable distances surface as a spec error.
pub fn validate(cfg: &ScenarioConfig) -> Result<ValidateReport> {
    let graph = cfg.build_graph()?;
    let report = validate_conditions(&graph);
    let mut violations = report.violations.clone();
    let mut triangles = Vec::new();
    if report.passed() {
        let spec = cfg.build_spec()?;
        triangles = bound_table(&spec)?;
        for t in &triangles {
            if !t.shape_ok {
                violations.push(format!(
                    "triangle {} with sides ({}, {}, {}): shape ratio {:.4} is not below 2*sqrt(2)",
                    label(&t.triangle),
                    t.d_ji,
                    t.d_ki,
                    t.d_kj,
                    t.shape_ratio
                ));
            }
        }
    }
    Ok(ValidateReport {
        n: graph.n(),
        edge_count: graph.edges().len(),
        edge_count_ok: report.edge_count,
        condition1: report.condition1,
        condition2: report.condition2,
        passed: violations.is_empty(),
        violations,
        triangles,
    })
}

pub fn label(t: &[usize; 3]) -> String {
    format!("({},{},{})", t[0], t[1], t[2])
}

// ------------------------------------------------------------------- gains

#[derive(Debug, Clone, Serialize)]
pub struct GainRow {
    pub triangle: [usize; 3],
    pub agent: usize,
    pub branch: BoundKind,
    pub gamma_bar: Option<f64>,
    pub bound: Option<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub ratio: f64,
    /// Chosen ratio strictly exceeds the bound.
    pub guaranteed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GainsReport {
    pub rows: Vec<GainRow>,
    pub schedule: Vec<AgentGain>,
}

fn gain_rows(spec: &FormationSpec, gains: &GainSchedule) -> Result<Vec<GainRow>> {
    let table = bound_table(spec)?;
    Ok(table
        .into_iter()
        .map(|t| {
            let k = t.triangle[2] - 1;
            let (alpha, beta) = (gains.alpha(k), gains.beta(k));
            let ratio = beta / alpha;
            GainRow {
                triangle: t.triangle,
                agent: t.triangle[2],
                branch: t.kind,
                gamma_bar: t.gamma_bar,
                bound: t.bound,
                alpha,
                beta,
                ratio,
                guaranteed: t.bound.is_some_and(|b| ratio > b),
            }
        })
        .collect())
}

pub fn gains(cfg: &ScenarioConfig) -> Result<GainsReport> {
    let spec = cfg.build_spec()?;
    let schedule = cfg.build_gains(&spec)?;
    Ok(GainsReport {
        rows: gain_rows(&spec, &schedule)?,
        schedule: schedule.entries().to_vec(),
    })
}

// ---------------------------------------------------------------- simulate

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub verdict: Verdict,
    pub seed: Option<u64>,
    pub final_time: f64,
    pub final_max_abs_z: f64,
    pub final_max_abs_s: f64,
    pub time_to_threshold: Option<f64>,
    pub eps: f64,
    pub h_used: f64,
    pub retried: bool,
    pub steps: usize,
    pub samples: usize,
    pub gains: Vec<GainRow>,
}

impl RunSummary {
    fn from_outcome(out: &SimOutcome, seed: Option<u64>, eps: f64, gains: Vec<GainRow>) -> Self {
        Self {
            verdict: out.verdict,
            seed,
            final_time: out.final_state.time,
            final_max_abs_z: out.final_errors.max_abs_z(),
            final_max_abs_s: out.final_errors.max_abs_s(),
            time_to_threshold: out.time_to_threshold,
            eps,
            h_used: out.h_used,
            retried: out.retried,
            steps: out.steps,
            samples: out.trajectory.len(),
            gains,
        }
    }

    pub fn exit_code(&self) -> i32 {
        exit_code_for_verdict(self.verdict)
    }
}

pub struct SimulateArgs<'a> {
    pub out_dir: &'a Path,
    pub seed: Option<u64>,
    pub override_collocated: bool,
}

/// One run. Random initial conditions use `seed` or the configured base
/// seed. Writes `trajectory.csv`, `errors.csv` and `summary.json`.
pub fn simulate_to_dir(cfg: &ScenarioConfig, args: &SimulateArgs) -> Result<RunSummary> {
    let spec = cfg.build_spec()?;
    let gains = cfg.build_gains(&spec)?;
    let seed = match &cfg.initial {
        InitialConfig::Random { seed: base, .. } => Some(args.seed.unwrap_or(*base)),
        InitialConfig::Explicit { .. } => None,
    };
    let initial = cfg.initial_state(seed.unwrap_or(0))?;
    let opts = cfg.sim_options(args.override_collocated, true);
    let out = simulate(&spec, &gains, &initial, &opts)?;

    std::fs::create_dir_all(args.out_dir)?;
    write_trajectory_file(&args.out_dir.join("trajectory.csv"), &out.trajectory, spec.n())?;
    write_errors_file(&args.out_dir.join("errors.csv"), &out.trajectory, &spec)?;
    let summary = RunSummary::from_outcome(&out, seed, opts.eps, gain_rows(&spec, &gains)?);
    write_json(&args.out_dir.join("summary.json"), &summary)?;
    Ok(summary)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

// ------------------------------------------------------------------- sweep

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedResult {
    pub seed: u64,
    pub verdict: Verdict,
    pub time_to_threshold: Option<f64>,
    pub final_max_abs_z: f64,
    pub final_max_abs_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub runs: usize,
    pub verdict_counts: BTreeMap<Verdict, usize>,
    pub worst_time_to_threshold: Option<f64>,
    /// Seeds whose verdict is not strong congruence, in run order.
    pub failing_seeds: Vec<u64>,
    pub all_converged: bool,
}

impl Aggregate {
    pub fn from_results(results: &[SeedResult]) -> Self {
        let mut verdict_counts = BTreeMap::new();
        for r in results {
            *verdict_counts.entry(r.verdict).or_insert(0) += 1;
        }
        let failing_seeds: Vec<u64> = results
            .iter()
            .filter(|r| r.verdict != Verdict::ConvergedStrongCongruent)
            .map(|r| r.seed)
            .collect();
        Self {
            runs: results.len(),
            worst_time_to_threshold: results
                .iter()
                .filter_map(|r| r.time_to_threshold)
                .fold(None, |m: Option<f64>, t| Some(m.map_or(t, |m| m.max(t)))),
            all_converged: failing_seeds.is_empty(),
            failing_seeds,
            verdict_counts,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioBatch {
    pub ratio: f64,
    #[serde(flatten)]
    pub aggregate: Aggregate,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    #[serde(flatten)]
    pub aggregate: Aggregate,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ratios: Vec<RatioBatch>,
    pub runs: Vec<SeedResult>,
}

impl SweepReport {
    pub fn exit_code(&self) -> i32 {
        if self.aggregate.all_converged {
            EXIT_OK
        } else {
            EXIT_NOT_CONVERGED
        }
    }
}

/// `FORMCTL_THREADS` as a positive integer, if set.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k > 0 => Ok(Some(k)),
            _ => Err(Error::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

/// Runs every seed concurrently. Results come back in seed order no
/// matter how the pool schedules them.
pub fn run_seeds(
    spec: &FormationSpec,
    gains: &GainSchedule,
    cfg: &ScenarioConfig,
    seeds: &[u64],
    opts: &SimOptions,
) -> Result<Vec<SeedResult>> {
    seeds
        .par_iter()
        .map(|&seed| {
            let init = cfg.initial_state(seed)?;
            let out = simulate(spec, gains, &init, opts)?;
            Ok(SeedResult {
                seed,
                verdict: out.verdict,
                time_to_threshold: out.time_to_threshold,
                final_max_abs_z: out.final_errors.max_abs_z(),
                final_max_abs_s: out.final_errors.max_abs_s(),
            })
        })
        .collect()
}

pub fn sweep(cfg: &ScenarioConfig, seed: Option<u64>, threads: Option<usize>) -> Result<SweepReport> {
    let spec = cfg.build_spec()?;
    let seeds = match &cfg.initial {
        InitialConfig::Explicit { .. } => vec![seed.unwrap_or(0)],
        _ => cfg.seeds(seed),
    };
    let opts = cfg.sim_options(false, false);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        builder = builder.num_threads(k);
    }
    let pool = builder.build().map_err(|e| Error::Config(e.to_string()))?;

    pool.install(|| {
        let mut batches = Vec::new();
        let mut all = Vec::new();
        match &cfg.sweep {
            Some(grid) if !grid.ratios.is_empty() => {
                for &ratio in &grid.ratios {
                    let gains = GainSchedule::uniform_ratio(spec.n(), grid.alpha, ratio)?;
                    let results = run_seeds(&spec, &gains, cfg, &seeds, &opts)?;
                    batches.push(RatioBatch {
                        ratio,
                        aggregate: Aggregate::from_results(&results),
                    });
                    all.extend(results);
                }
            }
            _ => {
                let gains = cfg.build_gains(&spec)?;
                all = run_seeds(&spec, &gains, cfg, &seeds, &opts)?;
            }
        }
        Ok(SweepReport {
            aggregate: Aggregate::from_results(&all),
            ratios: batches,
            runs: all,
        })
    })
}

// ------------------------------------------------------------------- check

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub time: f64,
    pub max_abs_z: f64,
    pub max_abs_s: f64,
    pub equivalent: bool,
    pub chi_match: bool,
    pub strongly_congruent: bool,
    pub tolerance: f64,
}

impl CheckReport {
    pub fn exit_code(&self) -> i32 {
        if self.strongly_congruent {
            EXIT_OK
        } else {
            EXIT_NOT_CONVERGED
        }
    }
}

/// Compares the last row of a trajectory CSV with the desired formation
/// using only the file contents and the desired spec.
pub fn check(cfg: &ScenarioConfig, trajectory: &Path) -> Result<CheckReport> {
    let spec = cfg.build_spec()?;
    let table = read_trajectory_file(trajectory)?;
    if table.n != spec.n() {
        return Err(Error::Parse(format!(
            "trajectory has {} agents, formation has {}",
            table.n,
            spec.n()
        )));
    }
    let (time, last) = table.last().ok_or_else(|| Error::Parse("no data rows".into()))?;
    let tol = cfg.integrator.eps.max(DEFAULT_TOL);
    let actual = Framework::new(spec.graph().clone(), last.to_vec())?;
    let desired = spec.desired_framework();
    let eq = equivalent(&actual, &desired, tol)?;
    let chi_a = chi(&actual, spec.triangles())?;
    let chi_match = chi_a.iter().zip(spec.areas()).all(|(&a, &b)| approx_eq(a, b, tol));
    let err = errors(&spec, last);
    Ok(CheckReport {
        time,
        max_abs_z: err.max_abs_z(),
        max_abs_s: err.max_abs_s(),
        equivalent: eq,
        chi_match,
        strongly_congruent: eq && chi_match,
        tolerance: tol,
    })
}
