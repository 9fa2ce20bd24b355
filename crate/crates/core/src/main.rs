use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use formctl::config::ScenarioConfig;
use formctl::harness::{self, exit_code_for_error, label, SimulateArgs, EXIT_IO_PARSE, EXIT_OK};
use formctl::Error;

/// Distance + signed-area formation control toolkit.
#[derive(Debug, Parser)]
#[command(name = "formctl", version)]
struct Cli {
    /// Print the report as JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check graph conditions and per-triangle shape conditions.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print gain-ratio bounds and the chosen gains; writes gains.json.
    Gains {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one simulation; writes trajectory.csv, errors.csv, summary.json.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Allow agents 1 and 2 to start at the same point.
        #[arg(long)]
        override_collocated: bool,
    },
    /// Run all seeded simulations concurrently; writes sweep.json.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Base seed replacing the configured one.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check the final row of a trajectory CSV against the desired formation.
    Check {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        trajectory: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO_PARSE } else { EXIT_OK };
            e.print().ok();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("formctl: {e}");
            exit_code_for_error(&e)
        }
    };
    ExitCode::from(code as u8)
}

fn out_dir(cfg: &ScenarioConfig, out: &Option<PathBuf>) -> PathBuf {
    out.clone().unwrap_or_else(|| cfg.output.dir.clone())
}

fn print_json<T: Serialize>(v: &T) -> formctl::Result<()> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Error::Parse(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.6}"))
}

fn run(cli: &Cli) -> formctl::Result<i32> {
    match &cli.command {
        Command::Validate { config } => {
            let cfg = ScenarioConfig::load(config)?;
            let r = harness::validate(&cfg)?;
            if cli.json {
                print_json(&r)?;
            } else {
                println!("agents: {}  edges: {}", r.n, r.edge_count);
                println!("condition 1 (out-degrees): {}", pass(r.condition1));
                println!("condition 2 (edge direction): {}", pass(r.condition2));
                println!("edge count 2n-3: {}", pass(r.edge_count_ok));
                if !r.triangles.is_empty() {
                    println!("{:<12} {:>10} {:>10} {:>10} {:>12} {:>6}", "triangle", "d_ji", "d_ki", "d_kj", "shape", "ok");
                    for t in &r.triangles {
                        println!(
                            "{:<12} {:>10.6} {:>10.6} {:>10.6} {:>12.6} {:>6}",
                            label(&t.triangle),
                            t.d_ji,
                            t.d_ki,
                            t.d_kj,
                            t.shape_ratio,
                            t.shape_ok
                        );
                    }
                }
                for v in &r.violations {
                    println!("violation: {v}");
                }
                println!("{}", if r.passed { "valid" } else { "invalid" });
            }
            Ok(r.exit_code())
        }
        Command::Gains { config, out } => {
            let cfg = ScenarioConfig::load(config)?;
            let r = harness::gains(&cfg)?;
            let dir = out_dir(&cfg, out);
            std::fs::create_dir_all(&dir)?;
            harness::write_json(&dir.join("gains.json"), &r)?;
            if cli.json {
                print_json(&r)?;
            } else {
                println!(
                    "{:<12} {:<13} {:>12} {:>12} {:>10} {:>10} {:>12} {:>11}",
                    "triangle", "branch", "gamma_bar", "bound", "alpha", "beta", "beta/alpha", "guaranteed"
                );
                for row in &r.rows {
                    println!(
                        "{:<12} {:<13} {:>12} {:>12} {:>10.6} {:>10.6} {:>12.6} {:>11}",
                        label(&row.triangle),
                        serde_json::to_value(row.branch).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default(),
                        opt(row.gamma_bar),
                        opt(row.bound),
                        row.alpha,
                        row.beta,
                        row.ratio,
                        row.guaranteed
                    );
                }
            }
            Ok(EXIT_OK)
        }
        Command::Simulate {
            config,
            out,
            seed,
            override_collocated,
        } => {
            let cfg = ScenarioConfig::load(config)?;
            let dir = out_dir(&cfg, out);
            let s = harness::simulate_to_dir(
                &cfg,
                &SimulateArgs {
                    out_dir: &dir,
                    seed: *seed,
                    override_collocated: *override_collocated,
                },
            )?;
            if cli.json {
                print_json(&s)?;
            } else {
                println!("verdict: {}", s.verdict.as_str());
                println!("final time: {}", s.final_time);
                println!("max |z|: {:e}  max |s|: {:e}", s.final_max_abs_z, s.final_max_abs_s);
                println!("time to threshold: {}", opt(s.time_to_threshold));
                if s.retried {
                    println!("retried with h = {}", s.h_used);
                }
                println!("outputs: {}", dir.display());
            }
            Ok(s.exit_code())
        }
        Command::Sweep { config, out, seed } => {
            let cfg = ScenarioConfig::load(config)?;
            let threads = harness::thread_cap()?;
            let r = harness::sweep(&cfg, *seed, threads)?;
            let dir = out_dir(&cfg, out);
            std::fs::create_dir_all(&dir)?;
            harness::write_json(&dir.join("sweep.json"), &r)?;
            if cli.json {
                print_json(&r)?;
            } else {
                for b in &r.ratios {
                    println!("ratio {:>10.4}: {}", b.ratio, summary_line(&b.aggregate));
                }
                println!("all: {}", summary_line(&r.aggregate));
                if !r.aggregate.failing_seeds.is_empty() {
                    let seeds: Vec<String> = r.aggregate.failing_seeds.iter().map(u64::to_string).collect();
                    println!("failing seeds: {}", seeds.join(" "));
                }
            }
            Ok(r.exit_code())
        }
        Command::Check { config, trajectory } => {
            let cfg = ScenarioConfig::load(config)?;
            let r = harness::check(&cfg, trajectory)?;
            if cli.json {
                print_json(&r)?;
            } else {
                println!("final time: {}", r.time);
                println!("max |z|: {:e}  max |s|: {:e}", r.max_abs_z, r.max_abs_s);
                println!("equivalent: {}  area signs match: {}", r.equivalent, r.chi_match);
                println!(
                    "{}",
                    if r.strongly_congruent {
                        "strongly congruent"
                    } else {
                        "not strongly congruent"
                    }
                );
            }
            Ok(r.exit_code())
        }
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn summary_line(a: &harness::Aggregate) -> String {
    let counts: Vec<String> = a.verdict_counts.iter().map(|(v, c)| format!("{}={c}", v.as_str())).collect();
    format!(
        "{} runs [{}] worst time to threshold {}",
        a.runs,
        counts.join(", "),
        opt(a.worst_time_to_threshold)
    )
}
