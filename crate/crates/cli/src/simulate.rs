use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use endonet::dynamics::{integrate, lyapunov_value, StopReason};
use endonet::stochastic::{ssa_batch, SsaOptions, StopRule};

use crate::config::Config;
use crate::{check_dim, emit, load, parse_list, Failure, Method, SimulateArgs, EXIT_INTERNAL};

#[derive(Clone, Debug, Serialize)]
pub struct Stats {
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub mean: f64,
}

impl Stats {
    fn of(mut v: Vec<f64>) -> Stats {
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        };
        Stats {
            min: v[0],
            median,
            max: v[n - 1],
            mean: v.iter().sum::<f64>() / n as f64,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Checkpoint {
    pub t: f64,
    pub norm: Stats,
}

#[derive(Clone, Debug, Serialize)]
pub struct SsaSummary {
    pub seed: u64,
    pub rng: String,
    pub stop_reasons: BTreeMap<String, u64>,
    pub final_norm: Stats,
    pub final_time: Stats,
    pub events: Stats,
    pub checkpoints: Vec<Checkpoint>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OdeSummary {
    pub stop_reason: StopReason,
    pub steps: usize,
    pub final_time: f64,
    pub final_state: Vec<f64>,
    pub max_norm: f64,
    pub min_coordinate: f64,
    pub final_u: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulateReport {
    pub command: &'static str,
    pub file: String,
    pub method: &'static str,
    pub runs: u64,
    pub x0: Vec<f64>,
    pub ssa: Option<SsaSummary>,
    pub ode: Option<OdeSummary>,
    pub outputs: Vec<String>,
}

fn write(path: &Path, text: &str) -> Result<String, Failure> {
    std::fs::write(path, text).map_err(|e| Failure {
        code: EXIT_INTERNAL,
        message: format!("cannot write {}: {e}", path.display()),
    })?;
    Ok(path.display().to_string())
}

fn prepare_out(out: &Option<std::path::PathBuf>) -> Result<(), Failure> {
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| Failure {
            code: EXIT_INTERNAL,
            message: format!("cannot create {}: {e}", dir.display()),
        })?;
    }
    Ok(())
}

pub fn run(args: &SimulateArgs, cfg: &Config) -> Result<(), Failure> {
    let doc = load(&args.file)?;
    let net = &doc.network;
    let names = net.species_names();
    let file = args.file.display().to_string();
    if args.runs == 0 {
        return Err(Failure::usage("--runs must be positive"));
    }
    let mut report = match args.method {
        Method::Ssa => {
            let x0: Vec<u64> = parse_list(&args.x0, "x0")?;
            check_dim(&x0, net.dim(), "--x0")?;
            let max_norm = match args.max_norm {
                None => u64::MAX,
                Some(v) if v >= 0.0 && v.is_finite() => v.ceil() as u64,
                Some(_) => return Err(Failure::usage("--max-norm must be a non-negative number")),
            };
            let stop = StopRule {
                t_max: args.t_max.unwrap_or(f64::INFINITY),
                max_events: args.max_events.unwrap_or(u64::MAX),
                max_norm,
            };
            if stop.t_max.is_infinite() && stop.max_events == u64::MAX && stop.max_norm == u64::MAX {
                return Err(Failure::usage("ssa needs --t-max, --max-events or --max-norm"));
            }
            let checkpoints: Vec<f64> = match (&args.checkpoints, args.t_max) {
                (Some(c), _) => parse_list(c, "checkpoints")?,
                (None, Some(t)) => vec![t / 4.0, t / 2.0, t],
                (None, None) => Vec::new(),
            };
            if checkpoints.windows(2).any(|w| w[0] > w[1]) || checkpoints.iter().any(|&t| !(t >= 0.0)) {
                return Err(Failure::usage("--checkpoints must be ascending and non-negative"));
            }
            let opts = SsaOptions {
                stop,
                record_path: args.out.is_some(),
                checkpoints: checkpoints.clone(),
            };
            let results = ssa_batch(net, &doc.rates, &x0, &opts, args.seed, args.runs)?;
            let mut stop_reasons = BTreeMap::new();
            for r in &results {
                *stop_reasons.entry(r.stop_reason.as_str().to_string()).or_insert(0) += 1;
            }
            // runs that stopped before a checkpoint count with their final state
            let cps = checkpoints
                .iter()
                .enumerate()
                .map(|(k, &t)| Checkpoint {
                    t,
                    norm: Stats::of(
                        results
                            .iter()
                            .map(|r| r.checkpoint_states.get(k).unwrap_or(&r.final_state).iter().sum::<u64>() as f64)
                            .collect(),
                    ),
                })
                .collect();
            let mut outputs = Vec::new();
            prepare_out(&args.out)?;
            if let Some(dir) = &args.out {
                for r in &results {
                    outputs.push(write(&dir.join(format!("run_{:04}.csv", r.stream)), &r.to_csv(&names))?);
                }
            }
            SimulateReport {
                command: "simulate",
                file,
                method: "ssa",
                runs: args.runs,
                x0: x0.iter().map(|&v| v as f64).collect(),
                ssa: Some(SsaSummary {
                    seed: args.seed,
                    rng: cfg.rng.clone(),
                    stop_reasons,
                    final_norm: Stats::of(results.iter().map(|r| r.final_norm() as f64).collect()),
                    final_time: Stats::of(results.iter().map(|r| r.final_time).collect()),
                    events: Stats::of(results.iter().map(|r| r.events as f64).collect()),
                    checkpoints: cps,
                }),
                ode: None,
                outputs,
            }
        }
        Method::Ode => {
            if args.runs != 1 {
                return Err(Failure::usage("ode integrates a single run"));
            }
            if args.max_events.is_some() || args.max_norm.is_some() || args.checkpoints.is_some() {
                return Err(Failure::usage("--max-events, --max-norm and --checkpoints apply to ssa only"));
            }
            let t_max = args.t_max.ok_or_else(|| Failure::usage("ode needs --t-max"))?;
            let x0: Vec<f64> = parse_list(&args.x0, "x0")?;
            check_dim(&x0, net.dim(), "--x0")?;
            let rel_tol = args.rel_tol.unwrap_or(cfg.rel_tol);
            let abs_tol = args.abs_tol.unwrap_or(cfg.abs_tol);
            let traj = integrate(net, &doc.rates, &x0, t_max, rel_tol, abs_tol)?;
            let mut outputs = Vec::new();
            prepare_out(&args.out)?;
            if let Some(dir) = &args.out {
                outputs.push(write(&dir.join("ode.csv"), &traj.to_csv(&names))?);
            }
            let last = traj.last_state().to_vec();
            SimulateReport {
                command: "simulate",
                file,
                method: "ode",
                runs: 1,
                x0,
                ssa: None,
                ode: Some(OdeSummary {
                    stop_reason: traj.stop_reason,
                    steps: traj.times.len() - 1,
                    final_time: traj.final_time(),
                    final_u: lyapunov_value(&last),
                    final_state: last,
                    max_norm: traj
                        .states
                        .iter()
                        .map(|z| z.iter().fold(0.0f64, |a, &b| a.max(b.abs())))
                        .fold(0.0, f64::max),
                    min_coordinate: traj.states.iter().flatten().copied().fold(f64::INFINITY, f64::min),
                }),
                outputs,
            }
        }
    };
    if let Some(dir) = &args.out {
        let path = dir.join("summary.json");
        report.outputs.push(path.display().to_string());
        let json = serde_json::to_string_pretty(&report).expect("reports serialize");
        write(&path, &json)?;
    }
    emit(args.json, &report, || text(&report));
    Ok(())
}

fn text(r: &SimulateReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} simulation of {} ({} runs)", r.method, r.file, r.runs);
    if let Some(s) = &r.ssa {
        let reasons: Vec<String> = s.stop_reasons.iter().map(|(k, v)| format!("{k} {v}")).collect();
        let _ = writeln!(out, "  stop reasons: {}", reasons.join(", "));
        let _ = writeln!(
            out,
            "  final |x|_1: min {} median {} max {} mean {:.3}",
            s.final_norm.min, s.final_norm.median, s.final_norm.max, s.final_norm.mean
        );
        let _ = writeln!(
            out,
            "  final time: median {:.6} mean {:.6}",
            s.final_time.median, s.final_time.mean
        );
        for c in &s.checkpoints {
            let _ = writeln!(out, "  t = {}: median |x|_1 {}", c.t, c.norm.median);
        }
    }
    if let Some(o) = &r.ode {
        let _ = writeln!(out, "  stop reason: {:?} after {} steps", o.stop_reason, o.steps);
        let _ = writeln!(out, "  final time {}, final state {:?}", o.final_time, o.final_state);
        let _ = writeln!(
            out,
            "  max |x|_inf {:.6}, min coordinate {:.6e}, final U {:.6}",
            o.max_norm, o.min_coordinate, o.final_u
        );
    }
    for p in &r.outputs {
        let _ = writeln!(out, "  wrote {p}");
    }
    out
}
