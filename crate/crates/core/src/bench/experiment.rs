use std::collections::{BTreeMap, HashMap};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{gain, performance_profile, PerformanceProfile, ProfileError};
use super::solve::{solve, Method};
use crate::model::io::read_instance;
use crate::model::Instance;
use crate::search::{Budget, EvalMode, SearchParams};
use crate::sim::{monte_carlo, Policy};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    /// Instance files, relative to the spec file.
    pub instances: Vec<PathBuf>,
    pub methods: Vec<String>,
    pub seeds: Vec<u64>,
    pub budget: Budget,
    #[serde(default = "default_eval")]
    pub eval: EvalMode,
    #[serde(default = "default_samples")]
    pub mc_samples: u64,
}

fn default_eval() -> EvalMode {
    EvalMode::Hybrid
}

fn default_samples() -> u64 {
    10_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance: String,
    pub method: String,
    pub seed: u64,
    /// Expected cost under the spec's evaluation mode.
    pub cost: Option<f64>,
    pub e_rq: Option<f64>,
    pub e_rqplus: Option<f64>,
    pub ws_mean: Option<f64>,
    pub ws_stderr: Option<f64>,
    pub gain: Option<f64>,
    pub feasible: Option<bool>,
    pub proven: Option<bool>,
    pub iterations: Option<u64>,
    pub wall_time: f64,
    pub engine_version: String,
    pub params: BTreeMap<String, String>,
    pub error: Option<String>,
}

fn ledger_params(spec: &ExperimentSpec) -> BTreeMap<String, String> {
    let d = SearchParams::default();
    [
        ("t_init", d.t_init.to_string()),
        ("t_min", d.t_min.to_string()),
        ("cooling", d.cooling.to_string()),
        ("penalty", "sum_p_plus_1".to_string()),
        ("move_selection", "uniform_redraw".to_string()),
        ("snap", "nearest_tie_down".to_string()),
        ("budget_split", "equal".to_string()),
        ("eval", spec.eval.name().to_string()),
        ("mc_samples", spec.mc_samples.to_string()),
        ("budget", format!("{:?}", spec.budget)),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// Runs every (instance, method, seed) cell in parallel and returns the
/// rows in spec order. A cell that fails is recorded with its error.
pub fn run_experiment(spec: &ExperimentSpec, base_dir: &Path) -> Vec<ResultRow> {
    let loaded: Vec<(String, Result<Instance, String>)> = spec
        .instances
        .iter()
        .map(|p| {
            let path = base_dir.join(p);
            (
                p.display().to_string(),
                read_instance(&path).map_err(|e| format!("{}: {e}", path.display())),
            )
        })
        .collect();
    let params = ledger_params(spec);

    // wait-and-serve baselines, one per (instance, seed)
    let ws: HashMap<(usize, u64), (f64, f64)> = loaded
        .par_iter()
        .enumerate()
        .flat_map(|(i, (_, inst))| {
            spec.seeds.par_iter().filter_map(move |&seed| {
                let inst = inst.as_ref().ok()?;
                let e = monte_carlo(Policy::WaitAndServe, inst, spec.mc_samples, seed);
                Some(((i, seed), (e.mean, e.std_error)))
            })
        })
        .collect();

    let cells: Vec<(usize, &String, u64)> = (0..loaded.len())
        .flat_map(|i| {
            spec.methods
                .iter()
                .flat_map(move |m| spec.seeds.iter().map(move |&s| (i, m, s)))
        })
        .collect();
    cells
        .par_iter()
        .map(|&(i, method, seed)| {
            let clock = Instant::now();
            let (name, inst) = &loaded[i];
            let mut row = ResultRow {
                instance: name.clone(),
                method: method.clone(),
                seed,
                cost: None,
                e_rq: None,
                e_rqplus: None,
                ws_mean: None,
                ws_stderr: None,
                gain: None,
                feasible: None,
                proven: None,
                iterations: None,
                wall_time: 0.0,
                engine_version: ENGINE_VERSION.to_string(),
                params: params.clone(),
                error: None,
            };
            let outcome = inst.as_ref().map_err(Clone::clone).and_then(|inst| {
                let m: Method = method.parse().map_err(|e| format!("{e}"))?;
                solve(inst, &m, seed, spec.budget, spec.eval).map_err(|e| e.to_string())
            });
            match outcome {
                Ok(o) => {
                    let (ws_mean, ws_stderr) = ws[&(i, seed)];
                    row.cost = Some(o.cost);
                    row.e_rq = Some(o.rq.total);
                    row.e_rqplus = Some(o.rqplus.total);
                    row.ws_mean = Some(ws_mean);
                    row.ws_stderr = Some(ws_stderr);
                    row.gain = gain(o.cost, ws_mean);
                    row.feasible = Some(o.feasible);
                    row.proven = o.proven;
                    row.iterations = Some(o.iterations);
                }
                Err(e) => row.error = Some(e),
            }
            row.wall_time = clock.elapsed().as_secs_f64();
            row
        })
        .collect()
}

pub fn write_rows<W: Write>(rows: &[ResultRow], mut out: W) -> io::Result<()> {
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        writeln!(out)?;
    }
    Ok(())
}

pub fn read_rows(text: &str) -> Result<Vec<ResultRow>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn ordered<'a>(items: impl Iterator<Item = &'a String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for s in items {
        if !out.contains(s) {
            out.push(s.clone());
        }
    }
    out
}

/// One line per instance: the wait-and-serve average, then the mean cost
/// and mean gain of every method over the seeds.
pub fn write_summary<W: Write>(rows: &[ResultRow], mut out: W) -> io::Result<()> {
    let instances = ordered(rows.iter().map(|r| &r.instance));
    let methods = ordered(rows.iter().map(|r| &r.method));
    let fmt = |v: Option<f64>| v.map_or("NA".to_string(), |x| format!("{x:.3}"));
    write!(out, "instance,ws_mean")?;
    for m in &methods {
        write!(out, ",{m}_cost,{m}_gain")?;
    }
    writeln!(out)?;
    for inst in &instances {
        let ws = mean(rows.iter().filter(|r| &r.instance == inst).filter_map(|r| r.ws_mean));
        write!(out, "{inst},{}", fmt(ws))?;
        for m in &methods {
            let cell: Vec<&ResultRow> = rows.iter().filter(|r| &r.instance == inst && &r.method == m).collect();
            let cost = mean(cell.iter().filter_map(|r| r.cost));
            let g = mean(cell.iter().filter_map(|r| r.gain));
            write!(out, ",{},{}", fmt(cost), fmt(g))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Performance profiles of the mean cost per method and instance; a method
/// without a result on an instance counts as unsolved there.
pub fn profiles_from_rows(rows: &[ResultRow]) -> Result<Vec<PerformanceProfile>, ProfileError> {
    let instances = ordered(rows.iter().map(|r| &r.instance));
    let methods = ordered(rows.iter().map(|r| &r.method));
    let costs: Vec<Vec<f64>> = methods
        .iter()
        .map(|m| {
            instances
                .iter()
                .map(|i| {
                    mean(
                        rows.iter()
                            .filter(|r| &r.instance == i && &r.method == m)
                            .filter_map(|r| r.cost),
                    )
                    .unwrap_or(f64::INFINITY)
                })
                .collect()
        })
        .collect();
    performance_profile(&methods, &costs)
}
