//! Command-line front door: generate benchmark instances, run the search,
//! validate and visualize solutions, enumerate tiny instances exactly, and
//! export the integer program.
//!
//! Exit codes: 0 for a clean, complete result; 2 when the command ran but
//! the outcome carries violations or penalties; 1 on any error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use barge_alns::generate::{generate, Topology};
use barge_alns::model::{Penalties, RawSolution, Solution};
use barge_alns::oracle;
use barge_alns::report;
use barge_alns::{construct, export_lp, loss, validate, Instance, MipConfig, SearchConfig};

#[derive(Parser)]
#[command(name = "barge-alns", version, about = "Tugboat and barge scheduling toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct SearchFlags {
    /// Base seed for the random stream.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent restarts; the best of all runs is kept.
    #[arg(long, default_value_t = 1)]
    multistart: usize,
    /// Fixed removal count per iteration instead of the size-based default.
    #[arg(long)]
    step: Option<usize>,
    /// Family die: one face picks the empty-barge family, the rest laden.
    #[arg(long = "family-b", default_value_t = 4)]
    family_b: u32,
    #[arg(long, default_value_t = 100.0)]
    t_init: f64,
    #[arg(long, default_value_t = 0.98)]
    cooling: f64,
    #[arg(long, default_value_t = 10.0)]
    t_min: f64,
    /// Iteration budget.
    #[arg(long, default_value_t = 5000)]
    iter_max: usize,
    /// Stop after this many non-improving iterations.
    #[arg(long, default_value_t = 200)]
    stagnation: usize,
    /// Wall-clock cap in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Override penalty weights as "window,hours,unserved".
    #[arg(long)]
    penalties: Option<String>,
    /// Regret repair scores by smallest difference instead of the sum.
    #[arg(long)]
    regret_literal: bool,
}

impl SearchFlags {
    fn to_config(&self) -> SearchConfig {
        SearchConfig {
            seed: self.seed,
            iterations: self.iter_max,
            time_limit: self.time_limit,
            stagnation_limit: self.stagnation,
            t_init: self.t_init,
            cooling: self.cooling,
            t_min: self.t_min,
            family_bias: self.family_b,
            step: self.step,
            regret_literal: self.regret_literal,
            multistart: self.multistart,
            ..SearchConfig::default()
        }
    }

    fn parse_penalties(&self) -> Result<Option<Penalties>, String> {
        let Some(text) = &self.penalties else {
            return Ok(None);
        };
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() != 3 {
            return Err(format!("--penalties wants three comma-separated numbers, got {text:?}"));
        }
        let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.trim().parse::<f64>()).collect();
        let nums = nums.map_err(|e| format!("--penalties: {e}"))?;
        Ok(Some(Penalties {
            time_window: nums[0],
            working_hours: nums[1],
            unserved: nums[2],
        }))
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a benchmark instance for a scale row and topology.
    Generate {
        /// Scale row, 1 through 6.
        #[arg(long, default_value_t = 1)]
        row: u8,
        /// "oceanic" (8 ports) or "inland" (7 ports).
        #[arg(long, default_value = "oceanic")]
        topology: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search for a low-loss schedule on an instance file.
    Solve {
        instance: PathBuf,
        /// Solution file with schedule and loss; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Per-iteration progress as CSV.
        #[arg(long)]
        stats: Option<PathBuf>,
        /// Operator weights per segment as CSV.
        #[arg(long)]
        weights: Option<PathBuf>,
        #[command(flatten)]
        flags: SearchFlags,
    },
    /// Check a solution file against its instance.
    Validate {
        instance: PathBuf,
        solution: PathBuf,
    },
    /// Exhaustive optimum of a tiny instance.
    Oracle {
        instance: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Export the integer program in CPLEX LP format.
    ExportMip {
        instance: PathBuf,
        /// Output path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        big_m: Option<f64>,
        #[arg(long)]
        time_horizon: Option<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        var_cap: usize,
    },
    /// Timed construction and search repeats over benchmark presets.
    Benchmark {
        /// Comma-separated scale rows, e.g. "1,2,3".
        #[arg(long, default_value = "1")]
        rows: String,
        #[arg(long, default_value = "oceanic")]
        topology: String,
        #[arg(long, default_value_t = 3)]
        repeats: u64,
        /// CSV output path; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        flags: SearchFlags,
    },
    /// Draw a solution as an SVG and a GeoJSON map.
    Report {
        instance: PathBuf,
        solution: PathBuf,
        #[arg(long, default_value = "routes.svg")]
        svg: PathBuf,
        #[arg(long, default_value = "routes.geojson")]
        geojson: PathBuf,
    },
}

fn read_instance(path: &PathBuf) -> Result<Instance, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Instance::from_json(&text)
}

fn read_solution(path: &PathBuf, inst: &Instance) -> Result<Solution, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let raw: RawSolution =
        serde_json::from_str(&text).map_err(|e| format!("solution parse error: {e}"))?;
    Solution::from_raw(&raw, inst).map_err(|e| format!("solution does not fit the instance: {e}"))
}

fn write_or_print(path: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.cmd {
        Cmd::Generate { row, topology, seed, output } => {
            let topo = Topology::parse(&topology)
                .ok_or_else(|| format!("unknown topology {topology:?}; use oceanic or inland"))?;
            let inst = generate(row, topo, seed).map_err(|e| e.to_string())?;
            write_or_print(&output, &inst.to_json())?;
            Ok(0)
        }
        Cmd::Solve { instance, output, stats, weights, flags } => {
            let mut inst = read_instance(&instance)?;
            if let Some(p) = flags.parse_penalties()? {
                inst.params.penalties = p;
            }
            let mut cfg = flags.to_config();
            cfg.record = stats.is_some() || weights.is_some();
            let out = barge_alns::solve(&inst, &cfg);
            let raw = out.best.to_raw(&inst, true);
            let text =
                serde_json::to_string_pretty(&raw).expect("solution serialization cannot fail");
            write_or_print(&output, &(text + "\n"))?;
            eprintln!(
                "loss {:.3} (from {:.3}) after {} iterations, seed {}",
                out.best_loss.total, out.initial_loss, out.iterations, out.seed
            );
            if let Some(run_stats) = &out.stats {
                if let Some(path) = stats {
                    let mut csv = String::from(
                        "iteration,temperature,candidate_loss,current_loss,best_loss,accepted,destroy,repair,reward\n",
                    );
                    for r in &run_stats.iterations {
                        csv.push_str(&format!(
                            "{},{},{},{},{},{},{},{},{}\n",
                            r.iteration,
                            r.temperature,
                            r.candidate_loss,
                            r.current_loss,
                            r.best_loss,
                            r.accepted,
                            r.destroy,
                            r.repair,
                            r.reward
                        ));
                    }
                    fs::write(&path, csv).map_err(|e| format!("{}: {e}", path.display()))?;
                }
                if let Some(path) = weights {
                    let mut csv = String::from("segment,bank,operator,weight\n");
                    for w in &run_stats.weights {
                        csv.push_str(&format!("{},{},{},{}\n", w.segment, w.bank, w.op, w.weight));
                    }
                    fs::write(&path, csv).map_err(|e| format!("{}: {e}", path.display()))?;
                }
            }
            let clean = out.best.is_complete() && validate(&inst, &out.best).is_empty();
            Ok(if clean { 0 } else { 2 })
        }
        Cmd::Validate { instance, solution } => {
            let inst = read_instance(&instance)?;
            let sol = read_solution(&solution, &inst)?;
            let violations = validate(&inst, &sol);
            match loss(&inst, &sol) {
                Ok(b) => println!("loss {:.3}", b.total),
                Err(e) => println!("loss unavailable: {e}"),
            }
            if violations.is_empty() {
                println!("clean");
                Ok(0)
            } else {
                for v in &violations {
                    println!("{v}");
                }
                println!("{} violations", violations.len());
                Ok(2)
            }
        }
        Cmd::Oracle { instance, output } => {
            let inst = read_instance(&instance)?;
            let best = oracle::optimum(&inst).map_err(|e| e.to_string())?;
            match best {
                Some(c) => {
                    println!(
                        "optimum {:.6}{}",
                        c.cost.unwrap_or(f64::NAN),
                        if c.clean { "" } else { " (soft violations priced in)" }
                    );
                    if let Some(path) = output {
                        let raw = c.solution.to_raw(&inst, true);
                        let text = serde_json::to_string_pretty(&raw)
                            .expect("solution serialization cannot fail");
                        fs::write(&path, text + "\n")
                            .map_err(|e| format!("{}: {e}", path.display()))?;
                    }
                    Ok(if c.clean { 0 } else { 2 })
                }
                None => {
                    println!("no capacity-feasible schedule exists");
                    Ok(2)
                }
            }
        }
        Cmd::ExportMip { instance, output, big_m, time_horizon, var_cap } => {
            let inst = read_instance(&instance)?;
            let cfg = MipConfig { big_m, time_horizon, var_cap, ..MipConfig::default() };
            let text = export_lp(&inst, &cfg).map_err(|e| e.to_string())?;
            write_or_print(&output, &text)?;
            Ok(0)
        }
        Cmd::Benchmark { rows, topology, repeats, output, flags } => {
            let topo = Topology::parse(&topology)
                .ok_or_else(|| format!("unknown topology {topology:?}; use oceanic or inland"))?;
            let rows: Vec<u8> = rows
                .split(',')
                .map(|r| r.trim().parse::<u8>().map_err(|e| format!("bad row {r:?}: {e}")))
                .collect::<Result<_, _>>()?;
            let mut csv = String::from(
                "row,topology,trial,construct_s,search_s,initial_loss,final_loss,improvement_pct\n",
            );
            for &row in &rows {
                let inst = generate(row, topo, flags.seed).map_err(|e| e.to_string())?;
                let mut finals = Vec::new();
                for trial in 1..=repeats {
                    let t0 = Instant::now();
                    let built = construct::construct(&inst);
                    let construct_s = t0.elapsed().as_secs_f64();
                    let initial = loss(&inst, &built)
                        .expect("constructed solutions always evaluate")
                        .total;
                    let mut cfg = flags.to_config();
                    cfg.seed = trial;
                    let t1 = Instant::now();
                    let out = barge_alns::solve(&inst, &cfg);
                    let search_s = t1.elapsed().as_secs_f64();
                    let improvement = if initial > 0.0 {
                        100.0 * (initial - out.best_loss.total) / initial
                    } else {
                        0.0
                    };
                    csv.push_str(&format!(
                        "{row},{},{trial},{construct_s:.3},{search_s:.3},{initial:.3},{:.3},{improvement:.2}\n",
                        topo.label(),
                        out.best_loss.total
                    ));
                    finals.push(out.best_loss.total);
                }
                let best = finals.iter().cloned().fold(f64::INFINITY, f64::min);
                let worst = finals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let mean = finals.iter().sum::<f64>() / finals.len() as f64;
                csv.push_str(&format!(
                    "{row},{},summary,,,,,best={best:.3} worst={worst:.3} mean={mean:.3}\n",
                    topo.label()
                ));
            }
            write_or_print(&output, &csv)?;
            Ok(0)
        }
        Cmd::Report { instance, solution, svg, geojson } => {
            let inst = read_instance(&instance)?;
            let sol = read_solution(&solution, &inst)?;
            let svg_text = report::render_svg(&inst, &sol).map_err(|e| e.to_string())?;
            fs::write(&svg, svg_text).map_err(|e| format!("{}: {e}", svg.display()))?;
            let geo_text = report::render_geojson(&inst, &sol).map_err(|e| e.to_string())?;
            fs::write(&geojson, geo_text).map_err(|e| format!("{}: {e}", geojson.display()))?;
            eprintln!("wrote {} and {}", svg.display(), geojson.display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
