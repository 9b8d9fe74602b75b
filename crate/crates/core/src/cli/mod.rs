//! The `cyclestab` command line: condition checks, cycle search, simulation,
//! ensembles, sweeps and figure reproduction.
//!
//! Exit codes: `0` success (or condition satisfied), `2` condition not
//! satisfied, `1` usage, configuration or I/O error.

mod reproduce;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::conditions::{self, ConditionId};
use crate::control::{ControlFamily, ControlSpec, PulsePhase};
use crate::engine::{self, EnsembleConfig, EnsembleStats, Execution, SweepCondition, Target, TrajectoryRecord};
use crate::maps::{self, CycleInfo, CycleSearch, MapModel, Radius};
use crate::noise::{NoiseSpec, RngStream};
use crate::output;
use crate::{Error, Result};

pub use reproduce::{panels, reproduce, Example, FileRecord, Manifest, Panel, PanelRecord};

#[derive(Debug, Parser)]
#[command(name = "cyclestab", version, about = "Stochastic pulsed stabilization of equilibria and cycles")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Base seed; path `i` of an ensemble uses stream `(seed, i)`.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Output file (directory for `reproduce`); stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; 1 runs everything on the calling thread.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a stability condition (exit 0 satisfied, 2 not satisfied).
    Check(CheckArgs),
    /// Find the d-cycles of a map with multipliers and Lipschitz constants.
    Cycles(CyclesArgs),
    /// Simulate one controlled trajectory.
    Simulate(SimulateArgs),
    /// Run an ensemble of independent paths and report convergence.
    Ensemble(EnsembleArgs),
    /// Evaluate a condition and an ensemble on an (alpha, l) grid.
    Sweep(SweepArgs),
    /// Regenerate the CSV bundle of one worked example.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct ModelArgs {
    /// ricker, logistic or maynard_smith.
    #[arg(long)]
    pub map: String,
    /// Growth rate of ricker and logistic.
    #[arg(long)]
    pub r: Option<f64>,
}

impl ModelArgs {
    pub fn build(&self) -> Result<MapModel> {
        MapModel::by_name(&self.map, self.r)
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct ControlArgs {
    /// pbc, toc or none.
    #[arg(long, default_value = "none")]
    pub control: ControlFamily,
    /// Pulse period; defaults to m*d for cycles and 1 otherwise.
    #[arg(long)]
    pub k: Option<usize>,
    /// Cycles per control block.
    #[arg(long)]
    pub m: Option<usize>,
    /// Period of the stabilized cycle.
    #[arg(long)]
    pub d: Option<usize>,
    /// end_of_block or start_of_block.
    #[arg(long, default_value = "end_of_block")]
    pub phase: PulsePhase,
    /// Apply max{x, 0} after every step.
    #[arg(long)]
    pub truncate: bool,
    /// TOC target, and the point target for convergence checks.
    #[arg(long, allow_hyphen_values = true)]
    pub target: Option<f64>,
    /// Cycle target for convergence checks, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub cycle_points: Option<Vec<f64>>,
    /// none, bernoulli, uniform, uniform01, uniform:LO:HI or discrete:V:P,...
    #[arg(long, default_value = "none")]
    pub noise: NoiseSpec,
}

impl ControlArgs {
    pub fn spec(&self, alpha: f64, l: f64) -> Result<ControlSpec> {
        if self.control == ControlFamily::None {
            return Ok(ControlSpec::none());
        }
        let (k, cycle) = match (self.d, self.m) {
            (Some(d), m) => {
                let m = m.unwrap_or(1);
                if let Some(k) = self.k.filter(|&k| k != m * d) {
                    return Err(Error::Config(format!("--k {k} differs from m*d = {}", m * d)));
                }
                (m * d, Some((d, m)))
            }
            (None, Some(_)) => return Err(Error::Config("--m needs --d".into())),
            (None, None) => (self.k.unwrap_or(1), None),
        };
        let mut spec = match self.control {
            ControlFamily::Pbc => ControlSpec::pbc(alpha, l, k, self.noise.clone()),
            _ => {
                let t = self.target.ok_or_else(|| Error::Config("toc needs --target".into()))?;
                ControlSpec::toc(alpha, l, k, t, self.noise.clone())
            }
        };
        if let Some((d, m)) = cycle {
            spec = spec.with_cycle(d, m);
        }
        let spec = spec.with_phase(self.phase).truncated(self.truncate);
        spec.validate()?;
        Ok(spec)
    }

    /// Cycle points when given, otherwise the point target.
    pub fn convergence_target(&self) -> Result<Target> {
        match (&self.cycle_points, self.target) {
            (Some(p), _) if !p.is_empty() => Ok(Target::Cycle(p.clone())),
            (_, Some(t)) => Ok(Target::Point(t)),
            _ => Err(Error::Config("give --target or --cycle-points".into())),
        }
    }

    fn push_argv(&self, argv: &mut Vec<String>) {
        argv.push(format!("--control={}", self.control));
        for (name, v) in [("k", self.k), ("m", self.m), ("d", self.d)] {
            if let Some(v) = v {
                argv.push(format!("--{name}={v}"));
            }
        }
        argv.push(format!("--phase={}", self.phase));
        if self.truncate {
            argv.push("--truncate".into());
        }
        if let Some(t) = self.target {
            argv.push(format!("--target={t}"));
        }
        if let Some(p) = &self.cycle_points {
            let joined: Vec<String> = p.iter().map(f64::to_string).collect();
            argv.push(format!("--cycle-points={}", joined.join(",")));
        }
        argv.push(format!("--noise={}", self.noise));
    }
}

/// Everything needed to simulate one configuration. Floats are replayed
/// with Rust's shortest round-trip formatting, so `argv` reproduces the
/// configuration exactly.
#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct RunConfig {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub control: ControlArgs,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub l: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 500)]
    pub steps: usize,
}

impl RunConfig {
    pub fn spec(&self) -> Result<ControlSpec> {
        self.control.spec(self.alpha, self.l)
    }

    pub fn argv(&self) -> Vec<String> {
        let mut argv = vec![format!("--map={}", self.model.map)];
        if let Some(r) = self.model.r {
            argv.push(format!("--r={r}"));
        }
        self.control.push_argv(&mut argv);
        argv.push(format!("--alpha={}", self.alpha));
        argv.push(format!("--l={}", self.l));
        argv.push(format!("--x0={}", self.x0));
        argv.push(format!("--steps={}", self.steps));
        argv
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub run: RunConfig,
    /// Stream index under the base seed.
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize)]
pub struct EnsembleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub run: RunConfig,
    #[arg(long, default_value_t = 100)]
    pub paths: usize,
    /// Convergence tolerance.
    #[arg(long, default_value_t = engine::DEFAULT_TOL)]
    pub tol: f64,
    /// Sustain window; defaults to max(20, 2d).
    #[arg(long)]
    pub window: Option<usize>,
}

impl EnsembleArgs {
    pub fn config(&self, seed: u64, execution: Execution) -> Result<EnsembleConfig> {
        let target = self.run.control.convergence_target()?;
        let mut cfg = EnsembleConfig::new(self.run.x0, self.run.steps, self.paths, seed, target)
            .tol(self.tol)
            .execution(execution);
        if let Some(w) = self.window {
            cfg = cfg.window(w);
        }
        Ok(cfg)
    }

    pub fn argv(&self) -> Vec<String> {
        let mut argv = self.run.argv();
        argv.push(format!("--paths={}", self.paths));
        argv.push(format!("--tol={}", self.tol));
        if let Some(w) = self.window {
            argv.push(format!("--window={w}"));
        }
        argv
    }
}

/// Map data needed by the checkers, given directly or derived from a map.
#[derive(Debug, Clone, Args)]
pub struct ConditionData {
    /// Lipschitz constant L (L(d) for cycle conditions).
    #[arg(long = "L")]
    pub lipschitz: Option<f64>,
    /// Derivative A = f'(K) (cycle multiplier A(d) for pbc_cycle).
    #[arg(long = "A", allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Sup factor M for ml_contraction.
    #[arg(long = "M")]
    pub m_sup: Option<f64>,
    /// Equilibrium (or a cycle point) used to derive L or A from the map.
    #[arg(long = "K")]
    pub equilibrium: Option<f64>,
    /// Neighbourhood radius for derived Lipschitz constants.
    #[arg(long, default_value_t = 1e-3)]
    pub radius: f64,
}

impl ConditionData {
    fn lipschitz(&self, map: Option<&MapModel>, d: usize) -> Result<f64> {
        if let Some(l) = self.lipschitz {
            return Ok(l);
        }
        let map = map.ok_or_else(|| Error::Config("give --L or --map".into()))?;
        if d > 1 {
            return Ok(pick_cycle(map, d, self.equilibrium, self.radius)?.lipschitz_product);
        }
        let k = self.equilibrium.ok_or_else(|| Error::Config("give --L or --K".into()))?;
        let l = maps::estimate_lipschitz(map, k, Radius::Local(self.radius), self.radius / 1000.0)?;
        Ok(l.max(1.0))
    }

    fn multiplier(&self, map: Option<&MapModel>, d: usize) -> Result<f64> {
        if let Some(a) = self.a {
            return Ok(a);
        }
        let map = map.ok_or_else(|| Error::Config("give --A or --map".into()))?;
        if d > 1 {
            return Ok(pick_cycle(map, d, self.equilibrium, self.radius)?.multiplier_product);
        }
        let k = self.equilibrium.ok_or_else(|| Error::Config("give --A or --K".into()))?;
        Ok(map.deriv(k))
    }
}

/// The `d`-cycle through `near`, or the only one on `[0, 10]`.
fn pick_cycle(map: &MapModel, d: usize, near: Option<f64>, u0: f64) -> Result<CycleInfo> {
    let cycles = maps::find_cycle(map, d, &CycleSearch::new(0.0, 10.0).u0(u0))?;
    let found = match near {
        Some(x) => cycles
            .into_iter()
            .find(|c| c.points.iter().any(|p| (p - x).abs() < 1e-6)),
        None if cycles.len() == 1 => cycles.into_iter().next(),
        None => {
            return Err(Error::Config(format!(
                "{} {d}-cycles found; pick one with --K",
                cycles.len()
            )))
        }
    };
    found.ok_or_else(|| Error::Config(format!("no {d}-cycle found")))
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// toc_point, toc_cycle, pbc_smooth, pbc_cycle, pbc_max, ml_contraction, tpia or tpib.
    pub condition: String,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    pub l: f64,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Cycle period for derived cycle data.
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, default_value = "none")]
    pub noise: NoiseSpec,
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long)]
    pub r: Option<f64>,
    #[command(flatten)]
    pub data: ConditionData,
}

#[derive(Debug, Clone, Args)]
pub struct CyclesArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub d: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 10.0)]
    pub hi: f64,
    /// Newton starting points on [lo, hi].
    #[arg(long, default_value_t = 2000)]
    pub seeds: usize,
    /// Neighbourhood radius for the Lipschitz constants.
    #[arg(long, default_value_t = 1e-3)]
    pub u0: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub control: ControlArgs,
    /// alpha grid `lo:hi:step` or a single value.
    #[arg(long)]
    pub alpha: String,
    /// l grid `lo:hi:step` or a single value.
    #[arg(long)]
    pub l: String,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub x0: f64,
    #[arg(long, default_value_t = 500)]
    pub steps: usize,
    /// Paths per cell; 0 skips the ensembles.
    #[arg(long, default_value_t = 100)]
    pub paths: usize,
    #[arg(long, default_value_t = engine::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub window: Option<usize>,
    /// toc_point, toc_cycle, pbc_smooth, pbc_cycle or pbc_max.
    #[arg(long)]
    pub condition: Option<String>,
    #[command(flatten)]
    pub data: ConditionData,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    /// example1, example2, example3 or example4.
    pub example: String,
}

/// Parse a grid `lo:hi:step` (inclusive) or a single value.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{t}` in grid `{s}`")));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(vec![num(v)?]),
        [lo, hi, step] => engine::axis(num(lo)?, num(hi)?, num(step)?),
        _ => Err(Error::Parse(format!("grid `{s}` is not lo:hi:step"))),
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main_exit() -> i32 {
    run_with(std::env::args_os())
}

pub fn run_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn execute(cli: &Cli) -> Result<i32> {
    let g = &cli.global;
    let execution = Execution::from_threads(g.threads);
    match &cli.command {
        Command::Check(a) => check(a),
        Command::Cycles(a) => {
            let map = a.model.build()?;
            let search = CycleSearch::new(a.lo, a.hi).seeds(a.seeds).u0(a.u0);
            let cycles = maps::find_cycle(&map, a.d, &search)?;
            output::write_cycles(sink(g.out.as_deref())?, &cycles)?;
            Ok(0)
        }
        Command::Simulate(a) => {
            let traj = simulate(&a.run, g.seed, a.stream)?;
            output::write_trajectory(sink(g.out.as_deref())?, &traj)?;
            Ok(0)
        }
        Command::Ensemble(a) => {
            let stats = run_ensemble(a, g.seed, execution)?;
            output::write_ensemble(sink(g.out.as_deref())?, &stats)?;
            eprintln!("{}", summary(&stats));
            Ok(0)
        }
        Command::Sweep(a) => {
            let grid = sweep(a, g.seed, execution)?;
            output::write_sweep(sink(g.out.as_deref())?, &grid)?;
            for c in grid.cells.iter().filter(|c| c.error.is_some()) {
                eprintln!("alpha={} l={}: {}", c.alpha, c.l, c.error.as_deref().unwrap_or_default());
            }
            Ok(0)
        }
        Command::Reproduce(a) => {
            let example: Example = a.example.parse()?;
            let dir = g.out.clone().unwrap_or_else(|| PathBuf::from(format!("reproduce_{}", example.as_str())));
            let manifest = reproduce(example, &dir, g.seed, execution)?;
            eprintln!("wrote {} files to {}", manifest.files().count() + 1, dir.display());
            Ok(0)
        }
    }
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => {
            let file = File::create(p).map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display())))?;
            Box::new(BufWriter::new(file))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn summary(stats: &EnsembleStats) -> String {
    format!(
        "paths={} successes={} success_fraction={} mean_hit_step={}",
        stats.paths,
        stats.successes,
        stats.success_fraction,
        stats.mean_hit_step.map(|h| h.to_string()).unwrap_or_else(|| "none".into())
    )
}

pub fn simulate(run: &RunConfig, seed: u64, stream: u64) -> Result<TrajectoryRecord> {
    let map = run.model.build()?;
    engine::run_trajectory(&map, &run.spec()?, run.x0, run.steps, RngStream::new(seed, stream))
}

pub fn run_ensemble(args: &EnsembleArgs, seed: u64, execution: Execution) -> Result<EnsembleStats> {
    let map = args.run.model.build()?;
    engine::ensemble(&map, &args.run.spec()?, &args.config(seed, execution)?)
}

fn sweep(a: &SweepArgs, seed: u64, execution: Execution) -> Result<engine::SweepGrid> {
    let map = a.model.build()?;
    let alphas = parse_grid(&a.alpha)?;
    let ls = parse_grid(&a.l)?;
    let template = a.control.spec(alphas[0], ls[0])?;
    let condition = match &a.condition {
        Some(id) => Some(sweep_condition(id.parse()?, &a.data, &map, &template)?),
        None => None,
    };
    let cfg = if a.paths > 0 {
        let target = a.control.convergence_target()?;
        let mut cfg = EnsembleConfig::new(a.x0, a.steps, a.paths, seed, target).tol(a.tol);
        if let Some(w) = a.window {
            cfg = cfg.window(w);
        }
        Some(cfg)
    } else {
        None
    };
    engine::sweep(&map, &template, &alphas, &ls, cfg.as_ref(), condition, execution)
}

fn sweep_condition(id: ConditionId, data: &ConditionData, map: &MapModel, spec: &ControlSpec) -> Result<SweepCondition> {
    let (d, m) = spec.cycle.map(|c| (c.d, c.m)).unwrap_or((1, 1));
    Ok(match id {
        ConditionId::TocPoint => SweepCondition::TocPoint {
            lipschitz: data.lipschitz(Some(map), 1)?,
            k: spec.k,
        },
        ConditionId::TocCycle => SweepCondition::TocCycle {
            m,
            lipschitz_of_d: data.lipschitz(Some(map), d)?,
        },
        ConditionId::PbcSmooth => SweepCondition::PbcSmooth {
            a: data.multiplier(Some(map), 1)?,
            k: spec.k,
        },
        ConditionId::PbcCycle => SweepCondition::PbcCycle {
            a_of_d_m: data.multiplier(Some(map), d)?.powi(m as i32),
        },
        ConditionId::PbcMax => SweepCondition::PbcMax {
            lipschitz: data.lipschitz(Some(map), 1)?,
            k: spec.k,
        },
        other => return Err(Error::Config(format!("condition `{other}` cannot be swept"))),
    })
}

fn check(a: &CheckArgs) -> Result<i32> {
    let id: ConditionId = a.condition.parse()?;
    let map = a.map.as_deref().map(|name| MapModel::by_name(name, a.r)).transpose()?;
    let map = map.as_ref();
    let noise = &a.noise;
    let report = match id {
        ConditionId::TocPoint => conditions::check_toc_point(noise, a.alpha, a.l, a.k, a.data.lipschitz(map, 1)?)?,
        ConditionId::TocCycle => conditions::check_toc_cycle(noise, a.alpha, a.l, a.m, a.data.lipschitz(map, a.d)?)?,
        ConditionId::PbcSmooth => conditions::check_pbc_smooth(noise, a.alpha, a.l, a.k, a.data.multiplier(map, 1)?)?,
        ConditionId::PbcCycle => {
            let a_d = a.data.multiplier(map, a.d)?;
            conditions::check_pbc_cycle(noise, a.alpha, a.l, a_d.powi(a.m as i32))?
        }
        ConditionId::PbcMax => conditions::check_pbc_max(noise, a.alpha, a.l, a.k, a.data.lipschitz(map, 1)?)?,
        ConditionId::MlContraction => {
            let l = a.data.lipschitz(map, 1)?;
            let m_sup = match a.data.m_sup {
                Some(m) => m,
                None => conditions::check_toc_point(noise, a.alpha, a.l, a.k, l)?.m_sup,
            };
            let ok = conditions::check_ml_contraction(m_sup, l, a.k)?;
            println!(
                "condition_id=ml_contraction value={} threshold={} satisfied={ok} M={}",
                output::fmt_f64(m_sup * l.powi(a.k as i32 - 1)),
                output::fmt_f64(1.0),
                output::fmt_f64(m_sup)
            );
            return Ok(verdict(ok));
        }
        ConditionId::Tpia | ConditionId::Tpib => {
            let wanted_k1 = id == ConditionId::Tpia;
            if wanted_k1 != (a.k == 1) {
                return Err(Error::Config(format!("{id} applies to {}", if wanted_k1 { "k = 1" } else { "k > 1" })));
            }
            let v = conditions::check_pbc_deterministic_signchange(a.alpha, a.l, a.k, a.data.lipschitz(map, 1)?)?;
            let rule = serde_json::to_value(v.rule)?;
            println!("condition_id={id} satisfied={} rule={}", v.satisfied, rule.as_str().unwrap_or("none"));
            return Ok(verdict(v.satisfied));
        }
    };
    println!("{}", report.line());
    Ok(verdict(report.satisfied))
}

fn verdict(satisfied: bool) -> i32 {
    if satisfied {
        0
    } else {
        2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("cyclestab").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn grid_syntax() {
        assert_eq!(parse_grid("0:1.5:0.05").unwrap().len(), 31);
        assert_eq!(parse_grid("0.3").unwrap(), vec![0.3]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("a:1:0.1").is_err());
    }

    #[test]
    fn run_config_argv_round_trips() {
        let cli = parse(&[
            "ensemble", "--map", "ricker", "--r", "3.2", "--control", "pbc", "--d", "2", "--alpha", "0.4", "--l",
            "0.4", "--noise", "bernoulli", "--cycle-points", "0.11,1.89", "--truncate", "--paths", "10",
        ]);
        let Command::Ensemble(a) = &cli.command else { panic!() };
        let mut argv = vec!["cyclestab".to_string(), "ensemble".to_string()];
        argv.extend(a.argv());
        let again = Cli::try_parse_from(argv).unwrap();
        let Command::Ensemble(b) = &again.command else { panic!() };
        assert_eq!(a, b);
        let spec = a.run.spec().unwrap();
        assert_eq!(spec.k, 2);
        assert_eq!(spec.history_depth(), 2);
    }

    #[test]
    fn k_must_match_cycle() {
        let cli = parse(&["simulate", "--map", "ricker", "--r", "3.2", "--control", "pbc", "--d", "2", "--k", "3"]);
        let Command::Simulate(a) = &cli.command else { panic!() };
        assert!(a.run.spec().is_err());
    }

    #[test]
    fn toc_requires_target() {
        let cli = parse(&["simulate", "--map", "ricker", "--r", "2", "--control", "toc", "--alpha", "0.5"]);
        let Command::Simulate(a) = &cli.command else { panic!() };
        assert!(a.run.spec().is_err());
    }

    #[test]
    fn globals_after_subcommand() {
        let cli = parse(&["check", "toc_point", "--L", "1.5", "--seed", "9", "--threads", "2"]);
        assert_eq!(cli.global.seed, 9);
        assert_eq!(cli.global.threads, Some(2));
    }

    #[test]
    fn derived_cycle_data() {
        let d = ConditionData {
            lipschitz: None,
            a: None,
            m_sup: None,
            equilibrium: None,
            radius: 1e-3,
        };
        let f = MapModel::logistic(3.5);
        // closed form multiplier of the logistic 2-cycle: 4 + 2r - r^2
        assert!((d.multiplier(Some(&f), 2).unwrap() - (4.0 + 7.0 - 12.25)).abs() < 1e-9);
        assert!(d.lipschitz(None, 1).is_err());
    }
}
