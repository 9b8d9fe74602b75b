use serde::Serialize;

use super::{detect_convergence, run_trajectory, Execution, Target};
use crate::control::ControlSpec;
use crate::maps::MapModel;
use crate::noise::RngStream;
use crate::{Error, Result};

/// Everything an ensemble needs besides the map and the control.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub x0: f64,
    pub steps: usize,
    pub paths: usize,
    pub base_seed: u64,
    pub target: Target,
    pub tol: f64,
    pub window: usize,
    pub execution: Execution,
}

impl EnsembleConfig {
    /// Defaults: tolerance `1e-3`, window `max(20, 2d)`, parallel execution.
    pub fn new(x0: f64, steps: usize, paths: usize, base_seed: u64, target: Target) -> Self {
        let window = super::default_window(target.period());
        Self {
            x0,
            steps,
            paths,
            base_seed,
            target,
            tol: super::DEFAULT_TOL,
            window,
            execution: Execution::default(),
        }
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn window(mut self, window: usize) -> Self {
        self.window = window;
        self
    }

    pub fn execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathOutcome {
    pub path: usize,
    pub converged: bool,
    pub hit_step: Option<usize>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub paths: usize,
    pub successes: usize,
    pub success_fraction: f64,
    /// Mean hit step over converged paths.
    pub mean_hit_step: Option<f64>,
    pub base_seed: u64,
    pub outcomes: Vec<PathOutcome>,
}

/// Run `paths` independent trajectories, path `i` on stream
/// `(base_seed, i)`, and summarise how many settle on the target.
pub fn ensemble(map: &MapModel, spec: &ControlSpec, cfg: &EnsembleConfig) -> Result<EnsembleStats> {
    if cfg.paths == 0 {
        return Err(Error::invalid("an ensemble needs at least one path"));
    }
    spec.validate()?;
    let outcomes = cfg
        .execution
        .map_indexed(cfg.paths, |i| -> Result<PathOutcome> {
            let stream = RngStream::new(cfg.base_seed, i as u64);
            let traj = run_trajectory(map, spec, cfg.x0, cfg.steps, stream)?;
            let c = detect_convergence(&traj, &cfg.target, cfg.tol, cfg.window)?;
            Ok(PathOutcome {
                path: i,
                converged: c.converged,
                hit_step: c.hit_step,
                residual: c.residual,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let hits: Vec<usize> = outcomes.iter().filter_map(|o| o.hit_step).collect();
    let successes = outcomes.iter().filter(|o| o.converged).count();
    Ok(EnsembleStats {
        paths: cfg.paths,
        successes,
        success_fraction: successes as f64 / cfg.paths as f64,
        mean_hit_step: (!hits.is_empty()).then(|| hits.iter().sum::<usize>() as f64 / hits.len() as f64),
        base_seed: cfg.base_seed,
        outcomes,
    })
}
