//! Trajectory simulation, convergence detection, ensembles, empirical
//! contraction rates and `(alpha, l)` sweeps.

mod convergence;
mod ensemble;
mod sweep;

use serde::Serialize;

use crate::control::{controlled_step, ControlSpec, SystemState};
use crate::maps::MapModel;
use crate::noise::RngStream;
use crate::{Error, Result};

pub use convergence::{detect_convergence, ConvergenceResult, Target, TargetKind};
pub use ensemble::{ensemble, EnsembleConfig, EnsembleStats, PathOutcome};
pub use sweep::{axis, sweep, SweepCell, SweepCondition, SweepGrid};

/// Default convergence tolerance.
pub const DEFAULT_TOL: f64 = 1e-3;

/// Default sustain window for a `d`-cycle target: `max(20, 2d)`.
pub fn default_window(d: usize) -> usize {
    20.max(2 * d)
}

/// How ensembles and sweeps distribute work. Output is identical in every
/// mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Everything on the calling thread.
    Sequential,
    /// Rayon's global pool.
    #[default]
    Parallel,
    /// A dedicated pool with this many threads.
    Threads(usize),
}

impl Execution {
    pub fn from_threads(threads: Option<usize>) -> Self {
        match threads {
            None => Execution::Parallel,
            Some(0) | Some(1) => Execution::Sequential,
            Some(n) => Execution::Threads(n),
        }
    }

    /// `(0..n).map(f)` collected in index order.
    pub(crate) fn map_indexed<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        use rayon::prelude::*;
        match self {
            Execution::Sequential => (0..n).map(f).collect(),
            Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
            Execution::Threads(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
                Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
                Err(_) => (0..n).map(f).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    /// `x_0 .. x_N` (shorter when the path diverged).
    pub states: Vec<f64>,
    /// Step indices `n` at which the control produced `x_{n+1}`.
    pub control_steps: Vec<usize>,
    pub diverged: bool,
}

/// Simulate `steps` steps from `x0`. Stops early on divergence.
pub fn run_trajectory(map: &MapModel, spec: &ControlSpec, x0: f64, steps: usize, stream: RngStream) -> Result<TrajectoryRecord> {
    if steps == 0 {
        return Err(Error::invalid("steps must be at least 1"));
    }
    if !x0.is_finite() {
        return Err(Error::invalid("x0 must be finite"));
    }
    spec.validate()?;
    let mut state = SystemState::for_spec(spec, x0, stream);
    let mut states = Vec::with_capacity(steps + 1);
    let mut control_steps = Vec::new();
    states.push(x0);
    let mut diverged = false;
    for n in 0..steps {
        let step = controlled_step(map, spec, &mut state);
        if step.controlled {
            control_steps.push(n);
        }
        states.push(step.x);
        if step.diverged {
            diverged = true;
            break;
        }
    }
    Ok(TrajectoryRecord {
        states,
        control_steps,
        diverged,
    })
}

/// Least-squares slope of `ln |x_{ik} - target|` against the block index
/// `i`, using blocks up to the first one where the distance drops to
/// `1e-12`. `None` when the path does not converge to `target` (tolerance
/// [`DEFAULT_TOL`] over the default window) or fewer than two blocks are
/// usable.
pub fn estimate_contraction_rate(
    map: &MapModel,
    spec: &ControlSpec,
    x0: f64,
    steps: usize,
    stream: RngStream,
    target: f64,
) -> Result<Option<f64>> {
    let traj = run_trajectory(map, spec, x0, steps, stream)?;
    let conv = detect_convergence(&traj, &Target::Point(target), DEFAULT_TOL, default_window(1))?;
    if !conv.converged {
        return Ok(None);
    }
    let k = spec.k.max(1);
    let mut pts = Vec::new();
    for (i, x) in traj.states.iter().step_by(k).enumerate() {
        let z = (x - target).abs();
        if z <= 1e-12 {
            break;
        }
        pts.push((i as f64, z.ln()));
    }
    Ok(slope(&pts))
}

fn slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseSpec;

    #[test]
    fn uncontrolled_logistic_cycle() {
        let f = MapModel::logistic(3.5);
        let t = run_trajectory(&f, &ControlSpec::none(), 3.0 / 7.0, 10, RngStream::new(0, 0)).unwrap();
        assert_eq!(t.states.len(), 11);
        assert!(t.control_steps.is_empty());
        for (n, x) in t.states.iter().enumerate() {
            let want = if n % 2 == 0 { 3.0 / 7.0 } else { 6.0 / 7.0 };
            assert!((x - want).abs() < 1e-9);
        }
    }

    #[test]
    fn hard_reset_to_fixed_point() {
        let f = MapModel::ricker(2.41);
        let spec = ControlSpec::toc(1.0, 0.0, 1, 1.0, NoiseSpec::None);
        let t = run_trajectory(&f, &spec, 0.5, 20, RngStream::new(0, 0)).unwrap();
        assert!(t.states[1..].iter().all(|&x| x == 1.0));
        assert_eq!(t.control_steps, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn divergence_halts() {
        let f = MapModel::custom("grow", |x| 1e5 * x);
        let t = run_trajectory(&f, &ControlSpec::none(), 1.0, 100, RngStream::new(0, 0)).unwrap();
        assert!(t.diverged);
        assert_eq!(t.states.len(), 4);
    }

    #[test]
    fn zero_steps_rejected() {
        let f = MapModel::logistic(3.5);
        assert!(run_trajectory(&f, &ControlSpec::none(), 0.5, 0, RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn linear_contraction_rate() {
        // f(x) = 2x, (1 - alpha) 2 = 0.8
        let f = MapModel::custom("double", |x| 2.0 * x);
        let spec = ControlSpec::toc(0.6, 0.0, 1, 0.0, NoiseSpec::None);
        let rate = estimate_contraction_rate(&f, &spec, 0.5, 200, RngStream::new(0, 0), 0.0)
            .unwrap()
            .unwrap();
        assert!((rate - 0.8f64.ln()).abs() < 1e-6, "{rate}");
    }

    #[test]
    fn chaotic_path_has_no_rate() {
        let f = MapModel::ricker(3.2716);
        let spec = ControlSpec::pbc(0.0, 0.0, 1, NoiseSpec::None);
        assert_eq!(
            estimate_contraction_rate(&f, &spec, 0.5, 500, RngStream::new(0, 0), 1.0).unwrap(),
            None
        );
    }

    #[test]
    fn execution_modes_preserve_order() {
        let seq = Execution::Sequential.map_indexed(100, |i| i * i);
        assert_eq!(Execution::Parallel.map_indexed(100, |i| i * i), seq);
        assert_eq!(Execution::Threads(3).map_indexed(100, |i| i * i), seq);
    }
}
