use serde::Serialize;

use super::TrajectoryRecord;
use crate::maps::CycleInfo;
use crate::{Error, Result};

/// What a trajectory is expected to settle on.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Point(f64),
    /// Orbit points `K_1 .. K_d` with `f(K_i) = K_{i+1}`.
    Cycle(Vec<f64>),
}

impl Target {
    pub fn cycle(info: &CycleInfo) -> Self {
        Target::Cycle(info.points.clone())
    }

    pub fn period(&self) -> usize {
        match self {
            Target::Point(_) => 1,
            Target::Cycle(p) => p.len().max(1),
        }
    }

    fn points(&self) -> &[f64] {
        match self {
            Target::Point(k) => std::slice::from_ref(k),
            Target::Cycle(p) => p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    Point,
    Cycle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceResult {
    pub converged: bool,
    /// First index from which every later state is within `tol` of the
    /// (phase-aligned) target.
    pub hit_step: Option<usize>,
    /// Largest phase-aligned distance over the final window; `+inf` for
    /// diverged paths.
    pub residual: f64,
    pub target_kind: TargetKind,
    /// Index `j` such that `x_n` is compared with `K_{(n + j) mod d + 1}`.
    pub phase: usize,
}

/// Decide whether the last `window` states sit within `tol` of the target.
///
/// For a cycle every phase alignment is tried and the one with the smallest
/// final-window residual is kept, so an exact cycle is recognised whichever
/// point the path happens to be on at the end.
pub fn detect_convergence(traj: &TrajectoryRecord, target: &Target, tol: f64, window: usize) -> Result<ConvergenceResult> {
    let pts = target.points();
    let d = pts.len();
    if d == 0 {
        return Err(Error::invalid("empty cycle target"));
    }
    if window < d || window == 0 {
        return Err(Error::invalid(format!("window {window} is shorter than the period {d}")));
    }
    let target_kind = if matches!(target, Target::Point(_)) {
        TargetKind::Point
    } else {
        TargetKind::Cycle
    };
    let xs = &traj.states;
    if traj.diverged || xs.iter().any(|x| !x.is_finite()) {
        return Ok(ConvergenceResult {
            converged: false,
            hit_step: None,
            residual: f64::INFINITY,
            target_kind,
            phase: 0,
        });
    }
    let tail_start = xs.len().saturating_sub(window);
    let err = |n: usize, phase: usize| (xs[n] - pts[(n + phase) % d]).abs();

    let (phase, residual) = (0..d)
        .map(|p| {
            let r = (tail_start..xs.len()).map(|n| err(n, p)).fold(0.0, f64::max);
            (p, r)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("d >= 1");

    let long_enough = xs.len() >= window;
    let converged = long_enough && residual < tol;
    let hit_step = if converged {
        let mut h = xs.len();
        while h > 0 && err(h - 1, phase) < tol {
            h -= 1;
        }
        Some(h)
    } else {
        None
    };
    Ok(ConvergenceResult {
        converged,
        hit_step,
        residual,
        target_kind,
        phase,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traj(states: Vec<f64>) -> TrajectoryRecord {
        TrajectoryRecord {
            states,
            control_steps: Vec::new(),
            diverged: false,
        }
    }

    #[test]
    fn constant_path_converges_immediately() {
        let r = detect_convergence(&traj(vec![1.0; 50]), &Target::Point(1.0), 1e-6, 20).unwrap();
        assert!(r.converged);
        assert_eq!(r.hit_step, Some(0));
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn cycle_either_phase() {
        let a: Vec<f64> = (0..40).map(|n| if n % 2 == 0 { 0.1 } else { 1.9 }).collect();
        let b: Vec<f64> = (0..41).map(|n| if n % 2 == 0 { 0.1 } else { 1.9 }).collect();
        let target = Target::Cycle(vec![0.1, 1.9]);
        for t in [a, b] {
            let r = detect_convergence(&traj(t), &target, 1e-9, 20).unwrap();
            assert!(r.converged);
            assert_eq!(r.hit_step, Some(0));
            assert_eq!(r.target_kind, TargetKind::Cycle);
        }
        let shifted: Vec<f64> = (0..40).map(|n| if n % 2 == 0 { 1.9 } else { 0.1 }).collect();
        let r = detect_convergence(&traj(shifted), &target, 1e-9, 20).unwrap();
        assert!(r.converged);
        assert_eq!(r.phase, 1);
    }

    #[test]
    fn hit_step_marks_start_of_sustained_regime() {
        let mut xs = vec![5.0, 3.0, 1.0005, 2.0];
        xs.extend(std::iter::repeat_n(1.0, 30));
        let r = detect_convergence(&traj(xs), &Target::Point(1.0), 1e-3, 20).unwrap();
        assert_eq!(r.hit_step, Some(4));
    }

    #[test]
    fn diverged_path() {
        let mut t = traj(vec![1.0, 1e13]);
        t.diverged = true;
        let r = detect_convergence(&t, &Target::Point(1.0), 1e-3, 1).unwrap();
        assert!(!r.converged);
        assert_eq!(r.residual, f64::INFINITY);
    }

    #[test]
    fn short_path_does_not_converge() {
        let r = detect_convergence(&traj(vec![1.0; 5]), &Target::Point(1.0), 1e-3, 20).unwrap();
        assert!(!r.converged);
    }

    #[test]
    fn window_must_cover_period() {
        let t = traj(vec![1.0; 50]);
        assert!(detect_convergence(&t, &Target::Cycle(vec![0.1, 0.5, 0.9]), 1e-3, 2).is_err());
    }
}
