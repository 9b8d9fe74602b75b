use serde::Serialize;

use super::{ensemble, EnsembleConfig, Execution};
use crate::conditions::{self, ConditionReport};
use crate::control::ControlSpec;
use crate::maps::MapModel;
use crate::{Error, Result};

/// The analytic checker evaluated in every sweep cell, with the map data it
/// needs. The noise law is taken from the control template.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum SweepCondition {
    TocPoint { lipschitz: f64, k: usize },
    TocCycle { m: usize, lipschitz_of_d: f64 },
    PbcSmooth { a: f64, k: usize },
    PbcCycle { a_of_d_m: f64 },
    PbcMax { lipschitz: f64, k: usize },
}

impl SweepCondition {
    pub fn check(&self, template: &ControlSpec, alpha: f64, l: f64) -> Result<ConditionReport> {
        let noise = &template.noise;
        match *self {
            SweepCondition::TocPoint { lipschitz, k } => conditions::check_toc_point(noise, alpha, l, k, lipschitz),
            SweepCondition::TocCycle { m, lipschitz_of_d } => {
                conditions::check_toc_cycle(noise, alpha, l, m, lipschitz_of_d)
            }
            SweepCondition::PbcSmooth { a, k } => conditions::check_pbc_smooth(noise, alpha, l, k, a),
            SweepCondition::PbcCycle { a_of_d_m } => conditions::check_pbc_cycle(noise, alpha, l, a_of_d_m),
            SweepCondition::PbcMax { lipschitz, k } => conditions::check_pbc_max(noise, alpha, l, k, lipschitz),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCell {
    pub alpha: f64,
    pub l: f64,
    pub success_fraction: Option<f64>,
    pub lambda: Option<f64>,
    pub satisfied: Option<bool>,
    pub error: Option<String>,
}

/// Row-major grid: `alpha` is the slow axis, `l` the fast one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub alphas: Vec<f64>,
    pub ls: Vec<f64>,
    pub cells: Vec<SweepCell>,
}

impl SweepGrid {
    pub fn cell(&self, alpha_index: usize, l_index: usize) -> &SweepCell {
        &self.cells[alpha_index * self.ls.len() + l_index]
    }

    pub fn row(&self, alpha_index: usize) -> &[SweepCell] {
        let n = self.ls.len();
        &self.cells[alpha_index * n..(alpha_index + 1) * n]
    }
}

/// Grid `lo, lo + step, ...` up to `hi`, inclusive when `hi` lies on the
/// grid up to rounding.
pub fn axis(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite() && step.is_finite()) || step <= 0.0 {
        return Err(Error::invalid(format!("bad grid {lo}:{hi}:{step}")));
    }
    if hi < lo {
        return Err(Error::invalid(format!("grid upper end {hi} below lower end {lo}")));
    }
    let ratio = (hi - lo) / step;
    let nearest = ratio.round();
    let n = if (ratio - nearest).abs() <= 1e-9 { nearest } else { ratio.floor() } as usize;
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

/// Evaluate the analytic condition, and optionally an ensemble, in every
/// `(alpha, l)` cell. Failures are stored in the cell and never abort the
/// sweep. Cells run under `execution`; ensembles inside a cell run on the
/// cell's thread.
pub fn sweep(
    map: &MapModel,
    template: &ControlSpec,
    alphas: &[f64],
    ls: &[f64],
    ensemble_cfg: Option<&EnsembleConfig>,
    condition: Option<SweepCondition>,
    execution: Execution,
) -> Result<SweepGrid> {
    if alphas.is_empty() || ls.is_empty() {
        return Err(Error::invalid("sweep axes must be nonempty"));
    }
    let inner = ensemble_cfg.map(|c| c.clone().execution(Execution::Sequential));
    let cells = execution.map_indexed(alphas.len() * ls.len(), |idx| {
        let alpha = alphas[idx / ls.len()];
        let l = ls[idx % ls.len()];
        let mut cell = SweepCell {
            alpha,
            l,
            success_fraction: None,
            lambda: None,
            satisfied: None,
            error: None,
        };
        let mut errors = Vec::new();
        if let Some(cond) = condition {
            match cond.check(template, alpha, l) {
                Ok(r) => {
                    cell.lambda = Some(r.lambda);
                    cell.satisfied = Some(r.satisfied);
                }
                Err(e) => errors.push(e.to_string()),
            }
        }
        if let Some(cfg) = &inner {
            let spec = ControlSpec {
                alpha,
                l,
                ..template.clone()
            };
            match ensemble(map, &spec, cfg) {
                Ok(s) => cell.success_fraction = Some(s.success_fraction),
                Err(e) => errors.push(e.to_string()),
            }
        }
        if !errors.is_empty() {
            cell.error = Some(errors.join("; "));
        }
        cell
    });
    Ok(SweepGrid {
        alphas: alphas.to_vec(),
        ls: ls.to_vec(),
        cells,
    })
}
