//! CSV writers for trajectories, ensembles and sweeps.
//!
//! Floats are written in scientific notation with 17 significant digits
//! (`1.2345678901234567e-1`), which round-trips every `f64` exactly.
//! Non-finite values are written as `inf`, `-inf` and `nan`.

use std::io::Write;

use crate::engine::{EnsembleStats, SweepGrid, TrajectoryRecord};
use crate::maps::CycleInfo;
use crate::Result;

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.16e}")
    }
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

/// `n,x,controlled`.
pub fn write_trajectory<W: Write>(out: W, traj: &TrajectoryRecord) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["n", "x", "controlled"])?;
    let mut fired = traj.control_steps.iter().peekable();
    for (n, x) in traj.states.iter().enumerate() {
        // states[n] was produced by the step taken at n - 1
        let controlled = n > 0 && fired.next_if(|&&s| s == n - 1).is_some();
        w.write_record([n.to_string(), fmt_f64(*x), u8::from(controlled).to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `path,converged,hit_step,residual`; `hit_step` is empty for paths that
/// did not converge.
pub fn write_ensemble<W: Write>(out: W, stats: &EnsembleStats) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["path", "converged", "hit_step", "residual"])?;
    for o in &stats.outcomes {
        w.write_record([
            o.path.to_string(),
            u8::from(o.converged).to_string(),
            o.hit_step.map(|h| h.to_string()).unwrap_or_default(),
            fmt_f64(o.residual),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `alpha,l,success_fraction,lambda,satisfied`; cells without an ensemble
/// leave `success_fraction` empty and cells whose checker failed leave
/// `lambda` and `satisfied` empty.
pub fn write_sweep<W: Write>(out: W, grid: &SweepGrid) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["alpha", "l", "success_fraction", "lambda", "satisfied"])?;
    for c in &grid.cells {
        w.write_record([
            fmt_f64(c.alpha),
            fmt_f64(c.l),
            c.success_fraction.map(fmt_f64).unwrap_or_default(),
            c.lambda.map(fmt_f64).unwrap_or_default(),
            c.satisfied.map(|s| u8::from(s).to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `cycle,i,point,derivative,lipschitz,cycle_multiplier,lipschitz_product`,
/// one row per orbit point.
pub fn write_cycles<W: Write>(out: W, cycles: &[CycleInfo]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(["cycle", "i", "point", "derivative", "lipschitz", "cycle_multiplier", "lipschitz_product"])?;
    for (c, info) in cycles.iter().enumerate() {
        for (i, x) in info.points.iter().enumerate() {
            w.write_record([
                c.to_string(),
                i.to_string(),
                fmt_f64(*x),
                fmt_f64(info.multipliers[i]),
                fmt_f64(info.lipschitz[i]),
                fmt_f64(info.multiplier_product),
                fmt_f64(info.lipschitz_product),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
        }
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(f64::NAN), "nan");
    }
}
