//! Parameter table for the four worked examples and the bundle writer.
//!
//! Every panel is simulated `runs` times (streams `0..runs` under the base
//! seed) and once as an ensemble. The manifest records, for each CSV, the
//! `cyclestab` arguments that regenerate it byte for byte.

use std::fmt;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::{run_ensemble, simulate, ControlArgs, EnsembleArgs, ModelArgs, RunConfig};
use crate::control::{ControlFamily, PulsePhase};
use crate::engine::Execution;
use crate::maps::{find_cycle, CycleSearch, MapModel};
use crate::noise::NoiseSpec;
use crate::output;
use crate::{Error, Result};

const STEPS: usize = 500;
const PATHS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example {
    Example1,
    Example2,
    Example3,
    Example4,
}

impl Example {
    pub const ALL: [Example; 4] = [Example::Example1, Example::Example2, Example::Example3, Example::Example4];

    pub fn as_str(self) -> &'static str {
        match self {
            Example::Example1 => "example1",
            Example::Example2 => "example2",
            Example::Example3 => "example3",
            Example::Example4 => "example4",
        }
    }

    fn title(self) -> &'static str {
        match self {
            Example::Example1 => "TOC on the chaotic Ricker map: equilibrium K=1 and the 2-cycle {0.1, 1.9}",
            Example::Example2 => "TOC on the logistic map r=3.5: the 2-cycle {3/7, 6/7}",
            Example::Example3 => "PBC on the Maynard Smith model (K=2) and on the Ricker 2-cycle, r=3.2",
            Example::Example4 => "PBC on the Ricker map, equilibrium K=1 (r=2.41, k=1 and r=2.2, k=2)",
        }
    }
}

impl fmt::Display for Example {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Example {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Example::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown example `{s}` (expected example1..example4)")))
    }
}

/// One figure panel: a configuration, how it is simulated, and what is
/// claimed about it.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub id: String,
    pub figure: &'static str,
    pub ensemble: EnsembleArgs,
    /// Single trajectories written (3 with noise, 1 without).
    pub runs: u64,
    pub assertions: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
struct Base {
    map: &'static str,
    r: Option<f64>,
    family: ControlFamily,
    alpha: f64,
    k: Option<usize>,
    cycle: Option<(usize, usize)>,
    x0: f64,
}

fn panel(figure: &'static str, base: Base, l: f64, noise: &NoiseSpec, target: Option<f64>, cycle_points: Option<Vec<f64>>) -> Panel {
    let run = RunConfig {
        model: ModelArgs {
            map: base.map.into(),
            r: base.r,
        },
        control: ControlArgs {
            control: base.family,
            k: base.k,
            m: base.cycle.map(|c| c.1),
            d: base.cycle.map(|c| c.0),
            phase: PulsePhase::EndOfBlock,
            truncate: true,
            target,
            cycle_points,
            noise: if l > 0.0 { noise.clone() } else { NoiseSpec::None },
        },
        alpha: base.alpha,
        l,
        x0: base.x0,
        steps: STEPS,
    };
    let fig = match figure.strip_prefix("Fig. ") {
        Some(n) => format!("fig{n}"),
        None => figure.replace(' ', "_"),
    };
    let id = format!(
        "{fig}_a{}_l{}_x{}",
        tag(base.alpha),
        tag(l),
        tag(base.x0)
    );
    Panel {
        id,
        figure,
        ensemble: EnsembleArgs {
            run,
            paths: PATHS,
            tol: crate::engine::DEFAULT_TOL,
            window: None,
        },
        runs: if l > 0.0 { 3 } else { 1 },
        assertions: Vec::new(),
        notes: Vec::new(),
    }
}

/// `0.32` -> `0p32`, for file names.
fn tag(x: f64) -> String {
    x.to_string().replace('.', "p").replace('-', "m")
}

impl Panel {
    fn assert(mut self, a: &str) -> Self {
        self.assertions.push(a.into());
        self
    }

    fn note(mut self, n: &str) -> Self {
        self.notes.push(n.into());
        self
    }

    fn tol(mut self, tol: f64) -> Self {
        self.ensemble.tol = tol;
        self
    }

    fn paths(mut self, paths: usize) -> Self {
        self.ensemble.paths = paths;
        self
    }
}

/// The panels of one example, in figure order.
pub fn panels(example: Example) -> Result<Vec<Panel>> {
    let bern = NoiseSpec::Bernoulli;
    let unit = NoiseSpec::uniform_unit();
    let mut out = Vec::new();
    match example {
        Example::Example1 => {
            // ln(19)/0.9 ~ 3.2716 makes {0.1, 1.9} an exact 2-cycle
            let r = 19f64.ln() / 0.9;
            let point = Base {
                map: "ricker",
                r: Some(r),
                family: ControlFamily::Toc,
                alpha: 0.7,
                k: Some(2),
                cycle: None,
                x0: 0.5,
            };
            for l in [0.0, 0.32, 0.4, 0.42] {
                let mut p = panel("Fig. 1", point, l, &unit, Some(1.0), None)
                    .tol(1e-2)
                    .note("caption gives m=2, d=1; the pulse period is k = m d = 2")
                    .note("noise uniform on [0,1] as in the simulation setup; the example text names [-1,1]");
                p = match l {
                    0.0 => p.assert("success_fraction = 0 for K=1: without noise the orbit settles on the 2-cycle"),
                    0.4 => p.assert("success_fraction >= 0.9 for K=1 (tol 1e-2, 500 steps, 100 paths, seed 1)"),
                    _ => p.note("verdict not stated in the text; no assertion"),
                };
                out.push(p);
            }
            let cycle = Base {
                alpha: 0.3,
                k: None,
                cycle: Some((2, 1)),
                ..point
            };
            for l in [0.65, 0.7] {
                let p = panel("Fig. 2", cycle, l, &bern, Some(0.1), Some(vec![0.1, 1.9]))
                    .note("target K_1 = 0.1 of the 2-cycle {0.1, 1.9}; k = m d = 2")
                    .note("text: stabilization for l=0.7, none for the other panel and for l > 0.75")
                    .note("noise law not stated for this figure; Bernoulli per the text");
                out.push(p);
            }
        }
        Example::Example2 => {
            let base = Base {
                map: "logistic",
                r: Some(3.5),
                family: ControlFamily::Toc,
                alpha: 0.0,
                k: None,
                cycle: Some((2, 1)),
                x0: 0.5,
            };
            let pts = vec![3.0 / 7.0, 6.0 / 7.0];
            for (alpha, l, figure) in [(0.0, 1.2, "Fig. 3"), (0.0, 1.3, "Fig. 3"), (0.2, 0.75, "Fig. 4"), (0.2, 0.8, "Fig. 4")] {
                let mut p = panel(figure, Base { alpha, ..base }, l, &unit, Some(3.0 / 7.0), Some(pts.clone()))
                    .note("target K_1 = 3/7 of the 2-cycle {3/7, 6/7}; k = m d = 2")
                    .note("noise law not stated; uniform on [0,1] as in the simulation setup");
                if l != 1.3 {
                    p = p.note("text reports convergence to the 2-cycle");
                }
                out.push(p);
            }
        }
        Example::Example3 => {
            let ms = Base {
                map: "maynard_smith",
                r: None,
                family: ControlFamily::Pbc,
                alpha: 0.8,
                k: Some(1),
                cycle: None,
                x0: 2.001,
            };
            for l in [0.0, 0.4, 0.5, 0.7] {
                let verdict = match l {
                    0.0 => "text: x=4 is stable without noise",
                    0.4 => "text: no stabilization of x=2",
                    0.5 => "text: wandering between the equilibria 2 and 4",
                    _ => "text: stabilization of x=2",
                };
                out.push(
                    panel("Fig. 5", ms, l, &bern, Some(2.0), None)
                        .note(verdict)
                        .note("caption gives alpha=0.2, the text alpha=0.8; 0.8 is used")
                        .note("caption lists 'l=04, l=0.4' (typo); panels follow the text: l = 0, 0.4, 0.5, 0.7"),
                );
            }
            let r = 3.2;
            let cycles = find_cycle(&MapModel::ricker(r), 2, &CycleSearch::new(0.0, 10.0))?;
            let pts = cycles
                .first()
                .map(|c| c.points.clone())
                .ok_or_else(|| Error::InvalidInput("Ricker r=3.2 has no 2-cycle".into()))?;
            let ricker = Base {
                map: "ricker",
                r: Some(r),
                family: ControlFamily::Pbc,
                alpha: 0.4,
                k: None,
                cycle: Some((2, 1)),
                x0: 0.5,
            };
            for l in [0.0, 0.2, 0.3, 0.35, 0.4, 0.45] {
                let mut p = panel("Fig. 6", ricker, l, &bern, None, Some(pts.clone()))
                    .note("2-cycle {0.11, 1.89} located numerically; k = m d = 2")
                    .note("noise law not stated; Bernoulli");
                if l == 0.4 {
                    p = p.assert("phase-aligned 2-cycle success_fraction >= 0.8 (100 paths, seed 1)");
                }
                out.push(p);
            }
        }
        Example::Example4 => {
            let base = Base {
                map: "ricker",
                r: Some(2.41),
                family: ControlFamily::Pbc,
                alpha: 0.3,
                k: Some(1),
                cycle: None,
                x0: 0.5,
            };
            out.push(
                panel("text", base, 0.24, &bern, Some(1.0), None)
                    .paths(200)
                    .assert("success_fraction >= 0.9 for K=1 (tol 1e-3, 500 steps, 200 paths, seed 1)")
                    .note("no figure; global stabilization is stated in the text (L = 1.5)"),
            );
            let fig = Base {
                r: Some(2.2),
                k: Some(2),
                ..base
            };
            for (alpha, l, x0) in [(0.28, 0.27, 0.5), (0.28, 0.45, 0.5), (0.1, 0.27, 0.5), (0.1, 0.27, 10.0)] {
                out.push(
                    panel("Fig. 7", Base { alpha, x0, ..fig }, l, &bern, Some(1.0), None)
                        .note("text: global stability observed")
                        .note("noise law not stated; Bernoulli"),
                );
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileRecord {
    pub file: String,
    pub kind: &'static str,
    /// Arguments after `cyclestab`; append `--out FILE` to replay.
    pub argv: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PanelRecord {
    pub id: String,
    pub figure: &'static str,
    pub parameters: EnsembleArgs,
    pub success_fraction: f64,
    pub assertions: Vec<String>,
    pub notes: Vec<String>,
    pub files: Vec<FileRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub example: String,
    pub title: &'static str,
    pub seed: u64,
    pub replay: &'static str,
    pub panels: Vec<PanelRecord>,
}

impl Manifest {
    pub fn files(&self) -> impl Iterator<Item = &FileRecord> {
        self.panels.iter().flat_map(|p| p.files.iter())
    }
}

/// Write every panel's trajectories and ensemble CSV plus `manifest.json`
/// into `dir` (created if missing).
pub fn reproduce(example: Example, dir: &Path, seed: u64, execution: Execution) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let seed_arg = format!("--seed={seed}");
    let mut records = Vec::new();
    for p in panels(example)? {
        let mut files = Vec::new();
        for stream in 0..p.runs {
            let traj = simulate(&p.ensemble.run, seed, stream)?;
            let file = format!("{}_run{stream}.csv", p.id);
            output::write_trajectory(BufWriter::new(File::create(dir.join(&file))?), &traj)?;
            let mut argv = vec!["simulate".to_string()];
            argv.extend(p.ensemble.run.argv());
            argv.push(format!("--stream={stream}"));
            argv.push(seed_arg.clone());
            files.push(FileRecord {
                file,
                kind: "trajectory",
                argv,
            });
        }
        let stats = run_ensemble(&p.ensemble, seed, execution)?;
        let file = format!("{}_ensemble.csv", p.id);
        output::write_ensemble(BufWriter::new(File::create(dir.join(&file))?), &stats)?;
        let mut argv = vec!["ensemble".to_string()];
        argv.extend(p.ensemble.argv());
        argv.push(seed_arg.clone());
        files.push(FileRecord {
            file,
            kind: "ensemble",
            argv,
        });
        records.push(PanelRecord {
            id: p.id,
            figure: p.figure,
            parameters: p.ensemble,
            success_fraction: stats.success_fraction,
            assertions: p.assertions,
            notes: p.notes,
            files,
        });
    }
    let manifest = Manifest {
        example: example.as_str().into(),
        title: example.title(),
        seed,
        replay: "cyclestab <argv...> --out <file>",
        panels: records,
    };
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    fs::write(dir.join("manifest.json"), json)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panel_ids_are_unique() {
        for e in Example::ALL {
            let ps = panels(e).unwrap();
            let mut ids: Vec<_> = ps.iter().map(|p| p.id.clone()).collect();
            ids.sort();
            ids.dedup();
            assert_eq!(ids.len(), ps.len(), "{e}");
            for p in &ps {
                p.ensemble.run.spec().unwrap();
                p.ensemble.config(1, Execution::Sequential).unwrap();
            }
        }
    }

    #[test]
    fn figure_parameters() {
        let ps = panels(Example::Example1).unwrap();
        let ls: Vec<f64> = ps.iter().filter(|p| p.figure == "Fig. 1").map(|p| p.ensemble.run.l).collect();
        assert_eq!(ls, vec![0.0, 0.32, 0.4, 0.42]);
        assert!(ps.iter().all(|p| p.ensemble.run.spec().unwrap().k == 2));

        let ps = panels(Example::Example4).unwrap();
        let fig: Vec<(f64, f64, f64)> = ps
            .iter()
            .filter(|p| p.figure == "Fig. 7")
            .map(|p| (p.ensemble.run.alpha, p.ensemble.run.l, p.ensemble.run.x0))
            .collect();
        assert_eq!(fig, vec![(0.28, 0.27, 0.5), (0.28, 0.45, 0.5), (0.1, 0.27, 0.5), (0.1, 0.27, 10.0)]);

        let ps = panels(Example::Example3).unwrap();
        assert!(ps.iter().filter(|p| p.figure == "Fig. 5").all(|p| p.ensemble.run.x0 == 2.001));
    }

    #[test]
    fn deterministic_panels_have_one_run() {
        for p in panels(Example::Example3).unwrap() {
            assert_eq!(p.runs, if p.ensemble.run.l > 0.0 { 3 } else { 1 });
        }
    }
}
