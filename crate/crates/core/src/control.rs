//! Controlled step functions and the pulse scheduler.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::maps::MapModel;
use crate::noise::{NoiseSpec, RngStream};
use crate::{Error, Result};

/// States with `|x|` above this (or non-finite) mark a trajectory diverged.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlFamily {
    /// Prediction-based control.
    Pbc,
    /// Target-oriented control.
    Toc,
    None,
}

impl FromStr for ControlFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pbc" => Ok(Self::Pbc),
            "toc" => Ok(Self::Toc),
            "none" => Ok(Self::None),
            _ => Err(Error::Parse(format!("unknown control family `{s}`"))),
        }
    }
}

impl fmt::Display for ControlFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pbc => "pbc",
            Self::Toc => "toc",
            Self::None => "none",
        })
    }
}

/// Where inside each block of `k` steps the control fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PulsePhase {
    /// At `n = sk - 1`, the last step of each block.
    #[default]
    EndOfBlock,
    /// At `n = k(s - 1)`, the first step of each block.
    StartOfBlock,
}

impl PulsePhase {
    #[inline]
    pub fn fires(self, n: u64, k: u64) -> bool {
        match self {
            PulsePhase::EndOfBlock => (n + 1) % k == 0,
            PulsePhase::StartOfBlock => n % k == 0,
        }
    }
}

impl FromStr for PulsePhase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "end" | "end_of_block" => Ok(Self::EndOfBlock),
            "start" | "start_of_block" => Ok(Self::StartOfBlock),
            _ => Err(Error::Parse(format!("unknown pulse phase `{s}`"))),
        }
    }
}

impl fmt::Display for PulsePhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::EndOfBlock => "end_of_block",
            Self::StartOfBlock => "start_of_block",
        })
    }
}

/// Cycle stabilization data: control every `k = m d` steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CyclePulse {
    pub d: usize,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlSpec {
    pub family: ControlFamily,
    pub alpha: f64,
    pub l: f64,
    /// Pulse period.
    pub k: usize,
    pub phase: PulsePhase,
    /// TOC target: an equilibrium or one point of the cycle.
    pub target: Option<f64>,
    /// Set for cycle stabilization; PBC then blends with `x_{n-md+1}`.
    pub cycle: Option<CyclePulse>,
    pub truncate: bool,
    pub noise: NoiseSpec,
}

impl ControlSpec {
    /// The uncontrolled map.
    pub fn none() -> Self {
        Self {
            family: ControlFamily::None,
            alpha: 0.0,
            l: 0.0,
            k: 1,
            phase: PulsePhase::EndOfBlock,
            target: None,
            cycle: None,
            truncate: false,
            noise: NoiseSpec::None,
        }
    }

    /// PBC toward a point equilibrium, pulsed every `k` steps.
    pub fn pbc(alpha: f64, l: f64, k: usize, noise: NoiseSpec) -> Self {
        Self {
            family: ControlFamily::Pbc,
            alpha,
            l,
            k,
            noise,
            ..Self::none()
        }
    }

    /// TOC with target `target`, pulsed every `k` steps.
    pub fn toc(alpha: f64, l: f64, k: usize, target: f64, noise: NoiseSpec) -> Self {
        Self {
            family: ControlFamily::Toc,
            alpha,
            l,
            k,
            target: Some(target),
            noise,
            ..Self::none()
        }
    }

    /// Switch to cycle stabilization with period `d` and `m` cycles per
    /// block; sets `k = m d`.
    pub fn with_cycle(mut self, d: usize, m: usize) -> Self {
        self.cycle = Some(CyclePulse { d, m });
        self.k = m * d;
        self
    }

    pub fn with_phase(mut self, phase: PulsePhase) -> Self {
        self.phase = phase;
        self
    }

    pub fn truncated(mut self, truncate: bool) -> Self {
        self.truncate = truncate;
        self
    }

    /// Number of past states the controlled step needs (`m d` for PBC cycle
    /// control, one otherwise).
    pub fn history_depth(&self) -> usize {
        match (self.family, self.cycle) {
            (ControlFamily::Pbc, Some(c)) => (c.m * c.d).max(1),
            _ => 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::config("pulse period k must be positive"));
        }
        if let Some(c) = self.cycle {
            if c.d == 0 || c.m == 0 {
                return Err(Error::config("cycle period d and multiplicity m must be positive"));
            }
            if c.m * c.d != self.k {
                return Err(Error::config(format!(
                    "k = {} but m d = {}",
                    self.k,
                    c.m * c.d
                )));
            }
        }
        if self.family == ControlFamily::None {
            return Ok(());
        }
        if !(0.0..1.0).contains(&self.alpha) && !(self.family == ControlFamily::Toc && self.alpha == 1.0)
        {
            return Err(Error::config(format!("alpha = {} outside [0, 1)", self.alpha)));
        }
        if !(self.l >= 0.0) {
            return Err(Error::config("noise intensity l must be nonnegative"));
        }
        if self.family == ControlFamily::Toc && self.target.is_none() {
            return Err(Error::config("TOC needs a target"));
        }
        Ok(())
    }

    #[inline]
    pub fn fires(&self, n: u64) -> bool {
        self.family != ControlFamily::None && self.phase.fires(n, self.k as u64)
    }
}

/// Step counter, history window and random stream of one trajectory.
#[derive(Debug, Clone)]
pub struct SystemState {
    n: u64,
    window: VecDeque<f64>,
    depth: usize,
    stream: RngStream,
}

impl SystemState {
    /// A fresh state at `n = 0` whose window is filled with copies of `x0`.
    pub fn new(x0: f64, depth: usize, stream: RngStream) -> Self {
        let depth = depth.max(1);
        Self {
            n: 0,
            window: std::iter::repeat_n(x0, depth).collect(),
            depth,
            stream,
        }
    }

    pub fn for_spec(spec: &ControlSpec, x0: f64, stream: RngStream) -> Self {
        Self::new(x0, spec.history_depth(), stream)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `x_n`.
    pub fn current(&self) -> f64 {
        *self.window.back().expect("window is never empty")
    }

    /// `x_{n-depth+1}`, the oldest state in the window.
    pub fn oldest(&self) -> f64 {
        *self.window.front().expect("window is never empty")
    }

    pub fn window(&self) -> impl Iterator<Item = f64> + '_ {
        self.window.iter().copied()
    }

    fn push(&mut self, x: f64) {
        if self.window.len() == self.depth {
            self.window.pop_front();
        }
        self.window.push_back(x);
        self.n += 1;
    }
}

/// Outcome of one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub x: f64,
    pub controlled: bool,
    pub diverged: bool,
}

/// Advance `state` by one step of the controlled system.
///
/// At control steps the family formula is applied with a fresh `xi`; at all
/// other steps the state is mapped by `f`. Non-finite results and
/// `|x| > DIVERGENCE_THRESHOLD` set `diverged`; the state still advances.
pub fn controlled_step(map: &MapModel, spec: &ControlSpec, state: &mut SystemState) -> Step {
    let x = state.current();
    let fx = map.apply(x);
    let controlled = spec.fires(state.n);
    let mut next = if controlled {
        let xi = spec.noise.sample(&mut state.stream);
        let c = spec.alpha + spec.l * xi;
        let anchor = match spec.family {
            ControlFamily::Toc => spec.target.unwrap_or(0.0),
            ControlFamily::Pbc => state.oldest(),
            ControlFamily::None => unreachable!("`fires` is false without a control family"),
        };
        // same as (1 - c) f(x) + c anchor, but exact when f(x) = anchor
        fx + c * (anchor - fx)
    } else {
        fx
    };
    if spec.truncate && next < 0.0 {
        next = 0.0;
    }
    let diverged = !next.is_finite() || next.abs() > DIVERGENCE_THRESHOLD;
    state.push(next);
    Step {
        x: next,
        controlled,
        diverged,
    }
}

/// Map data needed by [`local_scale_factor`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleData {
    /// Lipschitz constant `L` (TOC; `L^m(d)` for cycles).
    Lipschitz(f64),
    /// Derivative `A` at the equilibrium (smooth PBC; `A^m(d)` for cycles).
    Multiplier(f64),
    /// Lipschitz constant for PBC at an equilibrium where `f - K` changes sign.
    SignChange(f64),
}

/// The random Lipschitz factor of one controlled step at the equilibrium,
/// evaluated at noise value `v`:
///
/// * TOC: `|1 - alpha - l v| L`;
/// * smooth PBC: `|(1 - alpha) A + alpha + (1 - A) l v|`;
/// * sign-change PBC: `max{ |alpha + l v|, |1 - alpha - l v| L }`.
pub fn local_scale_factor(spec: &ControlSpec, v: f64, data: ScaleData) -> Result<f64> {
    let (alpha, l) = (spec.alpha, spec.l);
    match (spec.family, data) {
        (ControlFamily::Toc, ScaleData::Lipschitz(big_l)) => Ok((1.0 - alpha - l * v).abs() * big_l),
        (ControlFamily::Pbc, ScaleData::Multiplier(a)) => {
            Ok(((1.0 - alpha) * a + alpha + (1.0 - a) * l * v).abs())
        }
        (ControlFamily::Pbc, ScaleData::SignChange(big_l)) => {
            Ok((alpha + l * v).abs().max((1.0 - alpha - l * v).abs() * big_l))
        }
        (family, data) => Err(Error::config(format!(
            "scale data {data:?} does not apply to control family {family}"
        ))),
    }
}
