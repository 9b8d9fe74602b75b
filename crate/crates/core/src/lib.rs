//! Pulsed stochastic stabilization of point equilibria and cycles of
//! one-dimensional maps.
//!
//! Two control families are supported: prediction-based control (PBC),
//! `x -> f(x) - (alpha + l xi)(f(x) - x)`, and target-oriented control (TOC),
//! `x -> (1 - alpha - l xi) f(x) + (alpha + l xi) T`, both applied every `k`-th
//! step with a bounded i.i.d. perturbation `xi` of the control parameter.
//!
//! The crate is split into:
//!
//! * [`maps`]: the built-in test maps, cycle finding, multipliers and
//!   Lipschitz estimates;
//! * [`noise`]: bounded noise sources and the expected-log functionals;
//! * [`control`]: the controlled step and the pulse scheduler;
//! * [`conditions`]: the analytic sufficient conditions and parameter windows;
//! * [`engine`]: trajectories, convergence detection, ensembles and sweeps;
//! * [`cli`]: the `cyclestab` command-line front end and the example
//!   reproduction table.

pub mod cli;
pub mod conditions;
pub mod control;
pub mod engine;
mod error;
pub mod maps;
pub mod noise;
pub mod output;

pub use error::{Error, Result};
