//! Bounded i.i.d. noise sources and the expected-log functionals that drive
//! every stabilization condition.
//!
//! # Random streams
//!
//! Every trajectory owns an [`RngStream`] derived from a `(base_seed,
//! stream_index)` pair. The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`),
//! keyed with `seed_from_u64(base_seed)` and positioned on stream
//! `stream_index` via `set_stream`. ChaCha is counter based, so a given pair
//! always yields the same variates no matter which thread consumes it or in
//! what order streams are created.

mod expect;
pub mod quadrature;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{Error, Result};

pub use expect::{
    expected_log_abs, expected_max_log, monte_carlo_log_abs, ExpectationMethod, McEstimate,
};

/// Distribution of the perturbation `xi`. All variants are supported on a
/// subset of `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSpec {
    /// `xi = 0`.
    None,
    /// `xi = +-1` with probability 1/2 each.
    Bernoulli,
    /// Continuous uniform on `[lo, hi]`, `-1 <= lo < hi <= 1`.
    Uniform { lo: f64, hi: f64 },
    /// Finitely many atoms `(value, probability)`.
    Discrete { atoms: Vec<(f64, f64)> },
}

impl NoiseSpec {
    /// Uniform on `[-1, 1]`.
    pub fn uniform() -> Self {
        NoiseSpec::Uniform { lo: -1.0, hi: 1.0 }
    }

    /// Uniform on `[0, 1]`.
    pub fn uniform_unit() -> Self {
        NoiseSpec::Uniform { lo: 0.0, hi: 1.0 }
    }

    pub fn uniform_on(lo: f64, hi: f64) -> Result<Self> {
        if !(lo >= -1.0 && hi <= 1.0 && lo < hi) {
            return Err(Error::invalid(format!(
                "uniform support [{lo}, {hi}] must be a nonempty subset of [-1, 1]"
            )));
        }
        Ok(NoiseSpec::Uniform { lo, hi })
    }

    pub fn discrete(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("discrete noise needs at least one atom"));
        }
        for &(v, p) in &atoms {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!("atom {v} lies outside [-1, 1]")));
            }
            if !(p >= 0.0) {
                return Err(Error::invalid(format!("negative probability {p}")));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("probabilities sum to {total}, not 1")));
        }
        Ok(NoiseSpec::Discrete { atoms })
    }

    /// Atoms of a purely discrete law (`None` and `Bernoulli` included).
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            NoiseSpec::None => Some(vec![(0.0, 1.0)]),
            NoiseSpec::Bernoulli => Some(vec![(-1.0, 0.5), (1.0, 0.5)]),
            NoiseSpec::Discrete { atoms } => Some(atoms.clone()),
            NoiseSpec::Uniform { .. } => None,
        }
    }

    /// True when the law is invariant under `xi -> -xi`.
    pub fn is_symmetric(&self) -> bool {
        match self {
            NoiseSpec::None | NoiseSpec::Bernoulli => true,
            NoiseSpec::Uniform { lo, hi } => lo == &-hi,
            NoiseSpec::Discrete { atoms } => atoms.iter().all(|&(v, p)| {
                let mirrored: f64 = atoms.iter().filter(|a| a.0 == -v).map(|a| a.1).sum();
                let own: f64 = atoms.iter().filter(|a| a.0 == v).map(|a| a.1).sum();
                (mirrored - own).abs() < 1e-12 || p == 0.0
            }),
        }
    }

    /// Mean and variance of `xi`.
    pub fn moments(&self) -> (f64, f64) {
        match self {
            NoiseSpec::Uniform { lo, hi } => (0.5 * (lo + hi), (hi - lo).powi(2) / 12.0),
            _ => {
                let atoms = self.atoms().unwrap_or_default();
                let mean: f64 = atoms.iter().map(|(v, p)| v * p).sum();
                let var = atoms.iter().map(|(v, p)| p * (v - mean).powi(2)).sum();
                (mean, var)
            }
        }
    }

    /// Draw the next variate from `stream`. `None` consumes nothing.
    pub fn sample(&self, stream: &mut RngStream) -> f64 {
        match self {
            NoiseSpec::None => 0.0,
            NoiseSpec::Bernoulli => {
                if stream.rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            NoiseSpec::Uniform { lo, hi } => lo + (hi - lo) * stream.rng.random::<f64>(),
            NoiseSpec::Discrete { atoms } => {
                let u: f64 = stream.rng.random();
                let mut acc = 0.0;
                for &(v, p) in atoms {
                    acc += p;
                    if u < acc {
                        return v;
                    }
                }
                atoms.last().map(|a| a.0).unwrap_or(0.0)
            }
        }
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseSpec::None => f.write_str("none"),
            NoiseSpec::Bernoulli => f.write_str("bernoulli"),
            NoiseSpec::Uniform { lo, hi } if *lo == -1.0 && *hi == 1.0 => f.write_str("uniform"),
            NoiseSpec::Uniform { lo, hi } if *lo == 0.0 && *hi == 1.0 => f.write_str("uniform01"),
            NoiseSpec::Uniform { lo, hi } => write!(f, "uniform:{lo}:{hi}"),
            NoiseSpec::Discrete { atoms } => {
                f.write_str("discrete:")?;
                for (i, (v, p)) in atoms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}:{p}")?;
                }
                Ok(())
            }
        }
    }
}

/// Parses `none`, `bernoulli`, `uniform` (on `[-1, 1]`), `uniform01` (on
/// `[0, 1]`), `uniform:<lo>:<hi>` and `discrete:<v1>:<p1>,<v2>:<p2>,...`.
impl FromStr for NoiseSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{t}` in noise spec `{s}`")))
        };
        match s {
            "none" => return Ok(NoiseSpec::None),
            "bernoulli" => return Ok(NoiseSpec::Bernoulli),
            "uniform" => return Ok(NoiseSpec::uniform()),
            "uniform01" => return Ok(NoiseSpec::uniform_unit()),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("uniform:") {
            let (lo, hi) = rest
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected uniform:<lo>:<hi>, got `{s}`")))?;
            return NoiseSpec::uniform_on(num(lo)?, num(hi)?);
        }
        if let Some(rest) = s.strip_prefix("discrete:") {
            let atoms = rest
                .split(',')
                .map(|pair| {
                    let (v, p) = pair.split_once(':').ok_or_else(|| {
                        Error::Parse(format!("expected <value>:<prob>, got `{pair}`"))
                    })?;
                    Ok((num(v)?, num(p)?))
                })
                .collect::<Result<Vec<_>>>()?;
            return NoiseSpec::discrete(atoms);
        }
        Err(Error::Parse(format!("unknown noise `{s}`")))
    }
}

/// A reproducible random stream identified by `(base_seed, stream_index)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    base_seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(base_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
        rng.set_stream(stream_index);
        Self {
            base_seed,
            stream_index,
            rng,
        }
    }

    pub fn base_seed(&self) -> u64 {
        self.base_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// A uniform variate on `[0, 1)`.
    pub fn next_unit(&mut self) -> f64 {
        self.rng.random()
    }
}

/// Next variate of `noise` from `stream`.
pub fn sample(noise: &NoiseSpec, stream: &mut RngStream) -> f64 {
    noise.sample(stream)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn none_is_zero() {
        let mut s = RngStream::new(1, 0);
        assert_eq!(sample(&NoiseSpec::None, &mut s), 0.0);
    }

    #[test]
    fn bernoulli_takes_plus_minus_one() {
        let mut s = RngStream::new(3, 9);
        let mut seen = [false; 2];
        for _ in 0..1000 {
            let v = sample(&NoiseSpec::Bernoulli, &mut s);
            assert!(v == 1.0 || v == -1.0);
            seen[(v > 0.0) as usize] = true;
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn uniform_mean_within_clt_bound() {
        let mut s = RngStream::new(11, 0);
        let n = 1_000_000;
        let noise = NoiseSpec::uniform();
        let mut sum = 0.0;
        for _ in 0..n {
            let v = noise.sample(&mut s);
            assert!((-1.0..=1.0).contains(&v));
            sum += v;
        }
        let bound = 3.0 * (1.0 / 3f64.sqrt()) / 1000.0;
        assert!((sum / n as f64).abs() < bound);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let draw = |seed, idx| {
            let mut s = RngStream::new(seed, idx);
            (0..16).map(|_| s.next_unit()).collect::<Vec<_>>()
        };
        assert_eq!(draw(5, 2), draw(5, 2));
        assert_ne!(draw(5, 2), draw(5, 3));
        assert_ne!(draw(5, 2), draw(6, 2));
    }

    #[test]
    fn discrete_validation() {
        assert!(NoiseSpec::discrete(vec![(0.5, 0.5), (-0.5, 0.5)]).is_ok());
        assert!(NoiseSpec::discrete(vec![(0.5, 0.5), (-0.5, 0.4)]).is_err());
        assert!(NoiseSpec::discrete(vec![(1.5, 1.0)]).is_err());
        assert!(NoiseSpec::discrete(vec![(0.5, -0.5), (0.2, 1.5)]).is_err());
        assert!(NoiseSpec::discrete(vec![]).is_err());
    }

    #[test]
    fn parse_and_display() {
        for s in ["none", "bernoulli", "uniform", "uniform01", "discrete:-1:0.25,0.5:0.75"] {
            let n: NoiseSpec = s.parse().unwrap();
            assert_eq!(n.to_string(), s);
        }
        assert_eq!(
            "uniform:-0.5:0.5".parse::<NoiseSpec>().unwrap(),
            NoiseSpec::Uniform { lo: -0.5, hi: 0.5 }
        );
        assert!("gaussian".parse::<NoiseSpec>().is_err());
        assert!("discrete:0.1".parse::<NoiseSpec>().is_err());
        assert!("uniform:-2:1".parse::<NoiseSpec>().is_err());
    }

    #[test]
    fn symmetry_and_moments() {
        assert!(NoiseSpec::uniform().is_symmetric());
        assert!(!NoiseSpec::uniform_unit().is_symmetric());
        assert!(NoiseSpec::Bernoulli.is_symmetric());
        let d = NoiseSpec::discrete(vec![(0.5, 0.5), (-0.5, 0.5)]).unwrap();
        assert!(d.is_symmetric());
        assert_eq!(NoiseSpec::Bernoulli.moments(), (0.0, 1.0));
        let (m, v) = NoiseSpec::uniform().moments();
        assert_eq!(m, 0.0);
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
    }
}
