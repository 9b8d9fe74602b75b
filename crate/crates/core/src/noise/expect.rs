use serde::Serialize;

use super::quadrature::{integrate, integrate_graded, integrate_with_breaks};
use super::{NoiseSpec, RngStream};
use crate::{Error, Result};

const QUAD_TOL: f64 = 1e-13;

/// How an expectation over the noise is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectationMethod {
    /// Exact formula (atom sums, or the antiderivative for uniform noise).
    ClosedForm,
    /// Adaptive Gauss–Legendre for continuous laws; atom sums otherwise.
    Quadrature,
    /// Sample mean over `samples` draws of stream `(seed, 0)`.
    MonteCarlo { samples: usize, seed: u64 },
}

impl ExpectationMethod {
    /// Quadrature for continuous noise, closed form for discrete laws.
    pub fn default_for(noise: &NoiseSpec) -> Self {
        match noise {
            NoiseSpec::Uniform { .. } => ExpectationMethod::Quadrature,
            _ => ExpectationMethod::ClosedForm,
        }
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: usize,
}

/// `E ln|a + b xi|`.
///
/// Returns `f64::NEG_INFINITY` when the law puts an atom at `xi = -a/b`
/// (or when `a = b = 0`); callers read this as an infinite λ.
pub fn expected_log_abs(noise: &NoiseSpec, a: f64, b: f64, method: ExpectationMethod) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("expected_log_abs needs finite coefficients"));
    }
    let log_abs = |v: f64| (a + b * v).abs().ln();
    match method {
        ExpectationMethod::MonteCarlo { samples, seed } => {
            let mut stream = RngStream::new(seed, 0);
            Ok(monte_carlo_log_abs(noise, a, b, samples, &mut stream)?.mean)
        }
        _ if b == 0.0 => Ok(a.abs().ln()),
        _ => match noise {
            NoiseSpec::Uniform { lo, hi } => Ok(match method {
                ExpectationMethod::ClosedForm => uniform_closed_form(a, b, *lo, *hi),
                _ => uniform_quadrature(a, b, *lo, *hi),
            }),
            _ => Ok(atom_sum(noise, log_abs)),
        },
    }
}

fn atom_sum(noise: &NoiseSpec, h: impl Fn(f64) -> f64) -> f64 {
    noise
        .atoms()
        .unwrap_or_default()
        .iter()
        .filter(|(_, p)| *p > 0.0)
        .map(|&(v, p)| p * h(v))
        .sum()
}

/// `t ln|t| - t`, continuous at zero.
fn xlogx_minus_x(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t * t.abs().ln() - t
    }
}

fn uniform_closed_form(a: f64, b: f64, lo: f64, hi: f64) -> f64 {
    let eps = b.abs() * lo.abs().max(hi.abs());
    if a != 0.0 && eps < 1e-4 * a.abs() {
        // ln|a| + E ln(1 + c xi) to fourth order, c = b / a
        let c = b / a;
        let m = |k: i32| (hi.powi(k + 1) - lo.powi(k + 1)) / ((k + 1) as f64 * (hi - lo));
        return a.abs().ln() + c * m(1) - c * c * m(2) / 2.0 + c.powi(3) * m(3) / 3.0
            - c.powi(4) * m(4) / 4.0;
    }
    (xlogx_minus_x(a + b * hi) - xlogx_minus_x(a + b * lo)) / (b * (hi - lo))
}

/// Direct integration when `xi* = -a/b` is well outside the support,
/// otherwise integration in `t = xi - xi*` with `xi* = -a/b`, split at `t = 0` and
/// graded toward the singular point on each side.
fn uniform_quadrature(a: f64, b: f64, lo: f64, hi: f64) -> f64 {
    let root = -a / b;
    if root < lo - 1e-3 * (hi - lo) || root > hi + 1e-3 * (hi - lo) {
        // smooth on the whole interval
        return integrate(&|v: f64| (a + b * v).abs().ln(), lo, hi, QUAD_TOL) / (hi - lo);
    }
    let (tlo, thi) = (lo - root, hi - root);
    let h = |t: f64| (b * t).abs().ln();
    let integral = if tlo < 0.0 && thi > 0.0 {
        integrate_graded(&h, tlo, 0.0, false, QUAD_TOL) + integrate_graded(&h, 0.0, thi, true, QUAD_TOL)
    } else if thi <= 0.0 {
        integrate_graded(&h, tlo, thi, false, QUAD_TOL)
    } else {
        integrate_graded(&h, tlo, thi, true, QUAD_TOL)
    };
    integral / (hi - lo)
}

/// Sample mean and standard error of `ln|a + b xi|` over `samples` draws.
pub fn monte_carlo_log_abs(
    noise: &NoiseSpec,
    a: f64,
    b: f64,
    samples: usize,
    stream: &mut RngStream,
) -> Result<McEstimate> {
    monte_carlo(noise, samples, stream, |v| (a + b * v).abs().ln())
}

fn monte_carlo(
    noise: &NoiseSpec,
    samples: usize,
    stream: &mut RngStream,
    h: impl Fn(f64) -> f64,
) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::invalid("Monte Carlo needs at least one sample"));
    }
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 0..samples {
        let x = h(noise.sample(stream));
        if x == f64::NEG_INFINITY {
            return Ok(McEstimate {
                mean: f64::NEG_INFINITY,
                std_err: f64::NAN,
                samples: i + 1,
            });
        }
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    let var = if samples > 1 { m2 / (samples - 1) as f64 } else { 0.0 };
    Ok(McEstimate {
        mean,
        std_err: (var / samples as f64).sqrt(),
        samples,
    })
}

/// `E max{ ln|alpha + l xi|, ln(|1 - alpha - l xi| L) }`.
///
/// Discrete laws are summed atom by atom. Uniform noise is integrated
/// piecewise between the kinks where the two branches cross; `ClosedForm`
/// falls back to that quadrature.
pub fn expected_max_log(
    noise: &NoiseSpec,
    alpha: f64,
    l: f64,
    lipschitz: f64,
    method: ExpectationMethod,
) -> Result<f64> {
    if !(lipschitz > 0.0) {
        return Err(Error::invalid("Lipschitz constant must be positive"));
    }
    let h = move |v: f64| {
        let left = (alpha + l * v).abs().ln();
        let right = ((1.0 - alpha - l * v).abs() * lipschitz).ln();
        left.max(right)
    };
    match (method, noise) {
        (ExpectationMethod::MonteCarlo { samples, seed }, _) => {
            let mut stream = RngStream::new(seed, 0);
            Ok(monte_carlo(noise, samples, &mut stream, h)?.mean)
        }
        (_, NoiseSpec::Uniform { lo, hi }) => {
            let (lo, hi) = (*lo, *hi);
            let mut kinks = Vec::new();
            if l != 0.0 {
                kinks.push((lipschitz * (1.0 - alpha) - alpha) / (l * (1.0 + lipschitz)));
                if lipschitz != 1.0 {
                    kinks.push((-lipschitz * (1.0 - alpha) - alpha) / (l * (1.0 - lipschitz)));
                }
            }
            Ok(integrate_with_breaks(&h, lo, hi, &kinks, QUAD_TOL) / (hi - lo))
        }
        _ => Ok(atom_sum(noise, h)),
    }
}
