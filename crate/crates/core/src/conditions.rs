//! Analytic sufficient conditions for stabilization and the parameter
//! windows they induce.
//!
//! Every checker computes a λ-functional (a negated expected log of the
//! controlled step's local scale factor) and compares it with a Lipschitz
//! budget using a strict inequality. An atom of the noise sitting exactly on
//! the zero of the scale factor makes λ infinite; such reports are flagged
//! `vacuous` and count as satisfied.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::noise::{expected_log_abs, expected_max_log, ExpectationMethod, NoiseSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionId {
    TocPoint,
    TocCycle,
    PbcSmooth,
    PbcCycle,
    PbcMax,
    MlContraction,
    Tpia,
    Tpib,
}

impl ConditionId {
    pub const ALL: [ConditionId; 8] = [
        ConditionId::TocPoint,
        ConditionId::TocCycle,
        ConditionId::PbcSmooth,
        ConditionId::PbcCycle,
        ConditionId::PbcMax,
        ConditionId::MlContraction,
        ConditionId::Tpia,
        ConditionId::Tpib,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConditionId::TocPoint => "toc_point",
            ConditionId::TocCycle => "toc_cycle",
            ConditionId::PbcSmooth => "pbc_smooth",
            ConditionId::PbcCycle => "pbc_cycle",
            ConditionId::PbcMax => "pbc_max",
            ConditionId::MlContraction => "ml_contraction",
            ConditionId::Tpia => "tpia",
            ConditionId::Tpib => "tpib",
        }
    }
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConditionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConditionId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::UnknownCondition(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition_id: ConditionId,
    /// Possibly `+inf`.
    pub lambda: f64,
    pub threshold: f64,
    pub satisfied: bool,
    /// Supremum of the scale factor over `|v| <= 1`.
    #[serde(rename = "M")]
    pub m_sup: f64,
    pub margin: f64,
    /// λ is infinite because an atom of the noise hits the zero of the
    /// scale factor.
    pub vacuous: bool,
}

impl ConditionReport {
    fn new(condition_id: ConditionId, lambda: f64, threshold: f64, m_sup: f64) -> Self {
        Self {
            condition_id,
            lambda,
            threshold,
            satisfied: lambda > threshold,
            m_sup,
            margin: lambda - threshold,
            vacuous: lambda == f64::INFINITY,
        }
    }

    /// `condition_id=… lambda=… threshold=… satisfied=… margin=… M=…`
    pub fn line(&self) -> String {
        let mut s = format!(
            "condition_id={} lambda={} threshold={} satisfied={} margin={} M={}",
            self.condition_id,
            crate::output::fmt_f64(self.lambda),
            crate::output::fmt_f64(self.threshold),
            self.satisfied,
            crate::output::fmt_f64(self.margin),
            crate::output::fmt_f64(self.m_sup),
        );
        if self.vacuous {
            s.push_str(" warning=noise_atom_at_zero");
        }
        s
    }
}

/// A one-dimensional parameter interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
    pub empty: bool,
}

impl ParamRange {
    pub fn open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_closed: false,
            hi_closed: false,
            empty: !(hi - lo > 1e-12),
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_closed: true,
            hi_closed: true,
            empty: hi < lo,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        if self.empty {
            return false;
        }
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }
}

fn lambda_from(expectation: f64) -> f64 {
    // `+ 0.0` turns -0 into 0
    -expectation + 0.0
}

fn require(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(msg))
    }
}

/// TOC at a point equilibrium: `-E ln|1 - alpha - l xi| > k ln L`.
pub fn check_toc_point(noise: &NoiseSpec, alpha: f64, l: f64, k: usize, lipschitz: f64) -> Result<ConditionReport> {
    require(lipschitz >= 1.0, "L must be at least 1")?;
    require(k >= 1, "k must be at least 1")?;
    let e = expected_log_abs(noise, 1.0 - alpha, -l, ExpectationMethod::default_for(noise))?;
    let m_sup = lipschitz * (1.0 - alpha - l).abs().max((1.0 - alpha + l).abs());
    Ok(ConditionReport::new(
        ConditionId::TocPoint,
        lambda_from(e),
        k as f64 * lipschitz.ln(),
        m_sup,
    ))
}

/// TOC at a `d`-cycle: `-E ln|1 - alpha - l xi| > m ln L(d)`.
pub fn check_toc_cycle(noise: &NoiseSpec, alpha: f64, l: f64, m: usize, lipschitz_of_d: f64) -> Result<ConditionReport> {
    require(lipschitz_of_d >= 1.0, "L(d) must be at least 1")?;
    require(m >= 1, "m must be at least 1")?;
    let e = expected_log_abs(noise, 1.0 - alpha, -l, ExpectationMethod::default_for(noise))?;
    Ok(ConditionReport::new(
        ConditionId::TocCycle,
        lambda_from(e),
        m as f64 * lipschitz_of_d.ln(),
        (1.0 - alpha + l) * lipschitz_of_d.powi(m as i32),
    ))
}

/// Deterministic TOC ranges: `alpha in (1 - L^-k, 1)` and
/// `l <= min{1 - alpha, alpha - 1 + L^-k}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TocDeterministicRanges {
    pub alpha: ParamRange,
    inv_lk: f64,
}

impl TocDeterministicRanges {
    /// Admissible noise intensities for a given `alpha`.
    pub fn l_range(&self, alpha: f64) -> ParamRange {
        let cap = (1.0 - alpha).min(alpha - 1.0 + self.inv_lk);
        ParamRange::closed(0.0, cap)
    }
}

pub fn toc_deterministic_ranges(lipschitz: f64, k: usize) -> Result<TocDeterministicRanges> {
    require(lipschitz >= 1.0, "L must be at least 1")?;
    let inv_lk = lipschitz.powi(-(k as i32));
    Ok(TocDeterministicRanges {
        alpha: ParamRange::open(1.0 - inv_lk, 1.0),
        inv_lk,
    })
}

/// Bernoulli window `sqrt((1-alpha)^2 - L^-2k) < l < sqrt((1-alpha)^2 + L^-2k)`,
/// the lower end clipped at zero.
pub fn toc_bernoulli_l_window(alpha: f64, lipschitz: f64, k: usize) -> ParamRange {
    let base = (1.0 - alpha).powi(2);
    let slack = lipschitz.powi(-2 * k as i32);
    ParamRange::open((base - slack).max(0.0).sqrt(), (base + slack).sqrt())
}

/// Smooth PBC at an equilibrium with derivative `A`:
/// `-E ln|(1-alpha) A + alpha + (1-A) l xi| > (k-1) ln|A|`.
pub fn check_pbc_smooth(noise: &NoiseSpec, alpha: f64, l: f64, k: usize, a: f64) -> Result<ConditionReport> {
    pbc_smooth_report(ConditionId::PbcSmooth, noise, alpha, l, k, a)
}

fn pbc_smooth_report(id: ConditionId, noise: &NoiseSpec, alpha: f64, l: f64, k: usize, a: f64) -> Result<ConditionReport> {
    require(k >= 1, "k must be at least 1")?;
    require(a.is_finite(), "A must be finite")?;
    let mean = (1.0 - alpha) * a + alpha;
    let slope = (1.0 - a) * l;
    let e = expected_log_abs(noise, mean, slope, ExpectationMethod::default_for(noise))?;
    let threshold = if k == 1 { 0.0 } else { (k - 1) as f64 * a.abs().ln() };
    Ok(ConditionReport::new(id, lambda_from(e), threshold, mean.abs() + slope.abs()))
}

/// Bernoulli window on `l` for smooth PBC, from the window on `l^2`.
pub fn pbc_bernoulli_l_window(alpha: f64, a: f64, k: usize) -> Result<ParamRange> {
    require(a != 1.0, "A = 1 leaves no noise term")?;
    let base = ((1.0 - alpha) * a + alpha).powi(2);
    let slack = a.abs().powi(-2 * (k as i32 - 1));
    let denom = (1.0 - a).powi(2);
    let l_low = (base - slack) / denom;
    let l_high = (base + slack) / denom;
    Ok(ParamRange::open(l_low.max(0.0).sqrt(), l_high.sqrt()))
}

/// PBC at a `d`-cycle with `A^m(d)` the multiplier over one block:
/// smooth PBC with `k = 1`.
pub fn check_pbc_cycle(noise: &NoiseSpec, alpha: f64, l: f64, a_of_d_m: f64) -> Result<ConditionReport> {
    pbc_smooth_report(ConditionId::PbcCycle, noise, alpha, l, 1, a_of_d_m)
}

/// PBC at a sign-change equilibrium:
/// `-E max{ln|alpha + l xi|, ln(|1 - alpha - l xi| L)} > (k-1) ln L`.
pub fn check_pbc_max(noise: &NoiseSpec, alpha: f64, l: f64, k: usize, lipschitz: f64) -> Result<ConditionReport> {
    require(lipschitz >= 1.0, "L must be at least 1")?;
    require(k >= 1, "k must be at least 1")?;
    let e = expected_max_log(noise, alpha, l, lipschitz, ExpectationMethod::default_for(noise))?;
    let m_sup = [-1.0, 1.0]
        .iter()
        .map(|v| (alpha + l * v).abs().max((1.0 - alpha - l * v).abs() * lipschitz))
        .fold(0.0, f64::max);
    Ok(ConditionReport::new(
        ConditionId::PbcMax,
        lambda_from(e),
        (k - 1) as f64 * lipschitz.ln(),
        m_sup,
    ))
}

/// Which deterministic sign-change rule applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignChangeRule {
    Tpia,
    Tpib,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignChangeVerdict {
    pub satisfied: bool,
    pub rule: SignChangeRule,
}

/// Deterministic sign-change rules for PBC with small noise
/// (`l < min{alpha, 1 - alpha}`):
///
/// * `k = 1`: `alpha > 1 - 1/L` and `l < 1/L - 1 + alpha`;
/// * `k > 1`: `1 < L^k < L + 1`, `alpha in (1 - L^-k, L^{1-k})` and
///   `l < min{L^-k - 1 + alpha, L^{1-k} - alpha}`.
pub fn check_pbc_deterministic_signchange(alpha: f64, l: f64, k: usize, lipschitz: f64) -> Result<SignChangeVerdict> {
    require(k >= 1, "k must be at least 1")?;
    require(lipschitz > 0.0, "L must be positive")?;
    require(
        l >= 0.0 && l < alpha.min(1.0 - alpha),
        "l must lie in [0, min{alpha, 1 - alpha})",
    )?;
    let big_l = lipschitz;
    let (ok, rule) = if k == 1 {
        let ok = alpha > 1.0 - 1.0 / big_l && l < 1.0 / big_l - 1.0 + alpha;
        (ok, SignChangeRule::Tpia)
    } else {
        let lk = big_l.powi(k as i32);
        let inv_lk = 1.0 / lk;
        let cap = big_l.powi(1 - k as i32);
        let ok = 1.0 < lk
            && lk < big_l + 1.0
            && alpha > 1.0 - inv_lk
            && alpha < cap
            && l < (inv_lk - 1.0 + alpha).min(cap - alpha);
        (ok, SignChangeRule::Tpib)
    };
    Ok(SignChangeVerdict {
        satisfied: ok,
        rule: if ok { rule } else { SignChangeRule::None },
    })
}

/// Lower end `(r - 2)/r` of the deterministic PBC stability interval for
/// the Ricker equilibrium `K = 1` under control at every step.
pub fn pbc_schwarzian_threshold(r: f64) -> Result<f64> {
    require(r > 0.0, "r must be positive")?;
    Ok((r - 2.0) / r)
}

/// `M L^{k-1} < 1`: every path started close enough contracts.
pub fn check_ml_contraction(m_sup: f64, lipschitz: f64, k: usize) -> Result<bool> {
    require(m_sup > 0.0 && lipschitz > 0.0, "M and L must be positive")?;
    Ok(m_sup * lipschitz.powi(k as i32 - 1) < 1.0)
}
