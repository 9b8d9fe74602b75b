//! One-dimensional maps and the cycle analysis built on top of them.

mod cycles;
mod lipschitz;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::{Error, Result};

pub use cycles::{find_cycle, CycleInfo, CycleSearch};
pub use lipschitz::{estimate_lipschitz, Radius, DEFAULT_GLOBAL_DOMAIN, DEFAULT_GLOBAL_STEP};

/// Step used by the central finite-difference derivative.
pub const FD_STEP: f64 = 1e-6;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum MapKind {
    Ricker { r: f64 },
    Logistic { r: f64 },
    MaynardSmith,
    Custom { f: ScalarFn, df: Option<ScalarFn> },
}

/// A named map `x -> f(x)` with parameters and (optionally) an analytic
/// derivative.
#[derive(Clone)]
pub struct MapModel {
    name: String,
    params: Vec<(String, f64)>,
    kind: MapKind,
}

impl fmt::Debug for MapModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapModel")
            .field("name", &self.name)
            .field("params", &self.params)
            .finish()
    }
}

impl MapModel {
    /// Ricker map `x e^{r(1-x)}`.
    pub fn ricker(r: f64) -> Self {
        Self {
            name: "ricker".into(),
            params: vec![("r".into(), r)],
            kind: MapKind::Ricker { r },
        }
    }

    /// Logistic map `r x (1-x)`.
    pub fn logistic(r: f64) -> Self {
        Self {
            name: "logistic".into(),
            params: vec![("r".into(), r)],
            kind: MapKind::Logistic { r },
        }
    }

    /// Maynard Smith map `3x / (2 + (x-3)^2)`.
    pub fn maynard_smith() -> Self {
        Self {
            name: "maynard_smith".into(),
            params: Vec::new(),
            kind: MapKind::MaynardSmith,
        }
    }

    /// A user supplied map without an analytic derivative.
    pub fn custom<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            params: Vec::new(),
            kind: MapKind::Custom {
                f: Arc::new(f),
                df: None,
            },
        }
    }

    /// A user supplied map together with its derivative.
    pub fn custom_with_derivative<F, D>(name: impl Into<String>, f: F, df: D) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            params: Vec::new(),
            kind: MapKind::Custom {
                f: Arc::new(f),
                df: Some(Arc::new(df)),
            },
        }
    }

    /// Attach named parameters to a custom map (informational only).
    pub fn with_params(mut self, params: Vec<(String, f64)>) -> Self {
        self.params = params;
        self
    }

    /// Look up a built-in by name. `r` is required by `ricker` and `logistic`.
    pub fn by_name(name: &str, r: Option<f64>) -> Result<Self> {
        let need_r = || r.ok_or_else(|| Error::config(format!("map `{name}` needs --r")));
        match name.parse::<BuiltinMap>()? {
            BuiltinMap::Ricker => Ok(Self::ricker(need_r()?)),
            BuiltinMap::Logistic => Ok(Self::logistic(need_r()?)),
            BuiltinMap::MaynardSmith => Ok(Self::maynard_smith()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn has_analytic_derivative(&self) -> bool {
        !matches!(self.kind, MapKind::Custom { df: None, .. })
    }

    /// Raw evaluation without the finiteness check. Used in hot loops where
    /// the caller handles blow-up itself.
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match &self.kind {
            MapKind::Ricker { r } => x * (r * (1.0 - x)).exp(),
            MapKind::Logistic { r } => r * x * (1.0 - x),
            MapKind::MaynardSmith => 3.0 * x / (2.0 + (x - 3.0) * (x - 3.0)),
            MapKind::Custom { f, .. } => f(x),
        }
    }

    /// `f(x)`, failing with a domain error when the result is not finite.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(self.domain(x));
        }
        let y = self.apply(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(self.domain(x))
        }
    }

    /// `f^n(x)`; `f^0` is the identity.
    pub fn iterate(&self, x: f64, n: usize) -> Result<f64> {
        let mut y = x;
        for _ in 0..n {
            y = self.eval(y)?;
        }
        Ok(y)
    }

    /// `f'(x)`: analytic for the built-ins, central difference otherwise.
    pub fn deriv(&self, x: f64) -> f64 {
        match &self.kind {
            MapKind::Ricker { r } => (1.0 - r * x) * (r * (1.0 - x)).exp(),
            MapKind::Logistic { r } => r * (1.0 - 2.0 * x),
            MapKind::MaynardSmith => {
                let q = 2.0 + (x - 3.0) * (x - 3.0);
                3.0 * (q - 2.0 * x * (x - 3.0)) / (q * q)
            }
            MapKind::Custom { df: Some(df), .. } => df(x),
            MapKind::Custom { df: None, .. } => self.fd_deriv(x),
        }
    }

    /// Central finite-difference derivative with step [`FD_STEP`].
    pub fn fd_deriv(&self, x: f64) -> f64 {
        (self.apply(x + FD_STEP) - self.apply(x - FD_STEP)) / (2.0 * FD_STEP)
    }

    /// `(f^n)'(x)` by the chain rule.
    pub fn iterate_deriv(&self, x: f64, n: usize) -> f64 {
        let mut y = x;
        let mut dy = 1.0;
        for _ in 0..n {
            dy *= self.deriv(y);
            y = self.apply(y);
        }
        dy
    }

    fn domain(&self, x: f64) -> Error {
        Error::Domain {
            map: self.name.clone(),
            x,
        }
    }
}

/// Names accepted by [`MapModel::by_name`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinMap {
    Ricker,
    Logistic,
    MaynardSmith,
}

impl FromStr for BuiltinMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "ricker" => Ok(Self::Ricker),
            "logistic" => Ok(Self::Logistic),
            "maynard_smith" | "maynardsmith" | "maynard" => Ok(Self::MaynardSmith),
            _ => Err(Error::UnknownMap(s.to_string())),
        }
    }
}
