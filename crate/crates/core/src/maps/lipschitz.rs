use super::MapModel;
use crate::{Error, Result};

/// Upper end of the domain scanned for global constants, `[0, 50]`.
pub const DEFAULT_GLOBAL_DOMAIN: f64 = 50.0;
/// Grid step used for global constants.
pub const DEFAULT_GLOBAL_STEP: f64 = 1e-4;

/// Neighbourhood over which a Lipschitz constant pinned at a point is taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Radius {
    /// `[center - r, center + r]`.
    Local(f64),
    /// `[0, x_max]`.
    Global { x_max: f64 },
}

impl Radius {
    pub fn global() -> Self {
        Radius::Global {
            x_max: DEFAULT_GLOBAL_DOMAIN,
        }
    }
}

/// `sup |f(x) - f(center)| / |x - center|` over a uniform grid of spacing
/// `step` covering the neighbourhood, the center itself excluded.
///
/// Grid points are laid out symmetrically around `center` for local radii
/// (so both endpoints are sampled) and from `0` for the global domain.
pub fn estimate_lipschitz(map: &MapModel, center: f64, radius: Radius, step: f64) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::invalid("grid step must be positive"));
    }
    let fc = map.eval(center)?;
    let mut sup: f64 = 0.0;
    let mut visit = |x: f64| {
        let dx = x - center;
        if dx == 0.0 {
            return;
        }
        let y = map.apply(x);
        if y.is_finite() {
            sup = sup.max((y - fc).abs() / dx.abs());
        }
    };
    match radius {
        Radius::Local(r) => {
            if !(r > 0.0) {
                return Err(Error::invalid("radius must be positive"));
            }
            let n = (r / step).ceil().max(1.0) as usize;
            for i in 1..=n {
                let dx = r * i as f64 / n as f64;
                visit(center - dx);
                visit(center + dx);
            }
        }
        Radius::Global { x_max } => {
            if !(x_max > 0.0) {
                return Err(Error::invalid("global domain must be positive"));
            }
            let n = (x_max / step).round() as usize;
            for i in 0..=n {
                visit(x_max * i as f64 / n as f64);
            }
        }
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_map_slope() {
        let f = MapModel::custom("half", |x| 0.5 * x);
        let l = estimate_lipschitz(&f, 0.0, Radius::Local(1.0), 1e-3).unwrap();
        assert!((l - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ricker_global_constant_is_below_one_and_a_half() {
        let f = MapModel::ricker(2.41);
        let l = estimate_lipschitz(&f, 1.0, Radius::global(), DEFAULT_GLOBAL_STEP).unwrap();
        assert!(l <= 1.5 && l > 1.45, "{l}");
    }

    #[test]
    fn local_constant_approaches_derivative() {
        let f = MapModel::maynard_smith();
        let l = estimate_lipschitz(&f, 2.0, Radius::Local(1e-3), 1e-6).unwrap();
        assert!((l - 7.0 / 3.0).abs() < 2e-3, "{l}");
    }

    #[test]
    fn bad_inputs() {
        let f = MapModel::ricker(2.0);
        assert!(estimate_lipschitz(&f, 1.0, Radius::Local(0.0), 1e-3).is_err());
        assert!(estimate_lipschitz(&f, 1.0, Radius::Local(1.0), 0.0).is_err());
        assert!(estimate_lipschitz(&f, f64::NAN, Radius::Local(1.0), 1e-3).is_err());
    }
}
