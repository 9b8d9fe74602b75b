use serde::Serialize;

use super::lipschitz::{estimate_lipschitz, Radius};
use super::MapModel;
use crate::{Error, Result};

/// Grid-seeded Newton search for the fixed points of `f^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleSearch {
    pub lo: f64,
    pub hi: f64,
    /// Number of uniformly spaced Newton seeds, endpoints included.
    pub seeds: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Radius of the neighbourhood used for the local Lipschitz constants.
    pub u0: f64,
}

impl CycleSearch {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            seeds: 2000,
            tol: 1e-12,
            max_iter: 100,
            u0: 1e-3,
        }
    }

    pub fn seeds(mut self, seeds: usize) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn u0(mut self, u0: f64) -> Self {
        self.u0 = u0;
        self
    }
}

/// A `d`-cycle `K_1 -> K_2 -> ... -> K_d -> K_1` together with its
/// multipliers and local Lipschitz constants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleInfo {
    pub d: usize,
    /// Ordered so that `f(K_i) = K_{i+1}`, starting from the smallest point.
    pub points: Vec<f64>,
    /// `f'(K_i)`.
    pub multipliers: Vec<f64>,
    /// Lipschitz constants pinned at each `K_i` over `[K_i - u0, K_i + u0]`.
    pub lipschitz: Vec<f64>,
    pub u0: f64,
    /// `prod f'(K_i)`.
    pub multiplier_product: f64,
    /// `prod max{1, L_i}`.
    pub lipschitz_product: f64,
}

impl CycleInfo {
    /// Analyse a known orbit. `points` must already be ordered along the
    /// orbit; no rotation is applied.
    pub fn from_points(map: &MapModel, points: Vec<f64>, u0: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("a cycle needs at least one point"));
        }
        if !(u0 > 0.0) {
            return Err(Error::invalid("u0 must be positive"));
        }
        let step = u0 / 1000.0;
        let multipliers: Vec<f64> = points.iter().map(|&k| map.deriv(k)).collect();
        let lipschitz = points
            .iter()
            .map(|&k| estimate_lipschitz(map, k, Radius::Local(u0), step))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            d: points.len(),
            multiplier_product: multipliers.iter().product(),
            lipschitz_product: lipschitz_product(&lipschitz),
            points,
            multipliers,
            lipschitz,
            u0,
        })
    }

    /// `A(d) = prod A_i`.
    pub fn cycle_multiplier(&self) -> f64 {
        self.multiplier_product
    }

    /// `L(d) = prod max{1, L_i}`.
    pub fn lipschitz_product(&self) -> f64 {
        self.lipschitz_product
    }

    /// Point `K_{i+1}` for a zero-based index, wrapping around the orbit.
    pub fn point(&self, i: usize) -> f64 {
        self.points[i % self.d]
    }
}

/// `prod max{1, L_i}`.
pub fn lipschitz_product(lipschitz: &[f64]) -> f64 {
    lipschitz.iter().map(|l| l.max(1.0)).product()
}

/// All cycles of minimal period `d` whose points are found by Newton's
/// method on `f^d(x) - x` from the grid seeds in `[search.lo, search.hi]`.
///
/// Seeds on which Newton fails are discarded. Each orbit is reported once,
/// starting from its smallest point; the list is sorted by that point.
pub fn find_cycle(map: &MapModel, d: usize, search: &CycleSearch) -> Result<Vec<CycleInfo>> {
    if d == 0 {
        return Err(Error::invalid("cycle period must be at least 1"));
    }
    if !(search.hi >= search.lo) || search.seeds == 0 {
        return Err(Error::invalid("empty search interval"));
    }
    let span = search.hi - search.lo;
    let slack = 1e-9 * (1.0 + span);
    let mut roots: Vec<f64> = (0..search.seeds)
        .filter_map(|i| {
            let x0 = if search.seeds == 1 {
                search.lo
            } else {
                search.lo + span * i as f64 / (search.seeds - 1) as f64
            };
            newton_periodic(map, d, x0, search.tol, search.max_iter)
        })
        .filter(|&x| x >= search.lo - slack && x <= search.hi + slack)
        .collect();
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-8 * (1.0 + b.abs()));

    let mut starts: Vec<f64> = Vec::new();
    for x in roots {
        if minimal_period(map, x, d, search.tol) != d {
            continue;
        }
        let Some(orbit) = orbit_from(map, x, d) else {
            continue;
        };
        let start = orbit.iter().copied().fold(f64::INFINITY, f64::min);
        if starts
            .iter()
            .all(|s| (s - start).abs() > 1e-7 * (1.0 + start.abs()))
        {
            starts.push(start);
        }
    }
    starts.sort_by(f64::total_cmp);

    starts
        .into_iter()
        .filter_map(|s| orbit_from(map, s, d))
        .map(|pts| CycleInfo::from_points(map, pts, search.u0))
        .collect()
}

fn newton_periodic(map: &MapModel, d: usize, mut x: f64, tol: f64, max_iter: usize) -> Option<f64> {
    for _ in 0..max_iter {
        let fx = power(map, x, d)?;
        let h = fx - x;
        let dh = map.iterate_deriv(x, d) - 1.0;
        if !dh.is_finite() || dh == 0.0 {
            return None;
        }
        let step = h / dh;
        x -= step;
        if !x.is_finite() {
            return None;
        }
        if step.abs() <= tol * (1.0 + x.abs()) {
            let residual = power(map, x, d)? - x;
            return (residual.abs() <= 1e-8 * (1.0 + x.abs())).then_some(x);
        }
    }
    None
}

fn power(map: &MapModel, x: f64, n: usize) -> Option<f64> {
    map.iterate(x, n).ok()
}

/// Smallest divisor `p` of `d` with `|f^p(x) - x| <= 10 tol`.
fn minimal_period(map: &MapModel, x: f64, d: usize, tol: f64) -> usize {
    (1..=d)
        .filter(|p| d % p == 0)
        .find(|&p| match power(map, x, p) {
            Some(y) => (y - x).abs() <= 10.0 * tol * x.abs().max(1.0),
            None => false,
        })
        .unwrap_or(d)
}

/// The orbit of `x` of length `d`, rotated to start from its smallest point
/// and regenerated from there.
fn orbit_from(map: &MapModel, x: f64, d: usize) -> Option<Vec<f64>> {
    let mut orbit = Vec::with_capacity(d);
    let mut y = x;
    for _ in 0..d {
        orbit.push(y);
        y = map.eval(y).ok()?;
    }
    let (imin, _) = orbit
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))?;
    let mut pts = Vec::with_capacity(d);
    let mut y = orbit[imin];
    for _ in 0..d {
        pts.push(y);
        y = map.eval(y).ok()?;
    }
    Some(pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ricker_example_two_cycle() {
        let f = MapModel::ricker(19f64.ln() / 0.9);
        let cycles = find_cycle(&f, 2, &CycleSearch::new(0.0, 5.0)).unwrap();
        assert_eq!(cycles.len(), 1);
        let c = &cycles[0];
        assert!((c.points[0] - 0.1).abs() < 1e-9);
        assert!((c.points[1] - 1.9).abs() < 1e-9);
    }

    #[test]
    fn ricker_r32_two_cycle() {
        let f = MapModel::ricker(3.2);
        let cycles = find_cycle(&f, 2, &CycleSearch::new(0.0, 5.0)).unwrap();
        assert_eq!(cycles.len(), 1);
        assert!((cycles[0].points[0] - 0.11).abs() < 0.01);
        assert!((cycles[0].points[1] - 1.89).abs() < 0.01);
    }

    #[test]
    fn logistic_two_cycle_closed_form() {
        let r: f64 = 3.5;
        let disc = ((r - 3.0) * (r + 1.0)).sqrt();
        let lo = (1.0 + r - disc) / (2.0 * r);
        let hi = (1.0 + r + disc) / (2.0 * r);
        assert!((lo - 3.0 / 7.0).abs() < 1e-15 && (hi - 6.0 / 7.0).abs() < 1e-15);

        let f = MapModel::logistic(r);
        let cycles = find_cycle(&f, 2, &CycleSearch::new(0.0, 1.0)).unwrap();
        assert_eq!(cycles.len(), 1);
        let c = &cycles[0];
        assert!((c.points[0] - lo).abs() < 1e-9);
        assert!((c.points[1] - hi).abs() < 1e-9);
        // 4 + 2r - r^2 and the direct product agree
        let direct = f.deriv(lo) * f.deriv(hi);
        assert!((direct - (4.0 + 2.0 * r - r * r)).abs() < 1e-12);
        assert!((c.cycle_multiplier() + 1.25).abs() < 1e-9);
    }

    #[test]
    fn maynard_smith_equilibria() {
        let f = MapModel::maynard_smith();
        let cycles = find_cycle(&f, 1, &CycleSearch::new(0.0, 10.0)).unwrap();
        let pts: Vec<f64> = cycles.iter().map(|c| c.points[0]).collect();
        assert_eq!(pts.len(), 3, "{pts:?}");
        assert!(pts[0].abs() < 1e-10);
        assert!((pts[1] - 2.0).abs() < 1e-10);
        assert!((pts[2] - 4.0).abs() < 1e-10);
    }

    #[test]
    fn fixed_point_as_one_cycle() {
        let f = MapModel::ricker(2.41);
        let c = CycleInfo::from_points(&f, vec![1.0], 1e-3).unwrap();
        assert!((c.cycle_multiplier() + 1.41).abs() < 1e-12);
    }

    #[test]
    fn lipschitz_product_clamps_at_one() {
        assert_eq!(lipschitz_product(&[0.5, 0.5, 0.5]), 1.0);
        assert_eq!(lipschitz_product(&[0.5, 2.0, 3.0]), 6.0);
    }

    #[test]
    fn empty_result_is_valid() {
        // no 2-cycle below the period-doubling point
        let f = MapModel::logistic(2.8);
        assert!(find_cycle(&f, 2, &CycleSearch::new(0.0, 1.0)).unwrap().is_empty());
    }

    #[test]
    fn rejects_zero_period() {
        let f = MapModel::logistic(3.5);
        assert!(find_cycle(&f, 0, &CycleSearch::new(0.0, 1.0)).is_err());
    }
}
