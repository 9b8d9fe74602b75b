use cyclestab::conditions::{check_ml_contraction, check_toc_point};
use cyclestab::control::ControlSpec;
use cyclestab::engine::{
    axis, ensemble, estimate_contraction_rate, run_trajectory, sweep, EnsembleConfig, Execution, SweepCondition, Target,
};
use cyclestab::maps::{find_cycle, CycleSearch, MapModel};
use cyclestab::noise::{NoiseSpec, RngStream};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    /// Blocks of a globally `L`-Lipschitz map under TOC contract by at least
    /// `M L^(k-1)` whenever that factor is below one.
    #[test]
    fn contraction_envelope(
        big_l in 1.0f64..1.5,
        k in 1usize..4,
        alpha in 0.0f64..1.0,
        l_frac in 0.0f64..1.0,
        z0_frac in -1.0f64..1.0,
        seed in any::<u64>(),
        bern in any::<bool>(),
    ) {
        let l = l_frac * (1.0 - alpha);
        let noise = if bern { NoiseSpec::Bernoulli } else { NoiseSpec::uniform() };
        let m = check_toc_point(&noise, alpha, l, k, big_l).unwrap().m_sup;
        prop_assume!(check_ml_contraction(m, big_l, k).unwrap());
        let rate = m * big_l.powi(k as i32 - 1);

        let g = MapModel::custom("lsin", move |z: f64| big_l * z.sin());
        let u = 1e-3;
        let z0 = z0_frac * u / big_l.powi(k as i32 - 1);
        let spec = ControlSpec::toc(alpha, l, k, 0.0, noise);
        let t = run_trajectory(&g, &spec, z0, 40 * k, RngStream::new(seed, 0)).unwrap();
        for (i, z) in t.states.iter().step_by(k).enumerate() {
            prop_assert!(z.abs() <= rate.powi(i as i32) * u + 1e-12, "block {i}: {z}");
        }
    }
}

#[test]
fn bernoulli_contraction_rate_is_negative_and_bounded() {
    let f = MapModel::ricker(2.41);
    let spec = ControlSpec::toc(0.3, 0.24, 1, 1.0, NoiseSpec::Bernoulli);
    let report = check_toc_point(&NoiseSpec::Bernoulli, 0.3, 0.24, 1, 1.5).unwrap();
    let bound = -(report.lambda - 1.5f64.ln());
    let rates: Vec<f64> = (0..100)
        .filter_map(|i| estimate_contraction_rate(&f, &spec, 0.5, 3000, RngStream::new(1, i), 1.0).unwrap())
        .collect();
    assert!(rates.len() >= 90, "only {} converged", rates.len());
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    // linearized rate E ln|1 - alpha - l xi| + ln|f'(1)|
    let linear = -report.lambda + 1.41f64.ln();
    assert!(mean < 0.0 && mean <= bound + 0.01, "mean {mean}, bound {bound}");
    assert!((mean - linear).abs() < 0.5 * linear.abs(), "mean {mean}, linearized {linear}");
}

#[test]
fn cycle_subsequences_converge_separately() {
    let f = MapModel::ricker(3.2);
    let c = find_cycle(&f, 2, &CycleSearch::new(0.0, 10.0)).unwrap().remove(0);
    let spec = ControlSpec::pbc(0.4, 0.4, 1, NoiseSpec::Bernoulli).with_cycle(2, 1).truncated(true);
    let cfg = EnsembleConfig::new(0.5, 500, 50, 1, Target::cycle(&c)).execution(Execution::Sequential);
    let stats = ensemble(&f, &spec, &cfg).unwrap();
    assert!(stats.successes > 0);
    for o in stats.outcomes.iter().filter(|o| o.converged) {
        let t = run_trajectory(&f, &spec, 0.5, 500, RngStream::new(1, o.path as u64)).unwrap();
        let tail = &t.states[t.states.len() - 40..];
        // each parity class settles on its own cycle point
        let mut hits = [usize::MAX; 2];
        for j in 0..2 {
            let sub: Vec<f64> = tail.iter().skip(j).step_by(2).copied().collect();
            let which = (0..2).find(|&p| sub.iter().all(|x| (x - c.points[p]).abs() < cfg.tol));
            hits[j] = which.expect("subsequence converges to one cycle point");
        }
        assert_ne!(hits[0], hits[1]);
    }
}

#[test]
fn results_do_not_depend_on_threads() {
    let f = MapModel::ricker(19f64.ln() / 0.9);
    let spec = ControlSpec::toc(0.7, 0.4, 2, 1.0, NoiseSpec::uniform_unit()).truncated(true);
    let cfg = EnsembleConfig::new(0.5, 500, 64, 42, Target::Point(1.0)).tol(1e-2);
    let runs: Vec<_> = [Execution::Sequential, Execution::Parallel, Execution::Threads(3)]
        .into_iter()
        .map(|e| ensemble(&f, &spec, &cfg.clone().execution(e)).unwrap())
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);

    let g = MapModel::ricker(2.41);
    let template = ControlSpec::pbc(0.0, 0.0, 1, NoiseSpec::Bernoulli);
    let cond = SweepCondition::PbcMax { lipschitz: 1.5, k: 1 };
    let small = EnsembleConfig::new(0.5, 200, 8, 7, Target::Point(1.0));
    let grids: Vec<_> = [Execution::Sequential, Execution::Threads(4)]
        .into_iter()
        .map(|e| sweep(&g, &template, &axis(0.0, 0.6, 0.2).unwrap(), &axis(0.0, 0.5, 0.1).unwrap(), Some(&small), Some(cond), e).unwrap())
        .collect();
    assert_eq!(grids[0], grids[1]);
}

#[test]
fn analytic_band_on_the_alpha_zero_row() {
    let f = MapModel::ricker(2.41);
    let template = ControlSpec::toc(0.0, 0.0, 1, 1.0, NoiseSpec::Bernoulli);
    let cond = SweepCondition::TocPoint { lipschitz: 1.5, k: 1 };
    let ls = axis(0.0, 1.5, 0.005).unwrap();
    let grid = sweep(&f, &template, &[0.0], &ls, None, Some(cond), Execution::Sequential).unwrap();
    let sat: Vec<f64> = grid.cells.iter().filter(|c| c.satisfied == Some(true)).map(|c| c.l).collect();
    let (lo, hi) = (sat[0], sat[sat.len() - 1]);
    assert!((lo - 0.7454).abs() <= 0.005 && (hi - 1.2019).abs() <= 0.005, "({lo}, {hi})");
    // the band is one contiguous run of cells
    assert_eq!(sat.len(), ((hi - lo) / 0.005).round() as usize + 1);
}

#[test]
fn satisfied_cells_succeed_at_least_as_often() {
    let f = MapModel::ricker(2.41);
    let template = ControlSpec::pbc(0.0, 0.0, 1, NoiseSpec::Bernoulli).truncated(true);
    let cond = SweepCondition::PbcMax { lipschitz: 1.5, k: 1 };
    let cfg = EnsembleConfig::new(0.5, 500, 20, 1, Target::Point(1.0));
    let grid = sweep(&f, &template, &axis(0.0, 0.9, 0.1).unwrap(), &axis(0.0, 0.5, 0.05).unwrap(), Some(&cfg), Some(cond), Execution::Parallel).unwrap();
    let mean = |want: bool| {
        let v: Vec<f64> = grid.cells.iter().filter(|c| c.satisfied == Some(want)).filter_map(|c| c.success_fraction).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    assert!(mean(true) >= mean(false), "{} < {}", mean(true), mean(false));
}
