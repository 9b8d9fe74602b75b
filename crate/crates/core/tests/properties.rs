use cyclestab::conditions::{
    check_pbc_max, check_pbc_smooth, check_toc_point, pbc_bernoulli_l_window, toc_bernoulli_l_window,
};
use cyclestab::control::{controlled_step, ControlSpec, SystemState};
use cyclestab::engine::run_trajectory;
use cyclestab::maps::{find_cycle, CycleSearch, MapModel};
use cyclestab::noise::{expected_log_abs, expected_max_log, ExpectationMethod, NoiseSpec, RngStream};
use proptest::prelude::*;

fn symmetric_noise() -> impl Strategy<Value = NoiseSpec> {
    prop_oneof![
        Just(NoiseSpec::Bernoulli),
        Just(NoiseSpec::uniform()),
        (0.05f64..1.0).prop_map(|h| NoiseSpec::uniform_on(-h, h).unwrap()),
        (0.05f64..1.0, 0.05f64..0.45).prop_map(|(v, p)| {
            NoiseSpec::discrete(vec![(-v, p), (0.0, 1.0 - 2.0 * p), (v, p)]).unwrap()
        }),
    ]
}

/// `n` points strictly inside `(lo, hi)` and `n` points beyond it by more
/// than `1e-6`, all nonnegative.
fn inside_outside(lo: f64, hi: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let inside = (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect();
    let mut outside: Vec<f64> = (0..n / 2).map(|i| hi + 1e-6 + 0.02 * (i as f64 + 1.0)).collect();
    if lo > 1e-5 {
        outside.extend((0..n - n / 2).map(|i| (lo - 1e-6) * i as f64 / (n - n / 2) as f64));
    } else {
        outside.extend((0..n - n / 2).map(|i| hi + 1.0 + i as f64 * 0.01));
    }
    (inside, outside)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sign_symmetry(noise in symmetric_noise(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let method = ExpectationMethod::default_for(&noise);
        let plus = expected_log_abs(&noise, a, b, method).unwrap();
        let minus = expected_log_abs(&noise, a, -b, method).unwrap();
        prop_assert!((plus - minus).abs() <= 1e-12 * (1.0 + plus.abs()), "{plus} vs {minus}");
    }

    #[test]
    fn toc_window_matches_checker(alpha in 0.0f64..0.95, big_l in 1.0f64..2.0, k in 1usize..4) {
        let w = toc_bernoulli_l_window(alpha, big_l, k);
        prop_assume!(!w.empty);
        let (inside, outside) = inside_outside(w.lo, w.hi, 50);
        for l in inside {
            let r = check_toc_point(&NoiseSpec::Bernoulli, alpha, l, k, big_l).unwrap();
            prop_assert!(r.satisfied, "l={l} inside ({}, {})", w.lo, w.hi);
        }
        for l in outside {
            let r = check_toc_point(&NoiseSpec::Bernoulli, alpha, l, k, big_l).unwrap();
            prop_assert!(!r.satisfied, "l={l} outside ({}, {})", w.lo, w.hi);
        }
    }

    #[test]
    fn pbc_window_matches_checker(alpha in 0.0f64..0.95, a in prop_oneof![-4.0f64..-1.05, 1.05f64..4.0], k in 1usize..3) {
        let w = pbc_bernoulli_l_window(alpha, a, k).unwrap();
        prop_assume!(!w.empty);
        let (inside, outside) = inside_outside(w.lo, w.hi, 50);
        for l in inside {
            let r = check_pbc_smooth(&NoiseSpec::Bernoulli, alpha, l, k, a).unwrap();
            prop_assert!(r.satisfied, "l={l} inside ({}, {})", w.lo, w.hi);
        }
        for l in outside {
            let r = check_pbc_smooth(&NoiseSpec::Bernoulli, alpha, l, k, a).unwrap();
            prop_assert!(!r.satisfied, "l={l} outside ({}, {})", w.lo, w.hi);
        }
    }

    /// Where `(1 - alpha - l v) L >= alpha + l v` at every noise value, the
    /// max functional reduces to the TOC-style `E ln((1 - alpha - l xi) L)`.
    #[test]
    fn pointwise_max_selection(alpha in 0.0f64..0.5, l in 0.0f64..0.3, big_l in 1.0f64..2.0) {
        let dominated = [-1.0f64, 1.0].iter().all(|v| (1.0 - alpha - l * v) * big_l >= alpha + l * v && alpha + l * v > 0.0);
        prop_assume!(dominated);
        for noise in [NoiseSpec::Bernoulli, NoiseSpec::uniform()] {
            let method = ExpectationMethod::default_for(&noise);
            let max = expected_max_log(&noise, alpha, l, big_l, method).unwrap();
            let toc = expected_log_abs(&noise, 1.0 - alpha, -l, method).unwrap() + big_l.ln();
            prop_assert!((max - toc).abs() < 1e-10, "{max} vs {toc}");
        }
        let r = check_pbc_max(&NoiseSpec::Bernoulli, alpha, l, 1, big_l).unwrap();
        let t = check_toc_point(&NoiseSpec::Bernoulli, alpha, l, 1, big_l).unwrap();
        prop_assert!((r.lambda - (t.lambda - big_l.ln())).abs() < 1e-12);
    }

    #[test]
    fn truncation_keeps_states_nonnegative(
        seed in any::<u64>(),
        r in 2.0f64..4.0,
        alpha in 0.0f64..0.9,
        l in 0.0f64..1.5,
        k in 1usize..4,
        toc in any::<bool>(),
        x0 in 0.0f64..5.0,
    ) {
        let f = MapModel::logistic(r);
        let noise = NoiseSpec::uniform();
        let spec = if toc {
            ControlSpec::toc(alpha, l, k, 0.5, noise)
        } else {
            ControlSpec::pbc(alpha, l, k, noise)
        }
        .truncated(true);
        let t = run_trajectory(&f, &spec, x0, 300, RngStream::new(seed, 0)).unwrap();
        prop_assert!(t.states.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn toc_leaves_the_target_fixed(seed in any::<u64>(), alpha in 0.0f64..1.0, l in 0.0f64..2.0, k in 1usize..4) {
        let f = MapModel::ricker(19f64.ln() / 0.9);
        let spec = ControlSpec::toc(alpha, l, k, 1.0, NoiseSpec::uniform());
        let mut state = SystemState::for_spec(&spec, 1.0, RngStream::new(seed, 0));
        for _ in 0..50 {
            prop_assert_eq!(controlled_step(&f, &spec, &mut state).x, 1.0);
        }
    }

    #[test]
    fn analytic_and_finite_difference_derivatives_agree(x in 0.05f64..6.0, r in 1.5f64..4.0) {
        for f in [MapModel::ricker(r), MapModel::logistic(r), MapModel::maynard_smith()] {
            let (a, fd) = (f.deriv(x), f.fd_deriv(x));
            prop_assert!((a - fd).abs() <= 1e-6 * (1.0 + a.abs()), "{}: {a} vs {fd}", f.name());
        }
    }
}

#[test]
fn toc_lambda_is_monotone_in_alpha_without_noise() {
    let mut last = f64::NEG_INFINITY;
    for i in 0..1000 {
        let alpha = i as f64 / 1000.0;
        let r = check_toc_point(&NoiseSpec::Bernoulli, alpha, 0.0, 1, 1.5).unwrap();
        assert!(r.lambda >= last, "alpha={alpha}");
        last = r.lambda;
    }
}

#[test]
fn cycles_close() {
    let search = CycleSearch::new(0.0, 10.0);
    let maps = [MapModel::ricker(19f64.ln() / 0.9), MapModel::ricker(3.2), MapModel::logistic(3.5), MapModel::logistic(3.9), MapModel::maynard_smith()];
    for f in &maps {
        for d in 1..=4 {
            for c in find_cycle(f, d, &search).unwrap() {
                for &k in &c.points {
                    assert!((f.iterate(k, d).unwrap() - k).abs() <= 1e-8, "{} d={d} K={k}", f.name());
                }
            }
        }
    }
}
