//! `E ln|a + b xi|` three ways: closed form, singularity-aware quadrature
//! and Monte Carlo with a standard error.

use cyclestab::noise::{expected_log_abs, monte_carlo_log_abs, ExpectationMethod, NoiseSpec, RngStream};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let u = NoiseSpec::uniform();
    // 1 - alpha - l xi with alpha = 0.7, l = 0.4: the root xi = 0.75 is inside [-1, 1]
    let (a, b) = (0.3, -0.4);
    let cf = expected_log_abs(&u, a, b, ExpectationMethod::ClosedForm)?;
    let quad = expected_log_abs(&u, a, b, ExpectationMethod::Quadrature)?;
    let mc = monte_carlo_log_abs(&u, a, b, 200_000, &mut RngStream::new(1, 0))?;
    println!("closed form {cf:.15}");
    println!("quadrature  {quad:.15}");
    println!("monte carlo {:.6} +- {:.6}", mc.mean, mc.std_err);

    let bern = NoiseSpec::Bernoulli;
    let e = expected_log_abs(&bern, 0.7, -0.24, ExpectationMethod::ClosedForm)?;
    println!("bernoulli: 0.5 (ln 0.46 + ln 0.94) = {e:.15}");

    // an atom on the root: E ln = -inf, so the condition holds vacuously
    let e = expected_log_abs(&bern, 0.5, 0.5, ExpectationMethod::ClosedForm)?;
    println!("atom at the root: {e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
