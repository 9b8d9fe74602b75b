//! Sufficient stability conditions and the parameter windows they imply.

use cyclestab::conditions::{
    check_pbc_deterministic_signchange, check_pbc_max, check_toc_point, pbc_bernoulli_l_window,
    pbc_schwarzian_threshold, toc_bernoulli_l_window,
};
use cyclestab::noise::NoiseSpec;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let b = NoiseSpec::Bernoulli;

    // Ricker r = 2.41 has global Lipschitz constant 1.5
    println!("{}", check_toc_point(&b, 0.3, 0.24, 1, 1.5)?.line());
    println!("{}", check_pbc_max(&b, 0.3, 0.24, 1, 1.5)?.line());
    let det = check_pbc_deterministic_signchange(0.3, 0.24, 1, 1.5)?;
    println!("deterministic sign-change rule: satisfied={} rule={:?}", det.satisfied, det.rule);
    println!("alpha* for r = 2.41: {:.8}", pbc_schwarzian_threshold(2.41)?);

    // the noise must be neither too weak nor too strong
    let w = toc_bernoulli_l_window(0.0, 1.5, 1);
    println!("TOC bernoulli window at alpha = 0, L = 1.5: ({:.4}, {:.4})", w.lo, w.hi);
    let w = pbc_bernoulli_l_window(0.0, 2.0, 1)?;
    println!("PBC bernoulli window at alpha = 0, A = 2: ({:.6}, {:.6})", w.lo, w.hi);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
