//! Success fraction of an ensemble of independent noisy paths. The result
//! does not depend on the number of threads.

use cyclestab::control::ControlSpec;
use cyclestab::engine::{ensemble, EnsembleConfig, Execution, Target};
use cyclestab::maps::MapModel;
use cyclestab::noise::NoiseSpec;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f = MapModel::ricker(2.41);
    let spec = ControlSpec::pbc(0.3, 0.24, 1, NoiseSpec::Bernoulli).truncated(true);
    let cfg = EnsembleConfig::new(0.5, 500, 200, 1, Target::Point(1.0));

    let par = ensemble(&f, &spec, &cfg)?;
    let seq = ensemble(&f, &spec, &cfg.clone().execution(Execution::Sequential))?;
    assert_eq!(par, seq);
    println!(
        "PBC alpha=0.3 l=0.24: {}/{} paths reach K=1, mean hit step {:.1}",
        par.successes,
        par.paths,
        par.mean_hit_step.unwrap_or(f64::NAN)
    );

    // without noise the same alpha does not stabilize
    let det = ensemble(&f, &ControlSpec::pbc(0.1, 0.0, 1, NoiseSpec::None), &cfg)?;
    println!("PBC alpha=0.1 l=0:    {}/{} paths", det.successes, det.paths);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
