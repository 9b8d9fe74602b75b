//! Compare the analytic stability region with simulated success fractions
//! on an (alpha, l) grid.

use cyclestab::control::ControlSpec;
use cyclestab::engine::{axis, sweep, EnsembleConfig, Execution, SweepCondition, Target};
use cyclestab::maps::MapModel;
use cyclestab::noise::NoiseSpec;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f = MapModel::ricker(2.41);
    let template = ControlSpec::toc(0.0, 0.0, 1, 1.0, NoiseSpec::Bernoulli).truncated(true);
    let cond = SweepCondition::TocPoint { lipschitz: 1.5, k: 1 };
    let cfg = EnsembleConfig::new(0.5, 300, 20, 1, Target::Point(1.0));

    let alphas = axis(0.0, 0.4, 0.2)?;
    let ls = axis(0.0, 1.4, 0.2)?;
    let grid = sweep(&f, &template, &alphas, &ls, Some(&cfg), Some(cond), Execution::Parallel)?;

    println!("cell = satisfied/success_fraction");
    print!("alpha\\l");
    for l in &ls {
        print!("{l:>8.1}");
    }
    println!();
    for (i, a) in alphas.iter().enumerate() {
        print!("{a:>7.1}");
        for c in grid.row(i) {
            let s = if c.satisfied == Some(true) { "+" } else { "-" };
            print!("{:>8}", format!("{s}{:.2}", c.success_fraction.unwrap_or(f64::NAN)));
        }
        println!();
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
