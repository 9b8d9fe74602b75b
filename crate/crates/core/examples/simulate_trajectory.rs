//! One pulsed, noisy TOC trajectory on the chaotic Ricker map, written as
//! CSV.

use cyclestab::control::ControlSpec;
use cyclestab::engine::run_trajectory;
use cyclestab::maps::MapModel;
use cyclestab::noise::{NoiseSpec, RngStream};
use cyclestab::output::write_trajectory;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let f = MapModel::ricker(19f64.ln() / 0.9);
    // control every second step toward K = 1
    let spec = ControlSpec::toc(0.7, 0.4, 2, 1.0, NoiseSpec::uniform_unit()).truncated(true);
    let traj = run_trajectory(&f, &spec, 0.5, 40, RngStream::new(1, 0))?;

    let mut csv = Vec::new();
    write_trajectory(&mut csv, &traj)?;
    let text = String::from_utf8(csv)?;
    for line in text.lines().take(6) {
        println!("{line}");
    }
    println!("...");
    println!("x_40 = {:.12}", traj.states[40]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
