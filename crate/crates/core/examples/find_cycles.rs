//! Locate periodic orbits with Newton's method and report their multipliers
//! and local Lipschitz constants.

use cyclestab::maps::{find_cycle, CycleSearch, MapModel};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let search = CycleSearch::new(0.0, 10.0);

    // r = ln(19)/0.9 makes {0.1, 1.9} an exact 2-cycle of the Ricker map
    for f in [MapModel::ricker(19f64.ln() / 0.9), MapModel::ricker(3.2), MapModel::logistic(3.5)] {
        for c in find_cycle(&f, 2, &search)? {
            println!(
                "{} r={:.4}: points {:?}  A(2)={:.6}  L(2)={:.6}",
                f.name(),
                f.param("r").unwrap_or(f64::NAN),
                c.points,
                c.multiplier_product,
                c.lipschitz_product
            );
        }
    }

    let ms = MapModel::maynard_smith();
    for c in find_cycle(&ms, 1, &search)? {
        println!("maynard_smith equilibrium {:.12}  f'={:.12}", c.points[0], c.multipliers[0]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
