//! Regenerate the CSV bundle of a worked example and list its panels.

use cyclestab::cli::{reproduce, Example};
use cyclestab::engine::Execution;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("cyclestab_example3_{}", std::process::id()));
    let manifest = reproduce(Example::Example3, &dir, 1, Execution::Parallel)?;
    for p in &manifest.panels {
        println!("{:<28} {:<7} success {:.2}  {}", p.id, p.figure, p.success_fraction, p.notes[0]);
    }
    println!("replay: {} {}", manifest.replay, manifest.panels[0].files[0].argv.join(" "));
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
