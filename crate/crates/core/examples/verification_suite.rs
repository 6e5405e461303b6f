// Running a randomized verification suite from library code.

use waringlab::suite::{run_suite, SuiteConfig, Theorem};
use waringlab::Result;

pub fn run_example() -> Result<()> {
    let summary = run_suite(&SuiteConfig::new(Theorem::SylvesterBound, (1, 4), 10, 2024))?;
    for d in &summary.per_n {
        println!("n={}: {} passed, {} failed, {} sharp", d.n, d.passed, d.failed, d.sharp);
    }
    println!("all passed: {}", summary.all_passed);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
