// Numerical corroboration: a generic form of length n+2 shows a single
// decomposition class, a pentahedral witness shows many.

use waringlab::families::{gen_case_i, gen_pentahedral_nonunique};
use waringlab::numsearch::{numeric_structure, search, SearchConfig, DEFAULT_TOL};
use waringlab::Result;

pub fn run_example() -> Result<()> {
    for w in [gen_case_i(3, 1)?, gen_pentahedral_nonunique(1)?] {
        let report = search(&w.form, &SearchConfig::new(5, 20, DEFAULT_TOL, 1))?;
        println!(
            "{}: {}/{} restarts converged, {} distinct classes",
            w.family,
            report.converged,
            report.restarts,
            report.classes.len()
        );
        if let Some(first) = report.classes.first() {
            let s = numeric_structure(&first.vectors, 1e-8);
            println!("  first class: residual {:.1e}, numerical Kruskal rank {}", first.residual, s.kruskal_rank);
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
