// Every spanning set of n+2 points of Kruskal rank r is projectively
// equivalent to A_r = {e_0, ..., e_n, e_0 + ... + e_{r-1}}.

use waringlab::families::random_kruskal_set;
use waringlab::points::{kruskal_rank, normalize_orbit, PointSet};
use waringlab::terracini::orbit_dimension_estimate;
use waringlab::Result;

pub fn run_example() -> Result<()> {
    let n = 4;
    for r in 2..=n + 1 {
        let a = random_kruskal_set(n, r, 7)?;
        let (g, found) = normalize_orbit(&a)?;
        let image = a.transform(&g)?;
        let target = PointSet::kruskal_normal_form(n, found)?;
        println!(
            "r={r}: Kruskal rank {}, normalized to A_{found}: {}",
            kruskal_rank(&a),
            image.same_set(&target)
        );
        println!(
            "  orbit dimension estimate {} (expected {})",
            orbit_dimension_estimate(n, r, 7)?,
            n * (n + 1) + r - 1
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
