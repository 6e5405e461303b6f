// Tangent spaces to the Veronese variety at n+2 spanning points fail to be
// independent exactly when four of the points are coplanar.

use waringlab::families::random_kruskal_set;
use waringlab::forms::LinVec;
use waringlab::points::PointSet;
use waringlab::terracini::{in_concise_terracini, restricted_dependence, terracini_defect};
use waringlab::Result;

pub fn run_example() -> Result<()> {
    for n in 3..=5 {
        for r in 2..=n + 1 {
            let a = random_kruskal_set(n, r, 5)?;
            println!(
                "n={n} r={r}: defect {}, in the concise locus {}",
                terracini_defect(&a, 3)?,
                in_concise_terracini(&a)?
            );
        }
    }

    // Four coplanar points: dependent in P^3 and already inside their plane.
    let a = PointSet::from_i64(3, &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[1, 1, 1, 0]])?;
    let plane = [LinVec::unit(4, 0), LinVec::unit(4, 1), LinVec::unit(4, 2)];
    let (ambient, inside) = restricted_dependence(&a, &plane, 3)?;
    println!("coplanar quadruple: dependent in P^3 {ambient}, in the plane {inside}");
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
