// A quaternary cubic F' + L^3 with F' a plane cubic has more than one
// decomposition as a sum of five cubes.

use waringlab::families::{gen_pentahedral_nonunique, penta_plane_part};
use waringlab::points::kruskal_rank;
use waringlab::Result;

pub fn run_example() -> Result<()> {
    let w = gen_pentahedral_nonunique(2)?;
    w.certify()?;
    println!("F = {}", w.form);
    println!("catalecticant rank {}", w.form.catalecticant_rank()?);
    let (plane, l) = penta_plane_part(&w)?;
    println!("extra point L = {l}");
    println!("F - L^3 has catalecticant rank {}", plane.catalecticant_rank()?);
    for (i, dec) in w.decomps.iter().enumerate() {
        println!("decomposition {i} (Kruskal rank {}):", kruskal_rank(&dec.points));
        for (p, c) in dec.points.points().iter().zip(&dec.coeffs) {
            println!("  {c} * {p}^3");
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
