// Hilbert functions, h-vectors and the Cayley-Bacharach property of the
// point configurations behind two generated families.

use waringlab::families::{gen_conic8, gen_two_lines};
use waringlab::points::{cb_check, cb_hf_inequality, h_vector, hilbert_function};
use waringlab::Result;

pub fn run_example() -> Result<()> {
    for (name, w) in [("conic8", gen_conic8(1)?), ("two-lines", gen_two_lines(1)?)] {
        let (a, b) = w.pair().expect("two decompositions");
        let z = a.points.union(&b.points);
        println!("{name}: {} points in P^{}", z.len(), z.n());
        println!("  h-vector {}", h_vector(&z));
        println!("  h_Z(2) = {}", hilbert_function(&z, 2));
        println!("  CB(3): {}", cb_check(&z, 3)?);
        for t in 0..=3 {
            println!("  HF inequality at t={t}: {}", cb_hf_inequality(&z, t));
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
