// Two decompositions of length n+2 of a concise cubic: where they can
// differ, and how the Kruskal rank predicts it.

use waringlab::decomp::{pair_report, predict_cases};
use waringlab::families::{gen_case_i, gen_case_ii, gen_case_iii};
use waringlab::points::kruskal_rank;
use waringlab::Result;

pub fn run_example() -> Result<()> {
    let n = 6;
    let unique = gen_case_i(n, 3)?;
    let a = &unique.decomps[0].points;
    println!("case-i: Kruskal rank {}, cases {:?}", kruskal_rank(a), predict_cases(a)?);

    for w in [gen_case_ii(n, 3)?, gen_case_iii(n, 3)?] {
        let (a, b) = w.pair().expect("two decompositions");
        let rep = pair_report(&a.points, &b.points)?;
        println!("{} (n={n}):", w.family);
        println!("  lengths {} and {}, shared points {}", rep.len_a, rep.len_b, rep.intersection);
        println!(
            "  difference of {} points: two lines {}, two planes {}",
            rep.diff.len(),
            rep.diff_two_lines,
            rep.diff_two_planes
        );
        println!("  Kruskal ranks {} / {}", rep.kruskal_a, rep.kruskal_b);
        println!("  predicted cases {:?}", predict_cases(&a.points)?);
        println!("  trichotomy bullets hold: {}", rep.satisfies_main_bullets(n));
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
