// Two distinct non-redundant decompositions of a concise cubic have total
// length at least 3 + 2n; the fermat-plus family attains it.

use waringlab::decomp::{check_sum_bound, disjointify, verify_fermat_plus_one};
use waringlab::families::{gen_case_iii, gen_fermat_plus};
use waringlab::Result;

pub fn run_example() -> Result<()> {
    for n in 1..=5 {
        let w = gen_fermat_plus(n, 11)?;
        let (a, b) = w.pair().expect("two decompositions");
        let (holds, slack) = check_sum_bound(&w.form, a, b)?;
        println!(
            "n={n}: lengths {} + {} = {}, bound {}, slack {slack}",
            a.len(),
            b.len(),
            a.len() + b.len(),
            3 + 2 * n
        );
        assert!(holds);
        println!("  minimal-plus-one structure: {}", verify_fermat_plus_one(&w.form, a, b)?);
    }

    // Dropping the shared terms leaves two disjoint decompositions of a
    // smaller form.
    let w = gen_case_iii(5, 11)?;
    let (a, b) = w.pair().expect("two decompositions");
    let (rest, a2, b2) = disjointify(&w.form, a, b)?;
    println!(
        "case-iii n=5: {} shared terms removed, disjoint lengths {} and {}, residual form in {} variables",
        a.len() - a2.len(),
        a2.len(),
        b2.len(),
        rest.concise_support()?.0.len()
    );
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
