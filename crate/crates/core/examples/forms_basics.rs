// Building cubic forms, reading off catalecticant data and moving to the
// concise support.

use waringlab::exact::{Mat, Rat};
use waringlab::forms::{combine, Form};
use waringlab::Result;

pub fn run_example() -> Result<()> {
    let fermat = Form::fermat(3, 3);
    println!("F = {fermat}");
    println!("  concise: {}, catalecticant rank {}", fermat.is_concise()?, fermat.catalecticant_rank()?);

    // x0^3 + (x0 + x1)^3 uses only x0, x1 even when written in four variables.
    let pts = vec![
        vec![Rat::one(), Rat::zero(), Rat::zero(), Rat::zero()],
        vec![Rat::one(), Rat::one(), Rat::zero(), Rat::zero()],
    ];
    let g = combine(&pts, &[Rat::one(), Rat::one()], 3, 3)?;
    let (basis, reduced) = g.concise_support()?;
    println!("G = {g}");
    println!("  concise: {}, essential variables {}", g.is_concise()?, basis.len());
    println!("  in the support coordinates: {reduced}");

    // A change of coordinates keeps the catalecticant rank.
    let m = Mat::from_i64_rows(&[&[1, 2, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 3], &[1, 0, 0, 1]]);
    let moved = fermat.apply_linear(&m)?;
    println!("F after x -> Mx has catalecticant rank {}", moved.catalecticant_rank()?);

    let json = serde_json::to_string(&g).expect("forms serialize");
    println!("JSON: {json}");
    let back: Form = serde_json::from_str(&json).expect("round trip");
    assert_eq!(back, g);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}
