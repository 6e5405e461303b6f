//! Seeded exact generators for forms with several non-redundant
//! decompositions.
//!
//! Every generator re-certifies its output before returning it: the form is
//! concise and each listed decomposition solves exactly and is non-redundant.
//! Degenerate draws are retried with `sub_seed(seed, attempt)`.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decomp::{power_matrix, Decomposition};
use crate::error::{Error, Result};
use crate::exact::{Mat, Rat};
use crate::forms::Form;
use crate::points::{is_lgp, kruskal_rank, PointSet, ProjPoint};
use crate::seed::{rng_for, small_nonzero_rat, small_rat, small_vec, sub_seed};

pub const COORD_BOUND: i64 = 9;
pub const RESAMPLE_BUDGET: usize = 64;
const EXTEND_STREAM: u64 = 0x6578_7465_6e64;

/// Families accepted by [`generate`].
pub const FAMILIES: &[&str] = &[
    "binary",
    "conic8",
    "two-lines",
    "case-i",
    "case-ii",
    "case-iii",
    "fermat-plus",
    "penta",
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub family: String,
    pub seed: u64,
    pub n: usize,
    pub d: u32,
    pub form: Form,
    pub decomps: Vec<Decomposition>,
}

impl Witness {
    /// Re-checks conciseness and every decomposition exactly.
    pub fn certify(&self) -> Result<()> {
        if self.form.n() != self.n || self.form.degree() != self.d {
            return Err(Error::DimensionMismatch("witness header disagrees with its form".into()));
        }
        if !self.form.is_concise()? {
            return Err(Error::Precondition(format!("{} form is not concise", self.family)));
        }
        for dec in &self.decomps {
            dec.certify(&self.form)?;
        }
        Ok(())
    }

    /// The first two decompositions.
    pub fn pair(&self) -> Option<(&Decomposition, &Decomposition)> {
        match self.decomps.as_slice() {
            [a, b, ..] => Some((a, b)),
            _ => None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witness serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn resample<T>(
    family: &str,
    seed: u64,
    mut attempt_fn: impl FnMut(&mut ChaCha8Rng) -> Option<T>,
) -> Result<T> {
    for attempt in 0..RESAMPLE_BUDGET {
        let mut rng = rng_for(sub_seed(seed, attempt as u64));
        if let Some(t) = attempt_fn(&mut rng) {
            return Ok(t);
        }
    }
    Err(Error::ResampleExhausted {
        family: family.to_string(),
        attempts: RESAMPLE_BUDGET,
    })
}

fn certified(w: Witness) -> Option<Witness> {
    w.certify().ok().map(|_| w)
}

fn distinct_points(
    rng: &mut ChaCha8Rng,
    count: usize,
    mut draw: impl FnMut(&mut ChaCha8Rng) -> Option<ProjPoint>,
) -> Option<Vec<ProjPoint>> {
    let mut pts: Vec<ProjPoint> = Vec::with_capacity(count);
    let mut tries = 0;
    while pts.len() < count {
        tries += 1;
        if tries > 50 * count {
            return None;
        }
        if let Some(p) = draw(rng) {
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
    }
    pts.sort();
    Some(pts)
}

/// The unique cube relation among `pts` when it has full support.
fn full_support_relation(pts: &PointSet) -> Option<Vec<Rat>> {
    let kernel = power_matrix(pts, 3).kernel_basis();
    if kernel.cols() != 1 {
        return None;
    }
    let rel = kernel.column(0);
    rel.iter().all(|c| !c.is_zero()).then_some(rel)
}

/// Splits `sum_i rel[i] L_i^3 = 0` into the flagged points `A` and the rest
/// `B`, the latter with negated coefficients.
fn split_relation(
    pts: &[ProjPoint],
    rel: &[Rat],
    in_a: &[bool],
    n: usize,
) -> Option<(Decomposition, Decomposition)> {
    let mut pa = Vec::new();
    let mut ca = Vec::new();
    let mut pb = Vec::new();
    let mut cb = Vec::new();
    for ((p, c), &a) in pts.iter().zip(rel).zip(in_a) {
        if a {
            pa.push(p.clone());
            ca.push(c.clone());
        } else {
            pb.push(p.clone());
            cb.push(-c);
        }
    }
    let a = Decomposition::new(PointSet::new(n, pa).ok()?, ca, 3).ok()?;
    let b = Decomposition::new(PointSet::new(n, pb).ok()?, cb, 3).ok()?;
    Some((a, b))
}

fn pair_witness(family: &str, seed: u64, n: usize, a: Decomposition, b: Decomposition) -> Witness {
    Witness {
        family: family.to_string(),
        seed,
        n,
        d: 3,
        form: a.form(),
        decomps: vec![a, b],
    }
}

/// Binary cubic with disjoint non-redundant decompositions of lengths 2 and 3.
pub fn gen_binary_pair(seed: u64) -> Result<Witness> {
    resample("binary", seed, |rng| {
        let pts = distinct_points(rng, 5, |r| ProjPoint::new(small_vec(r, 2, COORD_BOUND)).ok())?;
        let set = PointSet::new(1, pts.clone()).ok()?;
        let rel = full_support_relation(&set)?;
        let in_a = [true, true, false, false, false];
        let (a, b) = split_relation(&pts, &rel, &in_a, 1)?;
        certified(pair_witness("binary", seed, 1, a, b))
    })
}

/// Plane cubic with two disjoint length-4 decompositions on the conic
/// `x0 x2 = x1^2`.
pub fn gen_conic8(seed: u64) -> Result<Witness> {
    resample("conic8", seed, |rng| {
        let pts = distinct_points(rng, 8, |r| {
            let t = small_rat(r, COORD_BOUND);
            ProjPoint::new(vec![Rat::one(), t.clone(), &t * &t]).ok()
        })?;
        let set = PointSet::new(2, pts.clone()).ok()?;
        let rel = full_support_relation(&set)?;
        let in_a: Vec<bool> = (0..8).map(|i| i < 4).collect();
        let (a, b) = split_relation(&pts, &rel, &in_a, 2)?;
        certified(pair_witness("conic8", seed, 2, a, b))
    })
}

/// Cubic surface with two disjoint length-5 decompositions on the skew lines
/// `<e0, e1>` and `<e2, e3>`.
pub fn gen_two_lines(seed: u64) -> Result<Witness> {
    resample("two-lines", seed, |rng| {
        let on_line = |r: &mut ChaCha8Rng, first: bool| {
            let v = small_vec(r, 2, COORD_BOUND);
            let z = Rat::zero();
            let c = if first {
                vec![v[0].clone(), v[1].clone(), z.clone(), z]
            } else {
                vec![z.clone(), z, v[0].clone(), v[1].clone()]
            };
            ProjPoint::new(c).ok()
        };
        let line1 = distinct_points(rng, 5, |r| on_line(r, true))?;
        let line2 = distinct_points(rng, 5, |r| on_line(r, false))?;
        let rel1 = full_support_relation(&PointSet::new(3, line1.clone()).ok()?)?;
        let rel2 = full_support_relation(&PointSet::new(3, line2.clone()).ok()?)?;
        let pts: Vec<ProjPoint> = line1.into_iter().chain(line2).collect();
        let rel: Vec<Rat> = rel1.into_iter().chain(rel2).collect();
        let in_a: Vec<bool> = (0..10).map(|i| i < 3 || (5..7).contains(&i)).collect();
        let (a, b) = split_relation(&pts, &rel, &in_a, 3)?;
        certified(pair_witness("two-lines", seed, 3, a, b))
    })
}

/// Embeds `w` into `P^{n_target}` and adds `n_target - w.n` generic cubes
/// `L_j^3` with coefficient 1 to the form and to every decomposition.
pub fn extend_with_generic_cubes(w: &Witness, n_target: usize, seed: u64) -> Result<Witness> {
    if n_target <= w.n {
        return Err(Error::Precondition(format!(
            "extension target {n_target} must exceed n = {}",
            w.n
        )));
    }
    let m = n_target - w.n;
    let base_form = w.form.embed(n_target);
    let base_decomps: Vec<Decomposition> = w
        .decomps
        .iter()
        .map(|dec| Decomposition {
            points: dec.points.embed(n_target),
            coeffs: dec.coeffs.clone(),
            d: dec.d,
        })
        .collect();
    resample(&w.family, seed, |rng| {
        let tail = Mat::new(m, m, small_vec(rng, m * m, COORD_BOUND));
        if !tail.is_invertible() {
            return None;
        }
        let mut new_pts = Vec::with_capacity(m);
        for j in 0..m {
            let mut c = small_vec(rng, w.n + 1, COORD_BOUND);
            c.extend(tail.row(j).iter().cloned());
            new_pts.push(ProjPoint::new(c).ok()?);
        }
        let mut form = base_form.clone();
        for p in &new_pts {
            form = form.add(&crate::forms::power(p.coords(), w.d).ok()?);
        }
        let mut decomps = Vec::with_capacity(base_decomps.len());
        for dec in &base_decomps {
            let mut points = dec.points.clone();
            let mut coeffs = dec.coeffs.clone();
            for p in &new_pts {
                points.push(p.clone()).ok()?;
                coeffs.push(Rat::one());
            }
            decomps.push(Decomposition { points, coeffs, d: dec.d });
        }
        certified(Witness {
            family: w.family.clone(),
            seed: w.seed,
            n: n_target,
            d: w.d,
            form,
            decomps,
        })
    })
}

fn extend_or_keep(w: Witness, n: usize, seed: u64, family: &str) -> Result<Witness> {
    let mut out = if n == w.n {
        w
    } else {
        extend_with_generic_cubes(&w, n, sub_seed(seed, EXTEND_STREAM))?
    };
    out.family = family.to_string();
    Ok(out)
}

/// Two length-`(n+2)` decompositions whose difference lies on two skew lines.
pub fn gen_case_ii(n: usize, seed: u64) -> Result<Witness> {
    if n < 3 {
        return Err(Error::Precondition(format!("case-ii needs n >= 3, got {n}")));
    }
    extend_or_keep(gen_two_lines(seed)?, n, seed, "case-ii")
}

/// Two length-`(n+2)` decompositions whose difference lies on a plane conic.
pub fn gen_case_iii(n: usize, seed: u64) -> Result<Witness> {
    if n < 2 {
        return Err(Error::Precondition(format!("case-iii needs n >= 2, got {n}")));
    }
    extend_or_keep(gen_conic8(seed)?, n, seed, "case-iii")
}

/// Decompositions of lengths `n+1` and `n+2`, the shorter listed first.
pub fn gen_fermat_plus(n: usize, seed: u64) -> Result<Witness> {
    if n < 1 {
        return Err(Error::Precondition("fermat-plus needs n >= 1".into()));
    }
    extend_or_keep(gen_binary_pair(seed)?, n, seed, "fermat-plus")
}

/// Concise quaternary cubic `F' + L^3` with `F'` a plane cubic, having two
/// distinct length-5 decompositions.
pub fn gen_pentahedral_nonunique(seed: u64) -> Result<Witness> {
    let core = gen_conic8(seed)?;
    let w = extend_or_keep(core, 3, seed, "penta")?;
    let (plane, _) = penta_plane_part(&w)?;
    if plane.catalecticant_rank()? != 3 {
        return Err(Error::Precondition("plane part is not in Sub_3".into()));
    }
    Ok(w)
}

/// `F' + L^3` split of a pentahedral witness: the plane cubic and the extra point.
pub fn penta_plane_part(w: &Witness) -> Result<(Form, ProjPoint)> {
    let (a, b) = w.pair().ok_or(Error::Precondition("witness has fewer than two decompositions".into()))?;
    let shared = a.points.intersection(&b.points);
    if shared.len() != 1 || w.n != 3 {
        return Err(Error::Precondition("not a pentahedral witness".into()));
    }
    let l = shared.get(0).clone();
    let coef = a.coeff_of(&l).unwrap();
    let cube = crate::forms::power(l.coords(), 3)?.scale(coef);
    Ok((w.form.sub(&cube), l))
}

/// `n + 2` points in linear general position with generic nonzero coefficients.
pub fn gen_case_i(n: usize, seed: u64) -> Result<Witness> {
    if n < 1 {
        return Err(Error::Precondition("case-i needs n >= 1".into()));
    }
    resample("case-i", seed, |rng| {
        let pts = distinct_points(rng, n + 2, |r| ProjPoint::new(small_vec(r, n + 1, COORD_BOUND)).ok())?;
        let set = PointSet::new(n, pts).ok()?;
        if !is_lgp(&set) {
            return None;
        }
        let coeffs: Vec<Rat> = (0..n + 2).map(|_| small_nonzero_rat(rng, COORD_BOUND)).collect();
        let dec = Decomposition::new(set, coeffs, 3).ok()?;
        certified(Witness {
            family: "case-i".into(),
            seed,
            n,
            d: 3,
            form: dec.form(),
            decomps: vec![dec],
        })
    })
}

/// A random point set in the `GL`-orbit of `A_r`, in shuffled order.
pub fn random_kruskal_set(n: usize, r: usize, seed: u64) -> Result<PointSet> {
    let target = PointSet::kruskal_normal_form(n, r)?;
    resample("kruskal-set", seed, |rng| {
        let nv = n + 1;
        let g = Mat::new(nv, nv, small_vec(rng, nv * nv, COORD_BOUND));
        let moved = target.transform(&g).ok()?;
        let mut pts = moved.points().to_vec();
        pts.shuffle(rng);
        let out = PointSet::new(n, pts).ok()?;
        (kruskal_rank(&out) == r && out.rank() == nv).then_some(out)
    })
}

/// Dispatch by family name. `n` is ignored by the fixed-dimension families
/// but must match them.
pub fn generate(family: &str, n: usize, seed: u64) -> Result<Witness> {
    let fixed = |expected: usize| {
        if n != expected {
            Err(Error::Precondition(format!("{family} requires n = {expected}")))
        } else {
            Ok(())
        }
    };
    match family {
        "binary" => fixed(1).and_then(|_| gen_binary_pair(seed)),
        "conic8" => fixed(2).and_then(|_| gen_conic8(seed)),
        "two-lines" => fixed(3).and_then(|_| gen_two_lines(seed)),
        "penta" => fixed(3).and_then(|_| gen_pentahedral_nonunique(seed)),
        "case-i" => gen_case_i(n, seed),
        "case-ii" => gen_case_ii(n, seed),
        "case-iii" => gen_case_iii(n, seed),
        "fermat-plus" => gen_fermat_plus(n, seed),
        other => Err(Error::Precondition(format!("unknown family {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{check_sum_bound, pair_report, predict_cases, verify_fermat_plus_one, TrichotomyCase};
    use crate::points::{h_vector, hilbert_function, normalize_orbit};
    use crate::terracini::terracini_defect;

    #[test]
    fn binary_pair() {
        for seed in 0..10 {
            let w = gen_binary_pair(seed).unwrap();
            w.certify().unwrap();
            let (a, b) = w.pair().unwrap();
            assert_eq!((a.len(), b.len()), (2, 3));
            assert!(a.points.intersection(&b.points).is_empty());
        }
        let pts = PointSet::from_i64(1, &[&[1, 0], &[0, 1], &[1, 1], &[1, 2], &[1, 3]]).unwrap();
        assert_eq!(power_matrix(&pts, 3).kernel_basis().cols(), 1);
    }

    #[test]
    fn conic8_and_two_lines_h_vectors() {
        for seed in 0..5 {
            let w = gen_conic8(seed).unwrap();
            let (a, b) = w.pair().unwrap();
            let z = a.points.union(&b.points);
            assert_eq!(h_vector(&z).values, vec![1, 2, 2, 2, 1]);
            assert_eq!(hilbert_function(&z, 2), 5);
            assert_eq!(w.form.catalecticant_rank().unwrap(), 3);

            let w = gen_two_lines(seed).unwrap();
            let (a, b) = w.pair().unwrap();
            let z = a.points.union(&b.points);
            assert_eq!(h_vector(&z).values, vec![1, 3, 2, 2, 2]);
            let rep = pair_report(&a.points, &b.points).unwrap();
            assert_eq!(rep.intersection, 0);
            assert!(rep.diff_two_lines);
        }
    }

    #[test]
    fn extensions() {
        for n in 3..=6 {
            let w = gen_case_ii(n, 5).unwrap();
            let (a, b) = w.pair().unwrap();
            assert_eq!((a.len(), b.len()), (n + 2, n + 2));
            let rep = pair_report(&a.points, &b.points).unwrap();
            assert_eq!(rep.intersection, n - 3);
            assert!(rep.diff_two_lines);
            assert_eq!(kruskal_rank(&a.points), 2);
            assert_eq!(
                predict_cases(&a.points).unwrap(),
                [TrichotomyCase::II, TrichotomyCase::III].into_iter().collect()
            );

            let w = gen_case_iii(n, 5).unwrap();
            let (a, b) = w.pair().unwrap();
            let rep = pair_report(&a.points, &b.points).unwrap();
            assert_eq!(rep.intersection, n - 2);
            assert!(rep.diff_two_planes);
            assert_eq!(kruskal_rank(&a.points), 3);

            let w = gen_fermat_plus(n, 5).unwrap();
            let (a, b) = w.pair().unwrap();
            assert_eq!((a.len(), b.len()), (n + 1, n + 2));
            assert_eq!(check_sum_bound(&w.form, a, b).unwrap(), (true, 0));
            assert!(verify_fermat_plus_one(&w.form, a, b).unwrap());
        }
        assert_eq!(gen_case_ii(3, 4).unwrap().form, gen_two_lines(4).unwrap().form);
        assert!(gen_case_ii(2, 4).is_err());
    }

    #[test]
    fn pentahedral() {
        let w = gen_pentahedral_nonunique(11).unwrap();
        w.certify().unwrap();
        assert_eq!(w.form.catalecticant_rank().unwrap(), 4);
        let (a, b) = w.pair().unwrap();
        assert_eq!((a.len(), b.len()), (5, 5));
        assert!(!a.points.same_set(&b.points));
        let (plane, _l) = penta_plane_part(&w).unwrap();
        assert_eq!(plane.catalecticant_rank().unwrap(), 3);
    }

    #[test]
    fn kruskal_sets() {
        for n in 2..=5 {
            for r in 2..=n + 1 {
                let a = random_kruskal_set(n, r, (n * 10 + r) as u64).unwrap();
                assert_eq!(a.len(), n + 2);
                assert_eq!(normalize_orbit(&a).unwrap().1, r);
                if r == n + 1 {
                    assert!(is_lgp(&a));
                }
                if n >= 3 {
                    assert_eq!(terracini_defect(&a, 3).unwrap() > 0, r <= 3);
                }
            }
        }
    }

    #[test]
    fn determinism_and_json() {
        let a = gen_case_iii(4, 99).unwrap();
        let b = gen_case_iii(4, 99).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        let back = Witness::from_json(&a.to_json()).unwrap();
        assert_eq!(back, a);
        back.certify().unwrap();
        assert!(generate("conic8", 5, 1).is_err());
        assert!(generate("nope", 3, 1).is_err());
    }

    #[test]
    fn case_i() {
        let w = gen_case_i(3, 2).unwrap();
        assert!(is_lgp(&w.decomps[0].points));
        assert_eq!(w.decomps.len(), 1);
    }
}
