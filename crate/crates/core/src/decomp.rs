//! Certified Waring decompositions and structural comparison of two
//! decompositions of the same form.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Mat, Rat};
use crate::forms::{combine, Form, MonomialBasis};
use crate::points::{kruskal_rank, span_dim, PointSet};

/// `F = sum_i coeffs[i] * L_i^d` over the points of `pts`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub points: PointSet,
    pub coeffs: Vec<Rat>,
    pub d: u32,
}

impl Decomposition {
    pub fn new(points: PointSet, coeffs: Vec<Rat>, d: u32) -> Result<Self> {
        if points.len() != coeffs.len() {
            return Err(Error::LengthMismatch {
                left: points.len(),
                right: coeffs.len(),
            });
        }
        Ok(Decomposition { points, coeffs, d })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn n(&self) -> usize {
        self.points.n()
    }

    /// The form this decomposition expresses.
    pub fn form(&self) -> Form {
        combine(self.points.points(), &self.coeffs, self.n(), self.d)
            .expect("decomposition lengths are consistent")
    }

    /// Coefficient attached to `p`, if `p` is one of the points.
    pub fn coeff_of(&self, p: &crate::points::ProjPoint) -> Option<&Rat> {
        self.points.position(p).map(|i| &self.coeffs[i])
    }

    /// Exact check that this decomposition expresses `f` and is non-redundant.
    pub fn certify(&self, f: &Form) -> Result<()> {
        if self.d != f.degree() || self.n() != f.n() {
            return Err(Error::DimensionMismatch(
                "decomposition and form live in different spaces".into(),
            ));
        }
        let solved = coefficients_for(f, &self.points)?.ok_or(Error::NotADecomposition)?;
        if !is_nonredundant(f, &self.points)? {
            return Err(Error::Precondition("decomposition is redundant".into()));
        }
        if solved != self.coeffs {
            return Err(Error::NotADecomposition);
        }
        Ok(())
    }
}

/// Matrix whose columns are the coefficient vectors of `L_i^d`.
pub fn power_matrix(a: &PointSet, d: u32) -> Mat {
    let basis = MonomialBasis::new(a.n() + 1, d);
    Mat::from_cols(
        a.points()
            .iter()
            .map(|p| basis.power_vector(p.coords()))
            .collect(),
        basis.len(),
    )
}

fn check_space(f: &Form, a: &PointSet) -> Result<()> {
    if f.n() != a.n() {
        return Err(Error::DimensionMismatch(format!(
            "form in {} variables, points in P^{}",
            f.nvars(),
            a.n()
        )));
    }
    Ok(())
}

/// Coefficients `alpha` with `f = sum alpha_i L_i^d`, or `None` if `f` is not
/// in the span of the powers. Unique when the powers are independent.
pub fn coefficients_for(f: &Form, a: &PointSet) -> Result<Option<Vec<Rat>>> {
    check_space(f, a)?;
    if a.is_empty() {
        return Ok(f.is_zero().then(Vec::new));
    }
    let basis = MonomialBasis::new(f.nvars(), f.degree());
    Ok(power_matrix(a, f.degree()).solve(&f.dense(&basis)))
}

/// Powers independent and every solved coefficient nonzero.
pub fn is_nonredundant(f: &Form, a: &PointSet) -> Result<bool> {
    let coeffs = coefficients_for(f, a)?.ok_or(Error::NotADecomposition)?;
    if a.is_empty() {
        return Ok(true);
    }
    let independent = power_matrix(a, f.degree()).rank() == a.len();
    Ok(independent && coeffs.iter().all(|c| !c.is_zero()))
}

fn require_nonredundant(f: &Form, a: &Decomposition) -> Result<()> {
    if a.form() != *f {
        return Err(Error::NotADecomposition);
    }
    if !is_nonredundant(f, &a.points)? {
        return Err(Error::Precondition("decomposition is redundant".into()));
    }
    Ok(())
}

fn require_concise(f: &Form) -> Result<()> {
    if !f.is_concise()? {
        return Err(Error::Precondition("form is not concise".into()));
    }
    Ok(())
}

/// Removes the shared terms of `a` from `f`.
///
/// Returns `(F', A', B')` where `A' = A \ B` and `B'` keeps the shared points
/// whose coefficients differ (with coefficient `beta - alpha`) plus the
/// points of `B \ A`. Both decompose `F'` and are disjoint; `a == b` yields the
/// zero form with two empty decompositions.
pub fn disjointify(
    f: &Form,
    a: &Decomposition,
    b: &Decomposition,
) -> Result<(Form, Decomposition, Decomposition)> {
    require_nonredundant(f, a)?;
    require_nonredundant(f, b)?;
    let n = f.n();
    let d = f.degree();
    let shared = a.points.intersection(&b.points);
    let shared_alpha: Vec<Rat> = shared
        .points()
        .iter()
        .map(|p| a.coeff_of(p).unwrap().clone())
        .collect();
    let f_prime = f.sub(&combine(shared.points(), &shared_alpha, n, d)?);

    let mut a_pts = PointSet::empty(n);
    let mut a_coeffs = Vec::new();
    for (p, c) in a.points.points().iter().zip(&a.coeffs) {
        if !b.points.contains(p) {
            a_pts.push(p.clone())?;
            a_coeffs.push(c.clone());
        }
    }
    let mut b_pts = PointSet::empty(n);
    let mut b_coeffs = Vec::new();
    for (p, beta) in b.points.points().iter().zip(&b.coeffs) {
        let c = match a.coeff_of(p) {
            Some(alpha) if alpha == beta => continue,
            Some(alpha) => beta - alpha,
            None => beta.clone(),
        };
        b_pts.push(p.clone())?;
        b_coeffs.push(c);
    }
    let a_prime = Decomposition::new(a_pts, a_coeffs, d)?;
    let b_prime = Decomposition::new(b_pts, b_coeffs, d)?;
    debug_assert_eq!(a_prime.form(), f_prime);
    debug_assert_eq!(b_prime.form(), f_prime);
    Ok((f_prime, a_prime, b_prime))
}

/// `len(A) + len(B) >= d + 2n`, with the slack `len(A) + len(B) - (d + 2n)`.
pub fn check_sum_bound(f: &Form, a: &Decomposition, b: &Decomposition) -> Result<(bool, i64)> {
    require_concise(f)?;
    require_nonredundant(f, a)?;
    require_nonredundant(f, b)?;
    let slack = (a.len() + b.len()) as i64 - (f.degree() as i64 + 2 * f.n() as i64);
    Ok((slack >= 0, slack))
}

/// Case labels of the trichotomy for concise cubics of rank at most `n+2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TrichotomyCase {
    I,
    II,
    III,
}

impl fmt::Display for TrichotomyCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TrichotomyCase::I => "I",
            TrichotomyCase::II => "II",
            TrichotomyCase::III => "III",
        };
        f.write_str(s)
    }
}

/// Structural comparison of two point sets in the same `P^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReport {
    pub len_a: usize,
    pub len_b: usize,
    pub intersection: usize,
    pub diff: PointSet,
    pub diff_collinear: bool,
    pub diff_two_lines: bool,
    pub diff_two_planes: bool,
    pub kruskal_a: usize,
    pub kruskal_b: usize,
}

impl PairReport {
    /// Either `ell(A n B) >= n-2` with the difference on two planes, or
    /// `ell(A n B) >= n-3` with the difference on two lines.
    pub fn satisfies_main_bullets(&self, n: usize) -> bool {
        let i = self.intersection as i64;
        let n = n as i64;
        (i >= n - 2 && self.diff_two_planes) || (i >= n - 3 && self.diff_two_lines)
    }
}

/// Whether the points indexed `0..len` split into two parts, each of rank at
/// most `max_rank`. `rank_of` receives bitmasks; empty parts are allowed.
pub(crate) fn splits_into_two_flats(
    len: usize,
    max_rank: usize,
    mut rank_of: impl FnMut(u64) -> usize,
) -> bool {
    if len == 0 {
        return true;
    }
    assert!(len < 64);
    let full: u64 = (1u64 << len) - 1;
    let mut memo: HashMap<u64, usize> = HashMap::new();
    let mut rank = |mask: u64| -> usize {
        if mask == 0 {
            return 0;
        }
        *memo.entry(mask).or_insert_with(|| rank_of(mask))
    };
    // The part containing point 0 ranges over all masks with bit 0 set.
    let rest_bits = len - 1;
    for sub in 0..(1u64 << rest_bits) {
        let first = 1 | (sub << 1);
        if rank(first) > max_rank {
            continue;
        }
        if rank(full & !first) <= max_rank {
            return true;
        }
    }
    false
}

fn mask_indices(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask & (1 << i) != 0).collect()
}

pub fn pair_report(a: &PointSet, b: &PointSet) -> Result<PairReport> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch("point sets in different P^n".into()));
    }
    let shared = a.intersection(b);
    let diff = a.difference(b).union(&b.difference(a));
    let rows = diff.integer_rows();
    let subset_rank = |mask: u64| crate::points::subset_rank(&rows, &mask_indices(mask));
    let diff_collinear = diff.rank() <= 2;
    let diff_two_lines = splits_into_two_flats(diff.len(), 2, subset_rank);
    let diff_two_planes = splits_into_two_flats(diff.len(), 3, subset_rank);
    Ok(PairReport {
        len_a: a.len(),
        len_b: b.len(),
        intersection: shared.len(),
        diff,
        diff_collinear,
        diff_two_lines,
        diff_two_planes,
        kruskal_a: kruskal_rank(a),
        kruskal_b: kruskal_rank(b),
    })
}

fn require_spanning_n_plus_two(a: &PointSet) -> Result<()> {
    if a.len() != a.n() + 2 {
        return Err(Error::Precondition(format!(
            "expected n+2 = {} points, got {}",
            a.n() + 2,
            a.len()
        )));
    }
    if span_dim(a)? != a.n() {
        return Err(Error::Precondition("points do not span P^n".into()));
    }
    Ok(())
}

/// Cases compatible with a length-`(n+2)` decomposition with the Kruskal rank of `a`.
pub fn predict_cases(a: &PointSet) -> Result<BTreeSet<TrichotomyCase>> {
    require_spanning_n_plus_two(a)?;
    let k = kruskal_rank(a);
    let cases = match k {
        k if k >= 4 => vec![TrichotomyCase::I],
        3 => vec![TrichotomyCase::III],
        _ => vec![TrichotomyCase::II, TrichotomyCase::III],
    };
    Ok(cases.into_iter().collect())
}

/// For decompositions of lengths `n+1` and `n+2` of a concise form: `d = 3`,
/// `ell(A n B) >= n-1` and a collinear symmetric difference.
pub fn verify_fermat_plus_one(f: &Form, a: &Decomposition, b: &Decomposition) -> Result<bool> {
    require_concise(f)?;
    let n = f.n();
    if a.len() != n + 1 || b.len() != n + 2 {
        return Err(Error::Precondition(format!(
            "expected lengths {} and {}, got {} and {}",
            n + 1,
            n + 2,
            a.len(),
            b.len()
        )));
    }
    require_nonredundant(f, a)?;
    require_nonredundant(f, b)?;
    let report = pair_report(&a.points, &b.points)?;
    Ok(f.degree() == 3 && report.intersection + 1 >= n && report.diff_collinear)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::ProjPoint;

    fn r(v: i64) -> Rat {
        Rat::from_int(v)
    }

    fn ones(k: usize) -> Vec<Rat> {
        vec![Rat::one(); k]
    }

    /// Binary cubic with decompositions of lengths 2 and 3 on P^1:
    /// the relation 6 x^3 - ... among cubes of [1:0],[0:1],[1:1],[1:-1],[1:2].
    fn binary_pair() -> (Form, Decomposition, Decomposition) {
        let all = PointSet::from_i64(1, &[&[1, 0], &[0, 1], &[1, 1], &[1, -1], &[1, 2]]).unwrap();
        let k = power_matrix(&all, 3).kernel_basis();
        assert_eq!(k.cols(), 1);
        let c = k.column(0);
        let a = Decomposition::new(all.subset(&[0, 1]), c[..2].to_vec(), 3).unwrap();
        let b = Decomposition::new(
            all.subset(&[2, 3, 4]),
            c[2..].iter().map(|x| -x).collect(),
            3,
        )
        .unwrap();
        let f = a.form();
        assert_eq!(b.form(), f);
        (f, a, b)
    }

    #[test]
    fn decomposition_json() {
        let d = Decomposition::new(PointSet::coordinate_points(1), ones(2), 3).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(
            s,
            r#"{"points":{"n":1,"points":[["1","0"],["0","1"]]},"coeffs":["1","1"],"d":3}"#
        );
        assert_eq!(serde_json::from_str::<Decomposition>(&s).unwrap(), d);
    }

    #[test]
    fn coefficients_examples() {
        let n = 3;
        let f = Form::fermat(n, 3);
        assert_eq!(
            coefficients_for(&f, &PointSet::coordinate_points(n)).unwrap(),
            Some(ones(n + 1))
        );
        let single = PointSet::new(n, vec![ProjPoint::unit(n + 1, 0)]).unwrap();
        assert_eq!(coefficients_for(&f, &single).unwrap(), None);
    }

    #[test]
    fn nonredundancy_examples() {
        let f = Form::fermat(2, 3);
        assert!(is_nonredundant(&f, &PointSet::coordinate_points(2)).unwrap());
        let x0 = crate::forms::power(&[r(1), r(0)], 3).unwrap();
        let pair = PointSet::coordinate_points(1);
        assert!(!is_nonredundant(&x0, &pair).unwrap());
        let single = PointSet::new(1, vec![ProjPoint::unit(2, 1)]).unwrap();
        assert_eq!(is_nonredundant(&x0, &single), Err(Error::NotADecomposition));
    }

    #[test]
    fn disjointify_identical_pair_cancels() {
        let (f, a, _) = binary_pair();
        let (fp, ap, bp) = disjointify(&f, &a, &a).unwrap();
        assert!(fp.is_zero());
        assert!(ap.is_empty() && bp.is_empty());
    }

    #[test]
    fn disjointify_disjoint_pair_is_unchanged() {
        let (f, a, b) = binary_pair();
        let (fp, ap, bp) = disjointify(&f, &a, &b).unwrap();
        assert_eq!((fp, ap, bp), (f, a, b));
    }

    #[test]
    fn disjointify_drops_shared_cube_with_equal_coefficient() {
        // Extend the binary pair by x2^3 on both sides.
        let (f, a, b) = binary_pair();
        let e2 = ProjPoint::unit(3, 2);
        let extend = |d: &Decomposition| {
            let mut pts = d.points.embed(2);
            pts.push(e2.clone()).unwrap();
            let mut c = d.coeffs.clone();
            c.push(Rat::one());
            Decomposition::new(pts, c, 3).unwrap()
        };
        let (a2, b2) = (extend(&a), extend(&b));
        let f2 = a2.form();
        assert!(f2.is_concise().unwrap());
        let (fp, ap, bp) = disjointify(&f2, &a2, &b2).unwrap();
        assert_eq!(fp, f.embed(2));
        assert!(ap.points.intersection(&bp.points).is_empty());
        assert_eq!(ap.len() + bp.len(), 5);
        assert_eq!(fp.concise_support().unwrap().0.len(), 2);
    }

    #[test]
    fn disjointify_keeps_shared_point_with_different_coefficient() {
        // From sum c_i p_i^3 = 0: F = c1 p1^3 + c2 p2^3 + p3^3
        //                           = (1 - c3) p3^3 - c4 p4^3 - c5 p5^3.
        let all = PointSet::from_i64(1, &[&[1, 0], &[0, 1], &[1, 1], &[1, -1], &[1, 2]]).unwrap();
        let c = power_matrix(&all, 3).kernel_basis().column(0);
        assert!(c[2] != Rat::one());
        let a = Decomposition::new(all.subset(&[0, 1, 2]), vec![c[0].clone(), c[1].clone(), r(1)], 3)
            .unwrap();
        let b = Decomposition::new(
            all.subset(&[2, 3, 4]),
            vec![r(1) - &c[2], -&c[3], -&c[4]],
            3,
        )
        .unwrap();
        let f = a.form();
        assert_eq!(b.form(), f);
        let (fp, ap, bp) = disjointify(&f, &a, &b).unwrap();
        assert_eq!(ap.points, all.subset(&[0, 1]));
        assert_eq!(bp.points, all.subset(&[2, 3, 4]));
        assert_eq!(bp.coeffs[0], -&c[2]);
        assert_eq!(ap.form(), fp);
        assert_eq!(bp.form(), fp);
    }

    #[test]
    fn sum_bound_binary_extension_is_sharp() {
        let (f, a, b) = binary_pair();
        assert_eq!(check_sum_bound(&f, &a, &b).unwrap(), (true, 0));
        let not_concise = Form::fermat(1, 3).embed(2);
        let e = Decomposition::new(PointSet::coordinate_points(1).embed(2), ones(2), 3).unwrap();
        assert!(matches!(
            check_sum_bound(&not_concise, &e, &e),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn pair_report_of_identical_sets() {
        let a = PointSet::kruskal_normal_form(4, 3).unwrap();
        let rep = pair_report(&a, &a).unwrap();
        assert_eq!(rep.intersection, a.len());
        assert!(rep.diff.is_empty());
        assert!(rep.diff_collinear && rep.diff_two_lines && rep.diff_two_planes);
        assert_eq!(rep.kruskal_a, 3);
    }

    #[test]
    fn two_flat_partition_search() {
        let mut pts = Vec::new();
        for t in 0..4 {
            pts.push(vec![1, t, 0, 0]);
            pts.push(vec![0, 0, 1, t + 1]);
        }
        let refs: Vec<&[i64]> = pts.iter().map(|p| p.as_slice()).collect();
        let lines = PointSet::from_i64(3, &refs).unwrap();
        let rep = pair_report(&lines, &PointSet::empty(3)).unwrap();
        assert!(!rep.diff_collinear && rep.diff_two_lines && rep.diff_two_planes);

        let mut generic = lines.clone();
        generic.push(ProjPoint::from_i64(&[1, 2, 3, 5]).unwrap()).unwrap();
        let rep = pair_report(&generic, &PointSet::empty(3)).unwrap();
        assert!(!rep.diff_two_lines);
        assert!(rep.diff_two_planes);
        assert!(rep.diff_collinear <= rep.diff_two_lines);
    }

    #[test]
    fn predict_cases_by_kruskal_rank() {
        use TrichotomyCase::*;
        let lgp = PointSet::kruskal_normal_form(4, 5).unwrap();
        assert_eq!(predict_cases(&lgp).unwrap(), [I].into());
        let k3 = PointSet::kruskal_normal_form(5, 3).unwrap();
        assert_eq!(predict_cases(&k3).unwrap(), [III].into());
        let k2 = PointSet::kruskal_normal_form(6, 2).unwrap();
        assert_eq!(predict_cases(&k2).unwrap(), [II, III].into());
        assert!(predict_cases(&PointSet::coordinate_points(3)).is_err());
    }

    #[test]
    fn fermat_plus_one_on_the_binary_line() {
        let (f, a, b) = binary_pair();
        assert!(verify_fermat_plus_one(&f, &a, &b).unwrap());
        assert!(verify_fermat_plus_one(&f, &b, &a).is_err());
    }

    #[test]
    fn certify_rejects_wrong_coefficients() {
        let (f, a, _) = binary_pair();
        assert!(a.certify(&f).is_ok());
        let mut wrong = a.clone();
        wrong.coeffs[0] = &wrong.coeffs[0] + Rat::one();
        assert_eq!(wrong.certify(&f), Err(Error::NotADecomposition));
    }
}
