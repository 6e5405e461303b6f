//! Finite sets of projective points: spans, Kruskal rank, orbit
//! normalization, Hilbert functions, h-vectors and Cayley-Bacharach checks.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{integer_rank, primitive_integer_vector, Mat, Rat};
use crate::forms::{LinVec, MonomialBasis};

/// Point of projective space, normalized so the first nonzero coordinate is 1.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjPoint {
    coords: Vec<Rat>,
}

impl ProjPoint {
    pub fn new(coords: Vec<Rat>) -> Result<Self> {
        let Some(lead) = coords.iter().find(|c| !c.is_zero()).cloned() else {
            return Err(Error::ZeroLinearForm);
        };
        let coords = if lead.is_one() {
            coords
        } else {
            let inv = lead.recip();
            coords.iter().map(|c| c * &inv).collect()
        };
        Ok(ProjPoint { coords })
    }

    pub fn from_i64(coords: &[i64]) -> Result<Self> {
        ProjPoint::new(coords.iter().map(|&x| Rat::from_int(x)).collect())
    }

    pub fn unit(nvars: usize, i: usize) -> Self {
        ProjPoint {
            coords: LinVec::unit(nvars, i).into_coords(),
        }
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn nvars(&self) -> usize {
        self.coords.len()
    }

    /// Integer representative with content 1.
    pub fn integer_coords(&self) -> Vec<BigInt> {
        primitive_integer_vector(&self.coords)
    }

    /// `[g v]`.
    pub fn transform(&self, g: &Mat) -> Result<ProjPoint> {
        ProjPoint::new(g.mul_vec(&self.coords))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(Rat::to_f64).collect()
    }
}

impl AsRef<[Rat]> for ProjPoint {
    fn as_ref(&self) -> &[Rat] {
        &self.coords
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.coords.iter().join(":"))
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Ordered list of pairwise distinct points of `P^n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    n: usize,
    pts: Vec<ProjPoint>,
}

impl PointSet {
    pub fn new(n: usize, pts: Vec<ProjPoint>) -> Result<Self> {
        for (i, p) in pts.iter().enumerate() {
            if p.nvars() != n + 1 {
                return Err(Error::DimensionMismatch(format!(
                    "point {i} has {} coordinates, expected {}",
                    p.nvars(),
                    n + 1
                )));
            }
            if pts[..i].contains(p) {
                return Err(Error::DuplicatePoint(i));
            }
        }
        Ok(PointSet { n, pts })
    }

    pub fn empty(n: usize) -> Self {
        PointSet { n, pts: Vec::new() }
    }

    pub fn from_i64(n: usize, pts: &[&[i64]]) -> Result<Self> {
        let pts = pts
            .iter()
            .map(|p| ProjPoint::from_i64(p))
            .collect::<Result<Vec<_>>>()?;
        PointSet::new(n, pts)
    }

    /// `{e_0, ..., e_n}`.
    pub fn coordinate_points(n: usize) -> Self {
        PointSet {
            n,
            pts: (0..=n).map(|i| ProjPoint::unit(n + 1, i)).collect(),
        }
    }

    /// `A_r = {e_0, ..., e_n, e_0 + ... + e_{r-1}}`.
    pub fn kruskal_normal_form(n: usize, r: usize) -> Result<Self> {
        if r < 2 || r > n + 1 {
            return Err(Error::Precondition(format!(
                "A_r needs 2 <= r <= n+1, got r={r}, n={n}"
            )));
        }
        let mut pts = PointSet::coordinate_points(n).pts;
        let sum = (0..=n)
            .map(|i| if i < r { Rat::one() } else { Rat::zero() })
            .collect();
        pts.push(ProjPoint::new(sum)?);
        PointSet::new(n, pts)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    pub fn points(&self) -> &[ProjPoint] {
        &self.pts
    }

    pub fn get(&self, i: usize) -> &ProjPoint {
        &self.pts[i]
    }

    pub fn contains(&self, p: &ProjPoint) -> bool {
        self.pts.contains(p)
    }

    pub fn position(&self, p: &ProjPoint) -> Option<usize> {
        self.pts.iter().position(|q| q == p)
    }

    pub fn subset(&self, indices: &[usize]) -> PointSet {
        PointSet {
            n: self.n,
            pts: indices.iter().map(|&i| self.pts[i].clone()).collect(),
        }
    }

    pub fn without(&self, index: usize) -> PointSet {
        let mut pts = self.pts.clone();
        pts.remove(index);
        PointSet { n: self.n, pts }
    }

    /// Points of `self` followed by the points of `other` not already present.
    pub fn union(&self, other: &PointSet) -> PointSet {
        assert_eq!(self.n, other.n, "ambient dimensions differ");
        let mut pts = self.pts.clone();
        for p in &other.pts {
            if !pts.contains(p) {
                pts.push(p.clone());
            }
        }
        PointSet { n: self.n, pts }
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        PointSet {
            n: self.n,
            pts: self.pts.iter().filter(|p| other.contains(p)).cloned().collect(),
        }
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        PointSet {
            n: self.n,
            pts: self.pts.iter().filter(|p| !other.contains(p)).cloned().collect(),
        }
    }

    /// Points sorted by coordinates.
    pub fn sorted(&self) -> PointSet {
        let mut pts = self.pts.clone();
        pts.sort();
        PointSet { n: self.n, pts }
    }

    /// Same points regardless of order.
    pub fn same_set(&self, other: &PointSet) -> bool {
        self.n == other.n && self.sorted().pts == other.sorted().pts
    }

    /// Pads every point with zeros up to `P^{n_target}`.
    pub fn embed(&self, n_target: usize) -> PointSet {
        assert!(n_target >= self.n);
        let pts = self
            .pts
            .iter()
            .map(|p| {
                let mut c = p.coords.clone();
                c.resize(n_target + 1, Rat::zero());
                ProjPoint { coords: c }
            })
            .collect();
        PointSet { n: n_target, pts }
    }

    /// `g` applied to every point.
    pub fn transform(&self, g: &Mat) -> Result<PointSet> {
        if !g.is_invertible() || g.rows() != self.n + 1 {
            return Err(Error::SingularMatrix);
        }
        let pts = self
            .pts
            .iter()
            .map(|p| p.transform(g))
            .collect::<Result<Vec<_>>>()?;
        PointSet::new(self.n, pts)
    }

    pub fn push(&mut self, p: ProjPoint) -> Result<()> {
        if p.nvars() != self.n + 1 {
            return Err(Error::DimensionMismatch("point dimension".into()));
        }
        if self.contains(&p) {
            return Err(Error::DuplicatePoint(self.pts.len()));
        }
        self.pts.push(p);
        Ok(())
    }

    pub fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        self.pts.iter().map(ProjPoint::integer_coords).collect()
    }

    /// Rank of the coordinate matrix.
    pub fn rank(&self) -> usize {
        integer_rank(&self.integer_rows())
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PointSet(P^{}: {{{}}})", self.n, self.pts.iter().join(", "))
    }
}

#[derive(Serialize, Deserialize)]
struct PointSetWire {
    n: usize,
    points: Vec<Vec<Rat>>,
}

impl Serialize for PointSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PointSetWire {
            n: self.n,
            points: self.pts.iter().map(|p| p.coords.clone()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PointSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = PointSetWire::deserialize(d)?;
        let pts = w
            .points
            .into_iter()
            .map(ProjPoint::new)
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        PointSet::new(w.n, pts).map_err(serde::de::Error::custom)
    }
}

/// Rank of the points selected by `indices` from precomputed integer rows.
pub(crate) fn subset_rank(rows: &[Vec<BigInt>], indices: &[usize]) -> usize {
    if indices.is_empty() {
        return 0;
    }
    let sub: Vec<Vec<BigInt>> = indices.iter().map(|&i| rows[i].clone()).collect();
    integer_rank(&sub)
}

/// Projective dimension of the linear span.
pub fn span_dim(a: &PointSet) -> Result<usize> {
    if a.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    Ok(a.rank() - 1)
}

/// Largest `k <= min(len, n+1)` such that every `k`-subset is independent.
pub fn kruskal_rank(a: &PointSet) -> usize {
    let cap = a.len().min(a.n + 1);
    let rows = a.integer_rows();
    for k in 2..=cap {
        let dependent = (0..a.len())
            .combinations(k)
            .any(|c| subset_rank(&rows, &c) < k);
        if dependent {
            return k - 1;
        }
    }
    cap
}

/// Linear general position: Kruskal rank equals `min(len, n+1)`.
pub fn is_lgp(a: &PointSet) -> bool {
    kruskal_rank(a) == a.len().min(a.n + 1)
}

/// Smallest dependent subset, lexicographically first by indices among
/// subsets of that size.
pub fn minimal_dependent_subset(a: &PointSet) -> Result<PointSet> {
    let rows = a.integer_rows();
    if integer_rank(&rows) == a.len() {
        return Err(Error::LinearlyIndependent);
    }
    for k in 2..=a.len() {
        if let Some(c) = (0..a.len())
            .combinations(k)
            .find(|c| subset_rank(&rows, c) < k)
        {
            return Ok(a.subset(&c));
        }
    }
    unreachable!("a dependent set has a dependent subset")
}

/// Invertible `g` and `r` with `g . a = A_r` as sets, where `a` spans `P^n`
/// and has `n + 2` points. `r` is the Kruskal rank of `a`.
pub fn normalize_orbit(a: &PointSet) -> Result<(Mat, usize)> {
    let n = a.n;
    let nv = n + 1;
    if a.len() != n + 2 {
        return Err(Error::Precondition(format!(
            "orbit normalization needs n+2 = {} points, got {}",
            n + 2,
            a.len()
        )));
    }
    if span_dim(a)? != n {
        return Err(Error::Precondition("points do not span P^n".into()));
    }
    for c in 0..a.len() {
        let others: Vec<usize> = (0..a.len()).filter(|&i| i != c).collect();
        let basis = Mat::from_cols(
            others.iter().map(|&i| a.pts[i].coords.clone()).collect(),
            nv,
        );
        if basis.rank() < nv {
            continue;
        }
        let mu = basis
            .solve(&a.pts[c].coords)
            .expect("independent points span the space");
        let (support, rest): (Vec<usize>, Vec<usize>) =
            (0..nv).partition(|&j| !mu[j].is_zero());
        let order: Vec<usize> = support.iter().chain(&rest).copied().collect();
        let reordered = Mat::from_cols(
            order.iter().map(|&j| a.pts[others[j]].coords.clone()).collect(),
            nv,
        );
        let to_unit = reordered.inverse().ok_or(Error::SingularMatrix)?;
        let mut rescale = Mat::identity(nv);
        for (k, &j) in support.iter().enumerate() {
            rescale[(k, k)] = mu[j].recip();
        }
        let g = rescale.mul_mat(&to_unit);
        let r = support.len();
        debug_assert!(a.transform(&g)?.same_set(&PointSet::kruskal_normal_form(n, r)?));
        return Ok((g, r));
    }
    Err(Error::Precondition(
        "no n+1 independent points among the set".into(),
    ))
}

/// First difference of the Hilbert function, truncated to its nonzero values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HVector {
    pub values: Vec<usize>,
    pub tau: usize,
}

impl HVector {
    /// `Dh_Z(t)`, zero past `tau`.
    pub fn at(&self, t: usize) -> usize {
        self.values.get(t).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.values.iter().sum()
    }

    /// If `Dh(t) <= t` then `Dh(t+1) <= Dh(t)`, for every `t`.
    pub fn satisfies_macaulay_decay(&self) -> bool {
        (0..=self.values.len()).all(|t| self.at(t) > t || self.at(t + 1) <= self.at(t))
    }
}

impl fmt::Display for HVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.values.iter().join(","))
    }
}

/// `h_Z(t)`: rank of the degree-`t` monomials evaluated at the points of `z`.
pub fn hilbert_function(z: &PointSet, t: u32) -> usize {
    if z.is_empty() {
        return 0;
    }
    let basis = MonomialBasis::new(z.n + 1, t);
    let rows: Vec<Vec<Rat>> = z.pts.iter().map(|p| basis.evaluate(&p.coords)).collect();
    crate::exact::rank_of_rows(&rows)
}

pub fn h_vector(z: &PointSet) -> HVector {
    let mut values = Vec::new();
    let mut prev = 0;
    let mut t = 0;
    while prev < z.len() {
        let h = hilbert_function(z, t);
        debug_assert!(h > prev, "Hilbert function stalled before reaching len(Z)");
        values.push(h - prev);
        prev = h;
        t += 1;
    }
    let tau = values.len().saturating_sub(1);
    HVector { values, tau }
}

/// Cayley-Bacharach in degree `t`: removing any single point leaves
/// `h_Z(t)` unchanged.
pub fn cb_check(z: &PointSet, t: u32) -> Result<bool> {
    if z.len() < 2 {
        return Err(Error::Precondition(
            "Cayley-Bacharach check needs at least 2 points".into(),
        ));
    }
    // point i is redundant iff some linear relation among the evaluation rows involves it
    let basis = MonomialBasis::new(z.n + 1, t);
    let cols: Vec<Vec<Rat>> = z.pts.iter().map(|p| basis.evaluate(&p.coords)).collect();
    let relations = Mat::from_cols(cols, basis.len()).kernel_basis();
    Ok((0..z.len()).all(|i| (0..relations.cols()).any(|k| !relations[(i, k)].is_zero())))
}

/// `Dh(0) + ... + Dh(s) <= Dh(t+1) + ... + Dh(t+1-s)` for all `0 <= s <= t+1`.
pub fn cb_hf_inequality(z: &PointSet, t: u32) -> bool {
    hf_inequality_holds(&h_vector(z), t as usize)
}

pub(crate) fn hf_inequality_holds(h: &HVector, t: usize) -> bool {
    (0..=t + 1).all(|s| {
        let low: usize = (0..=s).map(|i| h.at(i)).sum();
        let high: usize = (t + 1 - s..=t + 1).map(|i| h.at(i)).sum();
        low <= high
    })
}
