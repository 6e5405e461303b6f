//! Tangent spaces to Veronese varieties, Terracini defects and the orbit
//! dimension estimate.
//!
//! The affine tangent space to `v_d(P V)` at `[L^d]` is `V . L^{d-1}`; a
//! [`TangentBlock`] stores its spanning forms `x_0 L^{d-1}, ..., x_n L^{d-1}`.

use serde::{Deserialize, Serialize};

use crate::decomp::power_matrix;
use crate::error::{Error, Result};
use crate::exact::{rank_of_rows, Mat, Rat};
use crate::forms::{LinVec, MonomialBasis};
use crate::points::{kruskal_rank, span_dim, PointSet, ProjPoint};
use crate::seed::{rng_for, small_rat, sub_seed};

/// Coordinate bound for the random rational point of the Jacobian estimate.
pub const JACOBIAN_SAMPLE_BOUND: i64 = 20;
const JACOBIAN_RETRIES: u64 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentBlock {
    pub point: ProjPoint,
    pub d: u32,
    /// `n + 1` rows, one per form `x_i L^{d-1}`, in the degree-`d` monomial order.
    pub matrix: Mat,
}

fn tangent_rows(l: &[Rat], d: u32, basis_d: &MonomialBasis) -> Vec<Vec<Rat>> {
    let nv = l.len();
    let lower = MonomialBasis::new(nv, d - 1);
    let pow = lower.power_vector(l);
    (0..nv)
        .map(|i| {
            let mut row = vec![Rat::zero(); basis_d.len()];
            for (e, c) in lower.exponents().iter().zip(&pow) {
                if c.is_zero() {
                    continue;
                }
                let mut e2 = e.clone();
                e2[i] += 1;
                row[basis_d.index_of(&e2).unwrap()] = c.clone();
            }
            row
        })
        .collect()
}

pub fn tangent_block(l: &ProjPoint, d: u32) -> Result<TangentBlock> {
    if d < 2 {
        return Err(Error::Precondition("tangent blocks need d >= 2".into()));
    }
    let basis = MonomialBasis::new(l.nvars(), d);
    let rows = tangent_rows(l.coords(), d, &basis);
    Ok(TangentBlock {
        point: l.clone(),
        d,
        matrix: Mat::from_rows(rows, basis.len()),
    })
}

/// Integer representatives keep the stacked rank computation cheap; the row
/// space does not depend on the representative.
fn stacked_tangent_rank<P: AsRef<[Rat]>>(points: &[P], nvars: usize, d: u32) -> usize {
    let basis = MonomialBasis::new(nvars, d);
    let rows: Vec<Vec<Rat>> = points
        .iter()
        .flat_map(|p| {
            let ints: Vec<Rat> = crate::exact::primitive_integer_vector(p.as_ref())
                .into_iter()
                .map(Rat::from)
                .collect();
            tangent_rows(&ints, d, &basis)
        })
        .collect();
    if rows.is_empty() {
        return 0;
    }
    rank_of_rows(&rows)
}

/// `len(a) (n+1) - rank` of the stacked tangent blocks; zero means the
/// tangent spaces are linearly independent.
pub fn terracini_defect(a: &PointSet, d: u32) -> Result<usize> {
    if d < 2 {
        return Err(Error::Precondition("tangent blocks need d >= 2".into()));
    }
    if a.is_empty() {
        return Ok(0);
    }
    if power_matrix(a, d).rank() < a.len() {
        return Err(Error::DependentPowers);
    }
    let nv = a.n() + 1;
    Ok(a.len() * nv - stacked_tangent_rank(a.points(), nv, d))
}

/// Membership of a concise `(n+2)`-point set in the concise Terracini locus
/// of `v_3(P^n)`: Kruskal rank at most 3 (four coplanar points).
pub fn in_concise_terracini(a: &PointSet) -> Result<bool> {
    let n = a.n();
    if n < 3 {
        return Err(Error::Precondition(format!(
            "classifier needs n >= 3, got n={n}"
        )));
    }
    if a.len() != n + 2 {
        return Err(Error::Precondition(format!(
            "expected n+2 = {} points, got {}",
            n + 2,
            a.len()
        )));
    }
    if span_dim(a)? != n {
        return Err(Error::Precondition("points do not span P^n".into()));
    }
    Ok(kruskal_rank(a) <= 3)
}

/// Dependence of the tangent spaces at the points of `a`, computed once in
/// `P^n` and once inside `P(V')` for the subspace `V'` spanned by `subspace`.
/// Returns `(ambient_dependent, restricted_dependent)`.
pub fn restricted_dependence(a: &PointSet, subspace: &[LinVec], d: u32) -> Result<(bool, bool)> {
    if d < 2 {
        return Err(Error::Precondition("tangent blocks need d >= 2".into()));
    }
    let nv = a.n() + 1;
    if subspace.iter().any(|v| v.coords().len() != nv) {
        return Err(Error::DimensionMismatch("subspace basis vector length".into()));
    }
    let basis = Mat::from_cols(subspace.iter().map(|v| v.coords().to_vec()).collect(), nv);
    let k = subspace.len();
    if basis.rank() != k {
        return Err(Error::Precondition("subspace basis is dependent".into()));
    }
    if k >= nv {
        return Err(Error::Precondition("subspace is not proper".into()));
    }
    let mut local = Vec::with_capacity(a.len());
    for (i, p) in a.points().iter().enumerate() {
        let y = basis.solve(p.coords()).ok_or_else(|| {
            Error::Precondition(format!("point {i} lies outside the subspace"))
        })?;
        local.push(y);
    }
    let ambient = stacked_tangent_rank(a.points(), nv, d) < a.len() * nv;
    let restricted = stacked_tangent_rank(&local, k, d) < a.len() * k;
    Ok((ambient, restricted))
}

/// Jacobian rank at a random rational point of
/// `(v_0..v_n, lambda_0..lambda_{r-1}) -> ([v_0], ..., [v_n], [sum lambda_i v_i])`
/// in the affine charts `x_0 != 0`.
pub fn orbit_dimension_estimate(n: usize, r: usize, seed: u64) -> Result<usize> {
    if r < 2 || r > n + 1 {
        return Err(Error::Precondition(format!(
            "orbit dimension needs 2 <= r <= n+1, got r={r}, n={n}"
        )));
    }
    for attempt in 0..JACOBIAN_RETRIES {
        let mut rng = rng_for(sub_seed(seed, attempt));
        let nv = n + 1;
        let v: Vec<Vec<Rat>> = (0..nv)
            .map(|_| (0..nv).map(|_| small_rat(&mut rng, JACOBIAN_SAMPLE_BOUND)).collect())
            .collect();
        let lambda: Vec<Rat> = (0..r).map(|_| small_rat(&mut rng, JACOBIAN_SAMPLE_BOUND)).collect();
        if let Some(j) = orbit_jacobian(&v, &lambda) {
            return Ok(j.rank());
        }
    }
    Err(Error::ResampleExhausted {
        family: "orbit-jacobian".into(),
        attempts: JACOBIAN_RETRIES as usize,
    })
}

/// Exact Jacobian, or `None` when a point falls on the chart boundary.
fn orbit_jacobian(v: &[Vec<Rat>], lambda: &[Rat]) -> Option<Mat> {
    let nv = v.len();
    let n = nv - 1;
    let r = lambda.len();
    let w: Vec<Rat> = (0..nv)
        .map(|c| (0..r).map(|j| &lambda[j] * &v[j][c]).sum())
        .collect();
    if v.iter().any(|vi| vi[0].is_zero()) || w[0].is_zero() {
        return None;
    }
    let cols = nv * nv + r;
    let var = |i: usize, k: usize| i * nv + k;
    let mut jac = Mat::zeros((n + 1) * n + n, cols);
    // [v_i] in the chart: v_i[c] / v_i[0], c = 1..n
    for (i, vi) in v.iter().enumerate() {
        let inv = vi[0].recip();
        let inv2 = &inv * &inv;
        for c in 1..nv {
            let row = i * n + (c - 1);
            jac[(row, var(i, c))] = inv.clone();
            jac[(row, var(i, 0))] = -(&vi[c] * &inv2);
        }
    }
    // [w] in the chart, w = sum_{j<r} lambda_j v_j
    let inv = w[0].recip();
    let inv2 = &inv * &inv;
    for c in 1..nv {
        let row = nv * n + (c - 1);
        let wc_inv2 = &w[c] * &inv2;
        for j in 0..r {
            jac[(row, var(j, c))] = &lambda[j] * &inv;
            jac[(row, var(j, 0))] = -(&lambda[j] * &wc_inv2);
            jac[(row, nv * nv + j)] = &v[j][c] * &inv - &v[j][0] * &wc_inv2;
        }
    }
    Some(jac)
}

/// Tangent-space summary for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefectReport {
    pub n: usize,
    pub len: usize,
    pub kruskal_rank: usize,
    pub defect: usize,
    pub in_concise_locus: bool,
}

pub fn defect_report(a: &PointSet) -> Result<DefectReport> {
    Ok(DefectReport {
        n: a.n(),
        len: a.len(),
        kruskal_rank: kruskal_rank(a),
        defect: terracini_defect(a, 3)?,
        in_concise_locus: in_concise_terracini(a)?,
    })
}
