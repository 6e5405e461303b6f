//! Floating-point search for complex cubic decompositions
//! `F = L_1^3 + ... + L_r^3`.
//!
//! Each restart runs a Levenberg-Marquardt minimization of the coefficient
//! residual over the real and imaginary parts of the `L_i`. When
//! `r (n+1)` reaches the number of coefficients, the restart first tracks a
//! random decomposition of a random start form to the target and polishes
//! the endpoint. The target is scaled to unit norm, so residuals are
//! relative. Converged runs are grouped into classes modulo permutation and
//! cube roots of unity.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decomp::{splits_into_two_flats, Decomposition};
use crate::error::{Error, Result};
use crate::forms::{monomials, multinomial, Form, MonomialBasis};
use crate::seed::{rng_for, sub_seed};

pub const DEFAULT_TOL: f64 = 1e-18;
pub const DEFAULT_MAX_ITER: usize = 500;
pub const DEFAULT_DAMPING: f64 = 1e-3;
pub const MATCH_THRESHOLD: f64 = 1e-6;

/// Coefficient vector of `L^3` in the degree-3 monomial order.
fn cube_vector(l: &[Complex64], exps: &[Vec<u32>], mult: &[f64]) -> Vec<Complex64> {
    exps.iter()
        .zip(mult)
        .map(|(e, &m)| {
            let mut v = Complex64::new(m, 0.0);
            for (x, &a) in l.iter().zip(e) {
                v *= x.powu(a);
            }
            v
        })
        .collect()
}

/// Residual map `p -> t - sum_i L_i(p)^3` split into real and imaginary parts.
///
/// Parameters are laid out as all real parts (`r` blocks of `n+1`) followed
/// by all imaginary parts.
#[derive(Clone, Debug)]
pub struct ResidualModel {
    nvars: usize,
    r: usize,
    exps: Vec<Vec<u32>>,
    mult: Vec<f64>,
    target: Vec<Complex64>,
    scale: f64,
}

impl ResidualModel {
    pub fn new(f: &Form, r: usize) -> Result<Self> {
        if f.degree() != 3 {
            return Err(Error::Precondition(format!(
                "numerical search needs d = 3, got d = {}",
                f.degree()
            )));
        }
        if r == 0 {
            return Err(Error::Precondition("numerical search needs r >= 1".into()));
        }
        if f.is_zero() {
            return Err(Error::ZeroForm);
        }
        let nvars = f.nvars();
        let exps = monomials(nvars, 3);
        let mult = exps.iter().map(|e| multinomial(e) as f64).collect();
        let basis = MonomialBasis::new(nvars, 3);
        let dense: Vec<f64> = f.dense(&basis).iter().map(|c| c.to_f64()).collect();
        let scale = dense.iter().map(|c| c * c).sum::<f64>().sqrt();
        let target = dense.iter().map(|c| Complex64::new(c / scale, 0.0)).collect();
        Ok(ResidualModel {
            nvars,
            r,
            exps,
            mult,
            target,
            scale,
        })
    }

    pub fn num_params(&self) -> usize {
        2 * self.r * self.nvars
    }

    pub fn num_residuals(&self) -> usize {
        2 * self.exps.len()
    }

    /// Euclidean norm of the coefficient vector of the original form.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn vectors(&self, p: &[f64]) -> Vec<Vec<Complex64>> {
        let off = self.r * self.nvars;
        (0..self.r)
            .map(|i| {
                (0..self.nvars)
                    .map(|k| Complex64::new(p[i * self.nvars + k], p[off + i * self.nvars + k]))
                    .collect()
            })
            .collect()
    }

    pub fn params(&self, vectors: &[Vec<Complex64>]) -> Vec<f64> {
        let off = self.r * self.nvars;
        let mut p = vec![0.0; self.num_params()];
        for (i, v) in vectors.iter().enumerate() {
            for (k, z) in v.iter().enumerate() {
                p[i * self.nvars + k] = z.re;
                p[off + i * self.nvars + k] = z.im;
            }
        }
        p
    }

    pub fn residual(&self, p: &[f64]) -> DVector<f64> {
        let mut res = self.target.clone();
        for l in self.vectors(p) {
            for (acc, c) in res.iter_mut().zip(cube_vector(&l, &self.exps, &self.mult)) {
                *acc -= c;
            }
        }
        let m = res.len();
        DVector::from_fn(2 * m, |i, _| if i < m { res[i].re } else { res[i - m].im })
    }

    /// `sum_i L_i^3` for stacked complex coordinates `z`.
    pub fn complex_values(&self, z: &DVector<Complex64>) -> DVector<Complex64> {
        let mut out = DVector::zeros(self.exps.len());
        for l in z.as_slice().chunks(self.nvars) {
            for (acc, c) in out.iter_mut().zip(cube_vector(l, &self.exps, &self.mult)) {
                *acc += c;
            }
        }
        out
    }

    /// Holomorphic Jacobian of [`ResidualModel::complex_values`].
    pub fn complex_jacobian(&self, z: &DVector<Complex64>) -> DMatrix<Complex64> {
        let nv = self.nvars;
        let mut j = DMatrix::zeros(self.exps.len(), self.r * nv);
        for (i, l) in z.as_slice().chunks(nv).enumerate() {
            for (row, (e, &mu)) in self.exps.iter().zip(&self.mult).enumerate() {
                for k in 0..nv {
                    if e[k] == 0 {
                        continue;
                    }
                    let mut g = Complex64::new(mu * e[k] as f64, 0.0);
                    for (q, x) in l.iter().enumerate() {
                        let a = if q == k { e[q] - 1 } else { e[q] };
                        g *= x.powu(a);
                    }
                    j[(row, i * nv + k)] = g;
                }
            }
        }
        j
    }

    /// Analytic Jacobian of [`ResidualModel::residual`].
    pub fn jacobian(&self, p: &[f64]) -> DMatrix<f64> {
        let m = self.exps.len();
        let off = self.r * self.nvars;
        let jc = self.complex_jacobian(&self.complex_point(p));
        let mut j = DMatrix::zeros(2 * m, self.num_params());
        for row in 0..m {
            for col in 0..off {
                let g = jc[(row, col)];
                j[(row, col)] = -g.re;
                j[(m + row, col)] = -g.im;
                j[(row, off + col)] = g.im;
                j[(m + row, off + col)] = -g.re;
            }
        }
        j
    }

    pub fn complex_point(&self, p: &[f64]) -> DVector<Complex64> {
        let off = self.r * self.nvars;
        DVector::from_fn(off, |i, _| Complex64::new(p[i], p[off + i]))
    }

    pub fn real_params(&self, z: &DVector<Complex64>) -> Vec<f64> {
        let mut p: Vec<f64> = z.iter().map(|c| c.re).collect();
        p.extend(z.iter().map(|c| c.im));
        p
    }

    /// Whether the parameter count reaches the number of coefficients, so
    /// that generic targets are reachable and path tracking applies.
    pub fn is_dominant(&self) -> bool {
        self.r * self.nvars >= self.exps.len()
    }

    fn normalized_target(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.target)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NumDecomp {
    pub vectors: Vec<Vec<Complex64>>,
    pub residual: f64,
}

#[derive(Serialize, Deserialize)]
struct NumDecompWire {
    residual: f64,
    vectors: Vec<Vec<[f64; 2]>>,
}

impl Serialize for NumDecomp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        NumDecompWire {
            residual: self.residual,
            vectors: self
                .vectors
                .iter()
                .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for NumDecomp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = NumDecompWire::deserialize(d)?;
        Ok(NumDecomp {
            residual: w.residual,
            vectors: w
                .vectors
                .into_iter()
                .map(|v| v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
                .collect(),
        })
    }
}

fn cmp_vectors(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o.is_ne() {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Relative size below which a coordinate counts as zero when choosing the
/// leading coordinate.
pub const LEAD_THRESHOLD: f64 = 1e-6;

/// Multiplies `v` by a cube root of unity so that its first non-negligible
/// coordinate has argument in `[0, 2pi/3)`.
pub fn phase_normalize(v: &[Complex64]) -> Vec<Complex64> {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let Some(lead) = v.iter().find(|z| z.norm() > LEAD_THRESHOLD * max) else {
        return v.to_vec();
    };
    let sector = 2.0 * PI / 3.0;
    let theta = lead.arg();
    let mut k = ((theta - theta.rem_euclid(sector)) / sector).round();
    // arguments a hair below the sector boundary land on the next real axis
    if sector - theta.rem_euclid(sector) < 1e-9 {
        k += 1.0;
    }
    let rot = Complex64::from_polar(1.0, -k * sector);
    v.iter().map(|z| z * rot).collect()
}

impl NumDecomp {
    /// Phase-normalized and sorted copy.
    pub fn canonical(vectors: Vec<Vec<Complex64>>, residual: f64) -> Self {
        let mut vectors: Vec<Vec<Complex64>> = vectors.iter().map(|v| phase_normalize(v)).collect();
        vectors.sort_by(|a, b| cmp_vectors(a, b));
        NumDecomp { vectors, residual }
    }

    /// Float image of an exact decomposition, absorbing each coefficient with
    /// its real cube root.
    pub fn from_exact(dec: &Decomposition) -> Result<Self> {
        if dec.d != 3 {
            return Err(Error::Precondition("only cubic decompositions convert".into()));
        }
        let vectors = dec
            .points
            .points()
            .iter()
            .zip(&dec.coeffs)
            .map(|(p, c)| {
                let s = c.to_f64().cbrt();
                p.to_f64().into_iter().map(|x| Complex64::new(x * s, 0.0)).collect()
            })
            .collect();
        Ok(NumDecomp::canonical(vectors, 0.0))
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Relative residual against `f`.
    pub fn residual_against(&self, f: &Form) -> Result<f64> {
        let model = ResidualModel::new(f, self.len().max(1))?;
        let scaled: Vec<Vec<Complex64>> = self
            .vectors
            .iter()
            .map(|v| v.iter().map(|z| z / model.scale.cbrt()).collect())
            .collect();
        if scaled.is_empty() {
            return Ok(1.0);
        }
        Ok(model.residual(&model.params(&scaled)).norm_squared())
    }

    pub fn structure(&self, tol: f64) -> NumericStructure {
        numeric_structure(&self.vectors, tol)
    }
}

/// Optimal-assignment distance between the cube terms of two decompositions,
/// divided by `scale`. Infinite when the lengths differ.
pub fn matching_distance(a: &NumDecomp, b: &NumDecomp, scale: f64) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let r = a.len();
    if r == 0 {
        return 0.0;
    }
    let nvars = a.vectors[0].len();
    let exps = monomials(nvars, 3);
    let mult: Vec<f64> = exps.iter().map(|e| multinomial(e) as f64).collect();
    let ta: Vec<Vec<Complex64>> = a.vectors.iter().map(|v| cube_vector(v, &exps, &mult)).collect();
    let tb: Vec<Vec<Complex64>> = b.vectors.iter().map(|v| cube_vector(v, &exps, &mult)).collect();
    let cost: Vec<Vec<f64>> = ta
        .iter()
        .map(|x| {
            tb.iter()
                .map(|y| x.iter().zip(y).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt() / scale)
                .collect()
        })
        .collect();
    // dp[mask] = best cost of matching a[0..popcount(mask)] onto the b-indices in mask
    let mut dp = vec![f64::INFINITY; 1 << r];
    dp[0] = 0.0;
    for mask in 0usize..(1 << r) {
        if !dp[mask].is_finite() {
            continue;
        }
        let i = mask.count_ones() as usize;
        if i == r {
            continue;
        }
        for j in 0..r {
            if mask & (1 << j) == 0 {
                let next = mask | (1 << j);
                dp[next] = dp[next].min(dp[mask] + cost[i][j]);
            }
        }
    }
    dp[(1 << r) - 1]
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub r: usize,
    pub restarts: usize,
    pub tol: f64,
    pub seed: u64,
    pub max_iter: usize,
    pub init_damping: f64,
    pub match_threshold: f64,
    /// Warm-start each restart by path tracking when the model is dominant.
    pub track: bool,
}

impl SearchConfig {
    pub fn new(r: usize, restarts: usize, tol: f64, seed: u64) -> Self {
        SearchConfig {
            r,
            restarts,
            tol,
            seed,
            max_iter: DEFAULT_MAX_ITER,
            init_damping: DEFAULT_DAMPING,
            match_threshold: MATCH_THRESHOLD,
            track: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub r: usize,
    pub restarts: usize,
    pub converged: usize,
    pub convergence_rate: f64,
    pub best_residual: f64,
    pub class_sizes: Vec<usize>,
    pub classes: Vec<NumDecomp>,
}

/// Outcome of a single minimization, in normalized coordinates.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub params: Vec<f64>,
    pub cost: f64,
    pub iterations: usize,
}

/// Levenberg-Marquardt from `p0`.
pub fn minimize(model: &ResidualModel, p0: Vec<f64>, cfg: &SearchConfig) -> RunResult {
    let mut p = DVector::from_vec(p0);
    let mut res = model.residual(p.as_slice());
    let mut cost = res.norm_squared();
    let mut mu = cfg.init_damping;
    let mut jac = model.jacobian(p.as_slice());
    let mut iterations = 0;
    while iterations < cfg.max_iter && cost >= cfg.tol {
        iterations += 1;
        let jt = jac.transpose();
        let mut lhs = &jt * &jac;
        let rhs = -(&jt * &res);
        for i in 0..lhs.nrows() {
            lhs[(i, i)] += mu;
        }
        let Some(chol) = lhs.cholesky() else {
            mu *= 2.0;
            continue;
        };
        let step = chol.solve(&rhs);
        let trial = &p + step;
        let trial_res = model.residual(trial.as_slice());
        let trial_cost = trial_res.norm_squared();
        if trial_cost < cost {
            p = trial;
            res = trial_res;
            cost = trial_cost;
            jac = model.jacobian(p.as_slice());
            mu /= 3.0;
        } else {
            mu *= 2.0;
            if mu > 1e30 {
                break;
            }
        }
    }
    RunResult {
        params: p.as_slice().to_vec(),
        cost,
        iterations,
    }
}

/// Minimum-norm least-squares solution, tolerant of rank-deficient `j`.
fn linear_solve(j: &DMatrix<Complex64>, b: &DVector<Complex64>) -> Option<DVector<Complex64>> {
    j.clone().svd(true, true).solve(b, 1e-12).ok()
}

const TRACK_MAX_STEPS: usize = 2000;
const TRACK_MIN_STEP: f64 = 1e-14;
const TRACK_MAX_NORM: f64 = 1e6;

/// Follows a solution of `sum L_i^3 = T(t)` from `t = 0` to `t = 1`, where
/// `T` moves from `start` to `end` along `s(t) = t / (t + gamma (1 - t))`.
/// Returns the endpoint, or `Err` with the last tracked point if the path is
/// lost.
pub fn track_path(
    model: &ResidualModel,
    z0: DVector<Complex64>,
    start: &DVector<Complex64>,
    end: &DVector<Complex64>,
    gamma: Complex64,
) -> std::result::Result<DVector<Complex64>, DVector<Complex64>> {
    let one = Complex64::new(1.0, 0.0);
    let target = |t: f64| {
        let tc = Complex64::new(t, 0.0);
        let s = tc / (tc + gamma * (1.0 - t));
        start * (one - s) + end * s
    };
    let mut z = z0;
    let mut t = 0.0_f64;
    let mut h = 0.02_f64;
    for _ in 0..TRACK_MAX_STEPS {
        if t >= 1.0 {
            return Ok(z);
        }
        let t1 = (t + h).min(1.0);
        let goal = target(t1);
        let corrected = linear_solve(&model.complex_jacobian(&z), &(&goal - target(t))).and_then(|dz| {
            let mut zn = &z + dz;
            for _ in 0..4 {
                let dz = linear_solve(&model.complex_jacobian(&zn), &(&goal - model.complex_values(&zn)))?;
                zn += &dz;
                if dz.norm() < 1e-9 * (1.0 + zn.norm()) {
                    return (zn.norm() < TRACK_MAX_NORM).then_some(zn);
                }
            }
            None
        });
        match corrected {
            Some(zn) => {
                z = zn;
                t = t1;
                h = (h * 1.5).min(0.1);
            }
            None => {
                h *= 0.5;
                if h < TRACK_MIN_STEP {
                    return Err(z);
                }
            }
        }
    }
    Err(z)
}

/// One restart: Gaussian start, path tracking when the model is dominant,
/// then damped Gauss-Newton on the result.
pub fn run_restart(model: &ResidualModel, cfg: &SearchConfig, seed: u64) -> RunResult {
    let mut rng = rng_for(seed);
    let p0 = gaussian_params(model, &mut rng);
    if cfg.track && model.is_dominant() {
        let angle: f64 = rng.random_range(0.0..2.0 * PI);
        let gamma = Complex64::from_polar(1.0, angle);
        let z0 = model.complex_point(&p0);
        let start = model.complex_values(&z0);
        let z = track_path(model, z0, &start, &model.normalized_target(), gamma).unwrap_or_else(|last| last);
        return minimize(model, model.real_params(&z), cfg);
    }
    minimize(model, p0, cfg)
}

fn gaussian_params(model: &ResidualModel, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<f64> {
    (0..model.num_params())
        .map(|_| {
            let x: f64 = StandardNormal.sample(rng);
            x * FRAC_1_SQRT_2
        })
        .collect()
}

/// Unit-variance complex Gaussian starting point.
pub fn initial_params(model: &ResidualModel, seed: u64) -> Vec<f64> {
    gaussian_params(model, &mut rng_for(seed))
}

pub fn search(f: &Form, cfg: &SearchConfig) -> Result<SearchReport> {
    let model = ResidualModel::new(f, cfg.r)?;
    let runs: Vec<RunResult> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| run_restart(&model, cfg, sub_seed(cfg.seed, i as u64)))
        .collect();
    let unscale = model.scale.cbrt();
    let mut classes: Vec<NumDecomp> = Vec::new();
    let mut class_sizes: Vec<usize> = Vec::new();
    let mut converged = 0;
    let mut best = f64::INFINITY;
    for run in &runs {
        best = best.min(run.cost);
        if run.cost >= cfg.tol {
            continue;
        }
        converged += 1;
        let vectors = model
            .vectors(&run.params)
            .into_iter()
            .map(|v| v.into_iter().map(|z| z * unscale).collect())
            .collect();
        let nd = NumDecomp::canonical(vectors, run.cost);
        match classes
            .iter()
            .position(|c| matching_distance(c, &nd, model.scale) < cfg.match_threshold)
        {
            Some(k) => class_sizes[k] += 1,
            None => {
                classes.push(nd);
                class_sizes.push(1);
            }
        }
    }
    let restarts = cfg.restarts;
    Ok(SearchReport {
        r: cfg.r,
        restarts,
        converged,
        convergence_rate: if restarts == 0 { 0.0 } else { converged as f64 / restarts as f64 },
        best_residual: best,
        class_sizes,
        classes,
    })
}

/// Distinct decomposition classes among the convergent restarts.
pub fn decompose_numeric(f: &Form, r: usize, restarts: usize, tol: f64, seed: u64) -> Result<Vec<NumDecomp>> {
    Ok(search(f, &SearchConfig::new(r, restarts, tol, seed))?.classes)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NumericStructure {
    pub len: usize,
    pub rank: usize,
    pub kruskal_rank: usize,
    pub collinear: bool,
    pub two_lines: bool,
    pub two_planes: bool,
}

/// Number of singular values above `tol` after scaling each vector to unit norm.
pub fn numeric_rank(vectors: &[&[Complex64]], tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let cols = vectors[0].len();
    let m = DMatrix::from_fn(vectors.len(), cols, |i, j| {
        let norm = vectors[i].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            vectors[i][j] / norm
        }
    });
    m.singular_values().iter().filter(|&&s| s > tol).count()
}

/// Numerical analogue of the exact Kruskal-rank and flat-splitting checks.
pub fn numeric_structure(vectors: &[Vec<Complex64>], tol: f64) -> NumericStructure {
    let len = vectors.len();
    let refs: Vec<&[Complex64]> = vectors.iter().map(|v| v.as_slice()).collect();
    let rank_of = |mask: u64| {
        let sel: Vec<&[Complex64]> = (0..len).filter(|i| mask & (1 << i) != 0).map(|i| refs[i]).collect();
        numeric_rank(&sel, tol)
    };
    let full = if len == 0 { 0 } else { (1u64 << len) - 1 };
    let rank = rank_of(full);
    let cap = len.min(vectors.first().map_or(0, |v| v.len()));
    let mut kruskal = cap;
    for k in 2..=cap {
        if (0..len).combinations(k).any(|c| {
            let sel: Vec<&[Complex64]> = c.iter().map(|&i| refs[i]).collect();
            numeric_rank(&sel, tol) < k
        }) {
            kruskal = k - 1;
            break;
        }
    }
    NumericStructure {
        len,
        rank,
        kruskal_rank: kruskal,
        collinear: rank <= 2,
        two_lines: splits_into_two_flats(len, 2, rank_of),
        two_planes: splits_into_two_flats(len, 3, rank_of),
    }
}

/// Float casts of exact points.
pub fn points_to_complex(points: &crate::points::PointSet) -> Vec<Vec<Complex64>> {
    points
        .points()
        .iter()
        .map(|p| p.to_f64().into_iter().map(|x| Complex64::new(x, 0.0)).collect())
        .collect()
}
