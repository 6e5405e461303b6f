//! Homogeneous forms of degree `d` in `n + 1` variables.
//!
//! Monomials are ordered graded-lexicographically with `x0 > x1 > ...`; every
//! dense coefficient vector and every matrix layout in the crate uses the
//! order produced by [`monomials`].

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{Mat, Rat};

/// Exponent tuple `(a_0, ..., a_n)`. Ordered so that `x0^d` sorts first.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Exponent(pub Vec<u32>);

impl Exponent {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .degree()
            .cmp(&self.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent tuples of `nvars` variables summing to `deg`, in the fixed
/// monomial order.
pub fn monomials(nvars: usize, deg: u32) -> Vec<Vec<u32>> {
    fn rec(nvars: usize, deg: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if nvars == 1 {
            prefix.push(deg);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for a in (0..=deg).rev() {
            prefix.push(a);
            rec(nvars - 1, deg - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if nvars > 0 {
        rec(nvars, deg, &mut Vec::with_capacity(nvars), &mut out);
    }
    out
}

/// `C(nvars - 1 + deg, deg)`, the dimension of the space of degree-`deg` forms.
pub fn monomial_count(nvars: usize, deg: u32) -> usize {
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 1..=deg as u128 {
        num *= nvars as u128 - 1 + i;
        den *= i;
    }
    (num / den) as usize
}

/// Monomial list with a reverse index.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    pub nvars: usize,
    pub deg: u32,
    exps: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl MonomialBasis {
    pub fn new(nvars: usize, deg: u32) -> Self {
        let exps = monomials(nvars, deg);
        let index = exps
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        MonomialBasis {
            nvars,
            deg,
            exps,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exps
    }

    pub fn index_of(&self, exp: &[u32]) -> Option<usize> {
        self.index.get(exp).copied()
    }

    /// Evaluates every monomial at `point`.
    pub fn evaluate(&self, point: &[Rat]) -> Vec<Rat> {
        let powers: Vec<Vec<Rat>> = point
            .iter()
            .map(|x| {
                let mut p = vec![Rat::one()];
                for k in 1..=self.deg as usize {
                    let next = &p[k - 1] * x;
                    p.push(next);
                }
                p
            })
            .collect();
        self.exps
            .iter()
            .map(|e| {
                let mut acc = Rat::one();
                for (i, &a) in e.iter().enumerate() {
                    if a > 0 {
                        acc *= &powers[i][a as usize];
                    }
                }
                acc
            })
            .collect()
    }

    /// Dense coefficient vector of `l^deg`.
    pub fn power_vector(&self, l: &[Rat]) -> Vec<Rat> {
        self.evaluate(l)
            .into_iter()
            .zip(&self.exps)
            .map(|(v, e)| {
                if v.is_zero() {
                    v
                } else {
                    v * Rat::from_int(multinomial(e) as i64)
                }
            })
            .collect()
    }
}

/// `(sum a_i)! / prod a_i!`.
pub fn multinomial(exp: &[u32]) -> u64 {
    let mut total: u64 = 0;
    let mut acc: u64 = 1;
    for &a in exp {
        for k in 1..=a as u64 {
            total += 1;
            acc = acc * total / k;
        }
    }
    acc
}

/// Nonzero linear form `l_0 x_0 + ... + l_n x_n`, stored by coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinVec(Vec<Rat>);

impl LinVec {
    pub fn new(coords: Vec<Rat>) -> Result<Self> {
        if coords.iter().all(Rat::is_zero) {
            return Err(Error::ZeroLinearForm);
        }
        Ok(LinVec(coords))
    }

    pub fn from_i64(coords: &[i64]) -> Result<Self> {
        LinVec::new(coords.iter().map(|&x| Rat::from_int(x)).collect())
    }

    /// Standard basis vector `e_i` in `nvars` coordinates.
    pub fn unit(nvars: usize, i: usize) -> Self {
        let mut v = vec![Rat::zero(); nvars];
        v[i] = Rat::one();
        LinVec(v)
    }

    pub fn coords(&self) -> &[Rat] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Rat> {
        self.0
    }
}

impl AsRef<[Rat]> for LinVec {
    fn as_ref(&self) -> &[Rat] {
        &self.0
    }
}

/// Homogeneous form of degree `d` in the variables `x_0..x_n`.
/// Only nonzero coefficients are stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Form {
    n: usize,
    d: u32,
    terms: BTreeMap<Exponent, Rat>,
}

impl Form {
    pub fn zero(n: usize, d: u32) -> Self {
        Form {
            n,
            d,
            terms: BTreeMap::new(),
        }
    }

    /// Builds a form from `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms<I>(n: usize, d: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Rat)>,
    {
        let mut f = Form::zero(n, d);
        for (exp, c) in terms {
            if exp.len() != n + 1 {
                return Err(Error::DimensionMismatch(format!(
                    "exponent {exp:?} has {} entries, expected {}",
                    exp.len(),
                    n + 1
                )));
            }
            if exp.iter().sum::<u32>() != d {
                return Err(Error::DimensionMismatch(format!(
                    "exponent {exp:?} does not sum to degree {d}"
                )));
            }
            f.add_term(Exponent(exp), &c);
        }
        Ok(f)
    }

    /// `x_0^d + ... + x_n^d`.
    pub fn fermat(n: usize, d: u32) -> Self {
        let mut f = Form::zero(n, d);
        for i in 0..=n {
            let mut e = vec![0; n + 1];
            e[i] = d;
            f.terms.insert(Exponent(e), Rat::one());
        }
        f
    }

    pub fn from_dense(n: usize, d: u32, basis: &MonomialBasis, coeffs: &[Rat]) -> Self {
        assert_eq!(basis.nvars, n + 1);
        assert_eq!(basis.deg, d);
        let terms = basis
            .exponents()
            .iter()
            .zip(coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (Exponent(e.clone()), c.clone()))
            .collect();
        Form { n, d, terms }
    }

    fn add_term(&mut self, exp: Exponent, c: &Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.n + 1
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rat)> {
        self.terms.iter().map(|(e, c)| (e.0.as_slice(), c))
    }

    pub fn coeff(&self, exp: &[u32]) -> Rat {
        self.terms
            .get(&Exponent(exp.to_vec()))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn dense(&self, basis: &MonomialBasis) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); basis.len()];
        for (e, c) in &self.terms {
            let i = basis.index_of(&e.0).expect("monomial outside basis");
            v[i] = c.clone();
        }
        v
    }

    fn check_same_space(&self, other: &Form) {
        assert_eq!(self.n, other.n, "forms live in different variable counts");
        assert_eq!(self.d, other.d, "forms have different degrees");
    }

    pub fn add(&self, other: &Form) -> Form {
        self.check_same_space(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Form) -> Form {
        self.add(&other.scale(&Rat::from_int(-1)))
    }

    pub fn scale(&self, s: &Rat) -> Form {
        if s.is_zero() {
            return Form::zero(self.n, self.d);
        }
        Form {
            n: self.n,
            d: self.d,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    /// `x_i * f`, a form of degree `d + 1`.
    pub fn mul_var(&self, i: usize) -> Form {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e = e.0.clone();
                e[i] += 1;
                (Exponent(e), c.clone())
            })
            .collect();
        Form {
            n: self.n,
            d: self.d + 1,
            terms,
        }
    }

    /// The same form regarded in `n_target + 1 >= n + 1` variables.
    pub fn embed(&self, n_target: usize) -> Form {
        assert!(n_target >= self.n);
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e = e.0.clone();
                e.resize(n_target + 1, 0);
                (Exponent(e), c.clone())
            })
            .collect();
        Form {
            n: n_target,
            d: self.d,
            terms,
        }
    }

    /// Formal derivative with respect to `x_i`.
    pub fn partial_derivative(&self, i: usize) -> Result<Form> {
        if i > self.n {
            return Err(Error::IndexOutOfRange {
                index: i,
                nvars: self.n + 1,
            });
        }
        if self.d == 0 {
            return Err(Error::Precondition("derivative of a degree-0 form".into()));
        }
        let mut out = Form::zero(self.n, self.d - 1);
        for (e, c) in &self.terms {
            let a = e.0[i];
            if a == 0 {
                continue;
            }
            let mut e2 = e.0.clone();
            e2[i] -= 1;
            out.add_term(Exponent(e2), &(c * Rat::from_int(a as i64)));
        }
        Ok(out)
    }

    /// `(n+1) x dim S^{d-1}` matrix whose row `i` holds the coefficients of
    /// `d f / d x_i`.
    pub fn first_catalecticant(&self) -> Result<Mat> {
        if self.d < 2 {
            return Err(Error::Precondition("catalecticant needs d >= 2".into()));
        }
        let basis = MonomialBasis::new(self.n + 1, self.d - 1);
        let rows = (0..=self.n)
            .map(|i| Ok(self.partial_derivative(i)?.dense(&basis)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Mat::from_rows(rows, basis.len()))
    }

    pub fn catalecticant_rank(&self) -> Result<usize> {
        Ok(self.first_catalecticant()?.rank())
    }

    /// True iff the first partial derivatives are linearly independent.
    pub fn is_concise(&self) -> Result<bool> {
        Ok(self.catalecticant_rank()? == self.n + 1)
    }

    /// Basis of the span `V'` of the order-`(d-1)` partials (in reduced
    /// echelon form) and `f` rewritten as a concise form in `dim V'` variables
    /// with respect to that basis.
    pub fn concise_support(&self) -> Result<(Vec<LinVec>, Form)> {
        if self.is_zero() {
            return Err(Error::ZeroForm);
        }
        let cat = self.first_catalecticant()?;
        // Column space of the catalecticant = span of the order-(d-1) partials.
        let (r, pivots) = cat.transpose().rref();
        let k = pivots.len();
        let basis: Vec<LinVec> = (0..k)
            .map(|i| LinVec(r.row(i).to_vec()))
            .collect();
        let nv = self.n + 1;
        // Coordinates y = Q x, with the rows of Q the basis of V' followed by
        // unit vectors on the non-pivot positions.
        let mut q_rows: Vec<Vec<Rat>> = basis.iter().map(|b| b.0.clone()).collect();
        for c in (0..nv).filter(|c| !pivots.contains(c)) {
            q_rows.push(LinVec::unit(nv, c).0);
        }
        let q = Mat::from_rows(q_rows, nv);
        let q_inv = q.inverse().ok_or(Error::SingularMatrix)?;
        let in_y = self.apply_linear(&q_inv.transpose())?;
        let mut terms = Vec::with_capacity(in_y.terms.len());
        for (e, c) in &in_y.terms {
            assert!(
                e.0[k..].iter().all(|&a| a == 0),
                "rewritten form involves variables outside the support"
            );
            terms.push((e.0[..k].to_vec(), c.clone()));
        }
        let rewritten = Form::from_terms(k - 1, self.d, terms)?;
        Ok((basis, rewritten))
    }

    /// `x -> g^T x` substitution, so that `power(g l) = apply_linear(g, power(l))`.
    pub fn apply_linear(&self, g: &Mat) -> Result<Form> {
        let nv = self.n + 1;
        if g.rows() != nv || g.cols() != nv {
            return Err(Error::DimensionMismatch(format!(
                "expected a {nv}x{nv} matrix, got {}x{}",
                g.rows(),
                g.cols()
            )));
        }
        if !g.is_invertible() {
            return Err(Error::SingularMatrix);
        }
        // x_j becomes sum_i g[i][j] x_i
        let images: Vec<Vec<Rat>> = (0..nv).map(|j| g.column(j)).collect();
        let mut acc: BTreeMap<Exponent, Rat> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut poly: BTreeMap<Exponent, Rat> = BTreeMap::new();
            poly.insert(Exponent(vec![0; nv]), c.clone());
            for (j, &a) in e.0.iter().enumerate() {
                for _ in 0..a {
                    poly = mul_linear(&poly, &images[j]);
                }
            }
            for (e2, c2) in poly {
                let slot = acc.entry(e2).or_insert_with(Rat::zero);
                *slot += &c2;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(Form {
            n: self.n,
            d: self.d,
            terms: acc,
        })
    }
}

fn mul_linear(poly: &BTreeMap<Exponent, Rat>, lin: &[Rat]) -> BTreeMap<Exponent, Rat> {
    let mut out: BTreeMap<Exponent, Rat> = BTreeMap::new();
    for (e, c) in poly {
        for (i, l) in lin.iter().enumerate() {
            if l.is_zero() {
                continue;
            }
            let mut e2 = e.0.clone();
            e2[i] += 1;
            let slot = out.entry(Exponent(e2)).or_insert_with(Rat::zero);
            *slot += &(c * l);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `l^d`.
pub fn power(l: &[Rat], d: u32) -> Result<Form> {
    if l.iter().all(Rat::is_zero) {
        return Err(Error::ZeroLinearForm);
    }
    if d < 1 {
        return Err(Error::Precondition("power needs d >= 1".into()));
    }
    let basis = MonomialBasis::new(l.len(), d);
    Ok(Form::from_dense(l.len() - 1, d, &basis, &basis.power_vector(l)))
}

/// `sum_i coeffs[i] * points[i]^d`.
pub fn combine<P: AsRef<[Rat]>>(points: &[P], coeffs: &[Rat], n: usize, d: u32) -> Result<Form> {
    if points.len() != coeffs.len() {
        return Err(Error::LengthMismatch {
            left: points.len(),
            right: coeffs.len(),
        });
    }
    let basis = MonomialBasis::new(n + 1, d);
    let mut acc = vec![Rat::zero(); basis.len()];
    for (p, c) in points.iter().zip(coeffs) {
        let p = p.as_ref();
        if p.len() != n + 1 {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, expected {}",
                p.len(),
                n + 1
            )));
        }
        if c.is_zero() {
            continue;
        }
        for (slot, v) in acc.iter_mut().zip(basis.power_vector(p)) {
            if !v.is_zero() {
                *slot += &(c * v);
            }
        }
    }
    Ok(Form::from_dense(n, d, &basis, &acc))
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            let mon: Vec<String> = e
                .0
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(i, &a)| if a == 1 { format!("x{i}") } else { format!("x{i}^{a}") })
                .collect();
            let mon = mon.join("*");
            let neg = c.numer().sign() == num_bigint::Sign::Minus;
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            if mon.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mon}")?;
            } else {
                write!(f, "{abs}*{mon}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form(n={}, d={}: {})", self.n, self.d, self)
    }
}

#[derive(Serialize, Deserialize)]
struct TermWire {
    exp: Vec<u32>,
    coef: Rat,
}

#[derive(Serialize, Deserialize)]
struct FormWire {
    n: usize,
    d: u32,
    terms: Vec<TermWire>,
}

impl Serialize for Form {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormWire {
            n: self.n,
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermWire {
                    exp: e.0.clone(),
                    coef: c.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Form {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = FormWire::deserialize(d)?;
        if w.d < 1 {
            return Err(serde::de::Error::custom("degree must be at least 1"));
        }
        let mut seen = std::collections::HashSet::new();
        for t in &w.terms {
            if !seen.insert(t.exp.clone()) {
                return Err(serde::de::Error::custom(format!(
                    "duplicate monomial {:?}",
                    t.exp
                )));
            }
        }
        Form::from_terms(w.n, w.d, w.terms.into_iter().map(|t| (t.exp, t.coef)))
            .map_err(serde::de::Error::custom)
    }
}
