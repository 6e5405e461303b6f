//! Exact rational numbers and dense rational matrices.
//!
//! Rank goes through fraction-free (Bareiss) elimination on rows scaled to
//! integers, with a checked `i128` fast path that falls back to big integers
//! on overflow. Kernels and solutions go through reduced row echelon form.
//! Pivoting always takes the first nonzero entry in column order, so every
//! result is reproducible bit-for-bit.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn new(numer: BigInt, denom: BigInt) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::InvalidRational(format!("{numer}/0")));
        }
        Ok(Rat(BigRational::new(numer, denom)))
    }

    pub fn from_int(v: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_frac(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Rat(BigRational::from_integer(v))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rat(self.0.recip())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Rat::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::zero()
    }
}

impl From<i64> for Rat {
    fn from(v: i64) -> Self {
        Rat::from_int(v)
    }
}

impl From<BigInt> for Rat {
    fn from(v: BigInt) -> Self {
        Rat::from_bigint(v)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidRational(s.to_string());
        let t = s.trim();
        let (p, q) = match t.split_once('/') {
            Some((p, q)) => (p.trim(), Some(q.trim())),
            None => (t, None),
        };
        let numer: BigInt = p.parse().map_err(|_| bad())?;
        let denom: BigInt = match q {
            Some(q) => q.parse().map_err(|_| bad())?,
            None => BigInt::one(),
        };
        if denom.is_zero() {
            return Err(bad());
        }
        Ok(Rat(BigRational::new(numer, denom)))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat(self.0.$method(&rhs.0))
            }
        }
        impl $tr<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        self.0 *= &rhs.0;
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl std::iter::Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

/// Multiplies every entry by the lcm of the denominators, giving an integer
/// vector proportional to `v`.
pub fn clear_denominators(v: &[Rat]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    v.iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect()
}

/// Integer vector proportional to `v` with content 1.
pub fn primitive_integer_vector(v: &[Rat]) -> Vec<BigInt> {
    let ints = clear_denominators(v);
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

/// Rank of an integer matrix given as rows.
pub fn integer_rank(rows: &[Vec<BigInt>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    if let Some(small) = to_i128_rows(rows) {
        if let Some(r) = bareiss_rank_i128(small) {
            return r;
        }
    }
    bareiss_rank_big(rows.to_vec())
}

fn to_i128_rows(rows: &[Vec<BigInt>]) -> Option<Vec<Vec<i128>>> {
    rows.iter()
        .map(|r| r.iter().map(|x| x.to_i128()).collect::<Option<Vec<_>>>())
        .collect()
}

fn bareiss_rank_i128(mut m: Vec<Vec<i128>>) -> Option<usize> {
    let rows = m.len();
    let cols = m[0].len();
    let mut prev: i128 = 1;
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(p, rank);
        let pivot = m[rank][c];
        for i in rank + 1..rows {
            let lead = m[i][c];
            for j in c + 1..cols {
                let a = pivot.checked_mul(m[i][j])?;
                let b = lead.checked_mul(m[rank][j])?;
                m[i][j] = a.checked_sub(b)? / prev;
            }
            m[i][c] = 0;
        }
        prev = pivot;
        rank += 1;
    }
    Some(rank)
}

fn bareiss_rank_big(mut m: Vec<Vec<BigInt>>) -> usize {
    let rows = m.len();
    let cols = m[0].len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(p, rank);
        let (head, tail) = m.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        let pivot = &pivot_row[c];
        for row in tail.iter_mut() {
            if row[c].is_zero() {
                // (pivot * x - 0) / prev
                for j in c + 1..cols {
                    if !row[j].is_zero() {
                        row[j] = (pivot * &row[j]) / &prev;
                    }
                }
            } else {
                let lead = std::mem::take(&mut row[c]);
                for j in c + 1..cols {
                    row[j] = (pivot * &row[j] - &lead * &pivot_row[j]) / &prev;
                }
            }
        }
        prev = pivot.clone();
        rank += 1;
    }
    rank
}

/// Dense row-major matrix over the rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl Mat {
    pub fn new(rows: usize, cols: usize, data: Vec<Rat>) -> Self {
        assert_eq!(data.len(), rows * cols, "entries must be rows * cols");
        Mat { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat::new(rows, cols, vec![Rat::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed when `rows` is empty.
    pub fn from_rows(rows: Vec<Vec<Rat>>, cols: usize) -> Self {
        let r = rows.len();
        let mut data = Vec::with_capacity(r * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            data.extend(row);
        }
        Mat::new(r, cols, data)
    }

    pub fn from_cols(cols: Vec<Vec<Rat>>, rows: usize) -> Self {
        Mat::from_rows(cols, rows).transpose()
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rat::from_int(x)).collect())
                .collect(),
            cols,
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Rat] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        Mat::new(self.cols, self.rows, data)
    }

    pub fn mul_mat(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "incompatible shapes");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len(), "incompatible shapes");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols, "column counts differ");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat::new(self.rows + other.rows, self.cols, data)
    }

    pub fn hstack_col(&self, b: &[Rat]) -> Mat {
        assert_eq!(self.rows, b.len());
        let rows = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.push(b[i].clone());
                r
            })
            .collect();
        Mat::from_rows(rows, self.cols + 1)
    }

    /// Exact rank over the rationals.
    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        let rows: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| clear_denominators(self.row(i)))
            .collect();
        integer_rank(&rows)
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(p, r);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let factor = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let v = &m[(i, j)] - &(&factor * &m[(r, j)]);
                    m[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Basis of the right null space, one basis vector per column.
    pub fn kernel_basis(&self) -> Mat {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![Rat::zero(); self.cols];
            v[f] = Rat::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -&r[(row, f)];
            }
            basis.push(v);
        }
        Mat::from_cols(basis, self.cols)
    }

    /// Some `x` with `self * x = b`, or `None` when the system is inconsistent.
    /// Free variables are set to zero.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.rows, "right-hand side length must equal rows");
        let aug = self.hstack_col(b);
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Mat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = self.row(i).to_vec();
            row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            rows.push(row);
        }
        let (r, pivots) = Mat::from_rows(rows, 2 * n).rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let data = (0..n)
            .flat_map(|i| r.row(i)[n..].to_vec())
            .collect();
        Some(Mat::new(n, n, data))
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Rank of a rational matrix given as rows.
pub fn rank_of_rows(rows: &[Vec<Rat>]) -> usize {
    let int_rows: Vec<Vec<BigInt>> = rows.iter().map(|r| clear_denominators(r)).collect();
    if int_rows.first().is_none_or(|r| r.is_empty()) {
        return 0;
    }
    integer_rank(&int_rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Mat {
        Mat::from_i64_rows(rows)
    }

    #[test]
    fn rat_canonical_form() {
        let r = Rat::from_frac(6, -4);
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!(Rat::from_frac(0, 5).to_string(), "0");
        assert_eq!(Rat::from_frac(8, 4).to_string(), "2");
        assert_eq!(r.denom(), &BigInt::from(2));
    }

    #[test]
    fn rat_parse() {
        assert_eq!("3/6".parse::<Rat>().unwrap(), Rat::from_frac(1, 2));
        assert_eq!("-7".parse::<Rat>().unwrap(), Rat::from_int(-7));
        assert!(matches!("1/0".parse::<Rat>(), Err(Error::InvalidRational(_))));
        assert!("abc".parse::<Rat>().is_err());
        assert!("1/2/3".parse::<Rat>().is_err());
    }

    #[test]
    fn rat_serde_is_string() {
        let v = vec![Rat::from_frac(-1, 3), Rat::from_int(4)];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"["-1/3","4"]"#);
        let back: Vec<Rat> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Mat::identity(3).rank(), 3);
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(Mat::zeros(3, 4).rank(), 0);
        assert_eq!(Mat::zeros(0, 4).rank(), 0);
    }

    #[test]
    fn rank_falls_back_to_big_integers() {
        // Entries near 2^62 overflow the i128 products immediately.
        let big = 1i64 << 62;
        let a = m(&[&[big, big - 1, 3], &[big - 5, big, 7], &[1, 2, 3]]);
        let rows: Vec<Vec<BigInt>> = (0..3).map(|i| clear_denominators(a.row(i))).collect();
        assert_eq!(bareiss_rank_big(rows), a.rank());
        assert_eq!(a.rank(), 3);
        let dep = m(&[&[big, big - 1], &[2 * (big / 2), big - 1]]);
        assert_eq!(dep.rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(Mat::identity(4).kernel_basis().cols(), 0);
        let k = m(&[&[1, 1]]).kernel_basis();
        assert_eq!(k.cols(), 1);
        assert_eq!(k.column(0), vec![Rat::from_int(-1), Rat::one()]);
    }

    #[test]
    fn solve_examples() {
        let b = vec![Rat::from_int(3), Rat::from_frac(1, 2), Rat::from_int(-1)];
        assert_eq!(Mat::identity(3).solve(&b).unwrap(), b);
        let x = m(&[&[1, 1]]).solve(&[Rat::zero()]).unwrap();
        assert_eq!(x, vec![Rat::zero(), Rat::zero()]);
        assert!(m(&[&[1, 1], &[1, 1]]).solve(&[Rat::zero(), Rat::one()]).is_none());
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[2, 1, 0], &[0, 1, 3], &[1, 0, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul_mat(&inv), Mat::identity(3));
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    fn small_mat() -> impl Strategy<Value = Mat> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec((-4i64..=4, 1i64..=3), r * c).prop_map(move |v| {
                Mat::new(r, c, v.into_iter().map(|(p, q)| Rat::from_frac(p, q)).collect())
            })
        })
    }

    proptest! {
        #[test]
        fn rank_is_transpose_invariant(a in small_mat()) {
            prop_assert_eq!(a.rank(), a.transpose().rank());
        }

        #[test]
        fn rank_agrees_with_rref(a in small_mat()) {
            prop_assert_eq!(a.rank(), a.rref().1.len());
        }

        #[test]
        fn kernel_is_annihilated(a in small_mat()) {
            let k = a.kernel_basis();
            prop_assert_eq!(a.rank() + k.cols(), a.cols());
            for j in 0..k.cols() {
                prop_assert!(a.mul_vec(&k.column(j)).iter().all(Rat::is_zero));
            }
        }

        #[test]
        fn solve_consistency(a in small_mat(), seed in proptest::collection::vec(-3i64..=3, 6)) {
            let b: Vec<Rat> = (0..a.rows()).map(|i| Rat::from_int(seed[i])).collect();
            let consistent = a.hstack_col(&b).rank() == a.rank();
            match a.solve(&b) {
                Some(x) => {
                    prop_assert!(consistent);
                    prop_assert_eq!(a.mul_vec(&x), b);
                }
                None => prop_assert!(!consistent),
            }
        }
    }
}
