use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{self, RatRepr, Rational};

/// Dense row-major matrix of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

/// Reduced row echelon form together with its rank and pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub reduced: RatMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn scalar(n: usize, value: &Rational) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = value.clone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RatMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::shape("ragged rows"));
        }
        Ok(RatMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor for integer literals; panics on ragged input.
    pub fn from_ints<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&v| rational::int(v)).collect())
            .collect();
        Self::from_rows(rows).expect("ragged integer rows")
    }

    pub fn diag(values: &[Rational]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn block_diag(blocks: &[RatMatrix]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            m.set_block(r0, c0, b);
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Rational] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::shape(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).sum()
    }

    pub fn try_mul(&self, rhs: &RatMatrix) -> Result<RatMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        // Integer dot products over per-row and per-column common denominators.
        let (lhs_num, lhs_den) = scaled_lines((0..self.rows).map(|i| self.row(i).iter()));
        let (rhs_num, rhs_den) =
            scaled_lines((0..rhs.cols).map(|j| (0..rhs.rows).map(move |k| &rhs[(k, j)])));
        let mut data = Vec::with_capacity(self.rows * rhs.cols);
        for (a, da) in lhs_num.iter().zip(&lhs_den) {
            for (b, db) in rhs_num.iter().zip(&rhs_den) {
                let mut acc = BigInt::zero();
                for (x, y) in a.iter().zip(b) {
                    if !x.is_zero() && !y.is_zero() {
                        acc += x * y;
                    }
                }
                data.push(if acc.is_zero() {
                    Rational::zero()
                } else {
                    Rational::new(acc, da * db)
                });
            }
        }
        Ok(RatMatrix {
            rows: self.rows,
            cols: rhs.cols,
            data,
        })
    }

    pub fn pow(&self, k: u32) -> Self {
        assert!(self.is_square(), "pow of non-square matrix");
        let mut acc = Self::identity(self.rows);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
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

    pub fn submatrix(&self, r0: usize, c0: usize, h: usize, w: usize) -> Self {
        assert!(r0 + h <= self.rows && c0 + w <= self.cols, "submatrix out of range");
        Self::from_fn(h, w, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, block: &RatMatrix) {
        assert!(
            r0 + block.rows <= self.rows && c0 + block.cols <= self.cols,
            "block out of range"
        );
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    pub fn vstack(blocks: &[&RatMatrix]) -> Result<Self> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(Error::shape("vstack column mismatch"));
        }
        let rows = blocks.iter().map(|b| b.rows).sum();
        let data = blocks.iter().flat_map(|b| b.data.iter().cloned()).collect();
        Ok(RatMatrix { rows, cols, data })
    }

    pub fn hstack(blocks: &[&RatMatrix]) -> Result<Self> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::shape("hstack row mismatch"));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let mut c0 = 0;
        for b in blocks {
            m.set_block(0, c0, b);
            c0 += b.cols;
        }
        Ok(m)
    }

    /// Column-major vectorization (stack the columns).
    pub fn vec(&self) -> Vec<Rational> {
        let mut out = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self[(i, j)].clone());
            }
        }
        out
    }

    /// Inverse of [`RatMatrix::vec`].
    pub fn unvec(rows: usize, cols: usize, v: &[Rational]) -> Self {
        assert_eq!(v.len(), rows * cols, "unvec length mismatch");
        Self::from_fn(rows, cols, |i, j| v[j * rows + i].clone())
    }

    pub fn rref(&self) -> Rref {
        let mut rows: Vec<Vec<Rational>> =
            (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let pivots = rref_in_place(&mut rows, self.cols);
        let rank = pivots.len();
        let reduced = RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: rows.into_iter().flatten().collect(),
        };
        Rref {
            reduced,
            rank,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        integer_echelon(self).1.len()
    }

    /// Canonical null-space basis: one vector per free column, with that
    /// column set to one and the other free columns set to zero.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let (echelon, pivots) = integer_echelon(self);
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![Rational::zero(); self.cols];
                v[free] = Rational::one();
                for (r, &p) in pivots.iter().enumerate().rev() {
                    let row = &echelon[r];
                    let mut acc = Rational::zero();
                    for c in p + 1..self.cols {
                        if !row[c].is_zero() && !v[c].is_zero() {
                            acc += &v[c] * Rational::from_integer(row[c].clone());
                        }
                    }
                    if !acc.is_zero() {
                        v[p] = -acc / Rational::from_integer(row[p].clone());
                    }
                }
                v
            })
            .collect()
    }

    pub fn determinant(&self) -> Result<Rational> {
        let n = self.require_square()?;
        let mut a: Vec<Vec<Rational>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != col {
                a.swap(p, col);
                det = -det;
            }
            let piv = a[col][col].clone();
            det *= &piv;
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = &a[r][col] / &piv;
                for c in col..n {
                    if !a[col][c].is_zero() {
                        let t = &f * &a[col][c];
                        a[r][c] -= t;
                    }
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let aug = Self::hstack(&[self, &Self::identity(n)]).ok()?;
        let Rref {
            reduced, pivots, ..
        } = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(reduced.submatrix(0, n, n, n))
    }
}

/// Row echelon form over Z with primitive rows: each rational row is
/// scaled to a primitive integer vector, then eliminated fraction-free,
/// dividing out the content of every updated row. Returns the nonzero
/// echelon rows and their pivot columns.
fn integer_echelon(m: &RatMatrix) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let ncols = m.cols;
    let mut rows: Vec<Vec<BigInt>> = (0..m.rows)
        .map(|i| primitive_integer_row(m.row(i)))
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let nrows = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows)
            .filter(|&i| !rows[i][col].is_zero())
            .min_by_key(|&i| rows[i][col].bits())
        else {
            continue;
        };
        rows.swap(r, p);
        let (head, tail) = rows.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let piv = &pivot_row[col];
        let nz: Vec<usize> = (col..ncols).filter(|&c| !pivot_row[c].is_zero()).collect();
        for other in tail.iter_mut() {
            if other[col].is_zero() {
                continue;
            }
            let g = piv.gcd(&other[col]);
            let fo = piv / &g;
            let fp = &other[col] / &g;
            if !fo.is_one() {
                for x in other[col..].iter_mut() {
                    if !x.is_zero() {
                        *x *= &fo;
                    }
                }
            }
            for &c in &nz {
                let t = &fp * &pivot_row[c];
                other[c] -= t;
            }
            make_primitive(other);
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Each line as integer numerators over one common denominator.
fn scaled_lines<'a, L, I>(lines: L) -> (Vec<Vec<BigInt>>, Vec<BigInt>)
where
    L: Iterator<Item = I>,
    I: Iterator<Item = &'a Rational> + Clone,
{
    let mut nums = Vec::new();
    let mut dens = Vec::new();
    for line in lines {
        let lcm = line
            .clone()
            .filter(|x| !x.is_zero())
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        nums.push(
            line.map(|x| {
                if x.is_zero() {
                    BigInt::zero()
                } else {
                    x.numer() * (&lcm / x.denom())
                }
            })
            .collect(),
        );
        dens.push(lcm);
    }
    (nums, dens)
}

fn primitive_integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .filter(|x| !x.is_zero())
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut out: Vec<BigInt> = row
        .iter()
        .map(|x| {
            if x.is_zero() {
                BigInt::zero()
            } else {
                x.numer() * (&lcm / x.denom())
            }
        })
        .collect();
    make_primitive(&mut out);
    out
}

fn make_primitive(row: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in row.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                return;
            }
        }
    }
    if g.is_zero() {
        return;
    }
    for x in row.iter_mut() {
        if !x.is_zero() {
            *x /= &g;
        }
    }
}

/// Gauss-Jordan elimination in place; returns the pivot columns.
/// Skips zero entries so sparse Kronecker systems stay cheap.
fn rref_in_place(rows: &mut [Vec<Rational>], ncols: usize) -> Vec<usize> {
    let nrows = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        let nz: Vec<usize> = (col..ncols).filter(|&c| !rows[r][c].is_zero()).collect();
        for &c in &nz {
            rows[r][c] *= &inv;
        }
        let (before, rest) = rows.split_at_mut(r);
        let (pivot_row, after) = rest.split_first_mut().expect("pivot row");
        for other in before.iter_mut().chain(after.iter_mut()) {
            if other[col].is_zero() {
                continue;
            }
            let f = other[col].clone();
            for &c in &nz {
                let t = &f * &pivot_row[c];
                other[c] -= t;
            }
        }
        pivots.push(col);
        r += 1;
    }
    pivots
}

/// Kronecker product; entry `(i*p + k, j*q + l)` is `a[i,j] * b[k,l]`
/// for `b` of shape `p x q`.
pub fn kron(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let (p, q) = (b.rows, b.cols);
    let mut out = RatMatrix::zeros(a.rows * p, a.cols * q);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = &a[(i, j)];
            if x.is_zero() {
                continue;
            }
            for k in 0..p {
                for l in 0..q {
                    let y = &b[(k, l)];
                    if !y.is_zero() {
                        out[(i * p + k, j * q + l)] = x * y;
                    }
                }
            }
        }
    }
    out
}

/// `AB + BA`.
pub fn anticommutator(a: &RatMatrix, b: &RatMatrix) -> Result<RatMatrix> {
    Ok(&a.try_mul(b)? + &b.try_mul(a)?)
}

/// `AB - BA`.
pub fn commutator(a: &RatMatrix, b: &RatMatrix) -> Result<RatMatrix> {
    Ok(&a.try_mul(b)? - &b.try_mul(a)?)
}

/// `g M g^-1`.
pub fn conjugate(g: &RatMatrix, g_inv: &RatMatrix, m: &RatMatrix) -> RatMatrix {
    &(g * m) * g_inv
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;

    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        self.try_mul(rhs).expect("matrix shape mismatch")
    }
}

impl Add for &RatMatrix {
    type Output = RatMatrix;

    fn add(self, rhs: &RatMatrix) -> RatMatrix {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "matrix shape mismatch"
        );
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &RatMatrix {
    type Output = RatMatrix;

    fn sub(self, rhs: &RatMatrix) -> RatMatrix {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "matrix shape mismatch"
        );
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &RatMatrix {
    type Output = RatMatrix;

    fn neg(self) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(rational::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson<E> {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<E>>,
}

impl Serialize for RatMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            rows: self.rows,
            cols: self.cols,
            entries: (0..self.rows)
                .map(|i| self.row(i).iter().map(rational::to_string).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MatrixJson::<RatRepr>::deserialize(d)?;
        if raw.entries.len() != raw.rows {
            return Err(D::Error::custom(format!(
                "declared {} rows but found {}",
                raw.rows,
                raw.entries.len()
            )));
        }
        let mut data = Vec::with_capacity(raw.rows * raw.cols);
        for row in raw.entries {
            if row.len() != raw.cols {
                return Err(D::Error::custom(format!(
                    "declared {} columns but a row has {}",
                    raw.cols,
                    row.len()
                )));
            }
            for e in row {
                data.push(e.into_rational().map_err(D::Error::custom)?);
            }
        }
        Ok(RatMatrix {
            rows: raw.rows,
            cols: raw.cols,
            data,
        })
    }
}
