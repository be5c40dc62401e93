//! Normal forms: Jordan matrices, grouped blocks `𝕁_{s,n}(α)`, and the
//! σ-layered patterns that solve `J_m(α) L = σ L J_n(σα)`.
//!
//! Jordan blocks carry their ones on the superdiagonal.
//!
//! A σ-layered `m x n` matrix is fixed by `v = (b_1, ..., b_min(m,n))`.
//! Row `i` (from zero) holds `σ^i b_1, σ^i b_2, ...` starting on the
//! diagonal that passes through the top-right corner when `m <= n`
//! (right-justified), or through the top-left corner when `m >= n`
//! (top-justified). The block version replaces each scalar by a block.

use std::fmt;

use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactmat::RatMatrix;
use crate::rational::{self, Rational};
use crate::spectral::JordanData;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sigma {
    Plus,
    Minus,
}

impl Sigma {
    pub fn value(self) -> i64 {
        match self {
            Sigma::Plus => 1,
            Sigma::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Sigma> {
        match v {
            1 => Some(Sigma::Plus),
            -1 => Some(Sigma::Minus),
            _ => None,
        }
    }

    pub fn to_rational(self) -> Rational {
        rational::int(self.value())
    }

    /// `σ^k` as ±1.
    pub fn pow(self, k: usize) -> Rational {
        match (self, k % 2) {
            (Sigma::Minus, 1) => -Rational::one(),
            _ => Rational::one(),
        }
    }

    /// `σ · x`
    pub fn apply(self, x: &Rational) -> Rational {
        match self {
            Sigma::Plus => x.clone(),
            Sigma::Minus => -x.clone(),
        }
    }
}

impl fmt::Display for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sigma::Plus => write!(f, "+1"),
            Sigma::Minus => write!(f, "-1"),
        }
    }
}

impl Serialize for Sigma {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i64(self.value())
    }
}

impl<'de> Deserialize<'de> for Sigma {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Sigma::from_value(v).ok_or_else(|| serde::de::Error::custom("sigma must be 1 or -1"))
    }
}

/// `size x size` Jordan block of eigenvalue `alpha`.
pub fn jordan_block(size: usize, alpha: &Rational) -> RatMatrix {
    let mut m = RatMatrix::scalar(size, alpha);
    for i in 1..size {
        m[(i - 1, i)] = Rational::one();
    }
    m
}

/// Block-diagonal Jordan matrix: eigenvalues in listed order, block sizes
/// decreasing within each eigenvalue.
pub fn jordan_matrix(data: &JordanData) -> RatMatrix {
    let blocks: Vec<RatMatrix> = data
        .flatten()
        .iter()
        .map(|(alpha, size)| jordan_block(*size, alpha))
        .collect();
    RatMatrix::block_diag(&blocks)
}

/// `𝕁_{s,n}(α)`: `s x s` blocks of size `n`, `I_n` on the block
/// superdiagonal, plus `α I`.
pub fn jbold(s: usize, n: usize, alpha: &Rational) -> RatMatrix {
    let mut m = RatMatrix::scalar(s * n, alpha);
    for b in 1..s {
        for k in 0..n {
            m[((b - 1) * n + k, b * n + k)] = Rational::one();
        }
    }
    m
}

/// Parameters of a σ-layered `m x n` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredSpec {
    pub sigma: Sigma,
    pub m: usize,
    pub n: usize,
    pub v: Vec<Rational>,
}

impl LayeredSpec {
    pub fn new(sigma: Sigma, m: usize, n: usize, v: Vec<Rational>) -> Result<Self> {
        if v.len() != m.min(n) {
            return Err(Error::LengthMismatch(v.len(), m.min(n)));
        }
        Ok(LayeredSpec { sigma, m, n, v })
    }
}

/// Parameters of a σ-layered block matrix with `s x t` blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayeredBlockSpec {
    pub sigma: Sigma,
    pub s: usize,
    pub t: usize,
    pub block_rows: usize,
    pub block_cols: usize,
    pub blocks: Vec<RatMatrix>,
}

impl LayeredBlockSpec {
    pub fn new(
        sigma: Sigma,
        s: usize,
        t: usize,
        (block_rows, block_cols): (usize, usize),
        blocks: Vec<RatMatrix>,
    ) -> Result<Self> {
        if blocks.len() != s.min(t) {
            return Err(Error::LengthMismatch(blocks.len(), s.min(t)));
        }
        if let Some(b) = blocks
            .iter()
            .find(|b| b.rows() != block_rows || b.cols() != block_cols)
        {
            return Err(Error::shape(format!(
                "layer block is {}x{}, expected {block_rows}x{block_cols}",
                b.rows(),
                b.cols()
            )));
        }
        Ok(LayeredBlockSpec {
            sigma,
            s,
            t,
            block_rows,
            block_cols,
            blocks,
        })
    }
}

/// Cell positions `(row, col, layer index)` of the layered pattern on an
/// `m x n` grid.
fn layer_cells(m: usize, n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    let k = m.min(n);
    let offset = n.saturating_sub(m);
    (0..k).flat_map(move |i| (0..k - i).map(move |l| (i, offset + i + l, l)))
}

pub fn layered_matrix(spec: &LayeredSpec) -> RatMatrix {
    let mut out = RatMatrix::zeros(spec.m, spec.n);
    for (i, j, l) in layer_cells(spec.m, spec.n) {
        out[(i, j)] = &spec.sigma.pow(i) * &spec.v[l];
    }
    out
}

pub fn layered_block(spec: &LayeredBlockSpec) -> RatMatrix {
    let (br, bc) = (spec.block_rows, spec.block_cols);
    let mut out = RatMatrix::zeros(spec.s * br, spec.t * bc);
    for (i, j, l) in layer_cells(spec.s, spec.t) {
        let block = spec.blocks[l].scale(&spec.sigma.pow(i));
        out.set_block(i * br, j * bc, &block);
    }
    out
}

/// Recovers `v` if `m` is exactly a σ-layered matrix.
pub fn match_layered(
    sigma: Sigma,
    rows: usize,
    cols: usize,
    m: &RatMatrix,
) -> Result<Option<Vec<Rational>>> {
    if m.rows() != rows || m.cols() != cols {
        return Err(Error::shape(format!(
            "expected {rows}x{cols}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let k = rows.min(cols);
    let offset = cols.saturating_sub(rows);
    let v: Vec<Rational> = (0..k).map(|l| m[(0, offset + l)].clone()).collect();
    let rebuilt = layered_matrix(&LayeredSpec::new(sigma, rows, cols, v.clone())?);
    Ok((&rebuilt == m).then_some(v))
}

/// Block analogue of [`match_layered`]; `shape` is the inner block shape.
pub fn match_layered_block(
    sigma: Sigma,
    s: usize,
    t: usize,
    (br, bc): (usize, usize),
    m: &RatMatrix,
) -> Result<Option<Vec<RatMatrix>>> {
    if m.rows() != s * br || m.cols() != t * bc {
        return Err(Error::shape(format!(
            "expected {}x{}, got {}x{}",
            s * br,
            t * bc,
            m.rows(),
            m.cols()
        )));
    }
    let k = s.min(t);
    let offset = t.saturating_sub(s);
    let blocks: Vec<RatMatrix> = (0..k)
        .map(|l| m.submatrix(0, (offset + l) * bc, br, bc))
        .collect();
    let spec = LayeredBlockSpec::new(sigma, s, t, (br, bc), blocks.clone())?;
    Ok((&layered_block(&spec) == m).then_some(blocks))
}
