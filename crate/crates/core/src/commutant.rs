//! Solution spaces of `AB = σBA`, their predicted dimensions, and the
//! block-pattern and characteristic-polynomial checks built on them.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactmat::{anticommutator, charpoly, kron, Polynomial, RatMatrix};
use crate::layered::{jbold, jordan_matrix, match_layered, match_layered_block, Sigma};
use crate::rational::{self, Rational};
use crate::spectral::JordanData;

/// Basis of `{B : AB = σBA}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommutantBasis {
    #[serde(rename = "A")]
    pub a: RatMatrix,
    pub sigma: Sigma,
    pub basis: Vec<RatMatrix>,
    pub dim: usize,
}

/// Kernel of `B -> AB - σBA`, i.e. of `I ⊗ A - σ Aᵀ ⊗ I` on `vec(B)`.
pub fn sigma_commutant(a: &RatMatrix, sigma: Sigma) -> Result<CommutantBasis> {
    let n = a.require_square()?;
    let id = RatMatrix::identity(n);
    let system = &kron(&id, a) - &kron(&a.transpose(), &id).scale(&sigma.to_rational());
    let basis: Vec<RatMatrix> = system
        .kernel()
        .iter()
        .map(|v| RatMatrix::unvec(n, n, v))
        .collect();
    Ok(CommutantBasis {
        a: a.clone(),
        sigma,
        dim: basis.len(),
        basis,
    })
}

/// Sum of `min(m_i, m_j)` over ordered pairs of Jordan blocks with
/// `α_i = σ α_j`.
pub fn commutant_dim_formula(data: &JordanData, sigma: Sigma) -> usize {
    let blocks = data.flatten();
    let mut dim = 0;
    for (ai, mi) in &blocks {
        for (aj, mj) in &blocks {
            if *ai == sigma.apply(aj) {
                dim += mi.min(mj);
            }
        }
    }
    dim
}

/// One failed block check in a structure report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureViolation {
    pub basis_index: usize,
    pub block: (usize, usize),
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub dim: usize,
    pub formula_dim: usize,
    pub violations: Vec<StructureViolation>,
}

impl StructureReport {
    pub fn is_ok(&self) -> bool {
        self.dim == self.formula_dim && self.violations.is_empty()
    }
}

/// Builds the Jordan matrix of `data`, solves for its σ-commutant and
/// checks every basis element block by block: zero where `α_i != σα_j`,
/// σ-layered where `α_i = σα_j`.
pub fn verify_commutant_structure(data: &JordanData, sigma: Sigma) -> Result<StructureReport> {
    let a = jordan_matrix(data);
    let basis = sigma_commutant(&a, sigma)?;
    let blocks = data.flatten();
    let offsets = prefix_offsets(blocks.iter().map(|(_, s)| *s));

    let mut violations = Vec::new();
    for (k, e) in basis.basis.iter().enumerate() {
        for (i, (ai, mi)) in blocks.iter().enumerate() {
            for (j, (aj, mj)) in blocks.iter().enumerate() {
                let sub = e.submatrix(offsets[i], offsets[j], *mi, *mj);
                let paired = *ai == sigma.apply(aj);
                let reason = if !paired && !sub.is_zero() {
                    Some("nonzero block between unpaired eigenvalues")
                } else if paired && match_layered(sigma, *mi, *mj, &sub)?.is_none() {
                    Some("block is not σ-layered")
                } else {
                    None
                };
                if let Some(reason) = reason {
                    violations.push(StructureViolation {
                        basis_index: k,
                        block: (i, j),
                        reason: format!(
                            "{reason} (α_i={}, α_j={})",
                            rational::to_string(ai),
                            rational::to_string(aj)
                        ),
                    });
                }
            }
        }
    }
    Ok(StructureReport {
        dim: basis.dim,
        formula_dim: commutant_dim_formula(data, sigma),
        violations,
    })
}

/// A grouped Jordan block `𝕁_{s,n}(α)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupedBlock {
    pub s: usize,
    pub n: usize,
    pub alpha: Rational,
}

/// Block version of [`verify_commutant_structure`] for
/// `A = diag(𝕁_{s_1,n_1}(α_1), ...)`: blocks must vanish when
/// `α_k != σα_l` and be σ-layered block matrices otherwise. The formula
/// dimension is `Σ min(s_k, s_l) n_k n_l` over paired groups.
pub fn verify_grouped_structure(groups: &[GroupedBlock], sigma: Sigma) -> Result<StructureReport> {
    let mats: Vec<RatMatrix> = groups.iter().map(|g| jbold(g.s, g.n, &g.alpha)).collect();
    let a = RatMatrix::block_diag(&mats);
    let basis = sigma_commutant(&a, sigma)?;
    let offsets = prefix_offsets(groups.iter().map(|g| g.s * g.n));

    let mut formula_dim = 0;
    for gk in groups {
        for gl in groups {
            if gk.alpha == sigma.apply(&gl.alpha) {
                formula_dim += gk.s.min(gl.s) * gk.n * gl.n;
            }
        }
    }

    let mut violations = Vec::new();
    for (idx, e) in basis.basis.iter().enumerate() {
        for (k, gk) in groups.iter().enumerate() {
            for (l, gl) in groups.iter().enumerate() {
                let sub = e.submatrix(offsets[k], offsets[l], gk.s * gk.n, gl.s * gl.n);
                let paired = gk.alpha == sigma.apply(&gl.alpha);
                let bad = if paired {
                    match_layered_block(sigma, gk.s, gl.s, (gk.n, gl.n), &sub)?.is_none()
                } else {
                    !sub.is_zero()
                };
                if bad {
                    violations.push(StructureViolation {
                        basis_index: idx,
                        block: (k, l),
                        reason: if paired {
                            "block is not a σ-layered block matrix".into()
                        } else {
                            "nonzero block between unpaired groups".into()
                        },
                    });
                }
            }
        }
    }
    Ok(StructureReport {
        dim: basis.dim,
        formula_dim,
        violations,
    })
}

fn prefix_offsets(sizes: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut acc = 0;
    sizes
        .map(|s| {
            let o = acc;
            acc += s;
            o
        })
        .collect()
}

/// `diag(𝕁_{1,n_1}(0), ..., 𝕁_{s,n_s}(0))` where `multiplicities[i-1] = n_i`.
pub fn grouped_nilpotent(multiplicities: &[usize]) -> RatMatrix {
    let zero = Rational::zero();
    let blocks: Vec<RatMatrix> = multiplicities
        .iter()
        .enumerate()
        .filter(|(_, &ni)| ni > 0)
        .map(|(i, &ni)| jbold(i + 1, ni, &zero))
        .collect();
    RatMatrix::block_diag(&blocks)
}

/// Leading inner blocks `B^(1)_ii` of `b` for each group with `n_i > 0`,
/// as `(i, block)`.
pub fn leading_diagonal_blocks(multiplicities: &[usize], b: &RatMatrix) -> Vec<(usize, RatMatrix)> {
    let mut offset = 0;
    let mut out = Vec::new();
    for (idx, &ni) in multiplicities.iter().enumerate() {
        let i = idx + 1;
        if ni > 0 {
            out.push((i, b.submatrix(offset, offset, ni, ni)));
        }
        offset += i * ni;
    }
    out
}

/// For `B` anti-commuting with `diag(𝕁_{i,n_i}(0))`, checks
/// `χ^B = Π_i (χ^{B_ii})^⌈i/2⌉ (χ^{-B_ii})^⌊i/2⌋` with `B_ii` the leading
/// inner block of the `i`-th diagonal block.
pub fn detblock_check(multiplicities: &[usize], b: &RatMatrix) -> Result<bool> {
    let a = grouped_nilpotent(multiplicities);
    if b.rows() != a.rows() || b.cols() != a.cols() {
        return Err(Error::shape(format!(
            "expected {}x{} matrix for multiplicities {:?}, got {}x{}",
            a.rows(),
            a.cols(),
            multiplicities,
            b.rows(),
            b.cols()
        )));
    }
    if !anticommutator(&a, b)?.is_zero() {
        return Err(Error::NotInCommutant);
    }
    let mut expected = Polynomial::one();
    for (i, lead) in leading_diagonal_blocks(multiplicities, b) {
        let chi = charpoly(&lead)?;
        let chi_neg = charpoly(&-&lead)?;
        expected = &expected * &chi.pow(i.div_ceil(2));
        expected = &expected * &chi_neg.pow(i / 2);
    }
    Ok(charpoly(b)? == expected)
}
