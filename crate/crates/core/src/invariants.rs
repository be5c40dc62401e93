//! Conjugation invariants `Tr(AⁱBʲ)`, the rank of their differential on
//! the tangent space, the map `η` to points of the plane, and the
//! symplectic pairing on tuples of plane points.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::classify::{component_of, is_generic_pair, require_anticommuting};
use crate::error::{Error, Result};
use crate::exactmat::{charpoly, RatMatrix};
use crate::rational::{self, Rational};
use crate::sampler::tangent_system;
use crate::spectral::{jordan_data, rational_roots};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantVector {
    pub degree_bound: usize,
    pub values: BTreeMap<(usize, usize), Rational>,
}

impl InvariantVector {
    pub fn get(&self, i: usize, j: usize) -> Option<&Rational> {
        self.values.get(&(i, j))
    }
}

impl Serialize for InvariantVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            i: usize,
            j: usize,
            t: String,
        }
        let entries: Vec<Entry> = self
            .values
            .iter()
            .map(|(&(i, j), t)| Entry {
                i,
                j,
                t: rational::to_string(t),
            })
            .collect();
        let mut st = s.serialize_struct("InvariantVector", 2)?;
        st.serialize_field("d", &self.degree_bound)?;
        st.serialize_field("values", &entries)?;
        st.end()
    }
}

fn powers(m: &RatMatrix, d: usize) -> Vec<RatMatrix> {
    let mut out = vec![RatMatrix::identity(m.rows())];
    for k in 1..=d {
        out.push(&out[k - 1] * m);
    }
    out
}

fn require_same_square(a: &RatMatrix, b: &RatMatrix) -> Result<usize> {
    let n = a.require_square()?;
    if b.rows() != n || b.cols() != n {
        return Err(Error::shape(format!(
            "pair has shapes {}x{} and {}x{}",
            n,
            n,
            b.rows(),
            b.cols()
        )));
    }
    Ok(n)
}

/// `Tr(XY)` without forming the product.
fn trace_of_product(x: &RatMatrix, y: &RatMatrix) -> Rational {
    let n = x.rows();
    let mut acc = Rational::zero();
    for k in 0..n {
        for l in 0..n {
            if !x[(k, l)].is_zero() && !y[(l, k)].is_zero() {
                acc += &x[(k, l)] * &y[(l, k)];
            }
        }
    }
    acc
}

/// `Tr(AⁱBʲ)` for all `i + j <= d`.
pub fn trace_invariants(a: &RatMatrix, b: &RatMatrix, d: usize) -> Result<InvariantVector> {
    require_same_square(a, b)?;
    let pa = powers(a, d);
    let pb = powers(b, d);
    let mut values = BTreeMap::new();
    for i in 0..=d {
        for j in 0..=d - i {
            values.insert((i, j), trace_of_product(&pa[i], &pb[j]));
        }
    }
    Ok(InvariantVector {
        degree_bound: d,
        values,
    })
}

/// Gradients of `Tr(AⁱBʲ)`, `1 <= i + j <= d`, as rows over the
/// coordinates `(vec dA, vec dB)` (column-major).
pub fn invariant_jacobian(a: &RatMatrix, b: &RatMatrix, d: usize) -> Result<RatMatrix> {
    let n = require_same_square(a, b)?;
    let pa = powers(a, d);
    let pb = powers(b, d);
    let mut rows = Vec::new();
    for i in 0..=d {
        for j in 0..=d - i {
            if i + j == 0 {
                continue;
            }
            // d Tr = Tr(dA · M) + Tr(dB · N)
            let mut m = RatMatrix::zeros(n, n);
            for k in 0..i {
                m = &m + &(&(&pa[i - 1 - k] * &pb[j]) * &pa[k]);
            }
            let mut nn = RatMatrix::zeros(n, n);
            for l in 0..j {
                nn = &nn + &(&(&pb[j - 1 - l] * &pa[i]) * &pb[l]);
            }
            // Tr(X M) = Σ X_ab M_ba, and X_ab sits at a + b n in vec(X)
            let mut row = m.transpose().vec();
            row.extend(nn.transpose().vec());
            rows.push(row);
        }
    }
    if rows.is_empty() {
        return Ok(RatMatrix::zeros(0, 2 * n * n));
    }
    RatMatrix::from_rows(rows)
}

/// Rank of the differential of the invariant map restricted to the
/// tangent space of the variety at `(A, B)`.
pub fn invariant_jacobian_rank(a: &RatMatrix, b: &RatMatrix, d: usize) -> Result<usize> {
    require_same_square(a, b)?;
    require_anticommuting(a, b)?;
    let jac = invariant_jacobian(a, b, d)?;
    let tangent = tangent_system(a, b).kernel();
    if tangent.is_empty() || jac.rows() == 0 {
        return Ok(0);
    }
    let k = RatMatrix::from_rows(tangent)?.transpose();
    Ok(jac.try_mul(&k)?.rank())
}

/// Rank of the invariant differential on all of `(dA, dB)` space.
pub fn ambient_jacobian_rank(a: &RatMatrix, b: &RatMatrix, d: usize) -> Result<usize> {
    Ok(invariant_jacobian(a, b, d)?.rank())
}

/// Sorted multiset of points `(x, y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanePointMultiset {
    points: Vec<(Rational, Rational)>,
}

impl PlanePointMultiset {
    pub fn new(mut points: Vec<(Rational, Rational)>) -> Self {
        points.sort();
        PlanePointMultiset { points }
    }

    pub fn points(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Serialize for PlanePointMultiset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pts: Vec<[String; 2]> = self
            .points
            .iter()
            .map(|(x, y)| [rational::to_string(x), rational::to_string(y)])
            .collect();
        let mut st = s.serialize_struct("PlanePointMultiset", 1)?;
        st.serialize_field("points", &pts)?;
        st.end()
    }
}

fn eigenvector(a: &RatMatrix, alpha: &Rational) -> Result<Vec<Rational>> {
    let n = a.rows();
    let kernel = (a - &RatMatrix::scalar(n, alpha)).kernel();
    kernel.into_iter().next().ok_or(Error::NotGeneric)
}

/// For a generic pair: `(±a_i, κ_i)` for each eigenvalue pair of `A`,
/// with `κ_i` the eigenvalue of `B²` on the `a_i`-eigenline; `(a, 0)` for
/// each unpaired nonzero eigenvalue; `(0, b)` for each eigenvalue of `B`
/// restricted to `ker A`.
pub fn eta(a: &RatMatrix, b: &RatMatrix) -> Result<PlanePointMultiset> {
    let report = component_of(a)?;
    if !is_generic_pair(a, b, &report.triple)? {
        return Err(Error::NotGeneric);
    }
    let n = a.rows();
    let b2 = b * b;
    let mut points = Vec::with_capacity(n);

    for pair in &report.paired_part {
        let v = eigenvector(a, &pair.a)?;
        let w = b2.mul_vec(&v);
        let k = v.iter().position(|x| !x.is_zero()).expect("eigenvector is nonzero");
        let kappa = &w[k] / &v[k];
        points.push((pair.a.clone(), kappa.clone()));
        points.push((-pair.a.clone(), kappa));
    }
    for single in &report.singleton_part {
        for _ in 0..single.multiplicity {
            points.push((single.a.clone(), Rational::zero()));
        }
    }

    let kernel = a.kernel();
    if !kernel.is_empty() {
        let k = RatMatrix::from_rows(kernel)?.transpose();
        let kt = k.transpose();
        let gram_inv = kt.try_mul(&k)?.inverse().expect("kernel basis is independent");
        let restricted = gram_inv.try_mul(&kt)?.try_mul(b)?.try_mul(&k)?;
        let roots = rational_roots(&charpoly(&restricted)?)?;
        if !roots.splits {
            return Err(Error::IrrationalSpectrum);
        }
        for (beta, mult) in roots.roots {
            for _ in 0..mult {
                points.push((Rational::zero(), beta.clone()));
            }
        }
    }
    debug_assert_eq!(points.len(), n);
    Ok(PlanePointMultiset::new(points))
}

/// Whether the characteristic polynomial of `a` splits over Q.
pub fn has_rational_spectrum(a: &RatMatrix) -> Result<bool> {
    match jordan_data(a) {
        Ok(_) => Ok(true),
        Err(Error::IrrationalSpectrum) => Ok(false),
        Err(e) => Err(e),
    }
}

/// `Σ x_k y'_k - x'_k y_k`.
pub fn omega(u: &[(Rational, Rational)], v: &[(Rational, Rational)]) -> Result<Rational> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch(u.len(), v.len()));
    }
    Ok(u.iter()
        .zip(v)
        .map(|((x, y), (xp, yp))| x * yp - xp * y)
        .fold(Rational::zero(), |acc, t| acc + t))
}
