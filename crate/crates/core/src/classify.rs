//! Component triples `(p, m, r)`, the classification of a matrix into
//! its constructive component, genericity testing, and the squaring maps
//! into the commuting variety.

use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmat::{anticommutator, charpoly, RatMatrix};
use crate::rational::{self, Rational};
use crate::spectral::{is_diagonalizable, jordan_data, squarefree_part, Partition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "TripleJson", try_from = "TripleJson")]
pub struct ComponentTriple {
    pub p: usize,
    pub m: usize,
    pub r: usize,
}

impl ComponentTriple {
    pub fn new(p: usize, m: usize, r: usize) -> Self {
        ComponentTriple { p, m, r }
    }

    /// Checks `2p + m + r = n`.
    pub fn for_size(p: usize, m: usize, r: usize, n: usize) -> Result<Self> {
        if 2 * p + m + r != n {
            return Err(Error::InvalidTriple { p, m, r, n });
        }
        Ok(ComponentTriple { p, m, r })
    }

    pub fn n(&self) -> usize {
        2 * self.p + self.m + self.r
    }
}

impl fmt::Display for ComponentTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.p, self.m, self.r)
    }
}

#[derive(Serialize, Deserialize)]
struct TripleJson {
    p: usize,
    m: usize,
    r: usize,
    #[serde(default)]
    n: Option<usize>,
}

impl From<ComponentTriple> for TripleJson {
    fn from(t: ComponentTriple) -> Self {
        TripleJson {
            p: t.p,
            m: t.m,
            r: t.r,
            n: Some(t.n()),
        }
    }
}

impl TryFrom<TripleJson> for ComponentTriple {
    type Error = Error;

    fn try_from(j: TripleJson) -> Result<Self> {
        match j.n {
            Some(n) => ComponentTriple::for_size(j.p, j.m, j.r, n),
            None => Ok(ComponentTriple::new(j.p, j.m, j.r)),
        }
    }
}

/// All triples with `2p + m + r = n`, sorted by `(p, m)`.
pub fn enumerate_components(n: usize) -> Vec<ComponentTriple> {
    let mut out = Vec::new();
    for p in 0..=n / 2 {
        for m in 0..=n - 2 * p {
            out.push(ComponentTriple::new(p, m, n - 2 * p - m));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NilpotentPart {
    pub partition: Partition,
    pub p0: usize,
    pub r: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PairedPart {
    #[serde(with = "rational::serde_str")]
    pub a: Rational,
    pub nu: Partition,
    pub mu: Partition,
    pub p_a: usize,
    pub m_a: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingletonPart {
    #[serde(with = "rational::serde_str")]
    pub a: Rational,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassificationReport {
    pub triple: ComponentTriple,
    pub nilpotent_part: NilpotentPart,
    pub paired_part: Vec<PairedPart>,
    pub singleton_part: Vec<SingletonPart>,
}

fn overlap(nu: &Partition, mu: &Partition) -> usize {
    let (nt, mt) = (nu.transpose(), mu.transpose());
    nt.parts()
        .iter()
        .zip(mt.parts())
        .map(|(a, b)| *a.min(b))
        .sum()
}

/// Constructive component of every pair `(A, B)` with `AB + BA = 0`.
/// Depends only on the Jordan structure of `A`.
pub fn component_of(a: &RatMatrix) -> Result<ClassificationReport> {
    let data = jordan_data(a)?;
    let zero = Rational::zero();

    let mu0 = data.partition_of(&zero);
    let p0: usize = mu0.parts().iter().map(|s| s / 2).sum();
    let r = mu0.weight() - 2 * p0;

    let mut paired_part = Vec::new();
    let mut singleton_part = Vec::new();
    for (alpha, part) in data.blocks() {
        if alpha.is_zero() {
            continue;
        }
        let neg = data.partition_of(&-alpha.clone());
        if neg.is_empty() {
            singleton_part.push(SingletonPart {
                a: alpha.clone(),
                multiplicity: part.weight(),
            });
        } else if rational::is_positive(alpha) {
            let p_a = overlap(part, &neg);
            paired_part.push(PairedPart {
                a: alpha.clone(),
                m_a: part.weight() + neg.weight() - 2 * p_a,
                nu: part.clone(),
                mu: neg,
                p_a,
            });
        }
    }

    let p = p0 + paired_part.iter().map(|x| x.p_a).sum::<usize>();
    let m = paired_part.iter().map(|x| x.m_a).sum::<usize>()
        + singleton_part.iter().map(|x| x.multiplicity).sum::<usize>();
    Ok(ClassificationReport {
        triple: ComponentTriple::new(p, m, r),
        nilpotent_part: NilpotentPart {
            partition: mu0,
            p0,
            r,
        },
        paired_part,
        singleton_part,
    })
}

/// [`component_of`] after confirming that `b` anti-commutes with `a`.
pub fn component_of_pair(a: &RatMatrix, b: &RatMatrix) -> Result<ClassificationReport> {
    require_anticommuting(a, b)?;
    component_of(a)
}

pub(crate) fn require_anticommuting(a: &RatMatrix, b: &RatMatrix) -> Result<()> {
    a.require_square()?;
    if !anticommutator(a, b)?.is_zero() {
        return Err(Error::NotAntiCommuting);
    }
    Ok(())
}

/// `charpoly(m) = X^e q` with `q` squarefree.
fn nonzero_eigenvalues_distinct(m: &RatMatrix) -> Result<bool> {
    let (_, q) = charpoly(m)?.split_x_power();
    Ok(q.gcd(&q.derivative()).degree() == Some(0))
}

/// Number of distinct nonzero eigenvalues of `m`, over C.
fn distinct_nonzero_eigenvalues(m: &RatMatrix) -> Result<usize> {
    let (_, q) = charpoly(m)?.split_x_power();
    Ok(squarefree_part(&q)?.degree().unwrap_or(0))
}

/// Membership in the generic locus of the component `t`:
///
/// * `rank A = 2p + m` and `rank B = 2p + r`;
/// * `A` and `B` are diagonalizable;
/// * the nonzero eigenvalues of `A` and of `B` are distinct;
/// * `A²` has exactly `p + m` distinct nonzero eigenvalues and `B²`
///   exactly `p + r`, so the only coincidences among squares are the
///   `p` forced pairs `±a`.
pub fn is_generic_pair(a: &RatMatrix, b: &RatMatrix, t: &ComponentTriple) -> Result<bool> {
    require_anticommuting(a, b)?;
    if a.rows() != t.n() {
        return Ok(false);
    }
    if a.rank() != 2 * t.p + t.m || b.rank() != 2 * t.p + t.r {
        return Ok(false);
    }
    if !is_diagonalizable(a)? || !is_diagonalizable(b)? {
        return Ok(false);
    }
    if !nonzero_eigenvalues_distinct(a)? || !nonzero_eigenvalues_distinct(b)? {
        return Ok(false);
    }
    Ok(distinct_nonzero_eigenvalues(&(a * a))? == t.p + t.m
        && distinct_nonzero_eigenvalues(&(b * b))? == t.p + t.r)
}

pub fn direct_sum(t1: &ComponentTriple, t2: &ComponentTriple) -> ComponentTriple {
    ComponentTriple::new(t1.p + t2.p, t1.m + t2.m, t1.r + t2.r)
}

/// Swapping the roles of `A` and `B` exchanges `m` and `r`.
pub fn flip(t: &ComponentTriple) -> ComponentTriple {
    ComponentTriple::new(t.p, t.r, t.m)
}

/// `(A², B)`, a commuting pair.
pub fn bridge_square(a: &RatMatrix, b: &RatMatrix) -> Result<(RatMatrix, RatMatrix)> {
    require_anticommuting(a, b)?;
    Ok((a * a, b.clone()))
}

/// `(A², B²)`, a commuting pair.
pub fn bridge_square2(a: &RatMatrix, b: &RatMatrix) -> Result<(RatMatrix, RatMatrix)> {
    require_anticommuting(a, b)?;
    Ok((a * a, b * b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::{commutator, conjugate};
    use crate::layered::{jordan_block, jordan_matrix};
    use crate::rational::int;
    use crate::spectral::JordanData;
    use proptest::prelude::*;

    fn triple(p: usize, m: usize, r: usize) -> ComponentTriple {
        ComponentTriple::new(p, m, r)
    }

    #[test]
    fn enumeration_examples() {
        let one = enumerate_components(1);
        assert_eq!(one.len(), 2);
        assert!(one.contains(&triple(0, 1, 0)) && one.contains(&triple(0, 0, 1)));
        assert_eq!(enumerate_components(2).len(), 4);
        assert_eq!(enumerate_components(5).len(), 12);
    }

    #[test]
    fn enumeration_counts_match_closed_form() {
        for n in 1..=50usize {
            // independent count: for each p there are n - 2p + 1 choices of m
            let direct: usize = (0..=n / 2).map(|p| n - 2 * p + 1).sum();
            let k = n.div_ceil(2);
            let closed = if n % 2 == 0 { (k + 1) * (k + 1) } else { k * (k + 1) };
            let listed = enumerate_components(n);
            assert_eq!(listed.len(), direct);
            assert_eq!(listed.len(), closed);
            assert!(listed.windows(2).all(|w| (w[0].p, w[0].m) < (w[1].p, w[1].m)));
            assert!(listed.iter().all(|t| t.n() == n));
        }
    }

    #[test]
    fn classify_examples() {
        let t = |a: &RatMatrix| component_of(a).unwrap().triple;
        assert_eq!(t(&RatMatrix::zeros(3, 3)), triple(0, 0, 3));
        assert_eq!(t(&jordan_block(2, &int(0))), triple(1, 0, 0));
        assert_eq!(t(&jordan_block(3, &int(0))), triple(1, 0, 1));
        let a = RatMatrix::block_diag(&[jordan_block(2, &int(1)), jordan_block(1, &int(-1))]);
        assert_eq!(t(&a), triple(1, 1, 0));
        assert_eq!(t(&RatMatrix::diag(&[int(2), int(3)])), triple(0, 2, 0));
    }

    #[test]
    fn classify_report_parts() {
        let a = RatMatrix::block_diag(&[
            jordan_block(2, &int(1)),
            jordan_block(1, &int(-1)),
            jordan_block(3, &int(0)),
            jordan_block(1, &int(4)),
        ]);
        let rep = component_of(&a).unwrap();
        assert_eq!(rep.triple, triple(2, 2, 1));
        assert_eq!(rep.nilpotent_part.partition, Partition::new(vec![3]));
        assert_eq!((rep.nilpotent_part.p0, rep.nilpotent_part.r), (1, 1));
        assert_eq!(rep.paired_part.len(), 1);
        let pp = &rep.paired_part[0];
        assert_eq!(pp.a, int(1));
        assert_eq!((pp.p_a, pp.m_a), (1, 1));
        assert_eq!(rep.singleton_part.len(), 1);
        assert_eq!(rep.singleton_part[0].a, int(4));

        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["triple"], serde_json::json!({"p": 2, "m": 2, "r": 1, "n": 7}));
        assert_eq!(json["nilpotentPart"]["p0"], 1);
        assert_eq!(json["pairedPart"][0]["a"], "1");
        assert_eq!(json["pairedPart"][0]["nu"], serde_json::json!([2]));
        assert_eq!(json["singletonPart"][0]["multiplicity"], 1);
    }

    #[test]
    fn irrational_spectrum_is_reported() {
        let a = RatMatrix::from_ints(&[[0, 2], [1, 0]]);
        assert_eq!(component_of(&a), Err(Error::IrrationalSpectrum));
    }

    #[test]
    fn generic_pair_examples() {
        let a = RatMatrix::diag(&[int(1), int(-1)]);
        let b = RatMatrix::from_ints(&[[0, 1], [1, 0]]);
        assert!(is_generic_pair(&a, &b, &triple(1, 0, 0)).unwrap());
        assert!(!is_generic_pair(&a, &RatMatrix::zeros(2, 2), &triple(1, 0, 0)).unwrap());
        let j = jordan_block(2, &int(0));
        let bj = RatMatrix::from_ints(&[[1, 5], [0, -1]]);
        assert!(!is_generic_pair(&j, &bj, &triple(1, 0, 0)).unwrap());
        assert_eq!(
            is_generic_pair(&a, &RatMatrix::identity(2), &triple(1, 0, 0)),
            Err(Error::NotAntiCommuting)
        );
        // two unpaired eigenvalues whose squares collide are not generic for (0,2,0)
        let d = RatMatrix::diag(&[int(2), int(-2)]);
        assert!(!is_generic_pair(&d, &RatMatrix::zeros(2, 2), &triple(0, 2, 0)).unwrap());
        assert!(is_generic_pair(&RatMatrix::diag(&[int(2), int(3)]), &RatMatrix::zeros(2, 2), &triple(0, 2, 0)).unwrap());
    }

    #[test]
    fn laws_on_triples() {
        assert_eq!(direct_sum(&triple(1, 0, 0), &triple(0, 0, 1)), triple(1, 0, 1));
        assert_eq!(direct_sum(&triple(0, 1, 0), &triple(0, 1, 0)), triple(0, 2, 0));
        assert_eq!(flip(&triple(1, 2, 0)), triple(1, 0, 2));
        for t in enumerate_components(6) {
            assert_eq!(flip(&flip(&t)), t);
        }
    }

    #[test]
    fn bridge_examples() {
        let a = RatMatrix::diag(&[int(1), int(-1)]);
        let b = RatMatrix::from_ints(&[[0, 1], [1, 0]]);
        let (a2, b1) = bridge_square(&a, &b).unwrap();
        assert_eq!(a2, RatMatrix::identity(2));
        assert!(commutator(&a2, &b1).unwrap().is_zero());

        let j = jordan_block(2, &int(0));
        let d = RatMatrix::diag(&[int(1), int(-1)]);
        let (j2, d1) = bridge_square(&j, &d).unwrap();
        assert!(j2.is_zero());
        assert!(commutator(&j2, &d1).unwrap().is_zero());
        let (j2, d2) = bridge_square2(&j, &d).unwrap();
        assert!(commutator(&j2, &d2).unwrap().is_zero());
        assert_eq!(bridge_square(&a, &a), Err(Error::NotAntiCommuting));
    }

    #[test]
    fn triple_json_roundtrip() {
        let t = triple(1, 2, 3);
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"p":1,"m":2,"r":3,"n":7}"#);
        assert_eq!(serde_json::from_str::<ComponentTriple>(&s).unwrap(), t);
        assert!(serde_json::from_str::<ComponentTriple>(r#"{"p":1,"m":2,"r":3,"n":6}"#).is_err());
    }

    fn jordan_data_strategy() -> impl Strategy<Value = JordanData> {
        let pool = [0i64, 1, -1, 2, -2, 3];
        prop::collection::vec((0usize..6, prop::collection::vec(1usize..4, 0..3)), 1..4).prop_map(
            move |entries| {
                let mut blocks: Vec<(Rational, Partition)> = Vec::new();
                for (idx, parts) in entries {
                    let alpha = int(pool[idx]);
                    if !blocks.iter().any(|(a, _)| *a == alpha) {
                        blocks.push((alpha, Partition::new(parts)));
                    }
                }
                JordanData::new(blocks).unwrap()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn triple_sums_to_size(d in jordan_data_strategy()) {
            prop_assume!(d.total() > 0);
            let rep = component_of(&jordan_matrix(&d)).unwrap();
            prop_assert_eq!(rep.triple.n(), d.total());
            prop_assert_eq!(rep.nilpotent_part.r, rep.nilpotent_part.partition.weight() - 2 * rep.nilpotent_part.p0);
        }

        #[test]
        fn classification_is_conjugation_invariant(
            d in jordan_data_strategy(),
            g in prop::collection::vec(-3i64..=3, 49),
        ) {
            let a = jordan_matrix(&d);
            let n = a.rows();
            prop_assume!(n > 0 && n <= 7);
            let g = RatMatrix::from_fn(n, n, |i, j| int(g[i * 7 + j]));
            let Some(gi) = g.inverse() else { return Ok(()); };
            let base = component_of(&a).unwrap();
            let moved = component_of(&conjugate(&g, &gi, &a)).unwrap();
            prop_assert_eq!(moved, base);
        }

        #[test]
        fn rank_bound_against_triple(d in jordan_data_strategy()) {
            prop_assume!(d.total() > 0);
            let a = jordan_matrix(&d);
            let t = component_of(&a).unwrap().triple;
            prop_assert!(a.rank() <= 2 * t.p + t.m);
        }
    }
}
