//! Spectral structure over Q: squarefree parts, rational roots,
//! diagonalizability and Jordan types read off from rank sequences.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmat::{charpoly, Polynomial, RatMatrix};
use crate::rational::{self, Rational};

/// Weakly decreasing sequence of positive integers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition(Vec<usize>);

impl Partition {
    /// Sorts the parts and drops zeros.
    pub fn new(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `nu'_k = #{i : nu_i >= k}`.
    pub fn transpose(&self) -> Partition {
        let largest = self.0.first().copied().unwrap_or(0);
        Partition(
            (1..=largest)
                .map(|k| self.0.iter().filter(|&&p| p >= k).count())
                .collect(),
        )
    }

    /// Number of parts equal to `size`.
    pub fn multiplicity(&self, size: usize) -> usize {
        self.0.iter().filter(|&&p| p == size).count()
    }

    /// `(n_1, ..., n_s)` with `n_i` the number of parts equal to `i` and
    /// `s` the largest part.
    pub fn multiplicities(&self) -> Vec<usize> {
        let largest = self.0.first().copied().unwrap_or(0);
        (1..=largest).map(|i| self.multiplicity(i)).collect()
    }

    /// All partitions of `n` in reverse lexicographic order.
    pub fn all(n: usize) -> Vec<Partition> {
        fn go(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for part in (1..=rest.min(max)).rev() {
                cur.push(part);
                go(rest - part, part, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(n, n, &mut Vec::new(), &mut out);
        out
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = String;

    fn try_from(parts: Vec<usize>) -> std::result::Result<Self, String> {
        if parts.iter().any(|&p| p == 0) {
            return Err("partition parts must be positive".into());
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err("partition parts must be weakly decreasing".into());
        }
        Ok(Partition(parts))
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

/// Jordan structure of a matrix with rational spectrum: one partition per
/// distinct eigenvalue.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<JordanEntry>", into = "Vec<JordanEntry>")]
pub struct JordanData {
    blocks: Vec<(Rational, Partition)>,
}

#[derive(Serialize, Deserialize)]
struct JordanEntry {
    #[serde(with = "rational::serde_str")]
    eigenvalue: Rational,
    partition: Partition,
}

impl JordanData {
    /// Fails if an eigenvalue repeats. Empty partitions are dropped.
    pub fn new(blocks: Vec<(Rational, Partition)>) -> Result<Self> {
        let blocks: Vec<_> = blocks.into_iter().filter(|(_, p)| !p.is_empty()).collect();
        for (i, (a, _)) in blocks.iter().enumerate() {
            if blocks[..i].iter().any(|(b, _)| a == b) {
                return Err(Error::Parse(format!(
                    "eigenvalue {} listed twice",
                    rational::to_string(a)
                )));
            }
        }
        Ok(JordanData { blocks })
    }

    /// Every nonempty Jordan structure with eigenvalues drawn from `pool`
    /// and total size at most `max_total`.
    pub fn enumerate(pool: &[Rational], max_total: usize) -> Vec<JordanData> {
        fn go(
            pool: &[Rational],
            budget: usize,
            cur: &mut Vec<(Rational, Partition)>,
            out: &mut Vec<JordanData>,
        ) {
            let Some((first, rest)) = pool.split_first() else {
                if !cur.is_empty() {
                    out.push(JordanData { blocks: cur.clone() });
                }
                return;
            };
            go(rest, budget, cur, out);
            for w in 1..=budget {
                for p in Partition::all(w) {
                    cur.push((first.clone(), p));
                    go(rest, budget - w, cur, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(pool, max_total, &mut Vec::new(), &mut out);
        out
    }

    pub fn single(eigenvalue: Rational, partition: Partition) -> Self {
        Self::new(vec![(eigenvalue, partition)]).expect("single eigenvalue")
    }

    pub fn blocks(&self) -> &[(Rational, Partition)] {
        &self.blocks
    }

    pub fn total(&self) -> usize {
        self.blocks.iter().map(|(_, p)| p.weight()).sum()
    }

    /// Individual Jordan blocks `(eigenvalue, size)` in listed order,
    /// sizes decreasing within one eigenvalue.
    pub fn flatten(&self) -> Vec<(Rational, usize)> {
        self.blocks
            .iter()
            .flat_map(|(a, p)| p.parts().iter().map(move |&s| (a.clone(), s)))
            .collect()
    }

    pub fn partition_of(&self, eigenvalue: &Rational) -> Partition {
        self.blocks
            .iter()
            .find(|(a, _)| a == eigenvalue)
            .map(|(_, p)| p.clone())
            .unwrap_or_default()
    }
}

impl TryFrom<Vec<JordanEntry>> for JordanData {
    type Error = String;

    fn try_from(v: Vec<JordanEntry>) -> std::result::Result<Self, String> {
        JordanData::new(v.into_iter().map(|e| (e.eigenvalue, e.partition)).collect())
            .map_err(|e| e.to_string())
    }
}

impl From<JordanData> for Vec<JordanEntry> {
    fn from(d: JordanData) -> Self {
        d.blocks
            .into_iter()
            .map(|(eigenvalue, partition)| JordanEntry {
                eigenvalue,
                partition,
            })
            .collect()
    }
}

/// Rational roots with multiplicities, sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalRoots {
    pub roots: Vec<(Rational, usize)>,
    /// Multiplicities account for the full degree.
    pub splits: bool,
}

/// Monic generator of `p / gcd(p, p')`.
pub fn squarefree_part(p: &Polynomial) -> Result<Polynomial> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let g = p.gcd(&p.derivative());
    let (q, _) = p.div_rem(&g)?;
    Ok(q.monic())
}

pub fn rational_roots(p: &Polynomial) -> Result<RationalRoots> {
    let degree = p.degree().ok_or(Error::ZeroPolynomial)?;
    let mut roots = Vec::new();
    let mut rest = p.clone();

    let (zero_mult, _) = p.split_x_power();
    if zero_mult > 0 {
        roots.push((Rational::zero(), zero_mult));
    }

    // Candidates come from the squarefree part, which has the same roots
    // and usually much smaller coefficients.
    let (_, nonzero_part) = squarefree_part(p)?.split_x_power();
    for cand in root_candidates(&nonzero_part) {
        if !nonzero_part.eval(&cand).is_zero() {
            continue;
        }
        let lin = Polynomial::linear(&cand);
        let mut mult = 0;
        while let Some(q) = rest.exact_div(&lin)? {
            rest = q;
            mult += 1;
        }
        roots.push((cand, mult));
    }
    roots.sort_by(|a, b| a.0.cmp(&b.0));
    let splits = roots.iter().map(|(_, m)| m).sum::<usize>() == degree;
    Ok(RationalRoots { roots, splits })
}

/// Candidates `±a/b` with `a | c_0` and `b | c_d` after clearing
/// denominators. Requires `q(0) != 0`.
fn root_candidates(q: &Polynomial) -> Vec<Rational> {
    let Some(d) = q.degree() else {
        return Vec::new();
    };
    if d == 0 {
        return Vec::new();
    }
    let lcm = q
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = q
        .coeffs()
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let lead = divisors(&ints[d]);
    let trail = divisors(&ints[0]);
    let mut out: Vec<Rational> = Vec::new();
    for a in &trail {
        for b in &lead {
            for s in [1, -1] {
                let c = Rational::new(a * s, b.clone());
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
    }
    out
}

/// Positive divisors of `|n|` by trial division.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut n = n.abs();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        let mut e = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            factors.push((p.clone(), e));
        }
        p += 1;
    }
    if n > BigInt::one() {
        factors.push((n, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs
}

/// Diagonalizable over C iff the squarefree part of the characteristic
/// polynomial annihilates `a`. Works without the spectrum splitting over Q.
pub fn is_diagonalizable(a: &RatMatrix) -> Result<bool> {
    let chi = charpoly(a)?;
    let q = squarefree_part(&chi)?;
    Ok(q.eval_matrix(a)?.is_zero())
}

/// Jordan block sizes of eigenvalue `alpha`; empty if `alpha` is not an
/// eigenvalue. Blocks of size `>= k` number `rank(N^{k-1}) - rank(N^k)`
/// for `N = A - alpha I`.
pub fn jordan_type(a: &RatMatrix, alpha: &Rational) -> Result<Partition> {
    let n = a.require_square()?;
    let shifted = a - &RatMatrix::scalar(n, alpha);
    let mut ranks = vec![n];
    let mut power = RatMatrix::identity(n);
    loop {
        power = &power * &shifted;
        let r = power.rank();
        let prev = *ranks.last().expect("nonempty");
        ranks.push(r);
        if r == prev {
            break;
        }
    }
    // at_least[k] = number of blocks of size >= k + 1
    let at_least: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
    let mut parts = Vec::new();
    for k in 0..at_least.len() {
        let exactly = at_least[k] - at_least.get(k + 1).copied().unwrap_or(0);
        parts.extend(std::iter::repeat(k + 1).take(exactly));
    }
    Ok(Partition::new(parts))
}

/// Full Jordan structure, eigenvalues ascending.
pub fn jordan_data(a: &RatMatrix) -> Result<JordanData> {
    let chi = charpoly(a)?;
    let roots = rational_roots(&chi)?;
    if !roots.splits {
        return Err(Error::IrrationalSpectrum);
    }
    let blocks = roots
        .roots
        .into_iter()
        .map(|(alpha, _)| jordan_type(a, &alpha).map(|p| (alpha, p)))
        .collect::<Result<Vec<_>>>()?;
    JordanData::new(blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::conjugate;
    use crate::layered::jordan_matrix;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    fn part(v: &[usize]) -> Partition {
        Partition::new(v.to_vec())
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(
            squarefree_part(&Polynomial::from_ints(&[0, 0, 1])).unwrap(),
            Polynomial::from_ints(&[0, 1])
        );
        let x2m1 = Polynomial::from_ints(&[-1, 0, 1]);
        assert_eq!(squarefree_part(&x2m1).unwrap(), x2m1);
        // (X-1)^2 (X+2) -> (X-1)(X+2), checked by expansion
        let p = &Polynomial::from_ints(&[1, -2, 1]) * &Polynomial::from_ints(&[2, 1]);
        let expected = &Polynomial::from_ints(&[-1, 1]) * &Polynomial::from_ints(&[2, 1]);
        assert_eq!(squarefree_part(&p).unwrap(), expected);
        assert_eq!(squarefree_part(&Polynomial::zero()), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn rational_roots_examples() {
        let r = rational_roots(&Polynomial::from_ints(&[-1, 0, 1])).unwrap();
        assert_eq!(r.roots, vec![(int(-1), 1), (int(1), 1)]);
        assert!(r.splits);
        let r = rational_roots(&Polynomial::from_ints(&[0, 0, 0, 1])).unwrap();
        assert_eq!(r.roots, vec![(int(0), 3)]);
        assert!(r.splits);
        let r = rational_roots(&Polynomial::from_ints(&[-2, 0, 1])).unwrap();
        assert!(r.roots.is_empty());
        assert!(!r.splits);
        assert!(rational_roots(&Polynomial::zero()).is_err());
    }

    #[test]
    fn rational_roots_fractional_with_multiplicity() {
        // (X - 2/3)^2 (X + 5/2) X
        let p = &(&Polynomial::linear(&frac(2, 3)).pow(2) * &Polynomial::linear(&frac(-5, 2)))
            * &Polynomial::monomial(1);
        let r = rational_roots(&p).unwrap();
        assert_eq!(
            r.roots,
            vec![(frac(-5, 2), 1), (int(0), 1), (frac(2, 3), 2)]
        );
        assert!(r.splits);
    }

    #[test]
    fn diagonalizable_examples() {
        assert!(is_diagonalizable(&RatMatrix::from_ints(&[[1, 0], [0, -1]])).unwrap());
        assert!(!is_diagonalizable(&RatMatrix::from_ints(&[[0, 1], [0, 0]])).unwrap());
        // companion of X^2 - 2
        assert!(is_diagonalizable(&RatMatrix::from_ints(&[[0, 2], [1, 0]])).unwrap());
        assert!(is_diagonalizable(&RatMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn jordan_type_examples() {
        let a = jordan_matrix(&JordanData::single(int(0), part(&[2, 1])));
        assert_eq!(jordan_type(&a, &int(0)).unwrap(), part(&[2, 1]));
        let d = RatMatrix::diag(&[int(1), int(1), int(2)]);
        assert_eq!(jordan_type(&d, &int(1)).unwrap(), part(&[1, 1]));
        assert_eq!(jordan_type(&d, &int(7)).unwrap(), Partition::empty());
        assert!(jordan_type(&RatMatrix::zeros(1, 2), &int(0)).is_err());
    }

    #[test]
    fn jordan_data_examples() {
        let data = JordanData::new(vec![(int(1), part(&[2])), (int(-1), part(&[1]))]).unwrap();
        let a = jordan_matrix(&data);
        let got = jordan_data(&a).unwrap();
        assert_eq!(got.partition_of(&int(1)), part(&[2]));
        assert_eq!(got.partition_of(&int(-1)), part(&[1]));
        let z = jordan_data(&RatMatrix::zeros(3, 3)).unwrap();
        assert_eq!(z.blocks(), &[(int(0), part(&[1, 1, 1]))]);
        let irr = RatMatrix::from_ints(&[[0, 2], [1, 0]]);
        assert_eq!(jordan_data(&irr), Err(Error::IrrationalSpectrum));
    }

    #[test]
    fn jordan_data_of_conjugated_block() {
        let j = jordan_matrix(&JordanData::single(int(2), part(&[3])));
        let g = RatMatrix::from_ints(&[[1, 2, 0], [0, 1, -1], [3, 0, 1]]);
        let gi = g.inverse().unwrap();
        let data = jordan_data(&conjugate(&g, &gi, &j)).unwrap();
        assert_eq!(data.blocks(), &[(int(2), part(&[3]))]);
    }

    #[test]
    fn transpose_examples() {
        assert_eq!(part(&[2, 1]).transpose(), part(&[2, 1]));
        assert_eq!(part(&[3]).transpose(), part(&[1, 1, 1]));
        assert_eq!(part(&[4, 2, 1]).transpose(), part(&[3, 2, 1, 1]));
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (1..=7).map(|n| Partition::all(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15]);
    }

    #[test]
    fn multiplicity_vectors() {
        assert_eq!(part(&[3, 1, 1]).multiplicities(), vec![2, 0, 1]);
        assert!(Partition::empty().multiplicities().is_empty());
    }

    #[test]
    fn jordan_enumeration_count() {
        let pool: Vec<Rational> = [0, 1, -1, 2, -2, 3].iter().map(|&x| int(x)).collect();
        for max_total in 1..=4 {
            // coefficient sum of Π_pool (Σ_w P(w) x^w), truncated, minus the empty structure
            let p: Vec<usize> = (0..=max_total)
                .map(|w| if w == 0 { 1 } else { Partition::all(w).len() })
                .collect();
            let mut series = vec![1usize];
            for _ in &pool {
                let mut next = vec![0; max_total + 1];
                for (i, c) in series.iter().enumerate() {
                    for (w, pw) in p.iter().enumerate() {
                        if i + w <= max_total {
                            next[i + w] += c * pw;
                        }
                    }
                }
                series = next;
            }
            let expected: usize = series.iter().sum::<usize>() - 1;
            let all = JordanData::enumerate(&pool, max_total);
            assert_eq!(all.len(), expected);
            assert!(all.iter().all(|d| (1..=max_total).contains(&d.total())));
        }
    }

    #[test]
    fn partition_json_rejects_increasing() {
        assert!(serde_json::from_str::<Partition>("[1,2]").is_err());
        let p: Partition = serde_json::from_str("[3,2,1]").unwrap();
        assert_eq!(p.weight(), 6);
    }

    #[test]
    fn jordan_data_json_shape() {
        let d = JordanData::single(int(2), part(&[3]));
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"[{"eigenvalue":"2","partition":[3]}]"#);
        let back: JordanData = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }

    fn partition_strategy() -> impl Strategy<Value = Partition> {
        prop::collection::vec(1usize..6, 0..6).prop_map(Partition::new)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn transpose_is_involution(p in partition_strategy()) {
            prop_assert_eq!(p.transpose().transpose(), p.clone());
            prop_assert_eq!(p.transpose().weight(), p.weight());
        }

        #[test]
        fn jordan_type_roundtrip(p in partition_strategy().prop_filter("nonempty", |p| !p.is_empty())) {
            let a = jordan_matrix(&JordanData::single(int(0), p.clone()));
            prop_assert_eq!(jordan_type(&a, &int(0)).unwrap(), p);
        }

        #[test]
        fn diagonalizable_iff_all_parts_one(
            p1 in partition_strategy(),
            p2 in partition_strategy(),
        ) {
            prop_assume!(p1.weight() + p2.weight() > 0);
            let data = JordanData::new(vec![(int(1), p1.clone()), (frac(-1, 2), p2.clone())]).unwrap();
            let a = jordan_matrix(&data);
            let expected = p1.parts().iter().chain(p2.parts()).all(|&s| s == 1);
            prop_assert_eq!(is_diagonalizable(&a).unwrap(), expected);
            let total: usize = jordan_data(&a).unwrap().blocks().iter().map(|(_, p)| p.weight()).sum();
            prop_assert_eq!(total, a.rows());
        }
    }
}
