//! Seeded exact samples of anti-commuting pairs on a prescribed component,
//! structured nilpotent samples, and local dimension counts by exact rank.
//!
//! Randomness comes from `SplitMix64` (as implemented in `rand_xoshiro`)
//! seeded with `seed_from_u64(cfg.seed)`; integers are drawn with
//! `Rng::gen_range`. Both are fixed by the lockfile, so a seed reproduces
//! the same matrices on every platform.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::Serialize;

use crate::classify::{component_of, flip, is_generic_pair, require_anticommuting, ComponentTriple};
use crate::commutant::grouped_nilpotent;
use crate::error::{Error, Result};
use crate::exactmat::{anticommutator, conjugate, kron, RatMatrix};
use crate::layered::{layered_block, LayeredBlockSpec, Sigma};
use crate::rational::{self, Rational};
use crate::spectral::{jordan_type, Partition};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleConfig {
    pub seed: u64,
    pub coeff_bound: u32,
    pub retries: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            seed: 0,
            coeff_bound: 8,
            retries: 64,
        }
    }
}

impl SampleConfig {
    pub fn with_seed(seed: u64) -> Self {
        SampleConfig {
            seed,
            ..SampleConfig::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.coeff_bound < 2 {
            return Err(Error::shape(format!(
                "coeff bound must be at least 2, got {}",
                self.coeff_bound
            )));
        }
        Ok(())
    }
}

struct Draw {
    rng: SplitMix64,
    bound: i64,
}

impl Draw {
    fn new(cfg: &SampleConfig) -> Self {
        Draw {
            rng: SplitMix64::seed_from_u64(cfg.seed),
            bound: i64::from(cfg.coeff_bound),
        }
    }

    fn int(&mut self) -> i64 {
        self.rng.gen_range(-self.bound..=self.bound)
    }

    fn nonzero_rational(&mut self) -> Rational {
        let mut num = 0;
        while num == 0 {
            num = self.int();
        }
        let den = self.rng.gen_range(1..=self.bound);
        rational::frac(num, den)
    }

    fn int_matrix(&mut self, rows: usize, cols: usize) -> RatMatrix {
        RatMatrix::from_fn(rows, cols, |_, _| rational::int(self.int()))
    }

    /// Random integer matrix together with its inverse.
    fn invertible(&mut self, n: usize, retries: usize) -> Result<(RatMatrix, RatMatrix)> {
        for _ in 0..=retries {
            let g = self.int_matrix(n, n);
            if let Some(gi) = g.inverse() {
                return Ok((g, gi));
            }
        }
        Err(Error::RetriesExhausted {
            what: "invertible conjugator".into(),
            retries,
        })
    }
}

/// Parameters of the normal form: `a` holds `a_1..a_{p+m}`, `bc` holds
/// `(b_i, c_i)` for the `p` paired blocks, `b_extra` holds
/// `b_{p+1}..b_{p+r}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SampleParams {
    #[serde(serialize_with = "ser_rats")]
    pub a: Vec<Rational>,
    #[serde(serialize_with = "ser_pairs")]
    pub bc: Vec<(Rational, Rational)>,
    #[serde(serialize_with = "ser_rats")]
    pub b_extra: Vec<Rational>,
}

fn ser_rats<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rational::to_string))
}

fn ser_pairs<S: serde::Serializer>(
    v: &[(Rational, Rational)],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|(b, c)| [rational::to_string(b), rational::to_string(c)]))
}

impl SampleParams {
    /// `A = diag(a_1, -a_1, ..., a_p, -a_p, a_{p+1}, ..., a_{p+m}, 0^r)`
    /// and `B = diag([[0, b_i], [c_i, 0]], 0^m, b_{p+1}, ..., b_{p+r})`.
    pub fn normal_form(&self) -> (RatMatrix, RatMatrix) {
        let p = self.bc.len();
        let m = self.a.len() - p;
        let r = self.b_extra.len();
        let mut a_diag = Vec::with_capacity(2 * p + m + r);
        for ai in &self.a[..p] {
            a_diag.push(ai.clone());
            a_diag.push(-ai.clone());
        }
        a_diag.extend(self.a[p..].iter().cloned());
        a_diag.extend(std::iter::repeat(Rational::zero()).take(r));

        let mut blocks: Vec<RatMatrix> = self
            .bc
            .iter()
            .map(|(b, c)| {
                RatMatrix::from_rows(vec![vec![Rational::zero(), b.clone()], vec![c.clone(), Rational::zero()]])
                    .expect("2x2")
            })
            .collect();
        blocks.push(RatMatrix::zeros(m, m));
        blocks.push(RatMatrix::diag(&self.b_extra));
        (RatMatrix::diag(&a_diag), RatMatrix::block_diag(&blocks))
    }

    fn is_admissible(&self) -> bool {
        let sq = |x: &Rational| x * x;
        let a_sq: Vec<Rational> = self.a.iter().map(sq).collect();
        let prods: Vec<Rational> = self.bc.iter().map(|(b, c)| b * c).collect();
        let b_sq: Vec<Rational> = self.b_extra.iter().map(sq).collect();
        let mut b_values = prods;
        b_values.extend(b_sq);
        all_distinct_nonzero(&a_sq) && all_distinct_nonzero(&b_values)
    }
}

fn all_distinct_nonzero(v: &[Rational]) -> bool {
    v.iter().enumerate().all(|(i, x)| !x.is_zero() && !v[..i].contains(x))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ComponentSample {
    pub triple: ComponentTriple,
    #[serde(rename = "A")]
    pub a: RatMatrix,
    #[serde(rename = "B")]
    pub b: RatMatrix,
    pub g: RatMatrix,
    pub params: SampleParams,
}

impl ComponentSample {
    pub fn normal_form(&self) -> (RatMatrix, RatMatrix) {
        self.params.normal_form()
    }
}

fn draw_params(t: &ComponentTriple, draw: &mut Draw, flippable: bool) -> SampleParams {
    let a = (0..t.p + t.m).map(|_| draw.nonzero_rational()).collect();
    let bc = (0..t.p)
        .map(|_| {
            if flippable {
                let s = draw.nonzero_rational();
                (&s * &s, rational::one())
            } else {
                (draw.nonzero_rational(), draw.nonzero_rational())
            }
        })
        .collect();
    let b_extra = (0..t.r).map(|_| draw.nonzero_rational()).collect();
    SampleParams { a, bc, b_extra }
}

fn sample_impl(t: &ComponentTriple, cfg: &SampleConfig, flippable: bool) -> Result<ComponentSample> {
    cfg.validate()?;
    let n = t.n();
    let mut draw = Draw::new(cfg);
    for _ in 0..=cfg.retries {
        let params = draw_params(t, &mut draw, flippable);
        if !params.is_admissible() {
            continue;
        }
        let (a0, b0) = params.normal_form();
        let (g, gi) = draw.invertible(n, cfg.retries)?;
        let a = conjugate(&g, &gi, &a0);
        let b = conjugate(&g, &gi, &b0);
        if !anticommutator(&a, &b)?.is_zero()
            || component_of(&a)?.triple != *t
            || !is_generic_pair(&a, &b, t)?
        {
            continue;
        }
        if flippable && component_of(&b)?.triple != flip(t) {
            continue;
        }
        return Ok(ComponentSample {
            triple: *t,
            a,
            b,
            g,
            params,
        });
    }
    Err(Error::RetriesExhausted {
        what: format!("sample on component {t}"),
        retries: cfg.retries,
    })
}

/// `(gA₀g⁻¹, gB₀g⁻¹)` for the normal form of [`SampleParams`] with
/// parameters avoiding every coincidence that would leave the generic
/// locus. The result anti-commutes, classifies to `t` and is generic.
pub fn sample_component(t: &ComponentTriple, cfg: &SampleConfig) -> Result<ComponentSample> {
    sample_impl(t, cfg, false)
}

/// Like [`sample_component`] with `c_i = 1` and `b_i = s_i²`, so `B` has
/// rational spectrum `±s_i`, `b_{p+j}` and `0^m` and classifies to
/// `flip(t)`.
pub fn sample_component_flippable(t: &ComponentTriple, cfg: &SampleConfig) -> Result<ComponentSample> {
    sample_impl(t, cfg, true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NilpotentSample {
    pub multiplicities: Vec<usize>,
    #[serde(rename = "A")]
    pub a: RatMatrix,
    #[serde(rename = "B")]
    pub b: RatMatrix,
    /// Prescribed eigenvalues of the leading inner block of each group,
    /// indexed like `multiplicities`.
    #[serde(serialize_with = "ser_nested")]
    pub prescribed: Vec<Vec<Rational>>,
}

fn ser_nested<S: serde::Serializer>(v: &[Vec<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|g| g.iter().map(rational::to_string).collect::<Vec<_>>()))
}

/// `A = diag(𝕁_{1,n_1}(0), ..., 𝕁_{s,n_s}(0))` with `B` a random element of
/// its anti-commutant whose leading inner blocks are `g_i D_i g_i⁻¹` for
/// diagonal `D_i`. Prescribed values are nonzero with pairwise distinct
/// absolute values, and the sample is redrawn until `B` has Jordan type
/// `(⌈i/2⌉)` at each prescribed `b` of group `i` and `(⌊i/2⌋)` at `-b`.
pub fn sample_nilpotent_pair(multiplicities: &[usize], cfg: &SampleConfig) -> Result<NilpotentSample> {
    cfg.validate()?;
    let a = grouped_nilpotent(multiplicities);
    let groups: Vec<(usize, usize)> = multiplicities
        .iter()
        .enumerate()
        .filter(|(_, &ni)| ni > 0)
        .map(|(i, &ni)| (i + 1, ni))
        .collect();
    let mut draw = Draw::new(cfg);

    'attempt: for _ in 0..=cfg.retries {
        let total: usize = groups.iter().map(|(_, ni)| ni).sum();
        let values: Vec<Rational> = (0..total).map(|_| draw.nonzero_rational()).collect();
        let squares: Vec<Rational> = values.iter().map(|x| x * x).collect();
        if !all_distinct_nonzero(&squares) {
            continue;
        }
        let mut prescribed = vec![Vec::new(); multiplicities.len()];
        let mut leading = Vec::new();
        let mut taken = 0;
        for &(i, ni) in &groups {
            let vals = values[taken..taken + ni].to_vec();
            taken += ni;
            let (g, gi) = draw.invertible(ni, cfg.retries)?;
            leading.push(conjugate(&g, &gi, &RatMatrix::diag(&vals)));
            prescribed[i - 1] = vals;
        }

        let mut b = RatMatrix::zeros(a.rows(), a.cols());
        let mut row = 0;
        for (k, &(sk, nk)) in groups.iter().enumerate() {
            let mut col = 0;
            for (l, &(sl, nl)) in groups.iter().enumerate() {
                let layers: Vec<RatMatrix> = (0..sk.min(sl))
                    .map(|idx| {
                        if k == l && idx == 0 {
                            leading[k].clone()
                        } else {
                            draw.int_matrix(nk, nl)
                        }
                    })
                    .collect();
                let spec = LayeredBlockSpec::new(Sigma::Minus, sk, sl, (nk, nl), layers)?;
                b.set_block(row, col, &layered_block(&spec));
                col += sl * nl;
            }
            row += sk * nk;
        }

        if !anticommutator(&a, &b)?.is_zero() {
            continue;
        }
        for &(i, _) in &groups {
            for v in &prescribed[i - 1] {
                if jordan_type(&b, v)? != Partition::new(vec![i.div_ceil(2)])
                    || jordan_type(&b, &-v.clone())? != Partition::new(vec![i / 2])
                {
                    continue 'attempt;
                }
            }
        }
        return Ok(NilpotentSample {
            multiplicities: multiplicities.to_vec(),
            a,
            b,
            prescribed,
        });
    }
    Err(Error::RetriesExhausted {
        what: format!("nilpotent sample for multiplicities {multiplicities:?}"),
        retries: cfg.retries,
    })
}

/// Random integer matrix with entries in `[-coeff_bound, coeff_bound]`,
/// redrawn until invertible, with its inverse.
pub fn random_invertible(n: usize, cfg: &SampleConfig) -> Result<(RatMatrix, RatMatrix)> {
    cfg.validate()?;
    Draw::new(cfg).invertible(n, cfg.retries)
}

/// `Σ c_k basis[k]` with integer coefficients in `[-coeff_bound, coeff_bound]`.
pub fn random_combination(basis: &[RatMatrix], rows: usize, cols: usize, cfg: &SampleConfig) -> RatMatrix {
    let mut draw = Draw::new(cfg);
    basis.iter().fold(RatMatrix::zeros(rows, cols), |acc, e| {
        &acc + &e.scale(&rational::int(draw.int()))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DimReport {
    pub tangent_dim: usize,
    pub orbit_dim: usize,
    pub stabilizer_dim: usize,
    pub fiber_dim: usize,
}

/// Kernel dimension of `(X, Y) -> XB + BX + AY + YA`.
pub fn tangent_dim(a: &RatMatrix, b: &RatMatrix) -> Result<usize> {
    require_anticommuting(a, b)?;
    Ok(2 * a.rows() * a.rows() - tangent_system(a, b).rank())
}

/// Matrix of the differential of `(A, B) -> AB + BA` on
/// `(vec X, vec Y)`.
pub fn tangent_system(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let id = RatMatrix::identity(a.rows());
    let sym = |m: &RatMatrix| &kron(&m.transpose(), &id) + &kron(&id, m);
    RatMatrix::hstack(&[&sym(b), &sym(a)]).expect("equal heights")
}

pub fn orbit_dim(a: &RatMatrix, b: &RatMatrix) -> Result<DimReport> {
    require_anticommuting(a, b)?;
    let n = a.rows();
    let id = RatMatrix::identity(n);
    let comm = |m: &RatMatrix| &kron(&m.transpose(), &id) - &kron(&id, m);
    let stacked = RatMatrix::vstack(&[&comm(a), &comm(b)])?;
    let stabilizer_dim = n * n - stacked.rank();
    let orbit_dim = n * n - stabilizer_dim;
    let tangent_dim = 2 * n * n - tangent_system(a, b).rank();
    Ok(DimReport {
        tangent_dim,
        orbit_dim,
        stabilizer_dim,
        fiber_dim: tangent_dim - orbit_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::enumerate_components;
    use crate::commutant::detblock_check;
    use crate::rational::int;
    use proptest::prelude::*;

    fn triple(p: usize, m: usize, r: usize) -> ComponentTriple {
        ComponentTriple::new(p, m, r)
    }

    #[test]
    fn seeded_draws_are_reproducible() {
        let cfg = SampleConfig::with_seed(11);
        let t = triple(1, 1, 1);
        assert_eq!(sample_component(&t, &cfg).unwrap(), sample_component(&t, &cfg).unwrap());
        let other = sample_component(&t, &SampleConfig::with_seed(12)).unwrap();
        assert_ne!(other, sample_component(&t, &cfg).unwrap());
    }

    #[test]
    fn normal_form_shapes() {
        let s = sample_component(&triple(1, 0, 0), &SampleConfig::with_seed(3)).unwrap();
        let (a0, b0) = s.normal_form();
        let a = &s.params.a[0];
        let (b, c) = &s.params.bc[0];
        assert_eq!(a0, RatMatrix::diag(&[a.clone(), -a.clone()]));
        assert_eq!(
            b0,
            RatMatrix::from_rows(vec![vec![int(0), b.clone()], vec![c.clone(), int(0)]]).unwrap()
        );
        let gi = s.g.inverse().unwrap();
        assert_eq!(conjugate(&s.g, &gi, &a0), s.a);
        assert_eq!(conjugate(&s.g, &gi, &b0), s.b);

        let s = sample_component(&triple(0, 0, 3), &SampleConfig::with_seed(5)).unwrap();
        let (a0, b0) = s.normal_form();
        assert!(a0.is_zero());
        assert_eq!(b0, RatMatrix::diag(&s.params.b_extra));
    }

    #[test]
    fn flippable_examples() {
        let s = sample_component_flippable(&triple(1, 0, 0), &SampleConfig::with_seed(1)).unwrap();
        let (_, b0) = s.normal_form();
        let (b, c) = &s.params.bc[0];
        assert_eq!(*c, int(1));
        assert_eq!(b0[(0, 1)], *b);
        let roots = crate::spectral::rational_roots(&crate::exactmat::charpoly(&s.b).unwrap()).unwrap();
        assert!(roots.splits);
        assert_eq!(roots.roots.len(), 2);

        let s = sample_component_flippable(&triple(1, 1, 0), &SampleConfig::with_seed(2)).unwrap();
        assert_eq!(component_of(&s.b).unwrap().triple, triple(1, 0, 1));
        let s = sample_component_flippable(&triple(0, 2, 0), &SampleConfig::with_seed(2)).unwrap();
        assert!(s.b.is_zero());
        assert_eq!(component_of(&s.b).unwrap().triple, triple(0, 0, 2));
    }

    #[test]
    fn every_small_component_samples_generically() {
        for n in 1..=4 {
            for t in enumerate_components(n) {
                for seed in 0..2 {
                    let s = sample_component(&t, &SampleConfig::with_seed(seed)).unwrap();
                    assert!(anticommutator(&s.a, &s.b).unwrap().is_zero());
                    assert_eq!(component_of(&s.a).unwrap().triple, t);
                    assert!(is_generic_pair(&s.a, &s.b, &t).unwrap());
                }
            }
        }
    }

    #[test]
    fn invalid_config_is_rejected() {
        let cfg = SampleConfig {
            coeff_bound: 1,
            ..SampleConfig::default()
        };
        assert!(sample_component(&triple(1, 0, 0), &cfg).is_err());
    }

    #[test]
    fn nilpotent_examples() {
        let cfg = SampleConfig::with_seed(4);
        let s = sample_nilpotent_pair(&[0, 1], &cfg).unwrap();
        let b = &s.prescribed[1][0];
        assert_eq!(s.b[(0, 0)], *b);
        assert_eq!(s.b[(1, 1)], -b.clone());
        assert!(s.b[(1, 0)].is_zero());
        assert_eq!(jordan_type(&s.b, b).unwrap(), Partition::new(vec![1]));
        assert_eq!(jordan_type(&s.b, &-b.clone()).unwrap(), Partition::new(vec![1]));

        let s = sample_nilpotent_pair(&[0, 0, 1], &cfg).unwrap();
        let b = &s.prescribed[2][0];
        assert_eq!(jordan_type(&s.b, b).unwrap(), Partition::new(vec![2]));
        assert_eq!(jordan_type(&s.b, &-b.clone()).unwrap(), Partition::new(vec![1]));

        let s = sample_nilpotent_pair(&[3], &cfg).unwrap();
        assert!(s.a.is_zero());
        assert!(crate::spectral::is_diagonalizable(&s.b).unwrap());
        assert_eq!(crate::spectral::jordan_data(&s.b).unwrap().blocks().len(), 3);
    }

    #[test]
    fn nilpotent_samples_classify_and_factor() {
        for mult in [vec![2, 1], vec![0, 1, 1], vec![1, 0, 0, 1], vec![0, 2]] {
            let s = sample_nilpotent_pair(&mult, &SampleConfig::with_seed(9)).unwrap();
            let n: usize = mult.iter().enumerate().map(|(i, k)| (i + 1) * k).sum();
            let p: usize = mult.iter().enumerate().map(|(i, k)| k * ((i + 1) / 2)).sum();
            assert_eq!(component_of(&s.a).unwrap().triple, triple(p, 0, n - 2 * p));
            assert!(detblock_check(&mult, &s.b).unwrap());
        }
    }

    #[test]
    fn dimension_examples() {
        let z = RatMatrix::zeros(2, 2);
        assert_eq!(tangent_dim(&z, &z).unwrap(), 8);
        let rep = orbit_dim(&z, &z).unwrap();
        assert_eq!(
            rep,
            DimReport {
                tangent_dim: 8,
                orbit_dim: 0,
                stabilizer_dim: 4,
                fiber_dim: 8
            }
        );
        let s = sample_component(&triple(1, 0, 0), &SampleConfig::with_seed(0)).unwrap();
        assert_eq!(tangent_dim(&s.a, &s.b).unwrap(), 5);
        let s = sample_component(&triple(0, 0, 3), &SampleConfig::with_seed(0)).unwrap();
        assert_eq!(tangent_dim(&s.a, &s.b).unwrap(), 9);
        let s = sample_component(&triple(0, 3, 0), &SampleConfig::with_seed(0)).unwrap();
        assert_eq!(orbit_dim(&s.a, &s.b).unwrap().stabilizer_dim, 3);
        assert_eq!(
            tangent_dim(&RatMatrix::identity(2), &RatMatrix::identity(2)),
            Err(Error::NotAntiCommuting)
        );
    }

    /// Independent tangent oracle: build the differential column by column
    /// from the images of the elementary matrices `E_kl`.
    fn tangent_dim_oracle(a: &RatMatrix, b: &RatMatrix) -> usize {
        let n = a.rows();
        let mut cols = Vec::new();
        for which in 0..2 {
            for l in 0..n {
                for k in 0..n {
                    let mut e = RatMatrix::zeros(n, n);
                    e[(k, l)] = int(1);
                    let img = if which == 0 { &(&e * b) + &(b * &e) } else { &(a * &e) + &(&e * a) };
                    cols.push(img.vec());
                }
            }
        }
        2 * n * n - RatMatrix::from_rows(cols).unwrap().rank()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn sampled_pairs_have_expected_dimensions(seed in any::<u64>(), idx in 0usize..9) {
            let ts = enumerate_components(4);
            let t = ts[idx % ts.len()];
            let s = sample_component(&t, &SampleConfig::with_seed(seed)).unwrap();
            let n = t.n();
            let rep = orbit_dim(&s.a, &s.b).unwrap();
            prop_assert_eq!(rep.tangent_dim, n * n + t.p);
            prop_assert_eq!(rep.tangent_dim, tangent_dim_oracle(&s.a, &s.b));
            prop_assert_eq!(rep.stabilizer_dim, n - t.p);
            prop_assert_eq!(rep.fiber_dim, n);
            prop_assert_eq!(rep.orbit_dim + rep.stabilizer_dim, n * n);
        }

        #[test]
        fn nilpotent_samples_anticommute(seed in any::<u64>(), n1 in 0usize..3, n2 in 0usize..2, n3 in 0usize..2) {
            prop_assume!(n1 + n2 + n3 > 0);
            let mult = vec![n1, n2, n3];
            let s = sample_nilpotent_pair(&mult, &SampleConfig::with_seed(seed)).unwrap();
            prop_assert!(anticommutator(&s.a, &s.b).unwrap().is_zero());
            prop_assert!(detblock_check(&mult, &s.b).unwrap());
        }
    }
}
