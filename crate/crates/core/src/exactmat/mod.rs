//! Exact dense linear algebra over Q.
//!
//! Everything here is built on [`RatMatrix`]: reduced row echelon form,
//! rank, canonical kernel bases, Kronecker products and characteristic
//! polynomials. Vectorization is column-major throughout, so
//! `vec(A X B) = kron(B^T, A) vec(X)`.

mod matrix;
mod poly;

pub use matrix::{anticommutator, commutator, conjugate, kron, RatMatrix, Rref};
pub use poly::{charpoly, Polynomial};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int, Rational};
    use num_traits::Zero;
    use proptest::prelude::*;

    /// Cofactor expansion along the first row; independent of elimination.
    fn det_cofactor(m: &RatMatrix) -> Rational {
        let n = m.rows();
        if n == 0 {
            return int(1);
        }
        if n == 1 {
            return m[(0, 0)].clone();
        }
        let mut acc = Rational::zero();
        for j in 0..n {
            if m[(0, j)].is_zero() {
                continue;
            }
            let minor = RatMatrix::from_fn(n - 1, n - 1, |r, c| {
                m[(r + 1, if c < j { c } else { c + 1 })].clone()
            });
            let term = &m[(0, j)] * det_cofactor(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    fn matrix_strategy(rows: usize, cols: usize, bound: i64) -> impl Strategy<Value = RatMatrix> {
        prop::collection::vec(-bound..=bound, rows * cols).prop_map(move |v| {
            RatMatrix::from_fn(rows, cols, |i, j| int(v[i * cols + j]))
        })
    }

    fn invertible_strategy(n: usize) -> impl Strategy<Value = RatMatrix> {
        matrix_strategy(n, n, 4).prop_filter("singular", |g| !g.determinant().unwrap().is_zero())
    }

    #[test]
    fn rref_identity() {
        let id = RatMatrix::identity(3);
        let r = id.rref();
        assert_eq!(r.reduced, id);
        assert_eq!(r.rank, 3);
        assert_eq!(r.pivots, vec![0, 1, 2]);
    }

    #[test]
    fn rref_single_pivot() {
        let r = RatMatrix::from_ints(&[[0, 1], [0, 0]]).rref();
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivots, vec![1]);
    }

    #[test]
    fn rref_rectangular_fractions() {
        let m = RatMatrix::from_ints(&[[2, 4, 1], [1, 2, 3]]);
        let r = m.rref();
        let expected = RatMatrix::from_rows(vec![
            vec![int(1), int(2), int(0)],
            vec![int(0), int(0), int(1)],
        ])
        .unwrap();
        assert_eq!(r.reduced, expected);
        assert_eq!(r.pivots, vec![0, 2]);
    }

    #[test]
    fn kernel_examples() {
        let k = RatMatrix::from_ints(&[[1, 1]]).kernel();
        assert_eq!(k, vec![vec![int(-1), int(1)]]);
        assert_eq!(RatMatrix::zeros(2, 2).kernel().len(), 2);
        assert!(RatMatrix::identity(4).kernel().is_empty());
    }

    #[test]
    fn kron_identity_factor_is_block_diagonal() {
        let m = RatMatrix::from_ints(&[[1, 2], [3, 4]]);
        assert_eq!(
            kron(&RatMatrix::identity(2), &m),
            RatMatrix::block_diag(&[m.clone(), m.clone()])
        );
        assert_eq!(kron(&m, &RatMatrix::identity(1)), m);
    }

    #[test]
    fn kron_mixed_shapes_by_definition() {
        let a = RatMatrix::from_ints(&[[1, -2, 3], [0, 5, -1]]);
        let b = RatMatrix::from_ints(&[[2, 1], [-3, 4], [7, 0]]);
        let k = kron(&a, &b);
        assert_eq!((k.rows(), k.cols()), (6, 6));
        for i in 0..2 {
            for j in 0..3 {
                for p in 0..3 {
                    for q in 0..2 {
                        assert_eq!(k[(i * 3 + p, j * 2 + q)], &a[(i, j)] * &b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn charpoly_examples() {
        let j2 = RatMatrix::from_ints(&[[0, 1], [0, 0]]);
        assert_eq!(charpoly(&j2).unwrap(), Polynomial::from_ints(&[0, 0, 1]));
        let d = RatMatrix::from_ints(&[[1, 0], [0, -1]]);
        assert_eq!(charpoly(&d).unwrap(), Polynomial::from_ints(&[-1, 0, 1]));
        // companion matrix of X^3 - 2X + 1
        let c = RatMatrix::from_ints(&[[0, 0, -1], [1, 0, 2], [0, 1, 0]]);
        assert_eq!(charpoly(&c).unwrap(), Polynomial::from_ints(&[1, -2, 0, 1]));
        assert!(charpoly(&RatMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn charpoly_with_fractions_matches_cofactor_oracle() {
        let a = RatMatrix::from_rows(vec![
            vec![frac(1, 2), int(3), frac(-2, 3)],
            vec![int(0), frac(5, 7), int(1)],
            vec![int(-4), frac(1, 3), int(2)],
        ])
        .unwrap();
        let chi = charpoly(&a).unwrap();
        for x in -3..=3 {
            let xi = &RatMatrix::scalar(3, &int(x)) - &a;
            assert_eq!(chi.eval(&int(x)), det_cofactor(&xi));
        }
    }

    #[test]
    fn polynomial_division_and_gcd() {
        // (X-1)^2 (X+2)
        let p = &Polynomial::from_ints(&[-1, 1]).pow(2) * &Polynomial::from_ints(&[2, 1]);
        let g = p.gcd(&p.derivative());
        assert_eq!(g, Polynomial::from_ints(&[-1, 1]));
        let (q, r) = p.div_rem(&g).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, Polynomial::from_ints(&[-2, 1, 1]));
        assert!(p.div_rem(&Polynomial::zero()).is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let g = RatMatrix::from_ints(&[[2, 1, 0], [1, 1, 0], [0, 3, 1]]);
        let gi = g.inverse().unwrap();
        assert_eq!(&g * &gi, RatMatrix::identity(3));
        assert!(RatMatrix::from_ints(&[[1, 2], [2, 4]]).inverse().is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn rank_is_full_iff_cofactor_det_nonzero(m in matrix_strategy(4, 4, 5)) {
            let full = m.rank() == 4;
            prop_assert_eq!(full, !det_cofactor(&m).is_zero());
            prop_assert_eq!(m.determinant().unwrap(), det_cofactor(&m));
        }

        #[test]
        fn rank_nullity(m in matrix_strategy(3, 5, 2)) {
            let kernel = m.kernel();
            prop_assert_eq!(m.rank() + kernel.len(), m.cols());
            for v in &kernel {
                prop_assert!(m.mul_vec(v).iter().all(Zero::is_zero));
            }
        }

        #[test]
        fn rref_is_idempotent(m in matrix_strategy(4, 5, 3)) {
            let once = m.rref().reduced;
            prop_assert_eq!(once.rref().reduced, once);
        }

        #[test]
        fn kron_vec_identity(
            a in matrix_strategy(2, 3, 3),
            x in matrix_strategy(3, 2, 3),
            b in matrix_strategy(2, 4, 3),
        ) {
            let lhs = (&(&a * &x) * &b).vec();
            let rhs = kron(&b.transpose(), &a).mul_vec(&x.vec());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn charpoly_is_similarity_invariant(a in matrix_strategy(3, 3, 4), g in invertible_strategy(3)) {
            let gi = g.inverse().unwrap();
            let b = conjugate(&g, &gi, &a);
            prop_assert_eq!(charpoly(&a).unwrap(), charpoly(&b).unwrap());
        }
    }
}
