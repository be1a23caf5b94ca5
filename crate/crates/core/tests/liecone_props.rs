mod common;

use common::arb_field;
use fullerlab_core::liecone::{
    ab_matrices, ad_ladder, delta_basis, delta_rank, fuller_certificate, glc_classify, lie_bracket, lie_derivative_identity, GlcVerdict,
    DEFAULT_MAX_DEPTH, DEFAULT_RANK_TOL,
};
use fullerlab_core::polyalg::{rat, Rational};
use fullerlab_core::problems::{fuller_multi, MatrixParam};
use proptest::prelude::*;

fn small_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    proptest::collection::vec(proptest::collection::vec(-2i64..=2, n), n)
}

fn spd_from(a: &[Vec<i64>]) -> MatrixParam {
    let n = a.len();
    let rows = (0..n)
        .map(|i| (0..n).map(|j| rat((0..n).map(|k| a[k][i] * a[k][j]).sum::<i64>() + i64::from(i == j), 1)).collect())
        .collect();
    MatrixParam::new(rows).unwrap()
}

fn symmetric_from(a: &[Vec<i64>]) -> MatrixParam {
    let n = a.len();
    MatrixParam::new((0..n).map(|i| (0..n).map(|j| rat(a[i][j] + a[j][i], 1)).collect()).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bracket_antisymmetry(a in arb_field(3, 2), b in arb_field(3, 2)) {
        let ab = lie_bracket(&a, &b).unwrap();
        let ba = lie_bracket(&b, &a).unwrap();
        prop_assert!(ab.checked_add(&ba).unwrap().is_zero());
    }

    #[test]
    fn jacobi_identity(a in arb_field(3, 2), b in arb_field(3, 2), c in arb_field(3, 2)) {
        let t1 = lie_bracket(&a, &lie_bracket(&b, &c).unwrap()).unwrap();
        let t2 = lie_bracket(&b, &lie_bracket(&c, &a).unwrap()).unwrap();
        let t3 = lie_bracket(&c, &lie_bracket(&a, &b).unwrap()).unwrap();
        prop_assert!(t1.checked_add(&t2).unwrap().checked_add(&t3).unwrap().is_zero());
    }

    #[test]
    fn glc_strict_implies_semidefinite(entries in proptest::collection::vec(-3.0f64..3.0, 4), q in 1usize..5) {
        let b = vec![vec![entries[0], entries[1]], vec![entries[2], entries[3]]];
        let v = glc_classify(&b, q, 1e-9);
        if v == GlcVerdict::Strict {
            prop_assert!(v.satisfies_semidefinite());
        }
        // Negating B flips the definiteness test; a strict verdict cannot survive both signs.
        let neg: Vec<Vec<f64>> = b.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        prop_assert!(!(v == GlcVerdict::Strict && glc_classify(&neg, q, 1e-9) == GlcVerdict::Strict));
    }

    #[test]
    fn multi_fuller_ladder_identities(a in small_matrix(2), s in small_matrix(2), z in proptest::collection::vec(-2.0f64..2.0, 5),
                                      p in proptest::collection::vec(-2.0f64..2.0, 4)) {
        let m1 = spd_from(&a);
        let m2 = symmetric_from(&s);
        prop_assume!(m2.determinant() != Rational::from_integer(0.into()));
        let aug = fuller_multi(&m1, &m2).unwrap().augment();
        let mut pfull = vec![-1.0];
        pfull.extend(&p);
        // Consistency of the Lie-derivative identity along the ladder: with u = 0 the derivative of
        // <p, ad_f^l g_i> is <p, ad_f^{l+1} g_i>.
        let ladder = ad_ladder(&aug, 4).unwrap();
        for rungs in &ladder {
            for l in 0..4 {
                let d = lie_derivative_identity(&aug, &rungs[l].field).unwrap().eval(&z, &pfull, &[0.0, 0.0]);
                let next: f64 = rungs[l + 1].field.eval_f64(&z).unwrap().iter().zip(&pfull).map(|(a, b)| a * b).sum();
                prop_assert!((d - next).abs() <= 1e-9 * (1.0 + next.abs()));
            }
        }
        // Rank never exceeds N.
        let rep = ab_matrices(&aug, DEFAULT_MAX_DEPTH).unwrap();
        let delta = delta_rank(&delta_basis(&aug, &rep), &[z.clone()], DEFAULT_RANK_TOL).unwrap();
        prop_assert!(delta.rank <= 5);
    }

    #[test]
    fn certificate_invariant_under_congruence(a in small_matrix(2), s in small_matrix(2), w in small_matrix(2)) {
        let m1 = spd_from(&a);
        let m2 = symmetric_from(&s);
        let zero = Rational::from_integer(0.into());
        prop_assume!(m2.determinant() != zero);
        let sym = symmetric_from(&w);
        prop_assume!(sym.determinant() != zero);
        let m2s = sym.mul(&m2).mul(&sym);
        let base = fuller_certificate(&fuller_multi(&m1, &m2).unwrap().augment()).unwrap();
        let flipped = fuller_certificate(&fuller_multi(&m1, &m2s).unwrap().augment()).unwrap();
        prop_assert_eq!(base.verdict, flipped.verdict);
        prop_assert_eq!(base.delta.rank, flipped.delta.rank);
        let zero = vec![rat(0, 1); 5];
        let p = vec![rat(-1, 1), rat(1, 2), rat(-1, 3), rat(2, 1), rat(1, 1)];
        for (m2x, rep) in [(&m2, &base), (&m2s, &flipped)] {
            let want = m2x.mul(&m1).mul(&m1).mul(m2x).neg();
            let b = rep.ladder.as_ref().unwrap().b_at_rational(&zero, &p).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert_eq!(&b[i][j], want.get(i, j));
                }
            }
        }
    }
}
