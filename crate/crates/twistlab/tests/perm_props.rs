use proptest::prelude::*;
use twistlab::fock::p_recursive;
use twistlab::perm_expansion::{
    canonical_word, enumerate, mirrored_canonical_word, p_sum, quasi_mult_eval, reduced_words,
    WordOrder,
};
use twistlab::tensor_core::{c, ComplexMatrix};
use twistlab::twist::{gallery, GalleryParams, Twist};

#[test]
fn canonical_words_are_reduced() {
    for n in 1..=6 {
        for pi in enumerate(n).unwrap() {
            let inv = pi.inversion_count();
            assert_eq!(canonical_word(&pi).len(), inv);
            assert_eq!(mirrored_canonical_word(&pi).len(), inv);
            assert_eq!(canonical_word(&pi).evaluate(n), pi);
        }
    }
}

fn braided(kind: u8, q: f64, a: [f64; 3]) -> Twist {
    match kind % 3 {
        0 => gallery("q_flip", &GalleryParams::d(2).with_q(q)).unwrap(),
        1 => gallery(
            "flip_sandwich",
            &GalleryParams::d(2).with_a(ComplexMatrix::from_real_diag(&a[..2])),
        )
        .unwrap(),
        _ => {
            let e = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
            gallery(
                "proj_pair",
                &GalleryParams::d(2).with_q(q).with_projections(e.clone(), e),
            )
            .unwrap()
        }
    }
}

fn params() -> impl Strategy<Value = (u8, f64, [f64; 3])> {
    (
        any::<u8>(),
        -1.0f64..1.0,
        [-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0],
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn p_sum_matches_recursion_for_braided((kind, q, a) in params()) {
        let t = braided(kind, q, a);
        prop_assume!(t.is_braided());
        let ps = p_recursive(t.matrix(), 2, 5);
        for (n, p) in ps.iter().enumerate().skip(1) {
            for order in [WordOrder::Canonical, WordOrder::Mirrored] {
                let r = (&p_sum(&t, n, order).unwrap() - p).max_abs();
                prop_assert!(r <= 1e-10 * p.max_abs().max(1.0), "n={n}: {r:e}");
            }
        }
    }

    #[test]
    fn braided_evaluation_ignores_word_choice((kind, q, a) in params()) {
        let t = braided(kind, q, a);
        prop_assume!(t.is_braided());
        for n in [3, 4] {
            let mut multi = 0;
            for pi in enumerate(n).unwrap() {
                let words = reduced_words(&pi);
                multi += usize::from(words.len() >= 2);
                let first = quasi_mult_eval(&t, &words[0], n).unwrap();
                for w in &words[1..] {
                    prop_assert!((&quasi_mult_eval(&t, w, n).unwrap() - &first).max_abs() <= 1e-12);
                }
            }
            let floor = if n == 3 { 1 } else { 10 };
            prop_assert!(multi >= floor);
        }
    }

    #[test]
    fn one_dimensional_sum_is_q_factorial(q in -1.0f64..1.0, n in 1usize..7) {
        let t = gallery("q_flip", &GalleryParams::d(1).with_q(q)).unwrap();
        let v = p_sum(&t, n, WordOrder::Canonical).unwrap().data()[0];
        // Oracle: Σ_π q^{inv(π)}.
        let direct: f64 = enumerate(n).unwrap().iter().map(|pi| q.powi(pi.inversion_count() as i32)).sum();
        prop_assert!((v - c(direct, 0.0)).norm() <= 1e-12 * direct.abs().max(1.0));
    }
}
