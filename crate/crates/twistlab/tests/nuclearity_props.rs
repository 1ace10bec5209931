use proptest::prelude::*;
use twistlab::nuclearity::{fock_l2_check, l2_index, multiplicativity_residual};
use twistlab::standard_subspace::two_level;
use twistlab::twist::{gallery, GalleryParams};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn tau_is_multiplicative(q in -0.99f64..0.99, lh in 1.1f64..10.0, lk in 1.1f64..10.0) {
        let t = gallery("q_flip", &GalleryParams::d(2).with_q(q)).unwrap();
        let (h, k) = (two_level(lh).unwrap(), two_level(lk).unwrap());
        let r = fock_l2_check(&t, &h, &k, 4).unwrap();
        let scale = r.tau.iter().fold(1.0f64, |a, &b| a.max(b));
        prop_assert!(multiplicativity_residual(&r) <= 1e-9 * scale);
        prop_assert!(r.deviation <= 1e-9 * scale);
    }

    /// Partial sums only grow. With the swap J the index is at least 2, so
    /// the 1/(1−x) bound never applies here.
    #[test]
    fn truncated_sums_increase(q in -0.99f64..0.99, lh in 1.1f64..10.0, lk in 1.1f64..10.0) {
        let t = gallery("q_flip", &GalleryParams::d(2).with_q(q)).unwrap();
        let (h, k) = (two_level(lh).unwrap(), two_level(lk).unwrap());
        let r = fock_l2_check(&t, &h, &k, 4).unwrap();
        let mut partial = 0.0;
        for &tau in &r.tau {
            prop_assert!(tau >= 0.0);
            partial += tau;
        }
        prop_assert!((partial - r.truncated_sum).abs() <= 1e-12 * partial);
        prop_assert!(r.bound.is_none());
        prop_assert!(l2_index(&h, &k).unwrap() >= 2.0 - 1e-12);
    }
}
