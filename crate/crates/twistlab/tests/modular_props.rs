use proptest::prelude::*;
use twistlab::fock::FockSpace;
use twistlab::modular_verify::{cyclicity_rank, equivalence_row, tomita_consistency};
use twistlab::standard_subspace::two_level;
use twistlab::twist::{gallery, GalleryParams};

fn q_flip(q: f64) -> twistlab::Twist {
    gallery("q_flip", &GalleryParams::d(2).with_q(q)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// On level 1 the second-quantized modular group is Δ^{it} itself.
    #[test]
    fn one_particle_flow_is_delta_it(q in -1.0f64..1.0, t in -3.0f64..3.0, lambda in 1.1f64..9.0) {
        let h = two_level(lambda).unwrap();
        let fs = FockSpace::build(&q_flip(q), 2).unwrap();
        let u = h.modular_group(t);
        let g = fs.second_quantize(&u).unwrap();
        let block = g.block(1, 1).unwrap();
        prop_assert!((block - &u).max_abs() <= 1e-12);
    }

    /// Strict crossing-symmetric twists: the monomial span fills every
    /// level and AΩ = 0 only for A = 0 on the window.
    #[test]
    fn strict_q_flip_is_cyclic_and_separating(q in -0.95f64..0.95, lambda in 1.1f64..9.0) {
        let h = two_level(lambda).unwrap();
        let fs = FockSpace::build(&q_flip(q), 3).unwrap();
        for r in cyclicity_rank(&fs, &h, 3).unwrap() {
            prop_assert_eq!(r.rank, r.expected);
        }
        let tom = tomita_consistency(&fs, &h, 3).unwrap();
        prop_assert!(tom.welldefined_residual <= 1e-8 && tom.match_residual <= 1e-8);
    }

    #[test]
    fn verdicts_agree_for_q_flip(q in -1.0f64..1.0, lambda in 1.1f64..9.0, seed in any::<u64>()) {
        let h = two_level(lambda).unwrap();
        let row = equivalence_row("q_flip", &q_flip(q), &h, 2, seed).unwrap();
        prop_assert!(row.agree());
        prop_assert_eq!(row.verdicts(), [true; 3]);
    }
}
