use proptest::prelude::*;
use twistlab::sample;
use twistlab::tensor_core::{c, kron, leg_embed, spectral_power, trace_norm, PositiveSpectral};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kron_is_associative(seed in any::<u64>(), (a, b, cc) in (1usize..4, 1usize..4, 1usize..4)) {
        let mut rng = sample::rng(seed);
        let x = sample::matrix(&mut rng, a, b);
        let y = sample::matrix(&mut rng, b, cc);
        let z = sample::matrix(&mut rng, cc, a);
        let lhs = kron(&kron(&x, &y), &z);
        let rhs = kron(&x, &kron(&y, &z));
        prop_assert!((&lhs - &rhs).max_abs() <= 1e-15);
    }

    #[test]
    fn distant_legs_commute(seed in any::<u64>(), d in 1usize..4, n in 4usize..6) {
        let mut rng = sample::rng(seed);
        let t = sample::matrix(&mut rng, d * d, d * d);
        for i in 1..n {
            for j in (i + 2)..n {
                let ti = leg_embed(&t, i, n, d).unwrap();
                let tj = leg_embed(&t, j, n, d).unwrap();
                let r = (&ti.matmul(&tj) - &tj.matmul(&ti)).max_abs();
                prop_assert!(r <= 1e-12, "legs {i},{j}: {r:e}");
            }
        }
    }

    #[test]
    fn spectral_power_is_additive(
        seed in any::<u64>(),
        eigs in prop::collection::vec(0.05f64..20.0, 1..5),
        (a, b, c1, c2) in (-3.0f64..3.0, -0.5f64..0.5, -3.0f64..3.0, -0.5f64..0.5),
    ) {
        let mut rng = sample::rng(seed);
        let u = sample::unitary(&mut rng, eigs.len());
        let d = PositiveSpectral::new(eigs, u).unwrap();
        let (z1, z2) = (c(a, b), c(c1, c2));
        let lhs = spectral_power(&d, z1).matmul(&spectral_power(&d, z2));
        let rhs = spectral_power(&d, z1 + z2);
        let scale = 1.0 + rhs.op_norm();
        prop_assert!((&lhs - &rhs).op_norm() <= 1e-10 * scale);
    }

    #[test]
    fn trace_norm_is_multiplicative(seed in any::<u64>(), (p, q) in (1usize..4, 1usize..4)) {
        let mut rng = sample::rng(seed);
        let a = sample::matrix(&mut rng, p, q);
        let b = sample::matrix(&mut rng, q, p);
        let lhs = trace_norm(&kron(&a, &b));
        let rhs = trace_norm(&a) * trace_norm(&b);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0));
    }
}
