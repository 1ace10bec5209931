use proptest::prelude::*;
use twistlab::fock::FockSpace;
use twistlab::npoint::{
    crossing_partial_sums, diagram_values, enumerate_diagrams, evaluate_diagram,
    kms_rotated_vectors, triple_crossing_alternative, wightman, PairDiagram,
};
use twistlab::sample;
use twistlab::standard_subspace::{make_standard, two_level};
use twistlab::tensor_core::{c, kron, ComplexVector, PositiveSpectral};
use twistlab::twist::{gallery, GalleryParams, Twist};

fn draw(seed: u64, m: usize, d: usize) -> Vec<ComplexVector> {
    let mut rng = sample::rng(seed);
    (0..m).map(|_| sample::vector(&mut rng, d)).collect()
}

fn q_flip(q: f64) -> Twist {
    gallery("q_flip", &GalleryParams::d(2).with_q(q)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn free_case_is_noncrossing_sum(seed in any::<u64>(), n in 1usize..4, lambda in 1.1f64..8.0) {
        let t = gallery("zero", &GalleryParams::d(2)).unwrap();
        let h = two_level(lambda).unwrap();
        let fs = FockSpace::build(&t, n).unwrap();
        let vs = draw(seed, 2 * n, 2);
        let w = wightman(&fs, &h, &vs, c(0.0, 0.0)).unwrap();
        let sums = crossing_partial_sums(&t, &h, &vs, c(0.0, 0.0)).unwrap();
        prop_assert!((sums[0] - w).norm() <= 1e-10 * w.norm().max(1.0));
    }

    /// Rotation preserves crossing numbers, so the KMS shift holds for each
    /// crossing class separately.
    #[test]
    fn crossing_classes_rotate_into_themselves(seed in any::<u64>(), q in -1.0f64..1.0, time in -2.0f64..2.0) {
        let t = q_flip(q);
        let h = two_level(4.0).unwrap();
        let vs = draw(seed, 6, 2);
        let shifted = crossing_partial_sums(&t, &h, &vs, c(time, -1.0)).unwrap();
        let rotated = crossing_partial_sums(&t, &h, &kms_rotated_vectors(&h, &vs, time), c(0.0, 0.0)).unwrap();
        for (a, b) in shifted.iter().zip(&rotated) {
            prop_assert!((a - b).norm() <= 1e-9 * a.norm().max(1.0));
        }
    }

    #[test]
    fn single_crossing_diagrams_are_linear_in_twist(seed in any::<u64>(), (a, b) in (-0.5f64..0.5, -0.5f64..0.5)) {
        let mut rng = sample::rng(seed);
        let m1 = sample::hermitian(&mut rng, 4);
        let m2 = sample::hermitian(&mut rng, 4);
        let (m1, m2) = (m1.scale_real(1.0 / m1.op_norm()), m2.scale_real(1.0 / m2.op_norm()));
        let t1 = Twist::new(m1.clone(), 2).unwrap();
        let t2 = Twist::new(m2.clone(), 2).unwrap();
        let mix = Twist::new(&m1.scale_real(a) + &m2.scale_real(b), 2).unwrap();
        let h = two_level(3.0).unwrap();
        let vs = draw(seed ^ 9, 6, 2);
        for dg in enumerate_diagrams(3).unwrap().into_iter().filter(|d| d.crossing_count() == 1) {
            let z = c(0.2, -0.3);
            let lhs = evaluate_diagram(&dg, &mix, &h, &vs, z).unwrap();
            let rhs = evaluate_diagram(&dg, &t1, &h, &vs, z).unwrap() * a + evaluate_diagram(&dg, &t2, &h, &vs, z).unwrap() * b;
            prop_assert!((lhs - rhs).norm() <= 1e-10);
        }
    }

    /// Rewriting everything in a rotated basis leaves every diagram unchanged.
    #[test]
    fn diagrams_are_basis_independent(seed in any::<u64>(), q in -1.0f64..1.0) {
        let mut rng = sample::rng(seed);
        let u = sample::unitary(&mut rng, 2);
        let a = sample::hermitian(&mut rng, 4);
        let t = Twist::new(a.scale_real(0.9 / a.op_norm()), 2).unwrap();
        let uu = kron(&u, &u);
        let tu = Twist::new(uu.matmul(t.matrix()).matmul(&uu.adjoint()), 2).unwrap();
        let h = two_level(2.0 + q).unwrap();
        let delta = PositiveSpectral::new(h.delta().eigenvalues().to_vec(), u.matmul(h.delta().eigenbasis())).unwrap();
        let j = twistlab::AntilinearMap::new(u.matmul(h.j().unitary_part()).matmul(&u.transpose())).unwrap();
        let hu = make_standard(delta, j).unwrap();
        let vs = draw(seed ^ 3, 6, 2);
        let vu: Vec<_> = vs.iter().map(|v| u.mul_vec(v)).collect();
        let a = diagram_values(&t, &h, &vs, c(0.1, -0.2)).unwrap();
        let b = diagram_values(&tu, &hu, &vu, c(0.1, -0.2)).unwrap();
        for ((_, x), (_, y)) in a.iter().zip(&b) {
            prop_assert!((x - y).norm() <= 1e-10);
        }
    }

    #[test]
    fn triple_crossing_orderings_agree_when_braided(seed in any::<u64>(), q in -1.0f64..1.0) {
        let t = q_flip(q);
        let h = two_level(4.0).unwrap();
        let vs = draw(seed, 6, 2);
        let dg = PairDiagram::new(vec![(1, 4), (2, 5), (3, 6)]).unwrap();
        let a = evaluate_diagram(&dg, &t, &h, &vs, c(0.0, 0.0)).unwrap();
        let b = triple_crossing_alternative(&t, &h, &vs, c(0.0, 0.0)).unwrap();
        prop_assert!((a - b).norm() <= 1e-12);
    }
}

/// Bose Wick rule at four points: all three pairings, each a product of
/// two-point functions.
#[test]
fn flip_four_point_is_bose_wick() {
    let t = gallery("flip", &GalleryParams::d(2)).unwrap();
    let h = two_level(4.0).unwrap();
    let fs = FockSpace::build(&t, 2).unwrap();
    for seed in 0..10 {
        let vs = draw(seed, 4, 2);
        let two = |i: usize, j: usize| h.s(&vs[i]).dot(&vs[j]);
        let expect = two(0, 1) * two(2, 3) + two(0, 3) * two(1, 2) + two(0, 2) * two(1, 3);
        let w = wightman(&fs, &h, &vs, c(0.0, 0.0)).unwrap();
        assert!((w - expect).norm() < 1e-10, "seed {seed}");
    }
}
