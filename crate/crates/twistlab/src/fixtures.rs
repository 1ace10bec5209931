//! Standard subspaces, gallery instances and frozen witnesses shared by the
//! test suites and the command line front end.

use crate::standard_subspace::{make_standard, two_level, AntilinearMap, StandardSubspace};
use crate::tensor_core::{ComplexMatrix, ComplexVector, PositiveSpectral};
use crate::twist::{gallery, reversal_j, GalleryParams, Twist};

/// Δ = diag(4, 1/4), J = swap ∘ conj.
pub fn two_level_h() -> StandardSubspace {
    two_level(4.0).expect("valid modular data")
}

/// Δ = diag(16, 1/16) in the same eigenbasis and with the same J as [`two_level_h`].
pub fn two_level_k() -> StandardSubspace {
    two_level(16.0).expect("valid modular data")
}

/// [`two_level_k`] conjugated by a real rotation, so Δ_K no longer shares
/// an eigenbasis with Δ_H.
pub fn rotated_k() -> StandardSubspace {
    let (s, co) = 0.3f64.sin_cos();
    let v = ComplexMatrix::from_real(2, 2, &[co, -s, s, co]);
    let delta =
        PositiveSpectral::new(vec![16.0, 1.0 / 16.0], v.clone()).expect("unitary eigenbasis");
    let uj = v
        .matmul(reversal_j(2).unitary_part())
        .matmul(&v.transpose());
    make_standard(delta, AntilinearMap::new(uj).expect("square")).expect("valid modular data")
}

/// Δ = diag(λ, 1, 1/λ), J = reversal ∘ conj on ℂ³.
pub fn three_level_h(lambda: f64) -> StandardSubspace {
    let delta =
        PositiveSpectral::from_diag(&[lambda, 1.0, 1.0 / lambda]).expect("positive spectrum");
    make_standard(delta, reversal_j(3)).expect("valid modular data")
}

pub fn q_flip(q: f64) -> Twist {
    gallery("q_flip", &GalleryParams::d(2).with_q(q)).expect("q in range")
}

/// 0.5·E⊗E with E = diag(1, 0): braided and compatible, not crossing symmetric.
pub fn proj_pair_twist() -> Twist {
    let e = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
    gallery(
        "proj_pair",
        &GalleryParams::d(2)
            .with_q(0.5)
            .with_projections(e.clone(), e),
    )
    .expect("projections")
}

/// A⊗B with A = diag(1, 0.3), B = diag(0.5, 0.2); violates Yang–Baxter.
pub fn non_braided_twist() -> Twist {
    let a = ComplexMatrix::from_real_diag(&[1.0, 0.3]);
    let b = ComplexMatrix::from_real_diag(&[0.5, 0.2]);
    gallery("elem_tensor", &GalleryParams::d(2).with_a(a).with_b(b)).expect("self-adjoint factors")
}

/// F(A⊗A) on ℂ³ with A = diag(0.6, −0.8, 0.6), which commutes with J.
pub fn flip_sandwich_twist() -> Twist {
    let a = ComplexMatrix::from_real_diag(&[0.6, -0.8, 0.6]);
    gallery("flip_sandwich", &GalleryParams::d(3).with_a(a)).expect("contraction")
}

/// Basis indices (e₁, e₁, e₀, e₀) at t = 0: the KMS shift for
/// [`proj_pair_twist`] with [`two_level_h`] misses by exactly 1/2.
pub const KMS_WITNESS: [usize; 4] = [1, 1, 0, 0];

pub fn kms_witness_vectors() -> Vec<ComplexVector> {
    KMS_WITNESS
        .iter()
        .map(|&k| ComplexVector::basis(2, k))
        .collect()
}

/// Degree-2 monomials always match the reversed Tomita candidate, so the
/// non-crossing mismatch first shows at degree 3.
pub const TOMITA_WITNESS_DEGREE: usize = 3;

/// Seed whose first draws witness the n-crossing failure of [`proj_pair_twist`].
pub const LOCALITY_WITNESS_SEED: u64 = 7;

/// A compatible (twist, H) pair from the gallery.
#[derive(Clone, Debug)]
pub struct GalleryCase {
    pub name: &'static str,
    pub twist: Twist,
    pub subspace: StandardSubspace,
    /// Expected outcome of the standardness checks.
    pub standard: bool,
}

pub fn standard_cases() -> Vec<GalleryCase> {
    let h = two_level_h();
    let p = GalleryParams::d(2);
    let case = |name, twist, subspace: &StandardSubspace, standard| GalleryCase {
        name,
        twist,
        subspace: subspace.clone(),
        standard,
    };
    vec![
        case("zero", gallery("zero", &p).expect("zero"), &h, true),
        case("q_flip(0.5)", q_flip(0.5), &h, true),
        case("q_flip(-0.5)", q_flip(-0.5), &h, true),
        case("flip", gallery("flip", &p).expect("flip"), &h, true),
        case(
            "neg_flip",
            gallery("neg_flip", &p).expect("neg_flip"),
            &h,
            true,
        ),
        case(
            "identity",
            gallery("identity", &p).expect("identity"),
            &h,
            false,
        ),
        case(
            "neg_identity",
            gallery("neg_identity", &p).expect("neg_identity"),
            &h,
            false,
        ),
        case("elem_tensor", non_braided_twist(), &h, false),
        case(
            "flip_sandwich",
            flip_sandwich_twist(),
            &three_level_h(3.0),
            true,
        ),
        case("proj_pair", proj_pair_twist(), &h, false),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::FockSpace;
    use crate::modular_verify::{locality_residual, tomita_consistency};
    use crate::npoint::kms_shift_check;
    use crate::twist::compatibility_residual;

    #[test]
    fn rotated_k_is_incompatible_with_proj_pair() {
        let k = rotated_k();
        assert!(compatibility_residual(&proj_pair_twist(), &k).unwrap() > 1e-3);
        assert!(compatibility_residual(&q_flip(0.5), &k).unwrap() < 1e-12);
    }

    #[test]
    fn frozen_witnesses() {
        let h = two_level_h();
        let fs = FockSpace::build(&proj_pair_twist(), 3).unwrap();
        let r = kms_shift_check(&fs, &h, &kms_witness_vectors(), &[0.0]).unwrap();
        assert!((r.wightman - 0.5).abs() < 1e-12);
        let tr = tomita_consistency(&fs, &h, TOMITA_WITNESS_DEGREE).unwrap();
        assert!(tr.per_degree[2] < 1e-12 && tr.per_degree[3] > 1e-3);
        let loc = locality_residual(&fs, &h, 1, 1, LOCALITY_WITNESS_SEED).unwrap();
        assert!(loc.n_crossing > 1e-3);
    }
}
