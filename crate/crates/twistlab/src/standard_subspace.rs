//! Finite-dimensional standard subspaces given by modular data (Δ, J).
//!
//! An antilinear map is stored as its unitary part `U` and acts as
//! `v ↦ U · conj(v)`. The composition rules live on [`AntilinearMap`] and
//! every other module routes antiunitary conjugations through them.

use crate::error::{Error, Result};
use crate::tensor_core::{c, dim_pow, kron, ComplexMatrix, ComplexVector, PositiveSpectral, I};

const INVOLUTION_TOL: f64 = 1e-9;
const MODULAR_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct AntilinearMap {
    unitary_part: ComplexMatrix,
}

impl AntilinearMap {
    pub fn new(unitary_part: ComplexMatrix) -> Result<Self> {
        if !unitary_part.is_square() {
            return Err(Error::DimensionMismatch {
                expected: unitary_part.rows(),
                found: unitary_part.cols(),
            });
        }
        Ok(Self { unitary_part })
    }

    /// Entrywise complex conjugation on ℂ^d.
    pub fn conjugation(d: usize) -> Self {
        Self {
            unitary_part: ComplexMatrix::identity(d),
        }
    }

    /// Conjugation followed by the basis reversal e_k ↦ e_{d−1−k}.
    pub fn swap_conjugation(d: usize) -> Self {
        let perm: Vec<usize> = (0..d).rev().collect();
        Self {
            unitary_part: ComplexMatrix::permutation(&perm),
        }
    }

    pub fn dim(&self) -> usize {
        self.unitary_part.rows()
    }

    pub fn unitary_part(&self) -> &ComplexMatrix {
        &self.unitary_part
    }

    pub fn apply(&self, v: &ComplexVector) -> ComplexVector {
        self.unitary_part.mul_vec(&v.conj())
    }

    /// `self ∘ other` for antilinear `other`; the result is linear: `U₁ · conj(U₂)`.
    pub fn compose_anti(&self, other: &Self) -> ComplexMatrix {
        self.unitary_part.matmul(&other.unitary_part.conj())
    }

    /// `self ∘ M` for linear M: antilinear with unitary part `U · conj(M)`.
    pub fn then_after(&self, m: &ComplexMatrix) -> Self {
        Self {
            unitary_part: self.unitary_part.matmul(&m.conj()),
        }
    }

    /// `M ∘ self` for linear M: antilinear with unitary part `M · U`.
    pub fn before(&self, m: &ComplexMatrix) -> Self {
        Self {
            unitary_part: m.matmul(&self.unitary_part),
        }
    }

    /// Adjoint in the antilinear sense, `⟨x, A y⟩ = conj⟨A* x, y⟩`: unitary part `Uᵀ`.
    pub fn adjoint(&self) -> Self {
        Self {
            unitary_part: self.unitary_part.transpose(),
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            unitary_part: kron(&self.unitary_part, &other.unitary_part),
        }
    }

    pub fn kron_pow(&self, n: usize) -> Self {
        Self {
            unitary_part: crate::tensor_core::kron_pow(&self.unitary_part, n),
        }
    }

    /// ‖A² − 1‖ = ‖U · conj(U) − 1‖.
    pub fn involution_residual(&self) -> f64 {
        (&self.compose_anti(self) - &ComplexMatrix::identity(self.dim())).op_norm()
    }

    /// `A X A⁻¹ = U · conj(X) · U⁻¹`; panics if U is singular.
    pub fn conjugate(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let inv = self
            .unitary_part
            .inverse()
            .expect("antilinear map with singular unitary part");
        self.unitary_part.matmul(&x.conj()).matmul(&inv)
    }

    /// The antilinear inverse: `(U conj)⁻¹ = conj(U⁻¹) conj`.
    pub fn inverse(&self) -> Option<Self> {
        self.unitary_part.inverse().map(|inv| Self {
            unitary_part: inv.conj(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct StandardSubspace {
    dim: usize,
    delta: PositiveSpectral,
    j: AntilinearMap,
    tomita: AntilinearMap,
    real_basis: Vec<ComplexVector>,
}

/// Builds H from (Δ, J); the Tomita operator is `S = J Δ^{1/2}`.
pub fn make_standard(delta: PositiveSpectral, j: AntilinearMap) -> Result<StandardSubspace> {
    let d = delta.dim();
    if j.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: j.dim(),
        });
    }
    let residual = j.involution_residual();
    if residual > INVOLUTION_TOL {
        return Err(Error::NotInvolution { residual });
    }
    let dm = delta.matrix();
    let dinv = delta.inverse().matrix();
    let residual = (&j.conjugate(&dm) - &dinv).op_norm();
    if residual > MODULAR_TOL * (1.0 + dm.op_norm() + dinv.op_norm()) {
        return Err(Error::ModularRelation { residual });
    }
    let tomita = j.then_after(&delta.power(c(0.5, 0.0)));
    let real_basis = fixed_space_basis(&tomita)?;
    Ok(StandardSubspace {
        dim: d,
        delta,
        j,
        tomita,
        real_basis,
    })
}

/// Real basis of `{v : S v = v}`, orthonormal for `Re⟨·,·⟩`.
fn fixed_space_basis(s: &AntilinearMap) -> Result<Vec<ComplexVector>> {
    let d = s.dim();
    let half = c(0.5, 0.0);
    let mut basis: Vec<ComplexVector> = Vec::with_capacity(d);
    for k in 0..d {
        let e = ComplexVector::basis(d, k);
        let ie = e.scale(I);
        for v in [e, ie] {
            let mut p = (&v + &s.apply(&v)).scale(half);
            for b in &basis {
                let r = b.dot(&p).re;
                p = &p - &b.scale(c(r, 0.0));
            }
            let n = p.norm();
            if n > 1e-8 {
                basis.push(p.scale(c(1.0 / n, 0.0)));
            }
        }
    }
    if basis.len() != d {
        return Err(Error::Precondition {
            what: "real dimension of fix(S) equals d",
            residual: basis.len() as f64,
        });
    }
    Ok(basis)
}

impl StandardSubspace {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn delta(&self) -> &PositiveSpectral {
        &self.delta
    }

    pub fn j(&self) -> &AntilinearMap {
        &self.j
    }

    pub fn tomita(&self) -> &AntilinearMap {
        &self.tomita
    }

    pub fn real_basis(&self) -> &[ComplexVector] {
        &self.real_basis
    }

    /// Δ^{it}.
    pub fn modular_group(&self, t: f64) -> ComplexMatrix {
        self.delta.power(c(0.0, t))
    }

    /// S v.
    pub fn s(&self, v: &ComplexVector) -> ComplexVector {
        self.tomita.apply(v)
    }

    /// ‖S v − v‖; zero iff v ∈ H.
    pub fn in_subspace(&self, v: &ComplexVector) -> f64 {
        (&self.s(v) - v).norm()
    }

    /// `S* = J Δ^{−1/2}`, which is the Tomita operator of H'.
    pub fn tomita_adjoint(&self) -> AntilinearMap {
        self.tomita.adjoint()
    }

    /// Splits v = h₁ + i h₂ with h₁, h₂ ∈ H.
    pub fn decompose(&self, v: &ComplexVector) -> (ComplexVector, ComplexVector) {
        let sv = self.s(v);
        let h1 = (v + &sv).scale(c(0.5, 0.0));
        let h2 = (v - &sv).scale(c(0.0, -0.5));
        (h1, h2)
    }
}

/// H' with `Δ_{H'} = Δ_H^{−1}` and `J_{H'} = J_H`.
pub fn symplectic_complement(h: &StandardSubspace) -> StandardSubspace {
    make_standard(h.delta.inverse(), h.j.clone()).expect("complement of a valid standard subspace")
}

#[derive(Clone, Debug)]
pub struct TensorPower {
    pub tomita: AntilinearMap,
    pub delta: PositiveSpectral,
    pub j: AntilinearMap,
}

pub fn tensor_power(h: &StandardSubspace, n: usize) -> Result<TensorPower> {
    if n == 0 {
        return Err(Error::IndexOutOfRange {
            index: 0,
            max: usize::MAX,
        });
    }
    let mut delta = h.delta.clone();
    for _ in 1..n {
        delta = delta.kron(&h.delta);
    }
    debug_assert_eq!(delta.dim(), dim_pow(h.dim, n));
    Ok(TensorPower {
        tomita: h.tomita.kron_pow(n),
        delta,
        j: h.j.kron_pow(n),
    })
}

/// Largest |Im⟨h, h'⟩| over real bases of H and H'.
pub fn symplectic_residual(h: &StandardSubspace, hp: &StandardSubspace) -> f64 {
    let mut worst: f64 = 0.0;
    for a in h.real_basis() {
        for b in hp.real_basis() {
            worst = worst.max(a.dot(b).im.abs());
        }
    }
    worst
}

/// The d=2 fixture used throughout: Δ = diag(λ, 1/λ), J = swap ∘ conj.
pub fn two_level(lambda: f64) -> Result<StandardSubspace> {
    make_standard(
        PositiveSpectral::from_diag(&[lambda, 1.0 / lambda])?,
        AntilinearMap::swap_conjugation(2),
    )
}

/// Δ = 1, J = conj: H = ℝ^d.
pub fn real_part(d: usize) -> StandardSubspace {
    make_standard(
        PositiveSpectral::from_diag(&vec![1.0; d]).expect("identity spectrum"),
        AntilinearMap::conjugation(d),
    )
    .expect("real subspace")
}
