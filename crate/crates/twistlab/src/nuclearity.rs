//! L²-nuclearity arithmetic: the one-particle index ‖Δ_H^{1/4}Δ_K^{−1/4}‖₁
//! and its twisted second-quantized counterpart level by level.

use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::standard_subspace::StandardSubspace;
use crate::tensor_core::{c, kron_pow, trace_norm, ComplexMatrix};
use crate::twist::{compatibility_residual, Twist};

/// Compatibility gate for [`fock_l2_check`].
pub const COMPATIBILITY_TOL: f64 = 1e-9;

fn check_pair(h: &StandardSubspace, k: &StandardSubspace) -> Result<()> {
    if h.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: k.dim(),
        });
    }
    Ok(())
}

/// Δ_H^{1/4} Δ_K^{−1/4}.
pub fn one_particle_operator(h: &StandardSubspace, k: &StandardSubspace) -> Result<ComplexMatrix> {
    check_pair(h, k)?;
    Ok(h.delta()
        .power(c(0.25, 0.0))
        .matmul(&k.delta().power(c(-0.25, 0.0))))
}

pub fn l2_index(h: &StandardSubspace, k: &StandardSubspace) -> Result<f64> {
    Ok(trace_norm(&one_particle_operator(h, k)?))
}

/// The index with Δ_K replaced by Δ_K^s, for each s.
pub fn l2_index_curve(
    h: &StandardSubspace,
    k: &StandardSubspace,
    exponents: &[f64],
) -> Result<Vec<(f64, f64)>> {
    check_pair(h, k)?;
    let h_part = h.delta().power(c(0.25, 0.0));
    Ok(exponents
        .iter()
        .map(|&s| {
            (
                s,
                trace_norm(&h_part.matmul(&k.delta().power(c(-0.25 * s, 0.0)))),
            )
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct NuclearityReport {
    pub one_particle_index: f64,
    /// τ_n for n = 0..=N.
    pub tau: Vec<f64>,
    pub truncated_sum: f64,
    /// Σ_{n≤N} xⁿ.
    pub geometric_sum: f64,
    /// max_n |τ_n − xⁿ|.
    pub deviation: f64,
    /// 1/(1−x) when x < 1.
    pub bound: Option<f64>,
}

/// τ_n = ‖P_n^{1/2} X^{⊗n} P_n^{−1/2}‖₁ computed from singular values,
/// without using that P_n commutes with X^{⊗n}.
pub fn fock_l2_check(
    t: &Twist,
    h: &StandardSubspace,
    k: &StandardSubspace,
    n_max: usize,
) -> Result<NuclearityReport> {
    check_pair(h, k)?;
    if t.norm() >= 1.0 {
        return Err(Error::NormTooLarge { norm: t.norm() });
    }
    for sub in [h, k] {
        let residual = compatibility_residual(t, sub)?;
        let scale = 1.0 + sub.delta().matrix().op_norm().powi(2);
        if residual > COMPATIBILITY_TOL * scale {
            return Err(Error::Precondition {
                what: "[Δ⊗Δ, T] = 0 for both subspaces",
                residual,
            });
        }
    }
    let x = one_particle_operator(h, k)?;
    let index = trace_norm(&x);
    let fs = FockSpace::build(t, n_max)?;
    let tau = crate::par::map_range(n_max + 1, |n| {
        let lv = fs.level(n);
        trace_norm(&lv.p_sqrt.matmul(&kron_pow(&x, n)).matmul(&lv.p_pinv_sqrt))
    });
    let truncated_sum = tau.iter().sum();
    let geometric_sum = (0..=n_max).map(|n| index.powi(n as i32)).sum();
    let deviation = tau
        .iter()
        .enumerate()
        .map(|(n, &v)| (v - index.powi(n as i32)).abs())
        .fold(0.0, f64::max);
    let bound = (index < 1.0).then(|| 1.0 / (1.0 - index));
    Ok(NuclearityReport {
        one_particle_index: index,
        tau,
        truncated_sum,
        geometric_sum,
        deviation,
        bound,
    })
}

/// max over n + m ≤ N of |τ_n τ_m − τ_{n+m}|.
pub fn multiplicativity_residual(report: &NuclearityReport) -> f64 {
    let tau = &report.tau;
    let top = tau.len() - 1;
    let mut worst: f64 = 0.0;
    for n in 0..=top {
        for m in 0..=top - n {
            worst = worst.max((tau[n] * tau[m] - tau[n + m]).abs());
        }
    }
    worst
}
