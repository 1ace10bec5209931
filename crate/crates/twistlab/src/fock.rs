//! The truncated T-twisted Fock space ⊕_{n≤N} (ℂ^d)^{⊗n} / ker P_n and the
//! operators acting on it.
//!
//! Vectors are kept in ambient coordinates; two vectors are equal when their
//! difference has zero twisted norm. Operators are block maps between levels.
//! Blocks into level N+1 are dropped, so an identity involving an operator
//! only holds on input levels `n <= N - reach` (see [`FockOperator::reach`]).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::standard_subspace::{AntilinearMap, StandardSubspace};
use crate::tensor_core::{
    dim_pow, herm_eig, kron, kron_pow, leg_embed, ComplexMatrix, ComplexVector, HermEig, C64, ZERO,
};
use crate::twist::Twist;

/// Largest single-level dimension d^N accepted by [`FockSpace::build`].
pub const LEVEL_GUARD: usize = 4096;
/// Tolerance for the commutation preconditions of second quantization.
pub const COMMUTATION_TOL: f64 = 1e-9;
const STABILITY_TOL: f64 = 1e-9;

/// R_{T,n} = 1 + T_1 + T_1T_2 + … + T_1⋯T_{n−1} on (ℂ^d)^{⊗n}.
pub fn r_operator(t: &ComplexMatrix, d: usize, n: usize) -> ComplexMatrix {
    let dim = dim_pow(d, n);
    let mut sum = ComplexMatrix::identity(dim);
    let mut prod = ComplexMatrix::identity(dim);
    for k in 1..n {
        prod = prod.matmul(&leg_embed(t, k, n, d).expect("leg in range"));
        sum = &sum + &prod;
    }
    sum
}

/// R̃_{T,n} = 1 + T_{n−1} + T_{n−1}T_{n−2} + … + T_{n−1}⋯T_1 on (ℂ^d)^{⊗n}.
pub fn r_tilde_operator(t: &ComplexMatrix, d: usize, n: usize) -> ComplexMatrix {
    let dim = dim_pow(d, n);
    let mut sum = ComplexMatrix::identity(dim);
    let mut prod = ComplexMatrix::identity(dim);
    for k in (1..n).rev() {
        prod = prod.matmul(&leg_embed(t, k, n, d).expect("leg in range"));
        sum = &sum + &prod;
    }
    sum
}

/// P_0, …, P_{n_max} from P_1 = 1 and P_{n+1} = (1 ⊗ P_n) R_{n+1}.
pub fn p_recursive(t: &ComplexMatrix, d: usize, n_max: usize) -> Vec<ComplexMatrix> {
    let mut ps = vec![ComplexMatrix::identity(1)];
    if n_max == 0 {
        return ps;
    }
    ps.push(ComplexMatrix::identity(d));
    let id = ComplexMatrix::identity(d);
    for n in 1..n_max {
        let next = kron(&id, &ps[n]).matmul(&r_operator(t, d, n + 1));
        ps.push(next);
    }
    ps
}

/// Per-level data of the Fock space.
#[derive(Clone, Debug)]
pub struct Level {
    pub n: usize,
    pub p: ComplexMatrix,
    pub r: ComplexMatrix,
    pub r_tilde: ComplexMatrix,
    pub eig: HermEig,
    pub kernel_dim: usize,
    /// Orthogonal projection onto ker P_n.
    pub kernel: ComplexMatrix,
    /// Orthogonal projection onto Ran P_n.
    pub range: ComplexMatrix,
    pub p_sqrt: ComplexMatrix,
    /// Pseudo-inverse of P_n on its range.
    pub p_pinv: ComplexMatrix,
    /// Pseudo-inverse of P_n^{1/2} on its range.
    pub p_pinv_sqrt: ComplexMatrix,
}

#[derive(Clone, Debug)]
pub struct FockSpace {
    d: usize,
    n_max: usize,
    twist: Twist,
    levels: Vec<Level>,
    right_stability: f64,
}

impl FockSpace {
    pub fn build(twist: &Twist, n_max: usize) -> Result<Self> {
        let d = twist.d();
        let top = d.checked_pow(n_max as u32).unwrap_or(usize::MAX);
        if top > LEVEL_GUARD {
            return Err(Error::ResourceGuard {
                what: "d^N",
                size: top,
                limit: LEVEL_GUARD,
            });
        }
        let t = twist.matrix();
        let ps = p_recursive(t, d, n_max);
        let levels: Vec<Result<Level>> = crate::par::map_range(n_max + 1, |n| {
            let p = ps[n].clone();
            let eig = herm_eig(&p)?;
            let thr = eig.kernel_threshold();
            if eig.min() < -thr {
                return Err(Error::NegativeEigenvalue {
                    level: n,
                    value: eig.min(),
                });
            }
            let kernel_dim = eig.kernel_dim();
            let dim = p.rows();
            let kernel_cols: Vec<ComplexVector> = (0..dim)
                .filter(|&k| eig.values[k].abs() <= thr)
                .map(|k| eig.vectors.column(k))
                .collect();
            let mut kernel = ComplexMatrix::zeros(dim, dim);
            for v in &kernel_cols {
                kernel = &kernel + &v.outer(v);
            }
            let range = &ComplexMatrix::identity(dim) - &kernel;
            let keep = |x: f64| x.abs() > thr;
            let p_sqrt = eig.map(|x| if keep(x) { x.sqrt() } else { 0.0 });
            let p_pinv = eig.map(|x| if keep(x) { 1.0 / x } else { 0.0 });
            let p_pinv_sqrt = eig.map(|x| if keep(x) { 1.0 / x.sqrt() } else { 0.0 });
            let r = if n == 0 {
                ComplexMatrix::identity(1)
            } else {
                r_operator(t, d, n)
            };
            let r_tilde = if n == 0 {
                ComplexMatrix::identity(1)
            } else {
                r_tilde_operator(t, d, n)
            };
            Ok(Level {
                n,
                p,
                r,
                r_tilde,
                eig,
                kernel_dim,
                kernel,
                range,
                p_sqrt,
                p_pinv,
                p_pinv_sqrt,
            })
        });
        let levels = levels.into_iter().collect::<Result<Vec<_>>>()?;
        let mut fs = Self {
            d,
            n_max,
            twist: twist.clone(),
            levels,
            right_stability: 0.0,
        };
        fs.right_stability = fs.compute_right_stability();
        Ok(fs)
    }

    /// max_n ‖P_{n+1} (K_n ⊗ 1)‖ relative to ‖P_{n+1}‖: zero iff appending on the
    /// right maps kernels into kernels.
    fn compute_right_stability(&self) -> f64 {
        let id = ComplexMatrix::identity(self.d);
        let mut worst: f64 = 0.0;
        for n in 0..self.n_max {
            let lv = &self.levels[n];
            if lv.kernel_dim == 0 {
                continue;
            }
            let next = &self.levels[n + 1].p;
            let r = next.matmul(&kron(&lv.kernel, &id)).op_norm() / next.op_norm().max(1.0);
            worst = worst.max(r);
        }
        worst
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Truncation level N.
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn twist(&self) -> &Twist {
        &self.twist
    }

    pub fn level(&self, n: usize) -> &Level {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level_dim(&self, n: usize) -> usize {
        dim_pow(self.d, n)
    }

    pub fn right_stability_residual(&self) -> f64 {
        self.right_stability
    }

    /// ‖P_{n+1} − (P_n ⊗ 1) R̃_{n+1}‖.
    pub fn factorization_residual(&self, n: usize) -> Result<f64> {
        if n == 0 || n + 1 > self.n_max {
            return Err(Error::Truncation {
                needed: n + 1,
                available: self.n_max,
            });
        }
        let id = ComplexMatrix::identity(self.d);
        let rhs = kron(&self.levels[n].p, &id).matmul(&self.levels[n + 1].r_tilde);
        Ok((&self.levels[n + 1].p - &rhs).op_norm())
    }

    /// R̃_{T,n}.
    pub fn r_tilde(&self, n: usize) -> &ComplexMatrix {
        &self.levels[n].r_tilde
    }

    pub fn twisted_inner(&self, psi: &FockVector, phi: &FockVector) -> C64 {
        let mut acc = ZERO;
        for (n, a) in &psi.blocks {
            if let Some(b) = phi.blocks.get(n) {
                acc += a.dot(&self.levels[*n].p.mul_vec(b));
            }
        }
        acc
    }

    pub fn twisted_norm(&self, psi: &FockVector) -> f64 {
        self.twisted_inner(psi, psi).re.max(0.0).sqrt()
    }

    /// Twisted operator norm of a linear block from level n to level m:
    /// ‖P_m^{1/2} X P_n^{+1/2}‖.
    pub fn block_norm(&self, m: usize, n: usize, x: &ComplexMatrix) -> f64 {
        self.levels[m]
            .p_sqrt
            .matmul(x)
            .matmul(&self.levels[n].p_pinv_sqrt)
            .op_norm()
    }

    fn block_norm_anti(&self, m: usize, n: usize, x: &ComplexMatrix) -> f64 {
        self.levels[m]
            .p_sqrt
            .matmul(x)
            .matmul(&self.levels[n].p_pinv_sqrt.conj())
            .op_norm()
    }

    /// Largest twisted norm of `a − b` over blocks with source level ≤ `max_level`.
    pub fn operator_residual(&self, a: &FockOperator, b: &FockOperator, max_level: usize) -> f64 {
        assert_eq!(
            a.antilinear, b.antilinear,
            "comparing linear with antilinear operator"
        );
        let diff = a.sub(b);
        let mut worst: f64 = 0.0;
        for (&(m, n), x) in &diff.blocks {
            if n > max_level {
                continue;
            }
            let v = if diff.antilinear {
                self.block_norm_anti(m, n, x)
            } else {
                self.block_norm(m, n, x)
            };
            worst = worst.max(v);
        }
        worst
    }

    /// Largest twisted norm of `a − b` restricted to levels ≤ max_level.
    pub fn vector_residual(&self, a: &FockVector, b: &FockVector, max_level: usize) -> f64 {
        let diff = a.sub(b);
        diff.blocks
            .iter()
            .filter(|(n, _)| **n <= max_level)
            .map(|(n, v)| v.dot(&self.levels[*n].p.mul_vec(v)).re.max(0.0).sqrt())
            .fold(0.0, f64::max)
    }

    fn check_dim(&self, xi: &ComplexVector) -> Result<()> {
        if xi.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: xi.dim(),
            });
        }
        Ok(())
    }

    /// a*_L(ξ): Ψ_n ↦ Q_{n+1}(ξ ⊗ Ψ_n).
    pub fn create_left(&self, xi: &ComplexVector) -> Result<FockOperator> {
        self.check_dim(xi)?;
        let col = column(xi);
        let mut op = FockOperator::empty(1);
        for n in 0..self.n_max {
            let emb = kron(&col, &ComplexMatrix::identity(self.level_dim(n)));
            op.blocks
                .insert((n + 1, n), self.levels[n + 1].range.matmul(&emb));
        }
        Ok(op)
    }

    /// Twisted norm of a*_L(ξ) restricted to each source level n < N.
    pub fn creation_level_norms(&self, xi: &ComplexVector) -> Result<Vec<f64>> {
        let op = self.create_left(xi)?;
        Ok((0..self.n_max)
            .map(|n| self.block_norm(n + 1, n, &op.blocks[&(n + 1, n)]))
            .collect())
    }

    /// c_{T,n} = Σ_{k=0}^{n} ‖T‖^k; ‖a*_L(ξ) on level n‖ ≤ √c_{T,n} ‖ξ‖.
    pub fn creation_bound_constant(&self, n: usize) -> f64 {
        let norm = self.twist.norm();
        (0..=n).map(|k| norm.powi(k as i32)).sum()
    }

    /// a_L(ξ): Ψ_n ↦ Q_{n−1} a_L(ξ) R_n Ψ_n, with a_L contracting the first leg.
    pub fn annihilate_left(&self, xi: &ComplexVector) -> Result<FockOperator> {
        self.check_dim(xi)?;
        let row = column(xi).adjoint();
        let mut op = FockOperator::empty(0);
        for n in 1..=self.n_max {
            let contract = kron(&row, &ComplexMatrix::identity(self.level_dim(n - 1)));
            let blk = self.levels[n - 1]
                .range
                .matmul(&contract)
                .matmul(&self.levels[n].r);
            op.blocks.insert((n - 1, n), blk);
        }
        op.max_raise = -1;
        Ok(op)
    }

    fn check_right(&self) -> Result<()> {
        if self.right_stability > STABILITY_TOL {
            let level = (0..self.n_max)
                .find(|&n| self.levels[n].kernel_dim > 0)
                .unwrap_or(0);
            return Err(Error::KernelStability {
                level,
                residual: self.right_stability,
            });
        }
        Ok(())
    }

    /// a*_R(ξ): Ψ_n ↦ Q_{n+1}(Ψ_n ⊗ ξ).
    pub fn create_right(&self, xi: &ComplexVector) -> Result<FockOperator> {
        self.check_dim(xi)?;
        self.check_right()?;
        let col = column(xi);
        let mut op = FockOperator::empty(1);
        for n in 0..self.n_max {
            let emb = kron(&ComplexMatrix::identity(self.level_dim(n)), &col);
            op.blocks
                .insert((n + 1, n), self.levels[n + 1].range.matmul(&emb));
        }
        Ok(op)
    }

    /// a_R(ξ): Ψ_n ↦ Q_{n−1} a_R(ξ) R̃_n Ψ_n, with a_R contracting the last leg.
    pub fn annihilate_right(&self, xi: &ComplexVector) -> Result<FockOperator> {
        self.check_dim(xi)?;
        self.check_right()?;
        let row = column(xi).adjoint();
        let mut op = FockOperator::empty(0);
        for n in 1..=self.n_max {
            let contract = kron(&ComplexMatrix::identity(self.level_dim(n - 1)), &row);
            let blk = self.levels[n - 1]
                .range
                .matmul(&contract)
                .matmul(&self.levels[n].r_tilde);
            op.blocks.insert((n - 1, n), blk);
        }
        op.max_raise = -1;
        Ok(op)
    }

    /// φ(ξ) = a*(ξ) + a(ξ), or a*(ξ) + a(S_H ξ) for the Tomita variant.
    pub fn field(
        &self,
        xi: &ComplexVector,
        side: Side,
        h: Option<&StandardSubspace>,
    ) -> Result<FockOperator> {
        let ann_vec = match h {
            Some(h) => h.s(xi),
            None => xi.clone(),
        };
        let (cr, an) = match side {
            Side::Left => (self.create_left(xi)?, self.annihilate_left(&ann_vec)?),
            Side::Right => (self.create_right(xi)?, self.annihilate_right(&ann_vec)?),
        };
        Ok(cr.add(&an))
    }

    /// Γ_T(V): V^{⊗n} on level n; requires [V⊗V, T] = 0.
    pub fn second_quantize(&self, v: &ComplexMatrix) -> Result<FockOperator> {
        self.check_square(v)?;
        let t = self.twist.matrix();
        let residual = kron(v, v).commutator(t).op_norm();
        if residual > COMMUTATION_TOL * (1.0 + v.op_norm().powi(2)) {
            return Err(Error::Precondition {
                what: "[V⊗V, T] = 0",
                residual,
            });
        }
        let mut op = FockOperator::empty(0);
        op.max_raise = 0;
        for n in 0..=self.n_max {
            op.blocks.insert((n, n), kron_pow(v, n));
        }
        Ok(op)
    }

    /// Γ_T(Z) for antilinear Z; requires Z⊗Z to commute with T.
    pub fn second_quantize_anti(&self, z: &AntilinearMap) -> Result<FockOperator> {
        self.check_square(z.unitary_part())?;
        let t = self.twist.matrix();
        let zz = z.kron(z);
        let residual = (&zz.conjugate(t) - t).op_norm();
        if residual > COMMUTATION_TOL {
            return Err(Error::Precondition {
                what: "[Z⊗Z, T] = 0",
                residual,
            });
        }
        let mut op = FockOperator::empty(0);
        op.max_raise = 0;
        op.antilinear = true;
        for n in 0..=self.n_max {
            op.blocks.insert((n, n), kron_pow(z.unitary_part(), n));
        }
        Ok(op)
    }

    /// Γ^Y_T(Z) = Y Z^{⊗n} on level n; requires [F(Z⊗Z), T] = 0.
    pub fn second_quantize_reversed(&self, z: &ComplexMatrix) -> Result<FockOperator> {
        self.check_square(z)?;
        let t = self.twist.matrix();
        let fzz = ComplexMatrix::flip(self.d).matmul(&kron(z, z));
        let residual = fzz.commutator(t).op_norm();
        if residual > COMMUTATION_TOL * (1.0 + z.op_norm().powi(2)) {
            return Err(Error::Precondition {
                what: "[F(Z⊗Z), T] = 0",
                residual,
            });
        }
        let mut op = FockOperator::empty(0);
        op.max_raise = 0;
        for n in 0..=self.n_max {
            op.blocks
                .insert((n, n), reversal(self.d, n).matmul(&kron_pow(z, n)));
        }
        Ok(op)
    }

    /// Γ^Y_T(Z) for antilinear Z, e.g. Z = J_H or Z = S_H.
    pub fn second_quantize_reversed_anti(&self, z: &AntilinearMap) -> Result<FockOperator> {
        self.check_square(z.unitary_part())?;
        let t = self.twist.matrix();
        let u = z.unitary_part();
        let fuu = ComplexMatrix::flip(self.d).matmul(&kron(u, u));
        // F(Z⊗Z) T = T F(Z⊗Z)  ⇔  F(U⊗U) conj(T) = T F(U⊗U)
        let residual = (&fuu.matmul(&t.conj()) - &t.matmul(&fuu)).op_norm();
        if residual > COMMUTATION_TOL * (1.0 + u.op_norm().powi(2)) {
            return Err(Error::Precondition {
                what: "[F(Z⊗Z), T] = 0",
                residual,
            });
        }
        Ok(self.reversed_anti_blocks(z))
    }

    /// Levelwise Y Z^{⊗n} without the commutation precondition; this is the
    /// candidate Tomita operator even when it fails to descend to the quotient.
    pub fn reversed_anti_blocks(&self, z: &AntilinearMap) -> FockOperator {
        let mut op = FockOperator::empty(0);
        op.max_raise = 0;
        op.antilinear = true;
        for n in 0..=self.n_max {
            op.blocks.insert(
                (n, n),
                reversal(self.d, n).matmul(&kron_pow(z.unitary_part(), n)),
            );
        }
        op
    }

    fn check_square(&self, v: &ComplexMatrix) -> Result<()> {
        if v.rows() != self.d || v.cols() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: v.rows(),
            });
        }
        Ok(())
    }

    /// Twisted adjoint X^⋆ = P⁺ X* P blockwise, for linear X.
    pub fn twisted_adjoint(&self, x: &FockOperator) -> FockOperator {
        assert!(!x.antilinear, "twisted_adjoint expects a linear operator");
        let mut op = FockOperator::empty(0);
        let mut max_raise = i64::MIN;
        for (&(m, n), blk) in &x.blocks {
            let adj = self.levels[n]
                .p_pinv
                .matmul(&blk.adjoint())
                .matmul(&self.levels[m].p);
            op.blocks.insert((n, m), adj);
            max_raise = max_raise.max(n as i64 - m as i64);
        }
        op.max_raise = if x.blocks.is_empty() { 0 } else { max_raise };
        op.reach = op.max_raise.max(0) as usize;
        op
    }

    /// Checks the four relative-commutation identities and the vacuum
    /// identity for the plain fields; levels n ≤ N − 2.
    pub fn mixed_commutators(
        &self,
        xi: &ComplexVector,
        eta: &ComplexVector,
    ) -> Result<MixedCommutatorReport> {
        if self.n_max < 2 {
            return Err(Error::Truncation {
                needed: 2,
                available: self.n_max,
            });
        }
        let safe = self.n_max - 2;
        let cl = self.create_left(xi)?;
        let cr = self.create_right(eta)?;
        let al = self.annihilate_left(xi)?;
        let ar = self.annihilate_right(eta)?;
        let zero = FockOperator::empty(0);

        let cc = cl.compose(&cr).sub(&cr.compose(&cl));
        let creation = self.operator_residual(&cc, &zero, safe);
        let aa = al.compose(&ar).sub(&ar.compose(&al));
        let annihilation = self.operator_residual(&aa, &zero, safe);

        let d = self.d;
        let t = self.twist.matrix();
        // [a_L(ξ), a*_R(η)] against Q_n a_L(ξ) T_1⋯T_n (· ⊗ η)
        let ar_eta = self.create_right(eta)?;
        let lhs3 = al.compose(&ar_eta).sub(&ar_eta.compose(&al));
        let mut rhs3 = FockOperator::empty(0);
        let xi_row = column(xi).adjoint();
        let eta_col = column(eta);
        for n in 0..self.n_max {
            let legs = n + 1;
            let mut prod = ComplexMatrix::identity(dim_pow(d, legs));
            for k in 1..=n {
                prod = prod.matmul(&leg_embed(t, k, legs, d)?);
            }
            let append = kron(&ComplexMatrix::identity(dim_pow(d, n)), &eta_col);
            let contract = kron(&xi_row, &ComplexMatrix::identity(dim_pow(d, n)));
            rhs3.blocks.insert(
                (n, n),
                self.levels[n]
                    .range
                    .matmul(&contract)
                    .matmul(&prod)
                    .matmul(&append),
            );
        }
        let left_right = self.operator_residual(&lhs3, &rhs3, safe);

        // [a_R(ξ), a*_L(η)] against Q_n a_R(ξ) T_n⋯T_1 (η ⊗ ·)
        let ar_xi = self.annihilate_right(xi)?;
        let cl_eta = self.create_left(eta)?;
        let lhs4 = ar_xi.compose(&cl_eta).sub(&cl_eta.compose(&ar_xi));
        let mut rhs4 = FockOperator::empty(0);
        for n in 0..self.n_max {
            let legs = n + 1;
            let mut prod = ComplexMatrix::identity(dim_pow(d, legs));
            for k in (1..=n).rev() {
                prod = prod.matmul(&leg_embed(t, k, legs, d)?);
            }
            let prepend = kron(&eta_col, &ComplexMatrix::identity(dim_pow(d, n)));
            let contract = kron(&ComplexMatrix::identity(dim_pow(d, n)), &xi_row);
            rhs4.blocks.insert(
                (n, n),
                self.levels[n]
                    .range
                    .matmul(&contract)
                    .matmul(&prod)
                    .matmul(&prepend),
            );
        }
        let right_left = self.operator_residual(&lhs4, &rhs4, safe);

        let pl = self.field(xi, Side::Left, None)?;
        let pr = self.field(eta, Side::Right, None)?;
        let comm = pl.compose(&pr).sub(&pr.compose(&pl));
        let out = comm.apply(&FockVector::vacuum());
        let expect = FockVector::vacuum().scale(C64::new(0.0, 2.0 * xi.dot(eta).im));
        let vacuum = self.vector_residual(&out, &expect, self.n_max);

        Ok(MixedCommutatorReport {
            creation,
            annihilation,
            left_right,
            right_left,
            vacuum,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedCommutatorReport {
    /// ‖[a*_L(ξ), a*_R(η)]‖.
    pub creation: f64,
    /// ‖[a_L(ξ), a_R(η)]‖.
    pub annihilation: f64,
    /// [a_L(ξ), a*_R(η)] against its T-insertion form.
    pub left_right: f64,
    /// [a_R(ξ), a*_L(η)] against its T-insertion form.
    pub right_left: f64,
    /// [φ_L(ξ), φ_R(η)]Ω against 2i Im⟨ξ,η⟩ Ω.
    pub vacuum: f64,
}

impl MixedCommutatorReport {
    pub fn max(&self) -> f64 {
        [
            self.creation,
            self.annihilation,
            self.left_right,
            self.right_left,
            self.vacuum,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn column(v: &ComplexVector) -> ComplexMatrix {
    ComplexMatrix::from_fn(v.dim(), 1, |i, _| v[i])
}

/// Y on (ℂ^d)^{⊗n}: reverses the order of tensor legs.
pub fn reversal(d: usize, n: usize) -> ComplexMatrix {
    let dim = dim_pow(d, n);
    let perm: Vec<usize> = (0..dim)
        .map(|idx| {
            let mut digits = Vec::with_capacity(n);
            let mut x = idx;
            for _ in 0..n {
                digits.push(x % d);
                x /= d;
            }
            // digits holds legs from last to first; reading them in order reverses
            digits.iter().fold(0, |acc, &g| acc * d + g)
        })
        .collect();
    ComplexMatrix::permutation(&perm)
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct FockVector {
    blocks: BTreeMap<usize, ComplexVector>,
}

impl FockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Ω = 1 ⊕ 0 ⊕ 0 ⊕ ….
    pub fn vacuum() -> Self {
        Self::single(0, ComplexVector::from_real(&[1.0]))
    }

    pub fn single(level: usize, v: ComplexVector) -> Self {
        let mut blocks = BTreeMap::new();
        blocks.insert(level, v);
        Self { blocks }
    }

    pub fn level(&self, n: usize) -> Option<&ComplexVector> {
        self.blocks.get(&n)
    }

    pub fn blocks(&self) -> &BTreeMap<usize, ComplexVector> {
        &self.blocks
    }

    pub fn set_level(&mut self, n: usize, v: ComplexVector) {
        self.blocks.insert(n, v);
    }

    pub fn max_level(&self) -> usize {
        self.blocks.keys().next_back().copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (n, v) in &other.blocks {
            let e = out
                .blocks
                .entry(*n)
                .or_insert_with(|| ComplexVector::zeros(v.dim()));
            *e = &*e + v;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            blocks: self.blocks.iter().map(|(n, v)| (*n, v.scale(s))).collect(),
        }
    }

    /// ⟨Ω, Ψ⟩ (equal to the twisted pairing since P_0 = 1).
    pub fn vacuum_component(&self) -> C64 {
        self.blocks.get(&0).map_or(ZERO, |v| v[0])
    }
}

/// A (possibly antilinear) operator given by blocks `(target, source)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    blocks: BTreeMap<(usize, usize), ComplexMatrix>,
    antilinear: bool,
    max_raise: i64,
    reach: usize,
}

impl FockOperator {
    fn empty(raise: i64) -> Self {
        Self {
            blocks: BTreeMap::new(),
            antilinear: false,
            max_raise: raise,
            reach: raise.max(0) as usize,
        }
    }

    /// Identity on levels 0..=n_max.
    pub fn identity(fs: &FockSpace) -> Self {
        let mut op = Self::empty(0);
        for n in 0..=fs.n_max {
            op.blocks
                .insert((n, n), ComplexMatrix::identity(fs.level_dim(n)));
        }
        op
    }

    /// Block-diagonal operator from per-level matrices.
    pub fn diagonal(mats: Vec<ComplexMatrix>) -> Self {
        let mut op = Self::empty(0);
        for (n, m) in mats.into_iter().enumerate() {
            op.blocks.insert((n, n), m);
        }
        op
    }

    pub fn blocks(&self) -> &BTreeMap<(usize, usize), ComplexMatrix> {
        &self.blocks
    }

    pub fn block(&self, m: usize, n: usize) -> Option<&ComplexMatrix> {
        self.blocks.get(&(m, n))
    }

    pub fn is_antilinear(&self) -> bool {
        self.antilinear
    }

    /// Largest m − n over the blocks.
    pub fn creation_degree(&self) -> i64 {
        self.max_raise
    }

    /// Largest level increase along the factors of a product; identities
    /// hold on source levels n ≤ N − reach.
    pub fn reach(&self) -> usize {
        self.reach
    }

    /// Highest source level on which this operator is free of truncation effects.
    pub fn safe_level(&self, fs: &FockSpace) -> Option<usize> {
        fs.n_max.checked_sub(self.reach)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(
            self.antilinear, other.antilinear,
            "adding linear and antilinear operators"
        );
        let mut out = self.clone();
        for (k, m) in &other.blocks {
            match out.blocks.get_mut(k) {
                Some(e) => *e = &*e + m,
                None => {
                    out.blocks.insert(*k, m.clone());
                }
            }
        }
        out.max_raise = self.max_raise.max(other.max_raise);
        out.reach = self.reach.max(other.reach);
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        for m in out.blocks.values_mut() {
            *m = m.scale(s);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// `self ∘ other` (other acts first). An antilinear left factor
    /// conjugates the blocks of the right factor.
    pub fn compose(&self, other: &Self) -> Self {
        let mut blocks: BTreeMap<(usize, usize), ComplexMatrix> = BTreeMap::new();
        for (&(k, n), b) in &other.blocks {
            for (&(m, k2), a) in &self.blocks {
                if k2 != k {
                    continue;
                }
                let prod = if self.antilinear {
                    a.matmul(&b.conj())
                } else {
                    a.matmul(b)
                };
                match blocks.get_mut(&(m, n)) {
                    Some(e) => *e = &*e + &prod,
                    None => {
                        blocks.insert((m, n), prod);
                    }
                }
            }
        }
        let max_raise = self.max_raise + other.max_raise;
        let reach = other
            .reach
            .max((other.max_raise + self.reach as i64).max(0) as usize);
        Self {
            blocks,
            antilinear: self.antilinear != other.antilinear,
            max_raise,
            reach,
        }
    }

    pub fn apply(&self, psi: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        for (&(m, n), blk) in &self.blocks {
            if let Some(v) = psi.blocks.get(&n) {
                let w = if self.antilinear {
                    blk.mul_vec(&v.conj())
                } else {
                    blk.mul_vec(v)
                };
                let e = out
                    .blocks
                    .entry(m)
                    .or_insert_with(|| ComplexVector::zeros(w.dim()));
                *e = &*e + &w;
            }
        }
        out
    }
}
