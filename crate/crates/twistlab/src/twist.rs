//! Twists on ℂ^d ⊗ ℂ^d: construction, classification and the relations a twist
//! can satisfy relative to a standard subspace.

use crate::error::{Error, Result};
use crate::fock::p_recursive;
use crate::sample;
use crate::standard_subspace::{AntilinearMap, StandardSubspace};
use crate::tensor_core::{
    c, dim_pow, herm_eig, kron, leg_embed, ComplexMatrix, ComplexVector, C64, SELFADJOINT_TOL,
};

/// Largest ambient dimension d^{n_max} accepted by [`classify`].
pub const CLASSIFY_GUARD: usize = 20_000;
/// Largest d^{n+1} accepted by [`n_crossing_residual`].
pub const N_CROSSING_GUARD: usize = 4096;
const NORM_TOL: f64 = 1e-10;
/// Residual below which a relation is reported as holding.
pub const RELATION_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Twist {
    d: usize,
    matrix: ComplexMatrix,
    selfadjoint_residual: f64,
    norm: f64,
    ybe_residual: f64,
    min_eigenvalue: f64,
}

impl Twist {
    /// Validates self-adjointness and ‖T‖ ≤ 1; positivity of the P_n is a
    /// separate question answered by [`classify`].
    pub fn new(matrix: ComplexMatrix, d: usize) -> Result<Self> {
        if matrix.rows() != d * d || matrix.cols() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: matrix.rows(),
            });
        }
        let eig = herm_eig(&matrix)?;
        let selfadjoint_residual = matrix.selfadjoint_residual();
        let norm = eig.values.iter().map(|x| x.abs()).fold(0.0, f64::max);
        if norm > 1.0 + NORM_TOL {
            return Err(Error::NormTooLarge { norm });
        }
        let ybe_residual = ybe_of(&matrix, d);
        Ok(Self {
            d,
            matrix,
            selfadjoint_residual,
            norm,
            ybe_residual,
            min_eigenvalue: eig.min(),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn selfadjoint_residual(&self) -> f64 {
        self.selfadjoint_residual
    }

    pub fn ybe_residual(&self) -> f64 {
        self.ybe_residual
    }

    pub fn is_braided(&self) -> bool {
        self.ybe_residual <= RELATION_TOL
    }

    /// T_k on n legs.
    pub fn leg(&self, k: usize, n: usize) -> ComplexMatrix {
        leg_embed(&self.matrix, k, n, self.d).expect("leg index checked by caller")
    }
}

fn ybe_of(t: &ComplexMatrix, d: usize) -> f64 {
    let t1 = leg_embed(t, 1, 3, d).expect("d^2 twist");
    let t2 = leg_embed(t, 2, 3, d).expect("d^2 twist");
    let lhs = t1.matmul(&t2).matmul(&t1);
    let rhs = t2.matmul(&t1).matmul(&t2);
    (&lhs - &rhs).op_norm()
}

/// ‖T₁T₂T₁ − T₂T₁T₂‖ on (ℂ^d)^{⊗3}.
pub fn ybe_residual(t: &Twist) -> f64 {
    t.ybe_residual
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Strict,
    NonStrict,
    NotTwistUpToCutoff,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Strict => "strict",
            Verdict::NonStrict => "nonstrict",
            Verdict::NotTwistUpToCutoff => "not_twist_up_to_cutoff",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelPositivity {
    pub n: usize,
    pub min_eigenvalue: f64,
    pub kernel_dim: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PositivityReport {
    pub levels: Vec<LevelPositivity>,
    pub verdict: Verdict,
    pub n_max: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassTag {
    /// ‖T‖ ≤ 1/2.
    SmallNorm,
    /// T ≥ 0.
    Positive,
    /// ‖T‖ ≤ 1 and the braid relation holds.
    Braided,
    /// Braided with ‖T‖ < 1.
    BraidedStrict,
}

impl ClassTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassTag::SmallNorm => "norm_le_half",
            ClassTag::Positive => "positive",
            ClassTag::Braided => "braided",
            ClassTag::BraidedStrict => "braided_norm_lt_one",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub report: PositivityReport,
    pub tags: Vec<ClassTag>,
}

/// Positivity of P_{T,n} for n = 1..=n_max, plus the sufficient-condition tags.
pub fn classify(t: &Twist, n_max: usize) -> Result<Classification> {
    if n_max < 2 {
        return Err(Error::InvalidParams("classify needs n_max >= 2".into()));
    }
    let ambient = t.d.checked_pow(n_max as u32).unwrap_or(usize::MAX);
    if ambient > CLASSIFY_GUARD {
        return Err(Error::ResourceGuard {
            what: "d^n_max",
            size: ambient,
            limit: CLASSIFY_GUARD,
        });
    }
    let ps = p_recursive(&t.matrix, t.d, n_max);
    let eigs = crate::par::map_range(n_max, |i| herm_eig(&ps[i + 1]));
    let mut levels = Vec::with_capacity(n_max);
    let mut verdict = Verdict::Strict;
    for (i, eig) in eigs.into_iter().enumerate() {
        let eig = eig?;
        let thr = eig.kernel_threshold();
        let min = eig.min();
        if min < -thr {
            verdict = Verdict::NotTwistUpToCutoff;
        } else if eig.kernel_dim() > 0 && verdict == Verdict::Strict {
            verdict = Verdict::NonStrict;
        }
        levels.push(LevelPositivity {
            n: i + 1,
            min_eigenvalue: min,
            kernel_dim: eig.kernel_dim(),
        });
    }
    let mut tags = Vec::new();
    if t.norm <= 0.5 + NORM_TOL {
        tags.push(ClassTag::SmallNorm);
    }
    if t.min_eigenvalue >= -SELFADJOINT_TOL {
        tags.push(ClassTag::Positive);
    }
    if t.is_braided() {
        tags.push(ClassTag::Braided);
        if t.norm < 1.0 - NORM_TOL {
            tags.push(ClassTag::BraidedStrict);
        }
    }
    Ok(Classification {
        report: PositivityReport {
            levels,
            verdict,
            n_max,
        },
        tags,
    })
}

fn check_dims(t: &Twist, h: &StandardSubspace) -> Result<()> {
    if t.d != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.d,
            found: h.dim(),
        });
    }
    Ok(())
}

/// ‖[Δ⊗Δ, T]‖.
pub fn compatibility_residual(t: &Twist, h: &StandardSubspace) -> Result<f64> {
    check_dims(t, h)?;
    let dm = h.delta().matrix();
    Ok(kron(&dm, &dm).commutator(&t.matrix).op_norm())
}

/// Default crossing grid: 16 points evenly spread over [−2, 2] plus t = 0.
pub fn default_t_grid() -> Vec<f64> {
    let mut ts: Vec<f64> = (0..16).map(|k| -2.0 + 4.0 * k as f64 / 15.0).collect();
    ts.push(0.0);
    ts
}

/// Both sides of the crossing boundary identity at time t, as d²×d² arrays
/// indexed `[(a,b),(c,d)]`.
pub fn crossing_sides(
    t: &Twist,
    h: &StandardSubspace,
    time: f64,
) -> (ComplexMatrix, ComplexMatrix) {
    let d = t.d;
    let id = ComplexMatrix::identity(d);
    // Δ^{it}Δ^{−1/2} = Δ^{it − 1/2} and Δ^{1/2}Δ^{−it} = Δ^{1/2 − it}
    let left = h.delta().power(c(-0.5, time));
    let right = h.delta().power(c(0.5, -time));
    let lhs = kron(&left, &id)
        .matmul(&t.matrix)
        .matmul(&kron(&id, &right));
    let uit = h.modular_group(time);
    let umit = h.modular_group(-time);
    let m = kron(&id, &uit).matmul(&t.matrix).matmul(&kron(&umit, &id));
    let uj = h.j().unitary_part();
    let w = kron(&id, uj).adjoint().matmul(&m).matmul(&kron(uj, &id));
    let rhs = ComplexMatrix::from_fn(d * d, d * d, |row, col| {
        let (a, b) = (row / d, row % d);
        let (cc, dd) = (col / d, col % d);
        w[(b * d + dd, a * d + cc)]
    });
    (lhs, rhs)
}

/// Max over the t grid and all basis entries of |LHS − RHS|.
pub fn crossing_residual(t: &Twist, h: &StandardSubspace, t_samples: &[f64]) -> Result<f64> {
    check_dims(t, h)?;
    let vals = crate::par::map(t_samples, |&time| {
        let (l, r) = crossing_sides(t, h, time);
        (&l - &r).max_abs()
    });
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// ‖FTF − (J⊗J) T (J⊗J)‖.
pub fn j_flip_residual(t: &Twist, h: &StandardSubspace) -> Result<f64> {
    check_dims(t, h)?;
    let f = ComplexMatrix::flip(t.d);
    let ftf = f.matmul(&t.matrix).matmul(&f);
    let jj = h.j().kron(h.j());
    Ok((&ftf - &jj.conjugate(&t.matrix)).op_norm())
}

/// ‖(1+T)(1−F)‖.
pub fn left_right_obstruction(t: &Twist) -> f64 {
    let n = t.d * t.d;
    let id = ComplexMatrix::identity(n);
    let f = ComplexMatrix::flip(t.d);
    (&id + &t.matrix).matmul(&(&id - &f)).op_norm()
}

/// T(z) = (Δ^{iz} ⊗ 1) T (1 ⊗ Δ^{−iz}).
pub fn continued_twist(t: &Twist, h: &StandardSubspace, z: C64) -> ComplexMatrix {
    let id = ComplexMatrix::identity(t.d);
    let iz = z * crate::tensor_core::I;
    kron(&h.delta().power(iz), &id)
        .matmul(&t.matrix)
        .matmul(&kron(&id, &h.delta().power(-iz)))
}

/// Both sides of the n-crossing relation for given vectors at time t:
/// `⟨ξ⊗Ψ, T(t+i/2)_1⋯T(t+i/2)_n (Φ⊗ξ')⟩` and
/// `⟨Ψ⊗Jξ', T(t)_n*⋯T(t)_1* (Jξ⊗Φ)⟩`.
#[allow(clippy::too_many_arguments)]
pub fn n_crossing_sides(
    t: &Twist,
    h: &StandardSubspace,
    n: usize,
    time: f64,
    xi: &ComplexVector,
    psi: &ComplexVector,
    phi: &ComplexVector,
    xi_p: &ComplexVector,
) -> (C64, C64) {
    let d = t.d;
    let legs = n + 1;
    let tz = continued_twist(t, h, c(time, 0.5));
    let tt = continued_twist(t, h, c(time, 0.0)).adjoint();
    let mut prod_direct = ComplexMatrix::identity(dim_pow(d, legs));
    for k in 1..=n {
        prod_direct = prod_direct.matmul(&leg_embed(&tz, k, legs, d).expect("leg in range"));
    }
    let mut prod_cross = ComplexMatrix::identity(dim_pow(d, legs));
    for k in (1..=n).rev() {
        prod_cross = prod_cross.matmul(&leg_embed(&tt, k, legs, d).expect("leg in range"));
    }
    let direct = xi.kron(psi).dot(&prod_direct.mul_vec(&phi.kron(xi_p)));
    let j = h.j();
    let cross = psi
        .kron(&j.apply(xi_p))
        .dot(&prod_cross.mul_vec(&j.apply(xi).kron(phi)));
    (direct, cross)
}

/// Max deviation between the two sides of the n-crossing relation over
/// `draws` seeded random vector sets and the given t samples.
pub fn n_crossing_residual(
    t: &Twist,
    h: &StandardSubspace,
    n: usize,
    t_samples: &[f64],
    draws: usize,
    seed: u64,
) -> Result<f64> {
    check_dims(t, h)?;
    if n == 0 {
        return Err(Error::InvalidParams("n_crossing needs n >= 1".into()));
    }
    let size = t.d.checked_pow(n as u32 + 1).unwrap_or(usize::MAX);
    if size > N_CROSSING_GUARD {
        return Err(Error::ResourceGuard {
            what: "d^(n+1)",
            size,
            limit: N_CROSSING_GUARD,
        });
    }
    let d = t.d;
    let mut rng = sample::rng(seed);
    let mut draws_v = Vec::with_capacity(draws);
    for _ in 0..draws {
        let xi = sample::vector(&mut rng, d);
        let psi = sample::vector(&mut rng, dim_pow(d, n));
        let phi = sample::vector(&mut rng, dim_pow(d, n));
        let xi_p = sample::vector(&mut rng, d);
        draws_v.push((xi, psi, phi, xi_p));
    }
    let mut worst: f64 = 0.0;
    for &time in t_samples {
        let devs = crate::par::map(&draws_v, |(xi, psi, phi, xi_p)| {
            let (a, b) = n_crossing_sides(t, h, n, time, xi, psi, phi, xi_p);
            (a - b).norm()
        });
        worst = devs.into_iter().fold(worst, f64::max);
    }
    Ok(worst)
}

/// Parameters for [`gallery`]. Unused fields are ignored by members that do
/// not need them.
#[derive(Clone, Debug, Default)]
pub struct GalleryParams {
    pub d: usize,
    pub q: Option<f64>,
    pub a: Option<ComplexMatrix>,
    pub b: Option<ComplexMatrix>,
    pub e: Option<ComplexMatrix>,
    pub e_tilde: Option<ComplexMatrix>,
}

impl GalleryParams {
    pub fn d(d: usize) -> Self {
        Self {
            d,
            ..Self::default()
        }
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = Some(q);
        self
    }

    pub fn with_a(mut self, a: ComplexMatrix) -> Self {
        self.a = Some(a);
        self
    }

    pub fn with_b(mut self, b: ComplexMatrix) -> Self {
        self.b = Some(b);
        self
    }

    pub fn with_projections(mut self, e: ComplexMatrix, e_tilde: ComplexMatrix) -> Self {
        self.e = Some(e);
        self.e_tilde = Some(e_tilde);
        self
    }
}

pub const GALLERY_NAMES: [&str; 9] = [
    "zero",
    "flip",
    "neg_flip",
    "q_flip",
    "identity",
    "neg_identity",
    "elem_tensor",
    "flip_sandwich",
    "proj_pair",
];

fn need_q(p: &GalleryParams) -> Result<f64> {
    let q =
        p.q.ok_or_else(|| Error::InvalidParams("missing q".into()))?;
    if !(-1.0..=1.0).contains(&q) {
        return Err(Error::InvalidParams(format!("q = {q} outside [-1, 1]")));
    }
    Ok(q)
}

fn need_matrix<'a>(
    m: &'a Option<ComplexMatrix>,
    name: &str,
    d: usize,
) -> Result<&'a ComplexMatrix> {
    let m = m
        .as_ref()
        .ok_or_else(|| Error::InvalidParams(format!("missing {name}")))?;
    if m.rows() != d || m.cols() != d {
        return Err(Error::InvalidParams(format!("{name} must be {d}x{d}")));
    }
    if !m.is_selfadjoint() {
        return Err(Error::InvalidParams(format!("{name} must be self-adjoint")));
    }
    Ok(m)
}

fn is_projection(e: &ComplexMatrix) -> bool {
    (&e.matmul(e) - e).max_abs() <= 1e-10
}

pub fn gallery(name: &str, p: &GalleryParams) -> Result<Twist> {
    let d = p.d;
    if d == 0 {
        return Err(Error::InvalidParams("d must be positive".into()));
    }
    let n = d * d;
    let f = ComplexMatrix::flip(d);
    let m = match name {
        "zero" => ComplexMatrix::zeros(n, n),
        "flip" => f,
        "neg_flip" => f.scale_real(-1.0),
        "q_flip" => f.scale_real(need_q(p)?),
        "identity" => ComplexMatrix::identity(n),
        "neg_identity" => ComplexMatrix::identity(n).scale_real(-1.0),
        "elem_tensor" => {
            let a = need_matrix(&p.a, "a", d)?;
            let b = need_matrix(&p.b, "b", d)?;
            kron(a, b)
        }
        "flip_sandwich" => {
            let a = need_matrix(&p.a, "a", d)?;
            if a.op_norm() > 1.0 + NORM_TOL {
                return Err(Error::InvalidParams(
                    "flip_sandwich needs ||A|| <= 1".into(),
                ));
            }
            f.matmul(&kron(a, a))
        }
        "proj_pair" => {
            let q = need_q(p)?;
            let e = need_matrix(&p.e, "e", d)?;
            let et = need_matrix(&p.e_tilde, "e_tilde", d)?;
            if !is_projection(e) || !is_projection(et) {
                return Err(Error::InvalidParams(
                    "e and e_tilde must be orthogonal projections".into(),
                ));
            }
            if e.commutator(et).max_abs() > 1e-10 {
                return Err(Error::InvalidParams("e and e_tilde must commute".into()));
            }
            kron(e, et).scale_real(q)
        }
        other => return Err(Error::UnknownGallery(other.to_string())),
    };
    Twist::new(m, d)
}

/// The standard J used with the gallery fixtures: basis reversal ∘ conj.
pub fn reversal_j(d: usize) -> AntilinearMap {
    AntilinearMap::swap_conjugation(d)
}
