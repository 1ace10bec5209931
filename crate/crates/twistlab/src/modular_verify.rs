//! Standardness checks at a truncation: cyclicity of Ω, the Tomita operator
//! on the monomial span, locality of left against right fields, modular
//! covariance and the duality inclusion.

use crate::error::{Error, Result};
use crate::fock::{FockOperator, FockSpace, FockVector, Side};
use crate::npoint;
use crate::sample;
use crate::standard_subspace::{symplectic_complement, StandardSubspace};
use crate::tensor_core::{
    c, dim_pow, herm_eig, leg_embed, singular_values, ComplexMatrix, ComplexVector, C64,
};
use crate::twist::{self, Twist};

/// Pass threshold used by the equivalence suite.
pub const VERDICT_TOL: f64 = 1e-8;

/// Index sequences (i₁..i_k), k ≤ max_degree, over a real basis of H,
/// shortest first and lexicographic within a degree.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    words: Vec<Vec<usize>>,
}

impl MonomialBasis {
    pub fn new(d: usize, max_degree: usize) -> Self {
        let mut words = vec![vec![]];
        let mut layer: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..max_degree {
            let mut next = Vec::with_capacity(layer.len() * d);
            for w in &layer {
                for i in 0..d {
                    let mut v = w.clone();
                    v.push(i);
                    next.push(v);
                }
            }
            words.extend(next.iter().cloned());
            layer = next;
        }
        Self { words }
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// φ_L(h_i) for the real basis of H.
fn left_fields(fs: &FockSpace, h: &StandardSubspace) -> Result<Vec<FockOperator>> {
    h.real_basis()
        .iter()
        .map(|b| fs.field(b, Side::Left, None))
        .collect()
}

/// φ_{i₁}⋯φ_{i_k} Ω.
fn monomial_vector(fields: &[FockOperator], word: &[usize]) -> FockVector {
    let mut psi = FockVector::vacuum();
    for &i in word.iter().rev() {
        psi = fields[i].apply(&psi);
    }
    psi
}

fn check_degree(fs: &FockSpace, h: &StandardSubspace, max_degree: usize) -> Result<()> {
    if h.dim() != fs.d() {
        return Err(Error::DimensionMismatch {
            expected: fs.d(),
            found: h.dim(),
        });
    }
    if max_degree > fs.n_max() {
        return Err(Error::Truncation {
            needed: max_degree,
            available: fs.n_max(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelRank {
    pub level: usize,
    pub rank: usize,
    /// rank Q_n.
    pub expected: usize,
}

/// Rank of the level-n parts of the monomial vectors in the P_n metric,
/// against rank Q_n, for n ≤ max_degree.
pub fn cyclicity_rank(
    fs: &FockSpace,
    h: &StandardSubspace,
    max_degree: usize,
) -> Result<Vec<LevelRank>> {
    check_degree(fs, h, max_degree)?;
    let fields = left_fields(fs, h)?;
    let basis = MonomialBasis::new(fs.d(), max_degree);
    let vecs = crate::par::map(basis.words(), |w| monomial_vector(&fields, w));
    let mut out = Vec::with_capacity(max_degree + 1);
    for n in 0..=max_degree {
        let lv = fs.level(n);
        let cols: Vec<ComplexVector> = vecs
            .iter()
            .filter_map(|v| v.level(n))
            .map(|v| lv.p_sqrt.mul_vec(v))
            .collect();
        let rank = if cols.is_empty() {
            0
        } else {
            let sv = singular_values(&ComplexMatrix::from_columns(&cols));
            let top = sv.iter().copied().fold(0.0, f64::max);
            let thr = 1e-9 * top.max(1.0);
            sv.iter().filter(|&&s| s > thr).count()
        };
        out.push(LevelRank {
            level: n,
            rank,
            expected: fs.level_dim(n) - lv.kernel_dim,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TomitaReport {
    /// Failure of Σ c_A AΩ = 0 ⇒ Σ conj(c_A) A^⋆Ω = 0 on the monomial span.
    pub welldefined_residual: f64,
    /// max_A ‖A^⋆Ω − Γ^Y_T(S_H) AΩ‖_T.
    pub match_residual: f64,
    /// Largest match residual among monomials of each degree.
    pub per_degree: Vec<f64>,
    /// Monomial attaining `match_residual`.
    pub worst_word: Vec<usize>,
}

/// Compares AΩ ↦ A^⋆Ω (A^⋆ the reversed monomial) with the levelwise map
/// Y S_H^{⊗n}. The latter is applied to the representatives even when it
/// does not descend to the quotient, so non-crossing twists show up as a
/// mismatch rather than as an error.
pub fn tomita_consistency(
    fs: &FockSpace,
    h: &StandardSubspace,
    max_degree: usize,
) -> Result<TomitaReport> {
    check_degree(fs, h, max_degree)?;
    let fields = left_fields(fs, h)?;
    let basis = MonomialBasis::new(fs.d(), max_degree);
    let s_fock = fs.reversed_anti_blocks(h.tomita());
    let pairs = crate::par::map(basis.words(), |w| {
        let rev: Vec<usize> = w.iter().rev().copied().collect();
        (monomial_vector(&fields, w), monomial_vector(&fields, &rev))
    });

    let mut per_degree = vec![0.0f64; max_degree + 1];
    let mut match_residual: f64 = 0.0;
    let mut worst_word = Vec::new();
    for (w, (a, a_star)) in basis.words().iter().zip(&pairs) {
        let r = fs.vector_residual(a_star, &s_fock.apply(a), fs.n_max());
        per_degree[w.len()] = per_degree[w.len()].max(r);
        if r > match_residual {
            match_residual = r;
            worst_word = w.clone();
        }
    }

    // Kernel of the Gram matrix ⟨AΩ, BΩ⟩_T; each null combination must be
    // sent to a null vector.
    let m = pairs.len();
    let gram = ComplexMatrix::from_fn(m, m, |i, j| fs.twisted_inner(&pairs[i].0, &pairs[j].0));
    let gram = (&gram + &gram.adjoint()).scale_real(0.5);
    let eig = herm_eig(&gram)?;
    let top = eig.values.iter().copied().fold(0.0, f64::max);
    let thr = 1e-10 * top.max(1.0);
    let mut welldefined_residual: f64 = 0.0;
    for k in (0..m).filter(|&k| eig.values[k] <= thr) {
        let coeffs = eig.vectors.column(k);
        let mut img = FockVector::zero();
        for (i, (_, a_star)) in pairs.iter().enumerate() {
            img = img.add(&a_star.scale(coeffs[i].conj()));
        }
        welldefined_residual = welldefined_residual.max(fs.twisted_norm(&img));
    }
    Ok(TomitaReport {
        welldefined_residual,
        match_residual,
        per_degree,
        worst_word,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalityReport {
    /// max ‖[φ_L(h), φ_R(h')]‖_T over real bases, source levels ≤ N − 2.
    pub commutator: f64,
    /// Deviation in ⟨h⊗Ψ, T₁⋯T_n(Φ⊗h')⟩ = ⟨Ψ⊗h', T_n⋯T₁(h⊗Φ)⟩, n ≤ n_max.
    pub n_crossing: f64,
}

impl LocalityReport {
    pub fn max(&self) -> f64 {
        self.commutator.max(self.n_crossing)
    }
}

/// Random real combination of a real basis.
fn real_combination(rng: &mut sample::SeededRng, basis: &[ComplexVector]) -> ComplexVector {
    use rand::Rng;
    let mut v = ComplexVector::zeros(basis[0].dim());
    for b in basis {
        v = &v + &b.scale(c(rng.gen_range(-1.0..1.0), 0.0));
    }
    v
}

/// Both sides of the real-vector n-crossing identity.
pub fn real_n_crossing_sides(
    t: &Twist,
    n: usize,
    h: &ComplexVector,
    psi: &ComplexVector,
    phi: &ComplexVector,
    hp: &ComplexVector,
) -> Result<(C64, C64)> {
    let d = t.d();
    let legs = n + 1;
    let mut fwd = phi.kron(hp);
    for k in (1..=n).rev() {
        fwd = leg_embed(t.matrix(), k, legs, d)?.mul_vec(&fwd);
    }
    let mut bwd = h.kron(phi);
    for k in 1..=n {
        bwd = leg_embed(t.matrix(), k, legs, d)?.mul_vec(&bwd);
    }
    Ok((h.kron(psi).dot(&fwd), psi.kron(hp).dot(&bwd)))
}

/// Locality of L_T(H) against R_T(H'), both as an operator commutator and
/// through the algebraic n-crossing identity with `draws` seeded samples.
pub fn locality_residual(
    fs: &FockSpace,
    h: &StandardSubspace,
    n_max: usize,
    draws: usize,
    seed: u64,
) -> Result<LocalityReport> {
    if fs.n_max() < 2 {
        return Err(Error::Truncation {
            needed: 2,
            available: fs.n_max(),
        });
    }
    let hp = symplectic_complement(h);
    let safe = fs.n_max() - 2;
    let lefts = left_fields(fs, h)?;
    let rights: Vec<FockOperator> = hp
        .real_basis()
        .iter()
        .map(|b| fs.field(b, Side::Right, None))
        .collect::<Result<_>>()?;
    let zero = FockOperator::diagonal(vec![]);
    let mut commutator: f64 = 0.0;
    for l in &lefts {
        for r in &rights {
            let comm = l.compose(r).sub(&r.compose(l));
            commutator = commutator.max(fs.operator_residual(&comm, &zero, safe));
        }
    }

    let t = fs.twist();
    let d = t.d();
    let mut rng = sample::rng(seed);
    let mut n_crossing: f64 = 0.0;
    for n in 1..=n_max {
        for _ in 0..draws {
            let hv = real_combination(&mut rng, h.real_basis());
            let hpv = real_combination(&mut rng, hp.real_basis());
            let psi = sample::vector(&mut rng, dim_pow(d, n));
            let phi = sample::vector(&mut rng, dim_pow(d, n));
            let (a, b) = real_n_crossing_sides(t, n, &hv, &psi, &phi, &hpv)?;
            n_crossing = n_crossing.max((a - b).norm());
        }
    }
    Ok(LocalityReport {
        commutator,
        n_crossing,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModularFlowReport {
    /// max_t,h ‖Γ(Δ^{it}) φ_L(h) Γ(Δ^{−it}) − φ_L(Δ^{it}h)‖_T.
    pub covariance: f64,
    /// max_t ‖Γ(Δ^{it})Ω − Ω‖.
    pub vacuum: f64,
    /// max_h ‖J φ_L(h) J − φ_R(J_H h)‖_T with J = Γ^Y_T(J_H); `None` when
    /// F(J_H⊗J_H) does not commute with T, so that J is not defined.
    pub j_exchange: Option<f64>,
}

impl ModularFlowReport {
    pub fn max(&self) -> f64 {
        self.covariance
            .max(self.vacuum)
            .max(self.j_exchange.unwrap_or(0.0))
    }
}

/// ‖J φ_L(h) J − φ_R(J_H h)‖_T over the real basis of H.
pub fn j_exchange_residual(fs: &FockSpace, h: &StandardSubspace) -> Result<f64> {
    let jf = fs.second_quantize_reversed_anti(h.j())?;
    let safe = fs.n_max() - 1;
    let mut worst: f64 = 0.0;
    for b in h.real_basis() {
        let lhs = jf.compose(&fs.field(b, Side::Left, None)?).compose(&jf);
        let rhs = fs.field(&h.j().apply(b), Side::Right, None)?;
        worst = worst.max(fs.operator_residual(&lhs, &rhs, safe));
    }
    Ok(worst)
}

pub fn modular_flow_covariance(
    fs: &FockSpace,
    h: &StandardSubspace,
    t_samples: &[f64],
) -> Result<ModularFlowReport> {
    if fs.n_max() < 1 {
        return Err(Error::Truncation {
            needed: 1,
            available: 0,
        });
    }
    let safe = fs.n_max() - 1;
    let mut covariance: f64 = 0.0;
    let mut vacuum: f64 = 0.0;
    for &t in t_samples {
        let u = fs.second_quantize(&h.modular_group(t))?;
        let u_inv = fs.second_quantize(&h.modular_group(-t))?;
        for b in h.real_basis() {
            let lhs = u.compose(&fs.field(b, Side::Left, None)?).compose(&u_inv);
            let rhs = fs.field(&h.modular_group(t).mul_vec(b), Side::Left, None)?;
            covariance = covariance.max(fs.operator_residual(&lhs, &rhs, safe));
        }
        let om = FockVector::vacuum();
        vacuum = vacuum.max(fs.vector_residual(&u.apply(&om), &om, fs.n_max()));
    }
    let j_exchange = match j_exchange_residual(fs, h) {
        Ok(r) => Some(r),
        Err(Error::Precondition { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(ModularFlowReport {
        covariance,
        vacuum,
        j_exchange,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualityReport {
    pub j_exchange: f64,
    /// Largest commutator of a left monomial (h ∈ H) with a right monomial
    /// (h' ∈ H'), each of degree ≤ max_degree, on its safe levels.
    pub commutation: f64,
}

impl DualityReport {
    pub fn max(&self) -> f64 {
        self.j_exchange.max(self.commutation)
    }
}

fn monomial_operator(fields: &[FockOperator], word: &[usize]) -> Option<FockOperator> {
    let mut it = word.iter();
    let first = fields[*it.next()?].clone();
    Some(it.fold(first, |acc, &i| acc.compose(&fields[i])))
}

/// The inclusion R_T(H') ⊂ L_T(H)' on monomials, plus the J-exchange.
pub fn duality_proxy(
    fs: &FockSpace,
    h: &StandardSubspace,
    max_degree: usize,
) -> Result<DualityReport> {
    let needed = 2 * max_degree;
    if fs.n_max() < needed {
        return Err(Error::Truncation {
            needed,
            available: fs.n_max(),
        });
    }
    let hp = symplectic_complement(h);
    let lefts = left_fields(fs, h)?;
    let rights: Vec<FockOperator> = hp
        .real_basis()
        .iter()
        .map(|b| fs.field(b, Side::Right, None))
        .collect::<Result<_>>()?;
    let words: Vec<Vec<usize>> = MonomialBasis::new(fs.d(), max_degree)
        .words()
        .iter()
        .filter(|w| !w.is_empty())
        .cloned()
        .collect();
    let mut jobs = Vec::new();
    for wl in &words {
        for wr in &words {
            jobs.push((wl.clone(), wr.clone()));
        }
    }
    let zero = FockOperator::diagonal(vec![]);
    let residuals = crate::par::map(&jobs, |(wl, wr)| {
        let a = monomial_operator(&lefts, wl).expect("nonempty word");
        let b = monomial_operator(&rights, wr).expect("nonempty word");
        let comm = a.compose(&b).sub(&b.compose(&a));
        fs.operator_residual(&comm, &zero, fs.n_max() - wl.len() - wr.len())
    });
    let commutation = residuals.into_iter().fold(0.0, f64::max);
    let j_exchange = j_exchange_residual(fs, h)?;
    Ok(DualityReport {
        j_exchange,
        commutation,
    })
}

/// max_h ‖(φ_L − φ_R)(h)‖_T on source levels ≤ N − 1; vanishes for T = F.
pub fn left_right_coincidence(fs: &FockSpace, h: &StandardSubspace) -> Result<f64> {
    let safe = fs.n_max().saturating_sub(1);
    let mut worst: f64 = 0.0;
    for b in h.real_basis() {
        let l = fs.field(b, Side::Left, None)?;
        let r = fs.field(b, Side::Right, None)?;
        worst = worst.max(fs.operator_residual(&l, &r, safe));
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceRow {
    pub name: String,
    pub compatibility: f64,
    /// Tomita match on the monomial span together with the KMS shift.
    pub tomita_kms: f64,
    /// max(YBE residual, crossing residual).
    pub algebraic: f64,
    pub locality: f64,
}

impl EquivalenceRow {
    pub fn verdicts(&self) -> [bool; 3] {
        [
            self.tomita_kms <= VERDICT_TOL,
            self.algebraic <= VERDICT_TOL,
            self.locality <= VERDICT_TOL,
        ]
    }

    /// All three verdicts coincide.
    pub fn agree(&self) -> bool {
        let v = self.verdicts();
        v[0] == v[1] && v[1] == v[2]
    }
}

/// The three standardness verdicts for one compatible (twist, H) pair.
/// N = max_degree + 1; KMS runs at 2n = 4 and 6 on seeded vectors.
pub fn equivalence_row(
    name: &str,
    t: &Twist,
    h: &StandardSubspace,
    max_degree: usize,
    seed: u64,
) -> Result<EquivalenceRow> {
    let compatibility = twist::compatibility_residual(t, h)?;
    let n_top = max_degree.max(3) + 1;
    let fs = FockSpace::build(t, n_top)?;
    let tomita = tomita_consistency(&fs, h, max_degree)?;
    let mut rng = sample::rng(seed);
    let mut kms: f64 = 0.0;
    for n in [2usize, 3] {
        let vs: Vec<ComplexVector> = (0..2 * n)
            .map(|_| sample::vector(&mut rng, t.d()))
            .collect();
        let r = npoint::kms_shift_check(&fs, h, &vs, &[0.0, 0.7])?;
        kms = kms.max(r.wightman);
    }
    let algebraic = t
        .ybe_residual()
        .max(twist::crossing_residual(t, h, &twist::default_t_grid())?);
    let locality = locality_residual(&fs, h, 2, 4, seed)?.max();
    Ok(EquivalenceRow {
        name: name.to_string(),
        compatibility,
        tomita_kms: tomita
            .match_residual
            .max(tomita.welldefined_residual)
            .max(kms),
        algebraic,
        locality,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard_subspace::{real_part, two_level};
    use crate::twist::{gallery, GalleryParams};

    fn qf(q: f64) -> Twist {
        gallery("q_flip", &GalleryParams::d(2).with_q(q)).unwrap()
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(MonomialBasis::new(2, 3).len(), 15);
        assert_eq!(MonomialBasis::new(3, 0).len(), 1);
    }

    #[test]
    fn cyclic_ranks() {
        let h = two_level(4.0).unwrap();
        let fs = FockSpace::build(&qf(0.5), 3).unwrap();
        let ranks: Vec<usize> = cyclicity_rank(&fs, &h, 3)
            .unwrap()
            .iter()
            .map(|r| r.rank)
            .collect();
        assert_eq!(ranks, vec![1, 2, 4, 8]);
        let fs = FockSpace::build(&gallery("flip", &GalleryParams::d(2)).unwrap(), 2).unwrap();
        let r = cyclicity_rank(&fs, &h, 2).unwrap();
        assert_eq!((r[2].rank, r[2].expected), (3, 3));
    }

    #[test]
    fn tomita_q_flip() {
        let h = two_level(4.0).unwrap();
        let fs = FockSpace::build(&qf(0.5), 4).unwrap();
        let r = tomita_consistency(&fs, &h, 3).unwrap();
        assert!(r.match_residual < 1e-8, "{r:?}");
        assert!(r.welldefined_residual < 1e-8);
    }

    #[test]
    fn locality_zero_and_q_flip() {
        let h = two_level(4.0).unwrap();
        let fs = FockSpace::build(&gallery("zero", &GalleryParams::d(2)).unwrap(), 4).unwrap();
        assert!(locality_residual(&fs, &h, 3, 5, 1).unwrap().max() < 1e-12);
        let fs = FockSpace::build(&qf(0.5), 4).unwrap();
        assert!(locality_residual(&fs, &h, 3, 5, 1).unwrap().max() < 1e-10);
    }

    #[test]
    fn modular_flow_q_flip() {
        let h = two_level(4.0).unwrap();
        let fs = FockSpace::build(&qf(0.5), 4).unwrap();
        let r = modular_flow_covariance(&fs, &h, &[0.0, 0.3]).unwrap();
        assert!(r.j_exchange.is_some());
        assert!(r.max() < 1e-10, "{r:?}");
    }

    #[test]
    fn duality_free_abelian() {
        let h = real_part(2);
        let fs = FockSpace::build(&gallery("zero", &GalleryParams::d(2)).unwrap(), 4).unwrap();
        assert!(duality_proxy(&fs, &h, 2).unwrap().max() < 1e-12);
    }

    #[test]
    fn flip_left_equals_right() {
        let h = two_level(4.0).unwrap();
        let fs = FockSpace::build(&gallery("flip", &GalleryParams::d(2)).unwrap(), 4).unwrap();
        assert!(left_right_coincidence(&fs, &h).unwrap() < 1e-10);
    }
}
