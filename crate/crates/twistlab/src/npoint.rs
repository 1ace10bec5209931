//! Twisted 2n-point functions of the fields φ_L(ξ) = a*_L(ξ) + a_L(S_H ξ),
//! computed directly on the Fock space and through the pair-diagram calculus.
//!
//! Vector k is written ξ_k; in formulas `k̄` means S_H ξ_k. The complex
//! parameter z enters as Δ^{iz} on the last vector.

use crate::error::{Error, Result};
use crate::fock::{FockSpace, FockVector, Side};
use crate::standard_subspace::StandardSubspace;
use crate::tensor_core::{c, leg_embed, ComplexVector, C64, I, ZERO};
use crate::twist::Twist;

/// Largest n accepted by [`enumerate_diagrams`].
pub const DIAGRAM_GUARD: usize = 5;

/// A perfect matching of 1..=2n with each pair written (s, t), s < t.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairDiagram {
    pairs: Vec<(usize, usize)>,
}

impl PairDiagram {
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        let n2 = pairs.len() * 2;
        let mut seen = vec![false; n2 + 1];
        for &(s, t) in &pairs {
            if s >= t || t > n2 || s == 0 || seen[s] || seen[t] {
                return Err(Error::InvalidParams(format!(
                    "{pairs:?} is not a directed pairing of 1..={n2}"
                )));
            }
            seen[s] = true;
            seen[t] = true;
        }
        let mut pairs = pairs;
        pairs.sort();
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Number of pairs n (the diagram has 2n points).
    pub fn n(&self) -> usize {
        self.pairs.len()
    }

    /// Number of pairs of pairs with s < s' < t < t'.
    pub fn crossing_count(&self) -> usize {
        let p = &self.pairs;
        let mut count = 0;
        for a in p {
            for b in p {
                if a.0 < b.0 && b.0 < a.1 && a.1 < b.1 {
                    count += 1;
                }
            }
        }
        count
    }

    fn partner(&self, k: usize) -> (usize, bool) {
        for &(s, t) in &self.pairs {
            if s == k {
                return (t, true);
            }
            if t == k {
                return (s, false);
            }
        }
        unreachable!("point {k} not in diagram")
    }
}

/// All (2n−1)!! pairings, in lexicographic order of their sorted pair lists.
pub fn enumerate_diagrams(n: usize) -> Result<Vec<PairDiagram>> {
    if n > DIAGRAM_GUARD {
        return Err(Error::ResourceGuard {
            what: "n for diagram enumeration",
            size: n,
            limit: DIAGRAM_GUARD,
        });
    }
    fn rec(free: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<PairDiagram>) {
        if free.is_empty() {
            let mut pairs = acc.clone();
            pairs.sort();
            out.push(PairDiagram { pairs });
            return;
        }
        let s = free[0];
        for i in 1..free.len() {
            let t = free[i];
            let rest: Vec<usize> = free[1..].iter().copied().filter(|&x| x != t).collect();
            acc.push((s, t));
            rec(&rest, acc, out);
            acc.pop();
        }
    }
    let points: Vec<usize> = (1..=2 * n).collect();
    let mut out = Vec::new();
    rec(&points, &mut Vec::new(), &mut out);
    Ok(out)
}

/// Relabels k ↦ k+1 (2n ↦ 1); the pair that ended at 2n now starts at 1.
pub fn rotate_diagram(d: &PairDiagram) -> PairDiagram {
    let n2 = 2 * d.n();
    let pairs = d
        .pairs
        .iter()
        .map(|&(s, t)| {
            let (a, b) = (s % n2 + 1, t % n2 + 1);
            (a.min(b), a.max(b))
        })
        .collect();
    PairDiagram::new(pairs).expect("rotation of a pairing is a pairing")
}

/// Vectors with Δ^{iz} applied to the last one.
fn effective_vectors(
    h: &StandardSubspace,
    vectors: &[ComplexVector],
    z: C64,
) -> Vec<ComplexVector> {
    let mut v = vectors.to_vec();
    if let Some(last) = v.last_mut() {
        *last = h.delta().power(I * z).mul_vec(last);
    }
    v
}

fn check_vectors(d: usize, vectors: &[ComplexVector]) -> Result<()> {
    for v in vectors {
        if v.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.dim(),
            });
        }
    }
    Ok(())
}

/// ⟨Ω, φ_L(ξ_1)⋯φ_L(ξ_{m−1}) φ_L(Δ^{iz}ξ_m) Ω⟩_T with Tomita fields for H.
pub fn wightman(
    fs: &FockSpace,
    h: &StandardSubspace,
    vectors: &[ComplexVector],
    z: C64,
) -> Result<C64> {
    check_vectors(fs.d(), vectors)?;
    let m = vectors.len();
    if m % 2 == 1 {
        return Ok(ZERO);
    }
    let needed = m / 2;
    if fs.n_max() < needed {
        return Err(Error::Truncation {
            needed,
            available: fs.n_max(),
        });
    }
    let eff = effective_vectors(h, vectors, z);
    let mut psi = FockVector::vacuum();
    for v in eff.iter().rev() {
        psi = fs.field(v, Side::Left, Some(h))?.apply(&psi);
    }
    Ok(psi.vacuum_component())
}

/// Odd products, evaluated honestly instead of short-circuited.
pub fn odd_wightman(
    fs: &FockSpace,
    h: &StandardSubspace,
    vectors: &[ComplexVector],
) -> Result<C64> {
    check_vectors(fs.d(), vectors)?;
    let mut psi = FockVector::vacuum();
    for v in vectors.iter().rev() {
        psi = fs.field(v, Side::Left, Some(h))?.apply(&psi);
    }
    Ok(psi.vacuum_component())
}

/// Contraction of the first leg of `psi` with η: Σ conj(η_a) ψ_{a…}.
fn contract_first(eta: &ComplexVector, psi: &ComplexVector) -> ComplexVector {
    let d = eta.dim();
    let rest = psi.dim() / d;
    let mut out = ComplexVector::zeros(rest);
    for a in 0..d {
        let w = eta[a].conj();
        for r in 0..rest {
            out[r] += w * psi[a * rest + r];
        }
    }
    out
}

/// Generic evaluator: sweep the points from 2n down to 1. An end point
/// prepends its vector; a start point k paired with l pulls l to the front
/// with T_1⋯T_j (j open end points lie before l) and contracts with S_H ξ_k.
pub fn evaluate_diagram_sweep(
    diagram: &PairDiagram,
    t: &Twist,
    h: &StandardSubspace,
    vectors: &[ComplexVector],
    z: C64,
) -> Result<C64> {
    let n2 = 2 * diagram.n();
    if vectors.len() != n2 {
        return Err(Error::DimensionMismatch {
            expected: n2,
            found: vectors.len(),
        });
    }
    check_vectors(t.d(), vectors)?;
    let d = t.d();
    let eff = effective_vectors(h, vectors, z);
    let mut state = ComplexVector::from_real(&[1.0]);
    let mut open: Vec<usize> = Vec::new();
    for k in (1..=n2).rev() {
        let (other, is_start) = diagram.partner(k);
        if !is_start {
            state = eff[k - 1].kron(&state);
            open.insert(0, k);
        } else {
            let j = open.iter().filter(|&&e| e < other).count();
            let legs = open.len();
            let mut prod_applied = state;
            for m in (1..=j).rev() {
                prod_applied = leg_embed(t.matrix(), m, legs, d)?.mul_vec(&prod_applied);
            }
            state = contract_first(&h.s(&eff[k - 1]), &prod_applied);
            open.retain(|&e| e != other);
        }
    }
    debug_assert_eq!(state.dim(), 1);
    Ok(state[0])
}

/// ⟨D⟩. For n ≤ 3 the closed forms are used; for larger n the sweep
/// evaluator, which needs a braided twist.
pub fn evaluate_diagram(
    diagram: &PairDiagram,
    t: &Twist,
    h: &StandardSubspace,
    vectors: &[ComplexVector],
    z: C64,
) -> Result<C64> {
    if diagram.n() <= 3 {
        let n2 = 2 * diagram.n();
        if vectors.len() != n2 {
            return Err(Error::DimensionMismatch {
                expected: n2,
                found: vectors.len(),
            });
        }
        check_vectors(t.d(), vectors)?;
        let eff = effective_vectors(h, vectors, z);
        return closed_form(diagram, t, h, &eff);
    }
    if !t.is_braided() {
        return Err(Error::NotBraided {
            residual: t.ybe_residual(),
        });
    }
    evaluate_diagram_sweep(diagram, t, h, vectors, z)
}

/// The three-crossing six-point diagram with T₁T₂T₁ instead of T₂T₁T₂;
/// agrees with [`evaluate_diagram`] exactly when T is braided.
pub fn triple_crossing_alternative(
    t: &Twist,
    h: &StandardSubspace,
    vectors: &[ComplexVector],
    z: C64,
) -> Result<C64> {
    check_vectors(t.d(), vectors)?;
    let eff = effective_vectors(h, vectors, z);
    let cf = ClosedForm::new(t, h, &eff);
    Ok(cf.triple(&[0, 1, 0]))
}

struct ClosedForm<'a> {
    t: &'a Twist,
    v: &'a [ComplexVector],
    bar: Vec<ComplexVector>,
}

impl<'a> ClosedForm<'a> {
    fn new(t: &'a Twist, h: &StandardSubspace, v: &'a [ComplexVector]) -> Self {
        let bar = v.iter().map(|x| h.s(x)).collect();
        Self { t, v, bar }
    }

    fn x(&self, k: usize) -> &ComplexVector {
        &self.v[k - 1]
    }

    fn b(&self, k: usize) -> &ComplexVector {
        &self.bar[k - 1]
    }

    /// ⟨k̄, l⟩.
    fn ip(&self, k: usize, l: usize) -> C64 {
        self.b(k).dot(self.x(l))
    }

    fn tv(&self, v: &ComplexVector) -> ComplexVector {
        self.t.matrix().mul_vec(v)
    }

    /// ⟨ā ⊗ b̄, T(c ⊗ d)⟩.
    fn tt(&self, a: usize, b: usize, cc: usize, dd: usize) -> C64 {
        self.b(a)
            .kron(self.b(b))
            .dot(&self.tv(&self.x(cc).kron(self.x(dd))))
    }

    /// ⟨3̄⊗2̄⊗1̄, T_{i₁}T_{i₂}T_{i₃}(4⊗5⊗6)⟩ with legs given 0-based.
    fn triple(&self, legs: &[usize; 3]) -> C64 {
        let d = self.t.d();
        let mut w = self.x(4).kron(self.x(5)).kron(self.x(6));
        for &l in legs.iter().rev() {
            w = leg_embed(self.t.matrix(), l + 1, 3, d)
                .expect("leg in range")
                .mul_vec(&w);
        }
        self.b(3).kron(self.b(2)).kron(self.b(1)).dot(&w)
    }
}

fn closed_form(
    diagram: &PairDiagram,
    t: &Twist,
    h: &StandardSubspace,
    eff: &[ComplexVector],
) -> Result<C64> {
    let f = ClosedForm::new(t, h, eff);
    let p = diagram.pairs();
    let val = match p {
        [(1, 2)] => f.ip(1, 2),
        [(1, 2), (3, 4)] => f.ip(1, 2) * f.ip(3, 4),
        [(1, 4), (2, 3)] => f.ip(2, 3) * f.ip(1, 4),
        [(1, 3), (2, 4)] => f.tt(2, 1, 3, 4),

        [(1, 2), (3, 4), (5, 6)] => f.ip(1, 2) * f.ip(3, 4) * f.ip(5, 6),
        [(1, 6), (2, 3), (4, 5)] => f.ip(1, 6) * f.ip(2, 3) * f.ip(4, 5),
        [(1, 2), (3, 6), (4, 5)] => f.ip(1, 2) * f.ip(3, 6) * f.ip(4, 5),
        [(1, 4), (2, 3), (5, 6)] => f.ip(1, 4) * f.ip(2, 3) * f.ip(5, 6),
        [(1, 6), (2, 5), (3, 4)] => f.ip(1, 6) * f.ip(2, 5) * f.ip(3, 4),

        [(1, 2), (3, 5), (4, 6)] => f.ip(1, 2) * f.tt(4, 3, 5, 6),
        [(1, 5), (2, 3), (4, 6)] => f.ip(2, 3) * f.tt(4, 1, 5, 6),
        [(1, 5), (2, 6), (3, 4)] => f.ip(3, 4) * f.tt(2, 1, 5, 6),
        [(1, 3), (2, 6), (4, 5)] => f.ip(4, 5) * f.tt(2, 1, 3, 6),
        [(1, 3), (2, 4), (5, 6)] => f.tt(2, 1, 3, 4) * f.ip(5, 6),
        [(1, 6), (2, 4), (3, 5)] => f.tt(3, 2, 4, 5) * f.ip(1, 6),

        [(1, 3), (2, 5), (4, 6)] => {
            // ⟨4̄ ⊗ a_3 T(2̄⊗1̄), T(5⊗6)⟩
            let inner = contract_first(f.x(3), &f.tv(&f.b(2).kron(f.b(1))));
            f.b(4).kron(&inner).dot(&f.tv(&f.x(5).kron(f.x(6))))
        }
        [(1, 5), (2, 4), (3, 6)] => {
            // ⟨a_4 T(3̄⊗2̄) ⊗ 1̄, T(5⊗6)⟩
            let inner = contract_first(f.x(4), &f.tv(&f.b(3).kron(f.b(2))));
            inner.kron(f.b(1)).dot(&f.tv(&f.x(5).kron(f.x(6))))
        }
        [(1, 4), (2, 6), (3, 5)] => {
            // ⟨2̄⊗1̄, T(a_{3̄} T(4⊗5) ⊗ 6)⟩
            let inner = contract_first(f.b(3), &f.tv(&f.x(4).kron(f.x(5))));
            f.b(2).kron(f.b(1)).dot(&f.tv(&inner.kron(f.x(6))))
        }
        [(1, 4), (2, 5), (3, 6)] => f.triple(&[1, 0, 1]),
        _ => {
            return Err(Error::InvalidParams(format!(
                "no closed form for diagram {p:?}"
            )));
        }
    };
    Ok(val)
}

/// Per-diagram values in enumeration order; evaluated in parallel.
pub fn diagram_values(
    t: &Twist,
    h: &StandardSubspace,
    vectors: &[ComplexVector],
    z: C64,
) -> Result<Vec<(PairDiagram, C64)>> {
    if vectors.len() % 2 == 1 {
        return Err(Error::InvalidParams(
            "diagram sums need an even number of vectors".into(),
        ));
    }
    let diagrams = enumerate_diagrams(vectors.len() / 2)?;
    let vals = crate::par::map(&diagrams, |dg| evaluate_diagram(dg, t, h, vectors, z));
    diagrams
        .into_iter()
        .zip(vals)
        .map(|(dg, v)| v.map(|v| (dg, v)))
        .collect()
}

/// Σ_D ⟨D⟩ grouped by crossing count; index k holds the sum over diagrams
/// with k crossings.
pub fn crossing_partial_sums(
    t: &Twist,
    h: &StandardSubspace,
    vectors: &[ComplexVector],
    z: C64,
) -> Result<Vec<C64>> {
    let vals = diagram_values(t, h, vectors, z)?;
    let mut sums: Vec<C64> = Vec::new();
    for (dg, v) in vals {
        let k = dg.crossing_count();
        if sums.len() <= k {
            sums.resize(k + 1, ZERO);
        }
        sums[k] += v;
    }
    Ok(sums)
}

/// |Σ_D ⟨D⟩ − W|.
pub fn diagram_sum_check(
    fs: &FockSpace,
    h: &StandardSubspace,
    vectors: &[ComplexVector],
    z: C64,
) -> Result<f64> {
    let w = wightman(fs, h, vectors, z)?;
    let vals = diagram_values(fs.twist(), h, vectors, z)?;
    let sum: C64 = vals.iter().map(|(_, v)| *v).sum();
    Ok((sum - w).norm())
}

/// (Δ^{it}ξ_m, ξ_1, …, ξ_{m−1}).
pub fn kms_rotated_vectors(
    h: &StandardSubspace,
    vectors: &[ComplexVector],
    t: f64,
) -> Vec<ComplexVector> {
    let m = vectors.len();
    let mut out = Vec::with_capacity(m);
    out.push(h.modular_group(t).mul_vec(&vectors[m - 1]));
    out.extend_from_slice(&vectors[..m - 1]);
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct KmsReport {
    /// max_t |W(t − i) − W_rotated(0)|.
    pub wightman: f64,
    /// max_t max_D |⟨D⟩(t − i) − ⟨rot D⟩_rotated(0)|.
    pub per_diagram: f64,
}

/// KMS boundary shift, for the full function and diagram by diagram.
pub fn kms_shift_check(
    fs: &FockSpace,
    h: &StandardSubspace,
    vectors: &[ComplexVector],
    t_samples: &[f64],
) -> Result<KmsReport> {
    let mut worst_w: f64 = 0.0;
    let mut worst_d: f64 = 0.0;
    let diagrams = enumerate_diagrams(vectors.len() / 2)?;
    let per_t = crate::par::map(t_samples, |&time| -> Result<(f64, f64)> {
        let shifted = wightman(fs, h, vectors, c(time, -1.0))?;
        let rot = kms_rotated_vectors(h, vectors, time);
        let plain = wightman(fs, h, &rot, ZERO)?;
        let mut dd: f64 = 0.0;
        for dg in &diagrams {
            let a = evaluate_diagram(dg, fs.twist(), h, vectors, c(time, -1.0))?;
            let b = evaluate_diagram(&rotate_diagram(dg), fs.twist(), h, &rot, ZERO)?;
            dd = dd.max((a - b).norm());
        }
        Ok(((shifted - plain).norm(), dd))
    });
    for r in per_t {
        let (w, dd) = r?;
        worst_w = worst_w.max(w);
        worst_d = worst_d.max(dd);
    }
    Ok(KmsReport {
        wightman: worst_w,
        per_diagram: worst_d,
    })
}

/// Evenly spaced grid of `count` points in [−2, 2].
pub fn t_grid(count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![0.0];
    }
    (0..count)
        .map(|k| -2.0 + 4.0 * k as f64 / (count - 1) as f64)
        .collect()
}
