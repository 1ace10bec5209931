//! Symmetric-group bookkeeping for the permutation-sum form of P_{T,n}.
//!
//! Permutations act on {1..n}; products compose right to left,
//! `(πρ)(x) = π(ρ(x))`. The Coxeter generator σ_k swaps k and k+1, and the
//! word (i₁, …, i_l) stands for σ_{i₁}⋯σ_{i_l}, evaluated on the twist side as
//! T_{i₁}⋯T_{i_l}.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::tensor_core::{dim_pow, leg_embed, ComplexMatrix};
use crate::twist::Twist;

/// Largest n accepted by [`enumerate`].
pub const ENUMERATE_GUARD: usize = 8;
/// Largest n accepted by [`p_sum`].
pub const P_SUM_GUARD: usize = 6;
/// Largest d^n accepted by [`p_sum`].
pub const P_SUM_DIM_GUARD: usize = 1024;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// `images[i−1] = π(i)`; values must be a permutation of 1..=n.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x == 0 || x > n || seen[x - 1] {
                return Err(Error::InvalidParams(format!(
                    "{images:?} is not a permutation of 1..={n}"
                )));
            }
            seen[x - 1] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (1..=n).collect(),
        }
    }

    /// The Coxeter generator σ_k in S_n.
    pub fn sigma(k: usize, n: usize) -> Self {
        assert!(k >= 1 && k < n, "sigma_{k} outside S_{n}");
        let mut p = Self::identity(n);
        p.images.swap(k - 1, k);
        p
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// π(x), 1-based.
    pub fn apply(&self, x: usize) -> usize {
        self.images[x - 1]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.n(), other.n());
        Self {
            images: other.images.iter().map(|&x| self.apply(x)).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.n()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x - 1] = i + 1;
        }
        Self { images: inv }
    }

    pub fn inversion_count(&self) -> usize {
        let v = &self.images;
        (0..v.len())
            .map(|i| (i + 1..v.len()).filter(|&j| v[i] > v[j]).count())
            .sum()
    }

    /// Restriction to {1..n−1} of a permutation fixing n.
    fn drop_last(&self) -> Self {
        debug_assert_eq!(self.images.last(), Some(&self.n()));
        Self {
            images: self.images[..self.n() - 1].to_vec(),
        }
    }

    /// Restriction to {2..n}, relabelled to {1..n−1}, of a permutation fixing 1.
    fn drop_first(&self) -> Self {
        debug_assert_eq!(self.images.first(), Some(&1));
        Self {
            images: self.images[1..].iter().map(|x| x - 1).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReducedWord {
    letters: Vec<usize>,
}

impl ReducedWord {
    pub fn new(letters: Vec<usize>) -> Self {
        Self { letters }
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The permutation σ_{i₁}⋯σ_{i_l} in S_n.
    pub fn evaluate(&self, n: usize) -> Permutation {
        self.letters
            .iter()
            .fold(Permutation::identity(n), |acc, &k| {
                acc.compose(&Permutation::sigma(k, n))
            })
    }

    fn shifted(&self) -> Self {
        Self {
            letters: self.letters.iter().map(|k| k + 1).collect(),
        }
    }
}

/// All of S_n in lexicographic order of the image sequence.
pub fn enumerate(n: usize) -> Result<Vec<Permutation>> {
    if n > ENUMERATE_GUARD {
        return Err(Error::ResourceGuard {
            what: "n for S_n enumeration",
            size: n,
            limit: ENUMERATE_GUARD,
        });
    }
    Ok((1..=n)
        .permutations(n)
        .map(|images| Permutation { images })
        .collect())
}

/// π = ρ γ_k with k = π⁻¹(n), γ_k = σ_{n−1}⋯σ_k and ρ fixing n;
/// word(π) = word(ρ) ++ (n−1, …, k). Peels like (P_n ⊗ 1) R̃_{n+1}.
pub fn canonical_word(pi: &Permutation) -> ReducedWord {
    let n = pi.n();
    if n <= 1 {
        return ReducedWord::new(vec![]);
    }
    let k = pi.inverse().apply(n);
    let gamma = ReducedWord::new((k..n).rev().collect()).evaluate(n);
    let rho = pi.compose(&gamma.inverse());
    let mut letters = canonical_word(&rho.drop_last()).letters;
    letters.extend((k..n).rev());
    let w = ReducedWord::new(letters);
    debug_assert_eq!(w.len(), pi.inversion_count());
    w
}

/// π = (1 ⊕ ρ) δ_k with k = π⁻¹(1), δ_k = σ_1⋯σ_{k−1} and ρ acting on
/// {2..n}; word(π) = shift(word(ρ)) ++ (1, …, k−1). Peels like
/// (1 ⊗ P_n) R_{n+1}.
pub fn mirrored_canonical_word(pi: &Permutation) -> ReducedWord {
    let n = pi.n();
    if n <= 1 {
        return ReducedWord::new(vec![]);
    }
    let k = pi.inverse().apply(1);
    let delta = ReducedWord::new((1..k).collect()).evaluate(n);
    let rho = pi.compose(&delta.inverse());
    let mut letters = mirrored_canonical_word(&rho.drop_first()).shifted().letters;
    letters.extend(1..k);
    let w = ReducedWord::new(letters);
    debug_assert_eq!(w.len(), pi.inversion_count());
    w
}

/// Every reduced word of π, found by peeling right descents.
pub fn reduced_words(pi: &Permutation) -> Vec<ReducedWord> {
    let n = pi.n();
    let mut out = Vec::new();
    if pi.inversion_count() == 0 {
        out.push(ReducedWord::new(vec![]));
        return out;
    }
    for i in 1..n {
        if pi.apply(i) > pi.apply(i + 1) {
            let shorter = pi.compose(&Permutation::sigma(i, n));
            for mut w in reduced_words(&shorter) {
                w.letters.push(i);
                out.push(w);
            }
        }
    }
    out.sort_by(|a, b| a.letters.cmp(&b.letters));
    out.dedup();
    out
}

/// T_{i₁}⋯T_{i_l} on (ℂ^d)^{⊗n}.
pub fn quasi_mult_eval(t: &Twist, w: &ReducedWord, n: usize) -> Result<ComplexMatrix> {
    let d = t.d();
    let mut out = ComplexMatrix::identity(dim_pow(d, n));
    for &k in &w.letters {
        out = out.matmul(&leg_embed(t.matrix(), k, n, d)?);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordOrder {
    /// [`canonical_word`].
    Canonical,
    /// [`mirrored_canonical_word`].
    Mirrored,
}

/// Σ_{π∈S_n} t(π) with t evaluated on the chosen word of each π. Terms are
/// computed in parallel and summed in enumeration order.
pub fn p_sum(t: &Twist, n: usize, order: WordOrder) -> Result<ComplexMatrix> {
    if n > P_SUM_GUARD {
        return Err(Error::ResourceGuard {
            what: "n for p_sum",
            size: n,
            limit: P_SUM_GUARD,
        });
    }
    let dim = t.d().checked_pow(n as u32).unwrap_or(usize::MAX);
    if dim > P_SUM_DIM_GUARD {
        return Err(Error::ResourceGuard {
            what: "d^n for p_sum",
            size: dim,
            limit: P_SUM_DIM_GUARD,
        });
    }
    let perms = enumerate(n)?;
    let terms = crate::par::map(&perms, |pi| {
        let w = match order {
            WordOrder::Canonical => canonical_word(pi),
            WordOrder::Mirrored => mirrored_canonical_word(pi),
        };
        quasi_mult_eval(t, &w, n)
    });
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for term in terms {
        sum = &sum + &term?;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::twist::{gallery, GalleryParams};

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate(1).unwrap(), vec![Permutation::identity(1)]);
        assert_eq!(enumerate(3).unwrap().len(), 6);
        let s4 = enumerate(4).unwrap();
        let mut uniq = s4.clone();
        uniq.dedup();
        assert_eq!(uniq.len(), 24);
        assert!(enumerate(9).is_err());
    }

    #[test]
    fn canonical_words_small() {
        assert!(canonical_word(&Permutation::identity(3)).is_empty());
        assert_eq!(canonical_word(&Permutation::sigma(1, 2)).letters(), &[1]);
        let rev = Permutation::new(vec![3, 2, 1]).unwrap();
        let w = canonical_word(&rev);
        assert_eq!(w.len(), 3);
        assert_eq!(w.evaluate(3), rev);
        let w = mirrored_canonical_word(&rev);
        assert_eq!(w.len(), 3);
        assert_eq!(w.evaluate(3), rev);
    }

    #[test]
    fn words_are_reduced_exhaustively() {
        for n in 1..=6 {
            for pi in enumerate(n).unwrap() {
                let w = canonical_word(&pi);
                assert_eq!(w.len(), pi.inversion_count());
                assert_eq!(w.evaluate(n), pi);
                let m = mirrored_canonical_word(&pi);
                assert_eq!(m.len(), pi.inversion_count());
                assert_eq!(m.evaluate(n), pi);
            }
        }
    }

    #[test]
    fn longest_element_of_s3_has_two_words() {
        let rev = Permutation::new(vec![3, 2, 1]).unwrap();
        let words = reduced_words(&rev);
        assert_eq!(words.len(), 2);
    }

    #[test]
    fn scalar_q_factorial() {
        let t = Twist::new(ComplexMatrix::from_real(1, 1, &[0.5]), 1).unwrap();
        let p = p_sum(&t, 3, WordOrder::Canonical).unwrap();
        assert!((p[(0, 0)].re - 2.625).abs() < 1e-14);
    }

    #[test]
    fn n2_is_one_plus_t() {
        let t = gallery("q_flip", &GalleryParams::d(2).with_q(0.3)).unwrap();
        let p = p_sum(&t, 2, WordOrder::Canonical).unwrap();
        assert!(p.approx_eq(&(&ComplexMatrix::identity(4) + t.matrix()), 1e-15));
    }
}
