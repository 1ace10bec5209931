//! Dense complex matrices and vectors, tensor products and spectral calculus.
//!
//! Multi-index flattening is lexicographic with the leftmost tensor factor
//! most significant: in `A ⊗ B` the pair `(i, k)` maps to `i * dim(B) + k`.
//! Every leg embedding and contraction in the crate relies on this.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
pub use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Self-adjointness tolerance: ‖A − A*‖ ≤ SELFADJOINT_TOL · (1 + ‖A‖).
pub const SELFADJOINT_TOL: f64 = 1e-10;
/// Eigenvalues below KERNEL_TOL · max(max|λ|, 1) count as zero.
pub const KERNEL_TOL: f64 = 1e-9;
/// Unitarity tolerance for eigenbases handed to [`PositiveSpectral::new`].
pub const UNITARY_TOL: f64 = 1e-9;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Integer power `d^n` as a dimension.
pub fn dim_pow(d: usize, n: usize) -> usize {
    d.pow(n as u32)
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| re(x)).collect();
        Self::from_diag(&d)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[ComplexVector]) -> Self {
        let rows = cols.first().map_or(0, |v| v.dim());
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i])
    }

    /// Real row-major matrix, handy for literals.
    pub fn from_real(rows: usize, cols: usize, vals: &[f64]) -> Self {
        assert_eq!(
            vals.len(),
            rows * cols,
            "from_real: wrong number of entries"
        );
        Self {
            rows,
            cols,
            data: vals.iter().map(|&x| re(x)).collect(),
        }
    }

    /// The tensor flip `v ⊗ w ↦ w ⊗ v` on ℂ^d ⊗ ℂ^d.
    pub fn flip(d: usize) -> Self {
        let mut m = Self::zeros(d * d, d * d);
        for a in 0..d {
            for b in 0..d {
                m[(b * d + a, a * d + b)] = ONE;
            }
        }
        m
    }

    /// Permutation matrix sending e_j to e_{perm[j]}.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = Self::zeros(n, n);
        for (j, &i) in perm.iter().enumerate() {
            m[(i, j)] = ONE;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::from_vec((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul: inner dimensions differ");
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * m];
        let parallel = n * k * m >= par::MATMUL_PAR_THRESHOLD;
        par::rows_mut(&mut out, m, parallel, |i, row| {
            let a = &self.data[i * k..(i + 1) * k];
            for (l, &ail) in a.iter().enumerate() {
                if ail == ZERO {
                    continue;
                }
                let b = &other.data[l * m..(l + 1) * m];
                for (r, &blj) in row.iter_mut().zip(b) {
                    *r += ail * blj;
                }
            }
        });
        Self {
            rows: n,
            cols: m,
            data: out,
        }
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, v.dim(), "mul_vec: dimension mismatch");
        let out = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v.entries())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        ComplexVector::from_vec(out)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(re(s))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn kron(&self, other: &Self) -> Self {
        kron(self, other)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Operator 2-norm (largest singular value).
    pub fn op_norm(&self) -> f64 {
        singular_values(self).into_iter().fold(0.0, f64::max)
    }

    /// ‖A − A*‖ in operator norm.
    pub fn selfadjoint_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (self - &self.adjoint()).op_norm()
    }

    pub fn is_selfadjoint(&self) -> bool {
        self.is_square() && self.selfadjoint_residual() <= SELFADJOINT_TOL * (1.0 + self.op_norm())
    }

    /// ‖U*U − 1‖.
    pub fn unitarity_residual(&self) -> f64 {
        (&self.adjoint().matmul(self) - &Self::identity(self.cols)).op_norm()
    }

    /// Inverse via nalgebra LU; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        to_na(self).try_inverse().map(|m| from_na(&m))
    }

    /// Sub-block `rows r0..r0+nr`, `cols c0..c0+nc`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows && self.cols == other.cols && (self - other).max_abs() <= tol
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "add: shape mismatch"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "sub: shape mismatch"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(re(-1.0))
    }
}

#[derive(Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<C64>,
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexVector[")?;
        for z in &self.data {
            write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
        }
        write!(f, " ]")
    }
}

impl ComplexVector {
    pub fn new(data: Vec<C64>) -> Result<Self> {
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { data })
    }

    pub(crate) fn from_vec(data: Vec<C64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![ZERO; dim],
        }
    }

    /// Standard basis vector e_k (0-based).
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[k] = ONE;
        v
    }

    pub fn from_real(vals: &[f64]) -> Self {
        Self {
            data: vals.iter().map(|&x| re(x)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn entries_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    /// ⟨self, other⟩, antilinear in the first slot.
    pub fn dot(&self, other: &Self) -> C64 {
        assert_eq!(self.dim(), other.dim(), "dot: dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Self { data }
    }

    /// Rank-one matrix |self⟩⟨other|.
    pub fn outer(&self, other: &Self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), other.dim(), |i, j| {
            self.data[i] * other.data[j].conj()
        })
    }
}

impl Index<usize> for ComplexVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.data[i]
    }
}

impl Add for &ComplexVector {
    type Output = ComplexVector;
    fn add(self, rhs: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim(), rhs.dim(), "add: dimension mismatch");
        ComplexVector {
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexVector {
    type Output = ComplexVector;
    fn sub(self, rhs: &ComplexVector) -> ComplexVector {
        assert_eq!(self.dim(), rhs.dim(), "sub: dimension mismatch");
        ComplexVector {
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// `(A ⊗ B)[(i,k),(j,l)] = A[i,j] · B[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows, a.cols, b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// n-fold tensor power; `kron_pow(A, 0)` is the 1×1 identity.
pub fn kron_pow(a: &ComplexMatrix, n: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(1);
    for _ in 0..n {
        out = kron(&out, a);
    }
    out
}

/// T_k = 1^{⊗(k−1)} ⊗ T ⊗ 1^{⊗(n−k−1)} on (ℂ^d)^{⊗n}, with k counted from 1.
pub fn leg_embed(t: &ComplexMatrix, k: usize, n: usize, d: usize) -> Result<ComplexMatrix> {
    if t.rows() != d * d || t.cols() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: t.rows(),
        });
    }
    if n < 2 || k == 0 || k > n - 1 {
        return Err(Error::IndexOutOfRange {
            index: k,
            max: n.saturating_sub(1),
        });
    }
    let left = dim_pow(d, k - 1);
    let right = dim_pow(d, n - k - 1);
    let dd = d * d;
    let total = left * dd * right;
    let mut out = ComplexMatrix::zeros(total, total);
    for l in 0..left {
        for i in 0..dd {
            for j in 0..dd {
                let tij = t[(i, j)];
                if tij == ZERO {
                    continue;
                }
                for r in 0..right {
                    out[((l * dd + i) * right + r, (l * dd + j) * right + r)] = tij;
                }
            }
        }
    }
    Ok(out)
}

/// Strictly positive spectral data of a positive invertible operator.
#[derive(Clone, Debug, PartialEq)]
pub struct PositiveSpectral {
    eigenvalues: Vec<f64>,
    eigenbasis: ComplexMatrix,
}

impl PositiveSpectral {
    /// Validates positivity and unitarity; sorts eigenvalues ascending.
    pub fn new(eigenvalues: Vec<f64>, eigenbasis: ComplexMatrix) -> Result<Self> {
        let n = eigenvalues.len();
        if eigenbasis.rows() != n || eigenbasis.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: eigenbasis.rows(),
            });
        }
        if let Some(&bad) = eigenvalues.iter().find(|&&x| x <= 0.0 || !x.is_finite()) {
            return Err(Error::NonPositiveEigenvalue { value: bad });
        }
        let residual = eigenbasis.unitarity_residual();
        if residual > UNITARY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eigenvalues[a].total_cmp(&eigenvalues[b]));
        let sorted = order.iter().map(|&k| eigenvalues[k]).collect();
        let basis = ComplexMatrix::from_fn(n, n, |i, j| eigenbasis[(i, order[j])]);
        Ok(Self {
            eigenvalues: sorted,
            eigenbasis: basis,
        })
    }

    /// Diagonal operator in the standard basis.
    pub fn from_diag(eigenvalues: &[f64]) -> Result<Self> {
        Self::new(
            eigenvalues.to_vec(),
            ComplexMatrix::identity(eigenvalues.len()),
        )
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenbasis(&self) -> &ComplexMatrix {
        &self.eigenbasis
    }

    pub fn matrix(&self) -> ComplexMatrix {
        spectral_power(self, ONE)
    }

    pub fn power(&self, z: C64) -> ComplexMatrix {
        spectral_power(self, z)
    }

    /// Spectral data of the inverse operator.
    pub fn inverse(&self) -> Self {
        let vals: Vec<f64> = self.eigenvalues.iter().map(|x| 1.0 / x).collect();
        Self::new(vals, self.eigenbasis.clone()).expect("inverse of valid spectral data")
    }

    /// Spectral data of `self^s` for real s.
    pub fn real_power(&self, s: f64) -> Self {
        let vals: Vec<f64> = self.eigenvalues.iter().map(|x| x.powf(s)).collect();
        Self::new(vals, self.eigenbasis.clone()).expect("real power of valid spectral data")
    }

    /// Spectral data of `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut vals = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.eigenvalues {
            for b in &other.eigenvalues {
                vals.push(a * b);
            }
        }
        Self::new(vals, kron(&self.eigenbasis, &other.eigenbasis))
            .expect("kron of valid spectral data")
    }
}

/// `Σ_k λ_k^z P_k`; for imaginary z the result is unitary.
pub fn spectral_power(d: &PositiveSpectral, z: C64) -> ComplexMatrix {
    let u = &d.eigenbasis;
    let n = d.dim();
    let w: Vec<C64> = d.eigenvalues.iter().map(|&l| (z * l.ln()).exp()).collect();
    let mut ud = u.clone();
    for i in 0..n {
        for j in 0..n {
            ud[(i, j)] *= w[j];
        }
    }
    ud.matmul(&u.adjoint())
}

/// Full real spectrum of a self-adjoint matrix, sorted ascending.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermEig {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut ud = self.vectors.clone();
        for i in 0..n {
            for j in 0..n {
                ud[(i, j)] *= self.values[j];
            }
        }
        ud.matmul(&self.vectors.adjoint())
    }

    /// Zero threshold `KERNEL_TOL · max(max|λ|, 1)`.
    pub fn kernel_threshold(&self) -> f64 {
        let scale = self.values.iter().map(|x| x.abs()).fold(1.0, f64::max);
        KERNEL_TOL * scale
    }

    pub fn kernel_dim(&self) -> usize {
        let thr = self.kernel_threshold();
        self.values.iter().filter(|x| x.abs() <= thr).count()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// Apply `f` to eigenvalues: `U f(Λ) U*`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let mut ud = self.vectors.clone();
        for i in 0..n {
            for j in 0..n {
                ud[(i, j)] *= fv[j];
            }
        }
        ud.matmul(&self.vectors.adjoint())
    }

    pub fn into_positive(self) -> Result<PositiveSpectral> {
        PositiveSpectral::new(self.values, self.vectors)
    }
}

pub fn herm_eig(a: &ComplexMatrix) -> Result<HermEig> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            found: a.cols(),
        });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(HermEig {
            values: vec![],
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let residual = a.selfadjoint_residual();
    if residual > SELFADJOINT_TOL * (1.0 + a.op_norm()) {
        return Err(Error::NotSelfAdjoint { residual });
    }
    let eig = to_na(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermEig { values, vectors })
}

pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return vec![];
    }
    to_na(a).singular_values().iter().copied().collect()
}

/// Sum of singular values.
pub fn trace_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).iter().sum()
}

fn to_na(a: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_row_slice(a.rows(), a.cols(), a.data())
}

fn from_na(m: &DMatrix<C64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}
