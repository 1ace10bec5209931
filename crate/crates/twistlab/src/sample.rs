//! Seeded random draws. Everything random in the crate goes through a
//! `ChaCha8Rng` so runs are reproducible from a single `u64`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::tensor_core::{c, ComplexMatrix, ComplexVector};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in the unit square [−1,1] + i[−1,1].
pub fn vector(rng: &mut impl Rng, dim: usize) -> ComplexVector {
    let data = (0..dim)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    ComplexVector::new(data).expect("finite draw")
}

pub fn unit_vector(rng: &mut impl Rng, dim: usize) -> ComplexVector {
    let v = vector(rng, dim);
    let n = v.norm();
    v.scale(c(1.0 / n, 0.0))
}

pub fn matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    ComplexMatrix::new(rows, cols, data).expect("finite draw")
}

pub fn hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let a = matrix(rng, n, n);
    (&a + &a.adjoint()).scale_real(0.5)
}

/// Random unitary from Gram–Schmidt on a random square matrix.
pub fn unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    loop {
        let a = matrix(rng, n, n);
        let mut cols: Vec<ComplexVector> = Vec::with_capacity(n);
        for j in 0..n {
            let mut v = a.column(j);
            for b in &cols {
                let p = b.dot(&v);
                v = &v - &b.scale(p);
            }
            let nv = v.norm();
            if nv < 1e-6 {
                break;
            }
            cols.push(v.scale(c(1.0 / nv, 0.0)));
        }
        if cols.len() == n {
            return ComplexMatrix::from_columns(&cols);
        }
    }
}
