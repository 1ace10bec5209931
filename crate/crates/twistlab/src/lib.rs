//! Finite-dimensional twisted Fock spaces, twisted Araki–Woods fields and the
//! standard-subspace relations between them.
//!
//! All operators are dense complex matrices on truncated tensor powers of ℂ^d.
//! Tensor indices are flattened with the leftmost factor most significant.

pub mod error;
pub mod fixtures;
pub mod fock;
pub mod modular_verify;
pub mod npoint;
pub mod nuclearity;
pub mod par;
pub mod perm_expansion;
pub mod sample;
pub mod standard_subspace;
pub mod tensor_core;
pub mod twist;

pub use error::{Error, Result};
pub use fock::{FockOperator, FockSpace, FockVector, Side};
pub use standard_subspace::{AntilinearMap, StandardSubspace};
pub use tensor_core::{ComplexMatrix, ComplexVector, PositiveSpectral, C64};
pub use twist::{GalleryParams, Twist};
