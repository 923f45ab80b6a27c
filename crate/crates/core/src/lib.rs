//! Numerical toolkit for Dunkl harmonic analysis on the product reflection
//! group Z_2^n: Dunkl operators on polynomials, generalized Hermite
//! functions, Dunkl kernels, coherent states, Schrodinger propagators and
//! Schatten-class trial operators.

pub mod basis;
pub mod error;
pub mod fock;
pub mod hermite;
pub mod kernels;
pub mod operators;
pub mod poly;
pub mod propagators;
pub mod quadrature;
pub mod rank1;
pub mod schatten;
pub mod special;
pub mod structure;
pub mod suites;

pub use basis::{orthonormal_basis, HermiteBasis};
pub use error::{Error, Result};
pub use hermite::HermiteFunctionEvaluator;
pub use kernels::KernelEvaluator;
pub use operators::{dunkl_apply, dunkl_laplacian, dunkl_pairing};
pub use poly::{MultiIndex, Polynomial};
pub use structure::{build_structure, DunklStructure, StructureConfig};
