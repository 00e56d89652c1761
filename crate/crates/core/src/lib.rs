//! Exact construction of complete families of mutually unbiased bases in
//! prime and prime-power dimensions.
//!
//! The pipeline is:
//! - [`finite_field`]: `GF(p^n)` from a primitive polynomial, with trace,
//!   additive characters and the Jacobi (Zech) logarithm;
//! - [`cyclotomic`] and [`matrix`]: exact scalars `(Σ c_j ζ^j)/√p^k` and
//!   dense matrices over them;
//! - [`weyl`]: the generalized Pauli operators `Z_q`, `X_q`, the finite
//!   Fourier transform `F`, the diagonal maps `V`, and the `d + 1`
//!   commuting classes;
//! - [`mub`]: the `d + 1` joint eigenbases and their exact unbiasedness check;
//! - [`tensor`]: relabeling `GF(p^n) ≅ ℤ_p^n` and factoring operators into
//!   tensor products of single-qudit Pauli words;
//! - [`suite`]: the full identity suite behind `mubforge verify`.
//!
//! Every check is an exact ring identity; floating point is only used for
//! diagnostics.

pub mod cli;
pub mod cyclotomic;
pub mod finite_field;
pub mod matrix;
pub mod mub;
pub mod suite;
pub mod tensor;
pub mod weyl;

pub use cyclotomic::CycloScalar;
pub use finite_field::{FieldBasis, FieldElement, FieldSpec};
pub use matrix::{CMatrix, CVector};
