//! Lindblad master equations solved by lifting the density matrix to a
//! vector on `system ⊗ ancilla` and propagating it with a non-Hermitian
//! effective Hamiltonian.
//!
//! Natural units throughout: `ħ = k_B = 1`, rates and frequencies share
//! inverse-time units.

// `!(x >= 0.0)` style guards are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod cavity;
pub mod effective;
pub mod error;
pub mod expm;
pub mod harness;
pub mod model;
pub mod operators;
pub mod qubit;
pub mod scenario;
pub mod tolerance;

pub use algebra::{
    devectorize, entrywise_conjugate, partial_trace_env, tensor_product, vectorize, ComplexMatrix,
    LiftedState, C64,
};
pub use effective::{
    build_effective_hamiltonian, propagate, propagator_matrix, EffectiveHamiltonian, Propagator,
};
pub use error::{Error, Result};
pub use expm::matrix_exponential;
pub use model::{rk4_evolve, JumpChannel, MasterEquation, StandardForm};
pub use tolerance::Tolerances;
