//! Complex linear-algebra substrate: Hermitian operators, states, Pauli
//! embeddings and eigensystems.

mod operator;
mod pauli;
mod spectrum;
mod state;

pub use operator::{HermitianOperator, SparseOperator, HERMITICITY_TOL};
pub use pauli::{
    embed_site_operator, embed_site_operator_capped, Pauli, PauliString, PauliSum, MAX_SITES,
};
pub use spectrum::{eigensystem, eigenvalues, ground_state, Spectrum, DEFAULT_GAP_TOL};
pub use state::{expectation, StateVector, NORM_TOL};
