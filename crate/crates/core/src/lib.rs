//! Exact cluster-algebra engine with principal coefficients.
//!
//! - [`matrix`]: integer matrices, mutation, sign patterns, skew-symmetrizers,
//!   and the C-/G-matrix recurrences.
//! - [`laurent`]: sparse Laurent polynomials over big integers.
//! - [`seed`]: labeled seeds, g-vectors, F-polynomials, separation formula.
//! - [`verifier`]: bounded exchange-graph exploration and the property checks.

pub mod laurent;
pub mod literal;
pub mod matrix;
pub mod seed;
pub mod verifier;

pub use laurent::{LaurentError, LaurentPoly, Monomial};
pub use literal::{LiteralError, MatrixLiteral};
pub use matrix::{
    c_mutate, find_skew_symmetrizer, g_mutate, is_acyclic, is_sign_skew_symmetric,
    mutate_matrix, positive_part, ExtendedExchangeMatrix, IntMatrix, MatrixError,
    SkewSymmetrizer,
};
pub use seed::{
    f_polynomial_of, g_vector_of, hat_y, new_principal_seed, reconstruct_separation,
    EngineOptions, FPolynomial, Fingerprint, GVector, HatY, Seed, SeedError, SeedRecord,
};
