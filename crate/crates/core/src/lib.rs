//! Maximum-likelihood quantum state tomography built on triangular T-matrix
//! parameterizations of the density matrix.
//!
//! A density matrix written as ρ = T†T / Tr(T†T) is Hermitian, positive
//! semidefinite and trace-one for *any* real parameter vector, so a
//! likelihood over measured counts can be minimized without constraint
//! handling. This crate provides:
//!
//! - [`linalg`]: small dense complex matrices, Hermitian eigendecomposition,
//!   fidelity and trace distance;
//! - [`forms`]: the four single-qubit T-matrix layouts (A–D), their explicit
//!   closed-form densities, and the n-qubit triangular generalizations;
//! - [`stokes`]: Stokes-parameter representation of a qubit, the six-way
//!   projective measurement model, Born probabilities, count-based
//!   estimation and seeded synthetic data;
//! - [`seeding`]: closed-form starting values for each form computed from
//!   measured Stokes parameters, with fallback rules near the regions where
//!   those expressions blow up;
//! - [`mle`]: count likelihoods, a Nelder-Mead minimizer over the parameter
//!   vector, the A/B-with-backup fit policy and cross-form consistency
//!   checks.

pub mod error;
pub mod forms;
pub mod linalg;
pub mod mle;
pub mod seeding;
pub mod simplex;
pub mod stokes;
pub mod tol;

pub use error::{Error, Result};
