//! Numerical and combinatorial laboratory for Hurwitz product traces.
//!
//! A Hurwitz product `S_{m,k}(A, B)` is the sum of all words of length `m`
//! in the letters `A`, `B` containing exactly `k` letters `B`. For positive
//! Hermitian `A`, `B` these traces are the coefficients of `tr (A + tB)^m`
//! in `t`, and their sign and asymptotics are the object of study here.
//!
//! The crate provides:
//!
//! - [`linalg`]: dense complex Hermitian spectral tools — a cyclic Jacobi
//!   eigensolver, operator and Schatten norms, phone normalization (largest
//!   eigenvalue scaled to 1), the power-limit projector `P_A = lim A^i`, and
//!   the block splitting used by the reduction arguments.
//! - [`hurwitz`]: the normalized DP engine computing
//!   `T_{m,k} = S_{m,k}/C(m,k)` without overflow, trace tables in
//!   sign/log10 form, and the brute-force word-enumeration oracle.
//! - [`words`]: exact word counting (`C_{m,k,s}`, `D_{m,k,L}`) with
//!   arbitrary-precision integers and the exact-rational estimate checks.
//! - [`asymptotics`]: pair reduction, explicit positivity thresholds `m0`,
//!   the resolvent trace `tr [B (I − τA)^{-1}]^k` and its Laurent leading
//!   term, band checks, and the monotonicity sweep for `q_{m,k}`.
//! - [`extremal`]: Euler–Lagrange residuals for constrained extrema of
//!   `tr S_{m,k}` on the unit Schatten-p sphere, plus a seeded hill-climb
//!   search locating candidate extremal pairs.
//! - [`sampling`]: deterministic random phone matrices and structured
//!   fixtures (shared top eigenvector, orthogonal-support pairs).
//! - [`matio`]: the matrix JSON schema and the CSV/JSON report writers.
//!
//! All operations are pure functions over immutable values; everything is
//! deterministic for identical inputs (fixed sweep orders, seeded RNG).

pub mod asymptotics;
pub mod cmatrix;
pub mod config;
pub mod error;
pub mod extremal;
pub mod hurwitz;
pub mod linalg;
pub mod matio;
pub mod sampling;
pub mod words;

pub use cmatrix::CMatrix;
pub use config::Tolerances;
pub use error::{Error, Result};
pub use linalg::{BlockSplit, HermitianMatrix, PhoneMatrix, Projector, SpectralDecomposition};
