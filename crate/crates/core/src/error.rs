//! Error type shared across the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input claimed Hermitian deviates from its adjoint beyond tolerance.
    #[error("matrix is not Hermitian: max |M - M*| entry {0:.3e}")]
    NotHermitian(f64),

    /// Input claimed positive semidefinite has an eigenvalue below the
    /// accepted floor.
    #[error("matrix is not positive semidefinite: smallest eigenvalue {0:.3e}")]
    NotPsd(f64),

    /// A zero matrix cannot be normalized.
    #[error("zero matrix (norm below zero_tol) cannot be normalized")]
    ZeroMatrix,

    /// Jacobi sweeps exhausted without reaching the off-diagonal threshold.
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal {off:.3e}, threshold {threshold:.3e})")]
    NonConvergence { sweeps: usize, off: f64, threshold: f64 },

    /// Argument outside an operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Word enumeration would exceed the configured cap.
    #[error("enumeration cap exceeded: {words} words > cap {cap}")]
    CapExceeded { words: String, cap: u64 },

    /// Word pattern inconsistent with the supplied matrices or malformed.
    #[error("word pattern mismatch: {0}")]
    PatternMismatch(String),

    /// `‖P_A B‖` was small enough to split but the transformed blocks
    /// violate the declared structure.
    #[error("split inconsistent: off-block residual A {res_a:.3e}, B {res_b:.3e} exceed {allowed:.3e}")]
    SplitInconsistent { res_a: f64, res_b: f64, allowed: f64 },

    /// Resolvent evaluated too close to a pole of `(I − τA)^{-1}`.
    #[error("resolvent pole proximity: min |1 - tau*lambda| = {0:.3e}")]
    PoleProximity(f64),

    /// The operation is undefined for pairs with `AB = 0`.
    #[error("AB = 0 within tolerance; operation undefined for product-zero pairs")]
    ProductZero,

    /// Pair reduction looped past the dimension bound (tolerance breakdown).
    #[error("reduction exceeded max depth {0}")]
    MaxDepthExceeded(usize),

    /// A trace contracted to be real came out with a large imaginary part.
    #[error("non-real trace: re {re:.6e}, im {im:.6e}")]
    NonRealTrace { re: f64, im: f64 },

    /// A proven bound was violated numerically (implementation defect or
    /// tolerance breakdown; never expected on valid input).
    #[error("numerical check failed: {0}")]
    Numerical(String),

    /// Filesystem failure.
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed input data (matrix files, schema violations).
    #[error("parse error: {0}")]
    Parse(String),
}
