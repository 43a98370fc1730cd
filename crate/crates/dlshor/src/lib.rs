//! Classical toolkit around the uniform-superposition variant of Shor's
//! algorithm for general discrete logarithms.
//!
//! The quantum algorithm itself is never executed. Instead this crate models
//! the output distribution it induces and everything one can do with that
//! model on a classical machine:
//!
//! * [`kernel`] — problem instances, the (j, k) ↔ (α_d, α_r) argument maps
//!   and the closed-form heuristic density of an output pair.
//! * [`quadrature`] — extended-precision composite Simpson integration with
//!   Richardson extrapolation, and the capture-probability table built from it.
//! * [`histogram`] — piecewise-integrated (Δ, α_r) histogram, sampling, and
//!   conversion of samples into simulated quantum outputs (j, k).
//! * [`solver`] — classical post-processing that recovers the logarithm d
//!   from a pair (j, k) with a bounded search.
//! * [`oracle`] — exact brute-force output distribution for tiny instances,
//!   used to validate the heuristic model.
//! * [`numtheory`] — exact big-integer primitives shared by all of the above.
//!
//! Floating-point work uses MPFR via [`rug`] with a configurable mantissa
//! precision (192 bits by default); integers and rationals are exact.

pub mod histogram;
pub mod kernel;
pub mod numtheory;
pub mod oracle;
pub mod quadrature;
pub mod solver;

pub use kernel::{AnglePair, ArgumentPair, FrequencyPair, ProblemInstance, PublicInstance};
pub use quadrature::{CaptureTable, QuadratureConfig};

/// Errors shared across the crate.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("modulus must be positive")]
    InvalidModulus,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("quadrature did not converge within the refinement limit (last estimates {last:e}, {prev:e})")]
    Convergence { last: f64, prev: f64 },
    #[error("instance too large: m+ell = {0} exceeds the resource guard {1}")]
    ResourceGuard(u32, u32),
    #[error("histogram cell contains no admissible argument")]
    EmptyCell,
    #[error("unsupported histogram format version {0}")]
    UnknownVersion(u8),
    #[error("histogram checksum mismatch")]
    ChecksumMismatch,
    #[error("malformed data: {0}")]
    Malformed(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Maps `f` over `0..n`, on the rayon pool when the `parallel` feature is
/// enabled and sequentially otherwise. Results are returned in index order
/// either way, so callers get identical output in both modes.
pub fn map_range<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// True when this build runs `map_range` on the rayon pool.
pub const PARALLEL: bool = cfg!(feature = "parallel");
