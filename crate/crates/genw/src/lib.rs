//! Numerical library for the generalized Lambert W function W⁽ᵖ⁾: the inverse
//! (branch through 0) of
//!
//! ```text
//! f(z) = z·(z − t₁)^p₁ ··· (z − t_m)^p_m · e^z,
//! ```
//!
//! with arbitrary nonzero complex roots t_i and exponents p_i, all complex
//! powers taken as principal values. For m = 0 this is the classical Lambert W.
//!
//! The crate is organized around four subsystems:
//!
//! - [`hyper`]: Pochhammer machinery, multi-index iteration, terminating
//!   Lauricella/Kampé de Fériet evaluation, and the generalized
//!   Chu–Vandermonde and Lauricella reflection identities as executable checks.
//! - [`series`]: the forward map, the reduction of a general leading factor
//!   (z − t₀)^p₀ to standard form, and the Taylor coefficients
//!   c_n = (−n)^{n−1}/n! · ∏(−t_i)^{−n·p_i} · F_n of f⁻¹, where F_n is a
//!   terminating multivariable hypergeometric sum.
//! - [`invert`]: Newton inversion of the forward map, used both as an
//!   independent oracle and as the polishing stage of the series evaluator.
//! - [`radius`]: saddle-point analysis of the coefficient asymptotics, the
//!   conjectured radius of convergence, and an empirical root-test estimate.
//!
//! The binary `genw` exposes all of this on the command line; see [`cli`].

pub mod cli;
pub mod hyper;
pub mod invert;
pub mod radius;
pub mod scaled;
pub mod series;

pub(crate) mod poly;
pub(crate) mod wide;

use std::fmt;

pub use num_complex::Complex64;

/// Errors reported by the library.
///
/// Validation failures are ordinary values so that identity-checking drivers
/// can tabulate them rather than abort.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// `t` and `p` vectors of a parameter set differ in length.
    MismatchedLengths { t_len: usize, p_len: usize },
    /// A root t_i is zero (0 must not be a branch point of any factor).
    ZeroRoot { index: usize },
    /// An exponent p_i is zero (the factor would be trivial).
    ZeroExponent { index: usize },
    /// Forward-map evaluation at a branch point z = t_i with non-integer
    /// (or negative integer) exponent.
    BranchPoint { index: usize },
    /// The Lauricella c-parameter is a nonpositive integer > −k, so a needed
    /// Pochhammer denominator (c)_j vanishes.
    InvalidCParameter { c: Complex64, k: usize },
    /// The centered Chu–Vandermonde parameter q_i is in {0, −1, …, −(k−1)}.
    InvalidCenterParameter { q: Complex64, k: usize },
    /// The centered Chu–Vandermonde weight w_i is zero.
    ZeroCenterWeight,
    /// Center index out of range.
    CenterOutOfRange { center: usize, len: usize },
    /// Degenerate substitution: p₀ = 0 or some t_i coincides with t₀.
    DegenerateSubstitution(&'static str),
    /// An asymptotic evaluation hit a non-removable singularity.
    SingularEvaluation(&'static str),
    /// A multi-index was rejected by an asymptotic operation
    /// (weight too large or a zero entry where the interior is required).
    InvalidIndex(&'static str),
    /// A principal-log branch offset failed to round to an integer within
    /// tolerance, indicating a stale saddle or a branch anomaly.
    NonIntegerOffset { index: usize, value: f64 },
    /// The two algebraic routes of the conjectured-radius formula disagree.
    InconsistentRadiusRoutes { direct: f64, via_exponent: f64 },
    /// A zero base would be raised to a nonzero power.
    ZeroBase(&'static str),
    /// The requested fit window is empty, out of range, or all-zero.
    BadFitWindow(&'static str),
    /// The polynomial root finder failed to converge for some root.
    RootFinding(&'static str),
    /// Not enough coefficients in the table for the requested operation.
    TableTooShort { have: usize, need: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::MismatchedLengths { t_len, p_len } => {
                write!(f, "t has {t_len} entries but p has {p_len}")
            }
            Error::ZeroRoot { index } => write!(f, "t[{index}] must be nonzero"),
            Error::ZeroExponent { index } => write!(f, "p[{index}] must be nonzero"),
            Error::BranchPoint { index } => {
                write!(f, "evaluation at the branch point z = t[{index}]")
            }
            Error::InvalidCParameter { c, k } => {
                write!(f, "c = {c} is a nonpositive integer > -{k}: (c)_j vanishes")
            }
            Error::InvalidCenterParameter { q, k } => {
                write!(f, "center parameter q = {q} lies in {{0, -1, ..., -({k}-1)}}")
            }
            Error::ZeroCenterWeight => write!(f, "center weight w_i must be nonzero"),
            Error::CenterOutOfRange { center, len } => {
                write!(f, "center index {center} out of range for {len} entries")
            }
            Error::DegenerateSubstitution(what) => write!(f, "degenerate substitution: {what}"),
            Error::SingularEvaluation(what) => write!(f, "singular evaluation: {what}"),
            Error::InvalidIndex(what) => write!(f, "invalid multi-index: {what}"),
            Error::NonIntegerOffset { index, value } => {
                write!(f, "branch offset {index} is {value}, not an integer")
            }
            Error::InconsistentRadiusRoutes { direct, via_exponent } => {
                write!(
                    f,
                    "radius routes disagree: direct {direct} vs exponent route {via_exponent}"
                )
            }
            Error::ZeroBase(what) => write!(f, "zero base with nonzero exponent: {what}"),
            Error::BadFitWindow(what) => write!(f, "bad fit window: {what}"),
            Error::RootFinding(what) => write!(f, "root finding failed: {what}"),
            Error::TableTooShort { have, need } => {
                write!(f, "coefficient table has {have} entries, need {need}")
            }
        }
    }
}

impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

pub use invert::{generalized_w, newton_invert, InversionResult, Method};
pub use radius::{RadiusReport, SaddlePoint};
pub use scaled::ScaledComplex;
pub use series::{CoefficientTable, NormalFormTransform, ParamSet};
