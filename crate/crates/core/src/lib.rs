//! Schottky uniformization of curves, numerically and arithmetically.
//!
//! A Schottky group of rank g is a free group of Moebius transformations
//! whose generators pair 2g disjoint disks. This crate computes the objects
//! attached to such a group in two parallel arithmetic regimes:
//!
//! * numeric: complex floating point groups, multiplicative period matrices
//!   `p_ij` as truncated products over double cosets, holomorphic
//!   differentials as coset sums, convergence certificates, degeneration
//!   probes and limit-set samples (see [`numeric`]);
//! * exact: the universal period table over the ring
//!   `A_0[[y_1, ..., y_g]]`, where `A_0` is generated over the integers by
//!   the cross-ratios of the fixed points `x_{\pm i}`, with coefficients
//!   either symbolic polynomial fractions or evaluated rationals
//!   (see [`universal`]).
//!
//! The q-expansion side of the same picture lives in [`qforms`] (Tate curve
//! coefficients, Eisenstein series, the discriminant product, classical
//! divisor-sum identities) and [`siegel`] (theta constants with
//! characteristics, even theta products, lattice theta series, the degree-4
//! Schottky relation, and the boundary restriction of Fourier expansions).
//! [`universal::substitute_periods`] connects the two: it substitutes period
//! series into a Siegel Fourier expansion, the Schottky-problem test in its
//! arithmetic form.

pub mod algebra;
pub mod moebius;
pub mod numeric;
pub mod qforms;
pub mod siegel;
pub mod universal;
pub mod words;

use thiserror::Error;

/// Crate-wide error type. Math precondition failures are reported through
/// dedicated variants so callers (notably the CLI) can map them to stable
/// exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// Inversion of a ring element that is not a unit (zero rational, zero
    /// fraction, series whose constant term is not invertible, ...).
    #[error("non-invertible element: {0}")]
    NotInvertible(String),
    /// Division by an exactly zero denominator in fraction arithmetic.
    #[error("zero denominator in {0}")]
    ZeroDenominator(String),
    /// Cross-ratio of a quadruple with a coincident pair.
    #[error("degenerate cross-ratio: {0}")]
    DegenerateCrossRatio(String),
    /// A configuration violates a geometric precondition (coincident fixed
    /// points, multiplier out of range, fixed point outside its disk, ...).
    #[error("singular configuration: {0}")]
    SingularConfiguration(String),
    /// The 2g disks of a numeric group are not pairwise disjoint.
    #[error("disk disjointness violated: {0}")]
    DisjointnessViolation(String),
    /// Numeric evaluation too close to a pole of a differential.
    #[error("evaluation point within {eps} of pole at ({re}, {im})")]
    PoleProximity { re: f64, im: f64, eps: f64 },
    /// A precondition on exact inputs failed (non-generic evaluation points,
    /// negative diagonal exponent, truncation insufficiency, ...).
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A resource guardrail refused to start an oversized computation.
    #[error("resource guardrail: {0}")]
    ResourceGuard(String),
    /// An internal consistency assertion failed (integrality of a series
    /// that must be integral, fractional exponent surviving a theta product).
    #[error("internal consistency failure: {0}")]
    Internal(String),
    /// Text parsing of a serialized value failed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
