//! Exact coefficient arithmetic.
//!
//! Everything downstream is built from five types:
//!
//! * [`MultiPoly`]: sparse multivariate polynomials over the integers,
//!   exponent vectors ordered graded-lexicographically;
//! * [`PolyFraction`]: quotients of two `MultiPoly`, normalized by integer
//!   content and denominator sign only (no polynomial GCD is attempted;
//!   equality is decided by cross-multiplication);
//! * [`MultiSeries<C>`]: multivariate power series in `y_1..y_g` truncated
//!   by total degree, over any [`Scalar`] coefficient ring. `C = PolyFraction`
//!   is the symbolic mode, `C = BigRational` the evaluated mode; one series
//!   uses one mode throughout by construction;
//! * [`QSeries`]: dense Laurent series in one variable q over the rationals,
//!   carrying the exponent through which their coefficients are known;
//! * [`RatFunc`]: univariate rational functions over the rationals, the
//!   coefficient domain for q-expansions of two-variable objects.
//!
//! The [`textform`] module gives every type a canonical text form with
//! bit-exact round-trips.

mod multipoly;
mod multiseries;
mod polyfrac;
mod qseries;
mod ratfunc;
mod scalar;
pub mod textform;

pub use multipoly::{slot, Monomial, MultiPoly};
pub use multiseries::MultiSeries;
pub use polyfrac::PolyFraction;
pub use qseries::QSeries;
pub use ratfunc::{RatFunc, UniPoly};
pub use scalar::Scalar;
