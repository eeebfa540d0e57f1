//! Exact and asymptotic counting of nonnegative integer matrices with
//! prescribed row and column sums.
//!
//! The library is organized in five layers:
//!
//! - [`margins`]: validated margin pairs, falling-factorial power sums,
//!   central moments, and regime classification.
//! - [`exact`]: exact counts over restricted entry alphabets by independent
//!   brute-force and dynamic-programming routes, uniform sampling, and the
//!   composition-law distribution of a random margin.
//! - [`asymptotics`]: logarithmic size estimates in several interchangeable
//!   forms, with applicability flags and error-order reporting.
//! - [`pairing`]: the point-pairing model whose weighted configurations
//!   count matrices exactly, with moments of the doublet count and Monte
//!   Carlo frequency estimation.
//! - [`switching`]: local degree-D switching moves with exhaustive site
//!   enumeration, ordered-count bounds, and generic bracketing-sum
//!   evaluators.
//!
//! Counts are exact [`num_bigint::BigUint`] values wrapped in
//! [`exact::BigCount`]; probabilities and moments are exact
//! [`num_rational::BigRational`] values wherever a closed form permits.

pub mod asymptotics;
pub mod exact;
pub mod margins;
pub mod pairing;
pub mod switching;

pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;
