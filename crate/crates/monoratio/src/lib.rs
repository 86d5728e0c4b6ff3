//! Monotonicity classification for ratios of function series and integral
//! transforms.
//!
//! The crate answers one question in several guises: given a ratio
//! A(t)/B(t) of two kernel series (or F(x)/G(x) of two integral transforms),
//! is it monotone on its domain, or does it turn exactly once — and if it
//! turns, where? The decision machinery combines
//!
//! - a catalog of kernel families with verified structural class
//!   memberships ([`kernels`]),
//! - evaluators for the ratios, their derivatives, the H function
//!   H = (F'/G')G - F, and endpoint limits of H ([`ratio_engine`]),
//! - rule-based predictors, the D1..D7 parameter-region classifier for
//!   gamma-function ratios, and turning-point location ([`classifier`]),
//! - a brute-force grid oracle that validates every analytic verdict
//!   ([`oracle`]),
//! - the Laplace-transform-ratio stochastic order for nonnegative random
//!   variables ([`stochastic`]).
//!
//! The `monoratio` binary exposes the same functionality on the command
//! line with JSON/CSV output.

pub mod classifier;
pub mod config;
pub mod error;
pub mod grid;
pub mod kernels;
pub mod oracle;
pub mod ratio_engine;
pub mod specfun;
pub mod stochastic;
pub mod suite;
pub mod verdict;

pub use error::{Error, Result};
pub use specfun::EvalResult;
pub use verdict::{MonotonicityVerdict, Pattern};
