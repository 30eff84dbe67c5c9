//! Secrecy outage probability of a cognitive small-cell network whose
//! secondary transmitters hang off unreliable wireless backhaul links.
//!
//! Two transmitter-selection rules are covered: picking the strongest
//! destination channel ([`analytic::sop_sts`]) and picking the largest
//! instantaneous secrecy rate ([`analytic::sop_ots`]). Each has an exact
//! evaluation, a high-SNR asymptote, and a Monte Carlo counterpart in
//! [`montecarlo`], which also simulates selection without backhaul
//! knowledge.

// Reference constants keep their published digits, index loops mirror the
// summation formulas, and negated comparisons are how NaN fails range checks.
#![allow(
    clippy::excessive_precision,
    clippy::needless_range_loop,
    clippy::neg_cmp_op_on_partial_ord
)]

pub mod analytic;
pub mod cli;
mod error;
pub mod montecarlo;
pub mod params;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
