//! Distributions of the link SINRs and the secrecy outage probability of
//! both selection schemes: exact (closed form for STS, double quadrature
//! for OTS) and high-SNR asymptotic.

mod distributions;
mod ots;
mod sts;

pub use distributions::{cdf_gamma_sd_sts, cdf_gamma_se, cdf_gamma_tr, pdf_gamma_se};
pub use ots::{sop_ots, sop_ots_asymptotic, sop_ots_with_budget, DEFAULT_OTS_REL_TOL};
pub use sts::{sop_sts, sop_sts_asymptotic};

use crate::error::{Error, Result};
use crate::params::MAX_TRANSMITTERS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SopMethod {
    ExactClosedForm,
    ExactQuadrature,
    Asymptotic,
}

/// A secrecy outage probability together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SopValue {
    pub value: f64,
    pub method: SopMethod,
}

impl SopValue {
    fn new(raw: f64, method: SopMethod) -> Self {
        Self {
            value: raw.clamp(0.0, 1.0),
            method,
        }
    }

    fn certain(method: SopMethod) -> Self {
        Self { value: 1.0, method }
    }
}

fn check_selection(n_tx: usize, s: f64) -> Result<()> {
    if n_tx == 0 || n_tx > MAX_TRANSMITTERS {
        return Err(Error::invalid(
            "n_transmitters",
            format!("must be in 1..={MAX_TRANSMITTERS}, got {n_tx}"),
        ));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::invalid(
            "backhaul_prob",
            format!("must lie in [0, 1], got {s}"),
        ));
    }
    Ok(())
}

/// `C(N, n)` for `n = 0..=N`.
fn binomial_row(n_tx: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(n_tx + 1);
    let mut c = 1.0f64;
    row.push(c);
    for k in 1..=n_tx {
        c = c * (n_tx + 1 - k) as f64 / k as f64;
        row.push(c.round());
    }
    row
}

/// Neumaier-compensated accumulator for the alternating binomial sums.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.carry
    }
}

/// `∫₀^∞ dx / ((x + a)(x + b)²) = (ln b − ln a)/(a − b)² + 1/(b (a − b))`
/// for `a, b > 0`, switching to a power series in `(a − b)/b` when the
/// two poles nearly coincide.
fn pole_pair_kernel(a: f64, b: f64) -> f64 {
    let u = (a - b) / b;
    if u.abs() <= 0.25 {
        // (1/b²) Σ_k (−u)^k/(k+2)
        let mut sum = 0.0;
        let mut pow = 1.0;
        for k in 0..200 {
            let term = pow / (k as f64 + 2.0);
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
            pow *= -u;
        }
        sum / (b * b)
    } else {
        // (1/(b² u)) (1 − ln(1+u)/u)
        (1.0 - u.ln_1p() / u) / (b * b * u)
    }
}
