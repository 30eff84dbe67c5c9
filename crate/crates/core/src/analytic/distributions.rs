use super::{binomial_row, check_selection, CompensatedSum};
use crate::error::{Error, Result};
use crate::params::DerivedParams;

fn check_abscissa(x: f64) -> Result<()> {
    if x >= 0.0 && !x.is_nan() {
        Ok(())
    } else {
        Err(Error::invalid(
            "x",
            format!("must be non-negative, got {x}"),
        ))
    }
}

/// CDF of the primary receiver SINR under interference from one secondary
/// transmitter: `1 − κ/(x+κ) · exp(−λ_tr x/Γ_T)`, `κ = λ_sr Γ_T/(λ_tr Γ_S)`.
/// With a silenced secondary network it is the plain exponential CDF.
pub fn cdf_gamma_tr(x: f64, p: &DerivedParams) -> Result<f64> {
    check_abscissa(x)?;
    if p.is_silenced() {
        return Ok(-(-p.lambda.tr * x / p.gamma_t).exp_m1());
    }
    let decay = (-p.lambda.tr * x / p.gamma_t).exp();
    let kappa = p.lambda.sr * p.gamma_t / (p.lambda.tr * p.gamma_s);
    Ok(1.0 - decay / (1.0 + x / kappa))
}

/// CDF of the destination SINR after sub-optimal selection among the
/// backhaul-active transmitters (an empty active set gives SINR zero).
pub fn cdf_gamma_sd_sts(x: f64, p: &DerivedParams, n_tx: usize, s: f64) -> Result<f64> {
    check_abscissa(x)?;
    check_selection(n_tx, s)?;
    if p.is_silenced() {
        return Ok(1.0);
    }
    let binom = binomial_row(n_tx);
    let mut acc = CompensatedSum::default();
    let mut s_pow = 1.0;
    for n in 1..=n_tx {
        s_pow *= s;
        let nf = n as f64;
        let mu = p.lambda.td * p.gamma_s / (nf * p.lambda.sd * p.gamma_t);
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let term =
            binom[n] * sign * s_pow / (1.0 + x / mu) * (-nf * p.lambda.sd * x / p.gamma_s).exp();
        acc.add(term);
    }
    Ok(1.0 - acc.value())
}

fn eavesdropper_scale(p: &DerivedParams) -> f64 {
    p.lambda.te * p.gamma_s / (p.lambda.se * p.gamma_t)
}

/// CDF of the eavesdropper SINR of the selected transmitter,
/// `1 − ν/(x+ν) · exp(−λ_se x/Γ_S)` with `ν = λ_te Γ_S/(λ_se Γ_T)`.
pub fn cdf_gamma_se(x: f64, p: &DerivedParams) -> Result<f64> {
    check_abscissa(x)?;
    if p.is_silenced() {
        return Ok(1.0);
    }
    let nu = eavesdropper_scale(p);
    Ok(1.0 - (-p.lambda.se * x / p.gamma_s).exp() / (1.0 + x / nu))
}

/// Density of the eavesdropper SINR; the derivative of [`cdf_gamma_se`].
pub fn pdf_gamma_se(x: f64, p: &DerivedParams) -> Result<f64> {
    check_abscissa(x)?;
    if p.is_silenced() {
        return Err(Error::invalid(
            "gamma_s",
            "eavesdropper SINR is identically zero; it has no density",
        ));
    }
    let nu = eavesdropper_scale(p);
    let decay = (-p.lambda.se * x / p.gamma_s).exp();
    let xn = x + nu;
    Ok(p.lambda.te / p.gamma_t * decay / xn + nu * decay / (xn * xn))
}
