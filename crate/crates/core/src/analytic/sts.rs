//! Sub-optimal selection: the active transmitter with the strongest
//! destination channel is chosen.

use super::{binomial_row, check_selection, pole_pair_kernel, CompensatedSum, SopMethod, SopValue};
use crate::error::Result;
use crate::params::{AsymptoticParams, DerivedParams};
use crate::specfun::{ei_neg_scaled, expint_scaled};

/// Relative pole separation below which the difference quotients are
/// replaced by their Taylor expansion about the second pole.
const NEAR_POLE: f64 = 0.25;

/// Exact secrecy outage probability of STS in closed form.
///
/// Each binomial term is
/// `λ_te λ_td Γ_S/(n ρ λ_sd Γ_T²) · s^n · exp(−n λ_sd (ρ−1)/Γ_S) · (I₁ + Γ_S/λ_se · I₂)`
/// where `I₁ = ∫ e^{−cx}/((x+a)(x+b)) dx` and `I₂ = ∫ e^{−cx}/((x+a)(x+b)²) dx`
/// over `[0, ∞)`, with
/// `a = (λ_td Γ_S + n ρ λ_sd Γ_T − n λ_sd Γ_T)/(n ρ λ_sd Γ_T)`,
/// `b = λ_te Γ_S/(λ_se Γ_T)` and `c = (n ρ λ_sd + λ_se)/Γ_S`.
pub fn sop_sts(p: &DerivedParams, n_tx: usize, s: f64) -> Result<SopValue> {
    check_selection(n_tx, s)?;
    if p.is_silenced() || s == 0.0 {
        return Ok(SopValue::certain(SopMethod::ExactClosedForm));
    }
    let l = &p.lambda;
    let (gt, gs, rho) = (p.gamma_t, p.gamma_s, p.rho);
    let binom = binomial_row(n_tx);
    let b = l.te * gs / (l.se * gt);

    let mut acc = CompensatedSum::default();
    let mut s_pow = 1.0;
    for n in 1..=n_tx {
        s_pow *= s;
        let nf = n as f64;
        let a = (l.td * gs + nf * rho * l.sd * gt - nf * l.sd * gt) / (nf * rho * l.sd * gt);
        let c = (nf * rho * l.sd + l.se) / gs;
        let (i1, i2) = exp_ei_pair(a, b, c)?;
        let prefactor = l.te * l.td * gs / (nf * rho * l.sd * gt * gt);
        let decay = (-nf * l.sd * (rho - 1.0) / gs).exp();
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        acc.add(sign * binom[n] * prefactor * s_pow * decay * (i1 + gs / l.se * i2));
    }
    Ok(SopValue::new(1.0 - acc.value(), SopMethod::ExactClosedForm))
}

/// `(I₁, I₂)` for poles at `−a`, `−b` and decay `c`.
///
/// Away from `a = b` these are
/// `I₁ = (e^{ac}Ei(−ac) − e^{bc}Ei(−bc))/(a − b)` and
/// `I₂ = (J₂(b) − I₁)/(a − b)` with `J₂(b) = ∫ e^{−cx}/(x+b)² dx = c·e^{bc}Ei(−bc) + 1/b`,
/// the latter taken from `e^{bc}E₂(bc)/b` to avoid the cancellation.
/// Near `a = b` both are expanded in `h = a − b`:
/// `I₁ = Σ (−h)^k J_{k+2}(b)`, `I₂ = Σ (−h)^k J_{k+3}(b)`,
/// `J_m(b) = e^{bc} E_m(bc)/b^{m−1}`.
pub(crate) fn exp_ei_pair(a: f64, b: f64, c: f64) -> Result<(f64, f64)> {
    let h = a - b;
    let bc = b * c;
    if h.abs() > NEAR_POLE * b {
        let ga = ei_neg_scaled(a * c)?;
        let gb = ei_neg_scaled(bc)?;
        let i1 = (ga - gb) / h;
        let j2 = expint_scaled(2, bc)? / b;
        return Ok((i1, (j2 - i1) / h));
    }

    let ratio = -h / b;
    let mut i1 = 0.0;
    let mut i2 = 0.0;
    let mut pow = 1.0; // (−h/b)^k
    let mut next = expint_scaled(2, bc)?;
    for k in 0..200u32 {
        let cur = next;
        next = expint_scaled(k + 3, bc)?;
        let t1 = pow * cur / b;
        let t2 = pow * next / (b * b);
        i1 += t1;
        i2 += t2;
        if t1.abs() <= 1e-17 * i1.abs() && t2.abs() <= 1e-17 * i2.abs() {
            break;
        }
        pow *= ratio;
    }
    Ok((i1, i2))
}

/// High-SNR limit of the STS outage probability; does not depend on `Γ_T`.
///
/// `1 − Σ C(N,n)(−1)^{n+1} λ_te λ_td λ_sr² ξ²/(n ρ λ_sd λ_se) · s^n · K(a, b)`
/// with `K(a, b) = ∫ dx/((x+a)(x+b)²)`,
/// `a = (n(ρ−1)λ_sd + λ_sr λ_td ξ)/(n ρ λ_sd)` and `b = λ_te λ_sr ξ/λ_se`.
pub fn sop_sts_asymptotic(p: &AsymptoticParams, n_tx: usize, s: f64) -> Result<SopValue> {
    check_selection(n_tx, s)?;
    if s == 0.0 {
        return Ok(SopValue::certain(SopMethod::Asymptotic));
    }
    let l = &p.lambda;
    let (xi, rho) = (p.xi, p.rho);
    let binom = binomial_row(n_tx);
    let b = l.te * l.sr * xi / l.se;

    let mut acc = CompensatedSum::default();
    let mut s_pow = 1.0;
    for n in 1..=n_tx {
        s_pow *= s;
        let nf = n as f64;
        let a = (nf * (rho - 1.0) * l.sd + l.sr * l.td * xi) / (nf * rho * l.sd);
        let coeff = l.te * l.td * l.sr * l.sr * xi * xi / (nf * rho * l.sd * l.se);
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        acc.add(sign * binom[n] * coeff * s_pow * pole_pair_kernel(a, b));
    }
    Ok(SopValue::new(1.0 - acc.value(), SopMethod::Asymptotic))
}
