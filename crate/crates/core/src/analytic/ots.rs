//! Optimal selection: the active transmitter with the largest
//! instantaneous secrecy rate is chosen.

use super::{binomial_row, check_selection, pole_pair_kernel, CompensatedSum, SopMethod, SopValue};
use crate::error::{Error, Result};
use crate::params::{AsymptoticParams, DerivedParams};
use crate::quadrature::{integrate_double_semi_inf, DEFAULT_BUDGET_2D};
use crate::specfun::hyp2f1_n;

pub const DEFAULT_OTS_REL_TOL: f64 = 1e-8;

/// Exact OTS outage probability by double quadrature over the common
/// interferer gains `x = |h_TD|²`, `y = |h_TE|²`:
///
/// `∫∫ [1 − s λ_se(Γ_T y+1)/(ρλ_sd(Γ_T x+1) + λ_se(Γ_T y+1)) · exp(−λ_sd(ρ−1)(Γ_T x+1)/Γ_S)]^N
///  λ_td e^{−λ_td x} λ_te e^{−λ_te y} dx dy`.
///
/// Given the interferers the branches are independent, and each is in
/// outage when its backhaul is down or its own secrecy rate falls short.
pub fn sop_ots(p: &DerivedParams, n_tx: usize, s: f64, rel_tol: f64) -> Result<SopValue> {
    sop_ots_with_budget(p, n_tx, s, rel_tol, DEFAULT_BUDGET_2D)
}

pub fn sop_ots_with_budget(
    p: &DerivedParams,
    n_tx: usize,
    s: f64,
    rel_tol: f64,
    budget: usize,
) -> Result<SopValue> {
    check_selection(n_tx, s)?;
    if p.is_silenced() || s == 0.0 {
        return Ok(SopValue::certain(SopMethod::ExactQuadrature));
    }
    let l = p.lambda;
    let (gt, gs, rho) = (p.gamma_t, p.gamma_s, p.rho);
    let n = n_tx as i32;
    let integrand = |x: f64, y: f64| {
        let dx = gt * x + 1.0;
        let ey = l.se * (gt * y + 1.0);
        let win = ey / (rho * l.sd * dx + ey) * (-l.sd * (rho - 1.0) * dx / gs).exp();
        let density = l.td * (-l.td * x).exp() * l.te * (-l.te * y).exp();
        if density == 0.0 {
            0.0
        } else {
            (1.0 - s * win).powi(n) * density
        }
    };
    let r = integrate_double_semi_inf(integrand, rel_tol, budget)?;
    Ok(SopValue::new(r.value, SopMethod::ExactQuadrature))
}

/// High-SNR limit of the OTS outage probability; does not depend on `Γ_T`.
///
/// With `b = λ_se/(ρλ_sd)` and `a_n = (λ_sd(ρ−1)n + λ_td λ_sr ξ)/(λ_sr ξ)`:
///
/// `1 − s λ_se λ_td λ_te N/(ρλ_sd) · [ln(λ_te/(a₁b))/(λ_te − a₁b)² − 1/((λ_te − a₁b)λ_te)]
///    − Σ_{n=2}^{N} C(N,n)(−1)^{n+1} s^n b^n λ_td λ_te/(n−1)! · B_n`
///
/// where `B_n` is the bracket evaluated by [`ots_asymptotic_bracket`].
pub fn sop_ots_asymptotic(p: &AsymptoticParams, n_tx: usize, s: f64) -> Result<SopValue> {
    check_selection(n_tx, s)?;
    if s == 0.0 {
        return Ok(SopValue::certain(SopMethod::Asymptotic));
    }
    let l = &p.lambda;
    let (xi, rho) = (p.xi, p.rho);
    let b = l.se / (rho * l.sd);
    let a = |n: usize| (l.sd * (rho - 1.0) * n as f64 + l.td * l.sr * xi) / (l.sr * xi);
    let binom = binomial_row(n_tx);

    let mut acc = CompensatedSum::default();
    // The n = 1 bracket is ∫ dt/((t + a₁b)(t + λ_te)²).
    let first = s * l.se * l.td * l.te * n_tx as f64 / (rho * l.sd);
    acc.add(first * pole_pair_kernel(a(1) * b, l.te));

    let mut s_pow = s;
    let mut b_pow = b;
    let mut fact = 1.0; // (n−1)!
    for n in 2..=n_tx {
        s_pow *= s;
        b_pow *= b;
        fact *= (n - 1) as f64;
        let bracket = ots_asymptotic_bracket(n as u32, a(n), b, l.te)?;
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        acc.add(sign * binom[n] * s_pow * b_pow * l.td * l.te / fact * bracket);
    }
    Ok(SopValue::new(1.0 - acc.value(), SopMethod::Asymptotic))
}

/// The `n ≥ 2` bracket of the asymptotic OTS expression,
///
/// `Σ_{k=1}^{n−1} (k−1)!(n−k)!(−a)^{n−k−1}/(b^k λ^{n−k+1})
///  + (−a)^{n−1} n!/((n+1)λ^{n+1}) · ₂F₁(n+1, 1; n+2; (λ − ab)/λ)`.
///
/// Its terms alternate and grow like `(ab/λ)^{n−1}` relative to the sum, so
/// the literal sum is used only while that cancellation is harmless. The
/// fallback is the same quantity rewritten with `r = ab/λ`,
/// `w = 1 − 1/r`:
///
/// `n!/(b^{n−1}λ²) · M_n`, `M_n = (1/r)[₂F₁(n,1;n+1;w)/n − ₂F₁(n+1,1;n+2;w)/(n+1)]`,
///
/// where `M_n = ∫₀¹ v^{n−1}(1−v)/(1 − (1−r)(1−v)) dv`.
pub fn ots_asymptotic_bracket(n: u32, a: f64, b: f64, lambda_te: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid(
            "n",
            format!("bracket defined for n ≥ 2, got {n}"),
        ));
    }
    let (direct, magnitude) = ots_bracket_direct(n, a, b, lambda_te)?;
    // Relative error of the literal sum is about ε · Σ|terms| / |sum|.
    if magnitude <= 1e3 * direct.abs() {
        return Ok(direct);
    }
    ots_bracket_stable(n, a, b, lambda_te)
}

/// Literal evaluation; returns the sum and the sum of term magnitudes.
pub(crate) fn ots_bracket_direct(n: u32, a: f64, b: f64, lambda_te: f64) -> Result<(f64, f64)> {
    let factorial = |m: u32| (1..=m).fold(1.0f64, |acc, k| acc * f64::from(k));
    let mut acc = CompensatedSum::default();
    let mut magnitude = 0.0;
    for k in 1..n {
        let term = factorial(k - 1) * factorial(n - k) * (-a).powi((n - k - 1) as i32)
            / (b.powi(k as i32) * lambda_te.powi((n - k + 1) as i32));
        acc.add(term);
        magnitude += term.abs();
    }
    let z = (lambda_te - a * b) / lambda_te;
    let tail = (-a).powi(n as i32 - 1) * factorial(n)
        / ((f64::from(n) + 1.0) * lambda_te.powi(n as i32 + 1))
        * hyp2f1_n(n, z)?;
    acc.add(tail);
    magnitude += tail.abs();
    Ok((acc.value(), magnitude))
}

pub(crate) fn ots_bracket_stable(n: u32, a: f64, b: f64, lambda_te: f64) -> Result<f64> {
    let nf = f64::from(n);
    let r = a * b / lambda_te;
    let w = (r - 1.0) / r;
    let m = (hyp2f1_n(n - 1, w)? / nf - hyp2f1_n(n, w)? / (nf + 1.0)) / r;
    let factorial = (1..=n).fold(1.0f64, |acc, k| acc * f64::from(k));
    Ok(factorial * m / (b.powi(n as i32 - 1) * lambda_te * lambda_te))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{sop_sts, sop_sts_asymptotic};
    use crate::params::{derive, derive_asymptotic, SystemConfig};
    use crate::quadrature::integrate_interval;

    #[test]
    fn bracket_paths_agree_when_well_conditioned() {
        for n in 2..=6 {
            for &(a, b, lt) in &[
                (0.5, 0.8, 1.0),
                (1.0, 1.0, 1.0),
                (0.2, 2.0, 3.0),
                (2.0, 0.9, 1.5),
            ] {
                let (direct, mag) = ots_bracket_direct(n, a, b, lt).unwrap();
                let stable = ots_bracket_stable(n, a, b, lt).unwrap();
                assert!(mag < 1e3 * direct.abs());
                assert!(
                    ((direct - stable) / stable).abs() < 1e-11,
                    "n={n} a={a} b={b}: {direct} vs {stable}"
                );
            }
        }
    }

    #[test]
    fn stable_bracket_matches_its_integral() {
        // B_n = n!/(b^{n−1}λ²) ∫₀¹ v^{n−1}(1−v)/(1 − (1−r)(1−v)) dv
        for n in 2..=6u32 {
            for &(a, b, lt) in &[(4.2, 2.83, 0.25), (30.0, 2.0, 0.1), (0.5, 0.5, 1.0)] {
                let r = a * b / lt;
                let m = integrate_interval(
                    |v| v.powi(n as i32 - 1) * (1.0 - v) / (1.0 - (1.0 - r) * (1.0 - v)),
                    0.0,
                    1.0,
                    1e-13,
                    100_000,
                )
                .unwrap()
                .value;
                let fact = (1..=n).fold(1.0, |acc, k| acc * k as f64);
                let want = fact * m / (b.powi(n as i32 - 1) * lt * lt);
                let got = ots_asymptotic_bracket(n, a, b, lt).unwrap();
                assert!(
                    ((got - want) / want).abs() < 1e-11,
                    "n={n}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn zero_backhaul_means_certain_outage() {
        let p = derive(&SystemConfig::default()).unwrap();
        assert_eq!(sop_ots(&p, 6, 0.0, 1e-8).unwrap().value, 1.0);
        let ap = derive_asymptotic(&SystemConfig::default()).unwrap();
        assert_eq!(sop_ots_asymptotic(&ap, 6, 0.0).unwrap().value, 1.0);
    }

    #[test]
    fn single_transmitter_matches_sts() {
        for gt in [10.0, 30.0] {
            let p = derive(&SystemConfig {
                gamma_t_db: gt,
                ..SystemConfig::default()
            })
            .unwrap();
            let ots = sop_ots(&p, 1, 0.9, 1e-9).unwrap().value;
            let sts = sop_sts(&p, 1, 0.9).unwrap().value;
            assert!((ots - sts).abs() < 1e-8, "{ots} vs {sts}");
        }
        let ap = derive_asymptotic(&SystemConfig::default()).unwrap();
        let a = sop_ots_asymptotic(&ap, 1, 0.9).unwrap().value;
        let b = sop_sts_asymptotic(&ap, 1, 0.9).unwrap().value;
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn reference_asymptote() {
        // 40-digit evaluation of the closed form at the reference point.
        let ap = derive_asymptotic(&SystemConfig::default()).unwrap();
        let got = sop_ots_asymptotic(&ap, 6, 0.99).unwrap().value;
        let want = 0.005_274_670_910_884_785_841;
        assert!(((got - want) / want).abs() < 1e-10, "{got}");
    }

    #[test]
    fn optimal_is_no_worse_than_sub_optimal() {
        let p = derive(&SystemConfig::default()).unwrap();
        let ots = sop_ots(&p, 6, 0.99, 1e-8).unwrap().value;
        let sts = sop_sts(&p, 6, 0.99).unwrap().value;
        assert!(ots <= sts + 1e-9, "{ots} vs {sts}");
    }

    #[test]
    fn small_budget_reports_quadrature_failure() {
        let p = derive(&SystemConfig::default()).unwrap();
        let err = sop_ots_with_budget(&p, 6, 0.99, 1e-12, 500).unwrap_err();
        assert!(matches!(err, Error::Quadrature(_)));
        assert!(!err.is_validation());
    }
}
