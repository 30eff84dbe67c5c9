//! System configuration in the dB domain and the linear-scale parameters
//! derived from it, including the secondary transmit power constraint.
//!
//! Mean channel power gains are given in dB as `Ω = 1/λ`, so a value of
//! `-6` dB means `Ω = 10^(-0.6)` and `λ = 10^(0.6)`. Transmit powers only
//! enter through the SNR ratios `Γ_T = P_T/N₀` and `Γ_S = P_S/N₀`.

use crate::error::{Error, Result};

/// Largest number of small-cell transmitters accepted. The alternating
/// binomial sums of the closed forms lose all precision well before this.
pub const MAX_TRANSMITTERS: usize = 64;

/// Mean channel power gains `1/λ` in dB for every link of the system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanPowersDb {
    /// Primary transmitter to primary receiver.
    pub tr: f64,
    /// Primary transmitter to destination (interference).
    pub td: f64,
    /// Small-cell transmitter to destination.
    pub sd: f64,
    /// Small-cell transmitter to primary receiver (interference).
    pub sr: f64,
    /// Primary transmitter to eavesdropper (interference).
    pub te: f64,
    /// Small-cell transmitter to eavesdropper.
    pub se: f64,
}

impl Default for MeanPowersDb {
    fn default() -> Self {
        Self {
            tr: 3.0,
            td: -6.0,
            sd: 3.0,
            sr: -3.0,
            te: 6.0,
            se: -3.0,
        }
    }
}

/// User-facing parameters of the network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub n_transmitters: usize,
    /// Probability that a backhaul link is active.
    pub backhaul_prob: f64,
    /// Maximum tolerated outage probability at the primary receiver.
    pub primary_outage_threshold: f64,
    /// Primary rate threshold in bits/s/Hz.
    pub primary_rate_threshold: f64,
    /// Secrecy rate threshold in bits/s/Hz.
    pub secrecy_rate_threshold: f64,
    /// Primary transmit SNR `P_T/N₀` in dB.
    pub gamma_t_db: f64,
    pub mean_power_db: MeanPowersDb,
}

impl Default for SystemConfig {
    /// The reference operating point used throughout the figures:
    /// `N = 6`, `s = 0.99`, `Φ = 0.1`, `β = R_th = 0.5`, `Γ_T = 30` dB.
    fn default() -> Self {
        Self {
            n_transmitters: 6,
            backhaul_prob: 0.99,
            primary_outage_threshold: 0.1,
            primary_rate_threshold: 0.5,
            secrecy_rate_threshold: 0.5,
            gamma_t_db: 30.0,
            mean_power_db: MeanPowersDb::default(),
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_transmitters == 0 || self.n_transmitters > MAX_TRANSMITTERS {
            return Err(Error::invalid(
                "n_transmitters",
                format!(
                    "must be in 1..={MAX_TRANSMITTERS}, got {}",
                    self.n_transmitters
                ),
            ));
        }
        let s = self.backhaul_prob;
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::invalid(
                "backhaul_prob",
                format!("must lie in [0, 1], got {s}"),
            ));
        }
        let phi = self.primary_outage_threshold;
        if !(phi > 0.0 && phi < 1.0) {
            return Err(Error::invalid(
                "primary_outage_threshold",
                format!("must lie in (0, 1), got {phi}"),
            ));
        }
        let beta = self.primary_rate_threshold;
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::invalid(
                "primary_rate_threshold",
                format!("must be positive and finite, got {beta}"),
            ));
        }
        let r_th = self.secrecy_rate_threshold;
        if !(r_th > 0.0 && r_th.is_finite()) {
            return Err(Error::invalid(
                "secrecy_rate_threshold",
                format!("must be positive and finite, got {r_th}"),
            ));
        }
        if !self.gamma_t_db.is_finite() {
            return Err(Error::invalid(
                "gamma_t_db",
                format!("must be finite, got {}", self.gamma_t_db),
            ));
        }
        let p = &self.mean_power_db;
        for (name, v) in [
            ("tr", p.tr),
            ("td", p.td),
            ("sd", p.sd),
            ("sr", p.sr),
            ("te", p.te),
            ("se", p.se),
        ] {
            // 10^(±300/10) stays comfortably inside f64 range.
            if !(v.is_finite() && v.abs() <= 300.0) {
                return Err(Error::invalid(
                    "mean_power_db",
                    format!("{name} must be finite and within ±300 dB, got {v}"),
                ));
            }
        }
        Ok(())
    }
}

/// Exponential rate parameters `λ = 1/Ω` of the six links, linear scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelRates {
    pub tr: f64,
    pub td: f64,
    pub sd: f64,
    pub sr: f64,
    pub te: f64,
    pub se: f64,
}

impl ChannelRates {
    pub fn from_db(p: &MeanPowersDb) -> Self {
        Self {
            tr: rate_from_db(p.tr),
            td: rate_from_db(p.td),
            sd: rate_from_db(p.sd),
            sr: rate_from_db(p.sr),
            te: rate_from_db(p.te),
            se: rate_from_db(p.se),
        }
    }
}

/// Linear-scale quantities consumed by the analytic and simulation code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub lambda: ChannelRates,
    pub gamma_t: f64,
    /// `2^β − 1`.
    pub gamma_0: f64,
    /// `2^R_th`.
    pub rho: f64,
    /// Power-constraint coefficient; non-positive means the secondary
    /// network may not transmit at all.
    pub xi: f64,
    /// `Γ_T λ_sr ξ` when `ξ > 0`, otherwise zero.
    pub gamma_s: f64,
}

impl DerivedParams {
    /// Whether the secondary network is silenced by the primary constraint.
    pub fn is_silenced(&self) -> bool {
        self.gamma_s <= 0.0
    }
}

/// The `Γ_T → ∞` counterpart of [`DerivedParams`]. It has no `Γ_T` field,
/// so nothing built on it can depend on the primary transmit power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticParams {
    pub lambda: ChannelRates,
    pub gamma_0: f64,
    pub rho: f64,
    /// High-SNR limit of the power-constraint coefficient; always positive.
    pub xi: f64,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn rate_from_db(mean_power_db: f64) -> f64 {
    10f64.powf(-mean_power_db / 10.0)
}

/// Converts a validated configuration into linear-scale parameters.
pub fn derive(config: &SystemConfig) -> Result<DerivedParams> {
    config.validate()?;
    let lambda = ChannelRates::from_db(&config.mean_power_db);
    let gamma_t = db_to_linear(config.gamma_t_db);
    let gamma_0 = config.primary_rate_threshold.exp2() - 1.0;
    let rho = config.secrecy_rate_threshold.exp2();
    let phi = config.primary_outage_threshold;

    // exp(-u)/(1-Φ) - 1 rewritten as (Φ + expm1(-u))/(1-Φ) to stay exact
    // when u = λ_tr Γ₀/Γ_T is tiny.
    let u = lambda.tr * gamma_0 / gamma_t;
    let xi = (phi + (-u).exp_m1()) / ((1.0 - phi) * lambda.tr * gamma_0);
    let gamma_s = if xi > 0.0 {
        gamma_t * lambda.sr * xi
    } else {
        0.0
    };

    Ok(DerivedParams {
        lambda,
        gamma_t,
        gamma_0,
        rho,
        xi,
        gamma_s,
    })
}

/// High-SNR limit of `ξ`: `Φ / ((1 − Φ) λ_tr Γ₀)`.
pub fn xi_asymptotic(config: &SystemConfig) -> Result<f64> {
    config.validate()?;
    let lambda_tr = rate_from_db(config.mean_power_db.tr);
    let gamma_0 = config.primary_rate_threshold.exp2() - 1.0;
    let phi = config.primary_outage_threshold;
    Ok(phi / (1.0 - phi) / (lambda_tr * gamma_0))
}

/// Parameters for the asymptotic formulas. `gamma_t_db` is ignored.
pub fn derive_asymptotic(config: &SystemConfig) -> Result<AsymptoticParams> {
    let xi = xi_asymptotic(config)?;
    Ok(AsymptoticParams {
        lambda: ChannelRates::from_db(&config.mean_power_db),
        gamma_0: config.primary_rate_threshold.exp2() - 1.0,
        rho: config.secrecy_rate_threshold.exp2(),
        xi,
    })
}
