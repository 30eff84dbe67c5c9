//! Event-level simulation of the network: Rayleigh fading, Bernoulli
//! backhaul, transmitter selection and the secrecy-rate comparison.
//!
//! # Random stream contract (v1)
//!
//! A generator is `ChaCha8Rng::seed_from_u64(seed)` (rand_chacha 0.3) with
//! its 64-bit stream number set to the trial index, so trial `i` always
//! consumes the same draws whatever the worker count. Within a trial the
//! draws are, in order: `N` backhaul uniforms, `|h_TD|²`, `|h_TE|²`, then
//! `|h_SnD|²`, `|h_SnE|²` for each `n`. Uniforms are the 53-bit `[0, 1)`
//! values of `Rng::gen::<f64>()`; exponentials use `−ln(1 − U)/λ`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::{derive, DerivedParams, SystemConfig};

pub const RNG_CONTRACT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    /// Strongest destination channel among backhaul-active transmitters.
    StsKnown,
    /// Largest secrecy rate among backhaul-active transmitters.
    OtsKnown,
    /// Strongest destination channel among all transmitters; outage if the
    /// chosen backhaul is down.
    StsBlind,
    /// Largest secrecy rate among all transmitters; outage if the chosen
    /// backhaul is down.
    OtsBlind,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::StsKnown,
        SchemeKind::OtsKnown,
        SchemeKind::StsBlind,
        SchemeKind::OtsBlind,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::StsKnown => "sts_known",
            SchemeKind::OtsKnown => "ots_known",
            SchemeKind::StsBlind => "sts_blind",
            SchemeKind::OtsBlind => "ots_blind",
        }
    }

    /// Blind schemes select without knowing which backhaul links are up.
    pub fn is_blind(self) -> bool {
        matches!(self, SchemeKind::StsBlind | SchemeKind::OtsBlind)
    }

    fn maximizes_secrecy_rate(self) -> bool {
        matches!(self, SchemeKind::OtsKnown | SchemeKind::OtsBlind)
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::invalid(
                    "scheme",
                    format!("unknown scheme {s:?}; expected one of sts_known, ots_known, sts_blind, ots_blind"),
                )
            })
    }
}

/// Identifies one independent substream of the simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSpec {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngSpec {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SopEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
    pub outages: u64,
}

impl SopEstimate {
    pub fn from_counts(outages: u64, trials: u64) -> Self {
        let estimate = outages as f64 / trials as f64;
        Self {
            estimate,
            std_error: (estimate * (1.0 - estimate) / trials as f64).sqrt(),
            trials,
            outages,
        }
    }
}

/// Per-trial constants, hoisted out of the sampling loop.
#[derive(Debug, Clone, Copy)]
struct TrialModel {
    params: DerivedParams,
    n_tx: usize,
    backhaul_prob: f64,
    scheme: SchemeKind,
}

#[inline]
fn exponential<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    -(-rng.gen::<f64>()).ln_1p() / rate
}

impl TrialModel {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> bool {
        let p = &self.params;
        if p.is_silenced() {
            return true;
        }
        let l = &p.lambda;

        let mut active: u64 = 0;
        for n in 0..self.n_tx {
            if rng.gen::<f64>() < self.backhaul_prob {
                active |= 1 << n;
            }
        }
        let h_td = exponential(rng, l.td);
        let h_te = exponential(rng, l.te);
        let dest_interference = p.gamma_t * h_td + 1.0;
        let eve_interference = p.gamma_t * h_te + 1.0;

        let blind = self.scheme.is_blind();
        let by_rate = self.scheme.maximizes_secrecy_rate();
        // (key, branch, rate ratio (1+Γ_SD)/(1+Γ_SE))
        let mut best: Option<(f64, usize, f64)> = None;
        for n in 0..self.n_tx {
            let h_sd = exponential(rng, l.sd);
            let h_se = exponential(rng, l.se);
            if !blind && active & (1 << n) == 0 {
                continue;
            }
            let snr_d = p.gamma_s * h_sd / dest_interference;
            let snr_e = p.gamma_s * h_se / eve_interference;
            let ratio = (1.0 + snr_d) / (1.0 + snr_e);
            let key = if by_rate { ratio } else { h_sd };
            // Strict comparison: ties go to the lowest index.
            if best.is_none_or(|(k, _, _)| key > k) {
                best = Some((key, n, ratio));
            }
        }
        match best {
            None => true,
            Some((_, n, ratio)) => {
                if blind && active & (1 << n) == 0 {
                    true
                } else {
                    ratio < p.rho
                }
            }
        }
    }
}

/// Simulates one trial; `true` means a secrecy outage.
///
/// `p` must be the result of `derive(config)`.
pub fn sample_trial<R: Rng + ?Sized>(
    p: &DerivedParams,
    config: &SystemConfig,
    scheme: SchemeKind,
    rng: &mut R,
) -> bool {
    TrialModel {
        params: *p,
        n_tx: config.n_transmitters,
        backhaul_prob: config.backhaul_prob,
        scheme,
    }
    .sample(rng)
}

/// Monte Carlo estimate of the outage probability over `trials` trials.
///
/// Trial `i` uses substream `i` of `seed`, and the trials are split into
/// `workers` contiguous chunks evaluated on the current rayon pool, so the
/// outcome is identical for every worker count.
pub fn simulate_sop(
    config: &SystemConfig,
    scheme: SchemeKind,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<SopEstimate> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    if workers == 0 {
        return Err(Error::invalid("workers", "must be at least 1"));
    }
    let params = derive(config)?;
    if params.is_silenced() {
        return Ok(SopEstimate::from_counts(trials, trials));
    }
    let model = TrialModel {
        params,
        n_tx: config.n_transmitters,
        backhaul_prob: config.backhaul_prob,
        scheme,
    };
    let base = ChaCha8Rng::seed_from_u64(seed);
    let count = |range: std::ops::Range<u64>| -> u64 {
        range
            .filter(|&i| {
                let mut rng = base.clone();
                rng.set_stream(i);
                model.sample(&mut rng)
            })
            .count() as u64
    };

    let chunks = (workers as u64).min(trials);
    let outages = if chunks == 1 {
        count(0..trials)
    } else {
        let size = trials.div_ceil(chunks);
        (0..chunks)
            .into_par_iter()
            .map(|c| count(c * size..((c + 1) * size).min(trials)))
            .sum()
    };
    Ok(SopEstimate::from_counts(outages, trials))
}
