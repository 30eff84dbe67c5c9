//! Parameter sweeps over the system configuration, cross-validation
//! reports, and the `sop` command-line front end.

mod app;
mod config;
mod csv;

pub use app::{run, Cli, EXIT_COMPARISON, EXIT_NUMERIC, EXIT_OK, EXIT_VALIDATION};
pub use config::{apply_config_text, preset, preset_axis_values, PresetMember, PRESET_NAMES};
pub use csv::{
    format_g, gnuplot_script, write_compare_csv, write_sweep_csv, COMPARE_HEADER, SWEEP_HEADER,
};

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analytic::{sop_ots, sop_ots_asymptotic, sop_sts, sop_sts_asymptotic};
use crate::error::{Error, Result};
use crate::montecarlo::{simulate_sop, SchemeKind};
use crate::params::{derive, derive_asymptotic, SystemConfig, MAX_TRANSMITTERS};

pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 2024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    GammaTDb,
    BackhaulProb,
    Phi,
    NTransmitters,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::GammaTDb => "gamma_t_db",
            Axis::BackhaulProb => "s",
            Axis::Phi => "phi",
            Axis::NTransmitters => "n_transmitters",
        }
    }

    /// The configuration with the swept field replaced by `value`.
    pub fn apply(self, fixed: &SystemConfig, value: f64) -> Result<SystemConfig> {
        let mut cfg = *fixed;
        match self {
            Axis::GammaTDb => cfg.gamma_t_db = value,
            Axis::BackhaulProb => cfg.backhaul_prob = value,
            Axis::Phi => cfg.primary_outage_threshold = value,
            Axis::NTransmitters => {
                if value.fract() != 0.0 || !(1.0..=MAX_TRANSMITTERS as f64).contains(&value) {
                    return Err(Error::invalid(
                        "axis_values",
                        format!("n_transmitters must be an integer in 1..={MAX_TRANSMITTERS}, got {value}"),
                    ));
                }
                cfg.n_transmitters = value as usize;
            }
        }
        Ok(cfg)
    }

    /// The value the swept field has in `cfg`.
    pub fn current(self, cfg: &SystemConfig) -> f64 {
        match self {
            Axis::GammaTDb => cfg.gamma_t_db,
            Axis::BackhaulProb => cfg.backhaul_prob,
            Axis::Phi => cfg.primary_outage_threshold,
            Axis::NTransmitters => cfg.n_transmitters as f64,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gamma_t_db" => Ok(Axis::GammaTDb),
            "s" => Ok(Axis::BackhaulProb),
            "phi" => Ok(Axis::Phi),
            "n_transmitters" => Ok(Axis::NTransmitters),
            _ => Err(Error::invalid(
                "axis",
                format!("unknown axis {s:?}; expected gamma_t_db, s, phi or n_transmitters"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Analytic,
    Asymptotic,
    Mc,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Analytic, Method::Asymptotic, Method::Mc];

    pub fn name(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Asymptotic => "asymptotic",
            Method::Mc => "mc",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::invalid(
                    "method",
                    format!("unknown method {s:?}; expected analytic, asymptotic or mc"),
                )
            })
    }
}

/// One sweep: a fixed configuration, one swept field, and the
/// scheme/method combinations to evaluate at every point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub axis_values: Vec<f64>,
    /// The swept field of `fixed` is ignored.
    pub fixed: SystemConfig,
    pub schemes: Vec<SchemeKind>,
    pub methods: Vec<Method>,
    pub trials: u64,
    pub seed: u64,
    /// Relative tolerance of the OTS double integral.
    pub rel_tol: f64,
    pub workers: usize,
}

impl SweepSpec {
    pub fn new(axis: Axis, axis_values: Vec<f64>, fixed: SystemConfig) -> Self {
        Self {
            axis,
            axis_values,
            fixed,
            schemes: vec![SchemeKind::StsKnown, SchemeKind::OtsKnown],
            methods: vec![Method::Analytic],
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            rel_tol: crate::analytic::DEFAULT_OTS_REL_TOL,
            workers: default_workers(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.axis_values.is_empty() {
            return Err(Error::invalid(
                "axis_values",
                "at least one value is required",
            ));
        }
        if let Some(v) = self.axis_values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(
                "axis_values",
                format!("must be finite, got {v}"),
            ));
        }
        if self.axis_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("axis_values", "must be strictly increasing"));
        }
        if self.schemes.is_empty() {
            return Err(Error::invalid("schemes", "at least one scheme is required"));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("methods", "at least one method is required"));
        }
        for &scheme in &self.schemes {
            for &method in &self.methods {
                if scheme.is_blind() && method != Method::Mc {
                    return Err(Error::invalid(
                        "methods",
                        format!("{scheme} has no {method} evaluation; use mc"),
                    ));
                }
            }
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::invalid("workers", "must be at least 1"));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::invalid(
                "rel_tol",
                format!("must lie in (0, 1), got {}", self.rel_tol),
            ));
        }
        for &v in &self.axis_values {
            self.axis.apply(&self.fixed, v)?.validate()?;
        }
        Ok(())
    }

    fn sorted_schemes(&self) -> Vec<SchemeKind> {
        let mut s = self.schemes.clone();
        s.sort();
        s.dedup();
        s
    }

    fn sorted_methods(&self) -> Vec<Method> {
        let mut m = self.methods.clone();
        m.sort();
        m.dedup();
        m
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis: Axis,
    pub axis_value: f64,
    pub scheme: SchemeKind,
    pub method: Method,
    pub sop: f64,
    /// Present only for `mc` rows.
    pub std_error: Option<f64>,
    pub trials: Option<u64>,
}

/// Evaluates every (axis value, scheme, method) combination.
///
/// Points run concurrently; rows come back ordered by axis value, then
/// scheme, then method. The first failing point in that order aborts the
/// sweep. Every Monte Carlo point uses the same seed.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let schemes = spec.sorted_schemes();
    let methods = spec.sorted_methods();
    let mut points = Vec::new();
    for &v in &spec.axis_values {
        for &s in &schemes {
            for &m in &methods {
                points.push((v, s, m));
            }
        }
    }

    let results: Vec<Result<SweepRow>> = points
        .par_iter()
        .map(|&(value, scheme, method)| {
            evaluate(spec, value, scheme, method).map_err(|e| Error::SweepPoint {
                axis: spec.axis.name().to_string(),
                axis_value: format_g(value),
                scheme: scheme.name().to_string(),
                method: method.name().to_string(),
                source: Box::new(e),
            })
        })
        .collect();
    results.into_iter().collect()
}

fn evaluate(spec: &SweepSpec, value: f64, scheme: SchemeKind, method: Method) -> Result<SweepRow> {
    let cfg = spec.axis.apply(&spec.fixed, value)?;
    let (n, s) = (cfg.n_transmitters, cfg.backhaul_prob);
    let row = |sop, std_error, trials| SweepRow {
        axis: spec.axis,
        axis_value: value,
        scheme,
        method,
        sop,
        std_error,
        trials,
    };
    let sop = match (method, scheme) {
        (Method::Mc, _) => {
            let est = simulate_sop(&cfg, scheme, spec.trials, spec.seed, spec.workers)?;
            return Ok(row(est.estimate, Some(est.std_error), Some(est.trials)));
        }
        (Method::Analytic, SchemeKind::StsKnown) => sop_sts(&derive(&cfg)?, n, s)?,
        (Method::Analytic, SchemeKind::OtsKnown) => sop_ots(&derive(&cfg)?, n, s, spec.rel_tol)?,
        (Method::Asymptotic, SchemeKind::StsKnown) => {
            sop_sts_asymptotic(&derive_asymptotic(&cfg)?, n, s)?
        }
        (Method::Asymptotic, SchemeKind::OtsKnown) => {
            sop_ots_asymptotic(&derive_asymptotic(&cfg)?, n, s)?
        }
        (_, blind) => {
            return Err(Error::invalid(
                "methods",
                format!("{blind} has no {method} evaluation; use mc"),
            ))
        }
    };
    Ok(row(sop.value, None, None))
}

/// Runs several sweeps over the same axis values and merges their rows in
/// sweep order. Nothing is returned unless every sweep succeeds.
pub fn run_sweeps(specs: &[SweepSpec]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for spec in specs {
        if spec.axis != specs[0].axis || spec.axis_values != specs[0].axis_values {
            return Err(Error::invalid(
                "axis_values",
                "merged sweeps must share the axis and its values",
            ));
        }
        rows.extend(run_sweep(spec)?);
    }
    // Stable: ties keep sweep order.
    let index = |v: f64| {
        specs[0]
            .axis_values
            .iter()
            .position(|&a| a == v)
            .unwrap_or(usize::MAX)
    };
    rows.sort_by_key(|r| (index(r.axis_value), r.scheme, r.method));
    Ok(rows)
}

/// One scheme's reference value against its simulation at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub axis: Axis,
    pub axis_value: f64,
    pub scheme: SchemeKind,
    /// `analytic` or `asymptotic`.
    pub method: Method,
    pub reference: f64,
    pub mc: f64,
    pub std_error: f64,
    pub trials: u64,
    /// `(reference − mc)/std_error`; zero when both agree exactly.
    pub z: f64,
    pub pass: bool,
}

pub const Z_LIMIT: f64 = 4.0;

/// Cross-checks each non-simulated method against `mc` at every point.
pub fn compare_report(spec: &SweepSpec) -> Result<Vec<CompareRow>> {
    let methods = spec.sorted_methods();
    if !methods.contains(&Method::Mc) || methods.len() < 2 {
        return Err(Error::invalid(
            "methods",
            "comparison needs mc and at least one of analytic, asymptotic",
        ));
    }
    let rows = run_sweep(spec)?;
    let mut report = Vec::new();
    for group in rows.chunk_by(|a, b| a.axis_value == b.axis_value && a.scheme == b.scheme) {
        let Some(mc) = group.iter().find(|r| r.method == Method::Mc) else {
            continue;
        };
        let std_error = mc.std_error.unwrap_or(0.0);
        for r in group.iter().filter(|r| r.method != Method::Mc) {
            let diff = r.sop - mc.sop;
            let z = if diff == 0.0 { 0.0 } else { diff / std_error };
            report.push(CompareRow {
                axis: r.axis,
                axis_value: r.axis_value,
                scheme: r.scheme,
                method: r.method,
                reference: r.sop,
                mc: mc.sop,
                std_error,
                trials: mc.trials.unwrap_or(0),
                z,
                pass: z.abs() <= Z_LIMIT,
            });
        }
    }
    Ok(report)
}
