use crate::error::{Error, Result};
use crate::params::SystemConfig;

/// Applies `key = value` lines to `cfg`. Blank lines and text after `#`
/// are ignored; an unknown or repeated key is an error.
///
/// Keys: `n_transmitters`, `s`, `phi`, `beta`, `r_th`, `gamma_t_db`, and
/// `mean_power_<link>_db` for the links `tr`, `td`, `sd`, `sr`, `te`, `se`.
pub fn apply_config_text(text: &str, cfg: &mut SystemConfig) -> Result<()> {
    let mut seen: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::invalid(
                "config",
                format!("line {line_no}: expected key = value, got {line:?}"),
            ));
        };
        let (key, value) = (key.trim(), value.trim());
        if seen.iter().any(|k| k == key) {
            return Err(Error::invalid(
                "config",
                format!("line {line_no}: {key} is set twice"),
            ));
        }
        set_key(cfg, key, value)
            .map_err(|reason| Error::invalid("config", format!("line {line_no}: {reason}")))?;
        seen.push(key.to_string());
    }
    Ok(())
}

fn set_key(cfg: &mut SystemConfig, key: &str, value: &str) -> std::result::Result<(), String> {
    let real = || {
        value
            .parse::<f64>()
            .map_err(|_| format!("{key}: {value:?} is not a number"))
    };
    let p = &mut cfg.mean_power_db;
    match key {
        "n_transmitters" => {
            cfg.n_transmitters = value
                .parse()
                .map_err(|_| format!("{key}: {value:?} is not a positive integer"))?
        }
        "s" => cfg.backhaul_prob = real()?,
        "phi" => cfg.primary_outage_threshold = real()?,
        "beta" => cfg.primary_rate_threshold = real()?,
        "r_th" => cfg.secrecy_rate_threshold = real()?,
        "gamma_t_db" => cfg.gamma_t_db = real()?,
        "mean_power_tr_db" => p.tr = real()?,
        "mean_power_td_db" => p.td = real()?,
        "mean_power_sd_db" => p.sd = real()?,
        "mean_power_sr_db" => p.sr = real()?,
        "mean_power_te_db" => p.te = real()?,
        "mean_power_se_db" => p.se = real()?,
        _ => return Err(format!("unknown key {key:?}")),
    }
    Ok(())
}

pub const PRESET_NAMES: [&str; 3] = ["fig2", "fig3", "fig4"];

/// One curve family of a preset: its configuration and output label.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetMember {
    pub label: String,
    pub config: SystemConfig,
}

/// The configurations of a named preset, built on top of `base`.
///
/// `fig2` varies `s ∈ {0.5, 0.99}`, `fig3` varies `N ∈ {2, 6}` and `fig4`
/// varies `Φ ∈ {0.01, 0.1}`; the other two of `s = 0.99`, `N = 6`,
/// `Φ = 0.1` are held fixed. Every preset sweeps `Γ_T` over
/// [`preset_axis_values`].
pub fn preset(name: &str, base: &SystemConfig) -> Result<Vec<PresetMember>> {
    let fixed = SystemConfig {
        n_transmitters: 6,
        backhaul_prob: 0.99,
        primary_outage_threshold: 0.1,
        ..*base
    };
    let members = match name {
        "fig2" => [0.5, 0.99]
            .iter()
            .map(|&s| PresetMember {
                label: format!("fig2_s{s}"),
                config: SystemConfig {
                    backhaul_prob: s,
                    ..fixed
                },
            })
            .collect(),
        "fig3" => [2, 6]
            .iter()
            .map(|&n| PresetMember {
                label: format!("fig3_n{n}"),
                config: SystemConfig {
                    n_transmitters: n,
                    ..fixed
                },
            })
            .collect(),
        "fig4" => [0.01, 0.1]
            .iter()
            .map(|&phi| PresetMember {
                label: format!("fig4_phi{phi}"),
                config: SystemConfig {
                    primary_outage_threshold: phi,
                    ..fixed
                },
            })
            .collect(),
        _ => {
            return Err(Error::invalid(
                "preset",
                format!(
                    "unknown preset {name:?}; expected one of {}",
                    PRESET_NAMES.join(", ")
                ),
            ))
        }
    };
    Ok(members)
}

/// `Γ_T` from 0 to 60 dB in 2 dB steps.
pub fn preset_axis_values() -> Vec<f64> {
    (0..=30).map(|k| 2.0 * f64::from(k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let text = "# reference point\n\
                    n_transmitters = 3\n\
                    s=0.8   # backhaul\n\
                    \n\
                    phi = 0.05\nbeta = 1\nr_th = 0.25\ngamma_t_db = 12.5\n\
                    mean_power_tr_db = 1\nmean_power_td_db = 2\nmean_power_sd_db = 3\n\
                    mean_power_sr_db = 4\nmean_power_te_db = 5\nmean_power_se_db = 6\n";
        let mut cfg = SystemConfig::default();
        apply_config_text(text, &mut cfg).unwrap();
        assert_eq!(cfg.n_transmitters, 3);
        assert_eq!(cfg.backhaul_prob, 0.8);
        assert_eq!(cfg.primary_outage_threshold, 0.05);
        assert_eq!(cfg.primary_rate_threshold, 1.0);
        assert_eq!(cfg.secrecy_rate_threshold, 0.25);
        assert_eq!(cfg.gamma_t_db, 12.5);
        let p = cfg.mean_power_db;
        assert_eq!(
            [p.tr, p.td, p.sd, p.sr, p.te, p.se],
            [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
        );
    }

    #[test]
    fn rejects_malformed_configs() {
        for text in [
            "n_transmitters 3",
            "foo = 1",
            "s = high",
            "n_transmitters = 2.5",
            "s = 0.1\ns = 0.2",
        ] {
            let mut cfg = SystemConfig::default();
            let err = apply_config_text(text, &mut cfg).unwrap_err();
            assert!(err.is_validation(), "{text}");
        }
    }

    #[test]
    fn presets_vary_one_field() {
        let base = SystemConfig::default();
        let fig2 = preset("fig2", &base).unwrap();
        assert_eq!(fig2.len(), 2);
        assert_eq!(fig2[0].label, "fig2_s0.5");
        assert_eq!(fig2[0].config.backhaul_prob, 0.5);
        assert_eq!(preset("fig3", &base).unwrap()[0].config.n_transmitters, 2);
        assert_eq!(preset("fig4", &base).unwrap()[0].label, "fig4_phi0.01");
        assert!(preset("fig5", &base).is_err());
        let values = preset_axis_values();
        assert_eq!((values.len(), values[0], values[30]), (31, 0.0, 60.0));
    }
}
