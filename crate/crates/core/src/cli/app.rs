use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::config::{apply_config_text, preset, preset_axis_values};
use super::csv::{gnuplot_script, write_compare_csv, write_sweep_csv};
use super::{
    compare_report, default_workers, run_sweeps, Axis, Method, SweepRow, SweepSpec, DEFAULT_SEED,
    DEFAULT_TRIALS,
};
use crate::analytic::DEFAULT_OTS_REL_TOL;
use crate::error::Error;
use crate::montecarlo::SchemeKind;
use crate::params::SystemConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_COMPARISON: i32 = 3;

/// Secrecy outage probability sweeps and cross-checks.
#[derive(Debug, Parser)]
#[command(name = "sop", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate SOP over a parameter sweep and write CSV.
    Sweep(SweepArgs),
    /// Compare analytic or asymptotic values with Monte Carlo estimates.
    Compare(SweepArgs),
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Built-in figure sweep: fig2, fig3 or fig4 (sweep only).
    #[arg(long)]
    preset: Option<String>,
    /// File of `key = value` lines; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Swept field: gamma_t_db, s, phi or n_transmitters.
    #[arg(long, default_value = "gamma_t_db")]
    axis: String,
    /// Comma-separated list, or `start:step:stop`.
    #[arg(long, allow_hyphen_values = true)]
    values: Option<String>,
    /// sts_known, ots_known, sts_blind or ots_blind (repeatable).
    #[arg(long = "scheme")]
    schemes: Vec<String>,
    /// analytic, asymptotic or mc (repeatable).
    #[arg(long = "method")]
    methods: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads [default: available parallelism].
    #[arg(long)]
    workers: Option<usize>,
    /// Output CSV file (stdout if absent); a directory with --preset.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative tolerance of the OTS double integral.
    #[arg(long, default_value_t = DEFAULT_OTS_REL_TOL)]
    rel_tol: f64,
    /// Also write a gnuplot script next to each CSV file.
    #[arg(long)]
    emit_gnuplot: bool,
    #[command(flatten)]
    system: SystemArgs,
}

#[derive(Debug, Args)]
struct SystemArgs {
    #[arg(long)]
    n_transmitters: Option<usize>,
    /// Backhaul success probability.
    #[arg(long = "s")]
    backhaul_prob: Option<f64>,
    /// Primary outage threshold.
    #[arg(long)]
    phi: Option<f64>,
    /// Primary rate threshold (bits/s/Hz).
    #[arg(long)]
    beta: Option<f64>,
    /// Secrecy rate threshold (bits/s/Hz).
    #[arg(long)]
    r_th: Option<f64>,
    /// Primary transmit SNR in dB.
    #[arg(long, allow_hyphen_values = true)]
    gamma_t_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mean_power_tr_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mean_power_td_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mean_power_sd_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mean_power_sr_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mean_power_te_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mean_power_se_db: Option<f64>,
}

impl SystemArgs {
    fn apply(&self, cfg: &mut SystemConfig) {
        let p = &mut cfg.mean_power_db;
        let fields: [(&mut f64, Option<f64>); 6] = [
            (&mut p.tr, self.mean_power_tr_db),
            (&mut p.td, self.mean_power_td_db),
            (&mut p.sd, self.mean_power_sd_db),
            (&mut p.sr, self.mean_power_sr_db),
            (&mut p.te, self.mean_power_te_db),
            (&mut p.se, self.mean_power_se_db),
        ];
        for (slot, v) in fields {
            if let Some(v) = v {
                *slot = v;
            }
        }
        if let Some(v) = self.n_transmitters {
            cfg.n_transmitters = v;
        }
        if let Some(v) = self.backhaul_prob {
            cfg.backhaul_prob = v;
        }
        if let Some(v) = self.phi {
            cfg.primary_outage_threshold = v;
        }
        if let Some(v) = self.beta {
            cfg.primary_rate_threshold = v;
        }
        if let Some(v) = self.r_th {
            cfg.secrecy_rate_threshold = v;
        }
        if let Some(v) = self.gamma_t_db {
            cfg.gamma_t_db = v;
        }
    }
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Usage(String),
    Io(String),
    Comparison(usize),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(e) if e.is_validation() => EXIT_VALIDATION,
            Failure::Core(_) => EXIT_NUMERIC,
            Failure::Usage(_) | Failure::Io(_) => EXIT_VALIDATION,
            Failure::Comparison(_) => EXIT_COMPARISON,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn io_failure(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

/// Runs the command line `args` (including the program name) and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_VALIDATION
            } else {
                EXIT_OK
            };
        }
    };
    let (compare, args) = match cli.command {
        Command::Sweep(a) => (false, a),
        Command::Compare(a) => (true, a),
    };
    let workers = args.workers.unwrap_or_else(default_workers);
    let result = if workers == 0 {
        Err(Failure::Usage("--workers must be at least 1".into()))
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => pool.install(|| {
                if compare {
                    run_compare(&args, workers)
                } else {
                    run_sweep_command(&args, workers)
                }
            }),
            Err(e) => Err(Failure::Io(format!("thread pool: {e}"))),
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            match &f {
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Usage(m) | Failure::Io(m) => eprintln!("error: {m}"),
                Failure::Comparison(n) => eprintln!("comparison failed at {n} point(s) (|z| > 4)"),
            }
            f.exit_code()
        }
    }
}

fn base_config(args: &SweepArgs) -> Result<SystemConfig, Failure> {
    let mut cfg = SystemConfig::default();
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(io_failure(path))?;
        apply_config_text(&text, &mut cfg)?;
    }
    args.system.apply(&mut cfg);
    Ok(cfg)
}

fn parse_values(text: &str) -> Result<Vec<f64>, Failure> {
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Failure::Usage(format!("--values: {s:?} is not a number")))
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (number(start)?, number(step)?, number(stop)?);
            if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
                return Err(Failure::Usage(format!(
                    "--values: {text:?} needs start ≤ stop and step > 0"
                )));
            }
            let count = ((stop - start) / step + 1e-9).floor() as u64;
            if count > 1_000_000 {
                return Err(Failure::Usage("--values: range has too many points".into()));
            }
            Ok((0..=count).map(|k| start + k as f64 * step).collect())
        }
        [_] => text.split(',').map(number).collect(),
        _ => Err(Failure::Usage(format!(
            "--values: expected a list or start:step:stop, got {text:?}"
        ))),
    }
}

fn parse_all<T: std::str::FromStr<Err = Error>>(items: &[String]) -> Result<Vec<T>, Failure> {
    items
        .iter()
        .flat_map(|s| s.split(','))
        .map(|s| s.trim().parse::<T>().map_err(Failure::from))
        .collect()
}

fn build_spec(args: &SweepArgs, workers: usize, compare: bool) -> Result<SweepSpec, Failure> {
    let fixed = base_config(args)?;
    let axis: Axis = args.axis.parse()?;
    let values = match &args.values {
        Some(v) => parse_values(v)?,
        None if compare => vec![axis.current(&fixed)],
        None => preset_axis_values(),
    };
    let mut spec = SweepSpec::new(axis, values, fixed);
    if !args.schemes.is_empty() {
        spec.schemes = parse_all(&args.schemes)?;
    }
    spec.methods = if args.methods.is_empty() {
        if compare {
            vec![Method::Analytic, Method::Mc]
        } else {
            vec![Method::Analytic]
        }
    } else {
        parse_all(&args.methods)?
    };
    spec.trials = args.trials;
    spec.seed = args.seed;
    spec.rel_tol = args.rel_tol;
    spec.workers = workers;
    Ok(spec)
}

/// Known schemes with every method they support plus the blind schemes by
/// simulation, as one table.
fn preset_specs(config: SystemConfig, args: &SweepArgs, workers: usize) -> [SweepSpec; 2] {
    let make = |schemes: Vec<SchemeKind>, methods: Vec<Method>| SweepSpec {
        axis: Axis::GammaTDb,
        axis_values: preset_axis_values(),
        fixed: config,
        schemes,
        methods,
        trials: args.trials,
        seed: args.seed,
        rel_tol: args.rel_tol,
        workers,
    };
    [
        make(
            vec![SchemeKind::StsKnown, SchemeKind::OtsKnown],
            Method::ALL.to_vec(),
        ),
        make(
            vec![SchemeKind::StsBlind, SchemeKind::OtsBlind],
            vec![Method::Mc],
        ),
    ]
}

fn run_sweep_command(args: &SweepArgs, workers: usize) -> Result<(), Failure> {
    if let Some(name) = &args.preset {
        if args.values.is_some() || !args.schemes.is_empty() || !args.methods.is_empty() {
            return Err(Failure::Usage(
                "--preset fixes the axis, schemes and methods".into(),
            ));
        }
        let members = preset(name, &base_config(args)?)?;
        let mut tables = Vec::with_capacity(members.len());
        for m in &members {
            tables.push((
                m.label.clone(),
                run_sweeps(&preset_specs(m.config, args, workers))?,
            ));
        }
        let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&dir).map_err(io_failure(&dir))?;
        for (label, rows) in &tables {
            write_table(&dir.join(format!("{label}.csv")), rows, args.emit_gnuplot)?;
        }
        return Ok(());
    }

    let spec = build_spec(args, workers, false)?;
    let rows = run_sweeps(std::slice::from_ref(&spec))?;
    match &args.out {
        Some(path) => write_table(path, &rows, args.emit_gnuplot),
        None => {
            if args.emit_gnuplot {
                return Err(Failure::Usage("--emit-gnuplot needs --out".into()));
            }
            let mut buf = Vec::new();
            write_sweep_csv(&mut buf, &rows).expect("writing to memory");
            io::stdout()
                .write_all(&buf)
                .map_err(|e| Failure::Io(format!("stdout: {e}")))
        }
    }
}

fn write_table(path: &Path, rows: &[SweepRow], gnuplot: bool) -> Result<(), Failure> {
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, rows).expect("writing to memory");
    fs::write(path, buf).map_err(io_failure(path))?;
    if gnuplot {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let script = path.with_extension("gp");
        fs::write(&script, gnuplot_script(&name, rows)).map_err(io_failure(&script))?;
    }
    Ok(())
}

fn run_compare(args: &SweepArgs, workers: usize) -> Result<(), Failure> {
    if args.preset.is_some() {
        return Err(Failure::Usage("--preset applies to sweep only".into()));
    }
    if args.emit_gnuplot {
        return Err(Failure::Usage(
            "--emit-gnuplot applies to sweep only".into(),
        ));
    }
    let spec = build_spec(args, workers, true)?;
    let report = compare_report(&spec)?;
    let mut buf = Vec::new();
    write_compare_csv(&mut buf, &report).expect("writing to memory");
    match &args.out {
        Some(path) => fs::write(path, buf).map_err(io_failure(path))?,
        None => io::stdout()
            .write_all(&buf)
            .map_err(|e| Failure::Io(format!("stdout: {e}")))?,
    }
    let failed = report.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(Failure::Comparison(failed));
    }
    Ok(())
}
