use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sop_core::analytic::sop_sts;
use sop_core::cli::{format_g, SWEEP_HEADER};
use sop_core::params::{derive, SystemConfig};

fn sop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sop"))
        .args(args)
        .output()
        .expect("run sop")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn analytic_sweep_matches_library() {
    let out = sop(&[
        "sweep",
        "--values",
        "10,20,30",
        "--scheme",
        "sts_known",
        "--method",
        "analytic",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some(SWEEP_HEADER));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 3);
    for (row, db) in rows.iter().zip([10.0, 20.0, 30.0]) {
        let want = sop_sts(
            &derive(&SystemConfig {
                gamma_t_db: db,
                ..SystemConfig::default()
            })
            .unwrap(),
            6,
            0.99,
        )
        .unwrap()
        .value;
        assert_eq!(row[4], format_g(want));
        assert_eq!((row[5].as_str(), row[6].as_str()), ("", ""));
    }
}

#[test]
fn output_is_lf_terminated_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = sop(&[
            "sweep",
            "--values",
            "5:5:25",
            "--scheme",
            "ots_known",
            "--scheme",
            "sts_blind",
            "--scheme",
            "ots_blind",
            "--method",
            "mc",
            "--trials",
            "5000",
            "--seed",
            "9",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        fs::read(path).unwrap()
    };
    let (a, b) = (run("a.csv"), run("b.csv"));
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    for row in data_rows(&text) {
        let sop: f64 = row[4].parse().unwrap();
        assert!((0.0..=1.0).contains(&sop));
        assert!(!row[5].is_empty());
        assert_eq!(row[6], "5000");
    }
}

#[test]
fn worker_count_does_not_change_output() {
    let run = |w: &str| {
        stdout(&sop(&[
            "sweep",
            "--values",
            "20",
            "--scheme",
            "sts_known",
            "--method",
            "mc",
            "--trials",
            "30001",
            "--workers",
            w,
        ]))
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn golden_analytic_table() {
    let out = sop(&[
        "sweep",
        "--values",
        "0,4,10,30,60",
        "--method",
        "analytic",
        "--method",
        "asymptotic",
    ]);
    assert!(out.status.success());
    let golden = fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/analytic_sweep.csv"),
    )
    .unwrap();
    assert_eq!(stdout(&out), golden);
}

#[test]
fn blind_analytic_is_a_validation_error() {
    let out = sop(&[
        "sweep",
        "--values",
        "10",
        "--scheme",
        "sts_blind",
        "--method",
        "analytic",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("sts_blind"));
}

#[test]
fn no_backhaul_means_certain_outage() {
    let out = sop(&[
        "sweep",
        "--axis",
        "s",
        "--values",
        "0",
        "--method",
        "analytic",
        "--method",
        "asymptotic",
    ]);
    assert!(out.status.success());
    let rows = data_rows(&stdout(&out));
    assert_eq!(rows.len(), 4);
    assert!(rows
        .iter()
        .all(|r| r[0] == "s" && r[1] == "0" && r[4] == "1"));
}

#[test]
fn exit_codes() {
    assert_eq!(sop(&["sweep", "--values", "10,5"]).status.code(), Some(1));
    assert_eq!(sop(&["sweep", "--axis", "snr"]).status.code(), Some(1));
    assert_eq!(sop(&["sweep", "--s", "1.5"]).status.code(), Some(1));
    assert_eq!(sop(&["sweep", "--unknown-flag"]).status.code(), Some(1));
    assert_eq!(
        sop(&["sweep", "--trials", "0", "--method", "mc"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(sop(&["sweep", "--emit-gnuplot"]).status.code(), Some(1));
    // The OTS double integral cannot reach this tolerance within its budget.
    let numeric = sop(&[
        "sweep",
        "--values",
        "30",
        "--scheme",
        "ots_known",
        "--rel-tol",
        "1e-15",
    ]);
    assert_eq!(numeric.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&numeric.stderr).contains("gamma_t_db=30"));
}

#[test]
fn compare_reports_and_flags() {
    let ok = sop(&["compare", "--trials", "200000"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    let rows = data_rows(&stdout(&ok));
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r[9] == "pass"));

    let tiny = sop(&["compare", "--trials", "10"]);
    assert!(matches!(tiny.status.code(), Some(0) | Some(3)));
    assert_eq!(data_rows(&stdout(&tiny)).len(), 2);

    // A biased reference must be caught: the asymptote at 10 dB is far off.
    let off = sop(&[
        "compare",
        "--gamma-t-db",
        "10",
        "--method",
        "asymptotic",
        "--method",
        "mc",
        "--trials",
        "200000",
    ]);
    assert_eq!(off.status.code(), Some(3));
    assert!(data_rows(&stdout(&off)).iter().any(|r| r[9] == "fail"));

    assert_eq!(sop(&["compare", "--method", "mc"]).status.code(), Some(1));
    assert_eq!(sop(&["compare", "--preset", "fig2"]).status.code(), Some(1));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("system.cfg");
    fs::write(
        &cfg,
        "# small network\nn_transmitters = 2\ns = 0.5\ngamma_t_db = 20\n",
    )
    .unwrap();
    let from_file = stdout(&sop(&[
        "compare",
        "--config",
        cfg.to_str().unwrap(),
        "--method",
        "analytic",
        "--method",
        "mc",
        "--trials",
        "1000",
    ]));
    let rows = data_rows(&from_file);
    assert_eq!(rows[0][1], "20");

    let sweep = |extra: &[&str]| {
        let mut args = vec![
            "sweep",
            "--config",
            cfg.to_str().unwrap(),
            "--values",
            "20",
            "--scheme",
            "sts_known",
        ];
        args.extend_from_slice(extra);
        data_rows(&stdout(&sop(&args)))[0][4].clone()
    };
    let want = |n: usize, s: f64| {
        let p = derive(&SystemConfig {
            gamma_t_db: 20.0,
            n_transmitters: n,
            backhaul_prob: s,
            ..SystemConfig::default()
        })
        .unwrap();
        format_g(sop_sts(&p, n, s).unwrap().value)
    };
    assert_eq!(sweep(&[]), want(2, 0.5));
    assert_eq!(sweep(&["--s", "0.9"]), want(2, 0.9));

    fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(
        sop(&["sweep", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        sop(&["sweep", "--config", "/nonexistent/sop.cfg"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn preset_writes_one_table_per_member() {
    let dir = tempfile::tempdir().unwrap();
    let out = sop(&[
        "sweep",
        "--preset",
        "fig3",
        "--trials",
        "200",
        "--emit-gnuplot",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for label in ["fig3_n2", "fig3_n6"] {
        let csv = fs::read_to_string(dir.path().join(format!("{label}.csv"))).unwrap();
        let rows = data_rows(&csv);
        // 31 points × (2 known schemes × 3 methods + 2 blind schemes × mc)
        assert_eq!(rows.len(), 31 * 8);
        assert_eq!(&rows[0][..4], ["gamma_t_db", "0", "sts_known", "analytic"]);
        assert_eq!(&rows[7][..4], ["gamma_t_db", "0", "ots_blind", "mc"]);
        assert_eq!(rows.last().unwrap()[1], "60");
        let script = fs::read_to_string(dir.path().join(format!("{label}.gp"))).unwrap();
        assert!(script.contains(&format!("\"{label}.csv\"")));
    }
    assert_eq!(
        sop(&[
            "sweep",
            "--preset",
            "fig9",
            "--out",
            dir.path().to_str().unwrap()
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(
        sop(&["sweep", "--preset", "fig2", "--values", "1"])
            .status
            .code(),
        Some(1)
    );
}
