use std::io::{self, Write};

use super::{CompareRow, SweepRow};

pub const SWEEP_HEADER: &str = "axis,axis_value,scheme,method,sop,std_error,trials";
pub const COMPARE_HEADER: &str =
    "axis,axis_value,scheme,method,reference,mc,std_error,trials,z,pass";

const SIGNIFICANT: usize = 12;

/// C `%.12g`: 12 significant digits, trailing zeros dropped, exponent form
/// outside `1e-4 ≤ |x| < 1e12`.
pub fn format_g(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let sci = format!("{:.*e}", SIGNIFICANT - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIGNIFICANT as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    } else {
        let decimals = (SIGNIFICANT as i32 - 1 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

pub fn write_sweep_csv<W: Write>(out: &mut W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.axis,
            format_g(r.axis_value),
            r.scheme,
            r.method,
            format_g(r.sop),
            opt(r.std_error, format_g),
            opt(r.trials, |t| t.to_string()),
        )?;
    }
    Ok(())
}

pub fn write_compare_csv<W: Write>(out: &mut W, rows: &[CompareRow]) -> io::Result<()> {
    writeln!(out, "{COMPARE_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.axis,
            format_g(r.axis_value),
            r.scheme,
            r.method,
            format_g(r.reference),
            format_g(r.mc),
            format_g(r.std_error),
            r.trials,
            format_g(r.z),
            if r.pass { "pass" } else { "fail" },
        )?;
    }
    Ok(())
}

/// A gnuplot script plotting every (scheme, method) series of a sweep CSV
/// on a logarithmic SOP axis.
pub fn gnuplot_script(csv_file: &str, rows: &[SweepRow]) -> String {
    let mut series: Vec<(String, String)> = Vec::new();
    for r in rows {
        let key = (r.scheme.name().to_string(), r.method.name().to_string());
        if !series.contains(&key) {
            series.push(key);
        }
    }
    let axis = rows.first().map_or("axis_value", |r| r.axis.name());
    let file = csv_file.replace('\\', "\\\\").replace('"', "\\\"");
    let mut s = String::new();
    s.push_str("set datafile separator \",\"\n");
    s.push_str("set logscale y\n");
    s.push_str(&format!("set xlabel \"{axis}\"\n"));
    s.push_str("set ylabel \"SOP\"\n");
    s.push_str("set key outside right\n");
    let plots: Vec<String> = series
        .iter()
        .map(|(scheme, method)| {
            let style = if method == "mc" { "points" } else { "lines" };
            format!(
                "\"{file}\" every ::1 using 2:((strcol(3) eq \"{scheme}\" && strcol(4) eq \"{method}\") ? $5 : 1/0) with {style} title \"{scheme} {method}\""
            )
        })
        .collect();
    s.push_str("plot ");
    s.push_str(&plots.join(", \\\n     "));
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::{Axis, Method};
    use crate::montecarlo::SchemeKind;

    #[test]
    fn matches_c_printf_g() {
        // Expected strings from printf("%.12g").
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (60.0, "60"),
            (0.5, "0.5"),
            (0.99, "0.99"),
            (1.0 / 3.0, "0.333333333333"),
            (0.005274670910884786, "0.00527467091088"),
            (1.234e-5, "1.234e-05"),
            (0.0001, "0.0001"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (-2.5e-7, "-2.5e-07"),
            (2.0 / 3.0, "0.666666666667"),
            (9.9999999999999e-5, "0.0001"),
            (1e100, "1e+100"),
        ];
        for (x, want) in cases {
            assert_eq!(format_g(x), want, "{x}");
        }
    }

    #[test]
    fn sweep_csv_layout() {
        let rows = vec![
            SweepRow {
                axis: Axis::GammaTDb,
                axis_value: 10.0,
                scheme: SchemeKind::StsKnown,
                method: Method::Analytic,
                sop: 0.25,
                std_error: None,
                trials: None,
            },
            SweepRow {
                axis: Axis::GammaTDb,
                axis_value: 10.0,
                scheme: SchemeKind::StsBlind,
                method: Method::Mc,
                sop: 0.3,
                std_error: Some(0.001),
                trials: Some(1000),
            },
        ];
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &rows).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "axis,axis_value,scheme,method,sop,std_error,trials\n\
             gamma_t_db,10,sts_known,analytic,0.25,,\n\
             gamma_t_db,10,sts_blind,mc,0.3,0.001,1000\n"
        );
        let script = gnuplot_script("out.csv", &rows);
        assert!(script.contains("strcol(3) eq \"sts_blind\" && strcol(4) eq \"mc\""));
        assert!(script.contains("set xlabel \"gamma_t_db\""));
    }
}
