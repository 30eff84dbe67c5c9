//! Special functions used by the closed-form outage expressions.
//!
//! * `Ei(−t)` for `t > 0`, plain and multiplied by `e^t`.
//! * `e^x E_n(x)`, the scaled generalized exponential integral, which the
//!   near-coincident branch of the selection formulas expands into.
//! * `₂F₁(n+1, 1; n+2; z)` for integer `n ≥ 1` and real `z < 1`.

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 10_000;

/// `Ei(−t) = −E₁(t)` for `t > 0`.
pub fn ei_neg(t: f64) -> Result<f64> {
    check_positive("t", t)?;
    if t <= 1.0 {
        Ok(ei_neg_series(t))
    } else {
        Ok(-e1_scaled_cf(1, t) * (-t).exp())
    }
}

/// `e^t · Ei(−t)` for `t > 0`, without forming either factor separately
/// when `t` is large.
pub fn ei_neg_scaled(t: f64) -> Result<f64> {
    check_positive("t", t)?;
    if t <= 1.0 {
        Ok(ei_neg_series(t) * t.exp())
    } else {
        Ok(-e1_scaled_cf(1, t))
    }
}

/// `e^x · E_n(x)` for integer order `n ≥ 1` and `x > 0`.
pub fn expint_scaled(order: u32, x: f64) -> Result<f64> {
    if order == 0 {
        return Err(Error::invalid("order", "must be at least 1"));
    }
    check_positive("x", x)?;
    if x > 1.0 {
        return Ok(e1_scaled_cf(order, x));
    }
    // Upward recurrence e^x E_{m+1} = (1 − x e^x E_m)/m amplifies errors
    // by x/m ≤ 1 per step here.
    let mut e = -ei_neg_series(x) * x.exp();
    for m in 1..order {
        e = (1.0 - x * e) / f64::from(m);
    }
    Ok(e)
}

/// Power series `γ + ln t + Σ (−t)^k/(k·k!)`; accurate for `t ≤ 1`.
fn ei_neg_series(t: f64) -> f64 {
    let mut sum = 0.0;
    let mut fact_term = 1.0; // (−t)^k / k!
    for k in 1..MAX_ITER {
        let kf = k as f64;
        fact_term *= -t / kf;
        let term = fact_term / kf;
        sum += term;
        if term.abs() < EPS * sum.abs() {
            break;
        }
    }
    EULER_GAMMA + t.ln() + sum
}

/// Continued fraction for `e^x E_n(x)` evaluated with the modified Lentz
/// method; converges for `x > 1`.
fn e1_scaled_cf(order: u32, x: f64) -> f64 {
    let n = f64::from(order);
    let mut b = x + n;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let i = i as f64;
        let an = -i * (n - 1.0 + i);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// `₂F₁(n+1, 1; n+2; z) = (n+1) Σ_k z^k/(n+1+k)` for `n ≥ 1`, `z < 1`.
///
/// Evaluation strategy by region:
/// * `−0.5 ≤ z ≤ 0.9`: the defining series.
/// * `−1 < z < −0.5`: the series after the Pfaff transformation
///   `(1−z)⁻¹ ₂F₁(1, 1; n+2; z/(z−1))`.
/// * otherwise: the logarithmic closed form
///   `(n+1) z^{−(n+1)} (−ln(1−z) − Σ_{m=1}^{n} z^m/m)`, written in negative
///   powers of `z` so large `|z|` cannot overflow.
pub fn hyp2f1_n(n: u32, z: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    if !(z < 1.0) {
        return Err(Error::invalid(
            "z",
            format!("series diverges for z ≥ 1, got {z}"),
        ));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let value = if (-0.5..=0.9).contains(&z) {
        hyp2f1_n_series(n, z)
    } else if z > -1.0 && z < -0.5 {
        hyp2f1_n_pfaff(n, z)
    } else {
        hyp2f1_n_log(n, z)
    };
    Ok(value)
}

fn hyp2f1_n_series(n: u32, z: f64) -> f64 {
    let a = f64::from(n) + 1.0;
    let mut sum = 1.0;
    let mut zk = 1.0;
    for k in 1..MAX_ITER {
        zk *= z;
        let term = zk / (a + k as f64);
        sum += a * term;
        if (a * term).abs() < EPS * sum.abs() {
            break;
        }
    }
    sum
}

fn hyp2f1_n_pfaff(n: u32, z: f64) -> f64 {
    let w = z / (z - 1.0);
    let c = f64::from(n) + 2.0;
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 0..MAX_ITER {
        let k = k as f64;
        term *= (k + 1.0) * w / (c + k);
        sum += term;
        if term.abs() < EPS * sum.abs() {
            break;
        }
    }
    sum / (1.0 - z)
}

fn hyp2f1_n_log(n: u32, z: f64) -> f64 {
    let np1 = f64::from(n) + 1.0;
    let inv = 1.0 / z;
    let log_term = -(-z).ln_1p() * inv.powi(n as i32 + 1);
    let mut poly = 0.0;
    let mut inv_pow = 1.0;
    for j in 1..=n {
        inv_pow *= inv;
        poly += inv_pow / (np1 - f64::from(j));
    }
    np1 * (log_term - poly)
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be positive, got {v}")))
    }
}
