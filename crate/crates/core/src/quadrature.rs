//! Adaptive integration over `[0, ∞)` and `[0, ∞)²`.
//!
//! The half line is mapped onto `[0, 1)` and integrated with a globally
//! adaptive 7/15-point Gauss–Kronrod rule: the interval with the largest
//! error estimate is bisected until the total estimate meets the tolerance
//! or the evaluation budget runs out. Double integrals are iterated, with
//! an adaptive inner integral over `x` evaluated at every outer node in `y`.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

use thiserror::Error;

/// Absolute error floor below which any result counts as converged.
pub const ABS_FLOOR: f64 = 1e-14;
pub const DEFAULT_REL_TOL: f64 = 1e-9;
pub const DEFAULT_BUDGET_1D: usize = 200_000;
pub const DEFAULT_BUDGET_2D: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Single,
    /// The inner (`x`) integral of an iterated double integral.
    Inner,
    /// The outer (`y`) integral of an iterated double integral.
    Outer,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::Single => "single",
            Dimension::Inner => "inner (x)",
            Dimension::Outer => "outer (y)",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error(
        "{dimension} integral did not converge within {evaluations} evaluations \
         (estimate {estimate:e}, error bound {error_bound:e})"
    )]
    NoConvergence {
        dimension: Dimension,
        estimate: f64,
        error_bound: f64,
        evaluations: usize,
    },
    #[error("integrand returned {value} at {dimension} abscissa {abscissa:e}")]
    NonFinite {
        dimension: Dimension,
        abscissa: f64,
        value: f64,
    },
    #[error("invalid quadrature option: {0}")]
    InvalidOption(String),
}

/// Change of variables from `t ∈ [0, 1)` to `x ∈ [0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mapping {
    /// `x = t/(1−t)`, Jacobian `1/(1−t)²`.
    #[default]
    Rational,
    /// `x = −ln(1−t)`, Jacobian `1/(1−t)`.
    Logarithmic,
}

impl Mapping {
    #[inline]
    fn apply(self, t: f64) -> (f64, f64) {
        let one_minus = 1.0 - t;
        match self {
            Mapping::Rational => (t / one_minus, 1.0 / (one_minus * one_minus)),
            Mapping::Logarithmic => (-(-t).ln_1p(), 1.0 / one_minus),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub budget: usize,
    pub mapping: Mapping,
}

impl QuadOptions {
    pub fn new(rel_tol: f64, budget: usize) -> Self {
        Self {
            rel_tol,
            budget,
            mapping: Mapping::Rational,
        }
    }

    pub fn with_mapping(mut self, mapping: Mapping) -> Self {
        self.mapping = mapping;
        self
    }

    fn validate(&self) -> Result<(), QuadError> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(QuadError::InvalidOption(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if self.budget < 2 * GK_POINTS {
            return Err(QuadError::InvalidOption(format!(
                "budget must allow at least {} evaluations, got {}",
                2 * GK_POINTS,
                self.budget
            )));
        }
        Ok(())
    }
}

/// `∫₀^∞ f(x) dx` to relative tolerance `rel_tol` within `budget` calls of `f`.
pub fn integrate_semi_inf<F>(f: F, rel_tol: f64, budget: usize) -> Result<QuadResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    integrate_semi_inf_with(f, &QuadOptions::new(rel_tol, budget))
}

pub fn integrate_semi_inf_with<F>(f: F, opts: &QuadOptions) -> Result<QuadResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    opts.validate()?;
    let counter = Cell::new(0usize);
    let (value, err) = semi_inf(
        |x| {
            counter.set(counter.get() + 1);
            Ok(f(x))
        },
        opts.rel_tol,
        ABS_FLOOR,
        opts.mapping,
        opts.budget,
        &counter,
        Dimension::Single,
    )?;
    Ok(QuadResult {
        value,
        abs_error_estimate: err,
        evaluations: counter.get(),
    })
}

/// `∫₀^∞∫₀^∞ f(x, y) dx dy`, iterated with `y` outermost.
pub fn integrate_double_semi_inf<F>(
    f: F,
    rel_tol: f64,
    budget: usize,
) -> Result<QuadResult, QuadError>
where
    F: Fn(f64, f64) -> f64,
{
    integrate_double_semi_inf_with(f, &QuadOptions::new(rel_tol, budget))
}

pub fn integrate_double_semi_inf_with<F>(f: F, opts: &QuadOptions) -> Result<QuadResult, QuadError>
where
    F: Fn(f64, f64) -> f64,
{
    opts.validate()?;
    let counter = Cell::new(0usize);
    let inner_rel = opts.rel_tol * 0.1;
    let worst_inner_rel = Cell::new(0.0f64);
    let inner_abs_sum = Cell::new(0.0f64);

    let outer = |y: f64| -> Result<f64, QuadError> {
        let (v, e) = semi_inf(
            |x| {
                counter.set(counter.get() + 1);
                Ok(f(x, y))
            },
            inner_rel,
            1e-300,
            opts.mapping,
            opts.budget,
            &counter,
            Dimension::Inner,
        )?;
        if v != 0.0 {
            worst_inner_rel.set(worst_inner_rel.get().max(e / v.abs()));
        } else {
            inner_abs_sum.set(inner_abs_sum.get() + e);
        }
        Ok(v)
    };
    let (value, outer_err) = semi_inf(
        outer,
        opts.rel_tol,
        ABS_FLOOR,
        opts.mapping,
        opts.budget,
        &counter,
        Dimension::Outer,
    )?;
    Ok(QuadResult {
        value,
        abs_error_estimate: outer_err + worst_inner_rel.get() * value.abs(),
        evaluations: counter.get(),
    })
}

/// Adaptive integral of `f` over `[lo, hi]` with the same rule and
/// convergence test as the half-line routines.
pub fn integrate_interval<F>(
    f: F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    budget: usize,
) -> Result<QuadResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    QuadOptions::new(rel_tol, budget).validate()?;
    let counter = Cell::new(0usize);
    let (value, err) = adaptive(
        |x| {
            counter.set(counter.get() + 1);
            let v = f(x);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(QuadError::NonFinite {
                    dimension: Dimension::Single,
                    abscissa: x,
                    value: v,
                })
            }
        },
        lo,
        hi,
        rel_tol,
        ABS_FLOOR,
        budget,
        &counter,
        Dimension::Single,
    )?;
    Ok(QuadResult {
        value,
        abs_error_estimate: err,
        evaluations: counter.get(),
    })
}

fn semi_inf<G>(
    mut g: G,
    rel_tol: f64,
    abs_tol: f64,
    mapping: Mapping,
    budget: usize,
    counter: &Cell<usize>,
    dimension: Dimension,
) -> Result<(f64, f64), QuadError>
where
    G: FnMut(f64) -> Result<f64, QuadError>,
{
    let mapped = |t: f64| -> Result<f64, QuadError> {
        let (x, jac) = mapping.apply(t);
        let v = g(x)?;
        if !v.is_finite() {
            return Err(QuadError::NonFinite {
                dimension,
                abscissa: x,
                value: v,
            });
        }
        // Avoid 0·∞ where the mapped abscissa runs off to infinity.
        Ok(if v == 0.0 { 0.0 } else { v * jac })
    };
    adaptive(
        mapped, 0.0, 1.0, rel_tol, abs_tol, budget, counter, dimension,
    )
}

const GK_POINTS: usize = 15;

// Kronrod abscissae; odd indices are the 7-point Gauss abscissae.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<G>(g: &mut G, lo: f64, hi: f64) -> Result<Segment, QuadError>
where
    G: FnMut(f64) -> Result<f64, QuadError>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    let fc = g(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    for j in 0..3 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = g(center - dx)?;
        let f2 = g(center + dx)?;
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = g(center - dx)?;
        let f2 = g(center + dx)?;
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let scale = half.abs();
    let value = res_k * half;
    res_abs *= scale;
    res_asc *= scale;
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment {
        lo,
        hi,
        value,
        error,
    })
}

#[allow(clippy::too_many_arguments)]
fn adaptive<G>(
    mut g: G,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    abs_tol: f64,
    budget: usize,
    counter: &Cell<usize>,
    dimension: Dimension,
) -> Result<(f64, f64), QuadError>
where
    G: FnMut(f64) -> Result<f64, QuadError>,
{
    const INITIAL_PIECES: usize = 4;
    let mut heap = BinaryHeap::new();
    // Segments that can no longer be bisected in floating point.
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;

    let width = (hi - lo) / INITIAL_PIECES as f64;
    for i in 0..INITIAL_PIECES {
        let a = lo + width * i as f64;
        let b = if i + 1 == INITIAL_PIECES {
            hi
        } else {
            a + width
        };
        heap.push(gauss_kronrod(&mut g, a, b)?);
    }

    loop {
        let (mut value, mut error) = (frozen_value, frozen_error);
        for s in heap.iter() {
            value += s.value;
            error += s.error;
        }
        if error <= (rel_tol * value.abs()).max(abs_tol) {
            return Ok((value, error));
        }
        let Some(worst) = heap.pop() else {
            return Err(QuadError::NoConvergence {
                dimension,
                estimate: value,
                error_bound: error,
                evaluations: counter.get(),
            });
        };
        if counter.get() + 2 * GK_POINTS > budget {
            return Err(QuadError::NoConvergence {
                dimension,
                estimate: value,
                error_bound: error,
                evaluations: counter.get(),
            });
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi)
            || (worst.hi - worst.lo) < 1e3 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE)
        {
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        heap.push(gauss_kronrod(&mut g, worst.lo, mid)?);
        heap.push(gauss_kronrod(&mut g, mid, worst.hi)?);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_exponential_mass() {
        let r = integrate_semi_inf(|x| (-x).exp(), 1e-12, 100_000).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(r.abs_error_estimate >= 0.0);
        assert!(r.evaluations <= 100_000);
    }

    #[test]
    fn exponential_mean() {
        let lambda = 2.0;
        let r = integrate_semi_inf(|x| lambda * (-lambda * x).exp() * x, 1e-12, 100_000).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn matches_scaled_exponential_integral() {
        // ∫ e^{−x}/(x+1) dx = e·E₁(1) = −e·Ei(−1).
        let r = integrate_semi_inf(|x| (-x).exp() / (x + 1.0), 1e-12, 100_000).unwrap();
        let want = -crate::specfun::ei_neg_scaled(1.0).unwrap();
        assert!((r.value - want).abs() < 1e-12 * want);
        assert!((r.value - 0.596_347_362_323_194_074_3).abs() < 1e-12);
    }

    #[test]
    fn separable_double_integrals() {
        let r = integrate_double_semi_inf(|x, y| (-x - y).exp(), 1e-10, DEFAULT_BUDGET_2D).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
        let (la, lb) = (2.0, 3.0);
        let r = integrate_double_semi_inf(
            |x, y| la * lb * (-la * x - lb * y).exp(),
            1e-10,
            DEFAULT_BUDGET_2D,
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn coupled_double_integral() {
        // 40-digit reference for ∫∫ e^{−x−y} x/(x+y+1).
        let want = 0.298_173_681_161_597_037_2;
        let r = integrate_double_semi_inf(
            |x, y| (-x - y).exp() * x / (x + y + 1.0),
            1e-10,
            DEFAULT_BUDGET_2D,
        )
        .unwrap();
        assert!((r.value - want).abs() < 1e-10 * want, "{}", r.value);
    }

    #[test]
    fn coupled_double_integral_against_riemann_sum() {
        // Midpoint rule on [0, 40]² with step 1/200; its error is O(h²).
        let h = 1.0 / 200.0;
        let n = (40.0 / h) as usize;
        let mut sum = 0.0;
        for i in 0..n {
            let x = (i as f64 + 0.5) * h;
            let ex = (-x).exp();
            for j in 0..n {
                let y = (j as f64 + 0.5) * h;
                sum += ex * (-y).exp() * x / (x + y + 1.0);
            }
        }
        sum *= h * h;
        let r = integrate_double_semi_inf(
            |x, y| (-x - y).exp() * x / (x + y + 1.0),
            1e-10,
            DEFAULT_BUDGET_2D,
        )
        .unwrap();
        assert!((r.value - sum).abs() < 1e-5, "{} vs {}", r.value, sum);
    }

    #[test]
    fn tightening_tolerance_does_not_hurt() {
        let want = 0.596_347_362_323_194_074_3;
        let f = |x: f64| (-x).exp() / (x + 1.0);
        let mut prev = f64::INFINITY;
        for tol in [1e-4, 1e-6, 1e-8, 1e-10, 1e-12] {
            let e = (integrate_semi_inf(f, tol, 100_000).unwrap().value - want).abs();
            assert!(e <= prev.max(1e-15), "tol {tol}: {e} > {prev}");
            prev = e;
        }
    }

    #[test]
    fn mappings_cross_validate() {
        let cases: [(&dyn Fn(f64) -> f64, f64); 3] = [
            (&|x: f64| (-x).exp(), 1.0),
            (&|x: f64| (-2.0 * x).exp() * 2.0, 1.0),
            (
                &|x: f64| (-x).exp() / (x + 1.0),
                0.596_347_362_323_194_074_3,
            ),
        ];
        for (f, want) in cases {
            let a = integrate_semi_inf_with(f, &QuadOptions::new(1e-11, 200_000)).unwrap();
            let b = integrate_semi_inf_with(
                f,
                &QuadOptions::new(1e-11, 200_000).with_mapping(Mapping::Logarithmic),
            )
            .unwrap();
            assert!((a.value - b.value).abs() <= 1e-11 * want.abs());
            assert!((a.value - want).abs() <= 1e-11 * want.abs());
        }
    }

    #[test]
    fn budget_exhaustion_reports_best_estimate() {
        let err =
            integrate_semi_inf(|x| (-x).exp() * (50.0 * x).sin().abs(), 1e-14, 60).unwrap_err();
        match err {
            QuadError::NoConvergence {
                dimension,
                estimate,
                error_bound,
                evaluations,
            } => {
                assert_eq!(dimension, Dimension::Single);
                assert!(estimate.is_finite() && error_bound > 0.0);
                assert!(evaluations <= 60);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_is_located() {
        let err =
            integrate_semi_inf(|x| if x > 2.0 { f64::NAN } else { 1.0 }, 1e-8, 1000).unwrap_err();
        match err {
            QuadError::NonFinite { abscissa, .. } => assert!(abscissa > 2.0),
            other => panic!("unexpected {other:?}"),
        }
        let err = integrate_double_semi_inf(
            |x, y| {
                if y > 1.0 && x < 1.0 {
                    f64::INFINITY
                } else {
                    (-x - y).exp()
                }
            },
            1e-8,
            100_000,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            QuadError::NonFinite {
                dimension: Dimension::Inner,
                ..
            }
        ));
    }

    #[test]
    fn finite_interval() {
        let r = integrate_interval(|x| x * x, 0.0, 3.0, 1e-12, 10_000).unwrap();
        assert!((r.value - 9.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_options() {
        assert!(matches!(
            integrate_semi_inf(|x| x, 0.0, 1000),
            Err(QuadError::InvalidOption(_))
        ));
        assert!(matches!(
            integrate_semi_inf(|x| x, 1e-8, 3),
            Err(QuadError::InvalidOption(_))
        ));
    }
}
