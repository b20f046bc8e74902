//! Adaptive Gauss-Kronrod quadrature.
//!
//! Globally adaptive bisection driven by the 15-point Kronrod / 7-point Gauss
//! pair, with the QUADPACK error rescaling. Semi-infinite ranges are folded
//! onto `(0, 1)` through `y = a + t / (1 - t)`; the Kronrod nodes never touch
//! the endpoints, so integrands only need to be finite on the open interval.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const DEFAULT_LIMIT: usize = 10_000;

/// Requested accuracy: stop once the error estimate is below
/// `max(abs, rel * |integral|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Absolute error target.
    pub abs: f64,
    /// Relative error target.
    pub rel: f64,
}

impl Tolerance {
    /// Pure relative tolerance.
    pub const fn relative(rel: f64) -> Self {
        Self { abs: 0.0, rel }
    }

    /// Pure absolute tolerance.
    pub const fn absolute(abs: f64) -> Self {
        Self { abs, rel: 0.0 }
    }

    fn bound(&self, value: f64) -> f64 {
        let rel = self.rel * value.abs();
        if rel > self.abs {
            rel
        } else {
            self.abs
        }
    }
}

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    /// Integral value.
    pub value: f64,
    /// Estimated absolute error.
    pub abs_error: f64,
    /// Integrand evaluations spent.
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    floor: f64,
}

impl Segment {
    fn excess(&self) -> f64 {
        self.error - self.floor
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = libm::pow(200.0 * scaled / res_asc, 1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let floor = 50.0 * f64::EPSILON * res_abs;
        if floor > scaled {
            scaled = floor;
        }
    }
    scaled
}

/// One application of the 15-point Kronrod rule on `[a, b]`.
///
/// Returns `(integral, error estimate)`.
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let (v, e, _) = gk15_with_floor(f, a, b);
    (v, e)
}

/// [`gk15`] plus the round-off floor `50 ε ∫|f|` below which its error
/// estimate cannot fall.
fn gk15_with_floor<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_k = f_center * WGK[7];
    let mut res_g = f_center * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let err = (res_k - res_g) * half;
    let abs_half = half.abs();
    let floor = 50.0 * f64::EPSILON * res_abs * abs_half;
    (res_k * half, rescale_error(err, res_abs * abs_half, res_asc * abs_half), floor)
}

/// Adaptive integration of `f` over the finite interval `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(
    what: &'static str,
    mut f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Result<Estimate> {
    integrate_with_limit(what, &mut f, a, b, tol, DEFAULT_LIMIT)
}

/// Adaptive integration over `[a, ∞)` through the map `y = a + t / (1 - t)`.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
    what: &'static str,
    mut f: F,
    a: f64,
    tol: Tolerance,
) -> Result<Estimate> {
    let mut mapped = |t: f64| {
        let s = 1.0 - t;
        let y = a + t / s;
        let v = f(y);
        if v == 0.0 {
            0.0
        } else {
            v / (s * s)
        }
    };
    integrate_with_limit(what, &mut mapped, 0.0, 1.0, tol, DEFAULT_LIMIT)
}

/// Adaptive integration over consecutive pieces `[p₀, p₁], [p₁, p₂], ...`,
/// with a final `[p_last, ∞)` when `to_infinity` is set.
///
/// Breakpoints placed at the scales where the integrand changes shape stop
/// the first Kronrod pass from sampling only its flat part and reporting a
/// falsely small error. `points` must be sorted ascending.
pub fn integrate_pieces<F: FnMut(f64) -> f64>(
    what: &'static str,
    mut f: F,
    points: &[f64],
    to_infinity: bool,
    tol: Tolerance,
) -> Result<Estimate> {
    let mut out = Estimate { value: 0.0, abs_error: 0.0, evaluations: 0 };
    for w in points.windows(2) {
        let e = integrate_with_limit(what, &mut f, w[0], w[1], tol, DEFAULT_LIMIT)?;
        out.value += e.value;
        out.abs_error += e.abs_error;
        out.evaluations += e.evaluations;
    }
    if to_infinity {
        if let Some(&a) = points.last() {
            let e = integrate_to_infinity(what, &mut f, a, tol)?;
            out.value += e.value;
            out.abs_error += e.abs_error;
            out.evaluations += e.evaluations;
        }
    }
    Ok(out)
}

/// `0`, then `s·10^k` for `k ∈ [-3, 3]` around each scale `s`, then `upper`
/// if given (points at or beyond it are dropped).
pub fn decade_breakpoints(scales: &[f64], upper: Option<f64>) -> Vec<f64> {
    let mut pts = vec![0.0];
    for &s in scales {
        for k in -3..=3 {
            let p = s * libm::pow(10.0, k as f64);
            if p > 0.0 && p.is_finite() && upper.is_none_or(|u| p < u) {
                pts.push(p);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if let Some(u) = upper {
        pts.push(u);
    }
    pts
}

fn integrate_with_limit<F: FnMut(f64) -> f64>(
    what: &'static str,
    f: &mut F,
    a: f64,
    b: f64,
    tol: Tolerance,
    limit: usize,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, abs_error: 0.0, evaluations: 0 });
    }
    let (value, error, floor) = gk15_with_floor(f, a, b);
    let mut evaluations = 15;
    if !value.is_finite() {
        return Err(Error::Quadrature { what, estimate: value, abs_error: error, intervals: 1 });
    }
    let mut segments: Vec<Segment> = Vec::with_capacity(64);
    segments.push(Segment { a, b, value, error, floor });
    let mut total = value;
    let mut total_err = error;
    let mut total_floor = floor;

    loop {
        // Round-off the rule cannot resolve is not worth subdividing for.
        if total_err - total_floor <= tol.bound(total) {
            break;
        }
        if segments.len() >= limit {
            return Err(Error::Quadrature { what, estimate: total, abs_error: total_err, intervals: segments.len() });
        }

        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.excess().total_cmp(&y.1.excess()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let seg = segments[worst];
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            // Interval collapsed to adjacent floats; nothing left to refine.
            if total_err - total_floor <= 1e3 * tol.bound(total) {
                break;
            }
            return Err(Error::Quadrature { what, estimate: total, abs_error: total_err, intervals: segments.len() });
        }
        let (v1, e1, r1) = gk15_with_floor(f, seg.a, mid);
        let (v2, e2, r2) = gk15_with_floor(f, mid, seg.b);
        evaluations += 30;
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(Error::Quadrature { what, estimate: total, abs_error: f64::INFINITY, intervals: segments.len() });
        }
        segments[worst] = Segment { a: seg.a, b: mid, value: v1, error: e1, floor: r1 };
        segments.push(Segment { a: mid, b: seg.b, value: v2, error: e2, floor: r2 });

        // Re-sum rather than update incrementally so the estimate does not drift.
        total = segments.iter().map(|s| s.value).sum();
        total_err = segments.iter().map(|s| s.error).sum();
        total_floor = segments.iter().map(|s| s.floor).sum();
    }

    Ok(Estimate { value: total, abs_error: total_err, evaluations })
}
