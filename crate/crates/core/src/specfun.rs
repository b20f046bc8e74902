//! Special functions: the exponential integral and its scaled form, the
//! error function, exact small factorials and binomials, and the closed form
//! of `∫ e^{-ax} Ei(ax) dx`.

use crate::error::{domain, Result};
use crate::quad;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Largest integer argument accepted by [`factorial`] and [`binomial`].
pub const MAX_INTEGER_ARG: u32 = 30;

// Above this the positive-argument series is replaced by the asymptotic expansion.
const SERIES_LIMIT: f64 = 40.0;

/// Exponential integral `Ei(x)`, principal value for `x > 0`.
pub fn exp_integral_ei(x: f64) -> Result<f64> {
    if x == 0.0 || x.is_nan() {
        return Err(domain("Ei argument", x));
    }
    if x < 0.0 {
        let z = -x;
        if z <= 1.0 {
            return Ok(ei_series(x));
        }
        // Ei(-z) = -E1(z) = -e^{-z} * CF(z)
        return Ok(-libm::exp(-z) * e1_continued_fraction(z));
    }
    if x < SERIES_LIMIT {
        Ok(ei_series(x))
    } else {
        Ok(ei_asymptotic(x))
    }
}

/// Scaled exponential integral `eEi(x) = e^x Ei(-x)` for `x > 0`.
///
/// Evaluated without forming `e^x` for large arguments, so it stays finite
/// (and tends to `-1/x`) far beyond the overflow point of `e^x`.
pub fn e_ei(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("eEi argument", x));
    }
    Ok(e_ei_unchecked(x))
}

pub(crate) fn e_ei_unchecked(x: f64) -> f64 {
    if x <= 1.0 {
        libm::exp(x) * ei_series(-x)
    } else if x.is_infinite() {
        0.0
    } else {
        -e1_continued_fraction(x)
    }
}

/// `γ + ln|x| + Σ x^k / (k·k!)`; accurate for `x ∈ [-1, 0)` and `x ∈ (0, 40)`.
fn ei_series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..500 {
        let kf = k as f64;
        term *= x / kf;
        let contrib = term / kf;
        sum += contrib;
        if contrib.abs() <= f64::EPSILON * sum.abs() {
            break;
        }
    }
    EULER_GAMMA + libm::log(x.abs()) + sum
}

/// Modified Lentz evaluation of `e^z E1(z)` for `z > 1`.
fn e1_continued_fraction(z: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = z + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() <= f64::EPSILON {
            break;
        }
    }
    h
}

fn ei_asymptotic(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..100 {
        let next = term * (k as f64) / x;
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() <= f64::EPSILON * sum {
            break;
        }
    }
    libm::exp(x) / x * sum
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Exact `n!` for `n ≤ 30`.
pub fn factorial(n: u32) -> Result<u128> {
    if n > MAX_INTEGER_ARG {
        return Err(domain("factorial argument", n as f64));
    }
    Ok((1..=n as u128).product())
}

/// Exact binomial coefficient `n choose k` for `k ≤ n ≤ 30`.
pub fn binomial(n: u32, k: u32) -> Result<u64> {
    if n > MAX_INTEGER_ARG {
        return Err(domain("binomial n", n as f64));
    }
    if k > n {
        return Err(domain("binomial k", k as f64));
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut acc: u64 = 1;
    for i in 0..k {
        // Exact at every step: acc * (n - i) is divisible by (i + 1).
        acc = acc * (n - i) / (i + 1);
    }
    Ok(acc)
}

/// Closed form of `∫_{c1}^{c2} e^{-ax} Ei(ax) dx` for `a < 0`, `c1, c2 > 0`.
///
/// Equals `(1/(-a)) [eEi(-a c2) - eEi(-a c1) - ln(c2/c1)]`.
pub fn appendix_integral(a: f64, c1: f64, c2: f64) -> Result<f64> {
    if !(a < 0.0) {
        return Err(domain("appendix integral a", a));
    }
    if !(c1 > 0.0) {
        return Err(domain("appendix integral c1", c1));
    }
    if !(c2 > 0.0) {
        return Err(domain("appendix integral c2", c2));
    }
    if c1 == c2 {
        return Ok(0.0);
    }
    let s = -a;
    Ok((e_ei_unchecked(s * c2) - e_ei_unchecked(s * c1) - libm::log(c2 / c1)) / s)
}

/// `∫_{x0}^{x1} eEi(s) ds` for `0 < x0`, `0 < x1`, free of cancellation.
///
/// This is the appendix integral in the variable `s = -a x`, arranged so
/// that it stays accurate when the interval is short relative to `x0`
/// (where the closed form subtracts nearly equal numbers).
pub fn e_ei_integral(x0: f64, x1: f64) -> Result<f64> {
    if !(x0 > 0.0) {
        return Err(domain("eEi integral lower limit", x0));
    }
    if !(x1 > 0.0) {
        return Err(domain("eEi integral upper limit", x1));
    }
    if x1 < x0 {
        return Ok(-e_ei_integral_span(x1, x0 - x1)?);
    }
    e_ei_integral_span(x0, x1 - x0)
}

/// `∫_{x0}^{x0+h} eEi(s) ds` for `x0 > 0`, `h ≥ 0`.
///
/// Taking the length rather than the upper limit keeps full relative
/// accuracy when `h` is far below the spacing of floats near `x0`.
pub fn e_ei_integral_span(x0: f64, h: f64) -> Result<f64> {
    if !(x0 > 0.0) {
        return Err(domain("eEi integral lower limit", x0));
    }
    if !(h >= 0.0) {
        return Err(domain("eEi integral length", h));
    }
    if h == 0.0 {
        return Ok(0.0);
    }
    if h <= x0 {
        // eEi is analytic on [x0, 2 x0]; one Kronrod panel is at round-off.
        let mut f = |t: f64| e_ei_unchecked(x0 + t);
        return Ok(quad::gk15(&mut f, 0.0, h).0);
    }
    Ok(e_ei_shifted(x0 + h) - e_ei_shifted(x0))
}

/// `eEi(s) - ln s - γ`, an antiderivative of `eEi`.
fn e_ei_shifted(s: f64) -> f64 {
    if s <= 1.0 {
        // e^s (γ + ln s + E(s)) - ln s - γ = expm1(s)(ln s + γ) + e^s E(s)
        let mut term = 1.0;
        let mut series = 0.0;
        for k in 1..200 {
            let kf = k as f64;
            term *= -s / kf;
            let contrib = term / kf;
            series += contrib;
            if contrib.abs() <= f64::EPSILON * series.abs() {
                break;
            }
        }
        libm::expm1(s) * (libm::log(s) + EULER_GAMMA) + libm::exp(s) * series
    } else {
        e_ei_unchecked(s) - libm::log(s) - EULER_GAMMA
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from 40-digit evaluation.
    const EI_TABLE: &[(f64, f64)] = &[
        (-1.0, -0.219_383_934_395_520_27),
        (-1e-8, -17.843_465_089_050_833),
        (-0.5, -0.559_773_594_776_160_8),
        (-2.5, -0.024_914_917_870_269_736),
        (-5.0, -0.001_148_295_591_275_325_8),
        (-30.0, -3.021_552_010_688_812_5e-15),
        (-39.0, -2.888_779_301_522_701e-19),
        (-45.0, -6.225_690_809_462_384e-22),
        (-100.0, -3.683_597_761_682_032e-46),
        (-700.0, -1.406_518_766_234_033e-307),
        (1e-8, -17.843_465_069_050_833),
        (0.1, -1.622_812_813_969_276_6),
        (1.0, 1.895_117_816_355_936_8),
        (5.0, 40.185_275_355_803_18),
        (20.0, 25_615_652.664_056_59),
        (39.9, 5_479_032_048_901_893.5),
        (40.5, 9_831_586_535_606_510.0),
        (100.0, 2.715_552_744_853_882e41),
        (700.0, 1.450_978_736_052_560_9e301),
    ];

    const E_EI_TABLE: &[(f64, f64)] = &[
        (1e-6, -13.238_309_131_365_004),
        (0.01, -4.078_511_443_456_426),
        (0.5, -0.922_910_632_483_730_5),
        (1.0, -0.596_347_362_323_194_1),
        (2.0, -0.361_328_616_888_222_6),
        (10.0, -0.091_563_333_939_788_08),
        (50.0, -0.019_615_109_930_114_87),
        (700.0, -0.001_426_536_418_300_886_7),
        (1000.0, -0.000_999_001_994_023_880_7),
        (1e6, -9.999_990_000_019_999e-7),
    ];

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn ei_matches_reference_table() {
        for &(x, want) in EI_TABLE {
            let got = exp_integral_ei(x).unwrap();
            assert!(rel(got, want) <= 1e-12, "Ei({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn e_ei_matches_reference_table() {
        for &(x, want) in E_EI_TABLE {
            let got = e_ei(x).unwrap();
            assert!(rel(got, want) <= 1e-10, "eEi({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn ei_minus_one_against_quadrature() {
        // -∫_1^∞ e^{-t}/t dt
        let q = quad::integrate_to_infinity(
            "E1(1)",
            |t| libm::exp(-t) / t,
            1.0,
            quad::Tolerance::relative(1e-14),
        )
        .unwrap();
        let ei = exp_integral_ei(-1.0).unwrap();
        assert!((ei + q.value).abs() < 1e-13);
        assert!((ei + 0.219_383_934_4).abs() < 1e-10);
    }

    #[test]
    fn ei_small_argument_limit() {
        for &x in &[-1e-7, -1e-8, -3e-9, 1e-7, 2e-8] {
            let limit = EULER_GAMMA + libm::log(libm::fabs(x));
            assert!((exp_integral_ei(x).unwrap() - limit).abs() < 1e-6);
        }
        assert!((exp_integral_ei(-1e-8).unwrap() + 17.84346).abs() < 1e-5);
    }

    #[test]
    fn ei_negative_tail_rises_to_zero() {
        let mut prev = exp_integral_ei(-1.0).unwrap();
        for i in 2..200 {
            let v = exp_integral_ei(-(i as f64)).unwrap();
            assert!(v < 0.0 && v > prev);
            prev = v;
        }
    }

    #[test]
    fn ei_zero_is_domain_error() {
        assert!(exp_integral_ei(0.0).is_err());
    }

    #[test]
    fn e_ei_rejects_nonpositive() {
        assert!(e_ei(0.0).is_err());
        assert!(e_ei(-1.0).is_err());
    }

    #[test]
    fn e_ei_large_argument_is_asymptotic() {
        let v = e_ei(700.0).unwrap();
        assert!(v.is_finite());
        assert!(((v * 700.0) + 1.0).abs() < 0.01);
        assert!(e_ei(1e6).unwrap() < 0.0);
    }

    #[test]
    fn e_ei_product_at_one() {
        let direct = libm::exp(1.0) * exp_integral_ei(-1.0).unwrap();
        assert!((e_ei(1.0).unwrap() - direct).abs() < 1e-14);
        assert!((direct + 0.596_347_362_4).abs() < 1e-10);
    }

    #[test]
    fn erf_values() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(2.121_320_3) - 0.997_300_203_390_712_7).abs() < 1e-12);
        assert!((erf(0.353_553_390_593_273_8) - 0.382_924_922_548_026_2).abs() < 1e-12);
        for i in 0..50 {
            let x = i as f64 * 0.13;
            assert_eq!(erf(-x), -erf(x));
        }
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(4, 2).unwrap(), 6);
        assert_eq!(binomial(30, 15).unwrap(), 155_117_520);
        for n in 0..=MAX_INTEGER_ARG {
            assert_eq!(binomial(n, 0).unwrap(), 1);
            assert_eq!(binomial(n, n).unwrap(), 1);
        }
        for nu in 1..=20u32 {
            let alternating: i128 = (0..=nu).map(|k| binomial(nu, k).unwrap() as i128 * if k % 2 == 0 { 1 } else { -1 }).sum();
            assert_eq!(alternating, 0);
        }
        assert!(binomial(3, 4).is_err());
        assert!(binomial(31, 2).is_err());
    }

    #[test]
    fn factorial_is_exact() {
        assert_eq!(factorial(0).unwrap(), 1);
        assert_eq!(factorial(20).unwrap(), 2_432_902_008_176_640_000);
        assert_eq!(factorial(30).unwrap(), 265_252_859_812_191_058_636_308_480_000_000);
        assert!(factorial(31).is_err());
    }

    #[test]
    fn appendix_reference_point() {
        let v = appendix_integral(-1.0, 1.0, 2.0).unwrap();
        let expected = e_ei(2.0).unwrap() - e_ei(1.0).unwrap() - core::f64::consts::LN_2;
        assert!((v - expected).abs() < 1e-15);
        // 40-digit quadrature of ∫_1^2 e^x Ei(-x) dx
        assert!((v + 0.458_128_435_124_973_8).abs() < 1e-12);
    }

    #[test]
    fn appendix_orientation() {
        assert_eq!(appendix_integral(-2.0, 3.0, 3.0).unwrap(), 0.0);
        let fwd = appendix_integral(-0.3, 0.2, 7.0).unwrap();
        let rev = appendix_integral(-0.3, 7.0, 0.2).unwrap();
        assert!((fwd + rev).abs() < 1e-14);
    }

    #[test]
    fn appendix_rejects_bad_arguments() {
        assert!(appendix_integral(0.0, 1.0, 2.0).is_err());
        assert!(appendix_integral(1.0, 1.0, 2.0).is_err());
        assert!(appendix_integral(-1.0, 0.0, 2.0).is_err());
        assert!(appendix_integral(-1.0, 1.0, -2.0).is_err());
    }

    #[test]
    fn e_ei_integral_matches_closed_form_when_well_conditioned() {
        for &(x0, x1) in &[(0.5, 3.0), (2.0, 40.0), (1e-3, 5.0), (0.1, 0.15), (30.0, 31.0)] {
            let closed = appendix_integral(-1.0, x0, x1).unwrap();
            let stable = e_ei_integral(x0, x1).unwrap();
            assert!((closed - stable).abs() <= 1e-12 * closed.abs().max(1.0), "{x0} {x1}: {closed} vs {stable}");
        }
    }

    #[test]
    fn e_ei_integral_short_interval() {
        // ∫_{x0}^{x0 + h} eEi ≈ h eEi(x0 + h/2) for tiny h
        let x0 = 0.37;
        let h = 1e-9;
        let got = e_ei_integral_span(x0, h).unwrap();
        let mid = e_ei(x0 + 0.5 * h).unwrap() * h;
        assert!(((got - mid) / mid).abs() < 1e-12);
        let x1 = x0 + h;
        let rounded = e_ei_integral(x0, x1).unwrap();
        let mid = e_ei(x0 + 0.5 * (x1 - x0)).unwrap() * (x1 - x0);
        assert!(((rounded - mid) / mid).abs() < 1e-12);
    }
}
