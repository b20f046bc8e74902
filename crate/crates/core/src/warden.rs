//! Willie's radiometer: the optimal threshold and minimum detection error for
//! one channel realization, and the expected minimum error from Alice's side,
//! averaged over blockage, antenna gains and fading.

use crate::channel::{alzer_cdf, alzer_cdf_integral, eta, gamma_pdf, SystemConfig};
use crate::error::{domain, Error, Result};
use crate::quad::{self, Tolerance};
use crate::specfun;

/// Jamming-to-signal ratios at Willie, and jamming-to-noise ratios at Bob,
/// below this are treated as no jamming.
pub const NEGLIGIBLE_RATIO: f64 = 1e-12;

const PROBABILITY_SLACK: f64 = 1e-9;

/// Round-off amplification of the alternating sums above which the
/// conditional error is integrated numerically instead.
const CANCELLATION_LIMIT: f64 = 1e-9;

/// Received power components at Willie for one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizationInputs {
    /// Signal power `P_a G_{aw,f} L_{aw} |h_{aw,f}|²`.
    pub signal: f64,
    /// Jamming power at full scale `P_J^max G_{aw,s} L_{aw} |h_{aw,s}|²`.
    pub jamming: f64,
    /// Noise power `σ²_w`.
    pub noise: f64,
}

impl RealizationInputs {
    /// Noise-only level `λ₁ = S_j + σ²_w` (the largest H0 statistic).
    pub fn lambda1(&self) -> f64 {
        self.jamming + self.noise
    }

    /// Smallest H1 statistic `λ₂ = S_f + σ²_w`.
    pub fn lambda2(&self) -> f64 {
        self.signal + self.noise
    }

    /// Largest H1 statistic `λ₃ = λ₂ + S_j`.
    pub fn lambda3(&self) -> f64 {
        self.lambda2() + self.jamming
    }

    fn validate(&self) -> Result<()> {
        if !(self.signal >= 0.0) {
            return Err(domain("signal power", self.signal));
        }
        if !(self.jamming > 0.0) {
            return Err(domain("jamming power", self.jamming));
        }
        if !(self.noise > 0.0) {
            return Err(domain("noise power", self.noise));
        }
        Ok(())
    }
}

/// Minimum detection error and the interval of optimal thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionResult {
    /// `P*_{e,w}`.
    pub p_e_star: f64,
    /// Lower end of the optimal threshold interval.
    pub tau_lo: f64,
    /// Upper end of the optimal threshold interval.
    pub tau_hi: f64,
}

/// False alarm, missed detection and total error at one threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorCurves {
    /// `P_FA`.
    pub false_alarm: f64,
    /// `P_MD`.
    pub missed_detection: f64,
    /// `P_FA + P_MD`.
    pub total: f64,
}

/// Optimal detector for one realization.
pub fn detection_error_star(r: &RealizationInputs) -> Result<DetectionResult> {
    r.validate()?;
    let (l1, l2) = (r.lambda1(), r.lambda2());
    // Compare S_j with S_f rather than λ₁ with λ₂ so the noise floor cannot
    // swallow the difference.
    if r.jamming <= r.signal {
        return Ok(DetectionResult { p_e_star: 0.0, tau_lo: l1, tau_hi: l2 });
    }
    Ok(DetectionResult { p_e_star: 1.0 - r.signal / r.jamming, tau_lo: l2, tau_hi: l1 })
}

/// Radiometer error curves at threshold `tau`; the jamming power is uniform
/// on `[0, P_J^max]` and unknown to Willie.
pub fn detector_curves(r: &RealizationInputs, tau: f64) -> Result<DetectorCurves> {
    r.validate()?;
    if !(tau >= 0.0) {
        return Err(domain("threshold", tau));
    }
    let (l1, l2, l3) = (r.lambda1(), r.lambda2(), r.lambda3());
    let false_alarm = if tau < r.noise {
        1.0
    } else if tau <= l1 {
        (1.0 - (tau - r.noise) / r.jamming).max(0.0)
    } else {
        0.0
    };
    let missed_detection = if tau < l2 {
        0.0
    } else if tau <= l3 {
        ((tau - l2) / r.jamming).min(1.0)
    } else {
        1.0
    };
    Ok(DetectorCurves { false_alarm, missed_detection, total: false_alarm + missed_detection })
}

/// Closed-form expected minimum detection error `E[P*_{e,w}]` at `cfg.pj_max`.
pub fn expected_detection_error(cfg: &SystemConfig) -> Result<f64> {
    cfg.validate()?;
    if !(cfg.pj_max > 0.0) {
        return Err(domain("P_J^max", cfg.pj_max));
    }
    let signal_gains = cfg.signal_gain_at_willie();
    let jammer_gains = cfg.jammer_gain_at_willie();
    let mut total = 0.0;
    for (state, p_state, _) in cfg.link_states(cfg.d_aw)? {
        if p_state == 0.0 {
            continue;
        }
        let nu = cfg.fading.nu(state);
        for (g_s, b_s) in jammer_gains.support() {
            for (g_f, b_f) in signal_gains.support() {
                let ratio = cfg.pj_max * g_s / (cfg.pa * g_f);
                if ratio < NEGLIGIBLE_RATIO {
                    // The error vanishes with the ratio.
                    continue;
                }
                total += p_state * b_s * b_f * conditional_error(nu, ratio)?;
            }
        }
    }
    clamp_probability("expected detection error", total)
}

/// Conditional expected error for one blockage state and gain pair, as a
/// function of `C₁ = P_J^max g_s / (P_a g_f)`:
/// `[1 + S] · [1 - S + T]` with `1 + S` the probability of a positive error.
pub(crate) fn conditional_error(nu: u32, c1: f64) -> Result<f64> {
    // The sums alternate over C(ν, l) and T carries a 1/C₁ factor.
    let amplification = libm::ldexp(f64::EPSILON, nu as i32) * (1.0 + 1.0 / c1);
    if amplification > CANCELLATION_LIMIT {
        return conditional_error_quadrature(nu, c1);
    }
    let e = eta(nu);
    let nu_f = nu as f64;
    let mut s = 0.0;
    let mut t_sum = 0.0;
    for l in 1..=nu {
        let c = signed_binomial(nu, l)?;
        let lf = l as f64;
        let w = lf * e * c1 / nu_f;
        s += c * libm::pow(1.0 + w, -nu_f);
        let i = if nu == 1 {
            libm::log1p(lf * c1)
        } else {
            // (ν-2)!/ν^{ν-1} · [1 - (1+w)^{1-ν}]
            let lead = specfun::factorial(nu - 2)? as f64 / libm::pow(nu_f, nu_f - 1.0);
            lead * -libm::expm1((1.0 - nu_f) * libm::log1p(w))
        };
        t_sum += c / lf * i;
    }
    let gamma_nu = specfun::factorial(nu - 1)? as f64;
    let t = libm::pow(nu_f, nu_f) / (c1 * e * gamma_nu) * t_sum;
    Ok((1.0 + s) * (1.0 - s + t))
}

/// Same quantity as [`conditional_error`] from its integral form
/// `Pr(X ≤ C₁Y) · (1 - E_Y[F_A(C₁Y) - (C₁Y)^{-1} ∫_0^{C₁Y} F_A])`, which has
/// no cancellation.
fn conditional_error_quadrature(nu: u32, c1: f64) -> Result<f64> {
    let tol = Tolerance { abs: 0.0, rel: 1e-11 };
    let pts = quad::decade_breakpoints(&[1.0 / c1, 1.0], None);
    let pr = quad::integrate_pieces("detection probability", |y| alzer_cdf(c1 * y, nu) * gamma_pdf(y, nu), &pts, true, tol)?.value;
    if pr == 0.0 {
        return Ok(0.0);
    }
    let mut failure = None;
    let k = quad::integrate_pieces(
        "detection ratio term",
        |y| {
            let w = gamma_pdf(y, nu);
            let c = c1 * y;
            if w == 0.0 || c == 0.0 {
                return 0.0;
            }
            match alzer_cdf_integral(c, nu, Tolerance { abs: 0.0, rel: 1e-13 }) {
                Ok(i) => w * (alzer_cdf(c, nu) - i / c),
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        &pts,
        true,
        Tolerance { abs: 1e-14, rel: 1e-11 },
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(pr * (1.0 - k?.value))
}

pub(crate) fn signed_binomial(nu: u32, l: u32) -> Result<f64> {
    let c = specfun::binomial(nu, l)? as f64;
    Ok(if l % 2 == 0 { c } else { -c })
}

pub(crate) fn clamp_probability(what: &'static str, p: f64) -> Result<f64> {
    if !p.is_finite() || p < -PROBABILITY_SLACK || p > 1.0 + PROBABILITY_SLACK {
        return Err(Error::Inconsistent { what, value: p });
    }
    Ok(p.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::db_to_linear;

    fn realization(signal: f64, jamming: f64) -> RealizationInputs {
        RealizationInputs { signal, jamming, noise: 0.5 }
    }

    #[test]
    fn strong_signal_is_always_detected() {
        let d = detection_error_star(&realization(2.0, 1.0)).unwrap();
        assert_eq!(d.p_e_star, 0.0);
        assert_eq!((d.tau_lo, d.tau_hi), (1.5, 2.5));
    }

    #[test]
    fn jammer_dominated_error() {
        let d = detection_error_star(&realization(1.0, 4.0)).unwrap();
        assert!((d.p_e_star - 0.75).abs() < 1e-15);
        assert_eq!((d.tau_lo, d.tau_hi), (1.5, 4.5));
    }

    #[test]
    fn equal_powers_give_zero_error() {
        let d = detection_error_star(&realization(3.0, 3.0)).unwrap();
        assert_eq!(d.p_e_star, 0.0);
        assert_eq!(d.tau_lo, d.tau_hi);
    }

    #[test]
    fn missing_jammer_is_rejected() {
        assert!(detection_error_star(&realization(1.0, 0.0)).is_err());
        assert!(detector_curves(&realization(1.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn curves_at_boundaries() {
        let r = realization(1.0, 4.0);
        let below = detector_curves(&r, 0.2).unwrap();
        assert_eq!((below.false_alarm, below.missed_detection, below.total), (1.0, 0.0, 1.0));
        let top = detector_curves(&r, r.lambda3()).unwrap();
        assert_eq!((top.false_alarm, top.missed_detection, top.total), (0.0, 1.0, 1.0));
        let mid = detector_curves(&r, 3.0).unwrap();
        assert!((mid.total - 0.75).abs() < 1e-15);
        assert!(detector_curves(&r, -1.0).is_err());
    }

    #[test]
    fn tiny_jammer_gives_zero() {
        let cfg = SystemConfig::benchmark().with_pj_max(1e-13);
        assert_eq!(expected_detection_error(&cfg).unwrap(), 0.0);
        let cfg = SystemConfig::benchmark().with_pj_max(db_to_linear(-60.0));
        assert!(expected_detection_error(&cfg).unwrap() < 1e-6);
        assert!(expected_detection_error(&SystemConfig::benchmark().with_pj_max(0.0)).is_err());
        assert!(expected_detection_error(&SystemConfig::benchmark().with_pj_max(-1.0)).is_err());
    }

    #[test]
    fn benchmark_reaches_covertness_target() {
        let cfg = SystemConfig::benchmark().with_pj_max(db_to_linear(15.52));
        let p = expected_detection_error(&cfg).unwrap();
        assert!((p - 0.95).abs() < 0.002, "{p}");
    }

    #[test]
    fn strong_jammer_saturates() {
        let cfg = SystemConfig::benchmark().with_pj_max(db_to_linear(60.0));
        assert!(expected_detection_error(&cfg).unwrap() >= 0.999);
    }

    #[test]
    fn rayleigh_conditional_has_closed_form() {
        // ν = 1 exactly (Alzer is exact): P(X ≤ cY) = c/(1+c) and
        // E[(1 - X/(cY)) 1{X ≤ cY}] is the printed product form evaluated by hand.
        let c: f64 = 2.5;
        let pr = c / (1.0 + c);
        let s = -1.0 / (1.0 + c);
        let t = (1.0 / c) * -libm::log1p(c);
        let want = pr * (1.0 - s + t);
        assert!((conditional_error(1, c).unwrap() - want).abs() < 1e-15);
        assert!((1.0 + s - pr).abs() < 1e-15);
    }

    #[test]
    fn integral_form_matches_closed_form() {
        for nu in 1..=6 {
            for c1 in [1e-2, 0.1, 1.0, 10.0, 100.0] {
                let closed = conditional_error(nu, c1).unwrap();
                let quad = conditional_error_quadrature(nu, c1).unwrap();
                assert!((closed - quad).abs() <= 1e-10, "ν {nu}, C₁ {c1}: {closed} vs {quad}");
            }
        }
    }

    #[test]
    fn large_shapes_stay_ordered() {
        let mut cfg = SystemConfig::benchmark();
        cfg.fading.nu_los = 25;
        cfg.fading.nu_nlos = 25;
        let mut prev = 0.0;
        for i in 0..=28 {
            let e = expected_detection_error(&cfg.with_pj_max(db_to_linear(-80.0 + 5.0 * i as f64))).unwrap();
            assert!((0.0..=1.0).contains(&e) && e >= prev, "{i}: {e}");
            prev = e;
        }
    }
}
