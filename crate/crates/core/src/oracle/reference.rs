//! Nested-quadrature references under the Alzer CDF.
//!
//! Each function integrates the averaged expression directly, with the
//! desired fading in Alzer form and the interfering fading exactly gamma,
//! leaving every analytic step of the closed forms to the integrator.

use crate::channel::{alzer_cdf, alzer_cdf_integral, alzer_terms, gamma_pdf, SystemConfig};
use crate::error::{domain, Error, Result};
use crate::link::link_branches;
use crate::quad::{self, Tolerance};
use crate::link::jamming_negligible;
use crate::specfun;
use crate::warden::{clamp_probability, NEGLIGIBLE_RATIO};

/// Smallest accepted tolerance.
pub const MIN_TOL: f64 = 1e-10;

fn check_tol(tol: f64) -> Result<()> {
    if !(tol >= MIN_TOL && tol.is_finite()) {
        return Err(domain("reference tolerance", tol));
    }
    Ok(())
}

/// Runs a closure-based integrand whose evaluation may fail, surfacing the
/// first inner failure instead of a NaN-driven quadrature error.
struct Guard {
    failure: Option<Error>,
}

impl Guard {
    fn new() -> Self {
        Self { failure: None }
    }

    fn value(&mut self, r: Result<f64>) -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                self.failure.get_or_insert(e);
                f64::NAN
            }
        }
    }

    fn finish(self, r: Result<quad::Estimate>) -> Result<f64> {
        match self.failure {
            Some(e) => Err(e),
            None => Ok(r?.value),
        }
    }
}

/// `E[P*_{e,w}]` by nested quadrature.
///
/// Per blockage state and gain pair, with `X` the signal fading (Alzer) and
/// `Y` the jamming fading (gamma), `C₁ = P_J^max g_s / (P_a g_f)`:
/// `Pr(X ≤ C₁Y) · (1 - ∫ f_Y(y) (C₁y)^{-1} [C₁y F_A(C₁y) - ∫_0^{C₁y} F_A] dy)`.
pub fn alzer_ref_detection(cfg: &SystemConfig, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    cfg.validate()?;
    if !(cfg.pj_max > 0.0) {
        return Err(domain("P_J^max", cfg.pj_max));
    }
    let outer = Tolerance { abs: 0.1 * tol, rel: 0.1 * tol };
    let inner = Tolerance { abs: 1e-3 * tol, rel: 1e-3 * tol };
    let mut total = 0.0;
    for (state, p, _) in cfg.link_states(cfg.d_aw)? {
        if p == 0.0 {
            continue;
        }
        let nu = cfg.fading.nu(state);
        for (g_s, b_s) in cfg.jammer_gain_at_willie().support() {
            for (g_f, b_f) in cfg.signal_gain_at_willie().support() {
                let c1 = cfg.pj_max * g_s / (cfg.pa * g_f);
                if c1 < NEGLIGIBLE_RATIO {
                    continue;
                }
                let pts = quad::decade_breakpoints(&[1.0 / c1, 1.0], None);
                let pr = quad::integrate_pieces(
                    "detection probability",
                    |y| alzer_cdf(c1 * y, nu) * gamma_pdf(y, nu),
                    &pts,
                    true,
                    outer,
                )?
                .value;
                let mut g = Guard::new();
                let est = quad::integrate_pieces(
                    "detection ratio term",
                    |y| {
                        let w = gamma_pdf(y, nu);
                        if w == 0.0 {
                            return 0.0;
                        }
                        let c = c1 * y;
                        let v1 = g.value(alzer_cdf_integral(c, nu, inner).map(|i| c * alzer_cdf(c, nu) - i));
                        w * v1 / c
                    },
                    &pts,
                    true,
                    outer,
                );
                let k = g.finish(est)?;
                total += p * b_s * b_f * pr * (1.0 - k);
            }
        }
    }
    clamp_probability("reference detection error", total)
}

/// Outage probability by nested quadrature over the jamming power and the
/// jamming fading: `(1/P) ∫_0^P ∫_0^∞ F_A(γ(x g_j g_b L y + σ²)/(P_a g_f g_b L)) f_Y(y) dy dx`.
pub fn alzer_ref_outage(cfg: &SystemConfig, rate: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    cfg.validate()?;
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(domain("target rate", rate));
    }
    let gamma_th = libm::exp2(rate) - 1.0;
    let outer = Tolerance { abs: 0.1 * tol, rel: 0.0 };
    let inner = Tolerance { abs: 1e-3 * tol, rel: 0.0 };
    let mut total = 0.0;
    for br in link_branches(cfg)? {
        let nu = br.nu;
        let c3 = gamma_th * cfg.sigma2_b / (cfg.pa * br.g_signal * br.g_bob * br.path_loss);
        let c2 = gamma_th * br.g_jammer / (cfg.pa * br.g_signal);
        let given_power = |x: f64| -> Result<f64> {
            quad::integrate_pieces(
                "outage over jamming fading",
                |y| {
                    let w = gamma_pdf(y, nu);
                    if w == 0.0 {
                        0.0
                    } else {
                        alzer_cdf(c3 + c2 * x * y, nu) * w
                    }
                },
                &quad::decade_breakpoints(&[1.0 / (c2 * x), 1.0], None),
                true,
                inner,
            )
            .map(|e| e.value)
        };
        let cond = if jamming_negligible(cfg, &br) {
            given_power(0.0)?
        } else {
            let mut g = Guard::new();
            let est = quad::integrate("outage over jamming power", |x| g.value(given_power(x)), 0.0, cfg.pj_max, Tolerance { abs: outer.abs * cfg.pj_max, rel: 0.0 });
            g.finish(est)? / cfg.pj_max
        };
        total += br.weight * cond;
    }
    clamp_probability("reference outage", total)
}

/// Ergodic capacity (bits per use) by nested quadrature over the jamming
/// fading and the jamming power of the conditional Alzer mean
/// `E_X[ln(1 + sX)] = Σ_{l≥1} (-1)^l C(ν,l) eEi(lη/s)`.
pub fn quadrature_ref_capacity(cfg: &SystemConfig, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    cfg.validate()?;
    let rel = Tolerance { abs: 0.0, rel: 0.1 * tol };
    let inner = Tolerance { abs: 0.0, rel: 1e-3 * tol };
    let mut total = 0.0;
    for br in link_branches(cfg)? {
        let nu = br.nu;
        let c3 = cfg.sigma2_b / (cfg.pa * br.g_signal * br.g_bob * br.path_loss);
        let c2 = br.g_jammer / (cfg.pa * br.g_signal);
        // Inverse SINR scale b/a at jamming power x and fading y.
        let mean_ln = move |inv: f64| -> Result<f64> {
            let mut s = 0.0;
            for t in alzer_terms(nu).skip(1) {
                s += t.coeff * specfun::e_ei(t.rate * inv)?;
            }
            Ok(s)
        };
        let cond = if jamming_negligible(cfg, &br) {
            mean_ln(c3)?
        } else {
            let p = cfg.pj_max;
            let mut g = Guard::new();
            let est = quad::integrate_pieces(
                "capacity over jamming fading",
                |y| {
                    let w = gamma_pdf(y, nu);
                    if w == 0.0 {
                        return 0.0;
                    }
                    let mut h = Guard::new();
                    let pts = quad::decade_breakpoints(&[c3 / (c2 * y)], Some(p));
                    let inner_est = quad::integrate_pieces("capacity over jamming power", |x| h.value(mean_ln(c3 + c2 * x * y)), &pts, false, inner);
                    w * g.value(h.finish(inner_est)) / p
                },
                &quad::decade_breakpoints(&[c3 / (c2 * p), 1.0], None),
                true,
                rel,
            );
            g.finish(est)?
        };
        total += br.weight * cond;
    }
    Ok(total / core::f64::consts::LN_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::db_to_linear;
    use crate::link::{ergodic_capacity, outage_probability};
    use crate::warden::expected_detection_error;

    #[test]
    fn detection_matches_closed_form() {
        for dbm in [0.0, 15.52, 40.0] {
            let cfg = SystemConfig::benchmark().with_pj_max(db_to_linear(dbm));
            let r = alzer_ref_detection(&cfg, 1e-9).unwrap();
            let c = expected_detection_error(&cfg).unwrap();
            assert!((r - c).abs() < 1e-6, "{dbm} dBm: {r} vs {c}");
        }
    }

    #[test]
    fn outage_matches_closed_form() {
        let cfg = SystemConfig::benchmark();
        for rb in [0.1, 1.0, 5.0, 10.0] {
            let r = alzer_ref_outage(&cfg, rb, 1e-10).unwrap();
            let c = outage_probability(&cfg, rb).unwrap();
            assert!((r - c).abs() < 1e-8, "R_b {rb}: {r} vs {c}");
        }
    }

    #[test]
    fn capacity_matches_closed_form() {
        let cfg = SystemConfig::benchmark();
        let r = quadrature_ref_capacity(&cfg, 1e-9).unwrap();
        let c = ergodic_capacity(&cfg).unwrap();
        assert!(((r - c) / c).abs() < 1e-7, "{r} vs {c}");
    }

    #[test]
    fn tolerance_floor() {
        let cfg = SystemConfig::benchmark();
        assert!(alzer_ref_detection(&cfg, 1e-12).is_err());
        assert!(alzer_ref_outage(&cfg, 1.0, 0.0).is_err());
        assert!(quadrature_ref_capacity(&cfg, f64::NAN).is_err());
    }
}
