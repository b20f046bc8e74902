//! Alice-Bob link metrics: outage probability at a target rate, effective
//! rate, and ergodic capacity.
//!
//! Bob sees the signal through the first array's gain `g_f` and his own
//! gain `g_b`; the jammer reaches him through the second array's side lobe
//! (or its steering-error gain distribution when Willie sits in the Alice-Bob
//! direction) and, arriving from Alice's direction as well, through `g_b`.

use core::f64::consts::LN_2;

use alloc::vec::Vec;

use crate::channel::{eta, gain_pmf, gamma_pdf, SystemConfig};
use crate::error::{domain, Result};
use crate::quad::{self, Tolerance};
use crate::specfun;
use crate::warden::{clamp_probability, signed_binomial, NEGLIGIBLE_RATIO};

/// Relative tolerance of the one-dimensional capacity integrals.
pub const CAPACITY_REL_TOL: f64 = 1e-10;

// Below this the uniform-power average (1/z)∫_0^z (1+s)^{-ν} ds uses its Taylor form.
const SMALL_Z: f64 = 1e-8;

/// Outage, effective rate and ergodic capacity of the Alice-Bob link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkMetrics {
    /// Target rate, bits per channel use.
    pub rate: f64,
    /// Outage probability at `rate`.
    pub outage: f64,
    /// `rate · (1 - outage)`.
    pub effective_rate: f64,
    /// Ergodic capacity, bits per channel use.
    pub ergodic_capacity: f64,
}

/// How [`ergodic_capacity_with`] evaluates each `J₁ - J₂ - J₃` term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapacityMethod {
    /// Closed forms for `ν = 2`, combined-integrand quadrature otherwise.
    Auto,
    /// Combined-integrand quadrature for every shape.
    Quadrature,
}

/// Every link metric at target rate `rate`.
pub fn link_metrics(cfg: &SystemConfig, rate: f64) -> Result<LinkMetrics> {
    let outage = outage_probability(cfg, rate)?;
    Ok(LinkMetrics {
        rate,
        outage,
        effective_rate: rate * (1.0 - outage),
        ergodic_capacity: ergodic_capacity(cfg)?,
    })
}

/// One averaging point of the link: blockage state, gains and their joint weight.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LinkBranch {
    pub weight: f64,
    pub nu: u32,
    pub path_loss: f64,
    pub g_signal: f64,
    pub g_bob: f64,
    pub g_jammer: f64,
}

pub(crate) fn link_branches(cfg: &SystemConfig) -> Result<Vec<LinkBranch>> {
    let sig = gain_pmf(&cfg.alice_first);
    let bob = gain_pmf(&cfg.bob);
    let jam = cfg.jammer_gain_at_bob();
    let mut out = Vec::with_capacity(16);
    for (state, p, path_loss) in cfg.link_states(cfg.d_ab)? {
        if p == 0.0 {
            continue;
        }
        for (g_signal, b_f) in sig.support() {
            for (g_bob, b_b) in bob.support() {
                for (g_jammer, b_j) in jam.support() {
                    out.push(LinkBranch {
                        weight: p * b_f * b_b * b_j,
                        nu: cfg.fading.nu(state),
                        path_loss,
                        g_signal,
                        g_bob,
                        g_jammer,
                    });
                }
            }
        }
    }
    Ok(out)
}

fn check_link(cfg: &SystemConfig) -> Result<()> {
    cfg.validate()?;
    if !(cfg.pj_max >= 0.0) {
        return Err(domain("P_J^max", cfg.pj_max));
    }
    Ok(())
}

/// Outage probability of the Alice-Bob link at target rate `rate` (bits/use).
pub fn outage_probability(cfg: &SystemConfig, rate: f64) -> Result<f64> {
    check_link(cfg)?;
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(domain("target rate", rate));
    }
    let gamma_th = libm::exp2(rate) - 1.0;
    let mut total = 0.0;
    for br in link_branches(cfg)? {
        let e = eta(br.nu);
        let nu_f = br.nu as f64;
        let c3 = gamma_th * cfg.sigma2_b / (cfg.pa * br.g_signal * br.g_bob * br.path_loss);
        let c2 = gamma_th * br.g_jammer / (cfg.pa * br.g_signal);
        let mut cond = 1.0;
        for l in 1..=br.nu {
            let lf = l as f64;
            let z = lf * e * c2 * cfg.pj_max / nu_f;
            cond += signed_binomial(br.nu, l)? * libm::exp(-lf * e * c3) * uniform_power_average(br.nu, z);
        }
        total += br.weight * cond;
    }
    clamp_probability("outage probability", total)
}

/// `(1/z) ∫_0^z (1+s)^{-ν} ds`: the MGF term averaged over uniform jamming power.
fn uniform_power_average(nu: u32, z: f64) -> f64 {
    let nu_f = nu as f64;
    if z < SMALL_Z {
        return 1.0 - 0.5 * nu_f * z;
    }
    if nu == 1 {
        libm::log1p(z) / z
    } else {
        -libm::expm1((1.0 - nu_f) * libm::log1p(z)) / ((nu_f - 1.0) * z)
    }
}

/// Effective rate `R_b (1 - P_out)`.
pub fn effective_rate(cfg: &SystemConfig, rate: f64) -> Result<f64> {
    Ok(rate * (1.0 - outage_probability(cfg, rate)?))
}

/// Ergodic capacity `E[log₂(1 + γ_ab)]`, bits per channel use.
pub fn ergodic_capacity(cfg: &SystemConfig) -> Result<f64> {
    ergodic_capacity_with(cfg, CapacityMethod::Auto)
}

/// Ergodic capacity with an explicit choice of evaluation path.
pub fn ergodic_capacity_with(cfg: &SystemConfig, method: CapacityMethod) -> Result<f64> {
    check_link(cfg)?;
    let mut total = 0.0;
    for br in link_branches(cfg)? {
        total += br.weight * conditional_capacity(cfg, &br, method)?;
    }
    Ok(total.max(0.0))
}

fn conditional_capacity(cfg: &SystemConfig, br: &LinkBranch, method: CapacityMethod) -> Result<f64> {
    let e = eta(br.nu);
    let c3 = cfg.sigma2_b / (cfg.pa * br.g_signal * br.g_bob * br.path_loss);
    if jamming_negligible(cfg, br) {
        // No jamming: (1/ln 2) Σ (-1)^l C(ν,l) eEi(lη C₃')
        let mut s = 0.0;
        for l in 1..=br.nu {
            s += signed_binomial(br.nu, l)? * specfun::e_ei(l as f64 * e * c3)?;
        }
        return Ok(s / LN_2);
    }
    let mut sum = 0.0;
    for l in 1..=br.nu {
        let lf = l as f64;
        let j = match (method, br.nu) {
            (CapacityMethod::Auto, 2) => match j_difference_nu2(cfg, br, l)? {
                Some(j) => j,
                None => j_difference_quadrature(cfg, br, l)?,
            },
            _ => j_difference_quadrature(cfg, br, l)?,
        };
        sum += signed_binomial(br.nu, l)? / (lf * e) * j;
    }
    Ok(cfg.pa * br.g_signal / (br.g_jammer * cfg.pj_max * LN_2) * sum)
}

/// Whether the jamming reaching Bob is negligible against his noise.
pub(crate) fn jamming_negligible(cfg: &SystemConfig, br: &LinkBranch) -> bool {
    cfg.pj_max * br.g_jammer * br.g_bob * br.path_loss < NEGLIGIBLE_RATIO * cfg.sigma2_b
}

/// Scales of the combined `J` integrand for one `(branch, l)`:
/// `x₀ = lη C₃'` and the slope `lη C₂' P_J^max` of its upper limit in `y`.
fn j_scales(cfg: &SystemConfig, br: &LinkBranch, l: u32) -> (f64, f64) {
    let le = l as f64 * eta(br.nu);
    let x0 = le * cfg.sigma2_b / (cfg.pa * br.g_signal * br.g_bob * br.path_loss);
    let slope = le * br.g_jammer * cfg.pj_max / (cfg.pa * br.g_signal);
    (x0, slope)
}

/// Integrand of `J₁ - J₂ - J₃` (without the density), at `y > 0`:
/// `[eEi(x₀ + s y) - eEi(x₀) - ln(1 + s y / x₀)] / y`.
///
/// The bracket equals `∫_{x₀}^{x₀+sy} eEi`, which vanishes linearly at `y = 0`,
/// so the ratio has a finite limit for every shape, including `ν = 1` where
/// the three integrals diverge separately.
pub fn combined_j_integrand(x0: f64, slope: f64, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(domain("J integrand abscissa", y));
    }
    Ok(specfun::e_ei_integral_span(x0, slope * y)? / y)
}

fn j_difference_quadrature(cfg: &SystemConfig, br: &LinkBranch, l: u32) -> Result<f64> {
    let (x0, slope) = j_scales(cfg, br, l);
    let nu = br.nu;
    let mut failure = None;
    let est = quad::integrate_pieces(
        "ergodic capacity J term",
        |y| {
            let w = gamma_pdf(y, nu);
            if w == 0.0 {
                return 0.0;
            }
            match combined_j_integrand(x0, slope, y) {
                Ok(v) => v * w,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        &quad::decade_breakpoints(&[x0 / slope, 1.0], None),
        true,
        Tolerance::relative(CAPACITY_REL_TOL),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(est?.value)
}

/// Closed form of `J₁ - J₂ - J₃` for `ν = 2`; `None` when the three terms
/// cancel too deeply to be trusted (tiny `P_J^max`).
fn j_difference_nu2(cfg: &SystemConfig, br: &LinkBranch, l: u32) -> Result<Option<f64>> {
    let j = prop6_terms(cfg, br, l)?;
    let total = j[0] - j[1] - j[2];
    let scale = j.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if total.abs() < 1e-6 * scale {
        return Ok(None);
    }
    Ok(Some(total))
}

/// `(J₁, J₂, J₃)` for `ν = 2` in closed form.
fn prop6_terms(cfg: &SystemConfig, br: &LinkBranch, l: u32) -> Result<[f64; 3]> {
    debug_assert_eq!(br.nu, 2);
    let (x0, _) = j_scales(cfg, br, l);
    let x1 = 2.0 * cfg.sigma2_b / (br.g_bob * br.path_loss * br.g_jammer * cfg.pj_max);
    let e0 = specfun::e_ei(x0)?;
    let e1 = specfun::e_ei(x1)?;
    let j1 = if (x1 - x0).abs() < 1e-3 * x0 {
        // 4 P_a g / (lη g_j P - 2 P_a g) = 2 x₁ / (x₀ - x₁); rewrite the
        // difference quotient so the removable singularity at x₀ = x₁ is harmless.
        let diff = specfun::e_ei_integral(x0, x1)? + libm::log1p((x1 - x0) / x0);
        -2.0 * x1 * diff / (x1 - x0)
    } else {
        let le = l as f64 * eta(2);
        4.0 * cfg.pa * br.g_signal / (le * br.g_jammer * cfg.pj_max - 2.0 * cfg.pa * br.g_signal) * (e1 - e0)
    };
    Ok([j1, 2.0 * e0, -2.0 * e1])
}
