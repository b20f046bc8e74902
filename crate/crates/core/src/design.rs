//! Covert design: the largest jamming budget that keeps Willie's expected
//! error at `1 - ε`, and the target rate that maximizes the effective rate
//! under it.

use crate::channel::{path_loss, LinkState, SystemConfig};
use crate::error::{domain, Error, Result};
use crate::link::outage_probability;
use crate::warden::expected_detection_error;

/// Initial lower end of the `P_J^max` bracket, mW.
pub const BRACKET_LOW: f64 = 1e-6;
/// Initial upper end of the `P_J^max` bracket, mW.
pub const BRACKET_HIGH: f64 = 1e6;
/// Maximum number of bracket expansions per side.
pub const MAX_EXPANSIONS: usize = 60;
/// Target accuracy on `E[P*_{e,w}]`.
pub const COVERTNESS_TOL: f64 = 1e-9;
/// Coarse grid step over the target rate, bits per channel use.
pub const RATE_GRID_STEP: f64 = 0.02;
/// Final accuracy of the optimal target rate.
pub const RATE_TOL: f64 = 1e-4;

const EXPANSION_FACTOR: f64 = 10.0;
const MAX_BISECTIONS: usize = 400;

/// Result of the covert design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovertDesign {
    /// Covertness slack `ε`.
    pub epsilon: f64,
    /// `P_{J,opt}^max`, mW.
    pub pj_opt: f64,
    /// Optimal target rate, bits per channel use.
    pub r_b_opt: f64,
    /// Outage at the optimal target rate.
    pub outage_opt: f64,
    /// Maximum effective covert rate `r_b_opt (1 - outage_opt)`.
    pub rate_opt: f64,
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(domain("epsilon", epsilon));
    }
    Ok(())
}

/// Solves `E[P*_{e,w}](P_J^max) = 1 - ε`; returns `P_J^max` in mW.
///
/// The expected error increases with the jamming budget, so a bracket is
/// grown geometrically and then bisected in log-power.
pub fn solve_pj_opt(cfg: &SystemConfig, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    cfg.validate()?;
    let target = 1.0 - epsilon;
    // Small slacks need a proportionally tight root.
    let tol = COVERTNESS_TOL.min(1e-3 * epsilon);
    let f = |pj: f64| -> Result<f64> { Ok(expected_detection_error(&cfg.with_pj_max(pj))? - target) };

    let (mut lo, mut hi) = (BRACKET_LOW, BRACKET_HIGH);
    let mut f_lo = f(lo)?;
    let mut n = 0;
    while f_lo > 0.0 {
        if n == MAX_EXPANSIONS {
            return Err(Error::NoSolution { target, low: f_lo + target, high: f(hi)? + target });
        }
        lo /= EXPANSION_FACTOR;
        f_lo = f(lo)?;
        n += 1;
    }
    let mut f_hi = f(hi)?;
    n = 0;
    while f_hi < 0.0 {
        if n == MAX_EXPANSIONS {
            return Err(Error::NoSolution { target, low: f_lo + target, high: f_hi + target });
        }
        hi *= EXPANSION_FACTOR;
        f_hi = f(hi)?;
        n += 1;
    }
    if f_lo.abs() <= tol {
        return Ok(lo);
    }
    if f_hi.abs() <= tol {
        return Ok(hi);
    }

    let (mut a, mut b) = (libm::log(lo), libm::log(hi));
    for _ in 0..MAX_BISECTIONS {
        let m = 0.5 * (a + b);
        let pj = libm::exp(m);
        let fm = f(pj)?;
        if fm.abs() <= tol || m <= a || m >= b {
            return Ok(pj);
        }
        if fm < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(libm::exp(0.5 * (a + b)))
}

/// Highest target rate worth searching: zero jamming, LOS, both main lobes.
pub fn rate_ceiling(cfg: &SystemConfig) -> Result<f64> {
    let l_los = path_loss(cfg.d_ab, LinkState::Los, &cfg.blockage)?;
    let snr = cfg.pa * cfg.alice_first.main_gain * cfg.bob.main_gain * l_los / cfg.sigma2_b;
    Ok(libm::log1p(snr) / core::f64::consts::LN_2)
}

/// Maximizes `R_b (1 - P_out(R_b))` over `R_b ∈ (0, R_cap]` at the jamming
/// budget `cfg.pj_max`; returns `(R_b*, outage, rate)`.
///
/// A coarse grid locates the best cell, then golden-section search refines
/// it within its two neighbouring cells.
pub fn maximize_effective_rate(cfg: &SystemConfig) -> Result<(f64, f64, f64)> {
    let r_cap = rate_ceiling(cfg)?;
    let objective = |rb: f64| -> Result<f64> { Ok(rb * (1.0 - outage_probability(cfg, rb)?)) };

    let steps = libm::ceil(r_cap / RATE_GRID_STEP).max(1.0) as usize;
    let h = r_cap / steps as f64;
    let (mut best_i, mut best) = (1, f64::NEG_INFINITY);
    for i in 1..=steps {
        let v = objective(i as f64 * h)?;
        if v > best {
            best = v;
            best_i = i;
        }
    }
    // R_b = 0 is outside the outage domain; start just above it.
    let mut a = ((best_i as f64 - 1.0) * h).max(h * 1e-6);
    let mut b = ((best_i + 1) as f64 * h).min(r_cap);

    let inv_phi = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = objective(c)?;
    let mut fd = objective(d)?;
    while b - a > RATE_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d)?;
        }
    }
    let (mut rb, rate) = if fc >= fd { (c, fc) } else { (d, fd) };
    // Never return something worse than the grid point that seeded the search.
    if best > rate {
        rb = best_i as f64 * h;
    }
    let outage = outage_probability(cfg, rb)?;
    Ok((rb, outage, rb * (1.0 - outage)))
}

/// Full covert design: `P_{J,opt}^max` from the covertness constraint, then
/// the rate-maximizing target rate at that budget.
pub fn max_covert_rate(cfg: &SystemConfig, epsilon: f64) -> Result<CovertDesign> {
    let pj_opt = solve_pj_opt(cfg, epsilon)?;
    let at_opt = cfg.with_pj_max(pj_opt);
    let (r_b_opt, outage_opt, rate_opt) = maximize_effective_rate(&at_opt)?;
    Ok(CovertDesign { epsilon, pj_opt, r_b_opt, outage_opt, rate_opt })
}
