//! Independent references for every closed form.
//!
//! Two tiers: [`reference`] integrates the expressions the closed forms are
//! derived from, under the same Alzer CDF approximation, so any disagreement
//! is an algebra or transcription error; [`mc`] samples the physical model
//! with exact gamma fading, so its disagreement measures the approximation.

pub mod mc;
pub mod reference;

pub use mc::{
    mc_ergodic_capacity, mc_expected_detection_error, mc_outage, run_block, Accumulator, McEstimate, McMetric,
    BLOCK_SIZE,
};
pub use reference::{alzer_ref_detection, alzer_ref_outage, quadrature_ref_capacity};

use alloc::vec::Vec;

use crate::channel::{db_to_linear, linear_to_db, SystemConfig};
use crate::sampling::{substream, uniform};

/// `count` variations of `base` for self-consistency checks: shapes drawn
/// from `{1, 2, 3}`, every lobe gain and `P_a` moved by up to ±10 dB, and
/// `P_J^max` placed within ±20 dB of `P_a`.
pub fn perturbed_configs(base: &SystemConfig, count: usize, seed: u64) -> Vec<SystemConfig> {
    let mut rng = substream(seed, 0);
    let mut spread = |width_db: f64| width_db * (2.0 * uniform(&mut rng) - 1.0);
    let shift = |x: f64, width_db: f64| db_to_linear(linear_to_db(x) + width_db);
    (0..count)
        .map(|_| {
            let mut c = *base;
            for p in [&mut c.alice_first, &mut c.alice_second, &mut c.bob] {
                p.main_gain = shift(p.main_gain, spread(10.0));
                p.side_gain = shift(p.side_gain, spread(10.0));
                if p.side_gain >= p.main_gain {
                    core::mem::swap(&mut p.side_gain, &mut p.main_gain);
                }
            }
            c.pa = shift(c.pa, spread(10.0));
            c.pj_max = shift(c.pa, spread(20.0));
            c.fading.nu_los = (2.0 + libm::round(spread(1.499))) as u32;
            c.fading.nu_nlos = (2.0 + libm::round(spread(1.499))) as u32;
            c
        })
        .collect()
}
