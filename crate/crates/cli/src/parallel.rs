//! Rayon executor for the Monte Carlo oracle.

use mmcovert_core::oracle::mc::{block_count, run_block, Accumulator};
use mmcovert_core::oracle::{McEstimate, McMetric};
use mmcovert_core::{Error, Result, SystemConfig};
use rayon::prelude::*;

/// Same estimate as [`mmcovert_core::oracle::mc::estimate`], bit for bit,
/// with blocks spread over the rayon pool.
pub fn par_estimate(cfg: &SystemConfig, metric: McMetric, n: u64, seed: u64) -> Result<McEstimate> {
    metric.check(cfg)?;
    if n == 0 {
        return Err(Error::Domain { what: "sample count", value: 0.0 });
    }
    let blocks: Vec<Accumulator> =
        (0..block_count(n)).into_par_iter().map(|i| run_block(cfg, metric, n, seed, i)).collect();
    let mut total = Accumulator::default();
    for b in &blocks {
        total.merge(b);
    }
    Ok(total.estimate(seed))
}
