//! One-dimensional parameter sweeps.

use std::fmt;
use std::str::FromStr;

use mmcovert_core::channel::{db_to_linear, linear_to_db};
use mmcovert_core::{
    effective_rate, ergodic_capacity, expected_detection_error, max_covert_rate, outage_probability, solve_pj_opt,
    Result, SystemConfig,
};
use rayon::prelude::*;

use crate::output::Table;

/// The swept quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    /// `P_J^max`, dBm.
    PjMaxDbm,
    /// Target rate, bits per channel use.
    Rb,
    /// Alice's power, dBm.
    PaDbm,
    /// Covertness slack.
    Epsilon,
    /// Alice-Willie distance, m.
    DAw,
    /// Alice-Bob distance, m.
    DAb,
}

impl SweepVar {
    /// Every variable, in CLI order.
    pub const ALL: [SweepVar; 6] =
        [SweepVar::PjMaxDbm, SweepVar::Rb, SweepVar::PaDbm, SweepVar::Epsilon, SweepVar::DAw, SweepVar::DAb];

    /// CLI name.
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::PjMaxDbm => "pj_max_dbm",
            SweepVar::Rb => "rb",
            SweepVar::PaDbm => "pa_dbm",
            SweepVar::Epsilon => "epsilon",
            SweepVar::DAw => "d_aw",
            SweepVar::DAb => "d_ab",
        }
    }

    /// CSV column name, with unit.
    pub fn column(self) -> &'static str {
        match self {
            SweepVar::PjMaxDbm => "pj_max_dbm",
            SweepVar::Rb => "rb_bits_per_use",
            SweepVar::PaDbm => "pa_dbm",
            SweepVar::Epsilon => "epsilon",
            SweepVar::DAw => "d_aw_m",
            SweepVar::DAb => "d_ab_m",
        }
    }
}

impl FromStr for SweepVar {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL.into_iter().find(|v| v.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|v| v.name()).collect();
            format!("unknown sweep variable `{s}`, expected one of {}", names.join(", "))
        })
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A metric evaluated at every sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMetric {
    /// `E[P*_{e,w}]`.
    Detect,
    /// Outage at the target rate.
    Outage,
    /// Effective covert rate at the target rate.
    EffectiveRate,
    /// Ergodic capacity.
    Capacity,
    /// Full covert design: `P_J,opt`, optimal target rate, its outage and rate.
    Design,
}

impl SweepMetric {
    /// Every metric, in CLI order.
    pub const ALL: [SweepMetric; 5] = [
        SweepMetric::Detect,
        SweepMetric::Outage,
        SweepMetric::EffectiveRate,
        SweepMetric::Capacity,
        SweepMetric::Design,
    ];

    /// CLI name.
    pub fn name(self) -> &'static str {
        match self {
            SweepMetric::Detect => "detect",
            SweepMetric::Outage => "outage",
            SweepMetric::EffectiveRate => "effective_rate",
            SweepMetric::Capacity => "capacity",
            SweepMetric::Design => "design",
        }
    }

    fn columns(self) -> &'static [&'static str] {
        match self {
            SweepMetric::Detect => &["detection_error"],
            SweepMetric::Outage => &["outage"],
            SweepMetric::EffectiveRate => &["effective_rate_bits_per_use"],
            SweepMetric::Capacity => &["capacity_bits_per_use"],
            SweepMetric::Design => &["design_pj_opt_dbm", "design_rb_opt_bits_per_use", "design_outage", "design_rate_bits_per_use"],
        }
    }
}

impl FromStr for SweepMetric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|m| m.name()).collect();
            format!("unknown metric `{s}`, expected one of {}", names.join(", "))
        })
    }
}

/// A sweep request.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Swept quantity.
    pub variable: SweepVar,
    /// First grid value.
    pub start: f64,
    /// Last grid value.
    pub stop: f64,
    /// Number of grid points, at least 2.
    pub steps: usize,
    /// Requested metrics, in column order.
    pub metrics: Vec<SweepMetric>,
    /// Target rate for `outage` and `effective_rate` when `rb` is not swept.
    pub rb: f64,
    /// Covertness slack for `design` and covert operation.
    pub epsilon: f64,
    /// Evaluate at `P_J,opt(ε)` of each point instead of the configured `P_J^max`.
    pub covert: bool,
}

impl SweepSpec {
    /// Checks the grid and its interaction with the other settings.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.steps < 2 {
            return Err(format!("--steps must be at least 2, got {}", self.steps));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(format!("need finite --start < --stop, got {} and {}", self.start, self.stop));
        }
        if self.metrics.is_empty() {
            return Err("at least one metric is required".into());
        }
        let positive = matches!(self.variable, SweepVar::Rb | SweepVar::DAw | SweepVar::DAb);
        if positive && self.start <= 0.0 {
            return Err(format!("{} must stay positive, got --start {}", self.variable, self.start));
        }
        if self.variable == SweepVar::Epsilon && !(self.start > 0.0 && self.stop < 1.0) {
            return Err(format!("epsilon must stay inside (0, 1), got [{}, {}]", self.start, self.stop));
        }
        if self.variable != SweepVar::Epsilon && !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(format!("--epsilon must be inside (0, 1), got {}", self.epsilon));
        }
        if self.variable != SweepVar::Rb && !(self.rb > 0.0 && self.rb.is_finite()) {
            return Err(format!("--rb must be positive, got {}", self.rb));
        }
        if self.covert && self.variable == SweepVar::PjMaxDbm {
            return Err("--covert fixes P_J^max, so it cannot be combined with a pj_max_dbm sweep".into());
        }
        Ok(())
    }

    /// Grid values, evenly spaced and including both ends.
    pub fn grid(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.stop } else { self.start + (self.stop - self.start) * i as f64 / last })
            .collect()
    }

    /// Column names of the output table.
    pub fn header(&self) -> Vec<&'static str> {
        let mut h = vec![self.variable.column()];
        if self.covert {
            h.push("pj_opt_dbm");
        }
        h.extend(self.metrics.iter().flat_map(|m| m.columns().iter().copied()));
        h
    }
}

struct Point {
    cfg: SystemConfig,
    rb: f64,
    epsilon: f64,
}

fn point(cfg: &SystemConfig, spec: &SweepSpec, x: f64) -> Point {
    let mut p = Point { cfg: *cfg, rb: spec.rb, epsilon: spec.epsilon };
    match spec.variable {
        SweepVar::PjMaxDbm => p.cfg.pj_max = db_to_linear(x),
        SweepVar::Rb => p.rb = x,
        SweepVar::PaDbm => p.cfg.pa = db_to_linear(x),
        SweepVar::Epsilon => p.epsilon = x,
        SweepVar::DAw => p.cfg.d_aw = x,
        SweepVar::DAb => p.cfg.d_ab = x,
    }
    p
}

fn evaluate(cfg: &SystemConfig, spec: &SweepSpec, shared_pj: Option<f64>, x: f64) -> Result<Vec<f64>> {
    let mut p = point(cfg, spec, x);
    let mut row = vec![x];
    if spec.covert {
        p.cfg.pj_max = match shared_pj {
            Some(pj) => pj,
            None => solve_pj_opt(&p.cfg, p.epsilon)?,
        };
        row.push(linear_to_db(p.cfg.pj_max));
    }
    for m in &spec.metrics {
        match m {
            SweepMetric::Detect => row.push(expected_detection_error(&p.cfg)?),
            SweepMetric::Outage => row.push(outage_probability(&p.cfg, p.rb)?),
            SweepMetric::EffectiveRate => row.push(effective_rate(&p.cfg, p.rb)?),
            SweepMetric::Capacity => row.push(ergodic_capacity(&p.cfg)?),
            SweepMetric::Design => {
                let d = max_covert_rate(&p.cfg, p.epsilon)?;
                row.extend([linear_to_db(d.pj_opt), d.r_b_opt, d.outage_opt, d.rate_opt]);
            }
        }
    }
    Ok(row)
}

/// Evaluates the sweep on the rayon pool and tabulates it in grid order.
/// Rows stop at the first failing point, which is recorded in
/// [`Table::error`].
pub fn run_sweep(cfg: &SystemConfig, spec: &SweepSpec) -> Table {
    let mut table = Table::new(spec.header());
    // The detection side does not see the target rate or Bob's distance.
    let mut shared_pj = None;
    if spec.covert && matches!(spec.variable, SweepVar::Rb | SweepVar::DAb) {
        match solve_pj_opt(cfg, spec.epsilon) {
            Ok(pj) => shared_pj = Some(pj),
            Err(e) => {
                table.error = Some(format!("P_J,opt: {e}"));
                return table;
            }
        }
    }
    let grid = spec.grid();
    let results: Vec<Result<Vec<f64>>> = grid.par_iter().map(|&x| evaluate(cfg, spec, shared_pj, x)).collect();
    for (x, r) in grid.iter().zip(results) {
        match r {
            Ok(row) => table.push_numbers(&row),
            Err(e) => {
                table.error = Some(format!("{} = {x}: {e}", spec.variable));
                break;
            }
        }
    }
    table
}
