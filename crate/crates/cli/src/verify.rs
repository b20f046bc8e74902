//! Closed forms against the oracles.
//!
//! The tight tier compares each closed form with nested quadrature of the
//! expression it was derived from, on the given configuration and on ten
//! perturbations of it. The loose tier compares against Monte Carlo of the
//! exact fading model.

use std::fmt;
use std::str::FromStr;

use mmcovert_core::link::{ergodic_capacity_with, CapacityMethod};
use mmcovert_core::oracle::{
    alzer_ref_detection, alzer_ref_outage, perturbed_configs, quadrature_ref_capacity, McMetric,
};
use mmcovert_core::{ergodic_capacity, expected_detection_error, outage_probability, Result, SystemConfig};
use rayon::prelude::*;

use crate::output::{fmt_f64, Table};
use crate::parallel::par_estimate;

/// Detection: absolute gap to the quadrature reference.
pub const TIGHT_DETECTION_ABS: f64 = 1e-6;
/// Outage: absolute gap to the quadrature reference.
pub const TIGHT_OUTAGE_ABS: f64 = 1e-8;
/// Capacity: relative gap to the quadrature reference.
pub const TIGHT_CAPACITY_REL: f64 = 1e-6;
/// Shape-2 capacity closed form against quadrature, relative.
pub const TIGHT_SHAPE_TWO_REL: f64 = 1e-7;
/// Probabilities against Monte Carlo, absolute floor.
pub const LOOSE_PROBABILITY_ABS: f64 = 0.02;
/// Capacity against Monte Carlo, relative floor.
pub const LOOSE_CAPACITY_REL: f64 = 0.02;
/// Monte Carlo allowance in standard errors.
pub const LOOSE_SIGMAS: f64 = 3.0;

/// Requested tolerance of the quadrature references.
const REF_TOL: f64 = 1e-10;
/// Perturbed configurations in the tight tier.
const PERTURBED: usize = 10;

/// Target rates checked when none is given.
pub const DEFAULT_RATES: [f64; 3] = [0.5, 2.5, 5.0];

/// Verification tier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    /// Quadrature references, same approximation chain.
    Tight,
    /// Exact-model Monte Carlo.
    Loose,
}

impl FromStr for Tier {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "tight" => Ok(Tier::Tight),
            "loose" => Ok(Tier::Loose),
            _ => Err(format!("unknown tier `{s}`, expected tight or loose")),
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::Tight => "tight",
            Tier::Loose => "loose",
        })
    }
}

/// How the tolerance of a check is measured.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    /// `|closed - reference| <= tol`.
    Absolute(f64),
    /// `|closed - reference| <= tol |reference|`.
    Relative(f64),
}

/// One comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    /// Which configuration: `input` or `perturbed-k`.
    pub config: String,
    /// Metric, with its target rate where relevant.
    pub metric: String,
    /// Closed-form value.
    pub closed: f64,
    /// Oracle value.
    pub reference: f64,
    /// Monte Carlo standard error; zero in the tight tier.
    pub stderr: f64,
    /// Allowed gap, before widening by the standard error.
    pub bound: Bound,
}

impl Check {
    /// Allowed absolute gap.
    pub fn allowed(&self) -> f64 {
        let floor = match self.bound {
            Bound::Absolute(t) => t,
            Bound::Relative(t) => t * self.reference.abs(),
        };
        floor.max(LOOSE_SIGMAS * self.stderr)
    }

    /// Absolute gap.
    pub fn gap(&self) -> f64 {
        (self.closed - self.reference).abs()
    }

    /// Whether the gap is within tolerance.
    pub fn passed(&self) -> bool {
        self.gap() <= self.allowed()
    }
}

/// Outcome of a verification run.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// Tier that ran.
    pub tier: Tier,
    /// Every comparison, in a fixed order.
    pub checks: Vec<Check>,
}

impl Report {
    /// Whether every check passed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    /// Per-check table.
    pub fn table(&self) -> Table {
        let mut t =
            Table::new(["config", "metric", "closed", "reference", "abs_gap", "tolerance", "mc_stderr", "status"]);
        for c in &self.checks {
            let tol = match c.bound {
                Bound::Absolute(x) => format!("abs {x:e}"),
                Bound::Relative(x) => format!("rel {x:e}"),
            };
            t.rows.push(vec![
                c.config.clone(),
                c.metric.clone(),
                fmt_f64(c.closed),
                fmt_f64(c.reference),
                fmt_f64(c.gap()),
                tol,
                fmt_f64(c.stderr),
                if c.passed() { "pass" } else { "FAIL" }.to_string(),
            ]);
        }
        t
    }
}

/// Settings of a verification run.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Tier.
    pub tier: Tier,
    /// Target rates for the outage checks.
    pub rates: Vec<f64>,
    /// Monte Carlo samples per metric (loose tier).
    pub samples: u64,
    /// Seed of the Monte Carlo streams and of the perturbed configurations.
    pub seed: u64,
}

/// Runs every check of the tier.
pub fn run_verify(cfg: &SystemConfig, opts: &VerifyOptions) -> Result<Report> {
    let checks = match opts.tier {
        Tier::Tight => tight(cfg, opts)?,
        Tier::Loose => loose(cfg, opts)?,
    };
    Ok(Report { tier: opts.tier, checks })
}

fn tight(cfg: &SystemConfig, opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut configs = vec![("input".to_string(), *cfg)];
    configs.extend(
        perturbed_configs(cfg, PERTURBED, opts.seed).into_iter().enumerate().map(|(i, c)| (format!("perturbed-{i}"), c)),
    );
    let per_config: Vec<Result<Vec<Check>>> =
        configs.par_iter().map(|(name, c)| tight_one(name, c, &opts.rates)).collect();
    let mut checks = Vec::new();
    for r in per_config {
        checks.extend(r?);
    }
    Ok(checks)
}

fn tight_one(name: &str, cfg: &SystemConfig, rates: &[f64]) -> Result<Vec<Check>> {
    let check = |metric: String, closed, reference, bound| Check {
        config: name.to_string(),
        metric,
        closed,
        reference,
        stderr: 0.0,
        bound,
    };
    let mut out = Vec::new();
    if cfg.pj_max > 0.0 {
        out.push(check(
            "detection".into(),
            expected_detection_error(cfg)?,
            alzer_ref_detection(cfg, REF_TOL)?,
            Bound::Absolute(TIGHT_DETECTION_ABS),
        ));
    }
    for &rb in rates {
        out.push(check(
            format!("outage@{rb}"),
            outage_probability(cfg, rb)?,
            alzer_ref_outage(cfg, rb, REF_TOL)?,
            Bound::Absolute(TIGHT_OUTAGE_ABS),
        ));
    }
    out.push(check(
        "capacity".into(),
        ergodic_capacity(cfg)?,
        quadrature_ref_capacity(cfg, REF_TOL)?,
        Bound::Relative(TIGHT_CAPACITY_REL),
    ));
    let mut two = *cfg;
    two.fading.nu_los = 2;
    two.fading.nu_nlos = 2;
    out.push(check(
        "capacity_shape2".into(),
        ergodic_capacity_with(&two, CapacityMethod::Auto)?,
        ergodic_capacity_with(&two, CapacityMethod::Quadrature)?,
        Bound::Relative(TIGHT_SHAPE_TWO_REL),
    ));
    Ok(out)
}

fn loose(cfg: &SystemConfig, opts: &VerifyOptions) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut push = |metric: String, closed: f64, est: mmcovert_core::McEstimate, bound| {
        out.push(Check { config: "input".into(), metric, closed, reference: est.mean, stderr: est.stderr, bound });
    };
    if cfg.pj_max > 0.0 {
        push(
            "detection".into(),
            expected_detection_error(cfg)?,
            par_estimate(cfg, McMetric::Detection, opts.samples, opts.seed)?,
            Bound::Absolute(LOOSE_PROBABILITY_ABS),
        );
    }
    for &rb in &opts.rates {
        push(
            format!("outage@{rb}"),
            outage_probability(cfg, rb)?,
            par_estimate(cfg, McMetric::Outage { rate: rb }, opts.samples, opts.seed)?,
            Bound::Absolute(LOOSE_PROBABILITY_ABS),
        );
    }
    push(
        "capacity".into(),
        ergodic_capacity(cfg)?,
        par_estimate(cfg, McMetric::Capacity, opts.samples, opts.seed)?,
        Bound::Relative(LOOSE_CAPACITY_REL),
    );
    Ok(out)
}
