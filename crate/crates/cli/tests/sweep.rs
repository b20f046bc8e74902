use mmcovert::sweep::{run_sweep, SweepMetric, SweepSpec, SweepVar};
use mmcovert_core::SystemConfig;

fn spec(variable: SweepVar, start: f64, stop: f64, steps: usize, metrics: &[SweepMetric]) -> SweepSpec {
    SweepSpec { variable, start, stop, steps, metrics: metrics.to_vec(), rb: 1.0, epsilon: 0.05, covert: false }
}

fn column(table: &mmcovert::Table, i: usize) -> Vec<f64> {
    table.rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn grid_hits_both_ends() {
    let s = spec(SweepVar::Rb, 0.1, 10.0, 100, &[SweepMetric::Outage]);
    let g = s.grid();
    assert_eq!(g.len(), 100);
    assert_eq!((g[0], g[99]), (0.1, 10.0));
    assert!(g.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn spec_validation() {
    let ok = spec(SweepVar::PjMaxDbm, -10.0, 40.0, 2, &[SweepMetric::Detect]);
    assert!(ok.validate().is_ok());
    assert!(SweepSpec { steps: 1, ..ok.clone() }.validate().is_err());
    assert!(SweepSpec { start: 40.0, stop: -10.0, ..ok.clone() }.validate().is_err());
    assert!(SweepSpec { metrics: vec![], ..ok.clone() }.validate().is_err());
    assert!(SweepSpec { covert: true, ..ok.clone() }.validate().is_err());
    assert!(spec(SweepVar::Epsilon, 0.0, 0.5, 3, &[SweepMetric::Design]).validate().is_err());
    assert!(spec(SweepVar::DAw, -1.0, 5.0, 3, &[SweepMetric::Detect]).validate().is_err());
    assert_eq!("d_aw".parse::<SweepVar>(), Ok(SweepVar::DAw));
    assert!("effective_rate".parse::<SweepMetric>().is_ok());
    assert!("rate".parse::<SweepMetric>().is_err());
}

#[test]
fn header_lists_units() {
    let mut s = spec(SweepVar::Rb, 0.1, 10.0, 3, &[SweepMetric::Outage, SweepMetric::EffectiveRate, SweepMetric::Design]);
    s.covert = true;
    assert_eq!(
        s.header(),
        [
            "rb_bits_per_use",
            "pj_opt_dbm",
            "outage",
            "effective_rate_bits_per_use",
            "design_pj_opt_dbm",
            "design_rb_opt_bits_per_use",
            "design_outage",
            "design_rate_bits_per_use"
        ]
    );
}

#[test]
fn detection_curve_rises_with_budget() {
    let t = run_sweep(&SystemConfig::benchmark(), &spec(SweepVar::PjMaxDbm, -10.0, 40.0, 51, &[SweepMetric::Detect]));
    assert!(t.error.is_none());
    let e = column(&t, 1);
    assert_eq!(e.len(), 51);
    assert!(e.windows(2).all(|w| w[1] >= w[0]), "{e:?}");
    assert!(e[0] < 0.01 && e[50] > 0.999);
}

#[test]
fn covert_rate_sweep_reproduces_benchmark_table() {
    let mut s = spec(SweepVar::Rb, 0.1, 10.0, 100, &[SweepMetric::Outage, SweepMetric::EffectiveRate]);
    s.covert = true;
    let t = run_sweep(&SystemConfig::benchmark(), &s);
    assert!(t.error.is_none());
    let (rb, pj, outage, rate) = (column(&t, 0), column(&t, 1), column(&t, 2), column(&t, 3));
    assert!(pj.iter().all(|&p| (p - 15.52).abs() <= 0.1));
    let table = [
        (0.1, 0.00314, 0.0997, 0.02),
        (0.5, 0.0425, 0.4787, 0.02),
        (1.0, 0.0935, 0.9065, 0.02),
        (2.5, 0.1210, 2.1975, 0.02),
        (5.0, 0.1308, 4.3459, 0.02),
        (10.0, 0.9913, 0.0866, 0.05),
    ];
    for (x, want_out, want_rate, tol) in table {
        let i = rb.iter().position(|&r| (r - x).abs() < 1e-9).unwrap();
        assert!(((outage[i] - want_out) / want_out).abs() <= tol, "R_b {x}: {}", outage[i]);
        assert!(((rate[i] - want_rate) / want_rate).abs() <= tol, "R_b {x}: {}", rate[i]);
    }
}

#[test]
fn design_sweep_over_slack() {
    let t = run_sweep(&SystemConfig::benchmark(), &spec(SweepVar::Epsilon, 0.01, 0.2, 4, &[SweepMetric::Design]));
    assert!(t.error.is_none());
    // More slack permits less jamming and a higher covert rate.
    let pj = column(&t, 1);
    let rate = column(&t, 4);
    assert!(pj.windows(2).all(|w| w[1] < w[0]));
    assert!(rate.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn sweep_is_deterministic() {
    let s = spec(SweepVar::DAw, 5.0, 100.0, 7, &[SweepMetric::Detect, SweepMetric::Capacity]);
    let cfg = SystemConfig::benchmark();
    assert_eq!(run_sweep(&cfg, &s).render(), run_sweep(&cfg, &s).render());
}
