use mmcovert::par_estimate;
use mmcovert_core::oracle::mc::estimate;
use mmcovert_core::oracle::{McMetric, BLOCK_SIZE};
use mmcovert_core::SystemConfig;

fn same(a: mmcovert_core::McEstimate, b: mmcovert_core::McEstimate) -> bool {
    a.mean.to_bits() == b.mean.to_bits() && a.stderr.to_bits() == b.stderr.to_bits() && a.n_samples == b.n_samples
}

#[test]
fn parallel_matches_sequential_bit_for_bit() {
    let cfg = SystemConfig::benchmark();
    let metrics = [McMetric::Detection, McMetric::Outage { rate: 2.0 }, McMetric::Capacity];
    let sizes = [1, 1000, BLOCK_SIZE, 3 * BLOCK_SIZE + 17];
    for threads in [1, 3, 8] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        for metric in metrics {
            for n in sizes {
                let seq = estimate(&cfg, metric, n, 42).unwrap();
                let par = pool.install(|| par_estimate(&cfg, metric, n, 42).unwrap());
                assert!(same(seq, par), "{threads} threads, {metric:?}, n {n}: {seq:?} vs {par:?}");
            }
        }
    }
}

#[test]
fn seeds_give_distinct_streams() {
    let cfg = SystemConfig::benchmark();
    let a = par_estimate(&cfg, McMetric::Capacity, 10_000, 1).unwrap();
    let b = par_estimate(&cfg, McMetric::Capacity, 10_000, 2).unwrap();
    assert_ne!(a.mean, b.mean);
    assert!(par_estimate(&cfg, McMetric::Capacity, 0, 1).is_err());
}
