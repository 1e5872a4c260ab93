//! Helpers shared across integration test targets.

use peaklaw::stats::PathSample;

/// O(n^2) Kolmogorov-Smirnov oracle: at every point, count "<= x" and "< x"
/// over the whole sample and take both one-sided gaps. Kept deliberately
/// independent of the production implementation.
pub fn brute_force_ks<F: Fn(f64) -> f64>(sample: &PathSample, f0: F) -> f64 {
    let values = sample.values();
    let n = values.len() as f64;
    let mut d = 0.0_f64;
    for &x in values {
        let le = values.iter().filter(|&&v| v <= x).count() as f64;
        let lt = values.iter().filter(|&&v| v < x).count() as f64;
        let fx = f0(x);
        d = d.max((le / n - fx).abs());
        d = d.max((lt / n - fx).abs());
    }
    d
}
