//! Gaussian-bridge path generator.
//!
//! Draw a standard Brownian path `W` on [0, 1] at times `t_k = k/N` and set
//! `p_k = Phi((W_{t_k} - c) / sqrt(1 - t_k))` with `c = -Phi^{-1}(p0)`, and
//! `p_N = 1{W_1 >= c}`. Then `p_k` is exactly the conditional probability of
//! the terminal event given the path so far, so the generated series is an
//! exact discrete sampling of a continuous-path probability martingale - a
//! true oracle rather than an approximation of unknown quality.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::normal::{phi, phi_inv};
use crate::error::{Error, Result};
use crate::laws::Prior;
use crate::paths::{Outcome, WinProbSeries};

/// Simulate one bridge path with `steps >= 2` increments.
///
/// The returned series has `steps + 1` elements; the first is exactly `p0`
/// and the last is the 0/1 terminal indicator.
pub fn gaussian_bridge_path(p0: Prior, steps: usize, seed: u64) -> Result<WinProbSeries> {
    if steps < 2 {
        return Err(Error::InvalidConfig(format!(
            "gaussian bridge needs steps >= 2, got {steps}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(bridge_with_rng(p0, steps, &mut rng))
}

pub(crate) fn bridge_with_rng(p0: Prior, steps: usize, rng: &mut impl Rng) -> WinProbSeries {
    let n = steps;
    let crossing = -phi_inv(p0.value());
    let sqrt_dt = (1.0 / n as f64).sqrt();

    let mut series = Vec::with_capacity(n + 1);
    series.push(p0.value());
    let mut w = 0.0;
    for k in 1..n {
        let z: f64 = rng.sample(StandardNormal);
        w += sqrt_dt * z;
        let t = k as f64 / n as f64;
        // The last interior step uses t = (N-1)/N, so 1 - t stays positive.
        let p = phi((w - crossing) / (1.0 - t).sqrt());
        series.push(p.clamp(0.0, 1.0));
    }
    let z: f64 = rng.sample(StandardNormal);
    w += sqrt_dt * z;
    let a_wins = w >= crossing;
    series.push(if a_wins { 1.0 } else { 0.0 });

    let outcome = if a_wins { Outcome::AWins } else { Outcome::BWins };
    WinProbSeries::new("", series, outcome).expect("bridge series is valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths;

    #[test]
    fn starts_exactly_at_p0_and_ends_binary() {
        let p0 = Prior::new(0.62).unwrap();
        let path = gaussian_bridge_path(p0, 50, 7).unwrap();
        assert_eq!(path.series().len(), 51);
        assert_eq!(path.p0(), 0.62);
        let last = *path.series().last().unwrap();
        assert!(last == 0.0 || last == 1.0);
        match path.outcome() {
            Outcome::AWins => assert_eq!(last, 1.0),
            Outcome::BWins => assert_eq!(last, 0.0),
        }
    }

    #[test]
    fn deterministic_in_the_seed() {
        let p0 = Prior::new(0.5).unwrap();
        let a = gaussian_bridge_path(p0, 100, 42).unwrap();
        let b = gaussian_bridge_path(p0, 100, 42).unwrap();
        assert_eq!(a.series(), b.series());
        let c = gaussian_bridge_path(p0, 100, 43).unwrap();
        assert_ne!(a.series(), c.series());
    }

    #[test]
    fn terminal_mean_matches_p0() {
        // E[p_N] = p0; 3-sigma binomial band around the mean indicator.
        let p0 = Prior::new(0.7).unwrap();
        let n_paths = 20_000;
        let mut wins = 0usize;
        for i in 0..n_paths {
            let path = gaussian_bridge_path(p0, 30, super::super::path_seed(11, i)).unwrap();
            if path.outcome() == Outcome::AWins {
                wins += 1;
            }
        }
        let freq = wins as f64 / n_paths as f64;
        let band = 3.0 * (0.7 * 0.3 / n_paths as f64).sqrt();
        assert!((freq - 0.7).abs() < band, "freq {freq} outside {band}");
    }

    #[test]
    fn path_max_at_least_endpoints() {
        let p0 = Prior::new(0.45).unwrap();
        for seed in 0..20 {
            let path = gaussian_bridge_path(p0, 40, seed).unwrap();
            let m = paths::path_max(path.series()).unwrap();
            assert!(m >= path.p0());
            assert!(m >= *path.series().last().unwrap());
        }
    }

    #[test]
    fn rejects_tiny_step_counts() {
        assert!(gaussian_bridge_path(Prior::new(0.5).unwrap(), 1, 0).is_err());
    }
}
