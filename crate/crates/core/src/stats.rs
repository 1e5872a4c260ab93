//! Empirical-distribution statistics and hypothesis-testing machinery.
//!
//! The centerpiece is the one-sample Kolmogorov-Smirnov test of a sample of
//! path-functional values against a reference CDF, with asymptotic p-values
//! from the Kolmogorov limit distribution. Bonferroni and Benjamini-Hochberg
//! corrections control multiplicity across p0 bins. Binned KL divergence is
//! a secondary descriptive diagnostic only.

use serde::Serialize;

use crate::error::{Error, Result};

/// A collection of scalar path-functional values (one per path/game) within
/// one homogeneous bin. Values are kept sorted after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    values: Vec<f64>,
    label: String,
}

impl PathSample {
    pub fn new(mut values: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        for &v in &values {
            if !(v.is_finite() && (0.0..=1.0).contains(&v)) {
                return Err(Error::InvalidSample(format!("value {v} outside [0, 1]")));
            }
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(PathSample {
            values,
            label: label.into(),
        })
    }

    /// Sorted values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.n() as f64
    }
}

/// One Kolmogorov-Smirnov test outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestResult {
    pub d_n: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Fraction of sample values `<= x`.
pub fn ecdf_eval(sample: &PathSample, x: f64) -> f64 {
    let k = sample.values().partition_point(|&v| v <= x);
    k as f64 / sample.n() as f64
}

/// Exact sup-distance between the sample ECDF and a reference CDF.
///
/// Computed at every sorted point `x_(i)` as the larger of the two one-sided
/// gaps `|i/n - F0(x_(i))|` and `|(i-1)/n - F0(x_(i))|`, which together cover
/// both sides of each ECDF jump; ties fall out of the same formula.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &PathSample, f0: F) -> f64 {
    let n = sample.n() as f64;
    let mut d = 0.0_f64;
    for (i, &x) in sample.values().iter().enumerate() {
        let fx = f0(x);
        let hi = ((i + 1) as f64 / n - fx).abs();
        let lo = (i as f64 / n - fx).abs();
        d = d.max(hi).max(lo);
    }
    d
}

/// Sup-distance restricted to a window `[lo, hi]`.
///
/// Used where a law has an atom or a lattice outside the window (e.g. the
/// unconditional maximum's atom at 1): gaps are evaluated at each sample
/// point inside the window and at the window's endpoints.
pub fn ks_statistic_on_interval<F: Fn(f64) -> f64>(
    sample: &PathSample,
    f0: F,
    lo: f64,
    hi: f64,
) -> f64 {
    let n = sample.n() as f64;
    let mut d = 0.0_f64;
    for (i, &x) in sample.values().iter().enumerate() {
        if x < lo || x > hi {
            continue;
        }
        let fx = f0(x);
        d = d.max(((i + 1) as f64 / n - fx).abs());
        d = d.max((i as f64 / n - fx).abs());
    }
    // ECDF level entering the window and leaving it.
    d = d.max((ecdf_eval(sample, lo) - f0(lo)).abs());
    d = d.max((ecdf_eval(sample, hi) - f0(hi)).abs());
    d
}

/// Below this point the Kolmogorov survival function is 1 to well past 1e-12
/// (the theta-inversion tail at 0.2 is ~4e-14), so the series is skipped.
const KOLMOGOROV_SF_SHORT_CIRCUIT: f64 = 0.2;

/// Survival function of the Kolmogorov distribution:
/// `Q(lambda) = 2 * sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2)`.
///
/// The alternating series is truncated once a term's magnitude drops below
/// 1e-12; `Q(0) = 1` by convention and the result is clamped to [0, 1].
pub fn kolmogorov_sf(lambda: f64) -> Result<f64> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::ArgumentOutOfRange {
            name: "lambda",
            value: lambda,
            range: "[0, inf)",
        });
    }
    if lambda < KOLMOGOROV_SF_SHORT_CIRCUIT {
        return Ok(1.0);
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=1000u32 {
        let term = (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        if term < 1e-12 {
            break;
        }
        sum += sign * term;
        sign = -sign;
    }
    Ok((2.0 * sum).clamp(0.0, 1.0))
}

/// Asymptotic K-S p-value: `Q(sqrt(n) * d_n)`.
pub fn ks_pvalue(n: usize, d_n: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::ArgumentOutOfRange {
            name: "n",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    if !(d_n.is_finite() && (0.0..=1.0).contains(&d_n)) {
        return Err(Error::ArgumentOutOfRange {
            name: "d_n",
            value: d_n,
            range: "[0, 1]",
        });
    }
    kolmogorov_sf((n as f64).sqrt() * d_n)
}

/// Convenience: statistic plus asymptotic p-value in one pass.
pub fn ks_test<F: Fn(f64) -> f64>(sample: &PathSample, f0: F) -> TestResult {
    let d_n = ks_statistic(sample, f0);
    let p_value = ks_pvalue(sample.n(), d_n).expect("d_n in [0,1] by construction");
    TestResult {
        d_n,
        p_value,
        n: sample.n(),
    }
}

/// Floor applied to theoretical cell masses so empty-but-occupied cells give
/// a large finite KL contribution instead of infinity.
const KL_MASS_FLOOR: f64 = 1e-12;

/// Binned Kullback-Leibler divergence of the sample against a reference CDF.
///
/// Partitions [0, 1] into `n_bins` equal-width cells, compares empirical cell
/// frequencies `q_b` against theoretical masses `m_b = F0(right) - F0(left)`,
/// and returns `sum q_b ln(q_b / m_b)` over occupied cells with `m_b` floored
/// at 1e-12. Descriptive diagnostic only; the estimator is not tuned.
pub fn kl_divergence_binned<F: Fn(f64) -> f64>(
    sample: &PathSample,
    f0: F,
    n_bins: usize,
) -> Result<f64> {
    if n_bins < 2 {
        return Err(Error::ArgumentOutOfRange {
            name: "n_bins",
            value: n_bins as f64,
            range: "[2, inf)",
        });
    }
    let nb = n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    for &v in sample.values() {
        let cell = ((v * nb) as usize).min(n_bins - 1);
        counts[cell] += 1;
    }
    let n = sample.n() as f64;
    let mut kl = 0.0;
    for (b, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let q = c as f64 / n;
        let left = b as f64 / nb;
        let right = if b + 1 == n_bins {
            1.0
        } else {
            (b + 1) as f64 / nb
        };
        let m = (f0(right) - f0(left)).max(KL_MASS_FLOOR);
        kl += q * (q / m).ln();
    }
    Ok(kl.max(0.0))
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::ArgumentOutOfRange {
            name: "alpha",
            value: alpha,
            range: "(0, 1)",
        })
    }
}

/// Bonferroni correction: flag `i` iff `p_i < alpha / m` with `m` the number
/// of tests.
pub fn bonferroni_reject(p_values: &[f64], alpha: f64) -> Result<Vec<bool>> {
    check_alpha(alpha)?;
    if p_values.is_empty() {
        return Err(Error::EmptySample);
    }
    let cut = alpha / p_values.len() as f64;
    Ok(p_values.iter().map(|&p| p < cut).collect())
}

/// Benjamini-Hochberg step-up FDR procedure.
///
/// Sorts the p-values, finds the largest `k` with `p_(k) <= k * alpha / m`,
/// and rejects every hypothesis with `p <= p_(k)`; rejects none if no such
/// `k` exists.
pub fn bh_fdr_reject(p_values: &[f64], alpha: f64) -> Result<Vec<bool>> {
    check_alpha(alpha)?;
    if p_values.is_empty() {
        return Err(Error::EmptySample);
    }
    let m = p_values.len();
    let mut sorted: Vec<f64> = p_values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut threshold = None;
    for k in (1..=m).rev() {
        if sorted[k - 1] <= k as f64 * alpha / m as f64 {
            threshold = Some(sorted[k - 1]);
            break;
        }
    }
    Ok(match threshold {
        Some(t) => p_values.iter().map(|&p| p <= t).collect(),
        None => vec![false; m],
    })
}
