//! Flag parsing and small output helpers.

use crate::{CliError, FormatArg};
use peaklaw::simulate::GridStep;
use sha2::{Digest, Sha256};
use std::path::Path;

/// Parse a probability given as a decimal or an exact fraction like "2/3".
pub fn parse_prob(s: &str) -> Result<f64, CliError> {
    let v = if let Some((num, den)) = s.split_once('/') {
        let n: f64 = num
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad fraction numerator in '{s}'")))?;
        let d: f64 = den
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad fraction denominator in '{s}'")))?;
        if d == 0.0 {
            return Err(CliError::Usage(format!("zero denominator in '{s}'")));
        }
        n / d
    } else {
        s.trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("'{s}' is not a number or fraction")))?
    };
    Ok(v)
}

pub fn parse_prob_list(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(|part| parse_prob(part)).collect()
}

/// A lattice spacing must be 1/K; accept "1/K" directly or a decimal that
/// rounds to one.
pub fn parse_grid_step(s: &str) -> Result<GridStep, CliError> {
    let h = parse_prob(s)?;
    if !(h.is_finite() && h > 0.0 && h < 1.0) {
        return Err(CliError::Usage(format!("grid step {s} outside (0, 1)")));
    }
    let k = (1.0 / h).round();
    if ((1.0 / h) - k).abs() > 1e-9 {
        return Err(CliError::Usage(format!(
            "grid step {s} is not 1/K for an integer K"
        )));
    }
    GridStep::new(k as u32).map_err(crate::core_error)
}

pub fn separator(format: FormatArg) -> char {
    match format {
        FormatArg::Csv => ',',
        FormatArg::Tsv => '\t',
    }
}

pub fn sha256_hex(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Evaluate the sup-distance between a sample's ECDF and a reference CDF at
/// a fixed set of evaluation points (used for lattice-valued samples, whose
/// law matches the closed form exactly at lattice levels).
pub fn sup_at_points<F: Fn(f64) -> f64>(
    sample: &peaklaw::PathSample,
    f0: F,
    points: impl Iterator<Item = f64>,
) -> f64 {
    let mut d = 0.0_f64;
    for x in points {
        d = d.max((peaklaw::stats::ecdf_eval(sample, x) - f0(x)).abs());
    }
    d
}
