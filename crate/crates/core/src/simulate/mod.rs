//! Exactly-martingale path generators and Monte Carlo machinery.
//!
//! These generators serve as the independent oracle for every closed form in
//! [`crate::laws`] and for the discrete-time correction terms: the Gaussian
//! bridge samples a continuous-path probability martingale exactly, and the
//! grid walks realize the discrete equality cases. They are oracles for the
//! theory, not models of any particular data source.
//!
//! Results are a pure function of the configuration: per-path RNG substreams
//! are derived deterministically from `(master_seed, path_index)`, so
//! parallel and serial runs produce identical samples.

mod bridge;
mod grid;
mod normal;

pub use bridge::gaussian_bridge_path;
pub use grid::{grid_walk_path, n_player_grid_walk, GridStep};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::laws::{Prior, PriorVector};
use crate::paths::{self, Outcome, WinProbSeries};
use crate::stats::PathSample;

/// Path generator choice with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    GaussianBridge {
        p0: Prior,
        steps: usize,
    },
    GridWalk {
        p0: Prior,
        grid: GridStep,
        max_steps: Option<usize>,
    },
    NPlayerGridWalk {
        priors: PriorVector,
        grid: GridStep,
        max_steps: Option<usize>,
    },
}

impl Generator {
    pub fn name(&self) -> &'static str {
        match self {
            Generator::GaussianBridge { .. } => "gaussian-bridge",
            Generator::GridWalk { .. } => "grid-walk",
            Generator::NPlayerGridWalk { .. } => "n-player-grid-walk",
        }
    }

    /// Starting probability for the two-player generators.
    fn two_player_p0(&self) -> Option<Prior> {
        match self {
            Generator::GaussianBridge { p0, .. } | Generator::GridWalk { p0, .. } => Some(*p0),
            Generator::NPlayerGridWalk { .. } => None,
        }
    }
}

/// A full Monte Carlo run description.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub generator: Generator,
    pub n_paths: usize,
    pub master_seed: u64,
}

/// Scalar reduction applied to each generated path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    /// Running maximum of the A-side path.
    Max,
    /// Peak of whichever side eventually lost.
    LoserPeak,
    /// Minimum of the winner's coordinate (n-player only).
    WinnerMin,
    /// Running maximum restricted to paths that ended in a loss.
    MaxGivenLoss,
}

impl Functional {
    pub fn name(&self) -> &'static str {
        match self {
            Functional::Max => "max",
            Functional::LoserPeak => "loser-peak",
            Functional::WinnerMin => "winner-min",
            Functional::MaxGivenLoss => "max-given-loss",
        }
    }
}

/// Outcome of [`monte_carlo_sample`]: the retained functional values plus
/// generation accounting.
#[derive(Debug, Clone)]
pub struct SampleRun {
    pub sample: PathSample,
    /// Paths attempted (equals the configured path count).
    pub generated: usize,
    /// Paths contributing a value (smaller for conditional functionals).
    pub retained: usize,
    /// Grid walks that failed to absorb within their step budget.
    pub discarded_unabsorbed: usize,
}

fn splitmix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Deterministic per-path seed: a SplitMix64 finalizer over the master seed
/// offset by the path index times the 64-bit golden ratio.
pub fn path_seed(master_seed: u64, path_index: u64) -> u64 {
    splitmix(
        splitmix(master_seed.wrapping_add(0x9E3779B97F4A7C15))
            .wrapping_add(path_index.wrapping_add(1).wrapping_mul(0x9E3779B97F4A7C15)),
    )
}

enum PathValue {
    Kept(f64),
    Filtered,
    Unabsorbed,
}

/// Generate `config.n_paths` paths and reduce each to the requested
/// functional. `MaxGivenLoss` keeps only paths with a losing outcome.
pub fn monte_carlo_sample(config: &SimConfig, functional: Functional) -> Result<SampleRun> {
    if config.n_paths == 0 {
        return Err(Error::InvalidConfig("n_paths must be positive".into()));
    }
    match (&config.generator, functional) {
        (Generator::NPlayerGridWalk { .. }, Functional::WinnerMin) => {}
        (Generator::NPlayerGridWalk { .. }, f) => {
            return Err(Error::GeneratorMismatch {
                functional: f.name(),
                generator: "n-player-grid-walk",
            })
        }
        (g, Functional::WinnerMin) => {
            return Err(Error::GeneratorMismatch {
                functional: "winner-min",
                generator: g.name(),
            })
        }
        _ => {}
    }

    let outcomes: Vec<PathValue> = (0..config.n_paths as u64)
        .into_par_iter()
        .map(|i| evaluate_path(config, functional, path_seed(config.master_seed, i)))
        .collect();

    let mut values = Vec::with_capacity(config.n_paths);
    let mut discarded_unabsorbed = 0usize;
    for out in outcomes {
        match out {
            PathValue::Kept(v) => values.push(v),
            PathValue::Filtered => {}
            PathValue::Unabsorbed => discarded_unabsorbed += 1,
        }
    }
    if values.is_empty() {
        return Err(Error::NoPathsRetained);
    }
    let retained = values.len();
    let label = format!("{}/{}", config.generator.name(), functional.name());
    Ok(SampleRun {
        sample: PathSample::new(values, label)?,
        generated: config.n_paths,
        retained,
        discarded_unabsorbed,
    })
}

fn evaluate_path(config: &SimConfig, functional: Functional, seed: u64) -> PathValue {
    match &config.generator {
        Generator::GaussianBridge { p0, steps } => {
            let path = gaussian_bridge_path(*p0, *steps, seed)
                .expect("bridge parameters validated at config time");
            two_player_value(&path, functional)
        }
        Generator::GridWalk {
            p0,
            grid,
            max_steps,
        } => match grid_walk_path(*p0, *grid, *max_steps, seed) {
            Ok(path) => two_player_value(&path, functional),
            Err(Error::NotAbsorbed { .. }) => PathValue::Unabsorbed,
            Err(e) => panic!("grid walk failed: {e}"),
        },
        Generator::NPlayerGridWalk {
            priors,
            grid,
            max_steps,
        } => match n_player_grid_walk(priors, *grid, *max_steps, seed) {
            Ok(ev) => PathValue::Kept(paths::winner_min(&ev)),
            Err(Error::NotAbsorbed { .. }) => PathValue::Unabsorbed,
            Err(e) => panic!("n-player walk failed: {e}"),
        },
    }
}

fn two_player_value(path: &WinProbSeries, functional: Functional) -> PathValue {
    match functional {
        Functional::Max => PathValue::Kept(
            paths::path_max(path.series()).expect("generated series is nonempty"),
        ),
        Functional::LoserPeak => PathValue::Kept(paths::loser_peak(path)),
        Functional::MaxGivenLoss => match path.outcome() {
            Outcome::BWins => PathValue::Kept(
                paths::path_max(path.series()).expect("generated series is nonempty"),
            ),
            Outcome::AWins => PathValue::Filtered,
        },
        Functional::WinnerMin => unreachable!("rejected before generation"),
    }
}

/// Monte Carlo estimate of the optional-stopping decomposition at level `x`:
///
/// `p0 = x P(M >= x) + (1 - x) P(tau_x = N_end) + E[(p_tau - x) 1{tau < N_end}]`
///
/// where `tau_x` is the first index at or above `x` and `N_end` is the final
/// index (the fixed horizon for the bridge, the absorption time for the grid
/// walk). The total must equal `p0` within Monte Carlo error; the last two
/// terms are the discrete-time corrections.
#[derive(Debug, Clone, Copy)]
pub struct StoppingDecomposition {
    pub level: f64,
    /// `x * P(M >= x)` estimate.
    pub term_main: f64,
    /// `(1 - x) * P(tau_x = N_end)` estimate.
    pub term_laststep: f64,
    /// `E[(p_tau - x) 1{tau < N_end}]` estimate.
    pub term_overshoot: f64,
    /// Sum of the three terms; estimates `p0`.
    pub total: f64,
    /// Standard error of `total`.
    pub std_error: f64,
    /// Paths contributing to the estimates.
    pub retained: usize,
    /// Grid walks that failed to absorb within their step budget.
    pub discarded_unabsorbed: usize,
}

/// Estimate the stopping decomposition for a two-player generator at level
/// `x` strictly between `p0` and 1.
pub fn stopping_identity_report(config: &SimConfig, x: f64) -> Result<StoppingDecomposition> {
    if config.n_paths == 0 {
        return Err(Error::InvalidConfig("n_paths must be positive".into()));
    }
    let p0 = config
        .generator
        .two_player_p0()
        .ok_or(Error::GeneratorMismatch {
            functional: "stopping-decomposition",
            generator: "n-player-grid-walk",
        })?;
    if !(x > p0.value() && x < 1.0) {
        return Err(Error::ArgumentOutOfRange {
            name: "x",
            value: x,
            range: "(p0, 1)",
        });
    }

    let triples: Vec<Option<(f64, f64, f64)>> = (0..config.n_paths as u64)
        .into_par_iter()
        .map(|i| {
            let seed = path_seed(config.master_seed, i);
            let path = match &config.generator {
                Generator::GaussianBridge { p0, steps } => gaussian_bridge_path(*p0, *steps, seed)
                    .expect("bridge parameters validated at config time"),
                Generator::GridWalk {
                    p0,
                    grid,
                    max_steps,
                } => match grid_walk_path(*p0, *grid, *max_steps, seed) {
                    Ok(path) => path,
                    Err(Error::NotAbsorbed { .. }) => return None,
                    Err(e) => panic!("grid walk failed: {e}"),
                },
                Generator::NPlayerGridWalk { .. } => unreachable!("rejected above"),
            };
            let series = path.series();
            let n_end = series.len() - 1;
            Some(
                match paths::first_passage(series, x).expect("level validated") {
                    None => (0.0, 0.0, 0.0),
                    Some(t) if t < n_end => (x, 0.0, series[t] - x),
                    Some(_) => (x, 1.0 - x, 0.0),
                },
            )
        })
        .collect();

    let mut main = 0.0;
    let mut last = 0.0;
    let mut over = 0.0;
    let mut totals = Vec::with_capacity(config.n_paths);
    let mut discarded_unabsorbed = 0usize;
    for t in triples {
        match t {
            Some((m, l, o)) => {
                main += m;
                last += l;
                over += o;
                totals.push(m + l + o);
            }
            None => discarded_unabsorbed += 1,
        }
    }
    if totals.is_empty() {
        return Err(Error::NoPathsRetained);
    }
    let n = totals.len() as f64;
    let total = (main + last + over) / n;
    let var = totals.iter().map(|t| (t - total) * (t - total)).sum::<f64>() / (n - 1.0);
    Ok(StoppingDecomposition {
        level: x,
        term_main: main / n,
        term_laststep: last / n,
        term_overshoot: over / n,
        total,
        std_error: (var / n).sqrt(),
        retained: totals.len(),
        discarded_unabsorbed,
    })
}

/// Export a sample as single-column CSV.
pub fn write_sample_csv<W: std::io::Write>(sample: &PathSample, mut out: W) -> Result<()> {
    writeln!(out, "value")?;
    for v in sample.values() {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prior(p: f64) -> Prior {
        Prior::new(p).unwrap()
    }

    #[test]
    fn two_state_grid_sample_values() {
        let config = SimConfig {
            generator: Generator::GridWalk {
                p0: prior(0.5),
                grid: GridStep::new(2).unwrap(),
                max_steps: None,
            },
            n_paths: 500,
            master_seed: 1,
        };
        let run = monte_carlo_sample(&config, Functional::Max).unwrap();
        assert!(run.sample.values().iter().all(|&v| v == 0.5 || v == 1.0));
        assert_eq!(run.generated, 500);
        assert_eq!(run.retained, 500);
    }

    #[test]
    fn identical_seed_identical_sample() {
        let config = SimConfig {
            generator: Generator::GaussianBridge {
                p0: prior(0.5),
                steps: 60,
            },
            n_paths: 2_000,
            master_seed: 42,
        };
        let a = monte_carlo_sample(&config, Functional::LoserPeak).unwrap();
        let b = monte_carlo_sample(&config, Functional::LoserPeak).unwrap();
        assert_eq!(a.sample.values(), b.sample.values());

        let other = SimConfig {
            master_seed: 43,
            ..config
        };
        let c = monte_carlo_sample(&other, Functional::LoserPeak).unwrap();
        assert_ne!(a.sample.values(), c.sample.values());
    }

    #[test]
    fn max_given_loss_retains_only_losses() {
        let config = SimConfig {
            generator: Generator::GaussianBridge {
                p0: prior(0.8),
                steps: 40,
            },
            n_paths: 3_000,
            master_seed: 7,
        };
        let run = monte_carlo_sample(&config, Functional::MaxGivenLoss).unwrap();
        assert!(run.retained < run.generated);
        // Retained fraction approximates 1 - p0.
        let frac = run.retained as f64 / run.generated as f64;
        assert!((frac - 0.2).abs() < 0.05, "loss fraction {frac}");
    }

    #[test]
    fn functional_generator_mismatch() {
        let two_player = SimConfig {
            generator: Generator::GaussianBridge {
                p0: prior(0.5),
                steps: 10,
            },
            n_paths: 10,
            master_seed: 0,
        };
        assert!(matches!(
            monte_carlo_sample(&two_player, Functional::WinnerMin),
            Err(Error::GeneratorMismatch { .. })
        ));

        let n_player = SimConfig {
            generator: Generator::NPlayerGridWalk {
                priors: PriorVector::symmetric(3).unwrap(),
                grid: GridStep::new(30).unwrap(),
                max_steps: None,
            },
            n_paths: 10,
            master_seed: 0,
        };
        assert!(matches!(
            monte_carlo_sample(&n_player, Functional::Max),
            Err(Error::GeneratorMismatch { .. })
        ));
        assert!(monte_carlo_sample(&n_player, Functional::WinnerMin).is_ok());
    }

    #[test]
    fn grid_decomposition_has_no_overshoot_on_grid_levels() {
        let config = SimConfig {
            generator: Generator::GridWalk {
                p0: prior(0.5),
                grid: GridStep::new(10).unwrap(),
                max_steps: None,
            },
            n_paths: 20_000,
            master_seed: 3,
        };
        let report = stopping_identity_report(&config, 0.8).unwrap();
        assert_eq!(report.term_overshoot, 0.0);
        assert_eq!(report.term_laststep, 0.0);
        assert!(
            (report.total - 0.5).abs() <= 3.0 * report.std_error,
            "total {} se {}",
            report.total,
            report.std_error
        );
    }

    #[test]
    fn decomposition_level_validation() {
        let config = SimConfig {
            generator: Generator::GridWalk {
                p0: prior(0.5),
                grid: GridStep::new(10).unwrap(),
                max_steps: None,
            },
            n_paths: 10,
            master_seed: 0,
        };
        assert!(stopping_identity_report(&config, 0.5).is_err());
        assert!(stopping_identity_report(&config, 1.0).is_err());
        assert!(stopping_identity_report(&config, 0.3).is_err());
    }

    #[test]
    fn path_seed_is_stable_and_spreads() {
        assert_eq!(path_seed(42, 0), path_seed(42, 0));
        assert_ne!(path_seed(42, 0), path_seed(42, 1));
        assert_ne!(path_seed(42, 0), path_seed(43, 0));
    }

    #[test]
    fn sample_csv_format() {
        let sample = PathSample::new(vec![0.5, 0.25], "t").unwrap();
        let mut buf = Vec::new();
        write_sample_csv(&sample, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "value\n0.25\n0.5\n");
    }
}
