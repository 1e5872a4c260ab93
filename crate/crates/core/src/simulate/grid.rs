//! Absorbing random walks on the probability lattice `{0, 1/K, ..., 1}`.
//!
//! Positions are kept as integer lattice counts, so the walk is exactly a
//! martingale with binary terminal value and there is no float drift. For
//! levels on the grid a crossing lands exactly on the level (zero overshoot),
//! which isolates the last-step correction term of the discrete theory.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::laws::{Prior, PriorVector};
use crate::paths::{NPlayerSeries, Outcome, WinProbSeries};

/// Lattice spacing `h = 1/K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridStep {
    denominator: u32,
}

impl GridStep {
    pub fn new(denominator: u32) -> Result<Self> {
        if denominator < 2 {
            return Err(Error::InvalidGridStep(denominator));
        }
        Ok(GridStep { denominator })
    }

    pub fn denominator(self) -> u32 {
        self.denominator
    }

    pub fn h(self) -> f64 {
        1.0 / self.denominator as f64
    }

    /// Lattice count for a probability, or an off-grid error.
    fn lattice(self, p: f64) -> Result<u32> {
        let scaled = p * self.denominator as f64;
        let m = scaled.round();
        if (scaled - m).abs() > 1e-6 || m < 1.0 || m >= self.denominator as f64 {
            return Err(Error::OffGrid {
                p0: p,
                denominator: self.denominator,
            });
        }
        Ok(m as u32)
    }
}

fn default_max_steps(m: u32, k: u32) -> usize {
    // ~100x the expected absorption time m(K - m) of the symmetric walk.
    100 * m as usize * (k - m) as usize
}

/// Symmetric +-h walk absorbed at 0 and 1, returned up to absorption.
pub fn grid_walk_path(
    p0: Prior,
    grid: GridStep,
    max_steps: Option<usize>,
    seed: u64,
) -> Result<WinProbSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    grid_walk_with_rng(p0, grid, max_steps, &mut rng)
}

pub(crate) fn grid_walk_with_rng(
    p0: Prior,
    grid: GridStep,
    max_steps: Option<usize>,
    rng: &mut impl Rng,
) -> Result<WinProbSeries> {
    let k = grid.denominator();
    let mut m = grid.lattice(p0.value())?;
    let cap = max_steps.unwrap_or_else(|| default_max_steps(m, k));

    let scale = k as f64;
    let mut series = Vec::with_capacity(cap.min(4 * k as usize) + 1);
    series.push(m as f64 / scale);
    let mut steps = 0usize;
    while m > 0 && m < k {
        if steps >= cap {
            return Err(Error::NotAbsorbed { max_steps: cap });
        }
        if rng.random::<bool>() {
            m += 1;
        } else {
            m -= 1;
        }
        series.push(m as f64 / scale);
        steps += 1;
    }
    let outcome = if m == k { Outcome::AWins } else { Outcome::BWins };
    WinProbSeries::new("", series, outcome)
}

/// n-player pair-transfer walk.
///
/// Each step picks an unordered pair of non-eliminated players uniformly and
/// transfers one lattice unit between them with probability 1/2 each way.
/// A player whose count hits 0 is eliminated and never picked again, so no
/// clipping is ever needed; the walk stops when some count reaches K (at
/// which point every other count is 0). Each coordinate is a bounded
/// martingale and the terminal vector is a unit vector.
pub fn n_player_grid_walk(
    priors: &PriorVector,
    grid: GridStep,
    max_steps: Option<usize>,
    seed: u64,
) -> Result<NPlayerSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    n_player_with_rng(priors, grid, max_steps, &mut rng)
}

pub(crate) fn n_player_with_rng(
    priors: &PriorVector,
    grid: GridStep,
    max_steps: Option<usize>,
    rng: &mut impl Rng,
) -> Result<NPlayerSeries> {
    let k = grid.denominator();
    let mut counts: Vec<u32> = priors
        .priors()
        .iter()
        .map(|&p| grid.lattice(p))
        .collect::<Result<_>>()?;
    if counts.iter().map(|&c| c as u64).sum::<u64>() != k as u64 {
        return Err(Error::InvalidPriorVector(format!(
            "lattice counts do not sum to {k}"
        )));
    }

    // ~100x the expected absorption time sum m_i (K - m_i) / 2.
    let budget: usize = counts
        .iter()
        .map(|&m| m as usize * (k - m) as usize)
        .sum::<usize>()
        * 50;
    let cap = max_steps.unwrap_or(budget);

    let scale = k as f64;
    let snapshot =
        |c: &[u32]| -> Vec<f64> { c.iter().map(|&m| m as f64 / scale).collect() };

    let mut vectors = vec![snapshot(&counts)];
    let mut active: Vec<usize> = (0..counts.len()).collect();
    let mut steps = 0usize;
    while active.len() > 1 {
        if steps >= cap {
            return Err(Error::NotAbsorbed { max_steps: cap });
        }
        let a = rng.random_range(0..active.len());
        let mut b = rng.random_range(0..active.len() - 1);
        if b >= a {
            b += 1;
        }
        let (gain, lose) = if rng.random::<bool>() { (a, b) } else { (b, a) };
        counts[active[gain]] += 1;
        counts[active[lose]] -= 1;
        if counts[active[lose]] == 0 {
            active.remove(lose);
        }
        vectors.push(snapshot(&counts));
        steps += 1;
    }
    let winner = active[0];
    debug_assert_eq!(counts[winner], k);
    NPlayerSeries::new("", vectors, winner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths;

    fn prior(p: f64) -> Prior {
        Prior::new(p).unwrap()
    }

    #[test]
    fn two_state_walk_absorbs_immediately() {
        let grid = GridStep::new(2).unwrap();
        for seed in 0..20 {
            let path = grid_walk_path(prior(0.5), grid, None, seed).unwrap();
            assert_eq!(path.series().len(), 2);
            let last = *path.series().last().unwrap();
            assert!(last == 0.0 || last == 1.0);
        }
    }

    #[test]
    fn off_grid_p0_rejected() {
        let grid = GridStep::new(10).unwrap();
        assert!(grid_walk_path(prior(0.55), grid, None, 0).is_err());
        assert!(grid_walk_path(prior(0.5), grid, None, 0).is_ok());
        assert!(GridStep::new(1).is_err());
    }

    #[test]
    fn absorption_cap_is_reported() {
        let grid = GridStep::new(10).unwrap();
        // One step cannot absorb from the interior.
        let err = grid_walk_path(prior(0.5), grid, Some(1), 3).unwrap_err();
        assert!(matches!(err, Error::NotAbsorbed { max_steps: 1 }));
    }

    #[test]
    fn gambler_ruin_symmetry() {
        let grid = GridStep::new(10).unwrap();
        let n_paths = 20_000u64;
        let mut wins = 0usize;
        for i in 0..n_paths {
            let path =
                grid_walk_path(prior(0.5), grid, None, super::super::path_seed(5, i)).unwrap();
            if path.outcome() == Outcome::AWins {
                wins += 1;
            }
        }
        let freq = wins as f64 / n_paths as f64;
        let band = 4.0 * (0.25 / n_paths as f64).sqrt();
        assert!((freq - 0.5).abs() < band, "freq {freq}");
    }

    #[test]
    fn walk_moves_one_lattice_unit_per_step() {
        let grid = GridStep::new(10).unwrap();
        let path = grid_walk_path(prior(0.5), grid, None, 11).unwrap();
        for pair in path.series().windows(2) {
            assert!(((pair[1] - pair[0]).abs() - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn n_player_terminal_is_unit_vector() {
        let priors = PriorVector::symmetric(3).unwrap();
        let grid = GridStep::new(30).unwrap();
        for seed in 0..10 {
            let ev = n_player_grid_walk(&priors, grid, None, seed).unwrap();
            let last = ev.vectors().last().unwrap();
            let winner = ev.winner();
            assert_eq!(last[winner], 1.0);
            for (i, &p) in last.iter().enumerate() {
                if i != winner {
                    assert_eq!(p, 0.0);
                }
            }
            // Sum is conserved at every step.
            for v in ev.vectors() {
                assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn n_player_winner_frequencies_match_priors() {
        let priors = PriorVector::new(vec![1.0 / 6.0, 1.0 / 3.0, 0.5]).unwrap();
        let grid = GridStep::new(12).unwrap();
        let n_events = 12_000u64;
        let mut tally = [0usize; 3];
        for i in 0..n_events {
            let ev =
                n_player_grid_walk(&priors, grid, None, super::super::path_seed(9, i)).unwrap();
            tally[ev.winner()] += 1;
        }
        for (i, &expect) in priors.priors().iter().enumerate() {
            let freq = tally[i] as f64 / n_events as f64;
            let band = 4.0 * (expect * (1.0 - expect) / n_events as f64).sqrt();
            assert!((freq - expect).abs() < band, "player {i}: {freq} vs {expect}");
        }
    }

    #[test]
    fn n_player_eliminated_players_stay_eliminated() {
        let priors = PriorVector::symmetric(4).unwrap();
        let grid = GridStep::new(8).unwrap();
        let ev = n_player_grid_walk(&priors, grid, None, 21).unwrap();
        let n = ev.num_players();
        for i in 0..n {
            let mut dead = false;
            for v in ev.vectors() {
                if dead {
                    assert_eq!(v[i], 0.0, "player {i} moved after elimination");
                }
                if v[i] == 0.0 {
                    dead = true;
                }
            }
        }
        // Winner-min is never above the winner's prior.
        assert!(paths::winner_min(&ev) <= ev.vectors()[0][ev.winner()] + 1e-15);
    }
}
