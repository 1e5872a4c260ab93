//! Path functionals: the scalar extrema the laws describe, computed from
//! observed or simulated probability paths.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Terminal outcome of a two-player series, from team A's perspective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    AWins,
    BWins,
}

/// One game's (or trade's) ordered win-probability path.
///
/// The series is always oriented as team A's win probability; ingest handles
/// home/away mapping so that downstream code never needs per-call flags. The
/// terminal element need not be exactly 0 or 1 (real feeds truncate before
/// certainty); functionals use the series as given.
#[derive(Debug, Clone, PartialEq)]
pub struct WinProbSeries {
    id: String,
    series: Vec<f64>,
    outcome: Outcome,
}

impl WinProbSeries {
    pub fn new(id: impl Into<String>, series: Vec<f64>, outcome: Outcome) -> Result<Self> {
        if series.len() < 2 {
            return Err(Error::InvalidSeries(format!(
                "need at least 2 points, got {}",
                series.len()
            )));
        }
        for (k, &p) in series.iter().enumerate() {
            if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
                return Err(Error::InvalidSeries(format!(
                    "element {k} = {p} outside [0, 1]"
                )));
            }
        }
        Ok(WinProbSeries {
            id: id.into(),
            series,
            outcome,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn series(&self) -> &[f64] {
        &self.series
    }

    pub fn outcome(&self) -> Outcome {
        self.outcome
    }

    /// First element of the series.
    pub fn p0(&self) -> f64 {
        self.series[0]
    }
}

/// An n-player event's path of win-probability vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct NPlayerSeries {
    id: String,
    vectors: Vec<Vec<f64>>,
    winner: usize,
}

/// Allowed drift of each probability vector's sum away from 1.
const VECTOR_SUM_TOL: f64 = 1e-6;

impl NPlayerSeries {
    pub fn new(id: impl Into<String>, vectors: Vec<Vec<f64>>, winner: usize) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::InvalidSeries("no probability vectors".into()));
        }
        let n = vectors[0].len();
        if n < 2 {
            return Err(Error::InvalidSeries(format!(
                "need at least 2 players, got {n}"
            )));
        }
        if winner >= n {
            return Err(Error::InvalidSeries(format!(
                "winner index {winner} out of range for {n} players"
            )));
        }
        for (t, v) in vectors.iter().enumerate() {
            if v.len() != n {
                return Err(Error::InvalidSeries(format!(
                    "vector {t} has {} entries, expected {n}",
                    v.len()
                )));
            }
            let mut sum = 0.0;
            for (i, &p) in v.iter().enumerate() {
                if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
                    return Err(Error::InvalidSeries(format!(
                        "vector {t} entry {i} = {p} outside [0, 1]"
                    )));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > VECTOR_SUM_TOL {
                return Err(Error::InvalidSeries(format!(
                    "vector {t} sums to {sum}, drift above {VECTOR_SUM_TOL}"
                )));
            }
        }
        Ok(NPlayerSeries {
            id: id.into(),
            vectors,
            winner,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn winner(&self) -> usize {
        self.winner
    }

    pub fn num_players(&self) -> usize {
        self.vectors[0].len()
    }
}

/// Maximum element of a nonempty series.
pub fn path_max(series: &[f64]) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(series.iter().cloned().fold(f64::MIN, f64::max))
}

/// First index `k` with `series[k] >= level`, or `None` if the level is never
/// reached (the empty-set infimum).
pub fn first_passage(series: &[f64], level: f64) -> Result<Option<usize>> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    if !(level.is_finite() && (0.0..=1.0).contains(&level)) {
        return Err(Error::ProbabilityOutOfRange {
            name: "level",
            value: level,
        });
    }
    Ok(series.iter().position(|&p| p >= level))
}

/// Peak win probability attained by the eventual loser.
///
/// If A lost, this is the max of the stored series; if A won, the max of the
/// complementary series `1 - p_k`.
pub fn loser_peak(game: &WinProbSeries) -> f64 {
    match game.outcome() {
        Outcome::BWins => game.series().iter().cloned().fold(f64::MIN, f64::max),
        Outcome::AWins => game
            .series()
            .iter()
            .map(|&p| 1.0 - p)
            .fold(f64::MIN, f64::max),
    }
}

/// Minimum win probability attained by the eventual winner, tracked on the
/// winner's own coordinate (never re-derived from the other players).
pub fn winner_min(event: &NPlayerSeries) -> f64 {
    let w = event.winner();
    event
        .vectors()
        .iter()
        .map(|v| v[w])
        .fold(f64::MAX, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_max_basics() {
        assert_eq!(path_max(&[0.5, 0.7, 0.2, 0.0]).unwrap(), 0.7);
        assert_eq!(path_max(&[0.3]).unwrap(), 0.3);
        assert!(path_max(&[]).is_err());
    }

    #[test]
    fn path_max_matches_scan_oracle() {
        // Element-wise scan as an independent oracle.
        let mut state = 0x9E37u64;
        for _ in 0..50 {
            let series: Vec<f64> = (0..37)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (state >> 11) as f64 / (1u64 << 53) as f64
                })
                .collect();
            let mut best = series[0];
            for &v in &series {
                if v > best {
                    best = v;
                }
            }
            assert_eq!(path_max(&series).unwrap(), best);
        }
    }

    #[test]
    fn first_passage_conventions() {
        assert_eq!(first_passage(&[0.5, 0.6, 0.8], 0.75).unwrap(), Some(2));
        assert_eq!(first_passage(&[0.5, 0.4], 0.9).unwrap(), None);
        // Level at or below the start is hit at index 0.
        assert_eq!(first_passage(&[0.5, 0.1], 0.5).unwrap(), Some(0));
        assert!(first_passage(&[0.5], 1.5).is_err());
        assert!(first_passage(&[], 0.5).is_err());
    }

    #[test]
    fn loser_peak_tracks_the_losing_side() {
        let a_lost =
            WinProbSeries::new("g", vec![0.5, 0.8, 0.1, 0.0], Outcome::BWins).unwrap();
        assert_eq!(loser_peak(&a_lost), 0.8);

        let a_won = WinProbSeries::new("g", vec![0.5, 0.2, 0.9, 1.0], Outcome::AWins).unwrap();
        assert!((loser_peak(&a_won) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn loser_peak_bounds() {
        let g = WinProbSeries::new("g", vec![0.7, 0.9, 1.0], Outcome::AWins).unwrap();
        let peak = loser_peak(&g);
        assert!(peak >= (1.0 - g.p0()).min(g.p0()) - 1e-15);
        let g2 = WinProbSeries::new("g", vec![0.7, 0.4, 0.0], Outcome::BWins).unwrap();
        assert!(loser_peak(&g2) < 1.0);
    }

    #[test]
    fn winner_min_examples() {
        let third = 1.0 / 3.0;
        let ev = NPlayerSeries::new(
            "e",
            vec![
                vec![third, third, third],
                vec![0.1, 0.4, 0.5],
                vec![0.0, 0.0, 1.0],
            ],
            2,
        )
        .unwrap();
        assert_eq!(winner_min(&ev), third);

        let ev = NPlayerSeries::new("e", vec![vec![0.5, 0.5], vec![1.0, 0.0]], 0).unwrap();
        assert_eq!(winner_min(&ev), 0.5);
    }

    #[test]
    fn winner_min_cannot_exceed_the_prior() {
        let ev = NPlayerSeries::new(
            "e",
            vec![vec![0.25, 0.75], vec![0.5, 0.5], vec![1.0, 0.0]],
            0,
        )
        .unwrap();
        assert!(winner_min(&ev) <= ev.vectors()[0][0]);
    }

    #[test]
    fn series_validation() {
        assert!(WinProbSeries::new("g", vec![0.5], Outcome::AWins).is_err());
        assert!(WinProbSeries::new("g", vec![0.5, 1.2], Outcome::AWins).is_err());
        assert!(NPlayerSeries::new("e", vec![vec![0.6, 0.6]], 0).is_err());
        assert!(NPlayerSeries::new("e", vec![vec![0.5, 0.5]], 2).is_err());
    }
}
