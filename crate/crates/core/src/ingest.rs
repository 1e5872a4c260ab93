//! Data model, file parsing, filtering, orientation, and p0-binning for
//! empirical win-probability datasets.
//!
//! Two input formats are supported: canonical JSONL (one game per line) and
//! a long-form CSV pair (a game table plus a series table). Records are
//! oriented so the stored series is the favored team's probability, grouped
//! into centered p0 bins, reduced to loser peaks, and tested bin-by-bin
//! against the matching closed-form law.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laws::{loser_max_cdf, Law, Prior};
use crate::paths::{loser_peak, Outcome, WinProbSeries};
use crate::stats::{kl_divergence_binned, ks_test, PathSample};

/// Terminal result of a recorded game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Winner {
    A,
    B,
    #[serde(rename = "tie")]
    Tie,
    #[serde(rename = "unknown")]
    Unknown,
}

/// One game as stored on disk. `series` is team A's win probability in
/// chronological order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameRecord {
    pub game_id: String,
    pub league: String,
    pub season: i32,
    pub winner: Winner,
    pub series: Vec<f64>,
}

impl GameRecord {
    /// Schema checks shared by both parsers.
    fn validate(&self) -> std::result::Result<(), String> {
        if self.series.len() < 2 {
            return Err(format!(
                "series needs at least 2 points, got {}",
                self.series.len()
            ));
        }
        for (k, &p) in self.series.iter().enumerate() {
            if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
                return Err(format!("series[{k}] = {p} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

/// A rejected input record, with its source location.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseIssue {
    pub line: usize,
    pub message: String,
}

/// Parsed records plus per-record rejections (rejections are not fatal).
#[derive(Debug, Default)]
pub struct ParseReport {
    pub games: Vec<GameRecord>,
    pub issues: Vec<ParseIssue>,
}

/// Parse canonical JSONL: one game object per line.
pub fn parse_games_jsonl<R: Read>(reader: R) -> Result<ParseReport> {
    let mut report = ParseReport::default();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<GameRecord>(&line) {
            Ok(game) => match game.validate() {
                Ok(()) => report.games.push(game),
                Err(message) => report.issues.push(ParseIssue {
                    line: lineno,
                    message,
                }),
            },
            Err(e) => report.issues.push(ParseIssue {
                line: lineno,
                message: e.to_string(),
            }),
        }
    }
    Ok(report)
}

pub fn parse_games_jsonl_path(path: &Path) -> Result<ParseReport> {
    parse_games_jsonl(std::fs::File::open(path)?)
}

#[derive(Debug, Deserialize)]
struct GameRow {
    game_id: String,
    league: String,
    season: i32,
    winner: Winner,
}

#[derive(Debug, Deserialize)]
struct SeriesRow {
    game_id: String,
    step: usize,
    wp_a: f64,
}

/// Parse the long-form CSV pair: `games.csv` (game_id,league,season,winner)
/// joined with `series.csv` (game_id,step,wp_a). Steps must be contiguous
/// from 0 within each game.
pub fn parse_games_csv<R1: Read, R2: Read>(games: R1, series: R2) -> Result<ParseReport> {
    let mut report = ParseReport::default();

    let mut rows: Vec<(usize, GameRow)> = Vec::new();
    let mut reader = csv::Reader::from_reader(games);
    for (idx, rec) in reader.deserialize::<GameRow>().enumerate() {
        let lineno = idx + 2; // header is line 1
        match rec {
            Ok(row) => rows.push((lineno, row)),
            Err(e) => report.issues.push(ParseIssue {
                line: lineno,
                message: format!("games.csv: {e}"),
            }),
        }
    }

    let mut by_game: HashMap<String, Vec<(usize, f64)>> = HashMap::new();
    let mut reader = csv::Reader::from_reader(series);
    for (idx, rec) in reader.deserialize::<SeriesRow>().enumerate() {
        let lineno = idx + 2;
        match rec {
            Ok(row) => by_game
                .entry(row.game_id)
                .or_default()
                .push((row.step, row.wp_a)),
            Err(e) => report.issues.push(ParseIssue {
                line: lineno,
                message: format!("series.csv: {e}"),
            }),
        }
    }

    for (lineno, row) in rows {
        let Some(mut steps) = by_game.remove(&row.game_id) else {
            report.issues.push(ParseIssue {
                line: lineno,
                message: format!("game {} has no series rows", row.game_id),
            });
            continue;
        };
        steps.sort_by_key(|&(s, _)| s);
        if steps.iter().enumerate().any(|(k, &(s, _))| s != k) {
            report.issues.push(ParseIssue {
                line: lineno,
                message: format!("game {} has non-contiguous steps", row.game_id),
            });
            continue;
        }
        let game = GameRecord {
            game_id: row.game_id,
            league: row.league,
            season: row.season,
            winner: row.winner,
            series: steps.into_iter().map(|(_, p)| p).collect(),
        };
        match game.validate() {
            Ok(()) => report.games.push(game),
            Err(message) => report.issues.push(ParseIssue {
                line: lineno,
                message,
            }),
        }
    }
    Ok(report)
}

/// Which games to keep before orientation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FilterPolicy {
    /// Keep only this league (seasons within a league pool by default).
    pub league: Option<String>,
    /// Keep only these seasons.
    pub seasons: Option<Vec<i32>>,
}

/// Accounting for [`orient_and_filter`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct FilterCounts {
    pub input: usize,
    pub dropped_tie: usize,
    pub dropped_unknown: usize,
    pub dropped_invalid_series: usize,
    pub dropped_by_policy: usize,
    pub reoriented: usize,
    pub retained: usize,
}

/// Drop ties/unknown outcomes and invalid series, then re-orient each record
/// so the stored series is the favored team's probability.
///
/// A game whose first value is below 0.5 is flipped (`p -> 1 - p`, winner
/// swapped); a first value of exactly 0.5 keeps its original orientation.
/// After this pass `p0 = series[0] >= 0.5` for every retained game.
pub fn orient_and_filter(
    games: Vec<GameRecord>,
    policy: &FilterPolicy,
) -> (Vec<WinProbSeries>, FilterCounts) {
    let mut counts = FilterCounts {
        input: games.len(),
        ..FilterCounts::default()
    };
    let mut out = Vec::with_capacity(games.len());
    for game in games {
        if let Some(league) = &policy.league {
            if &game.league != league {
                counts.dropped_by_policy += 1;
                continue;
            }
        }
        if let Some(seasons) = &policy.seasons {
            if !seasons.contains(&game.season) {
                counts.dropped_by_policy += 1;
                continue;
            }
        }
        let winner = match game.winner {
            Winner::A => Outcome::AWins,
            Winner::B => Outcome::BWins,
            Winner::Tie => {
                counts.dropped_tie += 1;
                continue;
            }
            Winner::Unknown => {
                counts.dropped_unknown += 1;
                continue;
            }
        };
        if game.validate().is_err() {
            counts.dropped_invalid_series += 1;
            continue;
        }
        let (series, outcome) = if game.series[0] < 0.5 {
            counts.reoriented += 1;
            let flipped = game.series.iter().map(|&p| 1.0 - p).collect();
            let swapped = match winner {
                Outcome::AWins => Outcome::BWins,
                Outcome::BWins => Outcome::AWins,
            };
            (flipped, swapped)
        } else {
            (game.series, winner)
        };
        out.push(
            WinProbSeries::new(game.game_id, series, outcome)
                .expect("validated series stays valid under 1 - p"),
        );
        counts.retained += 1;
    }
    (out, counts)
}

/// p0-bin layout: centered intervals `[c - width/2, c + width/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinConfig {
    pub centers: Vec<f64>,
    pub width: f64,
    pub min_count: usize,
}

impl BinConfig {
    pub fn new(centers: Vec<f64>, width: f64, min_count: usize) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::InvalidConfig("no bin centers".into()));
        }
        if !centers.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig(
                "bin centers must be strictly increasing".into(),
            ));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidConfig(format!("width {width} must be > 0")));
        }
        Ok(BinConfig {
            centers,
            width,
            min_count,
        })
    }

    /// Centers 0.50, 0.55, ..., 0.95, width 0.05, minimum 100 games per bin.
    pub fn default_half_to_95() -> Self {
        BinConfig {
            centers: (0..10).map(|i| 0.5 + 0.05 * i as f64).collect(),
            width: 0.05,
            min_count: 100,
        }
    }

    /// First center whose interval contains `p0` (right-open, so a boundary
    /// value belongs to the upper bin).
    pub fn assign(&self, p0: f64) -> Option<f64> {
        let half = self.width / 2.0;
        self.centers
            .iter()
            .copied()
            .find(|&c| p0 >= c - half && p0 < c + half)
    }
}

/// Loser peaks grouped by bin center, in center order.
#[derive(Debug, Clone)]
pub struct LoserPeakBin {
    pub center: f64,
    /// Post-orientation p0 of each retained game (for mixture-mode theory).
    pub p0s: Vec<f64>,
    pub sample: PathSample,
}

/// Output of [`bin_games`], with drop accounting.
#[derive(Debug, Clone, Default)]
pub struct BinnedPeaks {
    pub bins: Vec<LoserPeakBin>,
    pub dropped_out_of_range: usize,
    /// Bins removed for falling below `min_count`, as (center, count).
    pub dropped_small_bins: Vec<(f64, usize)>,
}

/// Assign each oriented game to its p0 bin and reduce it to the loser peak.
pub fn bin_games(games: &[WinProbSeries], config: &BinConfig) -> Result<BinnedPeaks> {
    let mut grouped: HashMap<u64, (Vec<f64>, Vec<f64>)> = HashMap::new();
    let mut out = BinnedPeaks::default();
    for game in games {
        match config.assign(game.p0()) {
            Some(center) => {
                let (peaks, p0s) = grouped.entry(center.to_bits()).or_default();
                peaks.push(loser_peak(game));
                p0s.push(game.p0());
            }
            None => out.dropped_out_of_range += 1,
        }
    }
    for &center in &config.centers {
        let Some((peaks, p0s)) = grouped.remove(&center.to_bits()) else {
            continue;
        };
        if peaks.len() < config.min_count {
            out.dropped_small_bins.push((center, peaks.len()));
            continue;
        }
        out.bins.push(LoserPeakBin {
            center,
            p0s,
            sample: PathSample::new(peaks, format!("p0={center}"))?,
        });
    }
    Ok(out)
}

/// How the per-bin reference CDF is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoryMode {
    /// Loser-peak law evaluated at the bin center (the default convention).
    BinCenter,
    /// Average of the per-game laws — a sensitivity mode for wide bins.
    PerGameMixture,
}

/// One diagnostic row, mirroring the reporting column order:
/// p0 center, n, KL, K-S D, p-value, rejection flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BinDiagnostics {
    pub p0_center: f64,
    pub n: usize,
    pub kl: f64,
    pub ks_d: f64,
    pub p_value: f64,
    pub reject: bool,
}

/// Number of equal-width cells used by the descriptive KL diagnostic.
const KL_BINS: usize = 20;

/// Build the per-bin diagnostic table: KL (20 cells), K-S statistic against
/// the bin's reference law, asymptotic p-value, and a Bonferroni flag at
/// `alpha / m`. Rows come out ordered by center.
pub fn diagnostic_table(
    bins: &[LoserPeakBin],
    alpha: f64,
    m: usize,
    mode: TheoryMode,
) -> Result<Vec<BinDiagnostics>> {
    if bins.is_empty() {
        return Ok(Vec::new());
    }
    if m == 0 {
        return Err(Error::InvalidConfig("m must be positive".into()));
    }
    let mut rows = Vec::with_capacity(bins.len());
    for bin in bins {
        let f0: Box<dyn Fn(f64) -> f64> = match mode {
            TheoryMode::BinCenter => {
                let law = Law::loser_max(Prior::new(bin.center)?);
                Box::new(move |x| law.cdf(x).expect("x in [0,1]"))
            }
            TheoryMode::PerGameMixture => {
                let priors: Vec<Prior> = bin
                    .p0s
                    .iter()
                    .map(|&p| Prior::new(p))
                    .collect::<Result<_>>()?;
                Box::new(move |x| {
                    let sum: f64 = priors
                        .iter()
                        .map(|&p| loser_max_cdf(p, x).expect("x in [0,1]"))
                        .sum();
                    sum / priors.len() as f64
                })
            }
        };
        let kl = kl_divergence_binned(&bin.sample, &f0, KL_BINS)?;
        let test = ks_test(&bin.sample, &f0);
        rows.push(BinDiagnostics {
            p0_center: bin.center,
            n: bin.sample.n(),
            kl,
            ks_d: test.d_n,
            p_value: test.p_value,
            reject: false, // filled below across the whole family
        });
    }
    // Bonferroni at alpha / m; m is passed in so several tables can share
    // one family if the caller wants.
    let cut = alpha / m as f64;
    for row in &mut rows {
        row.reject = row.p_value < cut;
    }
    Ok(rows)
}

/// Serialize diagnostics in the reporting column order; `reject` is 0/1.
pub fn write_diagnostics_csv<W: std::io::Write>(
    rows: &[BinDiagnostics],
    mut out: W,
) -> Result<()> {
    writeln!(out, "p0,n,kl,ks_d,p_value,reject")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.p0_center,
            r.n,
            r.kl,
            r.ks_d,
            r.p_value,
            if r.reject { 1 } else { 0 }
        )?;
    }
    Ok(())
}
