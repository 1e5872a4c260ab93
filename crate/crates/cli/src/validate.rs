//! `peaklaw validate`: the full calibration pipeline (parse, orient/filter,
//! bin, diagnose) with plot-data emission.

use crate::config::ConfigFile;
use crate::manifest::RunManifest;
use crate::util::{parse_prob_list, separator};
use crate::{core_error, CliError, FormatArg, TheoryArg, ValidateArgs};
use peaklaw::ingest::{
    bin_games, diagnostic_table, orient_and_filter, parse_games_csv, parse_games_jsonl_path,
    write_diagnostics_csv, BinConfig, BinDiagnostics, FilterCounts, FilterPolicy, LoserPeakBin,
    ParseReport, TheoryMode,
};
use peaklaw::laws::{Law, Prior};
use peaklaw::stats::ecdf_eval;
use serde::Serialize;
use serde_json::json;
use std::io::Write;
use std::path::PathBuf;

const OVERLAY_GRID: usize = 512;

pub fn run(mut args: ValidateArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    cfg.fill_path(&mut args.games, "games");
    cfg.fill_path(&mut args.games_csv, "games-csv");
    cfg.fill_path(&mut args.series_csv, "series-csv");
    cfg.fill(&mut args.alpha, "alpha")?;
    cfg.fill_string(&mut args.centers, "centers");
    cfg.fill(&mut args.width, "width")?;
    cfg.fill(&mut args.min_count, "min-count")?;
    cfg.fill_string(&mut args.league, "league");
    cfg.fill_string(&mut args.seasons, "seasons");
    cfg.fill_path(&mut args.out_dir, "out-dir");

    let alpha = args.alpha.unwrap_or(0.05);
    let format = args.format.unwrap_or(FormatArg::Csv);
    let sep = separator(format);
    let theory = match args.theory.unwrap_or(TheoryArg::BinCenter) {
        TheoryArg::BinCenter => TheoryMode::BinCenter,
        TheoryArg::Mixture => TheoryMode::PerGameMixture,
    };

    let bin_config = match &args.centers {
        None => {
            let mut c = BinConfig::default_half_to_95();
            if let Some(w) = args.width {
                c.width = w;
            }
            if let Some(m) = args.min_count {
                c.min_count = m;
            }
            BinConfig::new(c.centers, c.width, c.min_count).map_err(core_error)?
        }
        Some(raw) => BinConfig::new(
            parse_prob_list(raw)?,
            args.width.unwrap_or(0.05),
            args.min_count.unwrap_or(100),
        )
        .map_err(core_error)?,
    };

    // Parse.
    let (report, inputs) = load_dataset(&args)?;
    let parse_issues = report.issues.len();

    // Orient and filter.
    let policy = FilterPolicy {
        league: args.league.clone(),
        seasons: match &args.seasons {
            None => None,
            Some(raw) => Some(
                raw.split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<i32>()
                            .map_err(|_| CliError::Usage(format!("bad season '{s}'")))
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        },
    };
    let (oriented, counts) = orient_and_filter(report.games, &policy);
    if oriented.is_empty() {
        return Err(CliError::Data("dataset empty after filtering".into()));
    }

    // Bin and diagnose.
    let binned = bin_games(&oriented, &bin_config).map_err(core_error)?;
    if binned.bins.is_empty() {
        return Err(CliError::Data(
            "every bin fell below the minimum game count".into(),
        ));
    }
    let m = binned.bins.len();
    let rows = diagnostic_table(&binned.bins, alpha, m, theory).map_err(core_error)?;

    // Write everything.
    let dir = args
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    let mut outputs = Vec::new();

    write_table(&dir, &rows, format, &mut outputs)?;
    for bin in &binned.bins {
        write_overlay(&dir, bin, sep, &mut outputs)?;
        write_qq(&dir, bin, sep, &mut outputs)?;
    }

    let summary = Summary {
        alpha,
        m,
        parse_issues,
        filter: counts,
        dropped_out_of_range: binned.dropped_out_of_range,
        dropped_small_bins: binned.dropped_small_bins.clone(),
        bins: rows.clone(),
        rejected: rows.iter().filter(|r| r.reject).count(),
    };
    let text = serde_json::to_string_pretty(&summary)
        .map_err(|e| CliError::Internal(format!("summary serialization: {e}")))?;
    std::fs::write(dir.join("summary.json"), text + "\n")?;
    outputs.push("summary.json".into());

    let mut manifest = RunManifest::new(
        "validate",
        json!({
            "alpha": alpha,
            "centers": bin_config.centers,
            "width": bin_config.width,
            "min_count": bin_config.min_count,
            "league": args.league,
            "seasons": args.seasons,
            "theory": match theory {
                TheoryMode::BinCenter => "bin-center",
                TheoryMode::PerGameMixture => "mixture",
            },
            "format": if sep == ',' { "csv" } else { "tsv" },
        }),
    );
    for input in &inputs {
        manifest.add_input(input)?;
    }
    manifest.outputs = outputs;
    manifest.write(&dir)?;

    // Console report.
    println!(
        "parsed {} games ({} rejected records), retained {} after filtering ({} ties dropped)",
        counts.input, parse_issues, counts.retained, counts.dropped_tie
    );
    println!(
        "{} bins retained, {} below min-count, {} games out of range; {} rejections at alpha={}/m={}",
        m,
        binned.dropped_small_bins.len(),
        binned.dropped_out_of_range,
        summary.rejected,
        alpha,
        m
    );
    let mut stdout_table = Vec::new();
    write_diagnostics_csv(&rows, &mut stdout_table).map_err(core_error)?;
    print!("{}", String::from_utf8_lossy(&stdout_table));
    Ok(())
}

#[derive(Serialize)]
struct Summary {
    alpha: f64,
    m: usize,
    parse_issues: usize,
    filter: FilterCounts,
    dropped_out_of_range: usize,
    dropped_small_bins: Vec<(f64, usize)>,
    bins: Vec<BinDiagnostics>,
    rejected: usize,
}

fn load_dataset(args: &ValidateArgs) -> Result<(ParseReport, Vec<PathBuf>), CliError> {
    match (&args.games, &args.games_csv, &args.series_csv) {
        (Some(path), None, None) => {
            let report = parse_games_jsonl_path(path).map_err(core_error)?;
            Ok((report, vec![path.clone()]))
        }
        (None, Some(games), Some(series)) => {
            let report = parse_games_csv(
                std::fs::File::open(games)?,
                std::fs::File::open(series)?,
            )
            .map_err(core_error)?;
            Ok((report, vec![games.clone(), series.clone()]))
        }
        _ => Err(CliError::Usage(
            "pass --games FILE.jsonl, or --games-csv and --series-csv together".into(),
        )),
    }
}

fn write_table(
    dir: &std::path::Path,
    rows: &[BinDiagnostics],
    format: FormatArg,
    outputs: &mut Vec<String>,
) -> Result<(), CliError> {
    let name = "diagnostics.csv";
    let mut file = std::fs::File::create(dir.join(name))?;
    match format {
        FormatArg::Csv => write_diagnostics_csv(rows, &mut file).map_err(core_error)?,
        FormatArg::Tsv => {
            writeln!(file, "p0\tn\tkl\tks_d\tp_value\treject")?;
            for r in rows {
                writeln!(
                    file,
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    r.p0_center,
                    r.n,
                    r.kl,
                    r.ks_d,
                    r.p_value,
                    if r.reject { 1 } else { 0 }
                )?;
            }
        }
    }
    outputs.push(name.into());
    Ok(())
}

/// Overlay data: ECDF and reference CDF on a dense grid, for external
/// plotting of per-bin CDF agreement.
fn write_overlay(
    dir: &std::path::Path,
    bin: &LoserPeakBin,
    sep: char,
    outputs: &mut Vec<String>,
) -> Result<(), CliError> {
    let law = Law::loser_max(Prior::new(bin.center).map_err(core_error)?);
    let name = format!("overlay_{}.csv", bin.center);
    let mut file = std::io::BufWriter::new(std::fs::File::create(dir.join(&name))?);
    writeln!(file, "x{sep}ecdf{sep}theory")?;
    for i in 0..OVERLAY_GRID {
        let x = i as f64 / (OVERLAY_GRID - 1) as f64;
        let e = ecdf_eval(&bin.sample, x);
        let t = law.cdf(x).map_err(core_error)?;
        writeln!(file, "{x}{sep}{e}{sep}{t}")?;
    }
    file.flush()?;
    outputs.push(name);
    Ok(())
}

/// Q-Q data: empirical order statistics against theoretical quantiles at the
/// mid-jump levels (i - 1/2)/n.
fn write_qq(
    dir: &std::path::Path,
    bin: &LoserPeakBin,
    sep: char,
    outputs: &mut Vec<String>,
) -> Result<(), CliError> {
    let law = Law::loser_max(Prior::new(bin.center).map_err(core_error)?);
    let name = format!("qq_{}.csv", bin.center);
    let mut file = std::io::BufWriter::new(std::fs::File::create(dir.join(&name))?);
    writeln!(file, "theoretical_quantile{sep}empirical_quantile")?;
    let n = bin.sample.n();
    for (i, &value) in bin.sample.values().iter().enumerate() {
        let u = (i as f64 + 0.5) / n as f64;
        let q = law.quantile(u).map_err(core_error)?;
        writeln!(file, "{q}{sep}{value}")?;
    }
    file.flush()?;
    outputs.push(name);
    Ok(())
}
