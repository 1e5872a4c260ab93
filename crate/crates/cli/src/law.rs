//! `peaklaw law`: point evaluations or a dense plot-ready grid.

use crate::config::ConfigFile;
use crate::manifest::RunManifest;
use crate::util::{parse_prob, parse_prob_list, separator};
use crate::{core_error, CliError, FormatArg, LawArgs, LawKindArg};
use peaklaw::laws::{Law, Prior, PriorVector};
use serde_json::json;
use std::io::Write;

const DEFAULT_GRID: usize = 512;

pub fn run(mut args: LawArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    cfg.fill_string(&mut args.p0, "p0");
    cfg.fill_string(&mut args.priors, "priors");
    cfg.fill(&mut args.grid, "grid")?;
    cfg.fill_path(&mut args.out_dir, "out-dir");
    if args.format.is_none() {
        let mut fmt: Option<String> = None;
        cfg.fill_string(&mut fmt, "format");
        args.format = parse_format(fmt)?;
    }
    let format = args.format.unwrap_or(FormatArg::Csv);
    let sep = separator(format);

    let law = build_law(&args)?;

    let mut queries: Vec<(&str, f64)> = Vec::new();
    for raw in &args.cdf_at {
        queries.push(("cdf", parse_prob(raw)?));
    }
    for raw in &args.survival_at {
        queries.push(("survival", parse_prob(raw)?));
    }
    for raw in &args.quantile {
        queries.push(("quantile", parse_prob(raw)?));
    }

    if queries.is_empty() {
        emit_grid(&args, &law, sep)?;
    } else {
        for (name, x) in queries {
            let value = match name {
                "cdf" => law.cdf(x),
                "survival" => law.survival(x),
                _ => law.quantile(x),
            }
            .map_err(core_error)?;
            println!("{name}{sep}{x}{sep}{value}");
        }
    }
    Ok(())
}

fn parse_format(raw: Option<String>) -> Result<Option<FormatArg>, CliError> {
    Ok(match raw.as_deref() {
        None => None,
        Some("csv") => Some(FormatArg::Csv),
        Some("tsv") => Some(FormatArg::Tsv),
        Some(other) => {
            return Err(CliError::Usage(format!(
                "format must be csv or tsv, got {other}"
            )))
        }
    })
}

pub fn build_law(args: &LawArgs) -> Result<Law, CliError> {
    let need_p0 = |p0: &Option<String>| -> Result<Prior, CliError> {
        let raw = p0
            .as_ref()
            .ok_or_else(|| CliError::Usage("this law needs --p0".into()))?;
        Prior::new(parse_prob(raw)?).map_err(core_error)
    };
    Ok(match args.kind {
        LawKindArg::Max => Law::max_unconditional(need_p0(&args.p0)?),
        LawKindArg::MaxCondLoss => Law::max_conditional_loss(need_p0(&args.p0)?),
        LawKindArg::LoserMax => Law::loser_max(need_p0(&args.p0)?),
        LawKindArg::WinnerMin => {
            let raw = args
                .priors
                .as_ref()
                .ok_or_else(|| CliError::Usage("winner-min needs --priors".into()))?;
            let priors = PriorVector::new(parse_prob_list(raw)?).map_err(core_error)?;
            Law::winner_min(priors)
        }
    })
}

fn kind_slug(kind: LawKindArg) -> &'static str {
    match kind {
        LawKindArg::Max => "max",
        LawKindArg::MaxCondLoss => "max-cond-loss",
        LawKindArg::LoserMax => "loser-max",
        LawKindArg::WinnerMin => "winner-min",
    }
}

fn emit_grid(args: &LawArgs, law: &Law, sep: char) -> Result<(), CliError> {
    let points = args.grid.unwrap_or(DEFAULT_GRID);
    if points < 2 {
        return Err(CliError::Usage("grid needs at least 2 points".into()));
    }
    let mut table = String::new();
    table.push_str(&format!("x{sep}cdf\n"));
    for i in 0..points {
        let x = i as f64 / (points - 1) as f64;
        let f = law.cdf(x).map_err(core_error)?;
        table.push_str(&format!("{x}{sep}{f}\n"));
    }

    match &args.out_dir {
        None => {
            print!("{table}");
        }
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let file = format!("law_{}.csv", kind_slug(args.kind));
            std::fs::File::create(dir.join(&file))?.write_all(table.as_bytes())?;
            let mut manifest = RunManifest::new(
                "law",
                json!({
                    "kind": kind_slug(args.kind),
                    "p0": args.p0,
                    "priors": args.priors,
                    "grid": points,
                    "format": if sep == ',' { "csv" } else { "tsv" },
                }),
            );
            manifest.outputs.push(file.clone());
            manifest.write(dir)?;
            println!("wrote {}", dir.join(file).display());
        }
    }
    Ok(())
}
