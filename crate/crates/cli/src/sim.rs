//! `peaklaw simulate`: Monte Carlo samples, stopping decompositions, and
//! synthetic dataset emission. Outputs are a pure function of the resolved
//! configuration and seed; reruns are byte-identical.

use crate::config::ConfigFile;
use crate::manifest::RunManifest;
use crate::util::{parse_grid_step, parse_prob, parse_prob_list, sup_at_points};
use crate::{core_error, CliError, FunctionalArg, GenArg, SimArgs};
use peaklaw::ingest::{GameRecord, Winner};
use peaklaw::laws::{Law, Prior, PriorVector};
use peaklaw::paths::Outcome;
use peaklaw::simulate::{
    gaussian_bridge_path, monte_carlo_sample, path_seed, stopping_identity_report,
    write_sample_csv, Functional, Generator, GridStep, SimConfig,
};
use peaklaw::stats::{ks_statistic, ks_statistic_on_interval};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::io::Write;
use std::path::Path;

const DEFAULT_STEPS: usize = 2000;
const DEFAULT_PATHS: usize = 10_000;

struct Resolved {
    generator: Generator,
    gen_arg: GenArg,
    n_paths: usize,
    seed: u64,
    steps: usize,
}

pub fn run(mut args: SimArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    cfg.fill_string(&mut args.p0, "p0");
    cfg.fill_string(&mut args.priors, "priors");
    cfg.fill_string(&mut args.h, "h");
    cfg.fill(&mut args.steps, "steps")?;
    cfg.fill(&mut args.max_steps, "max-steps")?;
    cfg.fill(&mut args.paths, "paths")?;
    cfg.fill(&mut args.seed, "seed")?;
    cfg.fill(&mut args.shrink, "shrink")?;
    cfg.fill(&mut args.games_per_bin, "games-per-bin")?;
    cfg.fill_string(&mut args.bin_centers, "bin-centers");
    cfg.fill_path(&mut args.out_dir, "out-dir");

    let modes = [
        args.functional.is_some(),
        args.decompose_at.is_some(),
        args.emit_games.is_some(),
    ];
    if modes.iter().filter(|&&m| m).count() > 1 {
        return Err(CliError::Usage(
            "--functional, --decompose-at, and --emit-games are mutually exclusive".into(),
        ));
    }

    // Dataset mode takes its starting probabilities from the bin centers,
    // so it skips the single-generator resolution.
    if args.emit_games.is_some() {
        return emit_dataset(&args);
    }

    let resolved = resolve_generator(&args)?;
    if let Some(level) = &args.decompose_at {
        let x = parse_prob(level)?;
        return decompose(&args, &resolved, x);
    }
    let functional = args
        .functional
        .ok_or_else(|| CliError::Usage("pick one of --functional, --decompose-at, --emit-games".into()))?;
    sample(&args, &resolved, functional)
}

fn resolve_generator(args: &SimArgs) -> Result<Resolved, CliError> {
    let gen_arg = args
        .gen
        .ok_or_else(|| CliError::Usage("--gen bridge|grid|nplayer is required".into()))?;
    let steps = args.steps.unwrap_or(DEFAULT_STEPS);
    let n_paths = args.paths.unwrap_or(DEFAULT_PATHS);
    let seed = args.seed.unwrap_or(0);

    let need_p0 = || -> Result<Prior, CliError> {
        let raw = args
            .p0
            .as_ref()
            .ok_or_else(|| CliError::Usage("this generator needs --p0".into()))?;
        Prior::new(parse_prob(raw)?).map_err(core_error)
    };
    let need_grid = || -> Result<GridStep, CliError> {
        let raw = args
            .h
            .as_ref()
            .ok_or_else(|| CliError::Usage("lattice generators need --h".into()))?;
        parse_grid_step(raw)
    };

    let generator = match gen_arg {
        GenArg::Bridge => Generator::GaussianBridge {
            p0: need_p0()?,
            steps,
        },
        GenArg::Grid => Generator::GridWalk {
            p0: need_p0()?,
            grid: need_grid()?,
            max_steps: args.max_steps,
        },
        GenArg::Nplayer => {
            let raw = args
                .priors
                .as_ref()
                .ok_or_else(|| CliError::Usage("nplayer needs --priors".into()))?;
            let priors = PriorVector::new(parse_prob_list(raw)?).map_err(core_error)?;
            Generator::NPlayerGridWalk {
                priors,
                grid: need_grid()?,
                max_steps: args.max_steps,
            }
        }
    };
    Ok(Resolved {
        generator,
        gen_arg,
        n_paths,
        seed,
        steps,
    })
}

fn resolved_config_json(args: &SimArgs, resolved: &Resolved) -> serde_json::Value {
    json!({
        "gen": match resolved.gen_arg {
            GenArg::Bridge => "bridge",
            GenArg::Grid => "grid",
            GenArg::Nplayer => "nplayer",
        },
        "p0": args.p0,
        "priors": args.priors,
        "steps": resolved.steps,
        "h": args.h,
        "max_steps": args.max_steps,
        "paths": resolved.n_paths,
        "seed": resolved.seed,
        "shrink": args.shrink,
        "bin_centers": args.bin_centers,
        "games_per_bin": args.games_per_bin,
    })
}

fn out_dir(args: &SimArgs) -> Result<std::path::PathBuf, CliError> {
    let dir = args
        .out_dir
        .clone()
        .unwrap_or_else(|| std::path::PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

#[derive(Serialize)]
struct SampleSummary {
    generator: &'static str,
    functional: &'static str,
    generated: usize,
    retained: usize,
    discarded_unabsorbed: usize,
    mean: f64,
    /// Sup-distance between the sample ECDF and the matching closed form
    /// (windowed below the atom for the unconditional max; at lattice levels
    /// for lattice generators).
    sup_distance_to_law: f64,
}

fn sample(args: &SimArgs, resolved: &Resolved, functional: FunctionalArg) -> Result<(), CliError> {
    let functional = match functional {
        FunctionalArg::Max => Functional::Max,
        FunctionalArg::LoserPeak => Functional::LoserPeak,
        FunctionalArg::WinnerMin => Functional::WinnerMin,
        FunctionalArg::MaxGivenLoss => Functional::MaxGivenLoss,
    };
    let config = SimConfig {
        generator: resolved.generator.clone(),
        n_paths: resolved.n_paths,
        master_seed: resolved.seed,
    };
    let run = monte_carlo_sample(&config, functional).map_err(core_error)?;
    let sup = sup_distance(resolved, functional, &run.sample)?;

    let dir = out_dir(args)?;
    let mut file = std::fs::File::create(dir.join("sample.csv"))?;
    write_sample_csv(&run.sample, &mut file).map_err(core_error)?;

    let summary = SampleSummary {
        generator: resolved.generator.name(),
        functional: functional.name(),
        generated: run.generated,
        retained: run.retained,
        discarded_unabsorbed: run.discarded_unabsorbed,
        mean: run.sample.mean(),
        sup_distance_to_law: sup,
    };
    let text = serde_json::to_string_pretty(&summary)
        .map_err(|e| CliError::Internal(format!("summary serialization: {e}")))?;
    std::fs::write(dir.join("summary.json"), text + "\n")?;

    let mut manifest = RunManifest::new("simulate", resolved_config_json(args, resolved));
    manifest.master_seed = Some(resolved.seed);
    manifest.outputs = vec!["sample.csv".into(), "summary.json".into()];
    manifest.write(&dir)?;

    println!(
        "{} {}: retained {}/{} paths, mean {:.6}, sup-distance to law {:.4}",
        summary.generator,
        summary.functional,
        summary.retained,
        summary.generated,
        summary.mean,
        summary.sup_distance_to_law
    );
    Ok(())
}

/// Reference-law comparison matching the generator/functional pair.
fn sup_distance(
    resolved: &Resolved,
    functional: Functional,
    sample: &peaklaw::PathSample,
) -> Result<f64, CliError> {
    let lattice = |grid: GridStep, law: Law, upper: f64| -> f64 {
        let k = grid.denominator();
        let points = (0..=k)
            .map(move |m| m as f64 / k as f64)
            .filter(|&x| x <= upper);
        sup_at_points(sample, |x| law.cdf(x).expect("x in [0,1]"), points)
    };
    Ok(match (&resolved.generator, functional) {
        (Generator::GaussianBridge { p0, steps }, Functional::Max) => {
            let law = Law::max_unconditional(*p0);
            ks_statistic_on_interval(
                sample,
                |x| law.cdf(x).expect("x in [0,1]"),
                p0.value(),
                1.0 - 1.0 / *steps as f64,
            )
        }
        (Generator::GaussianBridge { p0, .. }, Functional::LoserPeak) => {
            let law = Law::loser_max(*p0);
            ks_statistic(sample, |x| law.cdf(x).expect("x in [0,1]"))
        }
        (Generator::GaussianBridge { p0, .. }, Functional::MaxGivenLoss) => {
            let law = Law::max_conditional_loss(*p0);
            ks_statistic(sample, |x| law.cdf(x).expect("x in [0,1]"))
        }
        (Generator::GridWalk { p0, grid, .. }, f) => {
            let law = match f {
                Functional::Max => Law::max_unconditional(*p0),
                Functional::LoserPeak => Law::loser_max(*p0),
                Functional::MaxGivenLoss => Law::max_conditional_loss(*p0),
                Functional::WinnerMin => unreachable!("rejected by monte_carlo_sample"),
            };
            lattice(*grid, law, 1.0)
        }
        (Generator::NPlayerGridWalk { priors, grid, .. }, Functional::WinnerMin) => {
            let top = priors.max_prior();
            let law = Law::winner_min(priors.clone());
            lattice(*grid, law, top)
        }
        _ => unreachable!("mismatches rejected by monte_carlo_sample"),
    })
}

#[derive(Serialize)]
struct DecompositionReport {
    generator: &'static str,
    level: f64,
    term_main: f64,
    term_laststep: f64,
    term_overshoot: f64,
    total: f64,
    std_error: f64,
    retained: usize,
    discarded_unabsorbed: usize,
}

fn decompose(args: &SimArgs, resolved: &Resolved, x: f64) -> Result<(), CliError> {
    let config = SimConfig {
        generator: resolved.generator.clone(),
        n_paths: resolved.n_paths,
        master_seed: resolved.seed,
    };
    let rep = stopping_identity_report(&config, x).map_err(core_error)?;
    let out = DecompositionReport {
        generator: resolved.generator.name(),
        level: rep.level,
        term_main: rep.term_main,
        term_laststep: rep.term_laststep,
        term_overshoot: rep.term_overshoot,
        total: rep.total,
        std_error: rep.std_error,
        retained: rep.retained,
        discarded_unabsorbed: rep.discarded_unabsorbed,
    };
    let dir = out_dir(args)?;
    let text = serde_json::to_string_pretty(&out)
        .map_err(|e| CliError::Internal(format!("report serialization: {e}")))?;
    std::fs::write(dir.join("decomposition.json"), text + "\n")?;

    let mut manifest = RunManifest::new("simulate", resolved_config_json(args, resolved));
    manifest.master_seed = Some(resolved.seed);
    manifest.outputs = vec!["decomposition.json".into()];
    manifest.write(&dir)?;

    println!(
        "decomposition at x={}: main {:.6} + last-step {:.6} + overshoot {:.6} = {:.6} (se {:.6})",
        rep.level, rep.term_main, rep.term_laststep, rep.term_overshoot, rep.total, rep.std_error
    );
    Ok(())
}

fn emit_dataset(args: &SimArgs) -> Result<(), CliError> {
    if args.gen != Some(GenArg::Bridge) {
        return Err(CliError::Usage(
            "dataset mode generates two-player bridge corpora; use --gen bridge".into(),
        ));
    }
    let centers = parse_prob_list(
        args.bin_centers
            .as_deref()
            .ok_or_else(|| CliError::Usage("dataset mode needs --bin-centers".into()))?,
    )?;
    let per_bin = args
        .games_per_bin
        .ok_or_else(|| CliError::Usage("dataset mode needs --games-per-bin".into()))?;
    if let Some(f) = args.shrink {
        if !(f.is_finite() && f > 0.0 && f <= 1.0) {
            return Err(CliError::Usage(format!(
                "shrink factor {f} outside (0, 1]"
            )));
        }
    }
    let priors: Vec<Prior> = centers
        .iter()
        .map(|&c| Prior::new(c))
        .collect::<Result<_, _>>()
        .map_err(core_error)?;

    let steps = args.steps.unwrap_or(DEFAULT_STEPS);
    let seed = args.seed.unwrap_or(0);
    let shrink = args.shrink;
    let records: Vec<GameRecord> = (0..centers.len() * per_bin)
        .into_par_iter()
        .map(|idx| {
            let p0 = priors[idx / per_bin];
            let path = gaussian_bridge_path(p0, steps, path_seed(seed, idx as u64))
                .expect("validated parameters");
            let series = match shrink {
                Some(f) => path.series().iter().map(|&p| 0.5 + f * (p - 0.5)).collect(),
                None => path.series().to_vec(),
            };
            GameRecord {
                game_id: format!("sim-{idx}"),
                league: "synthetic".into(),
                season: 0,
                winner: match path.outcome() {
                    Outcome::AWins => Winner::A,
                    Outcome::BWins => Winner::B,
                },
                series,
            }
        })
        .collect();

    let out_path: &Path = args.emit_games.as_deref().expect("checked by caller");
    if let Some(parent) = out_path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let mut file = std::io::BufWriter::new(std::fs::File::create(out_path)?);
    for record in &records {
        let line = serde_json::to_string(record)
            .map_err(|e| CliError::Internal(format!("record serialization: {e}")))?;
        writeln!(file, "{line}")?;
    }
    file.flush()?;

    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir)?;
        let mut manifest = RunManifest::new(
            "simulate",
            json!({
                "gen": "bridge",
                "mode": "dataset",
                "steps": steps,
                "seed": seed,
                "shrink": args.shrink,
                "bin_centers": args.bin_centers,
                "games_per_bin": per_bin,
            }),
        );
        manifest.master_seed = Some(seed);
        manifest.outputs = vec![out_path.display().to_string()];
        manifest.write(dir)?;
    }
    println!(
        "wrote {} games ({} centers x {per_bin}) to {}",
        records.len(),
        centers.len(),
        out_path.display()
    );
    Ok(())
}
