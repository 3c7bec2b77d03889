//! File-driven command line: order checks, equilibrium enumeration,
//! witness construction and replay, bundled demos, and parameter sweeps.
//!
//! Exit codes: 0 the order holds / the result verifies, 1 a violation or
//! assertion failure (with a certificate in the report), 2 malformed or
//! incompatible input, 3 a degenerate witness construction.

mod demos;
mod render;

use clap::{Parser, Subcommand};
use simil_core::games::nonexch_enumerate_equilibria;
use simil_core::io::{
    cutoffs_value, equilibria_value, parse_base_order, parse_dist_str, parse_family_name,
    parse_game_str, parse_witness_bundle_str, statewise_verdict_value, to_json_string,
    verdict_value, verify_report_value, witness_bundle_file, DistInput, GameInput, Loaded,
};
use simil_core::num::{parse_q, qi};
use simil_core::orders::{check_cad_nonexch, check_order, check_statewise, BaseOrder};
use simil_core::witness::{
    build_common_witness, build_private_witness, build_scad_witness, build_separable_witness,
    verify_witness, WitnessFamily, WitnessInputs,
};
use simil_core::{bank_run_sweep, SimilError};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "simil",
    version,
    about = "Similarity orders, equilibria, and witness games in exact arithmetic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a similarity order between two distribution files.
    Check {
        /// One of cad, ccad, icad, scad, pqd2.
        order: String,
        file_f: PathBuf,
        file_g: PathBuf,
        /// Apply the order per state to two family files.
        #[arg(long)]
        statewise: bool,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Report format: json or csv.
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Enumerate symmetric pure equilibria of a game on a distribution.
    Equilibria {
        game: PathBuf,
        dist: PathBuf,
        /// Enumerate cutoff equilibria (common-value game on a family).
        #[arg(long)]
        cutoffs: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Build a separating witness from an order violation and re-verify it.
    Witness {
        file_f: PathBuf,
        file_g: PathBuf,
        /// One of private-max, private-min, common, separable, scad, congestion.
        #[arg(long)]
        family: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a witness bundle against the distributions it separates.
    Verify {
        bundle: PathBuf,
        file_f: PathBuf,
        file_g: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce a bundled example and assert its expected shape.
    Demo {
        /// One of table1, figure1, figure2, bankrun, auction, rationalize.
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the bank-run perturbation over its feasible range (CSV).
    BankrunSweep {
        #[arg(long, default_value = "1/20")]
        epsilon: String,
        #[arg(long, default_value = "97/100")]
        p: String,
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the seeded property suites at desk scale.
    Selftest {
        /// Generator seed; the same seed replays the same instances.
        #[arg(long)]
        seed: u64,
        /// Cases per suite.
        #[arg(long, default_value_t = 25)]
        cases: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Outcome {
    code: u8,
    output: String,
}

fn read_file(path: &Path) -> Result<String, SimilError> {
    std::fs::read_to_string(path)
        .map_err(|e| SimilError::Parse(format!("{}: {e}", path.display())))
}

fn report_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn load_dist(path: &Path) -> Result<DistInput, SimilError> {
    let Loaded { value, warnings } = parse_dist_str(&read_file(path)?)?;
    report_warnings(&warnings);
    Ok(value)
}

fn load_game(path: &Path) -> Result<GameInput, SimilError> {
    let Loaded { value, warnings } = parse_game_str(&read_file(path)?)?;
    report_warnings(&warnings);
    Ok(value)
}

/// Writes to a temporary sibling and renames, so readers never observe a
/// partial report.
fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), SimilError> {
    match out {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(path) => {
            let mut tmp = path.as_os_str().to_owned();
            tmp.push(".tmp");
            let tmp = PathBuf::from(tmp);
            std::fs::write(&tmp, content)
                .and_then(|()| std::fs::rename(&tmp, path))
                .map_err(|e| SimilError::Parse(format!("{}: {e}", path.display())))
        }
    }
}

fn error_exit(e: &SimilError) -> u8 {
    match e {
        SimilError::NotViolated(_) => 1,
        SimilError::Degenerate(_) => 3,
        _ => 2,
    }
}

fn cmd_check(
    order: &str,
    file_f: &Path,
    file_g: &Path,
    statewise: bool,
    format: &str,
) -> Result<Outcome, SimilError> {
    let base = parse_base_order(order)?;
    let f = load_dist(file_f)?;
    let g = load_dist(file_g)?;
    match (f, g) {
        (DistInput::Exchangeable(f), DistInput::Exchangeable(g)) => {
            if statewise {
                return Err(SimilError::Invalid(
                    "--statewise needs two family files".into(),
                ));
            }
            let verdict = check_order(base, &f, &g)?;
            let value = verdict_value(&verdict, f.space(), None);
            let output = render::check_output(&value, format)?;
            Ok(Outcome { code: if verdict.holds { 0 } else { 1 }, output })
        }
        (DistInput::Ordered(f), DistInput::Ordered(g)) => {
            if statewise {
                return Err(SimilError::Invalid(
                    "--statewise needs two family files".into(),
                ));
            }
            if base != BaseOrder::Cad {
                return Err(SimilError::Unsupported(
                    "ordered distributions support the cad order only".into(),
                ));
            }
            let verdict = check_cad_nonexch(&f, &g)?;
            let value = verdict_value(&verdict, f.space(), None);
            let output = render::check_output(&value, format)?;
            Ok(Outcome { code: if verdict.holds { 0 } else { 1 }, output })
        }
        (DistInput::Family(f), DistInput::Family(g)) => {
            if !statewise {
                return Err(SimilError::Invalid(
                    "family files compare per state; pass --statewise".into(),
                ));
            }
            let verdict = check_statewise(base, &f, &g)?;
            let value = statewise_verdict_value(&verdict, f.space(), f.states());
            let output = render::check_output(&value, format)?;
            Ok(Outcome { code: if verdict.holds { 0 } else { 1 }, output })
        }
        _ => Err(SimilError::Mismatch(
            "the two files hold different kinds of distributions".into(),
        )),
    }
}

fn cmd_equilibria(
    game_path: &Path,
    dist_path: &Path,
    cutoffs: bool,
    format: &str,
) -> Result<Outcome, SimilError> {
    let game = load_game(game_path)?;
    let dist = load_dist(dist_path)?;
    match (game, dist) {
        (GameInput::Private { game, weights }, DistInput::Exchangeable(d)) => {
            if cutoffs {
                return Err(SimilError::Invalid(
                    "--cutoffs applies to common-value games on families".into(),
                ));
            }
            if weights.is_some() {
                return Err(SimilError::Invalid(
                    "weighted games run on ordered distributions".into(),
                ));
            }
            let set = game.enumerate_equilibria(&d)?;
            let value = equilibria_value(&set, game.space());
            let output = render::equilibria_output(&value, &set, &d, format)?;
            Ok(Outcome { code: 0, output })
        }
        (GameInput::Private { game, weights }, DistInput::Ordered(d)) => {
            if cutoffs {
                return Err(SimilError::Invalid(
                    "--cutoffs applies to common-value games on families".into(),
                ));
            }
            let weights = weights.unwrap_or_else(|| vec![qi(1); game.players()]);
            let strategies = nonexch_enumerate_equilibria(&game, &weights, &d)?;
            let value = serde_json::json!({
                "strategies": strategies
                    .iter()
                    .map(|&p| game.space().set_labels(p))
                    .collect::<Vec<_>>(),
            });
            let output = render::strategies_output(&value, &strategies, game.space(), format)?;
            Ok(Outcome { code: 0, output })
        }
        (GameInput::Common(game), DistInput::Family(fam)) => {
            if !cutoffs {
                return Err(SimilError::Invalid(
                    "common-value games enumerate cutoff equilibria; pass --cutoffs".into(),
                ));
            }
            let set = game.enumerate_cutoff_equilibria(&fam)?;
            let value = cutoffs_value(&set, fam.space());
            let output = render::cutoffs_output(&value, &set, &fam, format)?;
            Ok(Outcome { code: 0, output })
        }
        _ => Err(SimilError::Mismatch(
            "game and distribution files do not go together".into(),
        )),
    }
}

fn cmd_witness(file_f: &Path, file_g: &Path, family: &str) -> Result<Outcome, SimilError> {
    let family = parse_family_name(family)?;
    let f = load_dist(file_f)?;
    let g = load_dist(file_g)?;
    let needs_families = matches!(family, WitnessFamily::Common | WitnessFamily::Separable);
    match (f, g) {
        (DistInput::Exchangeable(f), DistInput::Exchangeable(g)) if !needs_families => {
            let pkg = match family {
                WitnessFamily::Scad => build_scad_witness(&f, &g)?,
                _ => build_private_witness(family, &f, &g)?,
            };
            let report = verify_witness(&pkg, WitnessInputs::Private { f: &f, g: &g })?;
            let bundle = witness_bundle_file(&pkg, f.space())?;
            let value = serde_json::json!({
                "bundle": bundle,
                "verification": verify_report_value(&pkg, &report, f.space()),
            });
            Ok(Outcome {
                code: if report.ok { 0 } else { 2 },
                output: to_json_string(&value),
            })
        }
        (DistInput::Family(f), DistInput::Family(g)) if needs_families => {
            let pkg = match family {
                WitnessFamily::Common => build_common_witness(&f, &g, None)?,
                _ => build_separable_witness(&f, &g, None)?,
            };
            let report = verify_witness(&pkg, WitnessInputs::Families { f: &f, g: &g })?;
            let bundle = witness_bundle_file(&pkg, f.space())?;
            let value = serde_json::json!({
                "bundle": bundle,
                "verification": verify_report_value(&pkg, &report, f.space()),
            });
            Ok(Outcome {
                code: if report.ok { 0 } else { 2 },
                output: to_json_string(&value),
            })
        }
        _ => Err(SimilError::Mismatch(if needs_families {
            "this witness family separates state families; pass two family files".into()
        } else {
            "this witness family separates plain distributions".into()
        })),
    }
}

fn cmd_verify(bundle_path: &Path, file_f: &Path, file_g: &Path) -> Result<Outcome, SimilError> {
    let Loaded { value: pkg, warnings } = parse_witness_bundle_str(&read_file(bundle_path)?)?;
    report_warnings(&warnings);
    let f = load_dist(file_f)?;
    let g = load_dist(file_g)?;
    let (report, value) = match (&f, &g) {
        (DistInput::Exchangeable(f), DistInput::Exchangeable(g)) => {
            let report = verify_witness(&pkg, WitnessInputs::Private { f, g })?;
            let value = verify_report_value(&pkg, &report, f.space());
            (report, value)
        }
        (DistInput::Family(f), DistInput::Family(g)) => {
            let report = verify_witness(&pkg, WitnessInputs::Families { f, g })?;
            let value = verify_report_value(&pkg, &report, f.space());
            (report, value)
        }
        _ => {
            return Err(SimilError::Mismatch(
                "verification needs two plain distributions or two families".into(),
            ))
        }
    };
    Ok(Outcome {
        code: if report.ok { 0 } else { 1 },
        output: to_json_string(&value),
    })
}

fn cmd_bankrun_sweep(epsilon: &str, p: &str, points: usize) -> Result<Outcome, SimilError> {
    let epsilon = parse_q(epsilon)?;
    let p = parse_q(p)?;
    let sweep = bank_run_sweep(&epsilon, &p, points)?;
    Ok(Outcome {
        code: 0,
        output: render::sweep_csv(&sweep, &epsilon, &p),
    })
}

fn run(cli: Cli) -> Result<Outcome, SimilError> {
    match &cli.command {
        Command::Check { order, file_f, file_g, statewise, out, format } => {
            let outcome = cmd_check(order, file_f, file_g, *statewise, format)?;
            emit(out, &outcome.output)?;
            Ok(Outcome { code: outcome.code, output: String::new() })
        }
        Command::Equilibria { game, dist, cutoffs, out, format } => {
            let outcome = cmd_equilibria(game, dist, *cutoffs, format)?;
            emit(out, &outcome.output)?;
            Ok(Outcome { code: outcome.code, output: String::new() })
        }
        Command::Witness { file_f, file_g, family, out } => {
            let outcome = cmd_witness(file_f, file_g, family)?;
            emit(out, &outcome.output)?;
            Ok(Outcome { code: outcome.code, output: String::new() })
        }
        Command::Verify { bundle, file_f, file_g, out } => {
            let outcome = cmd_verify(bundle, file_f, file_g)?;
            emit(out, &outcome.output)?;
            Ok(Outcome { code: outcome.code, output: String::new() })
        }
        Command::Demo { name, out } => {
            let outcome = demos::run(name)?;
            match outcome {
                demos::DemoOutcome::Pass(output) => {
                    emit(out, &output)?;
                    Ok(Outcome { code: 0, output: String::new() })
                }
                demos::DemoOutcome::Fail(diff) => {
                    eprintln!("demo {name} failed:\n{diff}");
                    Ok(Outcome { code: 1, output: String::new() })
                }
            }
        }
        Command::BankrunSweep { epsilon, p, points, out } => {
            let outcome = cmd_bankrun_sweep(epsilon, p, *points)?;
            emit(out, &outcome.output)?;
            Ok(Outcome { code: outcome.code, output: String::new() })
        }
        Command::Selftest { seed, cases, out } => {
            let (output, ok) = demos::selftest(*seed, *cases)?;
            emit(out, &output)?;
            Ok(Outcome { code: if ok { 0 } else { 1 }, output: String::new() })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => ExitCode::from(outcome.code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit(&e))
        }
    }
}
