use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use higgs_hodge::bundle_file::load_bundle;
use higgs_hodge::certify::{certify, CertifyOptions};
use higgs_hodge::fixtures;
use higgs_hodge::harness::run_nilpotent_harness;

#[derive(Parser)]
#[command(
    version,
    about = "Checks curvature properties of Hodge metrics from Higgs bundles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check on a bundle file.
    Check {
        file: PathBuf,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = higgs_hodge::hodge::TOL_ABS)]
        tol_abs: f64,
        #[arg(long, default_value_t = higgs_hodge::hodge::TOL_REL)]
        tol_rel: f64,
        #[arg(long, value_enum, default_value = "text")]
        report: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-sample values as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Built-in bundles with known answers.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
    /// Random trials of the nilpotent trace-chain inequalities.
    NilpotentHarness {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        report: Format,
    },
}

#[derive(Subcommand)]
enum FixtureAction {
    List,
    Emit { name: String, path: PathBuf },
}

const INPUT_ERROR: u8 = 2;

fn fail_input(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(INPUT_ERROR)
}

fn write_or_print(text: &str, out: Option<&PathBuf>) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn list_fixtures() {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into());
    println!(
        "{:<22} {:>2} {:>2} {:>2}  {:<5} {:<10} {:>10} {:>10}  summary",
        "name", "m", "r", "k", "flat", "admissible", "hsc", "bound"
    );
    for f in fixtures::catalog() {
        let e = &f.expected;
        println!(
            "{:<22} {:>2} {:>2} {:>2}  {:<5} {:<10} {:>10} {:>10}  {}",
            f.name,
            e.base_dim,
            e.rank,
            e.nilpotency,
            e.flat,
            e.admissible,
            opt(e.hsc),
            opt(e.hsc_bound),
            f.summary
        );
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { INPUT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Check {
            file,
            samples,
            seed,
            tol_abs,
            tol_rel,
            report,
            out,
            csv,
        } => {
            let bundle = match load_bundle(&file) {
                Ok(b) => b,
                Err(e) => return fail_input(format!("{}: {e}", file.display())),
            };
            let options = CertifyOptions {
                samples,
                seed,
                tol_abs,
                tol_rel,
                ..CertifyOptions::default()
            };
            let rep = certify(&bundle, &options);
            let text = match report {
                Format::Json => rep.to_json(),
                Format::Text => rep.to_text(),
            };
            if let Err(e) = write_or_print(&text, out.as_ref()) {
                return fail_input(e);
            }
            if let Some(path) = csv {
                if let Err(e) = std::fs::write(path, rep.to_csv()) {
                    return fail_input(e);
                }
            }
            ExitCode::from(if rep.passed() { 0 } else { 1 })
        }
        Command::Fixtures { action } => match action {
            FixtureAction::List => {
                list_fixtures();
                ExitCode::SUCCESS
            }
            FixtureAction::Emit { name, path } => match fixtures::emit(&name, &path) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => fail_input(e),
            },
        },
        Command::NilpotentHarness {
            rank,
            trials,
            seed,
            report,
        } => match run_nilpotent_harness(rank, trials, seed) {
            Ok(rep) => {
                match report {
                    Format::Json => print!("{}", rep.to_json()),
                    Format::Text => print!("{}", rep.to_text()),
                }
                ExitCode::from(if rep.pass { 0 } else { 1 })
            }
            Err(e) => fail_input(e),
        },
    }
}
