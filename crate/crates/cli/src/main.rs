use std::io::{self, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use simseql_cli::fixtures::{self, DEFAULT_SEED};
use simseql_cli::{OutputMode, Session};

/// Runs SimSeQL scripts, or reads statements interactively.
#[derive(Debug, Parser)]
#[command(name = "simseql", version, about)]
struct Args {
    /// Script to run in batch mode; stops at the first error.
    #[arg(long, value_name = "PATH")]
    script: Option<PathBuf>,
    /// Directory relative file names resolve against (default: the
    /// script's directory).
    #[arg(long, value_name = "PATH")]
    data_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputMode::Table)]
    output: OutputMode,
    /// Print the plan before every query.
    #[arg(long)]
    explain_all: bool,
    /// Seed of the fixture generator.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the example data set and script to DIR, then exit.
    #[arg(long, value_name = "DIR")]
    generate_fixtures: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };

    if let Some(dir) = &args.generate_fixtures {
        return match fixtures::generate(dir, args.seed) {
            Ok(files) => {
                eprintln!("wrote {} files under {}", files.len(), dir.display());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        };
    }

    let mut session = Session::new();
    session.output = args.output;
    session.explain_all = args.explain_all;
    session.data_dir = args.data_dir;

    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut err = io::stderr();

    if let Some(path) = &args.script {
        if !path.is_file() {
            eprintln!("error: cannot read script {}", path.display());
            return ExitCode::from(1);
        }
        let outcome = session.run_script(path, &mut out, &mut err);
        let _ = out.flush();
        return match outcome {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        };
    }

    let stdin = io::stdin();
    if stdin.is_terminal() {
        session.repl(&mut stdin.lock(), &mut out, &mut err, true);
        let _ = writeln!(out);
        return ExitCode::SUCCESS;
    }
    // Piped input runs like a script.
    let mut text = String::new();
    if let Err(e) = io::Read::read_to_string(&mut stdin.lock(), &mut text) {
        eprintln!("error: cannot read standard input: {e}");
        return ExitCode::from(1);
    }
    let outcome = session.run_source(&text, "<stdin>", std::path::Path::new("."), &mut out, &mut err);
    let _ = out.flush();
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
