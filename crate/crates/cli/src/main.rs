mod args;
mod commands;
mod config;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::{FileConfig, ReduceParams, SelftestParams, SpectrumParams, VerifyParams};
use error::CliError;

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let out = cli.out_dir.clone().unwrap_or_else(|| PathBuf::from("gburgers-out"));
    std::fs::create_dir_all(&out)?;

    let outcome = match &cli.command {
        Command::Reduce(a) => commands::reduce(&ReduceParams::resolve(a, &file), &out)?,
        Command::Verify(a) => commands::verify(&VerifyParams::resolve(a, &file), &out)?,
        Command::Spectrum(a) => commands::spectrum_table(&SpectrumParams::resolve(a, &file), &out)?,
        Command::Selftest(a) => {
            let (mut o, ok) = commands::run_selftest(&SelftestParams::resolve(a, &file), &out)?;
            print!("{}", o.stdout);
            o.manifest.write(&out)?;
            if !ok {
                return Err(CliError::Numerical("selftest failed".into()));
            }
            return Ok(());
        }
        Command::Replay(a) => {
            let mut m = manifest::RunManifest::new("replay", serde_json::json!({ "manifest": a.manifest }));
            let (text, mismatched, target) = commands::replay(&a.manifest)?;
            print!("{text}");
            m.outputs = mismatched.clone();
            m.write(&target)?;
            if !mismatched.is_empty() {
                return Err(CliError::Numerical(format!("replay differs in {}", mismatched.join(", "))));
            }
            return Ok(());
        }
    };
    print!("{}", outcome.stdout);
    let mut m = outcome.manifest;
    m.write(&out)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
