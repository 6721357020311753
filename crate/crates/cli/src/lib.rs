//! Command-line front end: parameter parsing, sweeps, CSV/JSON output and run
//! manifests.

pub mod args;
pub mod commands;
pub mod format;
pub mod output;

use std::io::Write;

use clap::Parser;

use args::{Cli, Command, OutputArgs};
use commands::{CliError, Report, EXIT_INTERNAL};
use output::{manifest_path, timestamp, write_manifest, write_payload, RunManifest};

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Spectrum(_) => "spectrum",
        Command::Sweep(_) => "sweep",
        Command::Converge(_) => "converge",
        Command::CompareRwa(_) => "compare-rwa",
        Command::Cat(_) => "cat",
        Command::Evolve(_) => "evolve",
    }
}

fn output_args(cmd: &Command) -> &OutputArgs {
    match cmd {
        Command::Spectrum(a) => &a.output,
        Command::Sweep(a) => &a.output,
        Command::Converge(a) => &a.output,
        Command::CompareRwa(a) => &a.output,
        Command::Cat(a) => &a.output,
        Command::Evolve(a) => &a.output,
    }
}

fn dispatch(cmd: &Command) -> Result<Report, CliError> {
    match cmd {
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Converge(a) => commands::converge(a),
        Command::CompareRwa(a) => commands::compare_rwa(a),
        Command::Cat(a) => commands::cat(a),
        Command::Evolve(a) => commands::evolve(a),
    }
}

fn io_error(e: std::io::Error) -> CliError {
    CliError {
        exit_code: EXIT_INTERNAL,
        message: e.to_string(),
    }
}

fn emit(cli: &Cli, argv: &[String], started_at: String, report: Report) -> Result<i32, CliError> {
    let Some(out) = &output_args(&cli.command).out else {
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(report.payload.as_bytes())
            .map_err(io_error)?;
        for (path, body) in &report.extra {
            write_payload(path, body).map_err(io_error)?;
        }
        return Ok(report.exit_code);
    };
    let mut outputs = vec![write_payload(out, &report.payload).map_err(io_error)?];
    for (path, body) in &report.extra {
        outputs.push(write_payload(path, body).map_err(io_error)?);
    }
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command_name(&cli.command).to_string(),
        arguments: argv.to_vec(),
        parameters: report.parameters,
        basis: report.basis,
        kernel: report.kernel,
        started_at,
        finished_at: timestamp(),
        exit_code: report.exit_code,
        all_converged: report
            .convergence
            .iter()
            .all(|p| p.converged.iter().all(|&c| c)),
        convergence: report.convergence,
        outputs,
    };
    write_manifest(out, &manifest).map_err(io_error)?;
    if report.exit_code != 0 {
        eprintln!(
            "warning: not every level converged; partial results written to {} (see {})",
            out.display(),
            manifest_path(out).display()
        );
    }
    Ok(report.exit_code)
}

/// Runs the tool on `argv` (program name first) and returns the exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let started_at = timestamp();
    let result = dispatch(&cli.command).and_then(|report| emit(&cli, &argv, started_at, report));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.exit_code
        }
    }
}
