//! `quotient-mi` command-line front end.
//!
//! Exit status: 0 on success, 2 for invalid input (bad configuration,
//! arguments or grids), 3 when a numerical routine fails to converge or
//! produces inconsistent output. Failures print a JSON error record on
//! standard error.

mod args;
mod commands;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use quotient_mi::Error;
use serde::Serialize;

use args::{Cli, Command};
use commands::Artifact;

#[derive(Serialize)]
struct ErrorRecord<'a> {
    status: &'static str,
    command: &'a str,
    kind: &'a str,
    message: String,
    exit_code: u8,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Accuracy { .. } | Error::Bracket { .. } | Error::Consistency(_) => 3,
        _ => 2,
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Marginal(_) => "marginal",
        Command::Extremes { .. } => "extremes",
        Command::MiPdf { .. } => "mi-pdf",
        Command::Outage { .. } => "outage",
        Command::OutageRate { .. } => "outage-rate",
        Command::Moments(_) => "moments",
        Command::McCompare { .. } => "mc-compare",
        Command::Sweep(_) => "sweep",
    }
}

fn output_path(c: &Command) -> Option<&std::path::Path> {
    let out = match c {
        Command::Marginal(a) | Command::Extremes { curve: a, .. } => &a.common.output,
        Command::MiPdf { curve, .. }
        | Command::Outage { curve, .. }
        | Command::McCompare { curve, .. } => &curve.common.output,
        Command::OutageRate { common, .. } | Command::Moments(common) => &common.output,
        Command::Sweep(s) => &s.output,
    };
    out.output.as_deref()
}

fn run(command: &Command) -> quotient_mi::Result<Artifact> {
    match command {
        Command::Marginal(a) => commands::marginal(a),
        Command::Extremes { curve, kind } => commands::extremes(curve, *kind),
        Command::MiPdf { curve, method } => commands::mi_pdf(curve, method.method),
        Command::Outage {
            curve,
            method,
            rate,
        } => commands::outage(curve, method.method, *rate),
        Command::OutageRate {
            common,
            method,
            eps,
        } => commands::outage_rate_cmd(common, method.method, *eps),
        Command::Moments(common) => commands::moments_cmd(common),
        Command::McCompare {
            curve,
            quantity,
            method,
            band,
        } => commands::mc_compare(curve, *quantity, *method, *band),
        Command::Sweep(s) => commands::sweep(s),
    }
}

fn fail(command: &str, kind: &str, message: String, code: u8) -> ExitCode {
    let record = ErrorRecord {
        status: "error",
        command,
        kind,
        message,
        exit_code: code,
    };
    eprintln!(
        "{}",
        serde_json::to_string(&record).expect("error record serializes")
    );
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            e.exit()
        }
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => e.exit(),
        Err(e) => {
            let message = e.render().to_string();
            let first = message
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ");
            return fail("parse", "usage", first.to_string(), 2);
        }
    };
    let name = command_name(&cli.command);
    let start = Instant::now();
    let artifact = match run(&cli.command) {
        Ok(a) => a,
        Err(e) => return fail(name, e.kind(), e.to_string(), exit_code(&e)),
    };
    if let Err(e) = output::write_artifact(output_path(&cli.command), &artifact.text) {
        return fail(name, "io", e.to_string(), 2);
    }
    let cfg = artifact
        .cfg
        .map(|c| format!(" n={} nA={} nB={} a={} b={}", c.n, c.n_a, c.n_b, c.a, c.b))
        .unwrap_or_default();
    let note = artifact.note.map(|n| format!(" {n}")).unwrap_or_default();
    eprintln!(
        "{name}{cfg} method={} points={}{note} runtime={:.3}s",
        artifact.method,
        artifact.points,
        start.elapsed().as_secs_f64()
    );
    ExitCode::SUCCESS
}
