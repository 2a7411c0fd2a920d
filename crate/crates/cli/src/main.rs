mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use hrsft::Exec;
use serde::Serialize;
use serde_json::json;

use args::{Cli, Command, Format, GlobalArgs};

pub enum CliError {
    Usage(String),
    Domain(hrsft::Error),
}

impl From<hrsft::Error> for CliError {
    fn from(e: hrsft::Error) -> Self {
        CliError::Domain(e)
    }
}

/// Everything needed to rerun a command; embedded in every result.
#[derive(Serialize)]
struct RunConfig<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    args: &'a Command,
    output: &'a GlobalArgs,
    argv: Vec<String>,
}

fn exec_for(threads: Option<usize>) -> Result<Exec, CliError> {
    match threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(1) => Ok(Exec::Sequential),
        #[cfg(feature = "parallel")]
        Some(t) => {
            // a second build in the same process fails harmlessly
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            Ok(Exec::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(Exec::Sequential),
        None => Ok(Exec::default()),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let config = serde_json::to_value(RunConfig {
        tool: "hrsft",
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name(),
        args: &cli.command,
        output: &cli.global,
        argv: argv[1..].to_vec(),
    })
    .expect("config serializes");

    let result = exec_for(cli.global.threads).and_then(|exec| {
        let ctx = commands::Ctx { global: &cli.global, exec, config: &config };
        commands::run(&cli.command, &ctx)
    });
    match result {
        Ok(outcome) => {
            let text = commands::render(&outcome, cli.global.format);
            if let Err(e) = output::emit(&text, cli.global.out.as_deref()) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(1);
            }
            if cli.global.format == Format::Csv && cli.command.name() == "search-gap" {
                eprintln!("{}", outcome.json["summary"]);
            }
            ExitCode::from(if outcome.ok { 0 } else { 1 })
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(CliError::Domain(e)) => {
            let body = output::document(&json!({"error": {"code": e.code(), "message": e.to_string()}}), &config);
            print!("{}", output::to_json_text(&body));
            eprintln!("error [{}]: {e}", e.code());
            ExitCode::from(1)
        }
    }
}
