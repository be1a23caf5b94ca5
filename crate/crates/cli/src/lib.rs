//! Command-line front end for `fullerlab-core`: problem files, analysis
//! reports and simulation output.
//!
//! Reports are deterministic given the configuration and seed, and each one
//! embeds the resolved [`config::RunConfig`]. The process exit code only
//! separates errors from success; verdicts live in the JSON.

pub mod analyze;
pub mod config;
pub mod format;
pub mod run;

use std::io::Write;

use anyhow::Context;
use clap::Parser;

use crate::config::{resolve, Cli, Command};
use crate::format::{write_json, FieldError};

/// Runs one command, writing its primary output to `stdout`.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> anyhow::Result<()> {
    let (config, sys) = resolve(cli)?;
    let need = |what| sys.as_ref().ok_or_else(|| FieldError::new("problem", format!("{what} needs a problem")));
    match &cli.command {
        Command::Analyze(_) => {
            let sys = need("analyze")?;
            let out = config.out.clone();
            let report = analyze::analyze(config, sys)?;
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                write_json(&dir.join("analysis.json"), &report)?;
            }
            serde_json::to_writer_pretty(&mut *stdout, &report)?;
            writeln!(stdout)?;
        }
        Command::Simulate(_) => {
            let sys = need("simulate")?;
            let line = run::cmd_simulate(config, sys)?;
            writeln!(stdout, "{line}")?;
        }
        Command::Chatter(_) => {
            let out = config.out.clone();
            let report = run::cmd_chatter(config, sys.as_ref())?;
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                write_json(&dir.join("chatter.json"), &report)?;
            }
            serde_json::to_writer_pretty(&mut *stdout, &report)?;
            writeln!(stdout)?;
        }
    }
    Ok(())
}

/// Error body printed to stderr: `{"error": {"field", "message"}}`.
pub fn error_json(e: &anyhow::Error) -> String {
    let (field, message) = match e.downcast_ref::<FieldError>() {
        Some(f) => (Some(f.field.clone()), f.message.clone()),
        None => (None, format!("{e:#}")),
    };
    serde_json::json!({ "error": { "field": field, "message": message } }).to_string()
}

/// Parses the process arguments and runs; returns the exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            1
        }
    }
}
