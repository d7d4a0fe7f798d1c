//! Command-line front end: configuration, presets, CSV output and manifest.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod selftest;

use serde_json::json;

use args::{Cli, Command};
use commands::Context;
use error::CliError;
use output::{checks_json, timestamp, write_outputs, Report};

fn print_checks(report: &Report) {
    for c in &report.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let env_out = std::env::var(config::OUT_ENV).ok();
    let cfg = config::resolve(cli.common.config.as_deref(), env_out, &cli.flag_values())?;
    if let Command::Selftest = cli.command {
        let report = selftest::selftest();
        print_checks(&report);
        return match report.failed().len() {
            0 => Ok(()),
            n => Err(CliError::SelfTest(n)),
        };
    }
    let ctx = Context::new(cfg)?;
    let report = match &cli.command {
        Command::Kernel { .. } => commands::kernel(&ctx)?,
        Command::Evolve => commands::evolve_cmd(&ctx)?,
        Command::Scatter { .. } => commands::scatter(&ctx)?,
        Command::BcCheck => commands::bc_check(&ctx)?,
        Command::Decay => commands::decay(&ctx)?,
        Command::Figure { name } => figures::figure(&ctx, *name)?,
        Command::Selftest => unreachable!(),
    };
    let mut parameters = ctx.manifest_parameters(cli.command.name());
    if let Command::Figure { name } = &cli.command {
        parameters["figure"] = json!(name.name());
    }
    let manifest = json!({
        "timestamp": timestamp(),
        "version": env!("CARGO_PKG_VERSION"),
        "parameters": parameters,
        "diagnostics": report.diagnostics,
        "checks": checks_json(&report),
        "files": report.files.iter().map(|(n, _)| n).collect::<Vec<_>>(),
    });
    write_outputs(&ctx.cfg.out, &report, manifest)?;
    for (name, _) in &report.files {
        println!("wrote {}", ctx.cfg.out.join(name).display());
    }
    print_checks(&report);
    let failed = report.failed();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(failed.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join(", ")))
    }
}
