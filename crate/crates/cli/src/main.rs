use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use serde::Deserialize;

use qclab::{CheckReport, Error, Status, Summary, SuiteConfig};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "qclab", version, about = "Run numerical verification checks and write JSON reports")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every sampled quantity (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for JSON reports (and CSV tables with --csv).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write sweep tables as CSV; needs an output directory.
    #[arg(long, global = true)]
    csv: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one check.
    Run { check_id: String },
    /// Run every configured check.
    RunAll,
    /// List the registered checks.
    List,
}

/// `[output]` table of the config file; everything else is the suite config.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct OutputSettings {
    dir: Option<PathBuf>,
    csv: bool,
}

/// A failure that maps to the usage exit code.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn load_config(path: Option<&Path>) -> anyhow::Result<(SuiteConfig, OutputSettings)> {
    let Some(path) = path else {
        return Ok((SuiteConfig::default(), OutputSettings::default()));
    };
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut table: toml::Table =
        toml::from_str(&text).map_err(|e| usage(format!("invalid config: {e}")))?;
    let output = match table.remove("output") {
        Some(v) => v
            .try_into()
            .map_err(|e| usage(format!("invalid [output] table: {e}")))?,
        None => OutputSettings::default(),
    };
    let suite: SuiteConfig = toml::Value::Table(table)
        .try_into()
        .map_err(|e| usage(format!("invalid config: {e}")))?;
    Ok((suite, output))
}

fn classify(e: Error) -> anyhow::Error {
    match e {
        Error::UnknownCheck(_) | Error::Input(_) | Error::Domain(_) => usage(e.to_string()),
        other => anyhow::Error::new(other),
    }
}

struct Writer {
    dir: Option<PathBuf>,
    csv: bool,
}

impl Writer {
    fn report(&self, r: &CheckReport) -> anyhow::Result<()> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        let path = dir.join(format!("{}.json", r.check_id));
        fs::write(&path, r.to_json() + "\n").with_context(|| format!("writing {}", path.display()))?;
        if self.csv {
            for t in &r.tables {
                let path = dir.join(format!("{}_{}.csv", r.check_id, t.name));
                fs::write(&path, t.to_csv()).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Ok(())
    }

    fn summary(&self, s: &Summary) -> anyhow::Result<()> {
        if let Some(dir) = &self.dir {
            let path = dir.join("summary.json");
            fs::write(&path, serde_json::to_string_pretty(s)? + "\n")
                .with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(())
    }
}

fn status_line(r: &CheckReport) -> String {
    format!("{:<12} {} ({} ms)", r.status.to_string(), r.check_id, r.runtime_ms)
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let (mut cfg, output) = load_config(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let dir = cli.out.or(output.dir);
    let csv = cli.csv || output.csv;
    if csv && dir.is_none() {
        bail!(usage("--csv needs an output directory (--out or [output] dir)"));
    }
    if let Some(d) = &dir {
        fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
    }
    let writer = Writer { dir, csv };

    match cli.command {
        Command::List => {
            for c in qclab::list() {
                println!("{}\t{}", c.id, c.title);
            }
            Ok(0)
        }
        Command::Run { check_id } => {
            let r = qclab::run_check(&check_id, &cfg).map_err(classify)?;
            writer.report(&r)?;
            if writer.dir.is_some() {
                println!("{}", status_line(&r));
            } else {
                println!("{}", r.to_json());
            }
            Ok(if r.status == Status::Fail { EXIT_FAIL } else { 0 })
        }
        Command::RunAll => {
            let (summary, reports) = qclab::run_all(&cfg).map_err(classify)?;
            for r in &reports {
                writer.report(r)?;
                println!("{}", status_line(r));
            }
            writer.summary(&summary)?;
            println!(
                "{} checks: {} passed, {} failed, {} inconclusive",
                summary.total, summary.passed, summary.failed, summary.inconclusive
            );
            Ok(if summary.any_failed() { EXIT_FAIL } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_INTERNAL)
            }
        }
    }
}
