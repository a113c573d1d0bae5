//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_count, parse_grid, Experiment, ExperimentConfig, Overrides};
use crate::error::{AppError, Result};
use crate::experiments;
use crate::report::{RunOutput, TestRecord, Verdict};

#[derive(Debug, Parser)]
#[command(name = "shotnoise", version, about = "Renewal shot noise and extremal process experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Run one experiment and write report.json plus sample CSVs.
    Run(RunArgs),
    /// List the available experiments.
    List,
    /// Show an experiment's purpose and default configuration.
    Describe { name: String },
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub experiment: Option<String>,
    /// Scale in L units (the argument of L^<-).
    #[arg(long, allow_negative_numbers = true)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub replicas: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated increasing levels, e.g. 0.5,1,2.
    #[arg(long = "u", allow_negative_numbers = true)]
    pub u: Option<String>,
    /// Index of the shot shape h = L^alpha.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// logpow:<beta>, loglog or repr:<path>.
    #[arg(long = "L")]
    pub l_spec: Option<String>,
    /// Output directory [default: out/<experiment>].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads [default: available parallelism].
    #[arg(long)]
    pub threads: Option<usize>,
    /// key=value file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Tolerance override, e.g. --tol d_renewal=0.04 (repeatable).
    #[arg(long = "tol", value_name = "KEY=VALUE")]
    pub tol: Vec<String>,
    /// Distance kept from u by the uniformity y-grid.
    #[arg(long, allow_negative_numbers = true)]
    pub margin: Option<f64>,
}

impl RunArgs {
    fn overrides(&self) -> Result<Overrides> {
        let tolerances = self
            .tol
            .iter()
            .map(|kv| {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| AppError::config(format!("--tol expects KEY=VALUE, got '{kv}'")))?;
                let v: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| AppError::config(format!("--tol {k}: invalid number '{v}'")))?;
                Ok((k.trim().to_string(), v))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Overrides {
            experiment: self.experiment.clone(),
            l_spec: self.l_spec.clone(),
            alpha: self.alpha,
            tau: self.tau,
            u_grid: self.u.as_deref().map(parse_grid).transpose()?,
            replicas: self.replicas.as_deref().map(|r| parse_count("replicas", r)).transpose()?,
            seed: self.seed,
            margin: self.margin,
            out: self.out.clone(),
            threads: self.threads,
            tolerances,
        })
    }

    /// Config file entries overlaid by flags.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let flags = self.overrides()?;
        let base = match &self.config {
            Some(path) => Overrides::from_file(path)?,
            None => Overrides::default(),
        };
        base.overlay(flags).resolve()
    }
}

fn test_line(t: &TestRecord) -> String {
    let status = match (t.mandatory, t.passed) {
        (false, _) => "info",
        (true, true) => "PASS",
        (true, false) => "FAIL",
    };
    let p = t.p_value.map(|p| format!(" p={p:.4e}")).unwrap_or_default();
    format!("{status:4}  {}: statistic={:.6e}{p} threshold={:e}", t.name, t.statistic, t.threshold)
}

/// Runs the experiment, writes its artifacts and prints a summary.
pub fn run_command(args: &RunArgs, stdout: &mut dyn Write) -> Result<RunOutput> {
    let cfg = args.resolve()?;
    let dir = cfg
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(cfg.experiment.name()));
    let output = experiments::run(&cfg)?;
    output.write_to(&dir)?;
    let report = &output.report;
    let mut lines = vec![format!(
        "{} (L = {}, tau = {}, replicas = {}, seed = {})",
        cfg.experiment, report.body.l_family, cfg.tau, cfg.replicas, cfg.seed
    )];
    lines.extend(report.body.tests.iter().map(test_line));
    let verdict = match report.body.verdict {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Demo => "demo (structural checks passed)",
    };
    lines.push(format!(
        "verdict: {verdict}  [{:.2} s, report in {}]",
        report.wall_clock_seconds,
        dir.display()
    ));
    for line in lines {
        writeln!(stdout, "{line}").map_err(|e| AppError::io("<stdout>", e))?;
    }
    Ok(output)
}

fn describe(name: &str, stdout: &mut dyn Write) -> Result<()> {
    let e = Experiment::from_name(name)?;
    let cfg = ExperimentConfig::defaults(e);
    let grid: Vec<String> = cfg.u_grid.iter().map(|u| u.to_string()).collect();
    let text = format!(
        "{e}: {}\n\ndefaults:\n  L = {}\n  alpha = {}\n  tau = {}\n  u = {}\n  replicas = {}\n  seed = {}\n  margin = {}\n",
        e.summary(),
        cfg.l_spec,
        cfg.alpha,
        cfg.tau,
        grid.join(","),
        cfg.replicas,
        cfg.seed,
        cfg.margin
    );
    stdout.write_all(text.as_bytes()).map_err(|e| AppError::io("<stdout>", e))
}

/// Parses `argv` and runs it; returns the process exit code.
pub fn main_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::List => Experiment::ALL
            .iter()
            .try_for_each(|e| {
                writeln!(stdout, "{:16} {}", e.name(), e.summary()).map_err(|err| AppError::io("<stdout>", err))
            })
            .map(|()| 0),
        Command::Describe { name } => describe(name, stdout).map(|()| 0),
        Command::Run(args) => run_command(args, stdout).map(|o| if o.report.passed() { 0 } else { 1 }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
