use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};

use super::commands::{
    cmd_check_exponents, cmd_compare_formulations, cmd_run, cmd_sweep, cmd_verify, ExitStatus,
};
use super::config::{RunConfig, SweepConfig};

#[derive(Debug, Parser)]
#[command(name = "chemotaxis", version, about = "Simulate and check the chemotaxis-consumption system")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Named preset used as the base configuration.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Output directory (default: `output.dir` from the config, else `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for perturbed initial data.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Print only errors.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate and check every monitor.
    Run,
    /// Run a parameter grid from a config with a `[sweep]` table.
    Sweep,
    /// Print the exponent calculus for given parameters.
    CheckExponents {
        #[arg(long)]
        chi: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        n: usize,
        /// Starting exponent of the bootstrap (default: the admissible p).
        #[arg(long)]
        p0: Option<f64>,
    },
    /// Refinement study of the gap between the two formulations.
    CompareFormulations,
    /// Check the canonical barrier orderings along a simulation.
    Verify {
        /// Restrict to the named barriers.
        #[arg(long = "barrier")]
        barriers: Vec<String>,
    },
}

fn env_with_seed(seed: Option<u64>) -> Vec<(String, String)> {
    let mut env: Vec<(String, String)> = std::env::vars().collect();
    if let Some(s) = seed {
        // the flag wins over any environment override
        env.retain(|(k, _)| k != "CHEMOTAXIS__SEED");
        env.push(("CHEMOTAXIS__SEED".into(), s.to_string()));
    }
    env
}

fn out_dir(cli: &Cli, cfg: &RunConfig) -> PathBuf {
    cli.out.clone().or_else(|| cfg.output.dir.as_ref().map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out"))
}

fn load_run(cli: &Cli) -> Result<RunConfig> {
    if cli.config.is_none() && cli.preset.is_none() {
        return Err(Error::Config("pass --config PATH or --preset NAME".into()));
    }
    RunConfig::load(cli.config.as_deref(), cli.preset.as_deref(), env_with_seed(cli.seed))
}

fn dispatch(cli: &Cli) -> Result<ExitStatus> {
    let say = |s: String| {
        if !cli.quiet {
            println!("{s}");
        }
    };
    match &cli.command {
        Command::Run => {
            let cfg = load_run(cli)?;
            let out = out_dir(cli, &cfg);
            say(format!("config_hash={}", cfg.hash()));
            let mut status = ExitStatus::Pass;
            for (summary, _) in cmd_run(&cfg, &out)? {
                say(format!(
                    "{}: {} steps to t = {}, status {:?}{}",
                    summary.formulation.as_str(),
                    summary.steps,
                    summary.t_final,
                    summary.status,
                    if summary.failures.is_empty() {
                        String::new()
                    } else {
                        format!(", failed: {}", summary.failures.join(", "))
                    }
                ));
                for f in &summary.files {
                    say(format!("  wrote {}", f.display()));
                }
                status = status.max(summary.status);
            }
            Ok(status)
        }
        Command::Sweep => {
            if cli.config.is_none() && cli.preset.is_none() {
                return Err(Error::Config("sweep needs --config PATH".into()));
            }
            let cfg = SweepConfig::load(cli.config.as_deref(), cli.preset.as_deref(), env_with_seed(cli.seed))?;
            let out = out_dir(cli, &cfg.base);
            let (rows, status) = cmd_sweep(&cfg, &out)?;
            say(format!("config_hash={}", cfg.hash()));
            say("chi,mu,kappa,gated,passed/total,blowup,final_u_inf,status".into());
            for r in rows {
                say(format!(
                    "{},{},{},{},{}/{},{},{:.6},{:?}",
                    r.chi,
                    r.mu,
                    r.kappa,
                    r.gated(),
                    r.monitors_passed,
                    r.monitors_total,
                    r.blowup,
                    r.final_u_inf,
                    r.status
                ));
            }
            Ok(status)
        }
        Command::CheckExponents { chi, mu, n, p0 } => {
            let report = cmd_check_exponents(*chi, *mu, *n, *p0)?;
            say(report.to_string().trim_end().to_string());
            if let Some(out) = &cli.out {
                std::fs::create_dir_all(out)?;
                std::fs::write(out.join("exponents.json"), serde_json::to_string_pretty(&report)? + "\n")?;
            }
            Ok(ExitStatus::Pass)
        }
        Command::CompareFormulations => {
            let cfg = load_run(cli)?;
            let out = out_dir(cli, &cfg);
            let table = cmd_compare_formulations(&cfg, Some(&out))?;
            say(format!("config_hash={}", cfg.hash()));
            say("cells,dt,v_discrepancy,u_discrepancy".into());
            for l in &table.levels {
                say(format!("{:?},{:e},{:e},{:e}", l.cells, l.dt, l.v_discrepancy, l.u_discrepancy));
            }
            say(format!("orders in dt: {:?}, monotone: {}", table.orders, table.monotone));
            Ok(ExitStatus::Pass)
        }
        Command::Verify { barriers } => {
            let mut cfg = load_run(cli)?;
            if !barriers.is_empty() {
                cfg.verify.barriers = Some(barriers.clone());
            }
            let out = out_dir(cli, &cfg);
            let (results, status) = cmd_verify(&cfg, &out)?;
            say(format!("config_hash={}", cfg.hash()));
            for r in results {
                let detail = match (&r.report, &r.error) {
                    (Some(rep), _) => format!("min gap {:e}", rep.min_gap),
                    (None, Some(e)) => e.clone(),
                    _ => String::new(),
                };
                say(format!(
                    "{} [{}]: {} ({detail})",
                    r.name,
                    r.formulation.as_str(),
                    if r.passed() { "pass" } else { "FAIL" }
                ));
            }
            Ok(status)
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitStatus::ConfigError.code() } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(status) => status.code(),
        Err(e) => {
            eprintln!("error: {e}");
            ExitStatus::for_error(&e).code()
        }
    }
}
