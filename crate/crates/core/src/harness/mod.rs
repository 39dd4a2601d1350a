//! Configuration, presets, output files and the command implementations
//! behind the `chemotaxis` binary.

mod cli;
mod commands;
mod config;
mod output;
pub mod presets;

pub use cli::{run_cli, Cli, Command};
pub use commands::{
    cmd_check_exponents, cmd_compare_formulations, cmd_run, cmd_sweep, cmd_verify, simulate, verify_outcomes,
    BarrierResult, ConvergenceLevel, ConvergenceTable, ExitStatus, ExponentReport, RunSummary, SweepRow,
};
pub use config::{
    apply_env_overrides, merge, CompareSpec, FormulationChoice, GridSpec, InitialSpec, ModelSpec, OutputSpec,
    Profile, RunConfig, SweepAxes, SweepConfig, SweepPoint, TimeSpec, VerifySpec, ENV_PREFIX,
};
pub use output::{read_field, write_field, write_series};
