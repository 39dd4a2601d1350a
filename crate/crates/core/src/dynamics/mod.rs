//! Time integration of the singular `(u, v)` system and its log transform `(u, w)`.

mod params;
mod run;
mod scheme;
mod state;

pub use params::{regularized_sensitivity, sensitivity, source_term, ModelParams, DEFAULT_ETA_FACTOR};
pub use run::{run, RunOutcome, RunSettings, Snapshot, StepRecord, Termination, Trajectory};
pub use scheme::{drift_uv, drift_uw, step_uv, step_uw, suggest_dt, StabilityLimits, StepDiagnostics};
pub use state::{reconstruct_v, to_log_depth, Drift, Formulation, SimState, StateUV, StateUW};
