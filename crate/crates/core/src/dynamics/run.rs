use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{lp_power, Field, Grid};
use crate::monitors::{self, blowup_norm, detect_blowup, upvr_functional, MonitorConfig, MonitorReport};

use super::params::ModelParams;
use super::scheme::{StabilityLimits, StepDiagnostics};
use super::state::{Formulation, SimState};

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub u: Field,
    pub v: Field,
    /// Present for the log formulation.
    pub w: Option<Field>,
}

/// Scalar summary of one accepted step (index 0 is the initial state).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub u_mass: f64,
    pub v_min: f64,
    pub v_max: f64,
    /// `‖v‖_p^p` for each exponent in [`Trajectory::vp_exponents`].
    pub v_power_norms: Vec<f64>,
    pub energy: Option<f64>,
    pub blowup_norm: f64,
    pub diag: StepDiagnostics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub formulation: Formulation,
    pub grid: Grid,
    pub params: ModelParams,
    pub v0_sup: f64,
    pub inf_v0: f64,
    pub cadence: f64,
    pub snapshots: Vec<Snapshot>,
    pub steps: Vec<StepRecord>,
    pub vp_exponents: Vec<f64>,
    pub energy_exponents: Option<(f64, f64)>,
}

impl Trajectory {
    pub fn initial(&self) -> &Snapshot {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("trajectory has at least the initial snapshot")
    }

    pub fn total_u_clip(&self) -> f64 {
        self.steps.iter().map(|r| r.diag.u_clip_mass).sum()
    }

    pub fn total_w_clip(&self) -> f64 {
        self.steps.iter().map(|r| r.diag.w_clip_mass).sum()
    }

    pub fn guard_activations(&self) -> usize {
        self.steps.iter().map(|r| r.diag.guard_faces).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    /// Extensibility criterion suspected to fail; the run stopped early.
    BlowUpSuspected { t: f64, norm: f64, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSettings {
    pub t_end: f64,
    pub snapshot_every: f64,
    /// Fraction of the stability limit used for adaptive steps.
    pub safety: f64,
    /// Constant step overriding the adaptive choice.
    pub fixed_dt: Option<f64>,
    pub max_steps: usize,
    pub monitors: MonitorConfig,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            t_end: 1.0,
            snapshot_every: 0.05,
            safety: 0.2,
            fixed_dt: None,
            max_steps: 50_000_000,
            monitors: MonitorConfig::default(),
        }
    }
}

impl RunSettings {
    fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.snapshot_every > 0.0) {
            return Err(Error::Config("snapshot cadence must be positive".into()));
        }
        // Safety above one is allowed through so that the step guard reports it.
        if !(self.safety > 0.0) {
            return Err(Error::Config(format!("safety must be positive, got {}", self.safety)));
        }
        if let Some(dt) = self.fixed_dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::Config(format!("fixed dt must be positive, got {dt}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trajectory: Trajectory,
    pub report: MonitorReport,
    pub termination: Termination,
}

fn record<S: SimState>(s: &S, traj: &Trajectory, q: f64, diag: StepDiagnostics) -> StepRecord {
    let v = s.signal();
    let vol = s.grid().cell_volume();
    let u = s.u();
    StepRecord {
        t: s.t(),
        u_min: u.min(),
        u_max: u.max(),
        u_mass: u.values().iter().sum::<f64>() * vol,
        v_min: v.min(),
        v_max: v.max(),
        v_power_norms: traj.vp_exponents.iter().map(|&p| lp_power(v.values(), p, vol)).collect(),
        energy: traj
            .energy_exponents
            .map(|(p, r)| upvr_functional(u, &v, s.log_depth(), s.v0_sup(), p, r)),
        blowup_norm: blowup_norm(u, &v, q),
        diag,
    }
}

fn snapshot<S: SimState>(s: &S) -> Snapshot {
    Snapshot { t: s.t(), u: s.u().clone(), v: s.signal(), w: s.log_depth().cloned() }
}

/// Integrates to `t_end`, landing exactly on every snapshot time, and attaches
/// the monitor report. A suspected blow-up ends the run with a verdict rather
/// than an error.
pub fn run<S: SimState>(initial: S, params: &ModelParams, settings: &RunSettings) -> Result<RunOutcome> {
    settings.validate()?;
    params.validate()?;
    let grid = *initial.grid();
    let v0 = initial.signal();
    if initial.u().min() < 0.0 || !(v0.min() > 0.0) {
        return Err(Error::InvalidInitialData("need u0 >= 0 and v0 > 0".into()));
    }
    let mcfg = &settings.monitors;
    let q = mcfg.blowup.q.unwrap_or(grid.dim() as f64 + 1.0);
    let mut traj = Trajectory {
        formulation: S::FORMULATION,
        grid,
        params: *params,
        v0_sup: initial.v0_sup(),
        inf_v0: v0.min(),
        cadence: settings.snapshot_every,
        snapshots: vec![snapshot(&initial)],
        steps: Vec::new(),
        vp_exponents: mcfg.vp_exponents.clone(),
        energy_exponents: if mcfg.enabled { mcfg.energy_exponents(params, grid.dim()) } else { None },
    };
    let first = record(&initial, &traj, q, StepDiagnostics::default());
    let mut snapshot_norms = vec![(first.t, first.blowup_norm)];
    traj.steps.push(first);

    let cadence = settings.snapshot_every;
    let mut next_index = 1usize;
    let mut termination = Termination::Completed;
    let mut state = initial;
    let t_end = settings.t_end;
    let eps = 1e-9 * cadence.min(t_end);

    while state.t() < t_end - eps {
        if traj.steps.len() > settings.max_steps {
            return Err(Error::Config(format!("step budget of {} exhausted", settings.max_steps)));
        }
        let drift = state.drift(params);
        let mut dt = match settings.fixed_dt {
            Some(dt) => dt,
            None => settings.safety * StabilityLimits::compute(&state, params, &drift).min(),
        };
        let target = (next_index as f64 * cadence).min(t_end);
        let remaining = target - state.t();
        let lands = dt >= remaining - eps;
        if lands {
            dt = remaining;
        }
        let (mut next, diag) = state.step_with(params, dt, &drift)?;
        if lands {
            next.set_time(target);
        }
        let rec = record(&next, &traj, q, diag);
        let norm = rec.blowup_norm;
        traj.steps.push(rec);

        if norm > mcfg.blowup.ceiling {
            traj.snapshots.push(snapshot(&next));
            termination = Termination::BlowUpSuspected {
                t: next.t(),
                norm,
                reason: format!("norm exceeded the ceiling {:e}", mcfg.blowup.ceiling),
            };
            break;
        }
        if lands && (target - next_index as f64 * cadence).abs() <= eps {
            traj.snapshots.push(snapshot(&next));
            snapshot_norms.push((next.t(), norm));
            next_index += 1;
            if let Some(flag) = detect_blowup(&snapshot_norms, &mcfg.blowup) {
                termination = Termination::BlowUpSuspected { t: flag.t, norm, reason: flag.reason };
                break;
            }
        } else if lands {
            // final partial interval
            traj.snapshots.push(snapshot(&next));
            snapshot_norms.push((next.t(), norm));
        }
        state = next;
    }

    let report = monitors::evaluate(&traj, params, mcfg)?;
    Ok(RunOutcome { trajectory: traj, report, termination })
}
