use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{self, BootstrapTrace, ExponentWindow, GateReport};
use crate::comparison::{canonical_barriers, OrderingReport, OrderingTolerance};
use crate::dynamics::{
    run, suggest_dt, Formulation, RunOutcome, RunSettings, StateUV, StateUW, Termination,
};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::monitors::MonitorConfig;

use super::config::{RunConfig, SweepConfig, SweepPoint};
use super::output::{create_csv, write_fields, write_json, write_series};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitStatus {
    Pass = 0,
    Other = 1,
    MonitorFailure = 2,
    BlowUp = 3,
    ConfigError = 4,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn for_error(e: &Error) -> Self {
        match e {
            Error::Config(_)
            | Error::InvalidParams(_)
            | Error::InvalidGrid(_)
            | Error::InvalidInitialData(_)
            | Error::CflViolation { .. } => ExitStatus::ConfigError,
            _ => ExitStatus::Other,
        }
    }

    fn for_outcome(o: &RunOutcome) -> Self {
        if o.report.blowup.flagged || matches!(o.termination, Termination::BlowUpSuspected { .. }) {
            ExitStatus::BlowUp
        } else if !o.report.passed {
            ExitStatus::MonitorFailure
        } else {
            ExitStatus::Pass
        }
    }
}

fn simulate_with(cfg: &RunConfig, grid: Grid, formulation: Formulation, settings: &RunSettings) -> Result<RunOutcome> {
    let (u, v) = cfg.initial_fields(&grid)?;
    let params = cfg.params(v.min())?;
    match formulation {
        Formulation::Uv => run(StateUV::new(u, v)?, &params, settings),
        Formulation::Uw => run(StateUW::from_signal(u, v)?, &params, settings),
    }
}

/// Runs one formulation of `cfg` with its configured monitors.
pub fn simulate(cfg: &RunConfig, formulation: Formulation) -> Result<RunOutcome> {
    simulate_with(cfg, cfg.build_grid()?, formulation, &cfg.run_settings())
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub formulation: Formulation,
    pub status: ExitStatus,
    pub steps: usize,
    pub t_final: f64,
    pub failures: Vec<String>,
    pub files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct RunDocument<'a> {
    formulation: Formulation,
    termination: &'a Termination,
    steps: usize,
    t_final: f64,
    energy_exponents: Option<(f64, f64)>,
    total_u_clip: f64,
    total_w_clip: f64,
    guard_activations: usize,
    report: &'a crate::monitors::MonitorReport,
}

fn stem(cfg: &RunConfig, formulation: Formulation) -> String {
    if cfg.model.formulation.formulations().len() > 1 {
        format!("{}_{}", cfg.output.name, formulation.as_str())
    } else {
        cfg.output.name.clone()
    }
}

/// Simulates every configured formulation and writes the series CSV, the
/// report JSON and, if requested, the field dumps.
pub fn cmd_run(cfg: &RunConfig, out: &Path) -> Result<Vec<(RunSummary, RunOutcome)>> {
    let hash = cfg.hash();
    let mut results = Vec::new();
    for f in cfg.model.formulation.formulations() {
        let outcome = simulate(cfg, f)?;
        let name = stem(cfg, f);
        let traj = &outcome.trajectory;
        let series = out.join(format!("{name}_series.csv"));
        write_series(&series, &hash, traj)?;
        let report = out.join(format!("{name}_report.json"));
        let doc = RunDocument {
            formulation: f,
            termination: &outcome.termination,
            steps: traj.steps.len() - 1,
            t_final: traj.last().t,
            energy_exponents: traj.energy_exponents,
            total_u_clip: traj.total_u_clip(),
            total_w_clip: traj.total_w_clip(),
            guard_activations: traj.guard_activations(),
            report: &outcome.report,
        };
        write_json(&report, &hash, &doc)?;
        let mut files = vec![series, report];
        if cfg.output.fields {
            files.push(write_fields(&out.join(format!("{name}_fields")), &hash, &outcome)?);
        }
        let summary = RunSummary {
            formulation: f,
            status: ExitStatus::for_outcome(&outcome),
            steps: doc.steps,
            t_final: doc.t_final,
            failures: outcome.report.failures().map(|e| e.name.clone()).collect(),
            files,
        };
        results.push((summary, outcome));
    }
    Ok(results)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub chi: f64,
    pub mu: f64,
    pub kappa: f64,
    pub chi_ok: bool,
    pub lemma58: bool,
    pub thm1_strict: bool,
    pub monitors_passed: usize,
    pub monitors_total: usize,
    pub blowup: bool,
    pub final_u_inf: f64,
    pub status: ExitStatus,
    pub error: String,
}

impl SweepRow {
    /// Inside the region where boundedness is proven.
    pub fn gated(&self) -> bool {
        self.chi_ok && self.lemma58
    }
}

fn sweep_one(base: &RunConfig, p: SweepPoint, dim: usize) -> SweepRow {
    let gate = analysis::theorem_gate(p.chi, p.mu, dim);
    let mut row = SweepRow {
        chi: p.chi,
        mu: p.mu,
        kappa: p.kappa,
        chi_ok: gate.chi_ok,
        lemma58: gate.lemma58,
        thm1_strict: gate.thm1_strict,
        monitors_passed: 0,
        monitors_total: 0,
        blowup: false,
        final_u_inf: f64::NAN,
        status: ExitStatus::Pass,
        error: String::new(),
    };
    let mut cfg = base.clone();
    cfg.model.chi = p.chi;
    cfg.model.mu = p.mu;
    cfg.model.kappa = p.kappa;
    for f in cfg.model.formulation.formulations() {
        match simulate(&cfg, f) {
            Ok(o) => {
                row.monitors_total += o.report.entries.len();
                row.monitors_passed += o.report.entries.iter().filter(|e| e.passed()).count();
                row.blowup |= o.report.blowup.flagged || matches!(o.termination, Termination::BlowUpSuspected { .. });
                row.final_u_inf = o.trajectory.last().u.max();
                row.status = row.status.max(ExitStatus::for_outcome(&o));
            }
            Err(e) => {
                row.status = row.status.max(ExitStatus::for_error(&e));
                row.error = e.to_string();
            }
        }
    }
    row
}

/// Runs the cartesian grid of parameters in parallel and writes one summary
/// row per point. Rows outside the proven region do not affect the status.
pub fn cmd_sweep(cfg: &SweepConfig, out: &Path) -> Result<(Vec<SweepRow>, ExitStatus)> {
    let points = cfg.points()?;
    let dim = cfg.base.grid.dim;
    let rows: Vec<SweepRow> = points.par_iter().map(|&p| sweep_one(&cfg.base, p, dim)).collect();
    let hash = cfg.hash();
    let mut w = create_csv(&out.join(format!("{}_sweep.csv", cfg.base.output.name)), &hash)?;
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    let status = rows.iter().filter(|r| r.gated()).map(|r| r.status).max().unwrap_or(ExitStatus::Pass);
    Ok((rows, status))
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentReport {
    pub gates: GateReport,
    pub pair: Option<(f64, f64)>,
    pub window: Option<ExponentWindow>,
    pub bootstrap: Option<BootstrapTrace>,
}

impl std::fmt::Display for ExponentReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let g = &self.gates;
        writeln!(f, "chi = {}, mu = {}, n = {}", g.chi, g.mu, g.n)?;
        writeln!(f, "chi < sqrt(2/n):      {}", g.chi_ok)?;
        writeln!(f, "mu > (n-2)/(2n):      {}", g.lemma58)?;
        writeln!(f, "mu > (n-2)/n:         {}", g.thm1_strict)?;
        if let Some(note) = &g.note {
            writeln!(f, "note: {note}")?;
        }
        match (self.pair, &self.window) {
            (Some((p, r)), Some(w)) => writeln!(
                f,
                "admissible (p, r) = ({p:.6}, {r:.6}); r window ({:.6}, {:.6}), r+ = {:.6}, mu p = {:.6}",
                w.r_minus,
                w.r_high(),
                w.r_plus,
                w.r_cap
            )?,
            _ => writeln!(f, "admissible (p, r): none")?,
        }
        if let Some(t) = &self.bootstrap {
            let mut s = String::new();
            for (k, p) in t.sequence.iter().enumerate() {
                if k > 0 {
                    s.push_str(" -> ");
                }
                let _ = write!(s, "{p}");
            }
            writeln!(f, "bootstrap: {s}")?;
        }
        Ok(())
    }
}

pub fn cmd_check_exponents(chi: f64, mu: f64, n: usize, p0: Option<f64>) -> Result<ExponentReport> {
    if !(chi > 0.0 && mu > 0.0) || n == 0 {
        return Err(Error::InvalidParams(format!("need chi > 0, mu > 0, n >= 1; got {chi}, {mu}, {n}")));
    }
    let gates = analysis::theorem_gate(chi, mu, n);
    let pair = analysis::admissible_pair(chi, mu, n);
    let window = pair.and_then(|(p, _)| ExponentWindow::new(p, chi, mu).ok());
    let bootstrap = match (p0, pair) {
        (Some(p0), _) => Some(analysis::bootstrap_sequence(p0, n)?),
        (None, Some((p, _))) => analysis::bootstrap_sequence(p, n).ok(),
        (None, None) => None,
    };
    Ok(ExponentReport { gates, pair, window, bootstrap })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceLevel {
    pub cells: Vec<usize>,
    pub dt: f64,
    pub v_discrepancy: f64,
    pub u_discrepancy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub t_end: f64,
    pub levels: Vec<ConvergenceLevel>,
    /// `log(e_k / e_{k+1}) / log 4`, the order in `dt`.
    pub orders: Vec<f64>,
    pub monotone: bool,
}

impl ConvergenceTable {
    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn refinement_cells(cfg: &RunConfig) -> Result<Vec<Vec<usize>>> {
    let levels = match &cfg.compare.cells {
        Some(list) => list.clone(),
        None => (0..cfg.compare.levels).map(|k| cfg.grid.cells.iter().map(|c| c << k).collect()).collect(),
    };
    if levels.len() < 2 {
        return Err(Error::Config("compare needs at least two levels".into()));
    }
    for (k, c) in levels.iter().enumerate() {
        if c.len() != cfg.grid.dim {
            return Err(Error::Config(format!("compare level {k} has {} axes, grid has {}", c.len(), cfg.grid.dim)));
        }
        if k > 0 && c.iter().zip(&levels[k - 1]).any(|(&a, &b)| a != 2 * b) {
            return Err(Error::Config(format!(
                "compare levels must halve h at every step; level {k} has {c:?} after {:?}",
                levels[k - 1]
            )));
        }
    }
    Ok(levels)
}

/// Runs both formulations at `h, h/2, h/4, …` with `dt, dt/4, dt/16, …` and
/// tabulates the sup-norm gap in `v` at the final time.
pub fn cmd_compare_formulations(cfg: &RunConfig, out: Option<&Path>) -> Result<ConvergenceTable> {
    let levels = refinement_cells(cfg)?;
    let grid_at = |cells: &[usize]| Grid::new(cfg.grid.dim, &cfg.grid.extents, cells);
    let coarse = grid_at(&levels[0])?;
    let dt0 = match cfg.time.dt {
        Some(dt) => dt,
        None => {
            let (u, v) = cfg.initial_fields(&coarse)?;
            let params = cfg.params(v.min())?;
            let safety = cfg.time.safety.min(1.0);
            let a = suggest_dt(&StateUV::new(u.clone(), v.clone())?, &params, safety)?;
            let b = suggest_dt(&StateUW::from_signal(u, v)?, &params, safety)?;
            a.min(b)
        }
    };
    let mut rows = Vec::new();
    for (k, cells) in levels.iter().enumerate() {
        let grid = grid_at(cells)?;
        let dt = dt0 / 4f64.powi(k as i32);
        let settings = RunSettings {
            t_end: cfg.time.t_end,
            snapshot_every: cfg.time.t_end,
            safety: cfg.time.safety,
            fixed_dt: Some(dt),
            max_steps: cfg.run_settings().max_steps,
            monitors: MonitorConfig { enabled: false, ..MonitorConfig::default() },
        };
        let a = simulate_with(cfg, grid, Formulation::Uv, &settings)?;
        let b = simulate_with(cfg, grid, Formulation::Uw, &settings)?;
        let (sa, sb) = (a.trajectory.last(), b.trajectory.last());
        let gap = |x: &crate::grid::Field, y: &crate::grid::Field| {
            x.values().iter().zip(y.values()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max)
        };
        rows.push(ConvergenceLevel {
            cells: cells.clone(),
            dt,
            v_discrepancy: gap(&sa.v, &sb.v),
            u_discrepancy: gap(&sa.u, &sb.u),
        });
    }
    let orders: Vec<f64> =
        rows.windows(2).map(|w| (w[0].v_discrepancy / w[1].v_discrepancy).ln() / 4f64.ln()).collect();
    let monotone = rows.windows(2).all(|w| w[1].v_discrepancy < w[0].v_discrepancy);
    let table = ConvergenceTable { t_end: cfg.time.t_end, levels: rows, orders, monotone };
    if let Some(out) = out {
        let mut w = create_csv(&out.join(format!("{}_compare.csv", cfg.output.name)), &cfg.hash())?;
        w.write_record(["level", "cells", "dt", "v_discrepancy", "u_discrepancy", "order"])?;
        for (k, l) in table.levels.iter().enumerate() {
            let order = if k == 0 { String::new() } else { format!("{:.4}", table.orders[k - 1]) };
            let cells = l.cells.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("x");
            w.write_record([
                k.to_string(),
                cells,
                format!("{:e}", l.dt),
                format!("{:e}", l.v_discrepancy),
                format!("{:e}", l.u_discrepancy),
                order,
            ])?;
        }
        w.flush()?;
    }
    Ok(table)
}

#[derive(Debug, Clone, Serialize)]
pub struct BarrierResult {
    pub name: String,
    pub statement: String,
    pub formulation: Formulation,
    pub report: Option<OrderingReport>,
    /// Set when the ordering hypothesis itself failed.
    pub error: Option<String>,
}

impl BarrierResult {
    pub fn passed(&self) -> bool {
        self.report.as_ref().is_some_and(OrderingReport::passed)
    }
}

/// Barrier checks along already computed runs.
pub fn verify_outcomes(cfg: &RunConfig, outcomes: &[(Formulation, &RunOutcome)]) -> Result<Vec<BarrierResult>> {
    let tol = OrderingTolerance { absolute: cfg.verify.tolerance, per_unit_time: cfg.verify.slack_per_time };
    let mut results = Vec::new();
    for &(f, outcome) in outcomes {
        let pairs = canonical_barriers(&outcome.trajectory);
        if let Some(sel) = &cfg.verify.barriers {
            if let Some(bad) = sel.iter().find(|s| !pairs.iter().any(|p| p.name == s.as_str())) {
                let known: Vec<&str> = pairs.iter().map(|p| p.name).collect();
                return Err(Error::Config(format!("unknown barrier '{bad}'; known: {}", known.join(", "))));
            }
        }
        for pair in pairs {
            if cfg.verify.barriers.as_ref().is_some_and(|sel| !sel.iter().any(|s| s == pair.name)) {
                continue;
            }
            let (report, error) = match pair.verify(tol) {
                Ok(r) => (Some(r), None),
                Err(e @ Error::InitialOrdering { .. }) => (None, Some(e.to_string())),
                Err(e) => return Err(e),
            };
            results.push(BarrierResult {
                name: pair.name.into(),
                statement: pair.statement.into(),
                formulation: f,
                report,
                error,
            });
        }
    }
    Ok(results)
}

/// Simulates, checks the canonical barrier pairs and writes one JSON report.
pub fn cmd_verify(cfg: &RunConfig, out: &Path) -> Result<(Vec<BarrierResult>, ExitStatus)> {
    let mut runs = Vec::new();
    for f in cfg.model.formulation.formulations() {
        runs.push((f, simulate(cfg, f)?));
    }
    let refs: Vec<(Formulation, &RunOutcome)> = runs.iter().map(|(f, o)| (*f, o)).collect();
    let results = verify_outcomes(cfg, &refs)?;
    write_json(
        &out.join(format!("{}_verify.json", cfg.output.name)),
        &cfg.hash(),
        &serde_json::json!({ "barriers": &results }),
    )?;
    let status = if results.iter().all(BarrierResult::passed) { ExitStatus::Pass } else { ExitStatus::MonitorFailure };
    Ok((results, status))
}
