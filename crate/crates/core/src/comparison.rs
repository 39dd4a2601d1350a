//! Ordering checks for sub/supersolution pairs of
//! `z_t = Δz + ∇·(b z) + f(x, t, z)` with no-flux boundaries.
//!
//! Orderings are verified on sampled data. The discrete defect of each
//! candidate is reported for information only: whether a candidate really is a
//! sub- or supersolution is for the caller to certify.

use std::sync::Arc;

use serde::Serialize;

use crate::dynamics::{drift_uv, drift_uw, Formulation, Trajectory};
use crate::error::{Error, Result};
use crate::grid::{laplacian_neumann, FaceFlux, Field, Grid};

pub type Reaction = Arc<dyn Fn(usize, usize, f64, f64) -> f64 + Send + Sync>;
pub type ClosedForm = Arc<dyn Fn(f64, [f64; 2]) -> f64 + Send + Sync>;

/// The equation a candidate pair is compared under.
#[derive(Clone)]
pub struct EvolutionProblem {
    pub grid: Grid,
    pub horizon: f64,
    /// Face velocities `b` per time sample; `None` means no drift. Boundary
    /// faces are zero by construction of [`FaceFlux`].
    pub drift: Option<Vec<FaceFlux>>,
    /// `f(cell, sample, t, z)`.
    pub reaction: Reaction,
    /// Lipschitz constant of `f` in `z` on the relevant range.
    pub lipschitz: f64,
}

impl std::fmt::Debug for EvolutionProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EvolutionProblem")
            .field("grid", &self.grid)
            .field("horizon", &self.horizon)
            .field("has_drift", &self.drift.is_some())
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl EvolutionProblem {
    /// `z_t = Δz` on `grid`.
    pub fn heat(grid: Grid, horizon: f64) -> Self {
        EvolutionProblem { grid, horizon, drift: None, reaction: Arc::new(|_, _, _, _| 0.0), lipschitz: 0.0 }
    }
}

#[derive(Clone)]
pub enum Candidate {
    /// One field per time sample.
    Sampled(Vec<Field>),
    /// `z(t, x)` evaluated at cell centres.
    ClosedForm(ClosedForm),
}

impl std::fmt::Debug for Candidate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Candidate::Sampled(v) => write!(f, "Sampled({} fields)", v.len()),
            Candidate::ClosedForm(_) => write!(f, "ClosedForm"),
        }
    }
}

impl Candidate {
    pub fn constant(c: f64) -> Self {
        Candidate::ClosedForm(Arc::new(move |_, _| c))
    }

    pub fn negated(&self) -> Self {
        match self {
            Candidate::Sampled(v) => Candidate::Sampled(v.iter().map(|f| f.map(|x| -x)).collect()),
            Candidate::ClosedForm(g) => {
                let g = g.clone();
                Candidate::ClosedForm(Arc::new(move |t, x| -g(t, x)))
            }
        }
    }

    fn materialize(&self, grid: &Grid, times: &[f64]) -> Result<Vec<Field>> {
        match self {
            Candidate::Sampled(fields) => {
                if fields.len() != times.len() {
                    return Err(Error::LengthMismatch { expected: times.len(), got: fields.len() });
                }
                if fields.iter().any(|f| f.grid() != grid) {
                    return Err(Error::GridMismatch);
                }
                Ok(fields.clone())
            }
            Candidate::ClosedForm(g) => times.iter().map(|&t| Field::from_fn(*grid, |x| g(t, x))).collect(),
        }
    }
}

/// Allowed negative gap at time `t`: `absolute + per_unit_time · t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderingTolerance {
    pub absolute: f64,
    pub per_unit_time: f64,
}

impl Default for OrderingTolerance {
    fn default() -> Self {
        OrderingTolerance { absolute: 1e-8, per_unit_time: 0.0 }
    }
}

impl OrderingTolerance {
    pub fn absolute(absolute: f64) -> Self {
        OrderingTolerance { absolute, per_unit_time: 0.0 }
    }

    pub fn at(&self, t: f64) -> f64 {
        self.absolute + self.per_unit_time * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub t: f64,
    pub cell: usize,
    /// `super − sub`, negative beyond tolerance.
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderingVerdict {
    Pass,
    Fail,
}

/// Signs of the discrete defect `z_t − Δz − ∇·(b z) − f` over all checked
/// samples; a subsolution expects `≤ 0`, a supersolution `≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefectSummary {
    pub min: f64,
    pub max: f64,
    pub nonpositive_fraction: f64,
    pub nonnegative_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingReport {
    pub min_gap: f64,
    pub min_gap_at: Violation,
    pub first_violation: Option<Violation>,
    pub tolerance: OrderingTolerance,
    pub samples: usize,
    pub verdict: OrderingVerdict,
    pub sub_defect: Option<DefectSummary>,
    pub super_defect: Option<DefectSummary>,
}

impl OrderingReport {
    pub fn passed(&self) -> bool {
        self.verdict == OrderingVerdict::Pass
    }
}

fn defect(problem: &EvolutionProblem, times: &[f64], z: &[Field]) -> Option<DefectSummary> {
    if times.len() < 2 {
        return None;
    }
    let scale = 1e-12;
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut nonpos, mut nonneg, mut count) = (0usize, 0usize, 0usize);
    for k in 1..times.len() {
        let dt = times[k] - times[k - 1];
        let lap = laplacian_neumann(&z[k]);
        let adv = problem.drift.as_ref().map(|b| {
            let flux = b[k].map_interior(|_, l, r, bv| bv * 0.5 * (z[k].values()[l] + z[k].values()[r]));
            crate::grid::divergence(&flux)
        });
        for cell in 0..z[k].values().len() {
            let zt = (z[k].values()[cell] - z[k - 1].values()[cell]) / dt;
            let a = adv.as_ref().map_or(0.0, |d| d.values()[cell]);
            let f = (problem.reaction)(cell, k, times[k], z[k].values()[cell]);
            let d = zt - lap.values()[cell] - a - f;
            min = min.min(d);
            max = max.max(d);
            let tiny = scale * (zt.abs() + lap.values()[cell].abs() + a.abs() + f.abs()).max(1.0);
            nonpos += usize::from(d <= tiny);
            nonneg += usize::from(d >= -tiny);
            count += 1;
        }
    }
    Some(DefectSummary {
        min,
        max,
        nonpositive_fraction: nonpos as f64 / count as f64,
        nonnegative_fraction: nonneg as f64 / count as f64,
    })
}

/// Checks `sub ≤ super` at every sample and cell.
///
/// The initial ordering is a hypothesis: its failure is an error, not a failed
/// verdict.
pub fn verify_ordering(
    problem: &EvolutionProblem,
    times: &[f64],
    sub: &Candidate,
    sup: &Candidate,
    tol: OrderingTolerance,
) -> Result<OrderingReport> {
    if times.is_empty() {
        return Err(Error::InvalidParams("no time samples".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || times[0] < 0.0 || *times.last().unwrap() > problem.horizon * (1.0 + 1e-12) {
        return Err(Error::InvalidParams("time samples must increase within [0, horizon]".into()));
    }
    if let Some(b) = &problem.drift {
        if b.len() != times.len() {
            return Err(Error::LengthMismatch { expected: times.len(), got: b.len() });
        }
        if b.iter().any(|f| f.grid() != &problem.grid) {
            return Err(Error::GridMismatch);
        }
    }
    let lo = sub.materialize(&problem.grid, times)?;
    let hi = sup.materialize(&problem.grid, times)?;

    let t0 = times[0];
    for (cell, (&a, &b)) in lo[0].values().iter().zip(hi[0].values()).enumerate() {
        if a - b > tol.at(t0) {
            return Err(Error::InitialOrdering { t: t0, cell, excess: a - b });
        }
    }

    let mut min_gap_at = Violation { t: t0, cell: 0, gap: f64::INFINITY };
    let mut first_violation = None;
    for (k, &t) in times.iter().enumerate() {
        for (cell, (&a, &b)) in lo[k].values().iter().zip(hi[k].values()).enumerate() {
            let gap = b - a;
            if gap < min_gap_at.gap {
                min_gap_at = Violation { t, cell, gap };
            }
            if first_violation.is_none() && gap < -tol.at(t) {
                first_violation = Some(Violation { t, cell, gap });
            }
        }
    }
    Ok(OrderingReport {
        min_gap: min_gap_at.gap,
        min_gap_at,
        first_violation,
        tolerance: tol,
        samples: times.len(),
        verdict: if first_violation.is_none() { OrderingVerdict::Pass } else { OrderingVerdict::Fail },
        sub_defect: defect(problem, times, &lo),
        super_defect: defect(problem, times, &hi),
    })
}

/// A named ordering with the equation it refers to.
#[derive(Debug, Clone)]
pub struct BarrierPair {
    pub name: &'static str,
    pub statement: &'static str,
    pub problem: EvolutionProblem,
    pub times: Vec<f64>,
    pub sub: Candidate,
    pub sup: Candidate,
}

impl BarrierPair {
    pub fn verify(&self, tol: OrderingTolerance) -> Result<OrderingReport> {
        verify_ordering(&self.problem, &self.times, &self.sub, &self.sup, tol)
    }
}

/// Running maximum of `‖u‖∞` over the step records up to each snapshot.
pub fn running_sup_u(traj: &Trajectory) -> Vec<f64> {
    let mut out = Vec::with_capacity(traj.snapshots.len());
    let mut c: f64 = 0.0;
    let mut k = 0;
    for s in &traj.snapshots {
        while k < traj.steps.len() && traj.steps[k].t <= s.t {
            c = c.max(traj.steps[k].u_max);
            k += 1;
        }
        out.push(c);
    }
    out
}

/// The three standard orderings along a computed trajectory:
/// `0 ≤ u`, `inf v0 · e^{−C t} ≤ v` and `v ≤ ‖v0‖∞`.
pub fn canonical_barriers(traj: &Trajectory) -> Vec<BarrierPair> {
    let grid = traj.grid;
    let params = traj.params;
    let times: Vec<f64> = traj.snapshots.iter().map(|s| s.t).collect();
    let horizon = *times.last().unwrap_or(&0.0);
    let u: Vec<Field> = traj.snapshots.iter().map(|s| s.u.clone()).collect();
    let v: Vec<Field> = traj.snapshots.iter().map(|s| s.v.clone()).collect();
    let sup_u = running_sup_u(traj);
    let c_final = sup_u.last().copied().unwrap_or(0.0);

    // u equation: u_t = Δu + ∇·(b u) + κu − μu^α with b = −(chemotactic velocity)
    let drift: Vec<FaceFlux> = traj
        .snapshots
        .iter()
        .map(|s| {
            let d = match (traj.formulation, &s.w) {
                (Formulation::Uw, Some(w)) => drift_uw(w, &params),
                _ => drift_uv(&s.v, &params),
            };
            d.velocity.map(|a| -a)
        })
        .collect();
    let u_problem = EvolutionProblem {
        grid,
        horizon,
        drift: Some(drift),
        reaction: Arc::new(move |_, _, _, z| params.source(z.max(0.0))),
        lipschitz: params.kappa + params.alpha * params.mu * c_final.powf(params.alpha - 1.0),
    };

    // v equation: v_t = Δv − u v, linear in v with coefficient bounded by C
    let u_samples = Arc::new(u.clone());
    let v_problem = EvolutionProblem {
        grid,
        horizon,
        drift: None,
        reaction: Arc::new(move |cell, k, _, z| -u_samples[k].values()[cell] * z),
        lipschitz: c_final,
    };

    let inf_v0 = traj.inf_v0;
    let lower: Vec<Field> =
        times.iter().zip(&sup_u).map(|(&t, &c)| Field::constant(grid, inf_v0 * (-c * t).exp())).collect();

    vec![
        BarrierPair {
            name: "u_nonnegative",
            statement: "0 <= u",
            problem: u_problem,
            times: times.clone(),
            sub: Candidate::constant(0.0),
            sup: Candidate::Sampled(u),
        },
        BarrierPair {
            name: "v_lower_exponential",
            statement: "inf v0 * exp(-C t) <= v, C = running sup of u",
            problem: v_problem.clone(),
            times: times.clone(),
            sub: Candidate::Sampled(lower),
            sup: Candidate::Sampled(v.clone()),
        },
        BarrierPair {
            name: "v_upper_constant",
            statement: "v <= sup v0",
            problem: v_problem,
            times,
            sub: Candidate::Sampled(v),
            sup: Candidate::constant(traj.v0_sup),
        },
    ]
}
