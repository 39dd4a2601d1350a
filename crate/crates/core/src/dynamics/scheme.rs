//! Explicit positivity-preserving updates for both formulations.
//!
//! The density update is the same for both: central diffusion plus an upwinded
//! chemotactic flux in conservative form, then one Euler step of the source and
//! a projection onto `u ≥ 0`. The signal update differs:
//!
//! * `(u, v)`: `v* = v / (1 + dt u)` followed by one explicit diffusion step.
//!   Under the diffusion limit the second stage is a symmetric convex
//!   combination, so positivity, the sup bound and monotonicity of every
//!   `‖v‖_p` hold exactly.
//! * `(u, w)`: `w' = w + dt (Δw − |∇w|² + u)` with the squared gradient averaged
//!   from the two faces of each cell, clipped at zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{divergence, gradient_faces, laplacian_into, FaceFlux, Field};

use super::params::{sensitivity, ModelParams};
use super::state::{Drift, SimState, StateUV, StateUW};

/// Per-step record of what the stability guards saw.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    pub dt: f64,
    /// `dt · 2n / h²`; at most 1 within the limit.
    pub diffusion_number: f64,
    /// `dt · max|drift| / h`.
    pub advection_number: f64,
    /// `dt · (κ + μ max u^{α−1})`.
    pub source_number: f64,
    /// Mass added by projecting the density onto `u ≥ 0`.
    pub u_clip_mass: f64,
    /// Integral of the negative part removed from `w`.
    pub w_clip_mass: f64,
    /// Faces where the sensitivity floor was active.
    pub guard_faces: usize,
}

/// The three explicit step limits at a given state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityLimits {
    pub diffusion: f64,
    pub advection: f64,
    pub source: f64,
}

impl StabilityLimits {
    pub fn compute<S: SimState>(s: &S, params: &ModelParams, drift: &Drift) -> Self {
        let g = s.grid();
        let h = g.min_spacing();
        let diffusion = h * h / (2.0 * g.dim() as f64);
        let advection = if drift.max_speed > 0.0 { h / drift.max_speed } else { f64::INFINITY };
        let umax = s.u().max().max(0.0);
        let growth = params.kappa + params.mu * umax.powf(params.alpha - 1.0);
        let source = if growth > 0.0 { 1.0 / growth } else { f64::INFINITY };
        StabilityLimits { diffusion, advection, source }
    }

    pub fn min(&self) -> f64 {
        self.diffusion.min(self.advection).min(self.source)
    }

    pub fn binding(&self) -> &'static str {
        let m = self.min();
        if m == self.diffusion {
            "diffusion"
        } else if m == self.advection {
            "advection"
        } else {
            "source"
        }
    }

    fn check(&self, dt: f64) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("time step must be positive, got {dt}")));
        }
        let limit = self.min();
        if dt > limit * (1.0 + 1e-12) {
            return Err(Error::CflViolation { dt, limit, constraint: self.binding() });
        }
        Ok(())
    }
}

/// `safety · min(h²/(2n), h/max|drift|, 1/(κ + μ max u^{α−1}))`.
pub fn suggest_dt<S: SimState>(s: &S, params: &ModelParams, safety: f64) -> Result<f64> {
    if !(safety > 0.0 && safety <= 1.0) {
        return Err(Error::Domain(format!("safety factor must lie in (0, 1], got {safety}")));
    }
    let drift = s.drift(params);
    Ok(safety * StabilityLimits::compute(s, params, &drift).min())
}

/// Drift `S_η(v_face) · ∂v` with the harmonic mean of the two cells as face value.
pub fn drift_uv(v: &Field, params: &ModelParams) -> Drift {
    let g = *v.grid();
    let h = [g.spacing()[0], *g.spacing().get(1).unwrap_or(&1.0)];
    let vals = v.values();
    let mut guard_faces = 0;
    let velocity = FaceFlux::from_interior(g, |axis, l, r| {
        let (vl, vr) = (vals[l], vals[r]);
        let face = 2.0 * vl * vr / (vl + vr);
        if face < params.eta {
            guard_faces += 1;
        }
        sensitivity(face, params.chi, params.eta) * (vr - vl) / h[axis]
    });
    let max_speed = velocity.max_abs();
    Drift { velocity, guard_faces, max_speed }
}

/// Drift `−χ ∂w`. The squared-gradient term of the `w` equation moves
/// information at speed `|∂w|`, which also enters the advective limit.
pub fn drift_uw(w: &Field, params: &ModelParams) -> Drift {
    let grad = gradient_faces(w);
    let velocity = grad.map(|gw| -params.chi * gw);
    let max_speed = params.chi.max(1.0) * grad.max_abs();
    Drift { velocity, guard_faces: 0, max_speed }
}

/// Conservative upwind update of the density followed by the source and the
/// projection onto `u ≥ 0`. Returns the new values and the clipped mass.
pub(crate) fn update_density(
    u: &Field,
    velocity: &FaceFlux,
    source: impl Fn(f64) -> f64,
    dt: f64,
) -> (Vec<f64>, f64) {
    let g = *u.grid();
    let h = [g.spacing()[0], *g.spacing().get(1).unwrap_or(&1.0)];
    let uv = u.values();
    let flux = velocity.map_interior(|axis, l, r, a| {
        let diffusive = (uv[r] - uv[l]) / h[axis];
        let advective = if a > 0.0 { a * uv[l] } else { a * uv[r] };
        diffusive - advective
    });
    let div = divergence(&flux);
    let mut clipped = 0.0;
    let next = uv
        .iter()
        .zip(div.values())
        .map(|(&uc, &d)| {
            let x = uc + dt * (d + source(uc));
            if x < 0.0 {
                clipped -= x;
                0.0
            } else {
                x
            }
        })
        .collect();
    (next, clipped * g.cell_volume())
}

fn diagnostics<S: SimState>(s: &S, params: &ModelParams, dt: f64, drift: &Drift) -> StepDiagnostics {
    let g = s.grid();
    let h = g.min_spacing();
    let limits = StabilityLimits::compute(s, params, drift);
    StepDiagnostics {
        dt,
        diffusion_number: dt / limits.diffusion,
        advection_number: dt * drift.max_speed / h,
        source_number: if limits.source.is_finite() { dt / limits.source } else { 0.0 },
        u_clip_mass: 0.0,
        w_clip_mass: 0.0,
        guard_faces: drift.guard_faces,
    }
}

pub fn step_uv(s: &StateUV, params: &ModelParams, dt: f64) -> Result<(StateUV, StepDiagnostics)> {
    s.step(params, dt)
}

pub(crate) fn step_uv_with(
    s: &StateUV,
    params: &ModelParams,
    dt: f64,
    drift: &Drift,
) -> Result<(StateUV, StepDiagnostics)> {
    StabilityLimits::compute(s, params, drift).check(dt)?;
    let g = *s.u.grid();
    let mut diag = diagnostics(s, params, dt, drift);

    let (u_next, clip) = update_density(&s.u, &drift.velocity, |x| params.source(x), dt);
    diag.u_clip_mass = clip;

    let vstar: Vec<f64> =
        s.v.values().iter().zip(s.u.values()).map(|(&v, &u)| v / (1.0 + dt * u)).collect();
    let mut lap = vec![0.0; vstar.len()];
    laplacian_into(&g, &vstar, &mut lap);
    let v_next: Vec<f64> = vstar.iter().zip(&lap).map(|(&v, &l)| v + dt * l).collect();

    let u = Field::from_raw(g, u_next);
    let v = Field::from_raw(g, v_next);
    u.check_finite("u")?;
    v.check_finite("v")?;
    Ok((StateUV::from_parts(u, v, s.t + dt, s.v0_sup()), diag))
}

pub fn step_uw(s: &StateUW, params: &ModelParams, dt: f64) -> Result<(StateUW, StepDiagnostics)> {
    s.step(params, dt)
}

pub(crate) fn step_uw_with(
    s: &StateUW,
    params: &ModelParams,
    dt: f64,
    drift: &Drift,
) -> Result<(StateUW, StepDiagnostics)> {
    StabilityLimits::compute(s, params, drift).check(dt)?;
    let g = *s.u.grid();
    let mut diag = diagnostics(s, params, dt, drift);

    let (u_next, clip) = update_density(&s.u, &drift.velocity, |x| params.source(x), dt);
    diag.u_clip_mass = clip;

    let w = s.w.values();
    let mut sq = vec![0.0; w.len()];
    for (_, l, r, gw) in gradient_faces(&s.w).interior() {
        let half = 0.5 * gw * gw;
        sq[l] += half;
        sq[r] += half;
    }
    let mut lap = vec![0.0; w.len()];
    laplacian_into(&g, w, &mut lap);
    let mut clipped = 0.0;
    let w_next: Vec<f64> = (0..w.len())
        .map(|c| {
            let x = w[c] + dt * (lap[c] - sq[c] + s.u.values()[c]);
            if x < 0.0 {
                clipped -= x;
                0.0
            } else {
                x
            }
        })
        .collect();
    diag.w_clip_mass = clipped * g.cell_volume();

    let u = Field::from_raw(g, u_next);
    let w = Field::from_raw(g, w_next);
    u.check_finite("u")?;
    w.check_finite("w")?;
    Ok((StateUW { u, w, t: s.t + dt, v0_sup: s.v0_sup }, diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::state::reconstruct_v;
    use crate::grid::{integrate, Grid};

    fn params(chi: f64, kappa: f64, mu: f64) -> ModelParams {
        ModelParams { chi, kappa, mu, alpha: 2.0, eta: 1e-12 }
    }

    fn bump_state(g: Grid) -> StateUV {
        let u = Field::from_fn(g, |x| 0.5 + 2.0 * (-(x[0] - 0.4).powi(2) / 0.02).exp()).unwrap();
        let v = Field::from_fn(g, |x| 1.0 + 0.6 * (std::f64::consts::PI * x[0]).cos()).unwrap();
        StateUV::new(u, v).unwrap()
    }

    #[test]
    fn zero_density_is_pure_diffusion() {
        let g = Grid::interval(1.0, 32).unwrap();
        let p = params(1.0, 1.0, 1.0);
        let mut s = bump_state(g);
        s.u = Field::zeros(g);
        let vmax0 = s.v.max();
        for _ in 0..200 {
            let dt = suggest_dt(&s, &p, 0.5).unwrap();
            let (n, _) = step_uv(&s, &p, dt).unwrap();
            assert!(n.u.values().iter().all(|&x| x == 0.0));
            assert!(n.v.max() <= s.v.max());
            s = n;
        }
        assert!(s.v.max() < vmax0);
    }

    #[test]
    fn homogeneous_state_decays_exponentially() {
        let g = Grid::interval(1.0, 8).unwrap();
        let p = params(0.8, 1.0, 0.5);
        let c = p.kappa / p.mu;
        let mut s = StateUV::new(Field::constant(g, c), Field::constant(g, 1.0)).unwrap();
        let dt = 1e-3;
        for _ in 0..1000 {
            s = step_uv(&s, &p, dt).unwrap().0;
        }
        let exact = (-c * s.t).exp();
        for &v in s.v.values() {
            assert!(((v - exact) / exact).abs() < 2.0 * c * c * s.t * dt);
        }
        assert!(s.u.values().iter().all(|&u| u == c));
    }

    #[test]
    fn positivity_within_limit() {
        let g = Grid::rectangle(1.0, 1.0, 12, 10).unwrap();
        let p = params(2.0, 1.0, 0.1);
        let u = Field::from_fn(g, |x| 4.0 * (-((x[0] - 0.3).powi(2) + (x[1] - 0.6).powi(2)) / 0.01).exp())
            .unwrap();
        let v = Field::from_fn(g, |x| 0.05 + x[0] * x[1]).unwrap();
        let mut s = StateUV::new(u, v).unwrap();
        for _ in 0..100 {
            let dt = suggest_dt(&s, &p, 1.0).unwrap();
            let (n, _) = step_uv(&s, &p, dt).unwrap();
            assert!(n.u.min() >= 0.0);
            assert!(n.v.min() > 0.0);
            s = n;
        }
    }

    #[test]
    fn cfl_refusal() {
        let g = Grid::interval(1.0, 100).unwrap();
        let s = bump_state(g);
        let p = params(1.0, 1.0, 1.0);
        let dt = suggest_dt(&s, &p, 1.0).unwrap();
        assert!(matches!(step_uv(&s, &p, 2.0 * dt), Err(Error::CflViolation { .. })));
        assert!(suggest_dt(&s, &p, 1.5).is_err());
        assert!(suggest_dt(&s, &p, 0.0).is_err());
    }

    #[test]
    fn suggest_dt_examples() {
        let g = Grid::interval(1.0, 100).unwrap();
        let p = ModelParams { chi: 1.0, kappa: 0.0, mu: 1.0, alpha: 2.0, eta: 1e-12 };
        let s = StateUV::new(Field::zeros(g), Field::constant(g, 1.0)).unwrap();
        let dt = suggest_dt(&s, &p, 0.5).unwrap();
        assert!((dt - 0.5 * 5e-5).abs() < 1e-18);

        let g2 = Grid::interval(1.0, 200).unwrap();
        let s2 = StateUV::new(Field::zeros(g2), Field::constant(g2, 1.0)).unwrap();
        let dt2 = suggest_dt(&s2, &p, 0.5).unwrap();
        assert!((dt / dt2 - 4.0).abs() < 1e-12);

        // steep signal: advection binds
        let v = Field::from_fn(g, |x| (200.0 * x[0]).exp()).unwrap();
        let s3 = StateUV::new(Field::zeros(g), v).unwrap();
        let drift = s3.drift(&p);
        let lim = StabilityLimits::compute(&s3, &p, &drift);
        assert_eq!(lim.binding(), "advection");
        let dt3 = suggest_dt(&s3, &p, 0.5).unwrap();
        assert!((dt3 - 0.5 * 0.01 / drift.max_speed).abs() < 1e-15);
    }

    #[test]
    fn uw_equilibrium_and_homogeneous_growth() {
        let g = Grid::interval(1.0, 10).unwrap();
        let p = params(1.0, 1.0, 1.0);
        let s = StateUW::new(Field::zeros(g), Field::zeros(g), 1.0).unwrap();
        let (n, _) = step_uw(&s, &p, 1e-4).unwrap();
        assert_eq!(n.u, s.u);
        assert_eq!(n.w, s.w);

        let c = 0.7;
        let s = StateUW::new(Field::constant(g, c), Field::zeros(g), 1.0).unwrap();
        let dt = 1e-4;
        let (n, _) = step_uw(&s, &p, dt).unwrap();
        assert!(n.w.values().iter().all(|&w| (w - dt * c).abs() < 1e-16));
    }

    #[test]
    fn density_update_conserves_mass_without_source() {
        let g = Grid::rectangle(1.0, 2.0, 9, 7).unwrap();
        let u = Field::from_fn(g, |x| 1.0 + x[0] * x[1] * x[1]).unwrap();
        let v = Field::from_fn(g, |x| 1.0 + 0.5 * (x[0] * 3.0).sin() * x[1]).unwrap();
        let drift = drift_uv(&v, &params(0.9, 0.0, 1.0));
        let (next, clip) = update_density(&u, &drift.velocity, |_| 0.0, 1e-4);
        assert_eq!(clip, 0.0);
        let m0 = integrate(&u);
        let m1 = integrate(&Field::new(g, next).unwrap());
        assert!((m0 - m1).abs() < 1e-13 * m0);
    }

    #[test]
    fn one_step_formulations_agree() {
        let g = Grid::interval(1.0, 64).unwrap();
        let p = params(1.0, 1.0, 1.0);
        let s = bump_state(g);
        let sw = s.to_uw();
        let dt = 1e-5;
        let (a, _) = step_uv(&s, &p, dt).unwrap();
        let (b, _) = step_uw(&sw, &p, dt).unwrap();
        let vb = reconstruct_v(&b);
        let gap = a.v.values().iter().zip(vb.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        // the two discretizations differ by O(dt h²) per step
        let h = g.min_spacing();
        assert!(gap < 20.0 * dt * h * h, "gap {gap}");
        let ugap = a.u.values().iter().zip(b.u.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(ugap < 1e-6, "u gap {ugap}");
    }
}
