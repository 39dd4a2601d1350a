use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{FaceFlux, Field, Grid};

use super::params::ModelParams;
use super::scheme::{self, StepDiagnostics};

/// Which unknowns carry the signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    /// Cell density and signal `(u, v)` with sensitivity `χ/v`.
    Uv,
    /// Cell density and log-depth `w = −log(v/‖v0‖∞)`.
    Uw,
}

impl Formulation {
    pub fn as_str(self) -> &'static str {
        match self {
            Formulation::Uv => "uv",
            Formulation::Uw => "uw",
        }
    }
}

/// Face drift velocities together with how many faces hit the sensitivity floor.
#[derive(Debug, Clone)]
pub struct Drift {
    pub velocity: FaceFlux,
    pub guard_faces: usize,
    /// Largest speed the explicit update must resolve.
    pub max_speed: f64,
}

/// Common surface of the two formulations, used by the driver and monitors.
pub trait SimState: Clone + Send + Sync + Sized {
    const FORMULATION: Formulation;

    fn t(&self) -> f64;
    fn u(&self) -> &Field;
    /// The signal `v`; reconstructed from `w` in the log formulation.
    fn signal(&self) -> Field;
    /// `w`, when the state carries it directly.
    fn log_depth(&self) -> Option<&Field>;
    fn v0_sup(&self) -> f64;
    fn set_time(&mut self, t: f64);
    fn drift(&self, params: &ModelParams) -> Drift;
    fn step_with(&self, params: &ModelParams, dt: f64, drift: &Drift) -> Result<(Self, StepDiagnostics)>;

    fn grid(&self) -> &Grid {
        self.u().grid()
    }

    fn step(&self, params: &ModelParams, dt: f64) -> Result<(Self, StepDiagnostics)> {
        let drift = self.drift(params);
        self.step_with(params, dt, &drift)
    }
}

fn check_density(u: &Field) -> Result<()> {
    u.check_finite("u")?;
    match u.values().iter().enumerate().find(|(_, &x)| x < 0.0) {
        Some((cell, &value)) => Err(Error::NegativeDensity { cell, value }),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateUV {
    pub u: Field,
    pub v: Field,
    pub t: f64,
    v0_sup: f64,
}

impl StateUV {
    /// Initial state; requires `u ≥ 0` and `v > 0` on the same grid.
    pub fn new(u: Field, v: Field) -> Result<Self> {
        Self::at_time(u, v, 0.0)
    }

    pub fn at_time(u: Field, v: Field, t: f64) -> Result<Self> {
        if u.grid() != v.grid() {
            return Err(Error::GridMismatch);
        }
        check_density(&u).map_err(|e| Error::InvalidInitialData(e.to_string()))?;
        v.check_finite("v")?;
        if let Some((cell, &val)) = v.values().iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
            return Err(Error::InvalidInitialData(format!(
                "signal must be strictly positive, found {val} at cell {cell}"
            )));
        }
        let v0_sup = v.max();
        Ok(StateUV { u, v, t, v0_sup })
    }

    pub(crate) fn from_parts(u: Field, v: Field, t: f64, v0_sup: f64) -> Self {
        StateUV { u, v, t, v0_sup }
    }

    pub fn to_uw(&self) -> StateUW {
        let w = self.v.map(|v| -(v / self.v0_sup).ln());
        StateUW { u: self.u.clone(), w, t: self.t, v0_sup: self.v0_sup }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateUW {
    pub u: Field,
    pub w: Field,
    pub t: f64,
    pub v0_sup: f64,
}

impl StateUW {
    pub fn new(u: Field, w: Field, v0_sup: f64) -> Result<Self> {
        if u.grid() != w.grid() {
            return Err(Error::GridMismatch);
        }
        check_density(&u).map_err(|e| Error::InvalidInitialData(e.to_string()))?;
        w.check_finite("w")?;
        if w.min() < 0.0 {
            return Err(Error::InvalidInitialData("log-depth w must be nonnegative".into()));
        }
        if !(v0_sup.is_finite() && v0_sup > 0.0) {
            return Err(Error::InvalidInitialData(format!("sup of v0 must be positive, got {v0_sup}")));
        }
        Ok(StateUW { u, w, t: 0.0, v0_sup })
    }

    /// `w0 = −log(v0/‖v0‖∞)` from signal data.
    pub fn from_signal(u: Field, v: Field) -> Result<Self> {
        Ok(StateUV::new(u, v)?.to_uw())
    }
}

/// `v = ‖v0‖∞ e^{−w}`.
pub fn reconstruct_v(s: &StateUW) -> Field {
    s.w.map(|w| s.v0_sup * (-w).exp())
}

/// Inverse of [`reconstruct_v`].
pub fn to_log_depth(v: &Field, v0_sup: f64) -> Field {
    v.map(|x| -(x / v0_sup).ln())
}

impl SimState for StateUV {
    const FORMULATION: Formulation = Formulation::Uv;

    fn t(&self) -> f64 {
        self.t
    }
    fn u(&self) -> &Field {
        &self.u
    }
    fn signal(&self) -> Field {
        self.v.clone()
    }
    fn log_depth(&self) -> Option<&Field> {
        None
    }
    fn v0_sup(&self) -> f64 {
        self.v0_sup
    }
    fn set_time(&mut self, t: f64) {
        self.t = t;
    }
    fn drift(&self, params: &ModelParams) -> Drift {
        scheme::drift_uv(&self.v, params)
    }
    fn step_with(&self, params: &ModelParams, dt: f64, drift: &Drift) -> Result<(Self, StepDiagnostics)> {
        scheme::step_uv_with(self, params, dt, drift)
    }
}

impl SimState for StateUW {
    const FORMULATION: Formulation = Formulation::Uw;

    fn t(&self) -> f64 {
        self.t
    }
    fn u(&self) -> &Field {
        &self.u
    }
    fn signal(&self) -> Field {
        reconstruct_v(self)
    }
    fn log_depth(&self) -> Option<&Field> {
        Some(&self.w)
    }
    fn v0_sup(&self) -> f64 {
        self.v0_sup
    }
    fn set_time(&mut self, t: f64) {
        self.t = t;
    }
    fn drift(&self, params: &ModelParams) -> Drift {
        scheme::drift_uw(&self.w, params)
    }
    fn step_with(&self, params: &ModelParams, dt: f64, drift: &Drift) -> Result<(Self, StepDiagnostics)> {
        scheme::step_uw_with(self, params, dt, drift)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reconstruct_examples() {
        let g = Grid::interval(1.0, 6).unwrap();
        let u = Field::zeros(g);
        let s = StateUW::new(u.clone(), Field::zeros(g), 3.0).unwrap();
        assert!(reconstruct_v(&s).values().iter().all(|&v| v == 3.0));

        let s = StateUW::new(u, Field::constant(g, 2f64.ln()), 3.0).unwrap();
        assert!(reconstruct_v(&s).values().iter().all(|&v| (v - 1.5).abs() < 1e-15));
    }

    #[test]
    fn log_depth_round_trip() {
        let g = Grid::interval(1.0, 16).unwrap();
        let w = Field::from_fn(g, |x| 3.0 * x[0] * x[0]).unwrap();
        let s = StateUW::new(Field::zeros(g), w.clone(), 0.7).unwrap();
        let back = to_log_depth(&reconstruct_v(&s), s.v0_sup);
        for (a, b) in back.values().iter().zip(w.values()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn initial_data_conditions() {
        let g = Grid::interval(1.0, 4).unwrap();
        let u = Field::constant(g, 1.0);
        let v = Field::new(g, vec![1.0, 0.0, 1.0, 1.0]).unwrap();
        assert!(matches!(StateUV::new(u.clone(), v), Err(Error::InvalidInitialData(_))));
        let neg = Field::new(g, vec![1.0, -1.0, 1.0, 1.0]).unwrap();
        assert!(StateUV::new(neg, Field::constant(g, 1.0)).is_err());
        let other = Grid::interval(2.0, 4).unwrap();
        assert!(matches!(StateUV::new(u, Field::constant(other, 1.0)), Err(Error::GridMismatch)));
    }

    #[test]
    fn uw_from_signal_is_nonnegative_with_zero_at_max() {
        let g = Grid::interval(1.0, 10).unwrap();
        let v = Field::from_fn(g, |x| 1.0 + 0.5 * (3.0 * x[0]).cos()).unwrap();
        let s = StateUW::from_signal(Field::zeros(g), v.clone()).unwrap();
        assert!(s.w.min() >= 0.0);
        assert_eq!(s.w.min(), 0.0);
        assert_eq!(s.v0_sup, v.max());
    }
}
