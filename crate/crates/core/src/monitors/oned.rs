use serde::Serialize;

use crate::dynamics::{to_log_depth, Trajectory};
use crate::error::{Error, Result};
use crate::grid::{gradient_faces, laplacian_neumann, lp_power, Field};

use super::{upper_violation, window_integrals, MonitorEntry, SeriesPoint};

/// The quantities whose uniform-in-time boundedness is known in one dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneDSeries {
    pub t: Vec<f64>,
    pub wx_l2: Vec<f64>,
    pub wxx_sq_window: Vec<f64>,
    pub wx6_window: Vec<f64>,
    pub u_l2: Vec<f64>,
    pub ux_sq_window: Vec<f64>,
    pub u6_window: Vec<f64>,
    pub wx4: Vec<f64>,
    pub u_inf: Vec<f64>,
}

impl OneDSeries {
    /// `(name, values)` for the seven bounded quantities followed by `‖u‖∞`.
    pub fn named(&self) -> [(&'static str, &[f64]); 8] {
        [
            ("wx_l2", &self.wx_l2),
            ("wxx_sq_window", &self.wxx_sq_window),
            ("wx6_window", &self.wx6_window),
            ("u_l2", &self.u_l2),
            ("ux_sq_window", &self.ux_sq_window),
            ("u6_window", &self.u6_window),
            ("wx4", &self.wx4),
            ("u_inf", &self.u_inf),
        ]
    }
}

fn face_power(f: &Field, p: f64) -> f64 {
    let g = gradient_faces(f);
    lp_power(g.axis(0), p, f.grid().cell_volume())
}

/// Width of the sliding time windows.
pub const WINDOW: f64 = 1.0;

pub fn oned_series(traj: &Trajectory) -> Result<OneDSeries> {
    if traj.grid.dim() != 1 {
        return Err(Error::Domain(format!("one-dimensional suite needs dim = 1, got {}", traj.grid.dim())));
    }
    let vol = traj.grid.cell_volume();
    let n = traj.snapshots.len();
    let mut s = OneDSeries {
        t: Vec::with_capacity(n),
        wx_l2: Vec::with_capacity(n),
        wxx_sq_window: Vec::new(),
        wx6_window: Vec::new(),
        u_l2: Vec::with_capacity(n),
        ux_sq_window: Vec::new(),
        u6_window: Vec::new(),
        wx4: Vec::with_capacity(n),
        u_inf: Vec::with_capacity(n),
    };
    let (mut wxx2, mut wx6, mut ux2, mut u6) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for snap in &traj.snapshots {
        let w = match &snap.w {
            Some(w) => w.clone(),
            None => to_log_depth(&snap.v, traj.v0_sup),
        };
        s.t.push(snap.t);
        s.wx_l2.push(face_power(&w, 2.0).sqrt());
        wxx2.push(lp_power(laplacian_neumann(&w).values(), 2.0, vol));
        wx6.push(face_power(&w, 6.0));
        s.u_l2.push(lp_power(snap.u.values(), 2.0, vol).sqrt());
        ux2.push(face_power(&snap.u, 2.0));
        u6.push(lp_power(snap.u.values(), 6.0, vol));
        s.wx4.push(face_power(&w, 4.0));
        s.u_inf.push(snap.u.max());
    }
    s.wxx_sq_window = window_integrals(&s.t, &wxx2, WINDOW);
    s.wx6_window = window_integrals(&s.t, &wx6, WINDOW);
    s.ux_sq_window = window_integrals(&s.t, &ux2, WINDOW);
    s.u6_window = window_integrals(&s.t, &u6, WINDOW);
    Ok(s)
}

/// Relative excess of the second-half maximum over the first-half maximum.
pub(crate) fn trend_growth(t: &[f64], values: &[f64]) -> (f64, f64, f64) {
    let half = 0.5 * (t[0] + t[t.len() - 1]);
    let mut first = f64::NEG_INFINITY;
    let mut second = f64::NEG_INFINITY;
    for (&tk, &v) in t.iter().zip(values) {
        if tk <= half {
            first = first.max(v);
        }
        if tk >= half {
            second = second.max(v);
        }
    }
    (upper_violation(second, first), first, second)
}

/// Trend tests on every series: bounded quantities must not keep growing.
pub fn oned_suite(traj: &Trajectory, growth_tol: f64) -> Result<Vec<MonitorEntry>> {
    let s = oned_series(traj)?;
    let mut out = Vec::new();
    let t0 = s.t[0];
    // a window integral grows while its window is still filling, so compare full windows only
    let full = s.t.iter().position(|&t| t >= t0 + WINDOW * (1.0 - 1e-9)).unwrap_or(s.t.len());
    let too_short = s.t.len() < full + 4;
    for (name, values) in s.named() {
        let start = if name.ends_with("_window") { full.min(s.t.len()) } else { 0 };
        let (growth, first) = if start + 2 <= s.t.len() {
            let (g, first, _) = trend_growth(&s.t[start..], &values[start..]);
            (if g.is_nan() { 0.0 } else { g }, first)
        } else {
            (0.0, f64::NAN)
        };
        let series = s.t.iter().zip(values).map(|(&t, &value)| SeriesPoint { t, value, bound: first }).collect();
        let entry = MonitorEntry::new(
            &format!("oned_{name}"),
            "uniformly bounded in time (second-half max vs first-half max)",
            series,
            growth,
            growth_tol,
        );
        out.push(if too_short && name.ends_with("_window") {
            entry.informational("run shorter than a full window plus a few samples")
        } else {
            entry
        });
    }
    Ok(out)
}
