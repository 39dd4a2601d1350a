use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::grid::{gradient_faces, lp_power, Field};

/// Thresholds for the blow-up heuristic. A flag is a suspicion, never a proof.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlowupConfig {
    pub ceiling: f64,
    /// Exponent of the signal norm; `n + 1` when unset.
    pub q: Option<f64>,
    /// Number of trailing snapshots inspected by the growth test.
    pub window: usize,
    /// Required ratio of late to early log-slope.
    pub slope_ratio: f64,
    /// Required increase of `ln(norm)` across the window.
    pub min_log_increase: f64,
}

impl Default for BlowupConfig {
    fn default() -> Self {
        BlowupConfig {
            ceiling: 1e8,
            q: None,
            window: 20,
            slope_ratio: 2.0,
            min_log_increase: std::f64::consts::LN_10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlowupVerdict {
    pub flagged: bool,
    pub first_crossing: Option<f64>,
    pub reason: Option<String>,
    pub max_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupFlag {
    pub t: f64,
    pub reason: String,
}

/// `‖u‖∞ + (‖v‖_q^q + ‖∇v‖_q^q)^{1/q}` with the gradient taken on faces.
pub fn blowup_norm(u: &Field, v: &Field, q: f64) -> f64 {
    let vol = v.grid().cell_volume();
    let g = gradient_faces(v);
    let grad: f64 = (0..v.grid().dim()).map(|a| lp_power(g.axis(a), q, vol)).sum();
    u.max_abs() + (lp_power(v.values(), q, vol) + grad).powf(1.0 / q)
}

/// Ceiling crossing, or accelerating growth of `ln(norm)` over the trailing window.
pub fn detect_blowup(series: &[(f64, f64)], cfg: &BlowupConfig) -> Option<BlowupFlag> {
    if let Some(&(t, norm)) = series.iter().find(|(_, n)| !(*n <= cfg.ceiling)) {
        return Some(BlowupFlag { t, reason: format!("norm {norm:e} exceeded the ceiling {:e}", cfg.ceiling) });
    }
    let w = cfg.window;
    if w < 4 || series.len() < w {
        return None;
    }
    let tail = &series[series.len() - w..];
    let mid = w / 2;
    let slope = |a: (f64, f64), b: (f64, f64)| (b.1.ln() - a.1.ln()) / (b.0 - a.0);
    let early = slope(tail[0], tail[mid]);
    let late = slope(tail[mid], tail[w - 1]);
    let increase = tail[w - 1].1.ln() - tail[0].1.ln();
    if late > 0.0 && late > cfg.slope_ratio * early && increase > cfg.min_log_increase {
        return Some(BlowupFlag {
            t: tail[w - 1].0,
            reason: format!(
                "log-norm slope accelerated from {early:.3e} to {late:.3e} with increase {increase:.3}"
            ),
        });
    }
    None
}

pub fn blowup_detector(traj: &Trajectory, cfg: &BlowupConfig) -> BlowupVerdict {
    let q = cfg.q.unwrap_or(traj.grid.dim() as f64 + 1.0);
    let max_norm = traj.steps.iter().map(|r| r.blowup_norm).fold(0.0, f64::max);
    let first_crossing = traj.steps.iter().find(|r| !(r.blowup_norm <= cfg.ceiling)).map(|r| r.t);
    if let Some(t) = first_crossing {
        return BlowupVerdict {
            flagged: true,
            first_crossing: Some(t),
            reason: Some(format!("norm exceeded the ceiling {:e} at t = {t}", cfg.ceiling)),
            max_norm,
        };
    }
    let series: Vec<(f64, f64)> = traj.snapshots.iter().map(|s| (s.t, blowup_norm(&s.u, &s.v, q))).collect();
    // the growth test is applied to every prefix, as during the run
    for end in cfg.window.max(1)..=series.len() {
        if let Some(flag) = detect_blowup(&series[..end], cfg) {
            return BlowupVerdict { flagged: true, first_crossing: None, reason: Some(flag.reason), max_norm };
        }
    }
    BlowupVerdict { flagged: false, first_crossing: None, reason: None, max_norm }
}
