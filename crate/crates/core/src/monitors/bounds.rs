use crate::dynamics::{ModelParams, Trajectory};
use crate::error::{Error, Result};
use crate::grid::{integrate, lp_power, Field};

use super::{lower_violation, upper_violation, MonitorEntry, SeriesPoint};

/// `∫ u^p v^{−r}`; with `w` given, `v^{−r}` is evaluated as `‖v0‖∞^{−r} e^{r w}`.
pub fn upvr_functional(u: &Field, v: &Field, w: Option<&Field>, v0_sup: f64, p: f64, r: f64) -> f64 {
    let vol = u.grid().cell_volume();
    let up = |x: f64| if x == 0.0 { 0.0 } else { x.powf(p) };
    let sum: f64 = match w {
        Some(w) => {
            let scale = v0_sup.powf(-r);
            u.values().iter().zip(w.values()).map(|(&x, &wc)| up(x) * scale * (r * wc).exp()).sum()
        }
        None => u.values().iter().zip(v.values()).map(|(&x, &vc)| up(x) * vc.powf(-r)).sum(),
    };
    sum * vol
}

/// `max(∫u0, |Ω| ū)` with `ū` the logistic carrying capacity (`κ/μ` for α = 2).
pub fn mass_bound_constant(initial_mass: f64, params: &ModelParams, volume: f64) -> f64 {
    initial_mass.max(volume * params.equilibrium_density())
}

pub fn mass_bound(traj: &Trajectory, params: &ModelParams, tol: f64) -> MonitorEntry {
    let m = mass_bound_constant(integrate(&traj.initial().u), params, traj.grid.volume());
    let mut worst = f64::NEG_INFINITY;
    for r in &traj.steps {
        worst = worst.max(upper_violation(r.u_mass, m));
    }
    let series =
        traj.snapshots.iter().map(|s| SeriesPoint { t: s.t, value: integrate(&s.u), bound: m }).collect();
    MonitorEntry::new("mass_bound", "||u(t)||_1 <= m = max(||u0||_1, kappa|Omega|/mu)", series, worst, tol)
}

/// Trapezoidal integrals of `values` over `[max(0, t_k − width), t_k]` for every sample time.
pub fn window_integrals(times: &[f64], values: &[f64], width: f64) -> Vec<f64> {
    assert_eq!(times.len(), values.len());
    let n = times.len();
    let mut cumulative = vec![0.0; n];
    for k in 1..n {
        cumulative[k] = cumulative[k - 1] + 0.5 * (values[k] + values[k - 1]) * (times[k] - times[k - 1]);
    }
    // cumulative integral up to an arbitrary time, linear in between samples
    let at = |s: f64, hint: usize| -> f64 {
        if s <= times[0] {
            return 0.0;
        }
        let mut j = hint;
        while j + 1 < n && times[j + 1] <= s {
            j += 1;
        }
        if j + 1 >= n {
            return cumulative[n - 1];
        }
        let dt = times[j + 1] - times[j];
        let frac = (s - times[j]) / dt;
        let vs = values[j] + frac * (values[j + 1] - values[j]);
        cumulative[j] + 0.5 * (values[j] + vs) * (s - times[j])
    };
    let mut hint = 0;
    (0..n)
        .map(|k| {
            let start = (times[k] - width).max(times[0]);
            while hint + 1 < n && times[hint + 1] <= start {
                hint += 1;
            }
            cumulative[k] - at(start, hint)
        })
        .collect()
}

pub fn spacetime_u2(traj: &Trajectory, params: &ModelParams, tol: f64) -> MonitorEntry {
    let m = mass_bound_constant(integrate(&traj.initial().u), params, traj.grid.volume());
    let bound = (params.kappa + 1.0) * m / params.mu;
    let times: Vec<f64> = traj.snapshots.iter().map(|s| s.t).collect();
    let u2: Vec<f64> = traj.snapshots.iter().map(|s| lp_power(s.u.values(), 2.0, traj.grid.cell_volume())).collect();
    let windows = window_integrals(&times, &u2, 1.0);
    let worst = windows.iter().map(|&w| upper_violation(w, bound)).fold(f64::NEG_INFINITY, f64::max);
    let series = times.iter().zip(&windows).map(|(&t, &value)| SeriesPoint { t, value, bound }).collect();
    let entry = MonitorEntry::new(
        "spacetime_u2",
        "int_{(t-1)+}^t int u^2 <= (kappa+1) m / mu",
        series,
        worst,
        tol,
    );
    if params.alpha != 2.0 {
        entry.informational("bound is stated for quadratic crowding (alpha = 2)")
    } else {
        entry
    }
}

/// `y0 + C / (1 − e^{−a})`, the bound for `y' + a y ≤ h` with unit-window integrals of `h` at most `C`.
pub fn odi_bound(y0: f64, c: f64, a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("decay rate a must be positive, got {a}")));
    }
    Ok(y0 + c / -(-a).exp_m1())
}

/// Consecutive-step monotonicity of `‖v‖_p` for every recorded exponent.
pub fn vp_decay(traj: &Trajectory, tol: f64) -> Vec<MonitorEntry> {
    traj.vp_exponents
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let norm = |pp: f64| pp.powf(1.0 / p);
            let mut worst = f64::NEG_INFINITY;
            for pair in traj.steps.windows(2) {
                let (a, b) = (norm(pair[0].v_power_norms[k]), norm(pair[1].v_power_norms[k]));
                worst = worst.max(upper_violation(b, a));
            }
            if traj.steps.len() < 2 {
                worst = 0.0;
            }
            let mut series = Vec::new();
            let mut prev = norm(traj.steps[0].v_power_norms[k]);
            for s in &traj.snapshots {
                let value = norm(lp_power(s.v.values(), p, traj.grid.cell_volume()));
                series.push(SeriesPoint { t: s.t, value, bound: prev });
                prev = value;
            }
            MonitorEntry::new(
                &format!("vp_decay_p{p}"),
                "t -> ||v(t)||_p is nonincreasing",
                series,
                worst,
                tol,
            )
        })
        .collect()
}

pub fn vinf_bound(traj: &Trajectory, tol: f64) -> MonitorEntry {
    let bound = traj.v0_sup;
    let worst = traj.steps.iter().map(|r| upper_violation(r.v_max, bound)).fold(f64::NEG_INFINITY, f64::max);
    let series = traj.snapshots.iter().map(|s| SeriesPoint { t: s.t, value: s.v.max(), bound }).collect();
    MonitorEntry::new("vinf_bound", "||v(t)||_inf <= ||v0||_inf", series, worst, tol)
}

/// Growth of `E(t) = ∫ u^p v^{−r}`: the endpoint bound `E(t) ≤ e^{pκt} E(0)` and
/// the per-step ratio `E_{k+1}/E_k ≤ e^{pκ Δt}`.
pub fn energy_upvr(
    traj: &Trajectory,
    p: f64,
    r: f64,
    params: &ModelParams,
    tol_endpoint: f64,
    tol_step: f64,
) -> Vec<MonitorEntry> {
    let rate = p * params.kappa;
    let energies: Vec<(f64, f64)> = traj.steps.iter().filter_map(|s| s.energy.map(|e| (s.t, e))).collect();
    let Some(&(t0, e0)) = energies.first() else {
        return Vec::new();
    };
    let mut worst_end = f64::NEG_INFINITY;
    let mut series = Vec::new();
    let mut next_snap = 0;
    for &(t, e) in &energies {
        let bound = (rate * (t - t0)).exp() * e0;
        let viol = if e == 0.0 && bound == 0.0 { 0.0 } else { upper_violation(e, bound) };
        worst_end = worst_end.max(viol);
        if next_snap < traj.snapshots.len() && (traj.snapshots[next_snap].t - t).abs() <= 1e-12 * t.max(1.0) {
            series.push(SeriesPoint { t, value: e, bound });
            next_snap += 1;
        }
    }
    let mut worst_step = f64::NEG_INFINITY;
    let mut ratio_series = Vec::new();
    for pair in energies.windows(2) {
        let ((ta, ea), (tb, eb)) = (pair[0], pair[1]);
        let allowed = (rate * (tb - ta)).exp();
        let viol = if ea == 0.0 { if eb == 0.0 { 0.0 } else { f64::INFINITY } } else { upper_violation(eb / ea, allowed) };
        worst_step = worst_step.max(viol);
        if traj.snapshots.iter().any(|s| s.t == tb) {
            ratio_series.push(SeriesPoint { t: tb, value: if ea == 0.0 { 0.0 } else { eb / ea }, bound: allowed });
        }
    }
    if energies.len() < 2 {
        worst_step = 0.0;
    }

    let endpoint = MonitorEntry::new(
        "energy_gronwall",
        "int u^p v^-r (t) <= exp(p kappa t) int u0^p v0^-r",
        series,
        worst_end,
        tol_endpoint,
    );
    let step = MonitorEntry::new(
        "energy_step_ratio",
        "E(t_{k+1}) / E(t_k) <= exp(p kappa dt_k)",
        ratio_series,
        worst_step,
        tol_step,
    );
    let dim = traj.grid.dim();
    if crate::analysis::is_admissible(p, r, params.chi, params.mu) && params.alpha == 2.0 {
        vec![endpoint, step]
    } else {
        let note = format!("(p, r) = ({p}, {r}) is outside the admissible window for chi = {}, mu = {}, n = {dim}", params.chi, params.mu);
        vec![endpoint.informational(note.clone()), step.informational(note)]
    }
}

/// `min v(t) ≥ inf v0 · e^{−C t}` with `C` the running max of `‖u‖∞`.
pub fn lower_bound_v(traj: &Trajectory, tol: f64) -> MonitorEntry {
    let mut c: f64 = 0.0;
    let mut worst = f64::NEG_INFINITY;
    let mut bounds = Vec::with_capacity(traj.steps.len());
    for r in &traj.steps {
        c = c.max(r.u_max);
        let bound = traj.inf_v0 * (-c * r.t).exp();
        worst = worst.max(lower_violation(r.v_min, bound));
        bounds.push((r.t, bound));
    }
    let mut series = Vec::new();
    let mut k = 0;
    for s in &traj.snapshots {
        while k + 1 < bounds.len() && bounds[k].0 < s.t {
            k += 1;
        }
        series.push(SeriesPoint { t: s.t, value: s.v.min(), bound: bounds[k].1 });
    }
    MonitorEntry::new("lower_bound_v", "v(x,t) >= inf v0 * exp(-C t), C = sup u", series, worst, tol)
}
