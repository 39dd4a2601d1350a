//! Homogeneous equilibrium: `u ≡ κ/μ` stays put while the signal decays like
//! `e^{−(κ/μ)t}`. The run has no lower bound for `v` that holds for all time.

use chemotaxis::dynamics::Formulation;
use chemotaxis::harness::{simulate, RunConfig};

fn main() -> chemotaxis::Result<()> {
    let mut cfg = RunConfig::preset("steady-decay")?;
    cfg.time.t_end = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5.0);
    let out = simulate(&cfg, Formulation::Uv)?;
    let rate = cfg.model.kappa / cfg.model.mu;

    println!("{:>6} {:>14} {:>14} {:>10}", "t", "min v", "exact", "rel err");
    for s in out.trajectory.snapshots.iter().step_by(10) {
        let exact = (-rate * s.t).exp();
        println!("{:6.2} {:14.6e} {:14.6e} {:10.2e}", s.t, s.v.min(), exact, (s.v.min() - exact).abs() / exact);
    }
    if let Some(s) = out.trajectory.snapshots.iter().find(|s| s.v.min() < 1e-3) {
        println!("min v fell below 1e-3 at t = {:.2}", s.t);
    }
    println!("all monitors passed: {}", out.report.passed);
    Ok(())
}
