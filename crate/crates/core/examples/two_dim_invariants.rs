//! Two-dimensional run inside the boundedness region, printing the checked
//! estimates. Pass a horizon to shorten the default 20 time units.

use chemotaxis::dynamics::Formulation;
use chemotaxis::harness::{simulate, RunConfig};

fn main() -> chemotaxis::Result<()> {
    let mut cfg = RunConfig::preset("2d-thm1")?;
    if let Some(t) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        cfg.time.t_end = t;
    }
    let out = simulate(&cfg, Formulation::Uv)?;
    let traj = &out.trajectory;
    println!("{} steps to t = {}", traj.steps.len() - 1, traj.last().t);
    if let Some((p, r)) = traj.energy_exponents {
        println!("weighted functional uses p = {p}, r = {r}");
    }
    for e in &out.report.entries {
        println!("{:<22} {:>12.3e}  {:?}", e.name, e.max_rel_violation, e.verdict);
    }
    println!(
        "clipped mass {:.2e}, guard activations {}, blow-up flagged: {}",
        traj.total_u_clip(),
        traj.guard_activations(),
        out.report.blowup.flagged
    );
    Ok(())
}
