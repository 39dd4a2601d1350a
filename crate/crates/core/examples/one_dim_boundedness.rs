//! Strong sensitivity in one dimension, run in log-depth form. Prints the
//! running maxima of the tracked quantities over the two halves of the run.

use chemotaxis::dynamics::Formulation;
use chemotaxis::harness::{simulate, RunConfig};
use chemotaxis::monitors::oned_series;

fn main() -> chemotaxis::Result<()> {
    let mut cfg = RunConfig::preset("1d-bounded")?;
    if let Some(t) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        cfg.time.t_end = t;
    }
    let out = simulate(&cfg, Formulation::Uw)?;
    let s = oned_series(&out.trajectory)?;
    let half = 0.5 * cfg.time.t_end;
    println!("{:<16} {:>12} {:>12}", "series", "early max", "late max");
    for (name, values) in s.named() {
        let max_where = |keep: &dyn Fn(f64) -> bool| {
            s.t.iter().zip(values).filter(|(t, _)| keep(**t)).map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max)
        };
        println!("{name:<16} {:12.4e} {:12.4e}", max_where(&|t| t <= half), max_where(&|t| t >= half));
    }
    println!("min v at the end: {:.3e}", out.trajectory.last().v.min());
    println!("blow-up flagged: {}", out.report.blowup.flagged);
    Ok(())
}
