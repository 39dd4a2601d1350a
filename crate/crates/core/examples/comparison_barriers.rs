//! Ordering checks: a heat-equation pair built by hand, then the standard
//! barriers along a simulated trajectory.

use std::sync::Arc;

use chemotaxis::comparison::{canonical_barriers, verify_ordering, Candidate, EvolutionProblem, OrderingTolerance};
use chemotaxis::dynamics::Formulation;
use chemotaxis::grid::Grid;
use chemotaxis::harness::{simulate, RunConfig};

fn main() -> chemotaxis::Result<()> {
    let g = Grid::interval(1.0, 32)?;
    let problem = EvolutionProblem::heat(g, 1.0);
    let times: Vec<f64> = (0..=20).map(|k| k as f64 * 0.05).collect();
    // e^{−π²t} cos(πx) solves the heat equation and stays below 1
    let pi = std::f64::consts::PI;
    let mode = Candidate::ClosedForm(Arc::new(move |t, x| (-pi * pi * t).exp() * (pi * x[0]).cos()));
    let rep = verify_ordering(&problem, &times, &mode, &Candidate::constant(1.0), OrderingTolerance::default())?;
    println!("heat mode below 1: {:?}, min gap {:.3e}", rep.verdict, rep.min_gap);

    let mut cfg = RunConfig::preset("steady-decay")?;
    cfg.time.t_end = 2.0;
    let out = simulate(&cfg, Formulation::Uv)?;
    for pair in canonical_barriers(&out.trajectory) {
        let rep = pair.verify(OrderingTolerance::absolute(1e-6))?;
        println!("{:<22} {:?}  min gap {:+.3e}  ({})", pair.name, rep.verdict, rep.min_gap, pair.statement);
    }
    Ok(())
}
