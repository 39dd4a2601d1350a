//! The signal and log-depth formulations converge to each other under
//! refinement; the gap shrinks at first order in the time step.

use chemotaxis::harness::{cmd_compare_formulations, RunConfig};

fn main() -> chemotaxis::Result<()> {
    let cfg = RunConfig::preset("perturbed-1d")?;
    let table = cmd_compare_formulations(&cfg, None)?;
    println!("{:>8} {:>12} {:>14} {:>14}", "cells", "dt", "max |Δv|", "max |Δu|");
    for l in &table.levels {
        println!("{:>8?} {:12.4e} {:14.4e} {:14.4e}", l.cells, l.dt, l.v_discrepancy, l.u_discrepancy);
    }
    println!("orders in dt: {:?}", table.orders);
    println!("monotone: {}, min order {:.4}", table.monotone, table.min_order());
    Ok(())
}
