//! A small sweep over sensitivity and crowding. Rows outside the proven region
//! are reported but do not affect the exit status.

use chemotaxis::harness::{cmd_sweep, SweepConfig};

const SWEEP: &str = r#"
preset = "perturbed-1d"

[model]
formulation = "uv"

# long enough for logistic growth to settle before the trend tests split the run
[time]
t_end = 30.0

[output]
name = "example"

[sweep]
chi = [0.3, 0.8, 1.6]
mu = [0.2, 1.0]
"#;

fn main() -> chemotaxis::Result<()> {
    let dir = std::env::temp_dir().join("chemotaxis-sweep-example");
    let path = dir.join("sweep.toml");
    std::fs::create_dir_all(&dir)?;
    std::fs::write(&path, SWEEP)?;
    let cfg = SweepConfig::load(Some(&path), None, Vec::new())?;
    let (rows, status) = cmd_sweep(&cfg, &dir)?;
    println!("{:>5} {:>5} {:>6} {:>9} {:>10}", "chi", "mu", "gated", "monitors", "u_inf(T)");
    for r in &rows {
        println!(
            "{:5} {:5} {:>6} {:>4}/{:<4} {:10.4}",
            r.chi,
            r.mu,
            r.gated(),
            r.monitors_passed,
            r.monitors_total,
            r.final_u_inf
        );
    }
    println!("status {:?}; summary in {}", status, dir.join("example_sweep.csv").display());
    Ok(())
}
