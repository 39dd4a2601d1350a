//! Neumann Laplacian on a cell-centred grid: conservation and the spectrum of a
//! cosine mode.

use chemotaxis::grid::{integrate, laplacian_neumann, lp_norm, Field, Grid};

fn main() -> chemotaxis::Result<()> {
    let len = 2.0;
    let k = std::f64::consts::PI / len;
    for n in [16, 32, 64, 128] {
        let g = Grid::interval(len, n)?;
        let f = Field::from_fn(g, |x| (k * x[0]).cos())?;
        let lap = laplacian_neumann(&f);
        // continuum eigenvalue is -k²; the stencil converges to it at second order
        let err = lap.zip_map(&f, |a, b| a + k * k * b)?;
        println!(
            "n = {n:4}  |Δf + k² f|_inf = {:.3e}  ∫Δf = {:+.1e}",
            lp_norm(&err, f64::INFINITY)?,
            integrate(&lap)
        );
    }

    let g = Grid::rectangle(3.0, 2.0, 30, 20)?;
    let bump = Field::from_fn(g, |x| (-(x[0] - 1.0).powi(2) - 4.0 * (x[1] - 0.5).powi(2)).exp())?;
    let lap = laplacian_neumann(&bump);
    let dissipation: f64 = bump.values().iter().zip(lap.values()).map(|(a, b)| a * b).sum::<f64>() * g.cell_volume();
    println!("2d bump: ∫Δf = {:+.1e}, ∫f Δf = {dissipation:.4} (never positive)", integrate(&lap));
    Ok(())
}
