//! Cell-centered uniform grids on an interval or a rectangle.
//!
//! Ghost values are mirror reflections of the adjacent interior cell, so every
//! boundary face carries a zero gradient and zero flux. With that convention the
//! Laplacian is literally `divergence(gradient_faces(f))` and sums to zero against
//! the midpoint quadrature, which is the discrete form of Neumann integration by
//! parts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid over `[0, L_x]` or `[0, L_x] x [0, L_y]`.
///
/// Cells are stored x-fastest: cell `(i, j)` lives at `j * nx + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    extents: [f64; 2],
    cells: [usize; 2],
    spacing: [f64; 2],
}

impl Grid {
    pub fn new(dim: usize, extents: &[f64], cells_per_axis: &[usize]) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!("dimension {dim} is not supported (1 or 2)")));
        }
        if extents.len() != dim || cells_per_axis.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "expected {dim} extents and cell counts, got {} and {}",
                extents.len(),
                cells_per_axis.len()
            )));
        }
        let mut ext = [1.0; 2];
        let mut cells = [1usize; 2];
        let mut spacing = [1.0; 2];
        for axis in 0..dim {
            let l = extents[axis];
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!("extent {l} on axis {axis} must be positive")));
            }
            if cells_per_axis[axis] < 3 {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis} needs at least 3 cells, got {}",
                    cells_per_axis[axis]
                )));
            }
            ext[axis] = l;
            cells[axis] = cells_per_axis[axis];
            spacing[axis] = l / cells_per_axis[axis] as f64;
        }
        Ok(Grid { dim, extents: ext, cells, spacing })
    }

    pub fn interval(length: f64, cells: usize) -> Result<Self> {
        Grid::new(1, &[length], &[cells])
    }

    pub fn rectangle(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        Grid::new(2, &[lx, ly], &[nx, ny])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extents(&self) -> &[f64] {
        &self.extents[..self.dim]
    }

    pub fn cells_per_axis(&self) -> &[usize] {
        &self.cells[..self.dim]
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing[..self.dim]
    }

    pub fn nx(&self) -> usize {
        self.cells[0]
    }

    /// Number of cells along y; 1 for an interval.
    pub fn ny(&self) -> usize {
        self.cells[1]
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing().iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn num_cells(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    /// |Ω|
    pub fn volume(&self) -> f64 {
        self.extents().iter().product()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.cells[0] + i
    }

    /// Cell-center coordinates; the second entry is 0 for intervals.
    pub fn center(&self, cell: usize) -> [f64; 2] {
        let i = cell % self.cells[0];
        let j = cell / self.cells[0];
        let x = (i as f64 + 0.5) * self.spacing[0];
        let y = if self.dim == 2 { (j as f64 + 0.5) * self.spacing[1] } else { 0.0 };
        [x, y]
    }

    pub fn centers(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        (0..self.num_cells()).map(move |c| self.center(c))
    }

    /// Number of faces normal to `axis`, boundary faces included.
    pub fn num_faces(&self, axis: usize) -> usize {
        match axis {
            0 => (self.cells[0] + 1) * self.cells[1],
            1 if self.dim == 2 => self.cells[0] * (self.cells[1] + 1),
            _ => 0,
        }
    }
}

/// Scalar values at cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.num_cells() {
            return Err(Error::LengthMismatch { expected: grid.num_cells(), got: values.len() });
        }
        let field = Field { grid, values };
        field.check_finite("field")?;
        Ok(field)
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Field { grid, values: vec![value; grid.num_cells()] }
    }

    pub fn zeros(grid: Grid) -> Self {
        Field::constant(grid, 0.0)
    }

    /// Samples `f` at cell centers.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let values = grid.centers().map(f).collect();
        Field::new(grid, values)
    }

    /// Skips the finiteness scan; for values produced by the crate's own operators.
    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.num_cells());
        Field { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field { grid: self.grid, values: self.values.iter().map(|&x| f(x)).collect() }
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Field { grid: self.grid, values })
    }

    pub fn scaled(&self, c: f64) -> Field {
        self.map(|x| c * x)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn check_finite(&self, what: &'static str) -> Result<()> {
        match self.values.iter().position(|x| !x.is_finite()) {
            Some(cell) => Err(Error::NonFinite { what, cell }),
            None => Ok(()),
        }
    }
}

/// One value per cell face and axis. Boundary faces are always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceFlux {
    grid: Grid,
    faces: [Vec<f64>; 2],
}

impl FaceFlux {
    pub fn zeros(grid: Grid) -> Self {
        FaceFlux { grid, faces: [vec![0.0; grid.num_faces(0)], vec![0.0; grid.num_faces(1)]] }
    }

    /// Builds a flux from interior face values given by `f(axis, left_cell, right_cell)`.
    pub fn from_interior(grid: Grid, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut flux = FaceFlux::zeros(grid);
        let (nx, ny) = (grid.nx(), grid.ny());
        for j in 0..ny {
            for i in 1..nx {
                flux.faces[0][j * (nx + 1) + i] = f(0, grid.index(i - 1, j), grid.index(i, j));
            }
        }
        if grid.dim() == 2 {
            for j in 1..ny {
                for i in 0..nx {
                    flux.faces[1][j * nx + i] = f(1, grid.index(i, j - 1), grid.index(i, j));
                }
            }
        }
        flux
    }

    /// New flux with interior faces set to `f(axis, left_cell, right_cell, value)`.
    pub fn map_interior(&self, mut f: impl FnMut(usize, usize, usize, f64) -> f64) -> FaceFlux {
        let g = self.grid;
        let (nx, ny) = (g.nx(), g.ny());
        let mut out = FaceFlux::zeros(g);
        for j in 0..ny {
            for i in 1..nx {
                let k = j * (nx + 1) + i;
                out.faces[0][k] = f(0, g.index(i - 1, j), g.index(i, j), self.faces[0][k]);
            }
        }
        if g.dim() == 2 {
            for j in 1..ny {
                for i in 0..nx {
                    let k = j * nx + i;
                    out.faces[1][k] = f(1, g.index(i, j - 1), g.index(i, j), self.faces[1][k]);
                }
            }
        }
        out
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// All faces normal to `axis`, boundary faces included.
    pub fn axis(&self, axis: usize) -> &[f64] {
        &self.faces[axis]
    }

    /// Iterates `(axis, left_cell, right_cell, value)` over interior faces.
    pub fn interior(&self) -> impl Iterator<Item = (usize, usize, usize, f64)> + '_ {
        let g = self.grid;
        let (nx, ny) = (g.nx(), g.ny());
        let x = (0..ny).flat_map(move |j| {
            (1..nx).map(move |i| (0, g.index(i - 1, j), g.index(i, j), self.faces[0][j * (nx + 1) + i]))
        });
        let y = (if g.dim() == 2 { 1..ny } else { 0..0 }).flat_map(move |j| {
            (0..nx).map(move |i| (1, g.index(i, j - 1), g.index(i, j), self.faces[1][j * nx + i]))
        });
        x.chain(y)
    }

    pub fn max_abs(&self) -> f64 {
        self.faces.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> FaceFlux {
        FaceFlux {
            grid: self.grid,
            faces: [
                self.faces[0].iter().map(|&x| f(x)).collect(),
                self.faces[1].iter().map(|&x| f(x)).collect(),
            ],
        }
    }

    /// Sum over interior faces of `g(value)` times the face control volume
    /// (cell volume), the discrete `∫ g(∂f)` for face-valued derivatives.
    pub fn integrate_with(&self, g: impl Fn(f64) -> f64) -> f64 {
        let vol = self.grid.cell_volume();
        self.interior().map(|(_, _, _, x)| g(x)).sum::<f64>() * vol
    }
}

/// Two-point differences across interior faces; boundary faces are zero.
pub fn gradient_faces(f: &Field) -> FaceFlux {
    let g = *f.grid();
    let h = g.spacing;
    let v = f.values();
    FaceFlux::from_interior(g, |axis, l, r| (v[r] - v[l]) / h[axis])
}

/// Outgoing minus incoming face flux per cell, over the spacing.
pub fn divergence(flux: &FaceFlux) -> Field {
    let g = *flux.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let h = g.spacing;
    let fx = &flux.faces[0];
    let fy = &flux.faces[1];
    let mut out = vec![0.0; g.num_cells()];
    for j in 0..ny {
        for i in 0..nx {
            let mut d = (fx[j * (nx + 1) + i + 1] - fx[j * (nx + 1) + i]) / h[0];
            if g.dim() == 2 {
                d += (fy[(j + 1) * nx + i] - fy[j * nx + i]) / h[1];
            }
            out[g.index(i, j)] = d;
        }
    }
    Field::from_raw(g, out)
}

/// Second-order Neumann Laplacian with mirror ghosts.
///
/// Uses the same arithmetic as `divergence(gradient_faces(f))`, so the two agree
/// bit for bit.
pub fn laplacian_neumann(f: &Field) -> Field {
    let g = *f.grid();
    let mut out = vec![0.0; g.num_cells()];
    laplacian_into(&g, f.values(), &mut out);
    Field::from_raw(g, out)
}

pub(crate) fn laplacian_into(g: &Grid, v: &[f64], out: &mut [f64]) {
    let (nx, ny) = (g.nx(), g.ny());
    let h = g.spacing;
    for j in 0..ny {
        for i in 0..nx {
            let c = g.index(i, j);
            let right = if i + 1 < nx { (v[c + 1] - v[c]) / h[0] } else { 0.0 };
            let left = if i > 0 { (v[c] - v[c - 1]) / h[0] } else { 0.0 };
            let mut d = (right - left) / h[0];
            if g.dim() == 2 {
                let up = if j + 1 < ny { (v[c + nx] - v[c]) / h[1] } else { 0.0 };
                let down = if j > 0 { (v[c] - v[c - nx]) / h[1] } else { 0.0 };
                d += (up - down) / h[1];
            }
            out[c] = d;
        }
    }
}

/// Midpoint rule: sum of values times cell volume.
pub fn integrate(f: &Field) -> f64 {
    f.values().iter().sum::<f64>() * f.grid().cell_volume()
}

/// `(∫|f|^p)^{1/p}`, or `max |f|` when `p` is infinite.
pub fn lp_norm(f: &Field, p: f64) -> Result<f64> {
    if p.is_infinite() && p > 0.0 {
        return Ok(f.max_abs());
    }
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("L^p norm needs p >= 1, got {p}")));
    }
    Ok(lp_power(f.values(), p, f.grid().cell_volume()).powf(1.0 / p))
}

/// `∫|f|^p` with fast paths for small integer exponents.
pub(crate) fn lp_power(values: &[f64], p: f64, cell_volume: f64) -> f64 {
    let s: f64 = if p == 1.0 {
        values.iter().map(|x| x.abs()).sum()
    } else if p == 2.0 {
        values.iter().map(|x| x * x).sum()
    } else if p == 3.0 {
        values.iter().map(|x| x.abs() * x * x).sum()
    } else if p == 4.0 {
        values.iter().map(|x| (x * x) * (x * x)).sum()
    } else {
        values.iter().map(|x| x.abs().powf(p)).sum()
    };
    s * cell_volume
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_grid_examples() {
        let g = Grid::new(1, &[1.0], &[100]).unwrap();
        assert!((g.spacing()[0] - 0.01).abs() < 1e-15);
        assert_eq!(g.volume(), 1.0);

        let g = Grid::new(2, &[2.0, 1.0], &[40, 20]).unwrap();
        assert!((g.spacing()[0] - 0.05).abs() < 1e-15);
        assert!((g.spacing()[1] - 0.05).abs() < 1e-15);
        assert_eq!(g.volume(), 2.0);
    }

    #[test]
    fn build_grid_rejects_bad_input() {
        assert!(matches!(Grid::new(3, &[1.0; 3], &[4; 3]), Err(Error::InvalidGrid(_))));
        assert!(Grid::new(0, &[], &[]).is_err());
        assert!(Grid::new(1, &[0.0], &[10]).is_err());
        assert!(Grid::new(1, &[-1.0], &[10]).is_err());
        assert!(Grid::new(1, &[1.0], &[2]).is_err());
        assert!(Grid::new(2, &[1.0], &[10]).is_err());
    }

    #[test]
    fn constant_field_integrates_to_volume() {
        let g = Grid::rectangle(2.0, 0.5, 7, 9).unwrap();
        let one = Field::constant(g, 1.0);
        assert!((integrate(&one) - g.volume()).abs() < 1e-14);
        let c = Field::constant(g, 3.5);
        assert!((integrate(&c) - 3.5 * g.volume()).abs() < 1e-13);
    }

    #[test]
    fn midpoint_rule_exact_for_linear() {
        let g = Grid::interval(1.0, 10).unwrap();
        let f = Field::from_fn(g, |x| x[0]).unwrap();
        assert!((integrate(&f) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn laplacian_annihilates_constants() {
        for g in [Grid::interval(3.0, 11).unwrap(), Grid::rectangle(1.0, 2.0, 5, 8).unwrap()] {
            let lap = laplacian_neumann(&Field::constant(g, 4.2));
            assert!(lap.values().iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn laplacian_of_parabola_in_interior() {
        let g = Grid::interval(1.0, 50).unwrap();
        let f = Field::from_fn(g, |x| x[0] * x[0]).unwrap();
        let lap = laplacian_neumann(&f);
        // Interior stencil is exact for quadratics; only the two boundary cells differ.
        for c in 1..49 {
            assert!((lap.values()[c] - 2.0).abs() < 1e-9, "cell {c}: {}", lap.values()[c]);
        }
    }

    #[test]
    fn laplacian_cosine_eigenfunction() {
        // cos(pi x / L) satisfies the Neumann condition; the error should drop ~4x per refinement.
        let l = 2.0;
        let k2 = (std::f64::consts::PI / l).powi(2);
        let err = |n: usize| {
            let g = Grid::interval(l, n).unwrap();
            let f = Field::from_fn(g, |x| (std::f64::consts::PI * x[0] / l).cos()).unwrap();
            let lap = laplacian_neumann(&f);
            lap.values()
                .iter()
                .zip(f.values())
                .map(|(a, b)| (a + k2 * b).abs())
                .fold(0.0, f64::max)
                / k2
        };
        let (e1, e2) = (err(40), err(80));
        assert!(e1 < 5e-3);
        assert!(e1 / e2 > 3.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn gradient_examples() {
        let g = Grid::interval(1.0, 10).unwrap();
        let zero = gradient_faces(&Field::constant(g, 2.0));
        assert_eq!(zero.max_abs(), 0.0);

        let f = Field::from_fn(g, |x| x[0]).unwrap();
        let grad = gradient_faces(&f);
        let faces = grad.axis(0);
        assert_eq!(faces[0], 0.0);
        assert_eq!(faces[10], 0.0);
        for x in &faces[1..10] {
            assert!((x - 1.0).abs() < 1e-12);
        }

        let g2 = Grid::rectangle(1.0, 1.0, 6, 5).unwrap();
        let f = Field::from_fn(g2, |x| x[1]).unwrap();
        let grad = gradient_faces(&f);
        assert!(grad.axis(0).iter().all(|&x| x == 0.0));
        for (axis, _, _, val) in grad.interior() {
            if axis == 1 {
                assert!((val - 1.0).abs() < 1e-12);
            }
        }
        // bottom and top boundary rows
        let nx = g2.nx();
        assert!(grad.axis(1)[..nx].iter().all(|&x| x == 0.0));
        assert!(grad.axis(1)[5 * nx..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn divergence_of_zero_is_zero() {
        let g = Grid::rectangle(1.0, 1.0, 4, 4).unwrap();
        assert!(divergence(&FaceFlux::zeros(g)).values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn lp_norm_examples() {
        let g = Grid::interval(1.0, 8).unwrap();
        let two = Field::constant(g, 2.0);
        assert!((lp_norm(&two, 2.0).unwrap() - 2.0).abs() < 1e-15);
        let mut vals = vec![1.0; 8];
        vals[3] = -7.5;
        let f = Field::new(g, vals).unwrap();
        assert_eq!(lp_norm(&f, f64::INFINITY).unwrap(), 7.5);
        let abs_int = integrate(&f.map(f64::abs));
        assert!((lp_norm(&f, 1.0).unwrap() - abs_int).abs() < 1e-15);
        assert!(lp_norm(&f, 0.5).is_err());
    }

    #[test]
    fn field_rejects_nan_and_wrong_length() {
        let g = Grid::interval(1.0, 4).unwrap();
        assert!(matches!(Field::new(g, vec![0.0; 3]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(
            Field::new(g, vec![0.0, f64::NAN, 0.0, 0.0]),
            Err(Error::NonFinite { cell: 1, .. })
        ));
    }
}
