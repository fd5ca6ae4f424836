//! Uniform cell-centered grids in one or two dimensions and the fields that
//! live on them. Cells are stored x-fastest: `index = i + nx * j`.

mod ops;

pub use ops::{
    advect, advect_with, divergence, divergence_flux, divergence_flux_with, divergence_tensor, gradient, laplacian,
    symmetric_gradient, AdvectionScheme, FaceAverage, Ghost, SymmetricTensorField,
};
pub(crate) use ops::transport_divergence;

use crate::error::{Error, Result};

pub const MIN_CELLS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    n: [usize; 2],
    h: [f64; 2],
}

impl Grid {
    pub fn new_1d(nx: usize, hx: f64) -> Result<Self> {
        Self::check_axis("nx", nx, hx)?;
        Ok(Grid {
            dim: 1,
            n: [nx, 1],
            h: [hx, 1.0],
        })
    }

    pub fn new_2d(nx: usize, ny: usize, hx: f64, hy: f64) -> Result<Self> {
        Self::check_axis("nx", nx, hx)?;
        Self::check_axis("ny", ny, hy)?;
        Ok(Grid {
            dim: 2,
            n: [nx, ny],
            h: [hx, hy],
        })
    }

    fn check_axis(name: &str, n: usize, h: f64) -> Result<()> {
        if n < MIN_CELLS {
            return Err(Error::InvalidGrid(format!(
                "{name} = {n}, need at least {MIN_CELLS} cells per axis"
            )));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing for {name} must be > 0, got {h}")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nx(&self) -> usize {
        self.n[0]
    }

    /// Cells along y; 1 for a 1D grid.
    pub fn ny(&self) -> usize {
        self.n[1]
    }

    /// Cells along `axis`.
    pub fn n(&self, axis: usize) -> usize {
        self.n[axis]
    }

    /// Spacing along `axis`.
    pub fn h(&self, axis: usize) -> f64 {
        self.h[axis]
    }

    pub fn min_spacing(&self) -> f64 {
        if self.dim == 1 {
            self.h[0]
        } else {
            self.h[0].min(self.h[1])
        }
    }

    /// Physical extent along `axis`.
    pub fn length(&self, axis: usize) -> f64 {
        self.n[axis] as f64 * self.h[axis]
    }

    pub fn cell_count(&self) -> usize {
        self.n[0] * self.n[1]
    }

    pub fn cell_volume(&self) -> f64 {
        if self.dim == 1 {
            self.h[0]
        } else {
            self.h[0] * self.h[1]
        }
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i + self.n[0] * j
    }

    /// Cell-center coordinate along `axis` of cell number `k` on that axis.
    #[inline]
    pub fn center(&self, axis: usize, k: usize) -> f64 {
        (k as f64 + 0.5) * self.h[axis]
    }

    /// Cell-center coordinates of flat cell `idx`; `y = 0` on 1D grids.
    pub fn center_of(&self, idx: usize) -> (f64, f64) {
        let i = idx % self.n[0];
        let j = idx / self.n[0];
        let y = if self.dim == 1 { 0.0 } else { self.center(1, j) };
        (self.center(0, i), y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        ScalarField {
            grid,
            values: vec![value; grid.cell_count()],
        }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(Error::GridMismatch(format!(
                "scalar field has {} values for {} cells",
                values.len(),
                grid.cell_count()
            )));
        }
        Ok(ScalarField { grid, values })
    }

    /// Samples `f(x, y)` at the cell centers.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..grid.cell_count())
            .map(|k| {
                let (x, y) = grid.center_of(k);
                f(x, y)
            })
            .collect();
        ScalarField { grid, values }
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

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Midpoint-rule integral over the domain.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// A field with `dim` components per cell, stored component by component.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    components: Vec<Vec<f64>>,
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        VectorField {
            grid,
            components: vec![vec![0.0; grid.cell_count()]; grid.dim()],
        }
    }

    pub fn from_components(grid: Grid, components: Vec<Vec<f64>>) -> Result<Self> {
        if components.len() != grid.dim()
            || components.iter().any(|c| c.len() != grid.cell_count())
        {
            return Err(Error::GridMismatch(format!(
                "vector field needs {} components of {} values",
                grid.dim(),
                grid.cell_count()
            )));
        }
        Ok(VectorField { grid, components })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn component(&self, k: usize) -> &[f64] {
        &self.components[k]
    }

    pub fn component_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.components[k]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    /// Components of cell `idx`, zero-padded to three entries.
    pub fn at(&self, idx: usize) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (k, comp) in self.components.iter().enumerate() {
            out[k] = comp[idx];
        }
        out
    }

    pub fn norm_sq_at(&self, idx: usize) -> f64 {
        self.components.iter().map(|c| c[idx] * c[idx]).sum()
    }

    pub fn norm_sq(&self) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: (0..self.grid.cell_count()).map(|k| self.norm_sq_at(k)).collect(),
        }
    }

    pub fn max_norm(&self) -> f64 {
        (0..self.grid.cell_count())
            .map(|k| self.norm_sq_at(k))
            .fold(0.0, f64::max)
            .sqrt()
    }

    /// Pointwise dot product with another vector field.
    pub fn dot(&self, other: &VectorField) -> ScalarField {
        let values = (0..self.grid.cell_count())
            .map(|k| {
                self.components
                    .iter()
                    .zip(&other.components)
                    .map(|(a, b)| a[k] * b[k])
                    .sum()
            })
            .collect();
        ScalarField {
            grid: self.grid,
            values,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.iter().all(|&v| v == 0.0))
    }

    pub fn all_finite(&self) -> bool {
        self.components.iter().all(|c| c.iter().all(|v| v.is_finite()))
    }
}
