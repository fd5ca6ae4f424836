//! Second-order finite-difference operators on cell-centered fields.
//!
//! Boundaries are handled with one layer of ghost cells. [`Ghost::Mirror`]
//! copies the adjacent interior value (homogeneous Neumann) and
//! [`Ghost::Reflect`] negates it (zero value on the face, used for no-slip
//! velocity and for normal heat flux). Every operator returns a fresh field
//! and never reads its own output.

use super::{Grid, ScalarField, VectorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ghost {
    Mirror,
    Reflect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AdvectionScheme {
    #[default]
    Upwind,
    Centered,
}

/// Neighbor of cell `(i, j)` along `axis`, `forward` or backward, with ghosting.
#[inline]
fn neighbor(values: &[f64], grid: &Grid, i: usize, j: usize, axis: usize, forward: bool, ghost: Ghost) -> f64 {
    let (n, k) = if axis == 0 { (grid.nx(), i) } else { (grid.ny(), j) };
    let inside = if forward { k + 1 < n } else { k > 0 };
    if inside {
        let (ii, jj) = match (axis, forward) {
            (0, true) => (i + 1, j),
            (0, false) => (i - 1, j),
            (_, true) => (i, j + 1),
            (_, false) => (i, j - 1),
        };
        values[grid.index(ii, jj)]
    } else {
        let v = values[grid.index(i, j)];
        match ghost {
            Ghost::Mirror => v,
            Ghost::Reflect => -v,
        }
    }
}

fn for_each_cell(grid: &Grid, mut f: impl FnMut(usize, usize, usize)) {
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            f(i, j, grid.index(i, j));
        }
    }
}

/// Central difference along `axis`.
pub(crate) fn central_diff(values: &[f64], grid: &Grid, axis: usize, ghost: Ghost) -> Vec<f64> {
    let inv = 0.5 / grid.h(axis);
    let mut out = vec![0.0; values.len()];
    for_each_cell(grid, |i, j, idx| {
        let fwd = neighbor(values, grid, i, j, axis, true, ghost);
        let bwd = neighbor(values, grid, i, j, axis, false, ghost);
        out[idx] = (fwd - bwd) * inv;
    });
    out
}

/// Gradient with Neumann (mirror) ghosting.
pub fn gradient(f: &ScalarField) -> VectorField {
    gradient_with(f, Ghost::Mirror)
}

pub(crate) fn gradient_with(f: &ScalarField, ghost: Ghost) -> VectorField {
    let grid = *f.grid();
    let comps = (0..grid.dim())
        .map(|axis| central_diff(f.values(), &grid, axis, ghost))
        .collect();
    VectorField::from_components(grid, comps).expect("gradient shape")
}

/// Divergence as the difference of face-averaged normal components, with the
/// normal component set to zero on boundary faces. The domain sum vanishes by
/// telescoping.
pub fn divergence(u: &VectorField) -> ScalarField {
    let grid = *u.grid();
    let mut out = vec![0.0; grid.cell_count()];
    for axis in 0..grid.dim() {
        let d = central_diff(u.component(axis), &grid, axis, Ghost::Reflect);
        for (o, x) in out.iter_mut().zip(d) {
            *o += x;
        }
    }
    ScalarField::from_values(grid, out).expect("divergence shape")
}

/// How a cell coefficient is carried to the face between two cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FaceAverage {
    /// `(a_L + a_R) / 2`.
    #[default]
    Arithmetic,
    /// `2 a_L a_R / (a_L + a_R)`, zero when either side vanishes. For
    /// nonnegative coefficients only.
    Harmonic,
}

impl FaceAverage {
    #[inline]
    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            FaceAverage::Arithmetic => 0.5 * (a + b),
            FaceAverage::Harmonic => {
                let s = a + b;
                if s > 0.0 {
                    2.0 * a * b / s
                } else {
                    0.0
                }
            }
        }
    }
}

/// `div(a grad f)` in flux form: arithmetic face coefficient, face gradient
/// `(f_R - f_L) / h`, zero flux through the boundary.
pub fn divergence_flux(a: &ScalarField, f: &ScalarField) -> ScalarField {
    divergence_flux_with(a, f, FaceAverage::Arithmetic)
}

/// [`divergence_flux`] with a chosen face average of `a`.
pub fn divergence_flux_with(a: &ScalarField, f: &ScalarField, face: FaceAverage) -> ScalarField {
    let grid = *f.grid();
    let (av, fv) = (a.values(), f.values());
    let mut out = vec![0.0; grid.cell_count()];
    for axis in 0..grid.dim() {
        let inv_h2 = 1.0 / (grid.h(axis) * grid.h(axis));
        let n = grid.n(axis);
        for_each_cell(&grid, |i, j, idx| {
            let k = if axis == 0 { i } else { j };
            let mut acc = 0.0;
            if k + 1 < n {
                let r = if axis == 0 { grid.index(i + 1, j) } else { grid.index(i, j + 1) };
                acc += face.apply(av[idx], av[r]) * (fv[r] - fv[idx]);
            }
            if k > 0 {
                let l = if axis == 0 { grid.index(i - 1, j) } else { grid.index(i, j - 1) };
                acc -= face.apply(av[idx], av[l]) * (fv[idx] - fv[l]);
            }
            out[idx] += acc * inv_h2;
        });
    }
    ScalarField::from_values(grid, out).expect("flux divergence shape")
}

/// Neumann Laplacian, identical to `divergence_flux(1, f)`.
pub fn laplacian(f: &ScalarField) -> ScalarField {
    let ones = ScalarField::constant(*f.grid(), 1.0);
    divergence_flux(&ones, f)
}

/// Symmetric per-cell tensor: `[xx]` in 1D, `[xx, xy, yy]` in 2D.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTensorField {
    grid: Grid,
    entries: Vec<Vec<f64>>,
}

impl SymmetricTensorField {
    pub fn zeros(grid: Grid) -> Self {
        let count = grid.dim() * (grid.dim() + 1) / 2;
        SymmetricTensorField {
            grid,
            entries: vec![vec![0.0; grid.cell_count()]; count],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Independent entries in the order `xx`, `xy`, `yy`.
    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    fn slot(&self, k: usize, l: usize) -> usize {
        match (self.grid.dim(), k.min(l), k.max(l)) {
            (1, 0, 0) => 0,
            (2, 0, 0) => 0,
            (2, 0, 1) => 1,
            (2, 1, 1) => 2,
            _ => panic!("tensor index ({k}, {l}) out of range"),
        }
    }

    pub fn get(&self, k: usize, l: usize, idx: usize) -> f64 {
        self.entries[self.slot(k, l)][idx]
    }

    pub fn get_mut(&mut self, k: usize, l: usize) -> &mut [f64] {
        let s = self.slot(k, l);
        &mut self.entries[s]
    }

    /// `T : T` at one cell.
    pub fn contract_self(&self, idx: usize) -> f64 {
        match self.grid.dim() {
            1 => self.entries[0][idx].powi(2),
            _ => {
                let (xx, xy, yy) = (self.entries[0][idx], self.entries[1][idx], self.entries[2][idx]);
                xx * xx + 2.0 * xy * xy + yy * yy
            }
        }
    }

    /// `a . T b` at one cell.
    pub fn quadratic_form(&self, idx: usize, a: &[f64], b: &[f64]) -> f64 {
        let d = self.grid.dim();
        let mut s = 0.0;
        for k in 0..d {
            for l in 0..d {
                s += a[k] * self.get(k, l, idx) * b[l];
            }
        }
        s
    }
}

/// `D = (grad v + grad v^T) / 2` with no-slip (reflecting) ghosts.
pub fn symmetric_gradient(v: &VectorField) -> SymmetricTensorField {
    let grid = *v.grid();
    let d = grid.dim();
    // velocity gradient L[k][l] = d v_k / d x_l
    let l: Vec<Vec<Vec<f64>>> = (0..d)
        .map(|k| {
            (0..d)
                .map(|axis| central_diff(v.component(k), &grid, axis, Ghost::Reflect))
                .collect()
        })
        .collect();
    let mut out = SymmetricTensorField::zeros(grid);
    for k in 0..d {
        for m in k..d {
            let dst = out.get_mut(k, m);
            for idx in 0..grid.cell_count() {
                dst[idx] = 0.5 * (l[k][m][idx] + l[m][k][idx]);
            }
        }
    }
    out
}

/// Row-wise divergence `(div T)_k = sum_l d T_kl / d x_l`, central
/// differences with mirror ghosts.
pub fn divergence_tensor(t: &SymmetricTensorField) -> VectorField {
    let grid = *t.grid();
    let d = grid.dim();
    let mut comps = vec![vec![0.0; grid.cell_count()]; d];
    for (k, comp) in comps.iter_mut().enumerate() {
        for axis in 0..d {
            let slot = t.slot(k, axis);
            let diff = central_diff(&t.entries[slot], &grid, axis, Ghost::Mirror);
            for (o, x) in comp.iter_mut().zip(diff) {
                *o += x;
            }
        }
    }
    VectorField::from_components(grid, comps).expect("tensor divergence shape")
}

/// `v . grad f` for raw cell values with the given ghosting.
pub fn advect_with(values: &[f64], ghost: Ghost, v: &VectorField, scheme: AdvectionScheme) -> Vec<f64> {
    let grid = *v.grid();
    let mut out = vec![0.0; grid.cell_count()];
    for axis in 0..grid.dim() {
        let inv_h = 1.0 / grid.h(axis);
        let vel = v.component(axis);
        for_each_cell(&grid, |i, j, idx| {
            let a = vel[idx];
            if a == 0.0 {
                return;
            }
            let here = values[idx];
            let slope = match scheme {
                AdvectionScheme::Upwind if a > 0.0 => {
                    (here - neighbor(values, &grid, i, j, axis, false, ghost)) * inv_h
                }
                AdvectionScheme::Upwind => {
                    (neighbor(values, &grid, i, j, axis, true, ghost) - here) * inv_h
                }
                AdvectionScheme::Centered => {
                    0.5 * (neighbor(values, &grid, i, j, axis, true, ghost)
                        - neighbor(values, &grid, i, j, axis, false, ghost))
                        * inv_h
                }
            };
            out[idx] += a * slope;
        });
    }
    out
}

/// `v . grad f` for a Neumann scalar field.
pub fn advect(f: &ScalarField, v: &VectorField, scheme: AdvectionScheme) -> ScalarField {
    let out = advect_with(f.values(), Ghost::Mirror, v, scheme);
    ScalarField::from_values(*f.grid(), out).expect("advect shape")
}

/// `div(m v)` in conservative form: face velocity is the average of the two
/// adjacent cells, boundary faces carry no flux, and the face value of `m` is
/// upwinded (or averaged for the centered scheme).
pub(crate) fn transport_divergence(m: &[f64], v: &VectorField, scheme: AdvectionScheme) -> Vec<f64> {
    let grid = *v.grid();
    let mut out = vec![0.0; grid.cell_count()];
    for axis in 0..grid.dim() {
        let inv_h = 1.0 / grid.h(axis);
        let vel = v.component(axis);
        let n = grid.n(axis);
        for_each_cell(&grid, |i, j, idx| {
            let k = if axis == 0 { i } else { j };
            if k + 1 >= n {
                return;
            }
            let r = if axis == 0 { grid.index(i + 1, j) } else { grid.index(i, j + 1) };
            let face_v = 0.5 * (vel[idx] + vel[r]);
            let face_m = match scheme {
                AdvectionScheme::Upwind => {
                    if face_v >= 0.0 {
                        m[idx]
                    } else {
                        m[r]
                    }
                }
                AdvectionScheme::Centered => 0.5 * (m[idx] + m[r]),
            };
            let flux = face_v * face_m * inv_h;
            out[idx] += flux;
            out[r] -= flux;
        });
    }
    out
}
