//! Small linear solvers used by the implicit parts of a step.

use crate::fields::{laplacian, Grid, ScalarField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveFailure {
    pub iterations: usize,
    pub residual: f64,
}

/// Conjugate gradients for a symmetric positive (semi)definite operator.
///
/// Stops when `|r| <= tol * |b|`. A zero right-hand side returns zero.
pub fn conjugate_gradient(
    apply: impl Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>, SolveFailure> {
    let n = b.len();
    let mut x = vec![0.0; n];
    let b_norm = dot(b, b).sqrt();
    if b_norm == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    for it in 0..max_iter {
        if rr.sqrt() <= tol * b_norm {
            return Ok(x);
        }
        let ap = apply(&p);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(SolveFailure {
                iterations: it,
                residual: rr.sqrt() / b_norm,
            });
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
    }
    if rr.sqrt() <= tol * b_norm {
        Ok(x)
    } else {
        Err(SolveFailure {
            iterations: max_iter,
            residual: rr.sqrt() / b_norm,
        })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Banded symmetric positive definite matrix stored by lower diagonals:
/// `diags[d][i] = A[i][i - d]` (entries with `i < d` unused).
#[derive(Debug, Clone)]
pub struct BandedSpd {
    diags: Vec<Vec<f64>>,
}

impl BandedSpd {
    pub fn new(n: usize, half_bandwidth: usize) -> Self {
        BandedSpd {
            diags: vec![vec![0.0; n]; half_bandwidth + 1],
        }
    }

    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        self.diags[hi - lo][hi] += value;
    }

    /// In-place banded Cholesky followed by forward and back substitution.
    pub fn solve(mut self, b: &[f64]) -> Result<Vec<f64>, SolveFailure> {
        let n = b.len();
        let w = self.diags.len() - 1;
        let l = &mut self.diags;
        for i in 0..n {
            for d in (1..=w.min(i)).rev() {
                let j = i - d;
                let mut s = l[d][i];
                for k in 1..=w {
                    if d + k > w || k > j {
                        break;
                    }
                    s -= l[d + k][i] * l[k][j];
                }
                l[d][i] = s / l[0][j];
            }
            let mut s = l[0][i];
            for d in 1..=w.min(i) {
                s -= l[d][i] * l[d][i];
            }
            if s <= 0.0 {
                return Err(SolveFailure {
                    iterations: i,
                    residual: f64::NAN,
                });
            }
            l[0][i] = s.sqrt();
        }
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for d in 1..=w.min(i) {
                s -= l[d][i] * y[i - d];
            }
            y[i] = s / l[0][i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for d in 1..=w {
                if i + d >= n {
                    break;
                }
                s -= l[d][i + d] * y[i + d];
            }
            y[i] = s / l[0][i];
        }
        Ok(y)
    }
}

/// Solves `(I + alpha L^2) x = b` where `L` is the Neumann Laplacian.
///
/// 1D grids use a pentadiagonal Cholesky factorization; 2D grids use
/// conjugate gradients. `L^2` annihilates constants, so `sum x = sum b` holds
/// up to the solver residual; the mean is restored exactly afterwards.
pub fn solve_biharmonic_shift(grid: &Grid, alpha: f64, b: &[f64], tol: f64) -> Result<Vec<f64>, SolveFailure> {
    if alpha == 0.0 {
        return Ok(b.to_vec());
    }
    let mut x = if grid.dim() == 1 {
        let n = grid.nx();
        let ih2 = 1.0 / (grid.h(0) * grid.h(0));
        // Laplacian rows as (offset, coeff)
        let lap_row = |i: usize| -> Vec<(usize, f64)> {
            let mut row = Vec::with_capacity(3);
            let mut diag = 0.0;
            if i > 0 {
                row.push((i - 1, ih2));
                diag -= ih2;
            }
            if i + 1 < n {
                row.push((i + 1, ih2));
                diag -= ih2;
            }
            row.push((i, diag));
            row
        };
        let rows: Vec<_> = (0..n).map(lap_row).collect();
        let mut a = BandedSpd::new(n, 2);
        for i in 0..n {
            a.add(i, i, 1.0);
            // (L^2)_{ik} = sum_j L_ij L_jk, keep k <= i
            for &(j, lij) in &rows[i] {
                for &(k, ljk) in &rows[j] {
                    if k <= i {
                        a.add(i, k, alpha * lij * ljk);
                    }
                }
            }
        }
        a.solve(b)?
    } else {
        let g = *grid;
        let apply = |x: &[f64]| {
            let f = ScalarField::from_values(g, x.to_vec()).expect("shape");
            let l2 = laplacian(&laplacian(&f));
            x.iter().zip(l2.values()).map(|(a, b)| a + alpha * b).collect::<Vec<_>>()
        };
        conjugate_gradient(apply, b, tol, 20 * grid.cell_count())?
    };
    let shift = (b.iter().sum::<f64>() - x.iter().sum::<f64>()) / x.len() as f64;
    if shift != 0.0 {
        for v in &mut x {
            *v += shift;
        }
    }
    Ok(x)
}
