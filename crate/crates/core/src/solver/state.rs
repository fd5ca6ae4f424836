use crate::error::{Error, Result};
use crate::fields::{Grid, ScalarField, VectorField};

/// The four unknowns plus time and the prescribed sources.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    /// Mean velocity.
    pub v: VectorField,
    /// Order parameter.
    pub c: ScalarField,
    /// Absolute temperature.
    pub theta: ScalarField,
    /// Heat flux.
    pub q: VectorField,
    /// Body force density.
    pub b: VectorField,
    /// External heat supply.
    pub r: ScalarField,
}

impl State {
    /// Fluid at rest with uniform `c` and `theta`, no flux, no sources.
    pub fn uniform(grid: Grid, c: f64, theta: f64) -> Self {
        State {
            t: 0.0,
            v: VectorField::zeros(grid),
            c: ScalarField::constant(grid, c),
            theta: ScalarField::constant(grid, theta),
            q: VectorField::zeros(grid),
            b: VectorField::zeros(grid),
            r: ScalarField::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Grid {
        self.c.grid()
    }

    pub fn validate(&self) -> Result<()> {
        let g = *self.grid();
        let same = [
            self.v.grid(),
            self.theta.grid(),
            self.q.grid(),
            self.b.grid(),
            self.r.grid(),
        ]
        .iter()
        .all(|other| **other == g);
        if !same {
            return Err(Error::GridMismatch("state fields live on different grids".into()));
        }
        let finite: [(&'static str, bool); 6] = [
            ("v", self.v.all_finite()),
            ("c", self.c.all_finite()),
            ("theta", self.theta.all_finite()),
            ("q", self.q.all_finite()),
            ("b", self.b.all_finite()),
            ("r", self.r.all_finite()),
        ];
        if let Some((field, _)) = finite.iter().find(|(_, ok)| !ok) {
            return Err(Error::invalid_state(field, "non-finite value"));
        }
        if let Some(t) = self.theta.values().iter().find(|&&t| t <= 0.0) {
            return Err(Error::invalid_state(
                "theta",
                format!("absolute temperature must be positive, got {t}"),
            ));
        }
        Ok(())
    }
}
