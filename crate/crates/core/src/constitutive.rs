//! Pointwise material laws.
//!
//! Every function here is pure. Concentration-dependent laws evaluate on the
//! clamped value `clamp(c, -1, 1)` where that keeps them continuous and
//! non-negative outside the physical range (density, mobility, viscosities).
//! The double well `F` is a quartic on all of the reals and `G` has its own
//! plateau branch.

use crate::error::{Error, Result};

/// Constitutive constants of the mixture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    /// Mass density of pure fluid 1 (selected by `c = +1`).
    pub rho10: f64,
    /// Mass density of pure fluid 2 (selected by `c = -1`).
    pub rho20: f64,
    /// Capillarity coefficient.
    pub gamma: f64,
    /// Reference temperature of the double well.
    pub theta0: f64,
    /// Heat-conduction constant, `kappa(theta) = kappa0 / theta`.
    pub kappa0: f64,
    /// Heat-flux relaxation constant.
    pub delta: f64,
    /// Mobility scale, `M(c) = M0 (c^2 - 1)^2`.
    pub m0: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    /// Specific heat, `e0(theta) = C theta`.
    pub heat_capacity: f64,
    /// Barotropic constant, `p = p0 rho`.
    pub p0: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        MaterialParams {
            rho10: 1.2,
            rho20: 0.8,
            gamma: 1e-3,
            theta0: 1.0,
            kappa0: 1.0,
            delta: 0.5,
            m0: 1e-3,
            nu1: 1e-3,
            nu2: 1e-3,
            sigma1: 0.0,
            sigma2: 0.0,
            heat_capacity: 10.0,
            p0: 0.0,
        }
    }
}

impl MaterialParams {
    /// Checks the sign conditions; the error names the offending key.
    pub fn validate(&self) -> Result<()> {
        fn positive(key: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::validation(key, format!("{key} must be > 0")))
            }
        }
        fn non_negative(key: &str, v: f64) -> Result<()> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::validation(key, format!("{key} must be >= 0")))
            }
        }
        positive("rho10", self.rho10)?;
        positive("rho20", self.rho20)?;
        non_negative("gamma", self.gamma)?;
        positive("theta0", self.theta0)?;
        positive("kappa0", self.kappa0)?;
        positive("delta", self.delta)?;
        non_negative("M0", self.m0)?;
        non_negative("nu1", self.nu1)?;
        non_negative("nu2", self.nu2)?;
        non_negative("sigma1", self.sigma1)?;
        non_negative("sigma2", self.sigma2)?;
        positive("C", self.heat_capacity)?;
        if !self.p0.is_finite() {
            return Err(Error::validation("p0", "p0 must be finite"));
        }
        Ok(())
    }

    /// `(1/rho10 - 1/rho20) / 2`: the slope of specific volume in `c`.
    ///
    /// The specific volume is `1/rho = a + beta c` on `[-1, 1]`, which turns the
    /// volume constraint into `div v = beta div j`.
    pub fn specific_volume_slope(&self) -> f64 {
        0.5 * (1.0 / self.rho10 - 1.0 / self.rho20)
    }
}

#[inline]
fn clamp_unit(c: f64) -> f64 {
    c.clamp(-1.0, 1.0)
}

#[inline]
fn density_denominator(c: f64, p: &MaterialParams) -> f64 {
    (p.rho10 + p.rho20) - c * (p.rho10 - p.rho20)
}

/// Mixture density `rho(c)`, continuous and clamped outside `[-1, 1]`.
pub fn density(c: f64, p: &MaterialParams) -> f64 {
    let c = clamp_unit(c);
    if c == 1.0 {
        return p.rho10;
    }
    if c == -1.0 {
        return p.rho20;
    }
    2.0 * p.rho10 * p.rho20 / density_denominator(c, p)
}

/// `d rho / dc`; zero on the clamped branches.
pub fn density_derivative(c: f64, p: &MaterialParams) -> f64 {
    if c.abs() > 1.0 {
        return 0.0;
    }
    let d = density_denominator(c, p);
    2.0 * p.rho10 * p.rho20 * (p.rho10 - p.rho20) / (d * d)
}

/// Conserved composition density `m = rho(c) c`.
pub fn composition_density(c: f64, p: &MaterialParams) -> f64 {
    density(c, p) * c
}

/// Inverse of [`composition_density`]. `m(c)` is strictly increasing on the
/// reals, linear with slope `rho10` above `c = 1` and `rho20` below `c = -1`.
pub fn concentration_from_composition(m: f64, p: &MaterialParams) -> f64 {
    if m >= p.rho10 {
        m / p.rho10
    } else if m <= -p.rho20 {
        m / p.rho20
    } else {
        // m (S - c D) = 2 rho10 rho20 c
        let s = p.rho10 + p.rho20;
        let d = p.rho10 - p.rho20;
        m * s / (2.0 * p.rho10 * p.rho20 + m * d)
    }
}

/// Smallest slope `dm/dc` over the reals.
pub fn min_composition_slope(p: &MaterialParams) -> f64 {
    let s = p.rho10 + p.rho20;
    let slope = |c: f64| {
        let d = density_denominator(c, p);
        2.0 * p.rho10 * p.rho20 * s / (d * d)
    };
    slope(-1.0).min(slope(1.0)).min(p.rho10).min(p.rho20)
}

/// Double well `F(c) = (c^2 - 1)^2`.
pub fn double_well_f(c: f64) -> f64 {
    let s = c * c - 1.0;
    s * s
}

pub fn double_well_f_prime(c: f64) -> f64 {
    4.0 * c * (c * c - 1.0)
}

/// Coupling function `G(c)`: `c^2/2` inside `[-1, 1]`, `1/2` outside.
pub fn coupling_g(c: f64) -> f64 {
    if c.abs() <= 1.0 {
        0.5 * c * c
    } else {
        0.5
    }
}

/// `G'(c)`; at `|c| = 1` returns the interior limit `c`.
pub fn coupling_g_prime(c: f64) -> f64 {
    if c.abs() <= 1.0 {
        c
    } else {
        0.0
    }
}

/// Degenerate mobility `M0 (c^2 - 1)^2`, zero for `|c| >= 1`.
pub fn mobility(c: f64, p: &MaterialParams) -> f64 {
    p.m0 * double_well_f(clamp_unit(c))
}

fn check_temperature(theta: f64) -> Result<()> {
    if theta > 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid_state(
            "theta",
            format!("absolute temperature must be positive, got {theta}"),
        ))
    }
}

/// `kappa(theta) = kappa0 / theta`.
pub fn thermal_conductivity(theta: f64, p: &MaterialParams) -> Result<f64> {
    check_temperature(theta)?;
    Ok(p.kappa0 / theta)
}

/// Shear viscosity, linear in the clamped concentration.
pub fn viscosity_nu(c: f64, p: &MaterialParams) -> f64 {
    let c = clamp_unit(c);
    0.5 * (p.nu1 * (1.0 + c) + p.nu2 * (1.0 - c))
}

/// Bulk viscosity, linear in the clamped concentration.
pub fn viscosity_sigma(c: f64, p: &MaterialParams) -> f64 {
    let c = clamp_unit(c);
    0.5 * (p.sigma1 * (1.0 + c) + p.sigma2 * (1.0 - c))
}

/// Barotropic pressure `p0 rho(c)`.
pub fn pressure(c: f64, p: &MaterialParams) -> f64 {
    p.p0 * density(c, p)
}

/// Pressure potential `P(rho) = p0 ln rho`, so that `p = rho^2 dP/drho`.
pub fn pressure_potential_of_density(rho: f64, p: &MaterialParams) -> f64 {
    p.p0 * rho.ln()
}

pub fn pressure_potential(c: f64, p: &MaterialParams) -> f64 {
    pressure_potential_of_density(density(c, p), p)
}

fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Generalized temperature `u = theta + |q|^2 / kappa0`.
pub fn generalized_temperature(theta: f64, q: &[f64], p: &MaterialParams) -> f64 {
    theta + norm_sq(q) / p.kappa0
}

/// Temperature-only part `psi0(theta) = C theta (1 - ln theta)`.
pub fn free_energy_thermal(theta: f64, p: &MaterialParams) -> f64 {
    p.heat_capacity * theta * (1.0 - theta.ln())
}

/// Helmholtz free energy per unit mass.
pub fn free_energy_density(
    theta: f64,
    c: f64,
    grad_c: &[f64],
    q: &[f64],
    p: &MaterialParams,
) -> Result<f64> {
    check_temperature(theta)?;
    let q2 = norm_sq(q);
    Ok(p.theta0 * double_well_f(c)
        + (theta + q2 / p.kappa0) * coupling_g(c)
        + 0.5 * p.gamma * norm_sq(grad_c)
        + pressure_potential(c, p)
        + p.delta / p.kappa0 * q2
        + free_energy_thermal(theta, p))
}

/// Entropy per unit mass, `eta = -d psi / d theta = C ln theta - G(c)`.
pub fn entropy_density(theta: f64, c: f64, p: &MaterialParams) -> Result<f64> {
    check_temperature(theta)?;
    Ok(p.heat_capacity * theta.ln() - coupling_g(c))
}

/// Internal energy per unit mass, `C theta + theta0 F + gamma/2 |grad c|^2 + P`.
pub fn internal_energy_density(
    theta: f64,
    c: f64,
    grad_c: &[f64],
    p: &MaterialParams,
) -> Result<f64> {
    check_temperature(theta)?;
    Ok(p.heat_capacity * theta
        + p.theta0 * double_well_f(c)
        + 0.5 * p.gamma * norm_sq(grad_c)
        + pressure_potential(c, p))
}

/// Heat-flux part of the free energy, `(delta + G(c)) |q|^2 / kappa0`.
///
/// `psi = e - theta eta + heat_flux_energy`.
pub fn heat_flux_energy(c: f64, q: &[f64], p: &MaterialParams) -> f64 {
    (p.delta + coupling_g(c)) * norm_sq(q) / p.kappa0
}

/// `W(c; u) = theta0 F(c) + u G(c)`.
pub fn well_potential(c: f64, u: f64, p: &MaterialParams) -> f64 {
    p.theta0 * double_well_f(c) + u * coupling_g(c)
}

pub fn well_potential_prime(c: f64, u: f64, p: &MaterialParams) -> f64 {
    p.theta0 * double_well_f_prime(c) + u * coupling_g_prime(c)
}

/// Minimizers of `W(.; u)` in increasing order: `[0]` without a miscibility
/// gap (`u >= 4 theta0`), otherwise `[-c+, c+]` with `c+ = sqrt(1 - u / 4 theta0)`.
pub fn well_minima(u: f64, p: &MaterialParams) -> Vec<f64> {
    let critical = 4.0 * p.theta0;
    if u >= critical {
        vec![0.0]
    } else {
        let c = (1.0 - u / critical).sqrt();
        vec![-c, c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pair() -> MaterialParams {
        MaterialParams {
            rho10: 1000.0,
            rho20: 500.0,
            ..MaterialParams::default()
        }
    }

    #[test]
    fn density_values() {
        let p = pair();
        assert_relative_eq!(density(0.0, &p), 2000.0 / 3.0, max_relative = 1e-15);
        assert_eq!(density(1.0, &p), 1000.0);
        assert_eq!(density(-1.0, &p), 500.0);
        assert_eq!(density(2.0, &p), 1000.0);
        assert_eq!(density(-7.0, &p), 500.0);
        // formula at the endpoint agrees with the clamped branch
        let formula = 2.0 * p.rho10 * p.rho20 / density_denominator(1.0, &p);
        assert_relative_eq!(formula, density(1.0 + 1e-9, &p), max_relative = 1e-14);
    }

    #[test]
    fn density_derivative_values() {
        let p = pair();
        assert_relative_eq!(density_derivative(0.0, &p), 2000.0 / 9.0, max_relative = 1e-14);
        assert_eq!(density_derivative(1.5, &p), 0.0);
        let matched = MaterialParams {
            rho10: 3.0,
            rho20: 3.0,
            ..p
        };
        for c in [-0.9, 0.0, 0.4] {
            assert_eq!(density_derivative(c, &matched), 0.0);
        }
    }

    #[test]
    fn composition_roundtrip() {
        let p = pair();
        for &c in &[-1.7, -1.0, -0.3, 0.0, 0.25, 0.999, 1.0, 1.4] {
            let m = composition_density(c, &p);
            assert_relative_eq!(concentration_from_composition(m, &p), c, epsilon = 1e-14);
        }
    }

    #[test]
    fn well_and_coupling() {
        assert_eq!(double_well_f(0.0), 1.0);
        assert_eq!(double_well_f(1.0), 0.0);
        assert_eq!(double_well_f(-1.0), 0.0);
        assert_eq!(double_well_f_prime(0.0), 0.0);
        assert_eq!(double_well_f_prime(1.0), 0.0);
        assert_eq!(double_well_f_prime(-1.0), 0.0);
        assert_eq!(double_well_f(2.0), 9.0);
        assert_eq!(double_well_f_prime(2.0), 24.0);

        assert_eq!(coupling_g(0.0), 0.0);
        assert_eq!(coupling_g_prime(0.0), 0.0);
        assert_eq!(coupling_g(0.5), 0.125);
        assert_eq!(coupling_g_prime(0.5), 0.5);
        assert_eq!(coupling_g(2.0), 0.5);
        assert_eq!(coupling_g_prime(2.0), 0.0);
        assert_eq!(coupling_g_prime(1.0), 1.0);
        assert_eq!(coupling_g_prime(-1.0), -1.0);
    }

    #[test]
    fn mobility_values() {
        let p = MaterialParams {
            m0: 2.5,
            ..pair()
        };
        assert_eq!(mobility(0.0, &p), 2.5);
        assert_eq!(mobility(1.0, &p), 0.0);
        assert_eq!(mobility(-1.0, &p), 0.0);
        assert_eq!(mobility(1.5, &p), 0.0);
    }

    #[test]
    fn conductivity() {
        let p = MaterialParams {
            kappa0: 1.0,
            ..pair()
        };
        assert_eq!(thermal_conductivity(1.0, &p).unwrap(), 1.0);
        assert_eq!(thermal_conductivity(2.0, &p).unwrap(), 0.5);
        let p3 = MaterialParams { kappa0: 3.0, ..p };
        assert_eq!(thermal_conductivity(0.5, &p3).unwrap(), 6.0);
        assert!(matches!(
            thermal_conductivity(0.0, &p),
            Err(Error::InvalidState { field: "theta", .. })
        ));
        assert!(thermal_conductivity(-1.0, &p).is_err());
    }

    #[test]
    fn viscosity_interpolation() {
        let p = MaterialParams {
            nu1: 3.0,
            nu2: 1.0,
            sigma1: 0.2,
            sigma2: 0.6,
            ..pair()
        };
        assert_eq!(viscosity_nu(1.0, &p), 3.0);
        assert_eq!(viscosity_nu(-1.0, &p), 1.0);
        assert_eq!(viscosity_nu(0.0, &p), 2.0);
        assert_eq!(viscosity_nu(4.0, &p), 3.0);
        assert_relative_eq!(viscosity_sigma(0.0, &p), 0.4, max_relative = 1e-15);
        let flat = MaterialParams {
            nu1: 0.7,
            nu2: 0.7,
            ..p
        };
        for c in [-1.0, -0.2, 0.5, 1.0] {
            assert_relative_eq!(viscosity_nu(c, &flat), 0.7, max_relative = 1e-15);
        }
    }

    #[test]
    fn pressure_law() {
        let p = MaterialParams { p0: 2.0, ..pair() };
        assert_eq!(pressure(1.0, &p), 2000.0);
        let off = MaterialParams { p0: 0.0, ..p };
        assert_eq!(pressure(0.3, &off), 0.0);
        assert_eq!(pressure_potential_of_density(1.0, &p), 0.0);
        // p = rho^2 dP/drho by central differencing P(rho)
        let h = 1e-3;
        let rho = 1000.0;
        let dp = (pressure_potential_of_density(rho + h, &p)
            - pressure_potential_of_density(rho - h, &p))
            / (2.0 * h);
        assert_relative_eq!(rho * rho * dp, 2000.0, max_relative = 1e-8);
    }

    #[test]
    fn free_energy_and_entropy_values() {
        let p = MaterialParams {
            p0: 0.0,
            heat_capacity: 3.0,
            theta0: 1.0,
            ..pair()
        };
        let psi = free_energy_density(1.0, 1.0, &[0.0], &[0.0], &p).unwrap();
        assert_relative_eq!(psi, 0.5 + 3.0, max_relative = 1e-15);
        let psi0 = free_energy_density(1.0, 0.0, &[0.0], &[0.0], &p).unwrap();
        assert_relative_eq!(psi0, 1.0 + 3.0, max_relative = 1e-15);
        assert_eq!(entropy_density(1.0, 0.0, &p).unwrap(), 0.0);
        assert_eq!(entropy_density(1.0, 1.0, &p).unwrap(), -0.5);
        assert!(free_energy_density(0.0, 0.0, &[0.0], &[0.0], &p).is_err());
        assert!(entropy_density(-2.0, 0.0, &p).is_err());
        assert!(internal_energy_density(0.0, 0.0, &[0.0], &p).is_err());
    }

    #[test]
    fn free_energy_identity_on_samples() {
        let p = MaterialParams {
            p0: 1.3,
            heat_capacity: 2.0,
            ..pair()
        };
        let mut s = 0x1234_5678_9abc_def0_u64;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let theta = 0.1 + 3.0 * next();
            let c = -1.3 + 2.6 * next();
            let g = [next() - 0.5, next() - 0.5];
            let q = [2.0 * next() - 1.0, 2.0 * next() - 1.0];
            let psi = free_energy_density(theta, c, &g, &q, &p).unwrap();
            let e = internal_energy_density(theta, c, &g, &p).unwrap();
            let eta = entropy_density(theta, c, &p).unwrap();
            let rhs = e - theta * eta + heat_flux_energy(c, &q, &p);
            assert!((psi - rhs).abs() <= 1e-12 * psi.abs().max(1.0));
            // without heat flux the identity is the plain Legendre relation
            let psi_q0 = free_energy_density(theta, c, &g, &[0.0, 0.0], &p).unwrap();
            assert!((psi_q0 - (e - theta * eta)).abs() <= 1e-12 * psi_q0.abs().max(1.0));
        }
    }

    #[test]
    fn well_minima_regimes() {
        let p = MaterialParams {
            theta0: 1.5,
            ..pair()
        };
        assert_eq!(well_minima(6.0, &p), vec![0.0]);
        assert_eq!(well_minima(9.0, &p), vec![0.0]);
        assert_eq!(well_minima(0.0, &p), vec![-1.0, 1.0]);
        let m = well_minima(3.0, &p);
        assert_relative_eq!(m[1], std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-15);
        assert_relative_eq!(m[0], -std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-15);
    }

    #[test]
    fn validation_names_key() {
        let bad = MaterialParams {
            kappa0: -1.0,
            ..MaterialParams::default()
        };
        let err = bad.validate().unwrap_err().to_string();
        assert!(err.contains("kappa0 must be > 0"), "{err}");
        assert!(MaterialParams::default().validate().is_ok());
    }
}
