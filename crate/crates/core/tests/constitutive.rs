use proptest::prelude::*;
use quasisep::constitutive::*;

const H: f64 = 1e-5;

fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// `|a - b| <= tol * max(|b|, 1)`.
fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn params() -> MaterialParams {
    MaterialParams {
        p0: 0.7,
        ..MaterialParams::default()
    }
}

fn vec2() -> impl Strategy<Value = [f64; 2]> {
    [-2.0..2.0_f64, -2.0..2.0_f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn psi_theta_is_minus_entropy(theta in 0.05..5.0_f64, c in -1.5..1.5_f64, g in vec2(), q in vec2()) {
        let p = params();
        let fd = central(|t| free_energy_density(t, c, &g, &q, &p).unwrap(), theta, H);
        let eta = entropy_density(theta, c, &p).unwrap();
        prop_assert!(close(fd, -eta, 1e-6), "fd {fd} vs -eta {}", -eta);
    }

    #[test]
    fn psi_q_matches_cattaneo_restriction(theta in 0.05..5.0_f64, c in -1.5..1.5_f64, g in vec2(), q in vec2()) {
        let p = params();
        for k in 0..2 {
            let fd = central(
                |x| {
                    let mut qq = q;
                    qq[k] = x;
                    free_energy_density(theta, c, &g, &qq, &p).unwrap()
                },
                q[k],
                H,
            );
            let expected = 2.0 / p.kappa0 * (p.delta + coupling_g(c)) * q[k];
            prop_assert!(close(fd, expected, 1e-6), "component {k}: fd {fd} vs {expected}");
        }
    }

    #[test]
    fn free_energy_decomposition(theta in 0.05..5.0_f64, c in -1.5..1.5_f64, g in vec2(), q in vec2()) {
        let p = params();
        let psi = free_energy_density(theta, c, &g, &q, &p).unwrap();
        let e = internal_energy_density(theta, c, &g, &p).unwrap();
        let eta = entropy_density(theta, c, &p).unwrap();
        let rhs = e - theta * eta + heat_flux_energy(c, &q, &p);
        prop_assert!(close(psi, rhs, 1e-12));
        // psi = e + theta psi_theta up to the flux part
        let psi_theta = central(|t| free_energy_density(t, c, &g, &q, &p).unwrap(), theta, H);
        prop_assert!(close(psi, e + theta * psi_theta + heat_flux_energy(c, &q, &p), 1e-6));
    }

    #[test]
    fn density_derivative_is_slope(c in -0.999..0.999_f64) {
        let p = params();
        let fd = central(|x| density(x, &p), c, H);
        prop_assert!(close(fd, density_derivative(c, &p), 1e-8));
    }

    #[test]
    fn density_positive_and_monotone(a in -3.0..3.0_f64, b in -3.0..3.0_f64) {
        let p = params();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(density(lo, &p) > 0.0);
        prop_assert!(density(lo, &p) <= density(hi, &p));
    }

    #[test]
    fn well_and_coupling_slopes(c in -2.0..2.0_f64) {
        prop_assume!((c.abs() - 1.0).abs() > 1e-3);
        prop_assert!(close(central(double_well_f, c, H), double_well_f_prime(c), 1e-8));
        prop_assert!(close(central(coupling_g, c, H), coupling_g_prime(c), 1e-8));
        prop_assert!(double_well_f(c) > 0.0);
        let g = coupling_g(c);
        prop_assert!((0.0..=0.5).contains(&g));
        if c.abs() > 1.0 {
            prop_assert_eq!(coupling_g_prime(c), 0.0);
        }
    }

    #[test]
    fn mobility_bounds(c in -3.0..3.0_f64) {
        let p = params();
        let m = mobility(c, &p);
        prop_assert!(m >= 0.0 && m <= mobility(0.0, &p));
        if c.abs() >= 1.0 {
            prop_assert_eq!(m, 0.0);
        }
    }
}

#[test]
fn density_is_continuous_at_the_clamp() {
    let p = params();
    for end in [-1.0, 1.0_f64] {
        let inside = density(end - end.signum() * 1e-12, &p);
        let outside = density(end + end.signum() * 1e-12, &p);
        assert!((inside - outside).abs() < 1e-9);
    }
    assert_eq!(density(1.0, &p), p.rho10);
    assert_eq!(density(-1.0, &p), p.rho20);
}

#[test]
fn pressure_matches_its_potential() {
    let p = MaterialParams { p0: 2.0, ..params() };
    for rho in [0.5, 1.0, 1.3] {
        let slope = central(|r| pressure_potential_of_density(r, &p), rho, H);
        assert!(close(rho * rho * slope, p.p0 * rho, 1e-8));
    }
}

fn brute_force_minimum(u: f64, p: &MaterialParams) -> f64 {
    (0..=30_000)
        .map(|k| well_potential(-1.5 + 1e-4 * k as f64, u, p))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn well_minima_are_global_minimizers() {
    let p = params();
    for u in [0.0, 0.3, 1.0, 2.0, 3.0, 3.99, 4.0, 4.5, 8.0] {
        let minima = well_minima(u, &p);
        let best = brute_force_minimum(u, &p);
        for &c in &minima {
            assert!(c.abs() < 1.0 || u == 0.0, "u = {u}: |c| = {}", c.abs());
            assert!(well_potential_prime(c, u, &p).abs() < 1e-12, "u = {u}: W'({c})");
            let h = 1e-4;
            let second =
                (well_potential(c + h, u, &p) - 2.0 * well_potential(c, u, &p) + well_potential(c - h, u, &p)) / (h * h);
            // the critical case u = 4 theta0 has W'' = 0 at the origin
            if u != 4.0 * p.theta0 {
                assert!(second > 0.0, "u = {u}: W'' = {second}");
            }
            assert!(well_potential(c, u, &p) <= best + 1e-15, "u = {u}: grid finds a lower value");
        }
    }
    let c = well_minima(2.0 * p.theta0, &p);
    assert!((c[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    assert_eq!(c[0], -c[1]);
}
