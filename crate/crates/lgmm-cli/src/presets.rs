//! Built-in benchmark problems, both posed on the interval (-1, 1) with
//! zero volume source and zero boundary flux data.
//!
//! - `example1`: a smooth profile advected by `u = 1 + sin(t - x)` with the
//!   closed-form solution `phi = exp(-(1 - cos(t - x)) / nu)`, used for
//!   convergence studies against the pinned reference tables. The velocity
//!   does not vanish at the endpoints, so moving-mesh runs leave the
//!   boundary nodes unclamped and let them ride with the flow.
//! - `example2`: a narrow bump in the stagnation flow `u = sin(2 pi x)`,
//!   which compresses the profile toward x = 0 over 20000 small steps; no
//!   closed form. The velocity vanishes at the endpoints and the boundary
//!   nodes stay clamped.

use std::f64::consts::PI;
use std::sync::Arc;

use lgmm::scheme::{Problem, SourceData};
use lgmm::transport::VelocityField;

use crate::config::{ConfigError, ExperimentConfig, Preset};

/// `u(x, t) = 1 + sin(t - x)`, with its exact bounds.
pub fn example1_velocity() -> VelocityField {
    VelocityField::new(
        |x, t| 1.0 + (t - x).sin(),
        |x, t| -(t - x).cos(),
        2.0,
        1.0,
        false,
    )
}

/// The travelling-profile benchmark with its closed-form solution.
pub fn example1_problem(nu: f64, n_elements: usize, t_end: f64) -> Problem {
    let exact = move |x: f64, t: f64| (-(1.0 - (t - x).cos()) / nu).exp();
    Problem {
        domain: (-1.0, 1.0),
        t_end,
        n_elements,
        velocity: example1_velocity(),
        source: SourceData::zero(),
        initial: Arc::new(move |x| exact(x, 0.0)),
        exact: Some(Arc::new(exact)),
    }
}

/// `u(x) = sin(2 pi x)`, with its exact bounds.
pub fn example2_velocity() -> VelocityField {
    VelocityField::new(
        |x, _| (2.0 * PI * x).sin(),
        |x, _| 2.0 * PI * (2.0 * PI * x).cos(),
        1.0,
        2.0 * PI,
        true,
    )
}

/// The compressed-bump benchmark, starting from
/// `phi0 = exp(-100 (1 - cos x))`.
pub fn example2_problem(n_elements: usize, t_end: f64) -> Problem {
    Problem {
        domain: (-1.0, 1.0),
        t_end,
        n_elements,
        velocity: example2_velocity(),
        source: SourceData::zero(),
        initial: Arc::new(|x: f64| (-100.0 * (1.0 - x.cos())).exp()),
        exact: None,
    }
}

/// The problem a configuration describes.
pub fn problem(cfg: &ExperimentConfig) -> Result<Problem, ConfigError> {
    match cfg.preset {
        Preset::Example1 => Ok(example1_problem(cfg.nu, cfg.n_elements, cfg.t_end)),
        Preset::Example2 => Ok(example2_problem(cfg.n_elements, cfg.t_end)),
        Preset::Custom => Err(ConfigError::new(
            "preset 'custom' has no built-in problem; assemble one with the library API",
        )),
    }
}

////////////////////////////////////////////////////////////////////////////////

#[cfg(test)]
mod tests {
    use super::*;
    use lgmm::mesh::cfl_margin;

    fn check_gradient(u: &VelocityField, t: f64) {
        let h = 1e-6;
        for k in 0..200 {
            let x = -1.0 + 2.0 * (k as f64 + 0.5) / 200.0;
            let fd = (u.eval(x + h, t) - u.eval(x - h, t)) / (2.0 * h);
            assert!(
                (u.grad(x, t) - fd).abs() < 1e-6,
                "gradient mismatch at x={x}"
            );
        }
    }

    fn check_bounds(u: &VelocityField, t: f64) {
        for k in 0..2000 {
            let x = -1.0 + 2.0 * (k as f64 + 0.5) / 2000.0;
            assert!(u.eval(x, t).abs() <= u.sup_bound + 1e-12);
            assert!(u.grad(x, t).abs() <= u.lipschitz_bound + 1e-12);
        }
    }

    #[test]
    fn velocity_fields_match_their_declared_data() {
        for t in [0.0, 0.37, 2.0] {
            check_gradient(&example1_velocity(), t);
            check_gradient(&example2_velocity(), t);
            check_bounds(&example1_velocity(), t);
            check_bounds(&example2_velocity(), t);
        }
        assert!(!example1_velocity().vanishes_on_boundary);
        let u2 = example2_velocity();
        assert!(u2.vanishes_on_boundary);
        assert!(u2.eval(-1.0, 0.0).abs() < 1e-15);
        assert!(u2.eval(1.0, 0.0).abs() < 1e-15);
    }

    #[test]
    fn travelling_profile_solves_the_equation() {
        // Residual of phi_t + (u phi)_x - nu phi_xx under central
        // differences; a transcription error in any closure would leave an
        // order-one residual.
        let nu = 0.5;
        let problem = example1_problem(nu, 16, 0.5);
        let exact = problem.exact.clone().unwrap();
        let u = &problem.velocity;
        let h = 1e-4;
        for (x, t) in [(-0.7, 0.1), (0.0, 0.3), (0.4, 0.5), (0.9, 0.2)] {
            let phi_t = (exact(x, t + h) - exact(x, t - h)) / (2.0 * h);
            let flux = |y: f64| u.eval(y, t) * exact(y, t);
            let flux_x = (flux(x + h) - flux(x - h)) / (2.0 * h);
            let phi_xx = (exact(x + h, t) - 2.0 * exact(x, t) + exact(x - h, t)) / (h * h);
            let residual = phi_t + flux_x - nu * phi_xx;
            assert!(residual.abs() < 1e-5, "residual {residual} at ({x}, {t})");
        }
    }

    #[test]
    fn initial_states_match_the_profiles() {
        let problem = example1_problem(0.01, 16, 0.5);
        let exact = problem.exact.clone().unwrap();
        for x in [-1.0, -0.3, 0.0, 0.8] {
            assert_eq!((problem.initial)(x), exact(x, 0.0));
        }
        let bump = example2_problem(16, 2.0);
        assert_eq!((bump.initial)(0.0), 1.0);
        assert!((bump.initial)(1.0) < 1e-19);
        assert_eq!((bump.initial)(0.5), (bump.initial)(-0.5));
    }

    #[test]
    fn standard_steps_satisfy_the_step_size_bound() {
        // The coarsest convergence level sits exactly on the 1/8 bound.
        let margin1 = cfl_margin(&example1_velocity(), 8.0 / 128.0);
        assert_eq!(margin1, 0.125);
        let margin2 = cfl_margin(&example2_velocity(), 1e-4);
        assert!(margin2 <= 0.125);
    }
}
