//! Mesh levels and velocity-following node motion.
//!
//! A moving-mesh run keeps one [`MeshLevel`] per time step. Nodes are
//! transported with the flow velocity and smoothed by an elliptic
//! regularization term weighted by `nu_m`; the implicit system for the new
//! node positions is tridiagonal, strictly diagonally dominant, and is solved
//! with SOR. Under the step restriction `dt * |u|_W1inf < 1` the new level
//! keeps the node ordering (no overlap); a violated ordering is reported as
//! [`Error::MeshOverlap`] rather than silently accepted.

use crate::linalg::TridiagonalSystem;
use crate::transport::VelocityField;
use crate::{Error, Result};

/// Node positions at one time level.
///
/// Invariant (enforced by [`MeshLevel::new`]): at least two nodes, strictly
/// increasing. The fields are public for read access; construct through
/// `new` so the invariant holds.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshLevel {
    pub points: Vec<f64>,
    pub time: f64,
}

impl MeshLevel {
    /// Validates and wraps a node vector.
    ///
    /// # Errors
    /// [`Error::InvalidElementCount`] with fewer than two nodes,
    /// [`Error::DegenerateMesh`] if the nodes are not strictly increasing.
    pub fn new(points: Vec<f64>, time: f64) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidElementCount);
        }
        if let Some((index, gap)) = first_nonpositive_gap(&points) {
            return Err(Error::DegenerateMesh { index, gap });
        }
        Ok(MeshLevel { points, time })
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    pub fn n_elements(&self) -> usize {
        self.points.len() - 1
    }

    /// Left end of the hull.
    pub fn a(&self) -> f64 {
        self.points[0]
    }

    /// Right end of the hull.
    pub fn b(&self) -> f64 {
        *self.points.last().unwrap()
    }

    /// Width of element `k`.
    ///
    /// # Panics
    /// Panics if `k` is not an element index.
    pub fn gap(&self, k: usize) -> f64 {
        self.points[k + 1] - self.points[k]
    }

    pub fn min_gap(&self) -> f64 {
        (0..self.n_elements()).map(|k| self.gap(k)).fold(f64::INFINITY, f64::min)
    }

    pub fn max_gap(&self) -> f64 {
        (0..self.n_elements()).map(|k| self.gap(k)).fold(0.0, f64::max)
    }

    /// Same node set re-stamped at another time (used by fixed-mesh runs).
    pub fn at_time(&self, time: f64) -> MeshLevel {
        MeshLevel {
            points: self.points.clone(),
            time,
        }
    }
}

fn first_nonpositive_gap(points: &[f64]) -> Option<(usize, f64)> {
    points
        .windows(2)
        .enumerate()
        .find(|(_, w)| w[1] - w[0] <= 0.0)
        .map(|(i, w)| (i, w[1] - w[0]))
}

/// Parameters of one node-motion step.
#[derive(Debug, Clone)]
pub struct MeshMotionConfig {
    /// Regularization weight; zero degenerates to explicit node transport.
    pub nu_m: f64,
    /// Time-step size.
    pub dt: f64,
    /// Pin the endpoints to their initial positions. With a velocity that
    /// does not vanish on the boundary, leave this off so the endpoints ride
    /// along with the flow (pure transport rows).
    pub clamp_boundary: bool,
    /// SOR relaxation factor, in (0, 2).
    pub sor_omega: f64,
    /// SOR stopping tolerance (residual max-norm relative to the data).
    pub sor_tol: f64,
    /// SOR sweep cap; `None` means ten sweeps per unknown.
    pub sor_max_iter: Option<usize>,
}

impl MeshMotionConfig {
    /// Config with the standard solver settings (omega 1.2, tolerance 1e-12,
    /// sweep cap ten per unknown).
    pub fn new(nu_m: f64, dt: f64, clamp_boundary: bool) -> Self {
        MeshMotionConfig {
            nu_m,
            dt,
            clamp_boundary,
            sor_omega: 1.2,
            sor_tol: 1e-12,
            sor_max_iter: None,
        }
    }

    fn sweep_cap(&self, n: usize) -> usize {
        self.sor_max_iter.unwrap_or(10 * n)
    }
}

/// Discrete node velocities `(next - prev) / dt` between two levels.
#[derive(Debug, Clone)]
pub struct NodeVelocities {
    pub values: Vec<f64>,
    pub dt: f64,
}

/// Uniform mesh with `n_elements` elements on `(a, b)` at time zero.
///
/// The last node is set to `b` exactly.
///
/// # Errors
/// [`Error::InvalidInterval`] if `a >= b` (or either is non-finite),
/// [`Error::InvalidElementCount`] if `n_elements` is zero.
pub fn initial_uniform_mesh(a: f64, b: f64, n_elements: usize) -> Result<MeshLevel> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInterval { a, b });
    }
    if n_elements == 0 {
        return Err(Error::InvalidElementCount);
    }
    let h = (b - a) / n_elements as f64;
    let mut points: Vec<f64> = (0..=n_elements).map(|i| a + i as f64 * h).collect();
    points[n_elements] = b;
    MeshLevel::new(points, 0.0)
}

/// Assembles the implicit system for the new node positions.
///
/// Row `i` (interior) with `D_i = h_{i-1} h_i` built from the previous level:
///
/// ```text
/// (1/dt + 2 nu_m / D_i) P_i - (nu_m / D_i)(P_{i-1} + P_{i+1})
///     = P_i_prev / dt + u_prev[i]
/// ```
///
/// Boundary rows are identity rows: clamped endpoints keep their previous
/// position; unclamped endpoints are transported, `P = P_prev + dt * u_prev`.
/// `u_prev` holds the velocity sampled at the previous nodes and time.
///
/// # Errors
/// [`Error::MismatchedLevels`] if `u_prev` does not match the node count,
/// [`Error::DegenerateMesh`] if a previous gap is non-positive (cannot happen
/// for a level built by [`MeshLevel::new`]).
pub fn assemble_motion_system(
    prev: &MeshLevel,
    u_prev: &[f64],
    cfg: &MeshMotionConfig,
) -> Result<TridiagonalSystem> {
    let n = prev.n_points();
    if u_prev.len() != n {
        return Err(Error::MismatchedLevels {
            expected: n,
            got: u_prev.len(),
        });
    }
    if let Some((index, gap)) = first_nonpositive_gap(&prev.points) {
        return Err(Error::DegenerateMesh { index, gap });
    }
    assert!(cfg.dt > 0.0, "time step must be positive");
    assert!(cfg.nu_m >= 0.0, "regularization weight must be non-negative");

    let mut sys = TridiagonalSystem::zeros(n);
    let p = &prev.points;
    let inv_dt = 1.0 / cfg.dt;

    sys.diag[0] = 1.0;
    sys.rhs[0] = if cfg.clamp_boundary {
        p[0]
    } else {
        p[0] + cfg.dt * u_prev[0]
    };

    for i in 1..n - 1 {
        let d = (p[i] - p[i - 1]) * (p[i + 1] - p[i]);
        let coupling = cfg.nu_m / d;
        sys.sub[i] = -coupling;
        sys.diag[i] = inv_dt + 2.0 * coupling;
        sys.sup[i] = -coupling;
        sys.rhs[i] = p[i] * inv_dt + u_prev[i];
    }

    sys.diag[n - 1] = 1.0;
    sys.rhs[n - 1] = if cfg.clamp_boundary {
        p[n - 1]
    } else {
        p[n - 1] + cfg.dt * u_prev[n - 1]
    };

    Ok(sys)
}

/// Solution of an iterative solve together with the iteration count.
#[derive(Debug, Clone)]
pub struct IterativeSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
}

/// Solves a tridiagonal system by successive over-relaxation.
///
/// The start iterate is `rhs / diag`, so diagonal systems (and the identity
/// rows of the motion system) are exact after a single sweep. Convergence is
/// declared when the residual max-norm drops to
/// `tol * (1 + max-norm of rhs)`.
///
/// # Errors
/// [`Error::NoConvergence`] if the sweep cap is reached first.
///
/// # Panics
/// Panics if `omega` is outside `(0, 2)`, `tol` is not positive, or a
/// diagonal entry is zero.
pub fn sor_solve(
    system: &TridiagonalSystem,
    omega: f64,
    tol: f64,
    max_iter: usize,
) -> Result<IterativeSolution> {
    assert!(omega > 0.0 && omega < 2.0, "omega must lie in (0, 2)");
    assert!(tol > 0.0, "tolerance must be positive");
    let n = system.n();
    assert!(
        system.diag.iter().all(|&d| d != 0.0),
        "SOR requires a nonzero diagonal"
    );

    let rhs_norm = system.rhs.iter().fold(0.0, |m: f64, &v| m.max(v.abs()));
    let target = tol * (1.0 + rhs_norm);

    let mut x: Vec<f64> = system
        .rhs
        .iter()
        .zip(&system.diag)
        .map(|(b, d)| b / d)
        .collect();

    let mut residual = f64::INFINITY;
    for sweep in 1..=max_iter {
        for i in 0..n {
            let mut sigma = system.rhs[i];
            if i > 0 {
                sigma -= system.sub[i] * x[i - 1];
            }
            if i + 1 < n {
                sigma -= system.sup[i] * x[i + 1];
            }
            let gs = sigma / system.diag[i];
            x[i] += omega * (gs - x[i]);
        }
        residual = system.residual_max_norm(&x);
        if residual <= target {
            return Ok(IterativeSolution {
                x,
                iterations: sweep,
            });
        }
    }
    Err(Error::NoConvergence {
        solver: "SOR",
        iterations: max_iter,
        residual,
    })
}

/// Advances a mesh level by one motion step.
///
/// The velocity is sampled at the previous node positions and the previous
/// time. The returned level is stamped `prev.time + cfg.dt`.
///
/// # Errors
/// [`Error::MeshOverlap`] if the new nodes are not strictly increasing,
/// plus any assembly or solver error.
pub fn advance_mesh(prev: &MeshLevel, u: &VelocityField, cfg: &MeshMotionConfig) -> Result<MeshLevel> {
    let u_prev: Vec<f64> = prev.points.iter().map(|&x| u.eval(x, prev.time)).collect();
    let system = assemble_motion_system(prev, &u_prev, cfg)?;
    let solved = sor_solve(
        &system,
        cfg.sor_omega,
        cfg.sor_tol,
        cfg.sweep_cap(prev.n_points()),
    )?;
    let time = prev.time + cfg.dt;
    if let Some((index, gap)) = first_nonpositive_gap(&solved.x) {
        return Err(Error::MeshOverlap { index, gap, time });
    }
    Ok(MeshLevel {
        points: solved.x,
        time,
    })
}

/// Step-size margin `dt * |u|_W1inf`; mesh motion and characteristic feet
/// are well behaved while this stays below one (the scheme hypotheses ask
/// for at most 1/8).
pub fn cfl_margin(u: &VelocityField, dt: f64) -> f64 {
    dt * u.w1_inf_norm()
}

/// Smallest value of `u(P_{i+1}) - u(P_i) + h_i / dt` over the elements of
/// `prev`, the quantity whose positivity guarantees that explicit node
/// transport keeps the ordering. Used by the randomized non-overlap checks.
pub fn motion_positivity_margin(prev: &MeshLevel, u_prev: &[f64], dt: f64) -> f64 {
    assert_eq!(u_prev.len(), prev.n_points(), "velocity samples must match nodes");
    (0..prev.n_elements())
        .map(|i| u_prev[i + 1] - u_prev[i] + prev.gap(i) / dt)
        .fold(f64::INFINITY, f64::min)
}

/// Discrete node velocities between two consecutive levels.
///
/// # Errors
/// [`Error::MismatchedLevels`] if the node counts differ,
/// [`Error::InvalidInterval`] if the times are not strictly increasing.
pub fn node_velocities(prev: &MeshLevel, next: &MeshLevel) -> Result<NodeVelocities> {
    if prev.n_points() != next.n_points() {
        return Err(Error::MismatchedLevels {
            expected: prev.n_points(),
            got: next.n_points(),
        });
    }
    let dt = next.time - prev.time;
    if !(dt > 0.0) {
        return Err(Error::InvalidInterval {
            a: prev.time,
            b: next.time,
        });
    }
    let values = next
        .points
        .iter()
        .zip(&prev.points)
        .map(|(n, p)| (n - p) / dt)
        .collect();
    Ok(NodeVelocities { values, dt })
}

/// Evaluates the continuous extension of nodal velocities at `x`: linear
/// interpolation inside the hull of `level_at_t`, linear extension of the
/// end elements outside it.
///
/// # Panics
/// Panics if the velocity count does not match the node count.
pub fn velocity_extension(velocities: &NodeVelocities, level_at_t: &MeshLevel, x: f64) -> f64 {
    assert_eq!(
        velocities.values.len(),
        level_at_t.n_points(),
        "velocity samples must match nodes"
    );
    let k = crate::fem::locate_element(level_at_t, x, 0);
    let xl = level_at_t.points[k];
    let h = level_at_t.gap(k);
    let lam = (x - xl) / h;
    velocities.values[k] * (1.0 - lam) + velocities.values[k + 1] * lam
}

////////////////////////////////////////////////////////////////////////////////

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::thomas_solve;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn zero_field() -> VelocityField {
        VelocityField::zero()
    }

    #[test]
    fn uniform_mesh_examples() {
        let m = initial_uniform_mesh(-1.0, 1.0, 4).unwrap();
        assert_eq!(m.points, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(m.time, 0.0);
        let m = initial_uniform_mesh(0.0, 1.0, 1).unwrap();
        assert_eq!(m.points, vec![0.0, 1.0]);
    }

    #[test]
    fn uniform_mesh_rejects_bad_input() {
        assert_eq!(
            initial_uniform_mesh(1.0, 1.0, 4),
            Err(Error::InvalidInterval { a: 1.0, b: 1.0 })
        );
        assert!(initial_uniform_mesh(2.0, 1.0, 4).is_err());
        assert_eq!(initial_uniform_mesh(0.0, 1.0, 0), Err(Error::InvalidElementCount));
    }

    #[test]
    fn uniform_mesh_hits_right_end_exactly() {
        let m = initial_uniform_mesh(-1.0, 1.0, 7).unwrap();
        assert_eq!(m.b(), 1.0);
        assert_eq!(m.a(), -1.0);
    }

    #[test]
    fn mesh_level_validation() {
        assert_eq!(MeshLevel::new(vec![0.0], 0.0), Err(Error::InvalidElementCount));
        assert_eq!(
            MeshLevel::new(vec![0.0, 0.5, 0.5, 1.0], 0.0),
            Err(Error::DegenerateMesh { index: 1, gap: 0.0 })
        );
        let m = MeshLevel::new(vec![0.0, 0.3, 1.0], 2.5).unwrap();
        assert_eq!(m.n_elements(), 2);
        assert_eq!(m.min_gap(), 0.3);
        assert_eq!(m.max_gap(), 0.7);
    }

    #[test]
    fn motion_system_with_zero_regularization_is_explicit_transport() {
        let prev = MeshLevel::new(vec![0.0, 0.3, 0.7, 1.0], 0.0).unwrap();
        let u_prev = vec![0.1, -0.2, 0.05, 0.0];
        let mut cfg = MeshMotionConfig::new(0.0, 0.05, false);
        cfg.sor_omega = 1.0;
        let sys = assemble_motion_system(&prev, &u_prev, &cfg).unwrap();
        assert!(sys.sub.iter().all(|&v| v == 0.0));
        assert!(sys.sup.iter().all(|&v| v == 0.0));
        let next = advance_mesh(
            &prev,
            &VelocityField::new(
                move |x, _| {
                    // piecewise reconstruction of the samples above
                    if x == 0.0 {
                        0.1
                    } else if x == 0.3 {
                        -0.2
                    } else if x == 0.7 {
                        0.05
                    } else {
                        0.0
                    }
                },
                |_, _| 0.0,
                0.2,
                1.0,
                false,
            ),
            &cfg,
        )
        .unwrap();
        for (i, (&p, &v)) in prev.points.iter().zip(&u_prev).enumerate() {
            assert!((next.points[i] - (p + 0.05 * v)).abs() < 1e-13);
        }
        assert!((next.time - 0.05).abs() < 1e-15);
    }

    #[test]
    fn motion_system_single_interior_node_solution() {
        // prev = [0, 0.25, 1], u = 0, nu_m = 0.1, dt = 0.1, clamped:
        // (1/dt + 2 nu_m / D) P = 0.25/dt + (nu_m / D)(0 + 1), D = 0.25 * 0.75,
        // whose solution is 45.5/166.
        let prev = MeshLevel::new(vec![0.0, 0.25, 1.0], 0.0).unwrap();
        let cfg = MeshMotionConfig::new(0.1, 0.1, true);
        let sys = assemble_motion_system(&prev, &[0.0; 3], &cfg).unwrap();
        let sol = sor_solve(&sys, 1.2, 1e-14, 1000).unwrap();
        assert!((sol.x[1] - 45.5 / 166.0).abs() < 1e-12);
        assert_eq!(sol.x[0], 0.0);
        assert_eq!(sol.x[2], 1.0);

        let next = advance_mesh(&prev, &zero_field(), &cfg).unwrap();
        assert!((next.points[1] - 45.5 / 166.0).abs() < 1e-10);
    }

    #[test]
    fn symmetric_node_is_a_fixed_point() {
        let prev = MeshLevel::new(vec![0.0, 0.5, 1.0], 0.0).unwrap();
        let cfg = MeshMotionConfig::new(0.3, 0.2, true);
        let next = advance_mesh(&prev, &zero_field(), &cfg).unwrap();
        assert!((next.points[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn motion_matrix_is_an_m_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let n_el = rng.gen_range(2..40);
            let mut pts = vec![0.0];
            for _ in 0..n_el {
                pts.push(pts.last().unwrap() + rng.gen_range(0.01..1.0));
            }
            let prev = MeshLevel::new(pts, 0.0).unwrap();
            let u_prev: Vec<f64> = (0..prev.n_points()).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let clamp = rng.gen_bool(0.5);
            let cfg = MeshMotionConfig::new(rng.gen_range(0.0..0.5), 0.01, clamp);
            let sys = assemble_motion_system(&prev, &u_prev, &cfg).unwrap();
            assert!(sys.is_strictly_diagonally_dominant());
            for i in 0..sys.n() {
                assert!(sys.diag[i] > 0.0);
                assert!(sys.sub[i] <= 0.0);
                assert!(sys.sup[i] <= 0.0);
            }
        }
    }

    #[test]
    fn sor_identity_converges_in_one_sweep() {
        let mut sys = TridiagonalSystem::zeros(5);
        sys.diag = vec![1.0; 5];
        sys.rhs = vec![2.0, -3.0, 0.0, 7.0, 1.5];
        let sol = sor_solve(&sys, 1.2, 1e-12, 100).unwrap();
        assert_eq!(sol.iterations, 1);
        assert_eq!(sol.x, sys.rhs);
    }

    #[test]
    fn sor_matches_thomas_on_random_dominant_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &n in &[5usize, 50, 513, 4097] {
            let mut sys = TridiagonalSystem::zeros(n);
            for i in 0..n {
                sys.sub[i] = if i > 0 { rng.gen_range(-1.0..1.0) } else { 0.0 };
                sys.sup[i] = if i + 1 < n { rng.gen_range(-1.0..1.0) } else { 0.0 };
                sys.diag[i] = 2.2 + rng.gen_range(0.0..1.0);
                sys.rhs[i] = rng.gen_range(-5.0..5.0);
            }
            let direct = thomas_solve(&sys).unwrap();
            let iterative = sor_solve(&sys, 1.2, 1e-13, 10 * n).unwrap();
            let scale = direct.iter().fold(0.0, |m: f64, &v| m.max(v.abs()));
            for (a, b) in iterative.x.iter().zip(&direct) {
                assert!((a - b).abs() <= 1e-10 * (1.0 + scale));
            }
        }
    }

    #[test]
    fn sor_reports_no_convergence() {
        let mut sys = TridiagonalSystem::zeros(3);
        sys.diag = vec![2.0; 3];
        sys.sub = vec![0.0, -1.0, -1.0];
        sys.sup = vec![-1.0, -1.0, 0.0];
        sys.rhs = vec![1.0, 1.0, 1.0];
        match sor_solve(&sys, 0.3, 1e-14, 1) {
            Err(Error::NoConvergence {
                solver, residual, ..
            }) => {
                assert_eq!(solver, "SOR");
                assert!(residual > 0.0);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn advance_with_constant_velocity_shifts_all_nodes() {
        let prev = initial_uniform_mesh(-1.0, 1.0, 8).unwrap();
        let u = VelocityField::new(|_, _| 0.75, |_, _| 0.0, 0.75, 0.0, false);
        let cfg = MeshMotionConfig::new(0.01, 0.1, false);
        let next = advance_mesh(&prev, &u, &cfg).unwrap();
        // A rigid shift is an exact solution of the regularized system: the
        // coupling terms cancel on equal gaps.
        for (p, q) in prev.points.iter().zip(&next.points) {
            assert!((q - (p + 0.075)).abs() < 1e-10);
        }
    }

    #[test]
    fn clamped_endpoints_stay_exact() {
        let prev = initial_uniform_mesh(-1.0, 1.0, 16).unwrap();
        let u = VelocityField::new(
            |x, _| (std::f64::consts::PI * x).sin(),
            |x, _| std::f64::consts::PI * (std::f64::consts::PI * x).cos(),
            1.0,
            std::f64::consts::PI,
            true,
        );
        let cfg = MeshMotionConfig::new(0.05, 0.02, true);
        let mut level = prev;
        for _ in 0..50 {
            level = advance_mesh(&level, &u, &cfg).unwrap();
            assert_eq!(level.a(), -1.0);
            assert_eq!(level.b(), 1.0);
        }
    }

    #[test]
    fn overlap_is_a_hard_error() {
        // A velocity with a huge negative gradient and a step chosen far
        // beyond the bound makes explicit transport cross the nodes.
        let prev = MeshLevel::new(vec![0.0, 0.1, 0.2], 0.0).unwrap();
        let u = VelocityField::new(|x, _| -10.0 * x, |_, _| -10.0, 2.0, 10.0, false);
        let cfg = MeshMotionConfig::new(0.0, 0.5, false);
        match advance_mesh(&prev, &u, &cfg) {
            Err(Error::MeshOverlap { .. }) => {}
            other => panic!("expected MeshOverlap, got {other:?}"),
        }
    }

    #[test]
    fn cfl_margin_uses_the_declared_bounds() {
        let u = VelocityField::new(|x, t| 1.0 + (t - x).sin(), |x, t| -(t - x).cos(), 2.0, 1.0, false);
        assert_eq!(cfl_margin(&u, 0.0625), 0.125);
        let u2 = VelocityField::new(
            |x, _| (2.0 * std::f64::consts::PI * x).sin(),
            |x, _| 2.0 * std::f64::consts::PI * (2.0 * std::f64::consts::PI * x).cos(),
            1.0,
            2.0 * std::f64::consts::PI,
            true,
        );
        assert!((cfl_margin(&u2, 1e-4) - 2.0e-4 * std::f64::consts::PI).abs() < 1e-18);
    }

    #[test]
    fn node_velocities_match_the_motion_example() {
        let prev = MeshLevel::new(vec![0.0, 0.25, 1.0], 0.0).unwrap();
        let cfg = MeshMotionConfig::new(0.1, 0.1, true);
        let next = advance_mesh(&prev, &zero_field(), &cfg).unwrap();
        let vel = node_velocities(&prev, &next).unwrap();
        assert!((vel.dt - 0.1).abs() < 1e-15);
        assert!((vel.values[0]).abs() < 1e-12);
        assert!((vel.values[2]).abs() < 1e-12);
        let expected = (45.5 / 166.0 - 0.25) / 0.1;
        assert!((vel.values[1] - expected).abs() < 1e-9);
    }

    #[test]
    fn node_velocities_rejects_mismatched_levels() {
        let a = MeshLevel::new(vec![0.0, 1.0], 0.0).unwrap();
        let b = MeshLevel::new(vec![0.0, 0.5, 1.0], 0.1).unwrap();
        assert!(matches!(
            node_velocities(&a, &b),
            Err(Error::MismatchedLevels { .. })
        ));
        let c = MeshLevel::new(vec![0.0, 1.0], 0.0).unwrap();
        assert!(matches!(
            node_velocities(&a, &c),
            Err(Error::InvalidInterval { .. })
        ));
    }

    #[test]
    fn velocity_extension_interpolates_and_extends() {
        let level = MeshLevel::new(vec![0.0, 1.0, 3.0], 0.0).unwrap();
        let vel = NodeVelocities {
            values: vec![1.0, 2.0, 5.0],
            dt: 1.0,
        };
        assert!((velocity_extension(&vel, &level, 0.5) - 1.5).abs() < 1e-15);
        assert!((velocity_extension(&vel, &level, 2.0) - 3.5).abs() < 1e-15);
        // Outside the hull the end elements extend linearly.
        assert!((velocity_extension(&vel, &level, 4.0) - 6.5).abs() < 1e-15);
        assert!((velocity_extension(&vel, &level, -1.0) - 0.0).abs() < 1e-15);
    }

    #[test]
    fn positivity_margin_is_positive_under_the_step_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let prev = initial_uniform_mesh(-1.0, 1.0, 32).unwrap();
        for _ in 0..20 {
            let amp: f64 = rng.gen_range(0.1..1.0);
            let dt = 0.9 / amp; // dt * lip = 0.9 < 1
            let u_prev: Vec<f64> = prev.points.iter().map(|&x| amp * (-x)).collect();
            assert!(motion_positivity_margin(&prev, &u_prev, dt) > 0.0);
        }
    }
}
