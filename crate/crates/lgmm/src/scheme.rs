//! Time stepping for the convection-diffusion scheme.
//!
//! One step solves, on the (possibly moved) new mesh,
//!
//! ```text
//! order 1:  (M/dt + nu K) phi  = composed(prev, dt)/dt + F
//! order 2:  (1.5 M/dt + nu K) phi
//!             = (4 composed(prev, dt) - composed(prev2, 2dt)) / (2 dt) + F
//! ```
//!
//! where `composed` is the Jacobian-weighted pullback load from
//! [`crate::transport::composed_load`], `M`/`K` are the mass and stiffness
//! matrices on the new mesh, and `F` is the source/boundary-flux load. The
//! first step of the second-order scheme falls back to the first-order
//! update with identical arithmetic. The system matrix is symmetric positive
//! definite and is solved with plain conjugate gradients; the direct
//! elimination path stays available as a cross-check oracle.

use std::sync::Arc;

use crate::diagnostics::{ledger_series, relative_errors, MeshStats, RunReport};
use crate::fem::{
    assemble_mass, assemble_stiffness, gauss_rule, interpolate, total_integral, ExtensionPolicy,
    PiecewiseLinearFunction, QuadratureRule,
};
use crate::linalg::TridiagonalSystem;
use crate::mesh::{
    advance_mesh, initial_uniform_mesh, IterativeSolution, MeshLevel, MeshMotionConfig,
};
use crate::transport::{composed_load, UpwindMap, VelocityField};
use crate::{Error, Result};

/// Parameters of the time discretization.
#[derive(Debug, Clone)]
pub struct SchemeConfig {
    /// Diffusion coefficient, positive.
    pub nu: f64,
    /// Time-step size, positive.
    pub dt: f64,
    /// Temporal order, 1 or 2.
    pub order: u8,
    /// CG stopping tolerance, relative to the right-hand side norm.
    pub cg_tol: f64,
    /// CG iteration cap; `None` means ten iterations per unknown.
    pub cg_max_iter: Option<usize>,
    /// Handling of characteristic feet outside the previous hull.
    pub extension: ExtensionPolicy,
    /// Gauss points per quadrature segment (1..=16). Five points reproduce
    /// the reference convergence tables.
    pub quad_points: usize,
    /// Subdivide elements at pullback kinks before quadrature. Off for
    /// production table runs; on when auditing the mass identities to
    /// solver precision.
    pub split_at_kinks: bool,
}

impl SchemeConfig {
    /// Config with the standard solver settings.
    pub fn new(nu: f64, dt: f64, order: u8) -> Self {
        SchemeConfig {
            nu,
            dt,
            order,
            cg_tol: 1e-12,
            cg_max_iter: None,
            extension: ExtensionPolicy::LinearExtension,
            quad_points: 5,
            split_at_kinks: false,
        }
    }

    fn assert_valid(&self) {
        assert!(self.nu > 0.0, "diffusion coefficient must be positive");
        assert!(self.dt > 0.0, "time step must be positive");
        assert!(
            self.order == 1 || self.order == 2,
            "scheme order must be 1 or 2"
        );
    }
}

type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Volume source `f(x, t)` and boundary flux data `g` at the two endpoints.
#[derive(Clone)]
pub struct SourceData {
    f: SpaceTimeFn,
    g_left: TimeFn,
    g_right: TimeFn,
}

impl SourceData {
    pub fn new(
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        g_left: impl Fn(f64) -> f64 + Send + Sync + 'static,
        g_right: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        SourceData {
            f: Arc::new(f),
            g_left: Arc::new(g_left),
            g_right: Arc::new(g_right),
        }
    }

    pub fn zero() -> Self {
        SourceData::new(|_, _| 0.0, |_| 0.0, |_| 0.0)
    }

    pub fn f(&self, x: f64, t: f64) -> f64 {
        (self.f)(x, t)
    }

    pub fn g_left(&self, t: f64) -> f64 {
        (self.g_left)(t)
    }

    pub fn g_right(&self, t: f64) -> f64 {
        (self.g_right)(t)
    }
}

impl std::fmt::Debug for SourceData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("SourceData { .. }")
    }
}

/// Rolling state of a time-stepping loop: the newest level, one level of
/// history for the two-step scheme, and the step counter.
#[derive(Debug, Clone)]
pub struct StepState {
    pub current: PiecewiseLinearFunction,
    pub previous: Option<PiecewiseLinearFunction>,
    pub step_index: usize,
    pub time: f64,
}

impl StepState {
    /// State at step zero; the time stamp comes from the function's mesh.
    pub fn initial(phi0: PiecewiseLinearFunction) -> Self {
        let time = phi0.mesh.time;
        StepState {
            current: phi0,
            previous: None,
            step_index: 0,
            time,
        }
    }

    /// Rolls the state forward onto the next computed level.
    pub fn advanced(self, next: PiecewiseLinearFunction) -> Self {
        StepState {
            time: next.mesh.time,
            previous: Some(self.current),
            current: next,
            step_index: self.step_index + 1,
        }
    }
}

/// Source/boundary load: quadrature of `f(., t) psi_j` plus the flux data
/// `g` added to the endpoint entries.
pub fn load_functional(
    src: &SourceData,
    mesh: &MeshLevel,
    t: f64,
    rule: &QuadratureRule,
) -> Vec<f64> {
    let n = mesh.n_points();
    let mut load = vec![0.0; n];
    for k in 0..mesh.n_elements() {
        let xl = mesh.points[k];
        let h = mesh.gap(k);
        for (x, w) in rule.mapped(xl, mesh.points[k + 1]) {
            let v = w * src.f(x, t);
            let lam = (x - xl) / h;
            load[k] += v * (1.0 - lam);
            load[k + 1] += v * lam;
        }
    }
    load[0] += src.g_left(t);
    load[n - 1] += src.g_right(t);
    load
}

/// Solves the symmetric positive definite system `A x = rhs` by conjugate
/// gradients (no preconditioner), stopping at
/// `||rhs - A x||_2 <= tol * ||rhs||_2`. The `rhs` argument is used as the
/// right-hand side; the one stored in `system` is ignored.
///
/// # Errors
/// [`Error::AsymmetryDetected`] if the off-diagonals do not match,
/// [`Error::NoConvergence`] at the iteration cap.
///
/// # Panics
/// Panics if `tol` is not positive or the lengths disagree.
pub fn cg_solve(
    system: &TridiagonalSystem,
    rhs: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<IterativeSolution> {
    assert!(tol > 0.0, "tolerance must be positive");
    let n = system.n();
    assert_eq!(rhs.len(), n, "right-hand side length must match");

    let (index, difference) = system.asymmetry();
    let scale = system
        .diag
        .iter()
        .chain(&system.sup)
        .chain(&system.sub)
        .fold(0.0, |m: f64, &v| m.max(v.abs()));
    if difference > 1e-12 * scale.max(1.0) {
        return Err(Error::AsymmetryDetected { index, difference });
    }

    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| x * y).sum() };
    let b_norm = dot(rhs, rhs).sqrt();
    if b_norm == 0.0 {
        return Ok(IterativeSolution {
            x: vec![0.0; n],
            iterations: 0,
        });
    }

    let mut x = vec![0.0; n];
    let mut r = rhs.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let mut residual = rr.sqrt();
    for iteration in 1..=max_iter {
        let ap = system.multiply(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NoConvergence {
                solver: "CG",
                iterations: iteration,
                residual,
            });
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_next = dot(&r, &r);
        residual = rr_next.sqrt();
        if residual <= tol * b_norm {
            return Ok(IterativeSolution {
                x,
                iterations: iteration,
            });
        }
        let beta = rr_next / rr;
        rr = rr_next;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence {
        solver: "CG",
        iterations: max_iter,
        residual,
    })
}

fn scheme_system(new_mesh: &MeshLevel, mass_factor: f64, nu: f64) -> TridiagonalSystem {
    TridiagonalSystem::scaled_sum(
        &assemble_mass(new_mesh),
        mass_factor,
        &assemble_stiffness(new_mesh),
        nu,
    )
}

fn assert_mesh_time(new_mesh: &MeshLevel, t_new: f64) {
    assert!(
        (new_mesh.time - t_new).abs() <= 1e-9 * (1.0 + t_new.abs()),
        "new mesh is stamped {} but the step targets {}",
        new_mesh.time,
        t_new
    );
}

/// One first-order step onto `new_mesh`. The upwind map and the sources are
/// evaluated at the new time `state.time + cfg.dt`, which must match the
/// stamp on `new_mesh`.
pub fn step_first_order(
    state: &StepState,
    new_mesh: &MeshLevel,
    u: &VelocityField,
    src: &SourceData,
    cfg: &SchemeConfig,
) -> Result<PiecewiseLinearFunction> {
    cfg.assert_valid();
    let t_new = state.time + cfg.dt;
    assert_mesh_time(new_mesh, t_new);
    let rule = gauss_rule(cfg.quad_points)?;
    let map = UpwindMap::new(u, t_new, cfg.dt);
    let composed = composed_load(
        &state.current,
        &map,
        new_mesh,
        &rule,
        cfg.extension,
        cfg.split_at_kinks,
    )?;
    let mut system = scheme_system(new_mesh, 1.0 / cfg.dt, cfg.nu);
    let load = load_functional(src, new_mesh, t_new, &rule);
    for i in 0..system.n() {
        system.rhs[i] = composed[i] / cfg.dt + load[i];
    }
    let cap = cfg.cg_max_iter.unwrap_or(10 * system.n());
    let sol = cg_solve(&system, &system.rhs, cfg.cg_tol, cap)?;
    PiecewiseLinearFunction::new(new_mesh.clone(), sol.x)
}

/// One second-order step onto `new_mesh`. Step one (detected from
/// `state.step_index`) delegates to [`step_first_order`] with identical
/// arithmetic; later steps combine pullbacks of the two stored levels with
/// steps `dt` and `2 dt`.
///
/// # Errors
/// [`Error::MissingHistory`] past the first step without a stored previous
/// level, plus any transport or solver error.
pub fn step_second_order(
    state: &StepState,
    new_mesh: &MeshLevel,
    u: &VelocityField,
    src: &SourceData,
    cfg: &SchemeConfig,
) -> Result<PiecewiseLinearFunction> {
    cfg.assert_valid();
    if state.step_index == 0 {
        return step_first_order(state, new_mesh, u, src, cfg);
    }
    let prev2 = state.previous.as_ref().ok_or(Error::MissingHistory)?;
    let t_new = state.time + cfg.dt;
    assert_mesh_time(new_mesh, t_new);
    let rule = gauss_rule(cfg.quad_points)?;
    let single = UpwindMap::new(u, t_new, cfg.dt);
    let double = UpwindMap::new(u, t_new, 2.0 * cfg.dt);
    let c1 = composed_load(
        &state.current,
        &single,
        new_mesh,
        &rule,
        cfg.extension,
        cfg.split_at_kinks,
    )?;
    let c2 = composed_load(
        prev2,
        &double,
        new_mesh,
        &rule,
        cfg.extension,
        cfg.split_at_kinks,
    )?;
    let mut system = scheme_system(new_mesh, 1.5 / cfg.dt, cfg.nu);
    let load = load_functional(src, new_mesh, t_new, &rule);
    for i in 0..system.n() {
        system.rhs[i] = (4.0 * c1[i] - c2[i]) / (2.0 * cfg.dt) + load[i];
    }
    let cap = cfg.cg_max_iter.unwrap_or(10 * system.n());
    let sol = cg_solve(&system, &system.rhs, cfg.cg_tol, cap)?;
    PiecewiseLinearFunction::new(new_mesh.clone(), sol.x)
}

/// A complete problem statement for [`run_simulation`].
#[derive(Clone)]
pub struct Problem {
    pub domain: (f64, f64),
    pub t_end: f64,
    pub n_elements: usize,
    pub velocity: VelocityField,
    pub source: SourceData,
    pub initial: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub exact: Option<SpaceTimeFn>,
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("domain", &self.domain)
            .field("t_end", &self.t_end)
            .field("n_elements", &self.n_elements)
            .field("velocity", &self.velocity)
            .field("has_exact", &self.exact.is_some())
            .finish()
    }
}

/// Which time levels a run keeps in memory.
#[derive(Debug, Clone)]
pub enum RecordMode {
    /// Every level; required for the error norms against an exact solution.
    Full,
    /// The initial and final levels plus the listed step indices.
    Snapshots(Vec<usize>),
}

/// Everything a run produces: the recorded levels (with the step index of
/// each) and the diagnostics report.
#[derive(Debug)]
pub struct SimulationOutput {
    pub states: Vec<PiecewiseLinearFunction>,
    pub recorded_steps: Vec<usize>,
    pub report: RunReport,
}

/// Number of steps `floor(t_end / dt)`, robust against the representation
/// error of the ratio (2.0 / 1e-4 evaluates just below 20000 in floating
/// point; a relative nudge far above one ulp and far below one step fixes
/// the count without affecting genuinely fractional ratios).
pub fn step_count(t_end: f64, dt: f64) -> usize {
    assert!(dt > 0.0, "time step must be positive");
    assert!(t_end >= 0.0, "final time must be non-negative");
    let ratio = t_end / dt;
    (ratio + 1e-9 * ratio.max(1.0)).floor() as usize
}

/// Runs the scheme from the interpolated initial state to the final time.
///
/// The initial mesh is uniform on the problem domain. With `moving` set,
/// every step first advances the mesh (the motion solve shares the scheme's
/// `dt`; the value in `mesh_cfg` is ignored) and then steps the transport
/// system onto it; otherwise the node set stays fixed and only the time
/// stamp advances. Mesh levels are stamped at exact multiples of `dt`.
///
/// Error norms against `problem.exact` are filled in only for
/// [`RecordMode::Full`] runs with at least one step; the mass ledger and
/// per-step mesh statistics are always complete.
pub fn run_simulation(
    problem: &Problem,
    mesh_cfg: &MeshMotionConfig,
    scheme_cfg: &SchemeConfig,
    moving: bool,
    record: &RecordMode,
) -> Result<SimulationOutput> {
    scheme_cfg.assert_valid();
    let (a, b) = problem.domain;
    let n_t = step_count(problem.t_end, scheme_cfg.dt);
    let mesh0 = initial_uniform_mesh(a, b, problem.n_elements)?;
    let initial = problem.initial.clone();
    let phi0 = interpolate(move |x| initial(x), &mesh0);

    let mut motion = mesh_cfg.clone();
    motion.dt = scheme_cfg.dt;

    let rule = gauss_rule(scheme_cfg.quad_points)?;
    let should_record = |step: usize| -> bool {
        match record {
            RecordMode::Full => true,
            RecordMode::Snapshots(list) => step == 0 || step == n_t || list.contains(&step),
        }
    };

    let mut masses = Vec::with_capacity(n_t + 1);
    let mut load_sums = vec![0.0; 1];
    let mut mesh_stats = Vec::with_capacity(n_t + 1);
    let mut states: Vec<PiecewiseLinearFunction> = Vec::new();
    let mut recorded_steps: Vec<usize> = Vec::new();

    masses.push(total_integral(&phi0));
    mesh_stats.push(MeshStats {
        min_gap: mesh0.min_gap(),
        max_gap: mesh0.max_gap(),
    });
    if should_record(0) {
        states.push(phi0.clone());
        recorded_steps.push(0);
    }

    let mut state = StepState::initial(phi0);
    for step in 1..=n_t {
        let t_new = step as f64 * scheme_cfg.dt;
        let new_mesh = if moving {
            let mut advanced = advance_mesh(&state.current.mesh, &problem.velocity, &motion)?;
            advanced.time = t_new;
            advanced
        } else {
            state.current.mesh.at_time(t_new)
        };
        let next = match scheme_cfg.order {
            1 => step_first_order(&state, &new_mesh, &problem.velocity, &problem.source, scheme_cfg)?,
            _ => step_second_order(&state, &new_mesh, &problem.velocity, &problem.source, scheme_cfg)?,
        };
        masses.push(total_integral(&next));
        let load = load_functional(
            &problem.source,
            &new_mesh,
            state.time + scheme_cfg.dt,
            &rule,
        );
        load_sums.push(load.iter().sum());
        mesh_stats.push(MeshStats {
            min_gap: new_mesh.min_gap(),
            max_gap: new_mesh.max_gap(),
        });
        state = state.advanced(next);
        if should_record(step) {
            states.push(state.current.clone());
            recorded_steps.push(step);
        }
    }

    let mass_ledger = ledger_series(&masses, &load_sums, scheme_cfg.dt, scheme_cfg.order);
    let errors = match (&problem.exact, record) {
        (Some(exact), RecordMode::Full) if n_t >= 1 => {
            let exact = exact.clone();
            Some(relative_errors(&states, move |x, t| exact(x, t))?)
        }
        _ => None,
    };

    Ok(SimulationOutput {
        states,
        recorded_steps,
        report: RunReport {
            errors,
            mass_ledger,
            mesh_stats,
        },
    })
}

////////////////////////////////////////////////////////////////////////////////
