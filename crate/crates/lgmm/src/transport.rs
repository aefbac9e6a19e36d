//! Velocity fields, upwind (characteristic-foot) maps, and the composed
//! advection load.
//!
//! One transport step evaluates, for every test function `psi_j` on the new
//! mesh,
//!
//! ```text
//! load_j = integral over the new hull of
//!              prev(X(x)) * gamma(x) * psi_j(x) dx,
//! X(x)     = x - step * u(x, t),
//! gamma(x) = 1 - step * du/dx (x, t),
//! ```
//!
//! i.e. the previous solution is pulled back along approximate
//! characteristics and weighted by the Jacobian of the pullback. The
//! Jacobian factor is what makes the discrete total mass obey an exact
//! balance identity; dropping it breaks that identity at first order in the
//! step (the diagnostics tests exploit this as a mutation check).

use std::sync::Arc;

use crate::fem::{evaluate_with_hint, ExtensionPolicy, PiecewiseLinearFunction, QuadratureRule};
use crate::mesh::MeshLevel;
use crate::Result;

type SpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A velocity field `u(x, t)` with its spatial gradient and declared bounds.
///
/// `sup_bound` bounds `|u|`, `lipschitz_bound` bounds `|du/dx|`, both over
/// the domain and time window of interest. The bounds enter the step-size
/// margin checks; the solver never samples the field globally to infer them.
#[derive(Clone)]
pub struct VelocityField {
    eval_fn: SpaceTimeFn,
    grad_fn: SpaceTimeFn,
    pub sup_bound: f64,
    pub lipschitz_bound: f64,
    /// True when the field vanishes at both domain endpoints for all times,
    /// which keeps characteristic feet inside the hull.
    pub vanishes_on_boundary: bool,
}

impl std::fmt::Debug for VelocityField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VelocityField")
            .field("sup_bound", &self.sup_bound)
            .field("lipschitz_bound", &self.lipschitz_bound)
            .field("vanishes_on_boundary", &self.vanishes_on_boundary)
            .finish()
    }
}

impl VelocityField {
    pub fn new(
        eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        grad: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        sup_bound: f64,
        lipschitz_bound: f64,
        vanishes_on_boundary: bool,
    ) -> Self {
        assert!(sup_bound >= 0.0 && lipschitz_bound >= 0.0, "bounds must be non-negative");
        VelocityField {
            eval_fn: Arc::new(eval),
            grad_fn: Arc::new(grad),
            sup_bound,
            lipschitz_bound,
            vanishes_on_boundary,
        }
    }

    /// The zero field.
    pub fn zero() -> Self {
        VelocityField::new(|_, _| 0.0, |_, _| 0.0, 0.0, 0.0, true)
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        (self.eval_fn)(x, t)
    }

    pub fn grad(&self, x: f64, t: f64) -> f64 {
        (self.grad_fn)(x, t)
    }

    /// The bound entering every step-size condition:
    /// `max(sup_bound, lipschitz_bound)`.
    pub fn w1_inf_norm(&self) -> f64 {
        self.sup_bound.max(self.lipschitz_bound)
    }
}

/// Upwind map frozen at one time level: `X(x) = x - step * u(x, time)`.
///
/// The scheme uses `step = dt` against the previous level and `step = 2 dt`
/// against the level before it.
#[derive(Debug, Clone)]
pub struct UpwindMap {
    velocity: VelocityField,
    pub time: f64,
    pub step: f64,
}

impl UpwindMap {
    /// # Panics
    /// Panics if `step` is not positive.
    pub fn new(velocity: &VelocityField, time: f64, step: f64) -> Self {
        assert!(step > 0.0, "upwind step must be positive");
        UpwindMap {
            velocity: velocity.clone(),
            time,
            step,
        }
    }

    /// Characteristic foot of `x`.
    pub fn upwind_point(&self, x: f64) -> f64 {
        x - self.step * self.velocity.eval(x, self.time)
    }

    /// Jacobian `1 - step * du/dx(x)` of the map; stays in `[1/2, 3/2]`
    /// whenever `step * lipschitz_bound <= 1/2`.
    pub fn jacobian(&self, x: f64) -> f64 {
        1.0 - self.step * self.velocity.grad(x, self.time)
    }
}

/// Composed advection load `integral prev(X(x)) gamma(x) psi_j(x) dx` for
/// every node `j` of `new_mesh`.
///
/// Quadrature runs element by element with `rule`. With `split_at_kinks`
/// set, each element is first subdivided at the preimages of the previous
/// mesh's nodes, so the integrand is smooth on every quadrature segment and
/// the rule's full order applies; preimages are found by bisection, which is
/// valid while the map is strictly increasing (the split is skipped for an
/// element whose image interval is not increasing). Production table runs
/// keep the split off; the mass-identity checks switch it on.
///
/// Points that land outside the previous hull are handled by `policy`.
///
/// # Errors
/// [`Error::OutOfDomain`](crate::Error::OutOfDomain) if a quadrature point
/// maps outside the previous hull under [`ExtensionPolicy::Reject`].
pub fn composed_load(
    prev: &PiecewiseLinearFunction,
    map: &UpwindMap,
    new_mesh: &MeshLevel,
    rule: &QuadratureRule,
    policy: ExtensionPolicy,
    split_at_kinks: bool,
) -> Result<Vec<f64>> {
    let n_points = new_mesh.n_points();
    let old_elements = prev.mesh.n_elements();
    let mut load = vec![0.0; n_points];
    let mut segments: Vec<f64> = Vec::new();

    for k in 0..new_mesh.n_elements() {
        let xl = new_mesh.points[k];
        let xr = new_mesh.points[k + 1];
        let h = xr - xl;

        segments.clear();
        segments.push(xl);
        if split_at_kinks {
            push_kink_cuts(map, &prev.mesh, xl, xr, &mut segments);
        }
        segments.push(xr);

        // Start the location walk at the same element index on the old mesh;
        // for near-identity maps that is already the right element.
        let mut hint = k.min(old_elements - 1);
        for pair in segments.windows(2) {
            for (x, w) in rule.mapped(pair[0], pair[1]) {
                let y = map.upwind_point(x);
                let value = evaluate_with_hint(prev, y, policy, hint)?;
                hint = crate::fem::locate_element(&prev.mesh, y, hint);
                let contribution = w * value * map.jacobian(x);
                let lam = (x - xl) / h;
                load[k] += contribution * (1.0 - lam);
                load[k + 1] += contribution * lam;
            }
        }
    }
    Ok(load)
}

/// Appends the interior preimages of old-mesh nodes under `map` restricted
/// to `(xl, xr)`, in ascending order. Only meaningful for an increasing map;
/// if the image interval is not increasing, nothing is appended.
fn push_kink_cuts(
    map: &UpwindMap,
    old_mesh: &MeshLevel,
    xl: f64,
    xr: f64,
    out: &mut Vec<f64>,
) {
    let yl = map.upwind_point(xl);
    let yr = map.upwind_point(xr);
    if !(yl < yr) {
        return;
    }
    let pts = &old_mesh.points;
    let lo = pts.partition_point(|&p| p <= yl);
    let hi = pts.partition_point(|&p| p < yr);
    for &node in &pts[lo..hi] {
        // Bisection on X(x) - node over [xl, xr]: X(xl) < node < X(xr).
        let (mut a, mut b) = (xl, xr);
        for _ in 0..100 {
            let mid = 0.5 * (a + b);
            if map.upwind_point(mid) < node {
                a = mid;
            } else {
                b = mid;
            }
            if b - a <= 1e-14 * (xr - xl) {
                break;
            }
        }
        out.push(0.5 * (a + b));
    }
}

/// Outcome of the advisory step-size check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepBoundReport {
    /// The field vanishes on the boundary, so characteristic feet and moved
    /// nodes stay inside the hull.
    pub vanishing_boundary: bool,
    /// `dt * |u|_W1inf <= 1/8`, the margin under which the Jacobians stay
    /// within `[1/2, 3/2]` with room to spare and second-order composition
    /// estimates hold.
    pub step_bound_satisfied: bool,
    /// The margin `dt * |u|_W1inf` itself.
    pub margin: f64,
}

/// Advisory check of the standing assumptions for a velocity/step pair. The
/// solver runs regardless of the outcome; callers decide whether to warn.
pub fn step_bound_check(u: &VelocityField, dt: f64) -> StepBoundReport {
    let margin = dt * u.w1_inf_norm();
    StepBoundReport {
        vanishing_boundary: u.vanishes_on_boundary,
        step_bound_satisfied: margin <= 0.125,
        margin,
    }
}

////////////////////////////////////////////////////////////////////////////////
