//! Piecewise-linear finite elements on a mesh level.
//!
//! Everything here is standard P1 machinery: hat-basis evaluation, nodal
//! interpolation, element location with a hint walk, Gauss-Legendre rules on
//! the reference interval, exact mass/stiffness assembly, and closed-form
//! norms. [`interp_time_derivative`] supplies the extra term that appears in
//! the time derivative of an interpolant whose nodes move: on a moving mesh,
//! d/dt of the interpolant is the interpolated material-style derivative
//! plus a correction proportional to the local slope times the interpolated
//! node velocity; that correction is what this routine returns.

use crate::mesh::{MeshLevel, NodeVelocities};
use crate::{Error, Result};

/// Nodal values attached to a mesh level; evaluates as the continuous
/// piecewise-linear interpolant of those values.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearFunction {
    pub mesh: MeshLevel,
    pub values: Vec<f64>,
}

impl PiecewiseLinearFunction {
    /// # Errors
    /// [`Error::MismatchedLevels`] if the value count differs from the node
    /// count.
    pub fn new(mesh: MeshLevel, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.n_points() {
            return Err(Error::MismatchedLevels {
                expected: mesh.n_points(),
                got: values.len(),
            });
        }
        Ok(PiecewiseLinearFunction { mesh, values })
    }
}

/// Behavior of evaluation outside the mesh hull.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionPolicy {
    /// Continue the end elements linearly (default; preserves affine
    /// functions exactly and keeps the extension Lipschitz).
    LinearExtension,
    /// Freeze the end value.
    ClampEndValue,
    /// Refuse with [`Error::OutOfDomain`].
    Reject,
}

/// Quadrature rule on the reference interval `[-1, 1]`; weights sum to two.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The rule mapped onto `[xl, xr]`, yielding `(point, weight)` pairs.
    pub fn mapped(&self, xl: f64, xr: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (xl + xr);
        let half = 0.5 * (xr - xl);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&n, &w)| (mid + half * n, half * w))
    }
}

/// Legendre polynomial value and derivative at `x` by the three-term
/// recurrence. `x` must be away from +-1 for the derivative formula.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    debug_assert!(n >= 1);
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = p_next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Gauss-Legendre rule with the given number of points (1..=16), exact for
/// polynomials of degree `2 * points - 1`. Nodes are ascending and exactly
/// symmetric about zero.
///
/// # Errors
/// [`Error::UnsupportedQuadrature`] outside the supported range.
pub fn gauss_rule(points: usize) -> Result<QuadratureRule> {
    if !(1..=16).contains(&points) {
        return Err(Error::UnsupportedQuadrature { points });
    }
    let n = points;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n / 2 {
        // Newton refinement from the Chebyshev-like guess; converges in a
        // handful of iterations for every supported n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..60 {
            let (p, dp) = legendre_pair(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_pair(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        let (_, dp) = legendre_pair(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (dp * dp);
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Value of the hat basis function of node `i` at `x` (zero outside its
/// support and outside the hull).
///
/// # Errors
/// [`Error::IndexOutOfRange`] if `i` is not a node index.
pub fn hat_basis_eval(mesh: &MeshLevel, i: usize, x: f64) -> Result<f64> {
    let p = &mesh.points;
    let n = p.len();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    if i > 0 && x >= p[i - 1] && x <= p[i] {
        Ok((x - p[i - 1]) / (p[i] - p[i - 1]))
    } else if i + 1 < n && x >= p[i] && x <= p[i + 1] {
        Ok((p[i + 1] - x) / (p[i + 1] - p[i]))
    } else {
        Ok(0.0)
    }
}

/// Nodal interpolant of `f` on `mesh`.
pub fn interpolate(f: impl Fn(f64) -> f64, mesh: &MeshLevel) -> PiecewiseLinearFunction {
    let values = mesh.points.iter().map(|&x| f(x)).collect();
    PiecewiseLinearFunction {
        mesh: mesh.clone(),
        values,
    }
}

/// Index of the element containing `x`: the `k` with `P_k < x <= P_{k+1}`
/// (ties resolve to the left element), clamped to the end elements outside
/// the hull. `hint` is a starting element for a short bidirectional walk;
/// after eight steps the search falls back to bisection. Any `hint` is
/// accepted (it is clamped to a valid element).
pub fn locate_element(mesh: &MeshLevel, x: f64, hint: usize) -> usize {
    let p = &mesh.points;
    let n_el = p.len() - 1;
    if x <= p[0] {
        return 0;
    }
    if x > p[n_el] {
        return n_el - 1;
    }
    let mut k = hint.min(n_el - 1);
    for _ in 0..8 {
        if x <= p[k] {
            if k == 0 {
                return 0;
            }
            k -= 1;
        } else if x > p[k + 1] {
            k += 1;
        } else {
            return k;
        }
    }
    // partition_point returns the first index whose node is >= x; x lies in
    // the element to its left.
    p.partition_point(|&v| v < x) - 1
}

/// Evaluates a piecewise-linear function at `x` under the given hull policy.
///
/// # Errors
/// [`Error::OutOfDomain`] when `x` is outside the hull and the policy is
/// [`ExtensionPolicy::Reject`].
pub fn evaluate(f: &PiecewiseLinearFunction, x: f64, policy: ExtensionPolicy) -> Result<f64> {
    evaluate_with_hint(f, x, policy, 0)
}

/// Same as [`evaluate`], with a starting element for the location walk.
/// Callers that sweep evaluation points from left to right (quadrature over
/// a mapped element) pass the previously found element to keep the walk
/// short.
pub fn evaluate_with_hint(
    f: &PiecewiseLinearFunction,
    x: f64,
    policy: ExtensionPolicy,
    hint: usize,
) -> Result<f64> {
    let m = &f.mesh;
    if x < m.a() || x > m.b() {
        match policy {
            ExtensionPolicy::LinearExtension => {}
            ExtensionPolicy::ClampEndValue => {
                return Ok(if x < m.a() {
                    f.values[0]
                } else {
                    *f.values.last().unwrap()
                });
            }
            ExtensionPolicy::Reject => {
                return Err(Error::OutOfDomain {
                    x,
                    lo: m.a(),
                    hi: m.b(),
                });
            }
        }
    }
    let k = locate_element(m, x, hint);
    let lam = (x - m.points[k]) / m.gap(k);
    Ok(f.values[k] * (1.0 - lam) + f.values[k + 1] * lam)
}

/// Consistent (tridiagonal) mass matrix: diagonal `(h_{i-1} + h_i) / 3`,
/// off-diagonal `h_i / 6`. The right-hand side is left at zero.
pub fn assemble_mass(mesh: &MeshLevel) -> crate::linalg::TridiagonalSystem {
    let n = mesh.n_points();
    let mut sys = crate::linalg::TridiagonalSystem::zeros(n);
    for k in 0..mesh.n_elements() {
        let h = mesh.gap(k);
        sys.diag[k] += h / 3.0;
        sys.diag[k + 1] += h / 3.0;
        sys.sup[k] += h / 6.0;
        sys.sub[k + 1] += h / 6.0;
    }
    sys
}

/// Stiffness matrix of the first-derivative form: diagonal
/// `1/h_{i-1} + 1/h_i`, off-diagonal `-1/h_i`. Singular with the constants
/// in its null space; it only appears scaled and shifted by a mass term.
pub fn assemble_stiffness(mesh: &MeshLevel) -> crate::linalg::TridiagonalSystem {
    let n = mesh.n_points();
    let mut sys = crate::linalg::TridiagonalSystem::zeros(n);
    for k in 0..mesh.n_elements() {
        let w = 1.0 / mesh.gap(k);
        sys.diag[k] += w;
        sys.diag[k + 1] += w;
        sys.sup[k] -= w;
        sys.sub[k + 1] -= w;
    }
    sys
}

/// L2 norm over the hull, exact for piecewise-linear data:
/// per element `h (v1^2 + v1 v2 + v2^2) / 3`.
pub fn l2_norm(f: &PiecewiseLinearFunction) -> f64 {
    let mut acc = 0.0;
    for k in 0..f.mesh.n_elements() {
        let (v1, v2) = (f.values[k], f.values[k + 1]);
        acc += f.mesh.gap(k) * (v1 * v1 + v1 * v2 + v2 * v2) / 3.0;
    }
    acc.sqrt()
}

/// H1 seminorm over the hull, exact: per element `(v2 - v1)^2 / h`.
pub fn h1_seminorm(f: &PiecewiseLinearFunction) -> f64 {
    let mut acc = 0.0;
    for k in 0..f.mesh.n_elements() {
        let dv = f.values[k + 1] - f.values[k];
        acc += dv * dv / f.mesh.gap(k);
    }
    acc.sqrt()
}

/// Integral over the hull; for piecewise-linear data this is exactly the
/// trapezoid sum.
pub fn total_integral(f: &PiecewiseLinearFunction) -> f64 {
    let mut acc = 0.0;
    for k in 0..f.mesh.n_elements() {
        acc += f.mesh.gap(k) * 0.5 * (f.values[k] + f.values[k + 1]);
    }
    acc
}

/// Mesh-motion correction in the time derivative of a moving interpolant.
///
/// With nodes moving at the `velocities` rates, the derivative of the
/// interpolant of `phi` at a fixed point `x` differs from the interpolant of
/// `d(phi)/dt + w d(phi)/dx` by the value returned here:
///
/// ```text
/// I(x, t) = -slope_k(t) * [w_k psi_k(x) + w_{k+1} psi_{k+1}(x)]
/// ```
///
/// where `slope_k` is the interpolant slope on the element containing `x`
/// and `psi` are that element's hat functions. `level_at_t` must be the mesh
/// level at time `t`; the node velocities must belong to the same node set.
///
/// # Errors
/// [`Error::OutOfDomain`] if `x` lies outside the hull,
/// [`Error::MismatchedLevels`] if the velocity count differs from the node
/// count.
pub fn interp_time_derivative(
    phi: impl Fn(f64, f64) -> f64,
    level_at_t: &MeshLevel,
    velocities: &NodeVelocities,
    x: f64,
    t: f64,
) -> Result<f64> {
    if velocities.values.len() != level_at_t.n_points() {
        return Err(Error::MismatchedLevels {
            expected: level_at_t.n_points(),
            got: velocities.values.len(),
        });
    }
    if x < level_at_t.a() || x > level_at_t.b() {
        return Err(Error::OutOfDomain {
            x,
            lo: level_at_t.a(),
            hi: level_at_t.b(),
        });
    }
    let k = locate_element(level_at_t, x, 0);
    let pl = level_at_t.points[k];
    let h = level_at_t.gap(k);
    let psi_right = (x - pl) / h;
    let psi_left = 1.0 - psi_right;
    let slope = (phi(level_at_t.points[k + 1], t) - phi(pl, t)) / h;
    let w_at_x = velocities.values[k] * psi_left + velocities.values[k + 1] * psi_right;
    Ok(-slope * w_at_x)
}

////////////////////////////////////////////////////////////////////////////////
