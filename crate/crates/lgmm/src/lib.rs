//! Solver library for 1D convection-diffusion problems
//!
//!   d(phi)/dt + d(u phi)/dx - nu d2(phi)/dx2 = f   on (a,b) x (0,T],
//!
//! closed with the natural flux condition nu d(phi)/dn - phi u.n = g at the
//! endpoints. The discretization is a Lagrange-Galerkin method: the material
//! derivative is approximated along approximate characteristic feet, and the
//! advected term is weighted by the Jacobian of the characteristic map so
//! that total mass obeys a discrete balance identity to solver precision.
//!
//! Two time discretizations are provided (first order and second order), on
//! either a fixed mesh or a velocity-following moving mesh whose node motion
//! is smoothed by an elliptic regularization term. The crate is organised as:
//!
//! - [`linalg`]: tridiagonal systems and the direct elimination oracle,
//! - [`mesh`]: mesh levels, node motion, the SOR solver for the motion system,
//! - [`fem`]: piecewise-linear functions, quadrature, mass/stiffness forms,
//! - [`transport`]: velocity fields, upwind maps, the composed load term,
//! - [`scheme`]: time stepping, the CG solver, full simulation runs,
//! - [`diagnostics`]: error norms, convergence rates, mass-ledger audits.

// Guards written as `!(x > 0.0)` are deliberate: unlike `x <= 0.0` they also
// reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fmt;

pub mod diagnostics;
pub mod fem;
pub mod linalg;
pub mod mesh;
pub mod scheme;
pub mod transport;

/// Errors surfaced by the solver library.
///
/// Programmer errors (out-of-range indices, mismatched buffer lengths passed
/// to low-level kernels) panic instead; every variant here is a runtime
/// condition a caller may legitimately hit and handle.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Interval bounds are not strictly ordered.
    InvalidInterval { a: f64, b: f64 },
    /// Requested element count is zero.
    InvalidElementCount,
    /// A mesh level is not strictly increasing (non-positive gap).
    DegenerateMesh { index: usize, gap: f64 },
    /// A mesh advance produced crossing or coinciding nodes. This indicates
    /// the time-step restriction against the velocity bound was violated.
    MeshOverlap { index: usize, gap: f64, time: f64 },
    /// An iterative solver stopped at its iteration cap above tolerance.
    NoConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },
    /// Direct elimination hit a zero pivot; the system is singular or far
    /// from diagonally dominant.
    ZeroPivot { index: usize },
    /// The CG solver was handed a matrix with sub/super diagonal mismatch.
    AsymmetryDetected { index: usize, difference: f64 },
    /// Two containers that must describe the same node set differ in length.
    MismatchedLevels { expected: usize, got: usize },
    /// A basis or node index is outside the mesh.
    IndexOutOfRange { index: usize, len: usize },
    /// The two-step scheme was invoked past the first step without history.
    MissingHistory,
    /// Evaluation outside the mesh hull under `ExtensionPolicy::Reject`.
    OutOfDomain { x: f64, lo: f64, hi: f64 },
    /// Quadrature point count outside the supported range 1..=16.
    UnsupportedQuadrature { points: usize },
    /// A relative quantity is undefined because its denominator is zero.
    ZeroDenominator,
    /// A convergence rate is undefined for non-positive error values.
    NonpositiveError { value: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInterval { a, b } => {
                write!(f, "invalid interval: a = {a} must be less than b = {b}")
            }
            Error::InvalidElementCount => write!(f, "element count must be at least one"),
            Error::DegenerateMesh { index, gap } => write!(
                f,
                "degenerate mesh: gap {gap:e} between nodes {index} and {}",
                index + 1
            ),
            Error::MeshOverlap { index, gap, time } => write!(
                f,
                "mesh overlap at t = {time}: gap {gap:e} between nodes {index} and {} \
                 (time step too large for the velocity bound)",
                index + 1
            ),
            Error::NoConvergence {
                solver,
                iterations,
                residual,
            } => write!(
                f,
                "{solver} did not converge within {iterations} iterations \
                 (final residual {residual:e})"
            ),
            Error::ZeroPivot { index } => {
                write!(f, "zero pivot at row {index} during direct elimination")
            }
            Error::AsymmetryDetected { index, difference } => write!(
                f,
                "matrix is not symmetric: off-diagonal pair {index} differs by {difference:e}"
            ),
            Error::MismatchedLevels { expected, got } => {
                write!(f, "mismatched lengths: expected {expected} entries, got {got}")
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for {len} nodes")
            }
            Error::MissingHistory => write!(
                f,
                "second-order step requires the previous two levels; history is missing"
            ),
            Error::OutOfDomain { x, lo, hi } => {
                write!(f, "point {x} lies outside the mesh hull [{lo}, {hi}]")
            }
            Error::UnsupportedQuadrature { points } => {
                write!(f, "unsupported quadrature point count {points} (supported: 1..=16)")
            }
            Error::ZeroDenominator => {
                write!(f, "relative quantity undefined: denominator is zero")
            }
            Error::NonpositiveError { value } => {
                write!(f, "convergence rate undefined for non-positive error {value:e}")
            }
        }
    }
}

impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
