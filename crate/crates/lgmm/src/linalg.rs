//! Tridiagonal systems shared by the mesh-motion solve and the scheme solve.
//!
//! The iterative production solvers live next to their callers
//! ([`crate::mesh::sor_solve`] for the non-symmetric motion system,
//! [`crate::scheme::cg_solve`] for the symmetric positive definite scheme
//! system). This module holds the storage type and [`thomas_solve`], the
//! direct elimination path kept as an independent oracle so the iterative
//! solvers can always be cross-checked against it.

use crate::{Error, Result};

/// A tridiagonal linear system `A x = rhs` in banded storage.
///
/// Row `i` reads `sub[i] * x[i-1] + diag[i] * x[i] + sup[i] * x[i+1]`;
/// `sub[0]` and `sup[n-1]` are stored but never used and kept at zero by the
/// assembly routines.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl TridiagonalSystem {
    /// Zero-initialized system of size `n`.
    ///
    /// # Panics
    /// Panics if `n` is zero.
    pub fn zeros(n: usize) -> Self {
        assert!(n > 0, "system size must be positive");
        TridiagonalSystem {
            sub: vec![0.0; n],
            diag: vec![0.0; n],
            sup: vec![0.0; n],
            rhs: vec![0.0; n],
        }
    }

    /// Number of unknowns.
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Matrix-vector product `A x`.
    ///
    /// # Panics
    /// Panics if `x.len() != self.n()`.
    pub fn multiply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(x.len(), n, "vector length must match system size");
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.sub[i] * x[i - 1];
            }
            if i + 1 < n {
                v += self.sup[i] * x[i + 1];
            }
            y[i] = v;
        }
        y
    }

    /// Max-norm of `rhs - A x`.
    pub fn residual_max_norm(&self, x: &[f64]) -> f64 {
        self.multiply(x)
            .iter()
            .zip(&self.rhs)
            .map(|(ax, b)| (b - ax).abs())
            .fold(0.0, f64::max)
    }

    /// Largest absolute mismatch between paired off-diagonal entries, i.e.
    /// `max_i |sup[i] - sub[i+1]|`. Zero for a symmetric matrix.
    pub fn asymmetry(&self) -> (usize, f64) {
        let mut worst = (0, 0.0);
        for i in 0..self.n().saturating_sub(1) {
            let d = (self.sup[i] - self.sub[i + 1]).abs();
            if d > worst.1 {
                worst = (i, d);
            }
        }
        worst
    }

    /// True if every row is strictly diagonally dominant:
    /// `|diag[i]| > |sub[i]| + |sup[i]|`.
    pub fn is_strictly_diagonally_dominant(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| {
            let off = if i > 0 { self.sub[i].abs() } else { 0.0 }
                + if i + 1 < n { self.sup[i].abs() } else { 0.0 };
            self.diag[i].abs() > off
        })
    }

    /// The matrix combination `fa * A + fb * B` with a zero right-hand side.
    ///
    /// # Panics
    /// Panics if the two systems differ in size.
    pub fn scaled_sum(a: &TridiagonalSystem, fa: f64, b: &TridiagonalSystem, fb: f64) -> Self {
        let n = a.n();
        assert_eq!(n, b.n(), "systems must have equal size");
        let mut out = TridiagonalSystem::zeros(n);
        for i in 0..n {
            out.sub[i] = fa * a.sub[i] + fb * b.sub[i];
            out.diag[i] = fa * a.diag[i] + fb * b.diag[i];
            out.sup[i] = fa * a.sup[i] + fb * b.sup[i];
        }
        out
    }
}

/// Solves a tridiagonal system by elimination (the Thomas recurrence).
///
/// This is the direct oracle used to validate the iterative solvers; it
/// performs no pivoting, which is exact arithmetic-stable for the diagonally
/// dominant systems produced by this crate.
///
/// # Errors
/// [`Error::ZeroPivot`] if elimination encounters a vanishing pivot.
pub fn thomas_solve(system: &TridiagonalSystem) -> Result<Vec<f64>> {
    let n = system.n();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];

    let mut pivot = system.diag[0];
    if pivot == 0.0 {
        return Err(Error::ZeroPivot { index: 0 });
    }
    c[0] = system.sup[0] / pivot;
    d[0] = system.rhs[0] / pivot;
    for i in 1..n {
        pivot = system.diag[i] - system.sub[i] * c[i - 1];
        if pivot == 0.0 {
            return Err(Error::ZeroPivot { index: i });
        }
        c[i] = system.sup[i] / pivot;
        d[i] = (system.rhs[i] - system.sub[i] * d[i - 1]) / pivot;
    }

    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

////////////////////////////////////////////////////////////////////////////////
