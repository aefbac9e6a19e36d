//! Pinned reference results for the built-in benchmarks.
//!
//! These are the expected outputs of the standard configurations (order-2
//! scheme, five-point Gauss quadrature, `dt = 4 h0`) of the `example1`
//! problem, frozen as regression anchors. The acceptance gate re-runs the
//! configurations and compares against these rows; see
//! [`crate::tolerances`] for the allowed deviations.
//!
//! `eoc_*` values are the orders quoted against the previous row, kept
//! where the source tabulated them. They were rounded independently of the
//! error columns, so recomputing an order from the rounded errors can
//! deviate by a few hundredths; the self-check below allows for that.

/// One row of a pinned convergence table.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceRow {
    /// Number of mesh elements.
    pub n: usize,
    /// Max-in-time relative L2 error.
    pub e_l2: f64,
    /// Order of `e_l2` against the previous row.
    pub eoc_l2: Option<f64>,
    /// Time-summed relative H1-seminorm error.
    pub e_h1: f64,
    /// Order of `e_h1` against the previous row.
    pub eoc_h1: Option<f64>,
    /// Relative mass defect at the final time.
    pub e_mass: Option<f64>,
}

const fn row(
    n: usize,
    e_l2: f64,
    eoc_l2: Option<f64>,
    e_h1: f64,
    eoc_h1: Option<f64>,
    e_mass: Option<f64>,
) -> ReferenceRow {
    ReferenceRow {
        n,
        e_l2,
        eoc_l2,
        e_h1,
        eoc_h1,
        e_mass,
    }
}

/// Fixed mesh, `nu = 1e-2`.
pub const FIXED_MESH_NU_1E2: &[ReferenceRow] = &[
    row(128, 2.795558e-3, None, 4.621785e-3, None, Some(1.931562e-5)),
    row(256, 8.085728e-4, Some(1.79), 1.296162e-3, Some(1.83), Some(1.389046e-6)),
    row(512, 2.221100e-4, Some(1.86), 3.445636e-4, Some(1.91), Some(1.527363e-6)),
    row(1024, 5.927475e-5, Some(1.91), 9.098049e-5, Some(1.92), Some(8.199302e-8)),
    row(2048, 1.540739e-5, Some(1.95), 2.505214e-5, Some(1.86), Some(7.994320e-8)),
    row(4096, 3.949271e-6, Some(1.96), 7.976085e-6, Some(1.64), Some(8.886055e-8)),
];

/// Moving mesh, `nu = 1e-2`.
pub const MOVING_MESH_NU_1E2: &[ReferenceRow] = &[
    row(128, 3.293675e-3, None, 5.441997e-3, None, Some(1.141478e-6)),
    row(256, 8.756374e-4, Some(1.91), 1.467274e-3, Some(1.87), Some(5.715086e-6)),
    row(512, 2.265597e-4, Some(1.95), 3.853933e-4, Some(1.93), Some(9.131147e-7)),
    row(1024, 5.945318e-5, Some(1.93), 8.875689e-5, Some(2.12), Some(4.549741e-7)),
    row(2048, 1.545287e-5, Some(1.95), 2.439410e-5, Some(1.87), Some(4.652903e-8)),
    row(4096, 3.948940e-6, Some(1.96), 6.051897e-6, Some(1.98), Some(1.034399e-7)),
];

/// Fixed mesh, `nu = 1e-4`: the mesh under-resolves the moving front and
/// the observed order degrades toward one.
pub const FIXED_MESH_NU_1E4: &[ReferenceRow] = &[
    row(128, 6.127321e-2, None, 1.255443e-1, None, None),
    row(256, 1.369196e-2, None, 2.916377e-2, None, None),
    row(512, 3.286310e-3, None, 6.026062e-3, None, None),
    row(1024, 1.045305e-3, None, 1.375878e-3, None, None),
    row(2048, 5.000259e-4, Some(1.07), 5.729551e-4, Some(1.27), Some(5.870192e-4)),
    row(4096, 2.650173e-4, Some(0.91), 3.289690e-4, Some(0.78), Some(2.986775e-4)),
];

/// Moving mesh, `nu = 1e-4`: nodes track the front and second order is
/// recovered on the finer levels.
pub const MOVING_MESH_NU_1E4: &[ReferenceRow] = &[
    row(128, 1.021001e-1, None, 2.825924e-1, None, None),
    row(256, 1.898798e-2, None, 4.633479e-2, None, None),
    row(512, 5.634064e-3, None, 1.141006e-2, None, None),
    row(1024, 8.094441e-4, None, 1.244332e-3, None, None),
    row(2048, 2.574393e-4, Some(1.66), 6.381969e-4, Some(0.97), Some(5.883933e-7)),
    row(4096, 6.442978e-5, Some(1.99), 1.598421e-4, Some(1.99), Some(3.556603e-9)),
];

/// All four pinned tables with the diffusion and variant they belong to.
pub fn all_tables() -> [(&'static str, f64, bool, &'static [ReferenceRow]); 4] {
    [
        ("fixed mesh, nu=1e-2", 1e-2, false, FIXED_MESH_NU_1E2),
        ("moving mesh, nu=1e-2", 1e-2, true, MOVING_MESH_NU_1E2),
        ("fixed mesh, nu=1e-4", 1e-4, false, FIXED_MESH_NU_1E4),
        ("moving mesh, nu=1e-4", 1e-4, true, MOVING_MESH_NU_1E4),
    ]
}

////////////////////////////////////////////////////////////////////////////////

#[cfg(test)]
mod tests {
    use super::*;

    // Guards against transcription slips: a typo in the second significant
    // digit of an error shifts the recomputed order by ~0.1, well past the
    // rounding slack allowed here.
    #[test]
    fn quoted_orders_are_consistent_with_the_errors() {
        for (label, _, _, table) in all_tables() {
            for pair in table.windows(2) {
                let (prev, this) = (&pair[0], &pair[1]);
                assert_eq!(this.n, 2 * prev.n, "{label}: levels must double");
                for (e_prev, e_this, quoted) in [
                    (prev.e_l2, this.e_l2, this.eoc_l2),
                    (prev.e_h1, this.e_h1, this.eoc_h1),
                ] {
                    assert!(e_prev > 0.0 && e_this > 0.0);
                    if let Some(q) = quoted {
                        let recomputed = (e_prev / e_this).log2();
                        assert!(
                            (recomputed - q).abs() <= 0.05,
                            "{label} N={}: quoted {q}, recomputed {recomputed:.4}",
                            this.n
                        );
                    }
                }
                if let Some(m) = this.e_mass {
                    assert!(m > 0.0);
                }
            }
        }
    }
}
