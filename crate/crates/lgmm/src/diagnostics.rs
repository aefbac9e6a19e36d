//! Error norms, the mass-balance ledger, and convergence reporting.
//!
//! Errors are measured against the nodal interpolant of the exact solution
//! on the same mesh the numerical solution lives on, as relative quantities:
//! a max-in-time L2 norm, a summed-in-time H1 seminorm (the time-step factor
//! cancels between numerator and denominator), and the relative mass defect
//! at the final time.
//!
//! The mass ledger restates the schemes' conservation identities. Summing
//! the update equations against the all-ones vector (the hat functions sum
//! to one, so diffusion and pullback terms telescope) gives, with
//! `S_i` the sum of the source-load entries at step `i`:
//!
//! ```text
//! order 1:  m_n = m_0 + dt (S_1 + ... + S_n)
//! order 2:  1.5 m_n - 0.5 m_{n-1}
//!             = m_0 + dt (S_1 + ... + S_n) + 0.5 dt S_1
//! ```
//!
//! The order-2 right-hand side folds in the half-weight of the first-order
//! starting step, making the identity exact at every step rather than only
//! in the telescoped limit. Residuals are absolute values of the difference
//! between the two sides.

use crate::fem::{h1_seminorm, interpolate, l2_norm, total_integral, PiecewiseLinearFunction};
use crate::{Error, Result};

/// The three relative error measures of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeErrors {
    /// Max-in-time relative L2 error.
    pub l_inf_l2: f64,
    /// Time-summed relative H1-seminorm error.
    pub l2_h1: f64,
    /// Relative mass defect at the final time.
    pub mass: f64,
}

/// One row of the mass ledger. `expected` is the right-hand side of the
/// conservation identity; for the order-2 scheme the left-hand side is the
/// weighted combination `1.5 m_n - 0.5 m_{n-1}`, not `mass` itself, so
/// `residual` is not always `|mass - expected|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerEntry {
    pub step: usize,
    pub time: f64,
    pub mass: f64,
    pub expected: f64,
    pub residual: f64,
}

/// Smallest and largest element length of one mesh level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshStats {
    pub min_gap: f64,
    pub max_gap: f64,
}

/// Diagnostics of a completed run.
#[derive(Debug, Clone)]
pub struct RunReport {
    /// Error norms; present only when an exact solution was available and
    /// every time level was recorded.
    pub errors: Option<RelativeErrors>,
    /// One entry per time level, including the initial one.
    pub mass_ledger: Vec<LedgerEntry>,
    /// One entry per time level, including the initial one.
    pub mesh_stats: Vec<MeshStats>,
}

/// Relative error norms of the recorded levels against an exact solution.
///
/// `states` must hold every time level from step 0 on; levels past the
/// first enter the norms, and the last one defines the mass defect. Each
/// level is compared with the interpolant of `exact` on its own mesh at its
/// own time stamp.
///
/// # Errors
/// [`Error::ZeroDenominator`] when a reference norm vanishes, which also
/// covers runs with fewer than two levels.
pub fn relative_errors(
    states: &[PiecewiseLinearFunction],
    exact: impl Fn(f64, f64) -> f64,
) -> Result<RelativeErrors> {
    let mut max_err_l2: f64 = 0.0;
    let mut max_ref_l2: f64 = 0.0;
    let mut sum_err_h1 = 0.0;
    let mut sum_ref_h1 = 0.0;
    let mut mass_defect = 0.0;
    let mut mass_reference = 0.0;
    for state in states.iter().skip(1) {
        let t = state.mesh.time;
        let reference = interpolate(|x| exact(x, t), &state.mesh);
        let difference: Vec<f64> = state
            .values
            .iter()
            .zip(&reference.values)
            .map(|(a, b)| a - b)
            .collect();
        let error = PiecewiseLinearFunction::new(state.mesh.clone(), difference)?;
        max_err_l2 = max_err_l2.max(l2_norm(&error));
        max_ref_l2 = max_ref_l2.max(l2_norm(&reference));
        sum_err_h1 += h1_seminorm(&error).powi(2);
        sum_ref_h1 += h1_seminorm(&reference).powi(2);
        mass_defect = (total_integral(state) - total_integral(&reference)).abs();
        mass_reference = total_integral(&reference).abs();
    }
    if max_ref_l2 == 0.0 || sum_ref_h1 == 0.0 || mass_reference == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(RelativeErrors {
        l_inf_l2: max_err_l2 / max_ref_l2,
        l2_h1: (sum_err_h1 / sum_ref_h1).sqrt(),
        mass: mass_defect / mass_reference,
    })
}

/// Experimental order of convergence between two errors on meshes refined
/// by a factor of two: `log2(coarse / fine)`.
///
/// # Errors
/// [`Error::NonpositiveError`] when either value is not positive.
pub fn eoc(coarse: f64, fine: f64) -> Result<f64> {
    if !(coarse > 0.0) {
        return Err(Error::NonpositiveError { value: coarse });
    }
    if !(fine > 0.0) {
        return Err(Error::NonpositiveError { value: fine });
    }
    Ok((coarse / fine).log2())
}

/// Builds the full mass ledger from the per-step masses `m_n` and source
/// sums `S_n`, assuming the run started at time zero. `load_sums[0]` is
/// ignored (there is no step zero source term).
///
/// # Panics
/// Panics if the slices are empty or of different lengths, `dt` is not
/// positive, or `order` is not 1 or 2.
pub fn ledger_series(masses: &[f64], load_sums: &[f64], dt: f64, order: u8) -> Vec<LedgerEntry> {
    assert_eq!(
        masses.len(),
        load_sums.len(),
        "one source sum per mass value"
    );
    assert!(!masses.is_empty(), "ledger needs at least the initial mass");
    assert!(dt > 0.0, "time step must be positive");
    assert!(order == 1 || order == 2, "scheme order must be 1 or 2");

    let mut entries = Vec::with_capacity(masses.len());
    entries.push(LedgerEntry {
        step: 0,
        time: 0.0,
        mass: masses[0],
        expected: masses[0],
        residual: 0.0,
    });
    let mut source_total = 0.0;
    for n in 1..masses.len() {
        source_total += load_sums[n];
        let (lhs, expected) = if order == 1 {
            (masses[n], masses[0] + dt * source_total)
        } else {
            (
                1.5 * masses[n] - 0.5 * masses[n - 1],
                masses[0] + dt * source_total + 0.5 * dt * load_sums[1],
            )
        };
        entries.push(LedgerEntry {
            step: n,
            time: n as f64 * dt,
            mass: masses[n],
            expected,
            residual: (lhs - expected).abs(),
        });
    }
    entries
}

/// Absolute ledger residual at one step; see [`ledger_series`].
///
/// # Errors
/// [`Error::IndexOutOfRange`] when `step` exceeds the recorded range.
pub fn mass_ledger_residual(
    masses: &[f64],
    load_sums: &[f64],
    dt: f64,
    order: u8,
    step: usize,
) -> Result<f64> {
    let entries = ledger_series(masses, load_sums, dt, order);
    entries
        .get(step)
        .map(|e| e.residual)
        .ok_or(Error::IndexOutOfRange {
            index: step,
            len: entries.len(),
        })
}

/// Discrete stability functional of a fully recorded run:
/// `max_n ||phi^n||^2 + nu dt sum_{n>=1} |phi^n|_{H1}^2`. Under refinement
/// with proportional time steps this stays bounded for a stable scheme.
///
/// # Panics
/// Panics if `states` is empty.
pub fn stability_functional(states: &[PiecewiseLinearFunction], nu: f64, dt: f64) -> f64 {
    assert!(!states.is_empty(), "stability functional needs a run");
    let max_l2_sq = states
        .iter()
        .map(|s| l2_norm(s).powi(2))
        .fold(0.0, f64::max);
    let h1_sum: f64 = states
        .iter()
        .skip(1)
        .map(|s| h1_seminorm(s).powi(2))
        .sum();
    max_l2_sq + nu * dt * h1_sum
}

/// One line of a convergence study.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub n_elements: usize,
    pub dt: f64,
    pub errors: RelativeErrors,
    /// Orders against the previous row for the three error measures, absent
    /// on the first row.
    pub eocs: Option<[f64; 3]>,
}

/// Assembles convergence rows from `(n_elements, dt, errors)` results of
/// successive dyadic refinements, attaching orders between neighbours.
///
/// # Errors
/// [`Error::NonpositiveError`] when an error value is not positive.
pub fn convergence_rows(results: &[(usize, f64, RelativeErrors)]) -> Result<Vec<ConvergenceRow>> {
    let mut rows = Vec::with_capacity(results.len());
    for (k, (n_elements, dt, errors)) in results.iter().enumerate() {
        let eocs = if k == 0 {
            None
        } else {
            let prev = &results[k - 1].2;
            Some([
                eoc(prev.l_inf_l2, errors.l_inf_l2)?,
                eoc(prev.l2_h1, errors.l2_h1)?,
                eoc(prev.mass, errors.mass)?,
            ])
        };
        rows.push(ConvergenceRow {
            n_elements: *n_elements,
            dt: *dt,
            errors: *errors,
            eocs,
        });
    }
    Ok(rows)
}

////////////////////////////////////////////////////////////////////////////////

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{initial_uniform_mesh, MeshLevel, MeshMotionConfig};
    use crate::scheme::{run_simulation, Problem, RecordMode, SchemeConfig, SourceData};
    use crate::transport::VelocityField;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn eoc_reproduces_the_reference_pair() {
        let order = eoc(2.795558e-3, 8.085728e-4).unwrap();
        assert!((order - 1.79).abs() < 0.005, "got {order}");
    }

    #[test]
    fn eoc_rejects_nonpositive_errors() {
        assert!(matches!(eoc(0.0, 1.0), Err(crate::Error::NonpositiveError { .. })));
        assert!(matches!(eoc(1.0, -2.0), Err(crate::Error::NonpositiveError { .. })));
    }

    fn interpolant_states(
        shift: f64,
        factor: f64,
    ) -> (Vec<PiecewiseLinearFunction>, impl Fn(f64, f64) -> f64) {
        let exact = move |x: f64, t: f64| (PI * (x - shift)).sin() * (1.0 + t);
        let mesh = initial_uniform_mesh(shift, shift + 1.0, 8).unwrap();
        let states = (0..4)
            .map(|k| {
                let t = k as f64 * 0.125;
                let level = mesh.at_time(t);
                let reference = interpolate(|x| exact(x, t), &level);
                let values = reference.values.iter().map(|v| v * factor).collect();
                PiecewiseLinearFunction::new(level, values).unwrap()
            })
            .collect();
        (states, exact)
    }

    #[test]
    fn exact_interpolants_give_zero_errors() {
        let (states, exact) = interpolant_states(0.0, 1.0);
        let errors = relative_errors(&states, exact).unwrap();
        assert_eq!(errors.l_inf_l2, 0.0);
        assert_eq!(errors.l2_h1, 0.0);
        assert_eq!(errors.mass, 0.0);
    }

    #[test]
    fn error_norms_are_translation_invariant() {
        let (states, exact) = interpolant_states(0.0, 1.01);
        let base = relative_errors(&states, exact).unwrap();
        assert!(base.l_inf_l2 > 1e-3);
        let (states, exact) = interpolant_states(5.0, 1.01);
        let shifted = relative_errors(&states, exact).unwrap();
        assert!((base.l_inf_l2 - shifted.l_inf_l2).abs() < 1e-14);
        assert!((base.l2_h1 - shifted.l2_h1).abs() < 1e-14);
        assert!((base.mass - shifted.mass).abs() < 1e-14);
    }

    #[test]
    fn zero_reference_solution_is_rejected() {
        let mesh = initial_uniform_mesh(0.0, 1.0, 4).unwrap();
        let states: Vec<_> = (0..3)
            .map(|k| interpolate(|_| 0.0, &mesh.at_time(k as f64)))
            .collect();
        assert!(matches!(
            relative_errors(&states, |_, _| 0.0),
            Err(crate::Error::ZeroDenominator)
        ));
        assert!(matches!(
            relative_errors(&states[..1], |x, _| x),
            Err(crate::Error::ZeroDenominator)
        ));
    }

    #[test]
    fn first_order_ledger_flags_only_the_tampered_step() {
        // Masses built to satisfy m_n = m_0 + dt sum S_i exactly.
        let dt = 0.1;
        let sums = vec![0.0, 2.0, -1.0, 0.5];
        let mut masses = vec![1.0];
        for s in &sums[1..] {
            masses.push(masses.last().unwrap() + dt * s);
        }
        let clean = ledger_series(&masses, &sums, dt, 1);
        assert!(clean.iter().all(|e| e.residual < 1e-15));
        assert!((clean[3].time - 0.3).abs() < 1e-15);

        masses[2] += 1e-3;
        let tampered = ledger_series(&masses, &sums, dt, 1);
        assert!((tampered[2].residual - 1e-3).abs() < 1e-12);
        assert!(tampered[1].residual < 1e-15);
        // The expected value at step 3 ignores intermediate masses.
        assert!(tampered[3].residual < 1e-15);
    }

    #[test]
    fn second_order_ledger_holds_with_the_starting_step_correction() {
        let dt = 0.1;
        let sums = vec![0.0, 1.0, -0.5, 0.25];
        let m0 = 2.0;
        let m1 = m0 + dt * sums[1];
        let mut masses = vec![m0, m1];
        let mut total = sums[1];
        for s in &sums[2..] {
            total += s;
            let expected = m0 + dt * total + 0.5 * dt * sums[1];
            let prev = *masses.last().unwrap();
            masses.push((expected + 0.5 * prev) / 1.5);
        }
        let entries = ledger_series(&masses, &sums, dt, 2);
        assert!(entries.iter().all(|e| e.residual < 1e-15));

        let residual = mass_ledger_residual(&masses, &sums, dt, 2, 3).unwrap();
        assert_eq!(residual, entries[3].residual);
        assert!(matches!(
            mass_ledger_residual(&masses, &sums, dt, 2, 9),
            Err(crate::Error::IndexOutOfRange { len: 4, .. })
        ));
    }

    #[test]
    fn ledger_catches_a_broken_pullback_jacobian() {
        // The conservation identity holds only because the pullback load
        // weights by the characteristic Jacobian. A velocity field that
        // lies about its gradient forces that weight to one and must blow
        // the residual up by orders of magnitude.
        let honest = VelocityField::new(
            |x, _| (2.0 * PI * x).sin(),
            |x, _| 2.0 * PI * (2.0 * PI * x).cos(),
            1.0,
            2.0 * PI,
            true,
        );
        let lying = VelocityField::new(
            |x, _| (2.0 * PI * x).sin(),
            |_, _| 0.0,
            1.0,
            2.0 * PI,
            true,
        );
        let worst = |velocity: VelocityField| -> (f64, f64) {
            let problem = Problem {
                domain: (-1.0, 1.0),
                t_end: 0.01,
                n_elements: 32,
                velocity,
                source: SourceData::zero(),
                initial: Arc::new(|x: f64| (-100.0 * (1.0 - x.cos())).exp()),
                exact: None,
            };
            let mut scheme = SchemeConfig::new(1e-5, 1e-3, 1);
            scheme.split_at_kinks = true;
            let out = run_simulation(
                &problem,
                &MeshMotionConfig::new(1e-5, 1e-3, true),
                &scheme,
                true,
                &RecordMode::Snapshots(vec![]),
            )
            .unwrap();
            let m0 = out.report.mass_ledger[0].mass.abs();
            let worst = out
                .report
                .mass_ledger
                .iter()
                .map(|e| e.residual)
                .fold(0.0, f64::max);
            (worst, m0)
        };
        let (good, m0) = worst(honest);
        let (bad, _) = worst(lying);
        assert!(good <= 1e-9 * m0, "honest residual {good:e}");
        assert!(bad > 1e-5 * m0, "broken Jacobian went unnoticed: {bad:e}");
        assert!(bad > 1e4 * good.max(1e-18));
    }

    #[test]
    fn stability_functional_matches_a_hand_computation() {
        let mesh = MeshLevel::new(vec![0.0, 0.5, 1.0], 0.0).unwrap();
        let phi = PiecewiseLinearFunction::new(mesh.clone(), vec![0.0, 1.0, 0.0]).unwrap();
        // ||phi||^2 = 2 * 0.5 * (1/3) = 1/3; |phi|_{H1}^2 = 2 * (1/0.5) = 4.
        let single = stability_functional(std::slice::from_ref(&phi), 0.1, 0.2);
        assert!((single - 1.0 / 3.0).abs() < 1e-15);
        let pair = stability_functional(&[phi.clone(), phi], 0.1, 0.2);
        assert!((pair - (1.0 / 3.0 + 0.1 * 0.2 * 4.0)).abs() < 1e-15);
    }

    #[test]
    fn convergence_rows_attach_orders_between_neighbours() {
        let level = |e: f64| RelativeErrors {
            l_inf_l2: e,
            l2_h1: 2.0 * e,
            mass: e * e,
        };
        let results = vec![
            (128, 0.0625, level(4.0e-2)),
            (256, 0.03125, level(1.0e-2)),
            (512, 0.015625, level(2.5e-3)),
        ];
        let rows = convergence_rows(&results).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].eocs.is_none());
        let eocs = rows[2].eocs.unwrap();
        assert!((eocs[0] - 2.0).abs() < 1e-12);
        assert!((eocs[1] - 2.0).abs() < 1e-12);
        assert!((eocs[2] - 4.0).abs() < 1e-12);
        assert_eq!(rows[1].n_elements, 256);
        assert!((rows[1].dt - 0.03125).abs() < 1e-15);
    }
}
