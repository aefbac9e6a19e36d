//! The release gate: ten numbered checks covering convergence against the
//! pinned reference tables, the mass ledger, mesh-motion safety, and the
//! interpolation identities. `run_all` executes every check and returns one
//! outcome per criterion; the `selftest` subcommand and the acceptance test
//! binary both print them in a fixed one-line-per-criterion format.
//!
//! Randomized checks derive their generators from the caller's seed, so a
//! failure reproduces exactly from the reported seed.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lgmm::diagnostics::{eoc, RelativeErrors};
use lgmm::fem::{
    evaluate, gauss_rule, interp_time_derivative, interpolate, ExtensionPolicy,
    PiecewiseLinearFunction,
};
use lgmm::mesh::{
    advance_mesh, assemble_motion_system, initial_uniform_mesh, motion_positivity_margin,
    MeshLevel, MeshMotionConfig, NodeVelocities,
};
use lgmm::scheme::{run_simulation, RecordMode, SchemeConfig};
use lgmm::transport::{composed_load, UpwindMap, VelocityField};

use crate::commands::parallel_levels;
use crate::presets;
use crate::reference::{
    ReferenceRow, FIXED_MESH_NU_1E2, FIXED_MESH_NU_1E4, MOVING_MESH_NU_1E2, MOVING_MESH_NU_1E4,
};
use crate::tolerances::{
    COARSE_TREND_FACTOR, COMPOSED_ORACLE_RTOL, EOC_ATOL, GAMMA_LOWER, GAMMA_UPPER,
    INTERP_DERIVATIVE_RTOL, INTERP_EOC_ATOL, INTERP_H1_EOC, INTERP_L2_EOC, MASS_LEDGER_RTOL,
    MOVING_COARSE_EOC_MIN, NONOVERLAP_MARGIN_MAX, RUNTIME_LIMIT_SECONDS, STATIC_COARSE_EOC_MAX,
    TABLE_RTOL,
};

/// Result of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub index: usize,
    pub label: &'static str,
    pub passed: bool,
    pub details: String,
}

type Criterion = fn(u64) -> lgmm::Result<(bool, String)>;

const CRITERIA: [(usize, &str, Criterion); 10] = [
    (1, "moving-mesh convergence matches pinned table (nu=1e-2)", criterion_1),
    (2, "fixed-mesh convergence matches pinned table (nu=1e-2)", criterion_2),
    (3, "small-diffusion contrast (nu=1e-4)", criterion_3),
    (4, "mass ledger closes to solver precision", criterion_4),
    (5, "randomized node motion stays ordered and dominant", criterion_5),
    (6, "pullback Jacobian bounded on the long benchmark", criterion_6),
    (7, "interpolation converges at orders 2 and 1", criterion_7),
    (8, "moving-interpolant derivative identity", criterion_8),
    (9, "pullback load matches dense midpoint oracle", criterion_9),
    (10, "moving mesh outperforms fixed on the bump benchmark", criterion_10),
];

/// Runs every criterion.
pub fn run_all(seed: u64) -> Vec<CriterionOutcome> {
    run_selected(seed, &[])
}

/// Runs the criteria whose indices appear in `only` (all of them when `only`
/// is empty), in the order requested.
pub fn run_selected(seed: u64, only: &[usize]) -> Vec<CriterionOutcome> {
    let indices: Vec<usize> = if only.is_empty() {
        CRITERIA.iter().map(|c| c.0).collect()
    } else {
        only.to_vec()
    };
    indices
        .into_iter()
        .map(|index| match CRITERIA.iter().find(|c| c.0 == index) {
            Some(&(_, label, run)) => match run(seed) {
                Ok((passed, details)) => CriterionOutcome {
                    index,
                    label,
                    passed,
                    details,
                },
                Err(e) => CriterionOutcome {
                    index,
                    label,
                    passed: false,
                    details: format!("failed to run: {e}"),
                },
            },
            None => CriterionOutcome {
                index,
                label: "unknown criterion",
                passed: false,
                details: "valid indices are 1 through 10".to_string(),
            },
        })
        .collect()
}

/// Prints one line per outcome.
pub fn print_outcomes(outcomes: &[CriterionOutcome]) {
    for o in outcomes {
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        println!("criterion {:02} {} {}: {}", o.index, verdict, o.label, o.details);
    }
}

/// Errors of the travelling-profile benchmark at one refinement level, with
/// the standard coupling `dt = 4 h0 = 8 / n`.
fn benchmark_errors(nu: f64, n: usize, moving: bool) -> lgmm::Result<RelativeErrors> {
    let problem = presets::example1_problem(nu, n, 0.5);
    let dt = 8.0 / n as f64;
    let scheme = SchemeConfig::new(nu, dt, 2);
    let motion = MeshMotionConfig::new(nu, dt, false);
    let out = run_simulation(&problem, &motion, &scheme, moving, &RecordMode::Full)?;
    out.report.errors.ok_or(lgmm::Error::ZeroDenominator)
}

/// Shared body of criteria 1 and 2: rerun the first table rows and compare
/// errors and orders against the pinned values.
fn table_check(nu: f64, moving: bool, rows: &[ReferenceRow]) -> lgmm::Result<(bool, String)> {
    let levels: Vec<usize> = rows.iter().map(|r| r.n).collect();
    let errors = parallel_levels(&levels, |n| benchmark_errors(nu, n, moving))?;

    let mut worst_dev = 0.0_f64;
    for (row, got) in rows.iter().zip(&errors) {
        worst_dev = worst_dev.max((got.l_inf_l2 - row.e_l2).abs() / row.e_l2);
        worst_dev = worst_dev.max((got.l2_h1 - row.e_h1).abs() / row.e_h1);
    }
    let mut worst_eoc = 0.0_f64;
    for i in 1..rows.len() {
        if let Some(quoted) = rows[i].eoc_l2 {
            let order = eoc(errors[i - 1].l_inf_l2, errors[i].l_inf_l2)?;
            worst_eoc = worst_eoc.max((order - quoted).abs());
        }
        if let Some(quoted) = rows[i].eoc_h1 {
            let order = eoc(errors[i - 1].l2_h1, errors[i].l2_h1)?;
            worst_eoc = worst_eoc.max((order - quoted).abs());
        }
    }
    let passed = worst_dev <= TABLE_RTOL && worst_eoc <= EOC_ATOL;
    Ok((
        passed,
        format!(
            "levels {levels:?}: worst error deviation {:.1}% (limit {:.0}%), worst EOC gap {worst_eoc:.3} (limit {EOC_ATOL})",
            100.0 * worst_dev,
            100.0 * TABLE_RTOL
        ),
    ))
}

fn criterion_1(_seed: u64) -> lgmm::Result<(bool, String)> {
    table_check(1.0e-2, true, &MOVING_MESH_NU_1E2[..4])
}

fn criterion_2(_seed: u64) -> lgmm::Result<(bool, String)> {
    table_check(1.0e-2, false, &FIXED_MESH_NU_1E2[..4])
}

fn criterion_3(_seed: u64) -> lgmm::Result<(bool, String)> {
    let levels = [2048, 4096];
    let fixed = parallel_levels(&levels, |n| benchmark_errors(1.0e-4, n, false))?;
    let moving = parallel_levels(&levels, |n| benchmark_errors(1.0e-4, n, true))?;

    let fixed_order = eoc(fixed[0].l_inf_l2, fixed[1].l_inf_l2)?;
    let moving_order = eoc(moving[0].l_inf_l2, moving[1].l_inf_l2)?;

    // Magnitudes are only gated on the finest tier, where both schemes are
    // in their asymptotic regime.
    let factor = |got: f64, want: f64| (got / want).max(want / got);
    let finest = |table: &'static [ReferenceRow]| {
        *table.iter().find(|r| r.n == 4096).expect("table has a 4096 row")
    };
    let fixed_row = finest(FIXED_MESH_NU_1E4);
    let moving_row = finest(MOVING_MESH_NU_1E4);
    let worst_factor = factor(fixed[1].l_inf_l2, fixed_row.e_l2)
        .max(factor(fixed[1].l2_h1, fixed_row.e_h1))
        .max(factor(moving[1].l_inf_l2, moving_row.e_l2))
        .max(factor(moving[1].l2_h1, moving_row.e_h1));

    let passed = fixed_order < STATIC_COARSE_EOC_MAX
        && moving_order >= MOVING_COARSE_EOC_MIN
        && worst_factor <= COARSE_TREND_FACTOR;
    Ok((
        passed,
        format!(
            "fixed-mesh EOC {fixed_order:.2} (must stay below {STATIC_COARSE_EOC_MAX}), \
             moving-mesh EOC {moving_order:.2} (must reach {MOVING_COARSE_EOC_MIN}), \
             worst magnitude factor {worst_factor:.2} (limit {COARSE_TREND_FACTOR})"
        ),
    ))
}

fn criterion_4(_seed: u64) -> lgmm::Result<(bool, String)> {
    let nu = 1.0e-2;
    let n = 256;
    let dt = 8.0 / n as f64;
    let mut worst = [0.0_f64; 2];
    for (slot, order) in [1u8, 2u8].into_iter().enumerate() {
        let problem = presets::example1_problem(nu, n, 0.5);
        let mut scheme = SchemeConfig::new(nu, dt, order);
        // Exact segment-wise quadrature makes the ledger close to solver
        // precision instead of quadrature precision.
        scheme.split_at_kinks = true;
        let motion = MeshMotionConfig::new(nu, dt, false);
        let out = run_simulation(
            &problem,
            &motion,
            &scheme,
            true,
            &RecordMode::Snapshots(Vec::new()),
        )?;
        let m0 = out.report.mass_ledger[0].mass.abs();
        worst[slot] = out
            .report
            .mass_ledger
            .iter()
            .map(|e| e.residual)
            .fold(0.0, f64::max)
            / m0;
    }
    let passed = worst[0] <= MASS_LEDGER_RTOL && worst[1] <= MASS_LEDGER_RTOL;
    Ok((
        passed,
        format!(
            "worst relative residual {:.1e} (order 1) and {:.1e} (order 2), limit {MASS_LEDGER_RTOL:.0e}",
            worst[0], worst[1]
        ),
    ))
}

fn criterion_5(seed: u64) -> lgmm::Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(5));
    let cases = 200;
    let steps = 100;
    let dt = 0.02;
    let mut overlaps = 0usize;
    let mut dominance_failures = 0usize;
    let mut min_margin = f64::INFINITY;
    let mut min_gap = f64::INFINITY;
    let mut max_target = 0.0_f64;

    // Four strata of 50 cases each. Clamped cases use standing waves with
    // oscillating amplitudes (boundary-vanishing, like the long benchmark),
    // unclamped cases use travelling waves (nonvanishing, like the
    // convergence benchmark). Every travelling mode is given a phase speed
    // of two to three times the field's sup: a slower wave has points where
    // the wave speed equals the node speed, nodes lock onto them, and a
    // locked pair sees a frozen negative gradient that shrinks its gap
    // geometrically for the rest of the run, far below the spacing of f64
    // values, while the exact-arithmetic gap merely approaches zero. With
    // no co-moving frame the per-step compression averages out and the
    // accumulated loss stays thousands of float spacings above equality.
    // The unregularized half carries the full step bound, up to
    // dt|u| = 0.9, with exact node updates. The regularized half verifies
    // the matrix structure, which does not depend on the velocity, so it
    // runs at moderated compression where its tridiagonal solves stay well
    // conditioned.
    for case in 0..cases {
        let standing = case % 2 == 1;
        let regularized = case % 4 >= 2;
        let nu_m = if regularized { 0.01 } else { 0.0 };
        let target = if regularized {
            rng.gen_range(0.05..0.3)
        } else {
            rng.gen_range(0.3..NONOVERLAP_MARGIN_MAX)
        };
        let mut a = [0.0_f64; 3];
        let mut th = [0.0_f64; 3];
        let mut om = [0.0_f64; 3];
        for k in 0..3 {
            let mag = rng.gen_range(0.2..1.0);
            a[k] = if rng.gen::<bool>() { mag } else { -mag };
            th[k] = rng.gen_range(0.0..TAU);
        }
        let raw_sup: f64 = a.iter().map(|v| v.abs()).sum();
        let raw_lip: f64 = a
            .iter()
            .enumerate()
            .map(|(k, v)| v.abs() * (k as f64 + 1.0) * PI)
            .sum();
        let amp = target / (dt * raw_lip);
        for (k, w) in om.iter_mut().enumerate() {
            *w = if standing {
                rng.gen_range(20.0..40.0)
            } else {
                (k as f64 + 1.0) * PI * amp * raw_sup * rng.gen_range(2.0..3.0)
            };
        }
        let u = if standing {
            VelocityField::new(
                move |x, t| {
                    amp * (0..3)
                        .map(|k| {
                            a[k] * (th[k] + om[k] * t).cos() * ((k as f64 + 1.0) * PI * x).sin()
                        })
                        .sum::<f64>()
                },
                move |x, t| {
                    amp * (0..3)
                        .map(|k| {
                            let m = (k as f64 + 1.0) * PI;
                            a[k] * (th[k] + om[k] * t).cos() * m * (m * x).cos()
                        })
                        .sum::<f64>()
                },
                amp * raw_sup,
                amp * raw_lip,
                true,
            )
        } else {
            VelocityField::new(
                move |x, t| {
                    amp * (0..3)
                        .map(|k| a[k] * ((k as f64 + 1.0) * PI * x + th[k] + om[k] * t).sin())
                        .sum::<f64>()
                },
                move |x, t| {
                    amp * (0..3)
                        .map(|k| {
                            let m = (k as f64 + 1.0) * PI;
                            a[k] * m * (m * x + th[k] + om[k] * t).cos()
                        })
                        .sum::<f64>()
                },
                amp * raw_sup,
                amp * raw_lip,
                false,
            )
        };
        max_target = max_target.max(dt * u.w1_inf_norm());
        let mut cfg = MeshMotionConfig::new(nu_m, dt, standing);
        // Even moderated compression squeezes the motion matrix's relative
        // dominance below what production meshes ever see. Heavier
        // over-relaxation is near optimal in that regime, and the ordering
        // check needs node positions, not twelve digits: at 1e-9 the
        // position error stays below 1e-10, orders of magnitude under any
        // gap this loop produces.
        cfg.sor_omega = 1.7;
        cfg.sor_tol = 1.0e-9;
        cfg.sor_max_iter = Some(20000);

        let n_el = 64;
        let h = 2.0 / n_el as f64;
        let mut points = vec![-1.0];
        for i in 1..n_el {
            points.push(-1.0 + i as f64 * h + rng.gen_range(-0.3..0.3) * h);
        }
        points.push(1.0);
        let mut mesh = MeshLevel::new(points, 0.0)?;

        for _ in 0..steps {
            let vels: Vec<f64> = mesh.points.iter().map(|&x| u.eval(x, mesh.time)).collect();
            let sys = assemble_motion_system(&mesh, &vels, &cfg)?;
            if !sys.is_strictly_diagonally_dominant() {
                dominance_failures += 1;
            }
            min_margin = min_margin.min(motion_positivity_margin(&mesh, &vels, dt));
            match advance_mesh(&mesh, &u, &cfg) {
                Ok(next) => {
                    min_gap = min_gap.min(next.min_gap());
                    mesh = next;
                }
                Err(lgmm::Error::MeshOverlap { .. }) => {
                    overlaps += 1;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
    }

    let passed = overlaps == 0 && dominance_failures == 0;
    Ok((
        passed,
        format!(
            "{cases} fields x {steps} steps with dt|u| up to {max_target:.2}: \
             {overlaps} overlaps, {dominance_failures} dominance failures, \
             min positivity margin {min_margin:.2e}, min gap {min_gap:.2e}"
        ),
    ))
}

fn criterion_6(_seed: u64) -> lgmm::Result<(bool, String)> {
    let u = presets::example2_velocity();
    let dt = 1.0e-4;
    let cfg = MeshMotionConfig::new(1.0e-5, dt, true);
    let rule = gauss_rule(5)?;
    let mut mesh = initial_uniform_mesh(-1.0, 1.0, 256)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for step in 1..=20000 {
        let t_new = step as f64 * dt;
        let next = advance_mesh(&mesh, &u, &cfg)?.at_time(t_new);
        let single = UpwindMap::new(&u, t_new, dt);
        let double = UpwindMap::new(&u, t_new, 2.0 * dt);
        for k in 0..next.n_elements() {
            for (x, _) in rule.mapped(next.points[k], next.points[k + 1]) {
                for map in [&single, &double] {
                    let g = map.jacobian(x);
                    lo = lo.min(g);
                    hi = hi.max(g);
                }
            }
        }
        mesh = next;
    }
    let passed = lo >= GAMMA_LOWER && hi <= GAMMA_UPPER;
    Ok((
        passed,
        format!(
            "Jacobian range [{lo:.6}, {hi:.6}] over 20000 steps, bounds [{GAMMA_LOWER}, {GAMMA_UPPER}]"
        ),
    ))
}

fn criterion_7(_seed: u64) -> lgmm::Result<(bool, String)> {
    let rule = gauss_rule(8)?;
    let v = |x: f64| (PI * x).sin();
    let dv = |x: f64| PI * (PI * x).cos();
    let mut l2 = Vec::new();
    let mut h1 = Vec::new();
    for k in 0..5 {
        let mesh = initial_uniform_mesh(-1.0, 1.0, 16usize << k)?;
        let p = interpolate(v, &mesh);
        let (mut e2, mut g2) = (0.0, 0.0);
        for el in 0..mesh.n_elements() {
            let slope = (p.values[el + 1] - p.values[el]) / mesh.gap(el);
            for (x, w) in rule.mapped(mesh.points[el], mesh.points[el + 1]) {
                let diff = v(x) - evaluate(&p, x, ExtensionPolicy::Reject)?;
                e2 += w * diff * diff;
                let gdiff = dv(x) - slope;
                g2 += w * gdiff * gdiff;
            }
        }
        l2.push(e2.sqrt());
        h1.push(g2.sqrt());
    }
    let mut worst_l2 = 0.0_f64;
    let mut worst_h1 = 0.0_f64;
    for i in 1..l2.len() {
        worst_l2 = worst_l2.max((eoc(l2[i - 1], l2[i])? - INTERP_L2_EOC).abs());
        worst_h1 = worst_h1.max((eoc(h1[i - 1], h1[i])? - INTERP_H1_EOC).abs());
    }
    let passed = worst_l2 <= INTERP_EOC_ATOL && worst_h1 <= INTERP_EOC_ATOL;
    Ok((
        passed,
        format!(
            "EOC gaps up to {worst_l2:.3} from {INTERP_L2_EOC} (L2) and {worst_h1:.3} from \
             {INTERP_H1_EOC} (H1 seminorm), limit {INTERP_EOC_ATOL}"
        ),
    ))
}

fn criterion_8(seed: u64) -> lgmm::Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(8));
    let phi = |x: f64, t: f64| (2.3 * x + 0.7 * t).sin() + 0.3 * (1.1 * x * t).cos();
    let phi_t = |x: f64, t: f64| 0.7 * (2.3 * x + 0.7 * t).cos() - 0.33 * x * (1.1 * x * t).sin();
    let phi_x = |x: f64, t: f64| 2.3 * (2.3 * x + 0.7 * t).cos() - 0.33 * t * (1.1 * x * t).sin();
    let t0 = 0.3;
    let delta = 1.0e-5;

    let n_el = 11;
    let min_gap = 0.02;
    let extra = 2.0 - min_gap * n_el as f64;
    let weights: Vec<f64> = (0..n_el).map(|_| rng.gen_range(0.0..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut points = vec![-1.0];
    for w in &weights {
        points.push(points.last().unwrap() + min_gap + w / total * extra);
    }
    *points.last_mut().unwrap() = 1.0;
    let base = MeshLevel::new(points, t0)?;

    let w: Vec<f64> = (0..base.n_points())
        .map(|_| rng.gen_range(-0.5..0.5))
        .collect();
    let vels = NodeVelocities {
        values: w.clone(),
        dt: 1.0,
    };

    let shifted = |sign: f64| -> lgmm::Result<PiecewiseLinearFunction> {
        let t = t0 + sign * delta;
        let points: Vec<f64> = base
            .points
            .iter()
            .zip(&w)
            .map(|(&p, &wi)| p + sign * delta * wi)
            .collect();
        Ok(interpolate(|x| phi(x, t), &MeshLevel::new(points, t)?))
    };
    let plus = shifted(1.0)?;
    let minus = shifted(-1.0)?;
    let material_values: Vec<f64> = base
        .points
        .iter()
        .zip(&w)
        .map(|(&p, &wi)| phi_t(p, t0) + wi * phi_x(p, t0))
        .collect();
    let material = PiecewiseLinearFunction::new(base.clone(), material_values)?;

    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let x = rng.gen_range(base.a() + 0.01..base.b() - 0.01);
        let closed = interp_time_derivative(phi, &base, &vels, x, t0)?;
        let fd = (evaluate(&plus, x, ExtensionPolicy::LinearExtension)?
            - evaluate(&minus, x, ExtensionPolicy::LinearExtension)?)
            / (2.0 * delta);
        let derived = fd - evaluate(&material, x, ExtensionPolicy::LinearExtension)?;
        worst = worst.max((closed - derived).abs() / closed.abs().max(1.0e-12));
    }
    let passed = worst <= INTERP_DERIVATIVE_RTOL;
    Ok((
        passed,
        format!(
            "worst relative defect {worst:.1e} over 100 samples, limit {INTERP_DERIVATIVE_RTOL:.0e}"
        ),
    ))
}

/// Independent dense quadrature of the pullback load: the integrand is cut
/// at the preimages of the old mesh's interior nodes (the only kinks when
/// out-of-hull points extend linearly) and each smooth piece is integrated
/// with 2000 midpoints.
fn dense_load_oracle(
    prev: &PiecewiseLinearFunction,
    map: &UpwindMap,
    new_mesh: &MeshLevel,
) -> lgmm::Result<Vec<f64>> {
    let bisect = |mut lo: f64, mut hi: f64, y: f64| {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if map.upwind_point(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let mut load = vec![0.0; new_mesh.n_points()];
    for k in 0..new_mesh.n_elements() {
        let xl = new_mesh.points[k];
        let xr = new_mesh.points[k + 1];
        let h = xr - xl;
        let yl = map.upwind_point(xl);
        let yr = map.upwind_point(xr);
        let mut cuts = vec![xl];
        if yl < yr {
            let interior = &prev.mesh.points[1..prev.mesh.n_points() - 1];
            for &y in interior {
                if y > yl && y < yr {
                    cuts.push(bisect(xl, xr, y));
                }
            }
        }
        cuts.push(xr);
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for seg in cuts.windows(2) {
            let dx = (seg[1] - seg[0]) / 2000.0;
            if dx <= 0.0 {
                continue;
            }
            let (mut acc_l, mut acc_r) = (0.0, 0.0);
            for m in 0..2000 {
                let x = seg[0] + (m as f64 + 0.5) * dx;
                let value = evaluate(prev, map.upwind_point(x), ExtensionPolicy::LinearExtension)?
                    * map.jacobian(x);
                acc_l += value * (xr - x) / h;
                acc_r += value * (x - xl) / h;
            }
            load[k] += acc_l * dx;
            load[k + 1] += acc_r * dx;
        }
    }
    Ok(load)
}

fn criterion_9(seed: u64) -> lgmm::Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(9));
    let rule = gauss_rule(5)?;
    let mut worst = 0.0_f64;
    let cases = 50;
    for _ in 0..cases {
        let random_mesh = |rng: &mut ChaCha8Rng| -> lgmm::Result<MeshLevel> {
            let n_el: usize = rng.gen_range(3..=8);
            let min_gap = 0.05;
            let extra = 2.0 - min_gap * n_el as f64;
            let weights: Vec<f64> = (0..n_el).map(|_| rng.gen_range(0.1..1.0)).collect();
            let total: f64 = weights.iter().sum();
            let mut points = vec![-1.0];
            for w in &weights {
                points.push(points.last().unwrap() + min_gap + w / total * extra);
            }
            *points.last_mut().unwrap() = 1.0;
            MeshLevel::new(points, 0.0)
        };
        let old_mesh = random_mesh(&mut rng)?;
        let new_mesh = random_mesh(&mut rng)?;
        let values: Vec<f64> = (0..old_mesh.n_points())
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let prev = PiecewiseLinearFunction::new(old_mesh, values)?;

        let a = rng.gen_range(0.2..0.8);
        let th = rng.gen_range(0.0..TAU);
        let u = VelocityField::new(
            move |x, _| a * (PI * x + th).sin(),
            move |x, _| a * PI * (PI * x + th).cos(),
            a,
            a * PI,
            false,
        );
        let dt = rng.gen_range(0.02..0.1);
        let map = UpwindMap::new(&u, 0.0, dt);

        let got = composed_load(
            &prev,
            &map,
            &new_mesh,
            &rule,
            ExtensionPolicy::LinearExtension,
            true,
        )?;
        let want = dense_load_oracle(&prev, &map, &new_mesh)?;
        let gap = got
            .iter()
            .zip(&want)
            .map(|(g, w)| (g - w).abs())
            .fold(0.0, f64::max);
        let scale = want.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        worst = worst.max(gap / scale);
    }
    let passed = worst <= COMPOSED_ORACLE_RTOL;
    Ok((
        passed,
        format!(
            "worst relative gap {worst:.1e} over {cases} cases, limit {COMPOSED_ORACLE_RTOL:.0e}"
        ),
    ))
}

fn criterion_10(_seed: u64) -> lgmm::Result<(bool, String)> {
    let problem = presets::example2_problem(256, 2.0);
    let scheme = SchemeConfig::new(1.0e-5, 1.0e-4, 2);
    let motion = MeshMotionConfig::new(1.0e-5, 1.0e-4, true);
    let mut mins = [0.0_f64; 2];
    let mut times = [0.0_f64; 2];
    for (slot, moving) in [true, false].into_iter().enumerate() {
        let started = Instant::now();
        let out = run_simulation(
            &problem,
            &motion,
            &scheme,
            moving,
            &RecordMode::Snapshots(vec![10000]),
        )?;
        times[slot] = started.elapsed().as_secs_f64();
        mins[slot] = out
            .states
            .last()
            .expect("run records the final step")
            .values
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
    }
    let passed = mins[0] > mins[1]
        && times[0] < RUNTIME_LIMIT_SECONDS
        && times[1] < RUNTIME_LIMIT_SECONDS;
    Ok((
        passed,
        format!(
            "final minimum {:.3} (moving) vs {:.3} (fixed); runtimes {:.1}s and {:.1}s, limit {RUNTIME_LIMIT_SECONDS:.0}s",
            mins[0], mins[1], times[0], times[1]
        ),
    ))
}

////////////////////////////////////////////////////////////////////////////////
