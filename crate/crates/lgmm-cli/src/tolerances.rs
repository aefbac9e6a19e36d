//! Gate constants for the acceptance checks and stress tests, each with the
//! calibrated margin it was set against.

/// Relative deviation allowed between computed error norms and the pinned
/// reference rows. Calibrated runs agree to better than one percent.
pub const TABLE_RTOL: f64 = 0.15;

/// Absolute deviation allowed between recomputed convergence orders and the
/// quoted ones. The worst calibrated deviation is about 0.15, on a
/// moving-mesh pair whose quoted order is itself noisy.
pub const EOC_ATOL: f64 = 0.2;

/// Factor allowed between computed and pinned error magnitudes on the
/// finest small-diffusion rows. Calibrated runs agree to a few percent.
pub const COARSE_TREND_FACTOR: f64 = 2.0;

/// The fixed-mesh small-diffusion order must stay below this on the finest
/// pair (calibrated 0.92): the fixed mesh under-resolves the front.
pub const STATIC_COARSE_EOC_MAX: f64 = 1.1;

/// The moving-mesh small-diffusion order must reach this on the finest
/// pair (calibrated 2.0).
pub const MOVING_COARSE_EOC_MIN: f64 = 1.8;

/// Per-step mass-ledger residual gate, relative to the initial mass.
/// Calibrated worst case is 4e-10, for the order-1 scheme with kink-split
/// quadrature and a CG tolerance of 1e-12.
pub const MASS_LEDGER_RTOL: f64 = 1e-9;

/// Bounds on the characteristic Jacobian guaranteed by the step-size
/// bound; the long benchmark stays within [0.9987, 1.0013].
pub const GAMMA_LOWER: f64 = 0.5;
pub const GAMMA_UPPER: f64 = 1.5;

/// Expected interpolation orders and the allowed deviation per refinement.
pub const INTERP_L2_EOC: f64 = 2.0;
pub const INTERP_H1_EOC: f64 = 1.0;
pub const INTERP_EOC_ATOL: f64 = 0.1;

/// Gate on the closed-form moving-interpolant derivative correction against
/// a centered finite difference. Calibrated worst case is 4e-9.
pub const INTERP_DERIVATIVE_RTOL: f64 = 1e-4;

/// Gate on the pullback load against the dense midpoint oracle, as
/// max-entry deviation over max-entry oracle magnitude. Calibrated worst
/// case is 2e-7 with kink-split quadrature.
pub const COMPOSED_ORACLE_RTOL: f64 = 1e-6;

/// Wall-clock limit per 20000-step benchmark run in the payoff check;
/// calibrated runs finish in seconds.
pub const RUNTIME_LIMIT_SECONDS: f64 = 300.0;

/// Largest step-size margin `dt * |u|_{W1,inf}` exercised by the randomized
/// motion stress; below one, node ordering is guaranteed.
pub const NONOVERLAP_MARGIN_MAX: f64 = 0.9;

/// Refining the benchmark may not inflate the discrete stability functional
/// by more than this factor per level; calibrated ratios stay below 1.002.
pub const STABILITY_RATIO_MAX: f64 = 1.1;
