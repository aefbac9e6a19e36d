//! The experiment commands behind the CLI: single runs, convergence
//! studies, moving-vs-fixed comparisons, and the self test.
//!
//! All output files use deterministic formatting (shortest round-trip float
//! representation, fixed column order), so rerunning a command with the same
//! configuration produces byte-identical CSVs. Wall-clock timings go to
//! stdout only.

use std::fmt;
use std::fs;
use std::path::Path;
use std::time::Instant;

use lgmm::diagnostics::{convergence_rows, ConvergenceRow, LedgerEntry, MeshStats, RelativeErrors};
use lgmm::fem::PiecewiseLinearFunction;
use lgmm::scheme::{run_simulation, step_count, RecordMode, SimulationOutput};

use crate::config::{ConfigError, ExperimentConfig};
use crate::presets;

/// A command failure, carrying the process exit code to report.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or inconsistent configuration (exit code 2).
    Config(ConfigError),
    /// Solver failure: divergence, tangled mesh, degenerate input
    /// (exit code 3).
    Numerical(lgmm::Error),
    /// Output files could not be written (exit code 3).
    Io(String),
    /// This many acceptance criteria failed (exit code 4).
    Acceptance(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
            CliError::Acceptance(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "configuration: {e}"),
            CliError::Numerical(e) => write!(f, "solver: {e}"),
            CliError::Io(e) => write!(f, "output: {e}"),
            CliError::Acceptance(n) => write!(f, "{n} acceptance criteria failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<lgmm::Error> for CliError {
    fn from(e: lgmm::Error) -> Self {
        CliError::Numerical(e)
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// The steps a run records: every `stride`-th level plus the initial,
/// middle, and final ones.
fn snapshot_steps(n_t: usize, stride: usize) -> Vec<usize> {
    let mut steps: Vec<usize> = (0..=n_t).step_by(stride.max(1)).collect();
    steps.push(n_t / 2);
    steps.push(n_t);
    steps.sort_unstable();
    steps.dedup();
    steps
}

fn auto_stride(n_t: usize, configured: Option<usize>) -> usize {
    configured.unwrap_or_else(|| (n_t / 200).max(1)).max(1)
}

fn solution_csv(state: &PiecewiseLinearFunction) -> String {
    let mut s = String::from("time,position,value\n");
    for (p, v) in state.mesh.points.iter().zip(&state.values) {
        s.push_str(&format!("{:e},{:e},{:e}\n", state.mesh.time, p, v));
    }
    s
}

fn mass_ledger_csv(entries: &[LedgerEntry]) -> String {
    let mut s = String::from("step,time,mass,ledger_rhs,residual\n");
    for e in entries {
        s.push_str(&format!(
            "{},{:e},{:e},{:e},{:e}\n",
            e.step, e.time, e.mass, e.expected, e.residual
        ));
    }
    s
}

fn mesh_csv(states: &[PiecewiseLinearFunction], steps: &[usize], keep: impl Fn(usize) -> bool) -> String {
    let mut s = String::from("step,time,node_index,position\n");
    for (state, &step) in states.iter().zip(steps) {
        if !keep(step) {
            continue;
        }
        for (i, p) in state.mesh.points.iter().enumerate() {
            s.push_str(&format!("{step},{:e},{i},{:e}\n", state.mesh.time, p));
        }
    }
    s
}

fn mesh_stats_csv(stats: &[MeshStats], dt: f64) -> String {
    let mut s = String::from("step,time,min_gap,max_gap\n");
    for (step, st) in stats.iter().enumerate() {
        s.push_str(&format!(
            "{step},{:e},{:e},{:e}\n",
            step as f64 * dt,
            st.min_gap,
            st.max_gap
        ));
    }
    s
}

fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut s = String::from("n_elements,dt,e_linf_l2,eoc_linf_l2,e_l2_h1,eoc_l2_h1,e_mass\n");
    for r in rows {
        let (eoc_l2, eoc_h1) = match r.eocs {
            Some(e) => (format!("{:.2}", e[0]), format!("{:.2}", e[1])),
            None => (String::new(), String::new()),
        };
        s.push_str(&format!(
            "{},{:e},{:e},{eoc_l2},{:e},{eoc_h1},{:e}\n",
            r.n_elements, r.dt, r.errors.l_inf_l2, r.errors.l2_h1, r.errors.mass
        ));
    }
    s
}

fn run_summary(cfg: &ExperimentConfig, out: &SimulationOutput, n_t: usize) -> String {
    let mut s = String::new();
    let last = out.states.last().expect("run records at least step 0");
    let worst_residual = out
        .report
        .mass_ledger
        .iter()
        .map(|e| e.residual)
        .fold(0.0, f64::max);
    let min_value = last.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_value = last.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    s.push_str(&format!("steps = {n_t}\n"));
    s.push_str(&format!("final_time = {:e}\n", last.mesh.time));
    s.push_str(&format!(
        "final_mass = {:e}\n",
        out.report.mass_ledger.last().expect("nonempty ledger").mass
    ));
    s.push_str(&format!("worst_ledger_residual = {:e}\n", worst_residual));
    s.push_str(&format!("final_min_value = {:e}\n", min_value));
    s.push_str(&format!("final_max_value = {:e}\n", max_value));
    match &out.report.errors {
        Some(e) => {
            s.push_str(&format!("e_linf_l2 = {:e}\n", e.l_inf_l2));
            s.push_str(&format!("e_l2_h1 = {:e}\n", e.l2_h1));
            s.push_str(&format!("e_mass = {:e}\n", e.mass));
        }
        None => s.push_str("# error norms need an exact solution and full recording\n"),
    }
    let _ = cfg;
    s
}

/// Runs one experiment and writes its output files.
pub fn cmd_run(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let problem = presets::problem(cfg)?;
    let scheme = cfg.scheme_config();
    let motion = cfg.motion_config();
    let n_t = step_count(cfg.t_end, scheme.dt);
    let stride = auto_stride(n_t, cfg.mesh_stride);
    let snapshots = snapshot_steps(n_t, stride);
    // Error norms need every level; otherwise keep only the snapshots.
    let record = if problem.exact.is_some() {
        RecordMode::Full
    } else {
        RecordMode::Snapshots(snapshots.clone())
    };

    let started = Instant::now();
    let out = run_simulation(&problem, &motion, &scheme, cfg.moving, &record)?;
    let elapsed = started.elapsed().as_secs_f64();

    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    write_file(&dir.join("config.txt"), &cfg.to_display())?;

    let mut solution_steps = vec![0, n_t / 2, n_t];
    solution_steps.dedup();
    for &step in &solution_steps {
        let index = out
            .recorded_steps
            .iter()
            .position(|&s| s == step)
            .expect("snapshot steps are recorded");
        write_file(
            &dir.join(format!("solution_{step:06}.csv")),
            &solution_csv(&out.states[index]),
        )?;
    }
    write_file(
        &dir.join("mass_ledger.csv"),
        &mass_ledger_csv(&out.report.mass_ledger),
    )?;
    write_file(
        &dir.join("mesh.csv"),
        &mesh_csv(&out.states, &out.recorded_steps, |step| {
            step % stride == 0 || step == n_t
        }),
    )?;
    write_file(
        &dir.join("mesh_stats.csv"),
        &mesh_stats_csv(&out.report.mesh_stats, scheme.dt),
    )?;
    let summary = run_summary(cfg, &out, n_t);
    write_file(&dir.join("summary.txt"), &summary)?;

    print!("{summary}");
    println!("# wrote {} in {elapsed:.2}s", dir.display());
    Ok(())
}

/// Errors of one refinement level of a configuration: same experiment with
/// `n` elements (and the step the dt rule derives from it).
pub fn level_errors(cfg: &ExperimentConfig, n: usize) -> lgmm::Result<RelativeErrors> {
    let mut level = cfg.clone();
    level.n_elements = n;
    let problem = presets::problem(&level).expect("caller validated the preset");
    let out = run_simulation(
        &problem,
        &level.motion_config(),
        &level.scheme_config(),
        level.moving,
        &RecordMode::Full,
    )?;
    out.report.errors.ok_or(lgmm::Error::ZeroDenominator)
}

/// Runs `work` for each level on its own thread, preserving input order.
pub fn parallel_levels<F>(levels: &[usize], work: F) -> lgmm::Result<Vec<RelativeErrors>>
where
    F: Fn(usize) -> lgmm::Result<RelativeErrors> + Sync,
{
    std::thread::scope(|scope| {
        let work = &work;
        let handles: Vec<_> = levels
            .iter()
            .map(|&n| scope.spawn(move || work(n)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("level worker panicked"))
            .collect()
    })
}

/// Runs a dyadic refinement study and writes `convergence.csv`.
pub fn cmd_convergence(cfg: &ExperimentConfig, levels: &[usize]) -> Result<(), CliError> {
    if levels.len() < 2 {
        return Err(ConfigError::new("need at least two refinement levels").into());
    }
    if !levels[0].is_power_of_two() {
        return Err(ConfigError::new("levels must be powers of two").into());
    }
    for pair in levels.windows(2) {
        if pair[1] != 2 * pair[0] {
            return Err(ConfigError::new(format!(
                "levels must double at each step, got {} after {}",
                pair[1], pair[0]
            ))
            .into());
        }
    }
    let probe = presets::problem(cfg)?;
    if probe.exact.is_none() {
        return Err(ConfigError::new(format!(
            "preset '{}' has no exact solution; a convergence study needs one",
            cfg.preset.name()
        ))
        .into());
    }

    let started = Instant::now();
    let errors = parallel_levels(levels, |n| level_errors(cfg, n))?;
    let elapsed = started.elapsed().as_secs_f64();

    let results: Vec<(usize, f64, RelativeErrors)> = levels
        .iter()
        .zip(&errors)
        .map(|(&n, e)| {
            let mut level = cfg.clone();
            level.n_elements = n;
            (n, level.dt(), *e)
        })
        .collect();
    let rows = convergence_rows(&results)?;

    println!(
        "{:>8} {:>12} {:>13} {:>6} {:>13} {:>6} {:>13}",
        "N", "dt", "E_linf(L2)", "EOC", "E_l2(H1)", "EOC", "E_mass"
    );
    for r in &rows {
        let (eoc_l2, eoc_h1) = match r.eocs {
            Some(e) => (format!("{:.2}", e[0]), format!("{:.2}", e[1])),
            None => ("-".to_string(), "-".to_string()),
        };
        println!(
            "{:>8} {:>12.5e} {:>13.6e} {:>6} {:>13.6e} {:>6} {:>13.6e}",
            r.n_elements, r.dt, r.errors.l_inf_l2, eoc_l2, r.errors.l2_h1, eoc_h1, r.errors.mass
        );
    }

    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    write_file(&dir.join("config.txt"), &cfg.to_display())?;
    write_file(&dir.join("convergence.csv"), &convergence_csv(&rows))?;
    println!("# wrote {} in {elapsed:.2}s", dir.display());
    Ok(())
}

/// Runs the moving-mesh and fixed-mesh variants of one configuration and
/// reports their final-state quality side by side.
pub fn cmd_compare(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let problem = presets::problem(cfg)?;
    let scheme = cfg.scheme_config();
    let motion = cfg.motion_config();
    let n_t = step_count(cfg.t_end, scheme.dt);
    let stride = auto_stride(n_t, cfg.mesh_stride);
    let snapshots = snapshot_steps(n_t, stride);

    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    write_file(&dir.join("config.txt"), &cfg.to_display())?;

    let mut csv = String::from("variant,min_value,total_variation,max_abs_value,min_gap,max_gap\n");
    println!(
        "{:>8} {:>13} {:>15} {:>13} {:>12} {:>12} {:>8}",
        "variant", "min_value", "total_variation", "max_abs", "min_gap", "max_gap", "time"
    );
    for (name, moving) in [("moving", true), ("fixed", false)] {
        let started = Instant::now();
        let out = run_simulation(
            &problem,
            &motion,
            &scheme,
            moving,
            &RecordMode::Snapshots(snapshots.clone()),
        )?;
        let elapsed = started.elapsed().as_secs_f64();
        let last = out.states.last().expect("run records the final step");
        let min_value = last.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_abs = last.values.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        let total_variation: f64 = last.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        let min_gap = out
            .report
            .mesh_stats
            .iter()
            .map(|s| s.min_gap)
            .fold(f64::INFINITY, f64::min);
        let max_gap = out
            .report
            .mesh_stats
            .iter()
            .map(|s| s.max_gap)
            .fold(0.0, f64::max);

        csv.push_str(&format!(
            "{name},{:e},{:e},{:e},{:e},{:e}\n",
            min_value, total_variation, max_abs, min_gap, max_gap
        ));
        println!(
            "{name:>8} {min_value:>13.5e} {total_variation:>15.5e} {max_abs:>13.5e} \
             {min_gap:>12.5e} {max_gap:>12.5e} {elapsed:>7.1}s"
        );
        write_file(
            &dir.join(format!("solution_{name}_final.csv")),
            &solution_csv(last),
        )?;
        write_file(
            &dir.join(format!("mesh_stats_{name}.csv")),
            &mesh_stats_csv(&out.report.mesh_stats, scheme.dt),
        )?;
    }
    write_file(&dir.join("compare.csv"), &csv)?;
    println!("# wrote {}", dir.display());
    Ok(())
}

/// Prints the resolved configuration.
pub fn cmd_print_config(cfg: &ExperimentConfig) -> Result<(), CliError> {
    print!("{}", cfg.to_display());
    Ok(())
}

/// Runs the acceptance checks (all of them, or the listed indices) and
/// prints one line per criterion.
pub fn cmd_selftest(seed: u64, only: &[usize]) -> Result<(), CliError> {
    let outcomes = crate::acceptance::run_selected(seed, only);
    crate::acceptance::print_outcomes(&outcomes);
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Acceptance(failed))
    }
}

////////////////////////////////////////////////////////////////////////////////
