use std::sync::Arc;

use lgmm::mesh::MeshMotionConfig;
use lgmm::scheme::{run_simulation, Problem, RecordMode, SchemeConfig, SourceData};
use lgmm::transport::VelocityField;

fn main() -> lgmm::Result<()> {
    let velocity = VelocityField::new(
        |x, t| (t - x).sin(),
        |x, t| -(t - x).cos(),
        1.0, // sup bound
        1.0, // Lipschitz bound
        false,
    );
    let problem = Problem {
        domain: (-1.0, 1.0),
        t_end: 0.5,
        n_elements: 256,
        velocity,
        source: SourceData::zero(),
        initial: Arc::new(|x: f64| (-x * x / 0.01).exp()),
        exact: None,
    };
    let scheme = SchemeConfig::new(0.01, 0.5 / 64.0, 2);
    let motion = MeshMotionConfig::new(0.01, scheme.dt, false);
    let out = run_simulation(&problem, &motion, &scheme, true, &RecordMode::Full)?;
    println!("final mass {:e}", out.report.mass_ledger.last().unwrap().mass);
    Ok(())
}
