//! Refinement stability of the travelling-profile benchmark: the discrete
//! energy (peak squared L2 norm plus accumulated diffusion) must not grow
//! as the mesh and step refine together.

use lgmm::diagnostics::stability_functional;
use lgmm::mesh::MeshMotionConfig;
use lgmm::scheme::{run_simulation, RecordMode, SchemeConfig};
use lgmm_cli::presets;
use lgmm_cli::tolerances::STABILITY_RATIO_MAX;

#[test]
fn refinement_does_not_inflate_the_stability_functional() {
    let nu = 1.0e-2;
    let mut values = Vec::new();
    for k in 0..4 {
        let n = 128usize << k;
        let dt = 8.0 / n as f64;
        let problem = presets::example1_problem(nu, n, 0.5);
        let out = run_simulation(
            &problem,
            &MeshMotionConfig::new(nu, dt, false),
            &SchemeConfig::new(nu, dt, 2),
            true,
            &RecordMode::Full,
        )
        .unwrap();
        values.push(stability_functional(&out.states, nu, dt));
    }
    for pair in values.windows(2) {
        let ratio = pair[1] / pair[0];
        assert!(
            ratio <= STABILITY_RATIO_MAX,
            "stability functional grew by {ratio:.4} under refinement: {values:?}"
        );
    }
}
