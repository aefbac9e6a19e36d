//! End-to-end checks of the command layer: deterministic outputs, the
//! written file set, and the error contract.

use std::path::Path;

use lgmm_cli::commands::{cmd_compare, cmd_convergence, cmd_run};
use lgmm_cli::config::resolve;

/// Name and bytes of every comparable output in `dir`: the CSVs and the
/// summary, but not `config.txt`, which embeds the output path itself.
fn read_comparable(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().into_string().unwrap(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .filter(|(name, _)| name.ends_with(".csv") || name == "summary.txt")
        .collect();
    entries.sort();
    entries
}

#[test]
fn rerunning_an_experiment_reproduces_every_output_byte() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut outputs = Vec::new();
    for dir in &dirs {
        let mut cfg = resolve(Some("example1"), None, &["n=64".to_string()]).unwrap();
        cfg.output_dir = dir.path().to_path_buf();
        cmd_run(&cfg).unwrap();
        outputs.push(read_comparable(dir.path()));
    }
    // Three solution snapshots, ledger, mesh, mesh stats, and the summary.
    assert_eq!(outputs[0].len(), 7);
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn a_tiny_convergence_study_writes_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = resolve(Some("example1"), None, &[]).unwrap();
    cfg.output_dir = dir.path().to_path_buf();
    cmd_convergence(&cfg, &[16, 32]).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(
        lines[0],
        "n_elements,dt,e_linf_l2,eoc_linf_l2,e_l2_h1,eoc_l2_h1,e_mass"
    );
    assert!(lines[1].starts_with("16,5e-1,"));
    assert!(lines[1].contains(",,"), "first row must not claim an order");
    assert!(lines[2].starts_with("32,2.5e-1,"));
    assert!(!lines[2].contains(",,"), "second row must carry both orders");
}

#[test]
fn compare_reports_both_variants() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = resolve(
        Some("example2"),
        None,
        &["n=32".to_string(), "t_end=0.01".to_string()],
    )
    .unwrap();
    cfg.output_dir = dir.path().to_path_buf();
    cmd_compare(&cfg).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("compare.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("moving,"));
    assert!(lines[2].starts_with("fixed,"));
    assert!(dir.path().join("solution_moving_final.csv").exists());
    assert!(dir.path().join("solution_fixed_final.csv").exists());
    assert!(dir.path().join("mesh_stats_moving.csv").exists());
    assert!(dir.path().join("mesh_stats_fixed.csv").exists());
}

#[test]
fn the_custom_preset_requires_the_library_api() {
    let cfg = resolve(Some("custom"), None, &[]).unwrap();
    let err = cmd_run(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("library API"), "got: {err}");
}

#[test]
fn convergence_levels_must_be_dyadic() {
    let cfg = resolve(Some("example1"), None, &[]).unwrap();
    assert_eq!(cmd_convergence(&cfg, &[64]).unwrap_err().exit_code(), 2);
    assert_eq!(cmd_convergence(&cfg, &[48, 96]).unwrap_err().exit_code(), 2);
    assert_eq!(cmd_convergence(&cfg, &[64, 256]).unwrap_err().exit_code(), 2);
}
