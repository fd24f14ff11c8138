use std::path::Path;
use std::process::Command;

fn cutfrac(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cutfrac"))
        .args(args)
        .env("CUTFRAC_OUT", out)
        .output()
        .expect("spawn cutfrac")
}

#[test]
fn run_writes_outputs_to_env_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = cutfrac(&["run", "example1", "--nx", "6", "--vtk", "--csv"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("L2 error total"));
    for f in ["example1_nx6.vtk", "example1_nx6_solution.csv", "example1_nx6_cut.csv", "example1_nx6_errors.csv"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
}

#[test]
fn deterministic_runs_are_bitwise_identical() {
    let read = || {
        let dir = tempfile::tempdir().unwrap();
        let o = cutfrac(&["run", "example5", "--nx", "9", "--csv", "--deterministic"], dir.path());
        assert!(o.status.success());
        ["example5_nx9_solution.csv", "example5_nx9_cut.csv"].map(|f| std::fs::read(dir.path().join(f)).unwrap())
    };
    assert_eq!(read(), read());
}

#[test]
fn parallel_and_sequential_agree() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(cutfrac(&["run", "example4", "--nx", "8", "--csv"], &a).status.success());
    assert!(cutfrac(&["run", "example4", "--nx", "8", "--csv", "--deterministic"], &b).status.success());
    let f = "example4_nx8_solution.csv";
    assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap());
}

#[test]
fn config_file_and_domain_file() {
    let dir = tempfile::tempdir().unwrap();
    let domain = dir.path().join("mine.json");
    std::fs::write(&domain, cutfrac::presets::Preset::Example2.json()).unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, format!(r#"{{"domain": "{}", "nx": 6, "csv": true}}"#, domain.display())).unwrap();
    let o = cutfrac(&["run", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("mine_nx6_solution.csv").exists());
}

#[test]
fn converge_writes_rate_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = cutfrac(&["converge", "example2", "--nx", "4,8,16"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("least-squares slope"));
    let o = cutfrac(&["converge", "example2", "--nx", "4,8,16", "--csv"], dir.path());
    assert!(o.status.success());
    let (h, rows) = cutfrac::post::read_csv(&dir.path().join("example2_convergence.csv")).unwrap();
    assert_eq!(h, ["h", "l2", "energy", "l2_rate", "energy_rate"]);
    assert_eq!(rows.len(), 3);
}

#[test]
fn errors_exit_nonzero_with_message() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["run", "example9"][..],
        &["run", "example1", "--nx", "1"],
        &["run", "example1", "--tau1", "0"],
        &["converge", "example2", "--nx", "4,8"],
        &["converge", "example4", "--nx", "4,8,16"],
        &["run", "missing.json"],
    ] {
        let o = cutfrac(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"), "{args:?}");
    }
}

#[test]
fn check_and_presets() {
    let dir = tempfile::tempdir().unwrap();
    let o = cutfrac(&["check", "example2", "--nx", "8"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).lines().all(|l| l.starts_with("PASS")));
    let o = cutfrac(&["presets"], dir.path());
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 9);
}
