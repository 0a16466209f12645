use std::path::PathBuf;
use std::process::{Command, Output};

use casimir_neq::config_file::ConfigFile;
use casimir_neq::scan::read_csv;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_casimir-neq"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.toml"))
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn lists_materials() {
    let o = run(&["materials", "list"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("Au") && s.contains("Ti"), "{s}");
}

#[test]
fn point_plasma_has_zero_nonequilibrium_term() {
    let o = run(&["point", "--material", "Au", "--model", "plasma", "--a", "1um", "--d", "20nm"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    let line = s.lines().find(|l| l.starts_with("delta_p_neq@plasma")).unwrap();
    assert!(line.trim_end().ends_with("0.00000000000e0"), "{line}");
}

#[test]
fn point_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("point.csv");
    let o = run(&[
        "point", "--material", "Ti", "--model", "drude", "--a", "0.5um", "--d", "20nm", "--t1", "300", "--t2", "500K",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# casimir-neq"));
    assert!(!text.contains('\r'));
    let t = read_csv(text.as_bytes()).unwrap();
    assert_eq!(t.records.len(), 1);
    assert_eq!(t.records[0].axis_value, 5e-7);
    let p = t.records[0].values[t.column("p_neq@drude").unwrap()];
    let tilde = t.records[0].values[t.column("p_eq_tilde@drude").unwrap()];
    let delta = t.records[0].values[t.column("delta_p_neq@drude").unwrap()];
    assert!(((tilde + delta) - p).abs() <= 1e-11 * p.abs());
}

#[test]
fn scan_from_config_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig4.csv");
    let o = run(&[
        "scan", "--config", fixture("fig4").to_str().unwrap(), "--tol", "1e-5", "--workers", "2",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let meta: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(meta.iter().any(|l| l.contains("rel = 0.00001") || l.contains("rel = 1e-5")), "{meta:?}");
    let t = read_csv(text.as_bytes()).unwrap();
    assert_eq!(t.columns.len(), 4);
    assert_eq!(t.columns[0], "delta_eq_rel@drude/Au/d=1um");
    assert_eq!(t.records.len(), 16);
}

#[test]
fn all_fixtures_resolve() {
    for name in ["fig2a", "fig2b", "fig3a", "fig3b", "fig4", "fig5a", "fig5b", "fig6"] {
        let run = ConfigFile::load(&fixture(name)).unwrap().resolve().unwrap();
        let scan = run.scan.unwrap_or_else(|| panic!("{name} has no scan"));
        assert!(!scan.columns().is_empty(), "{name}");
    }
}

#[test]
fn find_zero_reports_missing_crossing_for_gold() {
    let o = run(&["find-zero", "--material", "Au", "--a", "1um", "--d-lo", "20nm", "--d-hi", "1um", "--tol", "1e-4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no zero crossing"), "{}", stderr(&o));
}

#[test]
fn find_zero_locates_titanium_crossing() {
    let o = run(&[
        "find-zero", "--material", "Ti", "--a", "1um", "--d-lo", "20nm", "--d-hi", "60nm", "--tol-d", "0.5nm", "--tol", "1e-4",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("zero crossing at d ="));
}

#[test]
fn configuration_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[plates]\nthickness = 20\n").unwrap();
    let no_scan = dir.path().join("noscan.toml");
    std::fs::write(&no_scan, "[plates]\nmaterial = \"Au\"\n").unwrap();
    let cases: Vec<Vec<String>> = vec![
        vec!["point".into(), "--model".into(), "lorentz".into()],
        vec!["point".into(), "--a".into(), "1".into()],
        vec!["point".into(), "--material".into(), "Unobtainium".into()],
        vec!["point".into(), "--tol".into(), "0.5".into()],
        vec!["point".into(), "--config".into(), "/nonexistent/run.toml".into()],
        vec!["point".into(), "--config".into(), bad.display().to_string()],
        vec!["scan".into(), "--config".into(), no_scan.display().to_string()],
        vec!["find-zero".into(), "--d-lo".into(), "30nm".into(), "--d-hi".into(), "20nm".into()],
    ];
    for args in cases {
        let o = bin().args(&args).output().unwrap();
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("error:"));
    }
}
