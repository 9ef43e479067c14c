use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_invasion");

fn invasion(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn invasion")
}

const TINY: &str = r#"
name = "tiny"
horizon = 6.0
record_every = 0.12
scheme = "explicit_euler"
speed_probes = ["front"]
expected = "Invasion"
seed = 3

[domain]
type = "interval"
x0 = 0.0
length = 8.0
resolution = 8
edge = "wall"

[reaction]
type = "cubic"
theta = 0.25
scale = 8.0

[coefficients]
type = "isotropic"
d = 1.0

[initial]
type = "box"
lo = [0.0, 0.0]
hi = [4.0, 0.0]
height = 1.0

[[probes]]
name = "sup"
type = "global_max"

[[probes]]
name = "inf"
type = "global_min"

[[probes]]
name = "front"
type = "front_position"
level = 0.5
side = "right"

[classify]
compact_probes = ["inf"]
"#;

fn write_tiny(dir: &Path, text: &str) -> String {
    let p = dir.join("tiny.toml");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn run_exit_codes_follow_expectation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_tiny(dir.path(), TINY);
    let out_dir = dir.path().join("run");
    let out = out_dir.to_str().unwrap();

    let ok = invasion(&["run", "--config", &cfg, "--out", out]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("Invasion"));
    for f in ["verdict.json", "probes.csv", "scenario.toml", "manifest.json"] {
        assert!(out_dir.join(f).is_file(), "{f}");
    }

    let mismatch = invasion(&["run", "--config", &cfg, "--out", out, "--expect", "Blocking"]);
    assert_eq!(mismatch.status.code(), Some(2));
}

#[test]
fn malformed_config_exits_one_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_tiny(dir.path(), &TINY.replace("horizon = 6.0", "horizon = \"long\""));
    let out = invasion(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("horizon"));

    let missing = invasion(&["run", "--config", "/nonexistent/x.toml"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn preset_prints_loadable_toml() {
    let out = invasion(&["preset", "cylinder"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let s = invasion_core::scenarios::Scenario::from_toml_str(&text).unwrap();
    assert_eq!(s.name, "cylinder");
    assert_eq!(invasion(&["preset", "nowhere"]).status.code(), Some(1));
}

#[test]
fn subsolution_certifies_combustion_reaction() {
    let dir = tempfile::tempdir().unwrap();
    let out = invasion(&[
        "subsolution",
        "--f",
        r#"{"type":"combustion","ignition":0.2,"scale":1.0}"#,
        "--samples",
        "2000",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(dir.path().join("profile.csv").is_file());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("subsolution.json")).unwrap()).unwrap();
    assert!(report.is_object());
}

#[test]
fn front_reports_cubic_speed() {
    let out = invasion(&["front", "--f", r#"{"type":"cubic","theta":0.25,"scale":1.0}"#]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let c: f64 = text
        .split_whitespace()
        .filter_map(|w| w.trim_end_matches(',').parse().ok())
        .next()
        .unwrap_or_else(|| panic!("no number in {text:?}"));
    let exact = 0.5f64.sqrt() * 0.5;
    assert!((c - exact).abs() < 1e-3 * exact, "{c}");
}

#[test]
fn shipped_configs_match_presets() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in invasion_core::cli::PRESETS {
        let file = std::fs::read_to_string(dir.join(format!("{name}.toml"))).unwrap_or_else(|e| panic!("{name}: {e}"));
        let printed = String::from_utf8(invasion(&["preset", name]).stdout).unwrap();
        assert_eq!(file, printed, "configs/{name}.toml is stale");
    }
}
