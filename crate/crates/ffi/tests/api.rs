use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use invasion_ffi::*;

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

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = inv_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn tiny() -> *mut InvScenario {
    let mut s = ptr::null_mut();
    let text = c(TINY);
    let st = unsafe { inv_scenario_from_toml(text.as_ptr(), &mut s) };
    assert_eq!(st, InvStatus::Ok, "{}", if st == InvStatus::Ok { String::new() } else { last_error() });
    s
}

#[test]
fn version_is_static_string() {
    let v = unsafe { CStr::from_ptr(inv_version()) }.to_str().unwrap();
    assert!(v.starts_with("invasion "), "{v}");
}

#[test]
fn run_reports_verdict_speed_and_columns() {
    let s = tiny();
    let mut o = ptr::null_mut();
    assert_eq!(unsafe { inv_scenario_run(s, &mut o) }, InvStatus::Ok);
    let (mut kind, mut pers) = (InvVerdictKind::Inconclusive, false);
    assert_eq!(unsafe { inv_outcome_verdict(o, &mut kind, &mut pers) }, InvStatus::Ok);
    assert_eq!(kind, InvVerdictKind::Invasion);

    let (mut speed, mut r2) = (0.0, 0.0);
    let front = c("front");
    assert_eq!(unsafe { inv_outcome_speed(o, front.as_ptr(), &mut speed, &mut r2) }, InvStatus::Ok);
    assert!(speed > 0.0 && speed.is_finite());
    let nope = c("nope");
    assert_eq!(unsafe { inv_outcome_speed(o, nope.as_ptr(), &mut speed, &mut r2) }, InvStatus::NotFound);
    assert!(last_error().contains("nope"));

    let n = unsafe { inv_outcome_len(o) };
    assert!(n > 10);
    let mut written = 0usize;
    assert_eq!(unsafe { inv_outcome_column(o, ptr::null(), ptr::null_mut(), 0, &mut written) }, InvStatus::BufferTooSmall);
    assert_eq!(written, n);
    let mut times = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let sup_name = c("sup");
    assert_eq!(unsafe { inv_outcome_column(o, ptr::null(), times.as_mut_ptr(), n, &mut written) }, InvStatus::Ok);
    assert_eq!(unsafe { inv_outcome_column(o, sup_name.as_ptr(), sup.as_mut_ptr(), n, &mut written) }, InvStatus::Ok);
    assert!(times.windows(2).all(|w| w[1] > w[0]));
    assert!(sup.iter().all(|v| (0.0..=1.0 + 1e-12).contains(v)));

    let dir = tempfile::tempdir().unwrap();
    let d = c(dir.path().to_str().unwrap());
    assert_eq!(unsafe { inv_outcome_write_run_dir(s, o, d.as_ptr()) }, InvStatus::Ok);
    assert!(dir.path().join("manifest.json").is_file());

    unsafe {
        inv_outcome_free(o);
        inv_scenario_free(s);
    }
}

#[test]
fn toml_and_hash_round_trip_through_buffers() {
    let s = tiny();
    let mut needed = 0usize;
    assert_eq!(unsafe { inv_scenario_to_toml(s, ptr::null_mut(), 0, &mut needed) }, InvStatus::BufferTooSmall);
    let mut buf = vec![0 as c_char; needed];
    assert_eq!(unsafe { inv_scenario_to_toml(s, buf.as_mut_ptr(), needed, &mut needed) }, InvStatus::Ok);
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { inv_scenario_from_toml(buf.as_ptr(), &mut again) }, InvStatus::Ok);

    let hash = |h: *const InvScenario| {
        let mut b = [0 as c_char; 41];
        let mut n = 0;
        assert_eq!(unsafe { inv_scenario_config_hash(h, b.as_mut_ptr(), b.len(), &mut n) }, InvStatus::Ok);
        assert_eq!(n, 41);
        unsafe { CStr::from_ptr(b.as_ptr()) }.to_str().unwrap().to_owned()
    };
    assert_eq!(hash(s), hash(again));
    assert_eq!(unsafe { inv_scenario_set_resolution_multiplier(again, 2) }, InvStatus::Ok);
    assert_ne!(hash(s), hash(again));
    assert_eq!(unsafe { inv_scenario_set_resolution_multiplier(again, 0) }, InvStatus::InvalidArgument);
    unsafe {
        inv_scenario_free(again);
        inv_scenario_free(s);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { inv_scenario_from_toml(ptr::null(), &mut s) }, InvStatus::NullPointer);
    let bad = c(&TINY.replace("horizon = 6.0", "horizon = \"long\""));
    assert_eq!(unsafe { inv_scenario_from_toml(bad.as_ptr(), &mut s) }, InvStatus::Config);
    assert!(last_error().contains("horizon"));
    let neg = c(&TINY.replace("horizon = 6.0", "horizon = -1.0"));
    assert_eq!(unsafe { inv_scenario_from_toml(neg.as_ptr(), &mut s) }, InvStatus::Config);
    assert!(s.is_null());
    let name = c("no_such_preset");
    assert_eq!(unsafe { inv_scenario_preset(name.as_ptr(), &mut s) }, InvStatus::NotFound);
    let missing = c("/nonexistent/scenario.toml");
    assert_ne!(unsafe { inv_scenario_load(missing.as_ptr(), &mut s) }, InvStatus::Ok);
    let mut o = ptr::null_mut();
    assert_eq!(unsafe { inv_scenario_run(ptr::null(), &mut o) }, InvStatus::NullPointer);
    unsafe {
        inv_scenario_free(ptr::null_mut());
        inv_outcome_free(ptr::null_mut());
        inv_reaction_free(ptr::null_mut());
    }
}

#[test]
fn presets_load() {
    for name in ["omega1", "blocking", "cylinder", "persistence"] {
        let mut s = ptr::null_mut();
        let n = c(name);
        assert_eq!(unsafe { inv_scenario_preset(n.as_ptr(), &mut s) }, InvStatus::Ok, "{name}");
        unsafe { inv_scenario_free(s) };
    }
}

#[test]
fn reaction_eval_speed_and_bound() {
    let mut r = ptr::null_mut();
    let j = c(r#"{"type":"cubic","theta":0.25,"scale":1.0}"#);
    assert_eq!(unsafe { inv_reaction_from_json(j.as_ptr(), &mut r) }, InvStatus::Ok);
    let mut v = 0.0;
    assert_eq!(unsafe { inv_reaction_eval(r, 0.3, -2.0, 0.5, &mut v) }, InvStatus::Ok);
    assert!((v - 0.5 * 0.5 * 0.25).abs() < 1e-14, "{v}");

    let mut speed = 0.0;
    assert_eq!(unsafe { inv_front_speed(r, &mut speed) }, InvStatus::Ok);
    let exact = 0.5f64.sqrt() * 0.5;
    assert!((speed - exact).abs() < 1e-3 * exact, "{speed}");

    let (mut w, mut ok) = (0.0, false);
    assert_eq!(unsafe { inv_w_star(r, 1.0, 1.0, 0.0, &mut w, &mut ok) }, InvStatus::Ok);
    assert!(w > 0.0 && ok);
    let mut w_in = 0.0;
    assert_eq!(unsafe { inv_w_star(r, 1.0, 1.0, -0.1, &mut w_in, &mut ok) }, InvStatus::Ok);
    assert!((w_in - w - 0.1).abs() < 1e-12);
    assert_eq!(unsafe { inv_w_star(r, 2.0, 1.0, 0.0, &mut w, &mut ok) }, InvStatus::InvalidArgument);
    unsafe { inv_reaction_free(r) };

    let bad = c(r#"{"type":"quartic"}"#);
    assert_eq!(unsafe { inv_reaction_from_json(bad.as_ptr(), &mut r) }, InvStatus::Config);
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/invasion.h")
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(header()).unwrap();
    for f in [
        "inv_version", "inv_last_error_message", "inv_scenario_from_toml", "inv_scenario_load",
        "inv_scenario_preset", "inv_scenario_set_resolution_multiplier", "inv_scenario_to_toml",
        "inv_scenario_config_hash", "inv_scenario_free", "inv_scenario_run", "inv_outcome_write_run_dir",
        "inv_outcome_verdict", "inv_outcome_speed", "inv_outcome_len", "inv_outcome_column",
        "inv_outcome_free", "inv_reaction_from_json", "inv_reaction_eval", "inv_w_star",
        "inv_front_speed", "inv_reaction_free",
    ] {
        assert!(h.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(h.contains("typedef struct InvScenario InvScenario;"));
    assert!(h.contains("INV_STATUS_BUFFER_TOO_SMALL = 12"));
}

/// Compiles and links a C client against the header and static library when a
/// C compiler is on PATH.
#[test]
fn c_client_links_against_static_library() {
    let Ok(exe) = std::env::current_exe() else { return };
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libinvasion_ffi.a");
    if Command::new("cc").arg("--version").output().is_err() || !lib.is_file() {
        eprintln!("skipping: no cc or {} missing", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include <math.h>
#include "invasion.h"
int main(void) {
    InvReaction *r = NULL;
    if (inv_reaction_from_json("{\"type\":\"cubic\",\"theta\":0.25,\"scale\":1.0}", &r) != INV_STATUS_OK) return 1;
    double w = 0.0; bool ok = false;
    if (inv_w_star(r, 1.0, 1.0, 0.0, &w, &ok) != INV_STATUS_OK || !ok) return 2;
    inv_reaction_free(r);
    InvScenario *s = NULL;
    if (inv_scenario_preset("nowhere", &s) != INV_STATUS_NOT_FOUND) return 3;
    if (inv_last_error_message() == NULL) return 4;
    printf("%s %.6f\n", inv_version(), w);
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("client");
    let out = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "cc failed: {}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "client exit {:?}", run.status);
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("invasion "));
}
