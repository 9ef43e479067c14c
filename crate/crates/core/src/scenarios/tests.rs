use super::*;
use crate::solver::probe::Side;

/// 1D interval, cubic reaction, datum filling the left half: invades in a few time units.
fn tiny(horizon: f64) -> Scenario {
    Scenario {
        name: "tiny".into(),
        domain: DomainRecipe::Interval { x0: 0.0, length: 8.0, resolution: 8, edge: EdgeBc::Wall },
        reaction: Nonlinearity::Cubic { theta: 0.25, scale: 8.0 },
        coefficients: CoefficientRecipe::default(),
        initial: InitialRecipe::Box { lo: [0.0, 0.0], hi: [4.0, 0.0], height: 1.0 },
        horizon,
        record_every: horizon / 50.0,
        snapshot_every: Some(horizon / 2.0),
        scheme: Scheme::ExplicitEuler,
        dt: None,
        probes: vec![
            NamedProbe { name: "sup".into(), probe: Probe::GlobalMax },
            NamedProbe { name: "inf".into(), probe: Probe::GlobalMin },
            NamedProbe { name: "front".into(), probe: Probe::FrontPosition { level: 0.5, side: Side::Right } },
        ],
        classify: ClassifyConfig { compact_probes: vec!["inf".into()], ..Default::default() },
        speed_probes: vec!["front".into()],
        expected: Some(VerdictKind::Invasion),
        seed: 3,
    }
}

fn all_presets() -> Vec<Scenario> {
    vec![
        scenario_omega1(&Omega1Params::default()).unwrap(),
        scenario_omega1(&Omega1Params { holes: false, ..Default::default() }).unwrap(),
        scenario_blocking(&NeckParams::default()).unwrap(),
        scenario_blocking(&NeckParams { front_like: true, ..Default::default() }).unwrap(),
        scenario_cylinder(&CylinderParams::default()).unwrap(),
        scenario_cylinder(&CylinderParams { mirror: true, ..Default::default() }).unwrap(),
        scenario_omega3(&Omega3Params::default()).unwrap(),
        scenario_speed_bound(&SpeedBoundParams::default()).unwrap(),
        scenario_persistence(&PersistenceParams::default()).unwrap(),
    ]
}

#[test]
fn presets_round_trip_toml_and_json() {
    for s in all_presets() {
        s.validate().unwrap();
        let back = Scenario::from_toml_str(&s.to_toml()).unwrap();
        assert_eq!(back, s, "{}", s.name);
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(Scenario::from_json_str(&json).unwrap(), s, "{}", s.name);
        assert_eq!(back.config_hash(), s.config_hash());
    }
}

#[test]
fn presets_build_their_domains() {
    for s in all_presets() {
        let m = s.domain.build().unwrap();
        assert!(m.fluid_cells().len() > 100, "{}", s.name);
        assert_eq!(s.clone().with_resolution_multiplier(2).domain.resolution(), 2 * s.domain.resolution());
    }
}

#[test]
fn config_hash_is_git_blob_sha1() {
    // `printf 'hello\n' | git hash-object --stdin`
    assert_eq!(content_hash(b"hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
    let a = tiny(4.0);
    let mut b = tiny(4.0);
    assert_eq!(a.config_hash(), b.config_hash());
    b.seed = 4;
    assert_ne!(a.config_hash(), b.config_hash());
}

#[test]
fn validation_rejects_bad_fields() {
    let mut s = tiny(4.0);
    s.horizon = 0.0;
    assert!(matches!(s.validate(), Err(ScenarioError::Config(m)) if m.starts_with("horizon")));
    let mut s = tiny(4.0);
    s.classify.compact_probes.push("nowhere".into());
    assert!(matches!(s.validate(), Err(ScenarioError::Config(m)) if m.contains("nowhere")));
    let mut s = tiny(4.0);
    s.speed_probes = vec!["missing".into()];
    assert!(s.validate().is_err());
}

#[test]
fn malformed_config_names_the_field() {
    let text = tiny(4.0).to_toml().replace("horizon = 4.0", "horizon = \"long\"");
    let err = Scenario::from_toml_str(&text).unwrap_err().to_string();
    assert!(err.contains("horizon"), "{err}");
    let json = serde_json::to_string(&tiny(4.0)).unwrap().replace("\"theta\":0.25", "\"theta\":\"x\"");
    let err = Scenario::from_json_str(&json).unwrap_err().to_string();
    assert!(err.contains("line 1"), "{err}");
}

#[test]
fn tiny_run_writes_run_directory() {
    let s = tiny(6.0);
    let out = s.run().unwrap();
    assert_eq!(out.verdict.kind, VerdictKind::Invasion);
    assert!(out.matches_expectation(s.expected));
    assert!(!out.matches_expectation(Some(VerdictKind::Blocking)));
    let dir = tempfile::tempdir().unwrap();
    let m = s.write_run_dir(&out, dir.path()).unwrap();
    for f in ["verdict.json", "probes.csv", "scenario.toml", "manifest.json"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    assert!(dir.path().join("snapshots").is_dir());
    assert_eq!(m.config_hash, s.config_hash());
    assert_eq!(m.seed, 3);
    assert_eq!(m.version, VERSION);
    let written = Scenario::load(&dir.path().join("scenario.toml")).unwrap();
    assert_eq!(written, s);
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["verdict"], "Invasion");
}

#[test]
fn sweep_runs_independent_scenarios() {
    let mut b = tiny(6.0);
    b.name = "tiny_b".into();
    b.initial = InitialRecipe::Constant { value: 0.0 };
    b.expected = None;
    let dir = tempfile::tempdir().unwrap();
    let res = run_sweep(&[tiny(6.0), b], Some(dir.path()));
    assert_eq!(res.len(), 2);
    assert_eq!(res[0].as_ref().unwrap().verdict.kind, VerdictKind::Invasion);
    assert_eq!(res[1].as_ref().unwrap().verdict.kind, VerdictKind::Blocking);
    assert!(dir.path().join("tiny_b/manifest.json").is_file());
}

#[test]
fn cubic_front_speed_formula() {
    assert!((cubic_front_speed(0.25, 1.0) - 0.5f64.sqrt() * 0.5).abs() < 1e-15);
    assert!((cubic_front_speed(0.25, 4.0) - 2f64.sqrt() * 0.5).abs() < 1e-15);
}

