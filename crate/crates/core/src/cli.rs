//! Command-line front end. Every command returns a process exit code:
//! 0 on success (or when the verdict matches the expectation), 2 on a verdict
//! mismatch, 1 on any error.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::{build_propdim_profile, verify_propdim, w_star, Beta, VerdictKind};
use crate::geometry::{build_lattice_domain, HoleGeometry, PeriodSpec, Point, WindowSpec};
use crate::reaction::{Nonlinearity, Reaction};
use crate::scenarios::{self, CoefficientRecipe, Scenario, ScenarioError, VERSION};
use crate::solver::Coefficients;
use crate::stationary::{energy_threshold, front_profile_1d, minimize_energy, DescentOptions, FrontOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "invasion", version = env!("CARGO_PKG_VERSION"), about = "Invasion, blocking and oriented invasion experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Default)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Multiplies the grid resolution.
    #[arg(long, default_value_t = 1)]
    pub resolution: u32,
    #[arg(long, value_parser = parse_kind)]
    pub expect: Option<VerdictKind>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario config and write its run directory.
    Run(RunArgs),
    /// Run a scenario and compare its front speeds with the w* lower bound.
    Speed(RunArgs),
    /// Build and check the explicit subsolution profile for a reaction.
    Subsolution {
        /// Reaction as inline JSON (`{"type":"cubic","theta":0.25,"scale":1}`) or a TOML/JSON file.
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long = "big-lambda", default_value_t = 1.0)]
        big_lambda: f64,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimize the truncated energy on a ball (or bracket its threshold radius).
    Energy {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Travelling front of a homogeneous reaction.
    Front {
        #[arg(long)]
        f: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the TOML config of a built-in scenario.
    Preset { name: String },
}

fn parse_kind(s: &str) -> Result<VerdictKind, String> {
    serde_json::from_str(&format!("\"{s}\"")).map_err(|_| {
        format!("unknown verdict kind {s:?} (Blocking, Persistence, Invasion, OrientedInvasion, Inconclusive)")
    })
}

/// Parses argv and dispatches; returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::Speed(a) => cmd_speed(&a),
        Command::Subsolution { f, lambda, big_lambda, beta, samples, out } => {
            cmd_subsolution(&f, lambda, big_lambda, beta, samples, out.as_deref())
        }
        Command::Energy { config, out, seed } => cmd_energy(&config, out.as_deref(), seed),
        Command::Front { f, out } => cmd_front(&f, out.as_deref()),
        Command::Preset { name } => cmd_preset(&name),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn load_scenario(a: &RunArgs) -> Result<Scenario, ScenarioError> {
    let mut s = Scenario::load(&a.config)?.with_resolution_multiplier(a.resolution);
    if let Some(seed) = a.seed {
        s.seed = seed;
    }
    if a.expect.is_some() {
        s.expected = a.expect;
    }
    Ok(s)
}

fn default_out(name: &str) -> PathBuf {
    PathBuf::from("runs").join(name)
}

pub fn cmd_run(a: &RunArgs) -> Result<i32, ScenarioError> {
    let s = load_scenario(a)?;
    let out = s.run()?;
    let dir = a.out.clone().unwrap_or_else(|| default_out(&s.name));
    let manifest = s.write_run_dir(&out, &dir)?;
    let v = &out.verdict;
    println!(
        "{}: {:?}{} sup_tail={:.6} compact_min_tail={:.6} ({:.1}s) -> {}",
        s.name,
        v.kind,
        if v.persistence { " +persistence" } else { "" },
        v.sup_tail,
        v.compact_min_tail,
        manifest.wall_time,
        dir.display()
    );
    for (name, fit) in &out.speeds {
        println!("  speed {name}: {:.6} (R² {:.6})", fit.speed, fit.r2);
    }
    for note in &v.notes {
        println!("  note: {note}");
    }
    if out.matches_expectation(s.expected) {
        Ok(EXIT_OK)
    } else {
        eprintln!("expected {:?}, got {:?}", s.expected.unwrap(), v.kind);
        Ok(EXIT_MISMATCH)
    }
}

/// `limsup q·x/|x|` for the drift recipes; 0 for none.
pub fn radial_drift_limsup(c: &CoefficientRecipe) -> f64 {
    match *c {
        CoefficientRecipe::RadialDrift { strength, .. } => strength,
        _ => 0.0,
    }
}

#[derive(Debug, Serialize)]
pub struct SpeedReport {
    pub w_star: f64,
    pub applicable: bool,
    pub speeds: std::collections::BTreeMap<String, f64>,
    pub ratios: std::collections::BTreeMap<String, f64>,
}

pub fn cmd_speed(a: &RunArgs) -> Result<i32, ScenarioError> {
    let s = load_scenario(a)?;
    let out = s.run()?;
    let dir = a.out.clone().unwrap_or_else(|| default_out(&s.name));
    s.write_run_dir(&out, &dir)?;
    let f = Reaction::new(s.reaction.clone())?;
    let coeff: Coefficients = s.coefficients.build(&out.mask)?;
    let w = w_star(&f, coeff.lambda, coeff.big_lambda, radial_drift_limsup(&s.coefficients));
    let speeds: std::collections::BTreeMap<String, f64> = out.speeds.iter().map(|(k, v)| (k.clone(), v.speed)).collect();
    let ratios = speeds.iter().map(|(k, v)| (k.clone(), v / w.value)).collect();
    let report = SpeedReport { w_star: w.value, applicable: w.applicable, speeds, ratios };
    println!("w* = {:.6}{}", w.value, if w.applicable { "" } else { " (not applicable)" });
    for (k, v) in &report.speeds {
        println!("  {k}: {v:.6} = {:.4} w*", v / w.value);
    }
    std::fs::write(dir.join("speed.json"), serde_json::to_string_pretty(&report).expect("json"))?;
    Ok(if out.matches_expectation(s.expected) { EXIT_OK } else { EXIT_MISMATCH })
}

/// Inline JSON, or a file holding a reaction (TOML unless `.json`).
pub fn parse_reaction(spec: &str) -> Result<Nonlinearity, ScenarioError> {
    let trimmed = spec.trim_start();
    if trimmed.starts_with('{') {
        return serde_json::from_str(spec).map_err(|e| ScenarioError::Config(format!("reaction: {e}")));
    }
    let path = Path::new(spec);
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| ScenarioError::Config(format!("reaction: {e}")))
    } else {
        toml::from_str(&text).map_err(|e| ScenarioError::Config(format!("reaction: {e}")))
    }
}

pub fn cmd_subsolution(
    spec: &str,
    lambda: f64,
    big_lambda: f64,
    beta: Option<f64>,
    samples: usize,
    out: Option<&Path>,
) -> Result<i32, ScenarioError> {
    let f = Reaction::new(parse_reaction(spec)?)?;
    let beta = beta.map_or(Beta::Auto, Beta::Fixed);
    let p = build_propdim_profile(&f, lambda, big_lambda, beta)?;
    let (worst, at) = verify_propdim(&p, &f, lambda, big_lambda, p.drift_bound, samples);
    let r = p.residuals();
    println!("H = {:.6}  K = {:.6}  min f on [K,H] = {:.6}", p.upper, p.knee, p.plateau_min);
    println!("gamma = {:.6e}  z1 = {:.6}  delta = {:.6}  beta = {}  ln mu = {:.6}  L = {:.6}", p.gamma, p.z1, p.delta, p.beta, p.ln_mu, p.z2);
    println!("drift bound = {:.6}", p.drift_bound);
    println!("relations: {r:?}");
    println!("worst residual {worst:.3e} at z = {at:.6}");
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        p.write_csv(&dir.join("profile.csv"), 2000)?;
        let body = serde_json::json!({ "profile": p, "relations": r, "worst_residual": worst, "at": at });
        std::fs::write(dir.join("subsolution.json"), serde_json::to_string_pretty(&body).expect("json"))?;
    }
    Ok(if r.hold(1e-10) && worst >= -1e-8 { EXIT_OK } else { EXIT_MISMATCH })
}

fn default_threshold_tol() -> f64 {
    0.25
}

/// Energy experiment on a ball of a lattice window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyConfig {
    pub reaction: Nonlinearity,
    #[serde(default)]
    pub hole: Option<HoleGeometry>,
    pub period: Point,
    pub resolution: u32,
    pub window: WindowSpec,
    pub center: Point,
    /// Single radius to minimize on.
    #[serde(default)]
    pub radius: Option<f64>,
    /// `[r_small, r_big]` to narrow by bisection.
    #[serde(default)]
    pub bracket: Option<[f64; 2]>,
    #[serde(default = "default_threshold_tol")]
    pub tol: f64,
    #[serde(default)]
    pub random_starts: usize,
    #[serde(default)]
    pub iters: Option<usize>,
}

pub fn cmd_energy(config: &Path, out: Option<&Path>, seed: Option<u64>) -> Result<i32, ScenarioError> {
    let text = std::fs::read_to_string(config)?;
    let cfg: EnergyConfig = if config.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| ScenarioError::Config(e.to_string()))?
    } else {
        toml::from_str(&text).map_err(|e| ScenarioError::Config(e.to_string()))?
    };
    let period = PeriodSpec::new(cfg.period.to_vec(), cfg.resolution)?;
    let mask = Arc::new(build_lattice_domain(cfg.hole.clone().unwrap_or(HoleGeometry::None), period, &cfg.window)?);
    let coeff = Coefficients::isotropic(&mask, 1.0);
    let f = Reaction::new(cfg.reaction.clone())?;
    let opts = DescentOptions {
        random_starts: cfg.random_starts,
        seed: seed.unwrap_or(0),
        iters: cfg.iters.unwrap_or(DescentOptions::default().iters),
        ..Default::default()
    };
    let mut body = serde_json::Map::new();
    body.insert("seed".into(), opts.seed.into());
    if let Some(r) = cfg.radius {
        let rep = minimize_energy(mask.clone(), &coeff, &f, cfg.center, r, &opts)?;
        println!("r = {r}: energy {:.6e}, max {:.6}, collar energy {:.6e}, monotone {}", rep.energy, rep.max_value, rep.collar_energy, rep.monotone);
        body.insert("report".into(), serde_json::to_value(&rep).expect("json"));
    }
    if let Some([a, b]) = cfg.bracket {
        let (lo, hi) = energy_threshold(mask.clone(), &coeff, &f, cfg.center, a, b, cfg.tol, &opts)?;
        println!("threshold radius in ({lo:.4}, {hi:.4}]");
        body.insert("r_small".into(), lo.into());
        body.insert("r_big".into(), hi.into());
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("energy.json"), serde_json::to_string_pretty(&body).expect("json"))?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_front(spec: &str, out: Option<&Path>) -> Result<i32, ScenarioError> {
    let f = Reaction::new(parse_reaction(spec)?)?;
    let front = front_profile_1d(&f, &FrontOptions::default())?;
    println!("speed c = {:.8}", front.c);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        front.write_csv(&dir.join("front.csv"))?;
        std::fs::write(dir.join("front.json"), serde_json::json!({ "c": front.c, "version": VERSION }).to_string())?;
    }
    Ok(EXIT_OK)
}

/// Built-in scenarios by name.
pub fn preset(name: &str) -> Result<Scenario, ScenarioError> {
    use scenarios::*;
    match name {
        "omega1" => scenario_omega1(&Omega1Params::default()),
        "omega1_control" => scenario_omega1(&Omega1Params { holes: false, ..Default::default() }),
        "blocking" => scenario_blocking(&NeckParams::default()),
        "blocking_front" => scenario_blocking(&NeckParams { front_like: true, ..Default::default() }),
        "cylinder" => scenario_cylinder(&CylinderParams::default()),
        "cylinder_mirrored" => scenario_cylinder(&CylinderParams { mirror: true, ..Default::default() }),
        "omega3" => scenario_omega3(&Omega3Params::default()),
        "speed_bound" => scenario_speed_bound(&SpeedBoundParams::default()),
        "persistence" => scenario_persistence(&PersistenceParams::default()),
        other => Err(ScenarioError::Config(format!("unknown preset {other:?}"))),
    }
}

pub const PRESETS: &[&str] =
    &["omega1", "omega1_control", "blocking", "blocking_front", "cylinder", "cylinder_mirrored", "omega3", "speed_bound", "persistence"];

pub fn cmd_preset(name: &str) -> Result<i32, ScenarioError> {
    print!("{}", preset(name)?.to_toml());
    Ok(EXIT_OK)
}
