//! Named experiments: a domain, a reaction, coefficients, an initial datum,
//! a horizon and the probes the classifier reads. One scenario is one config
//! file; running it writes a run directory.

pub mod presets;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha1::{Digest, Sha1};
use thiserror::Error;

pub use presets::*;

use crate::analysis::{classify, fit_speed, AnalysisError, ClassifyConfig, SpeedFit, Verdict, VerdictKind};
use crate::geometry::{
    build_interval, build_lattice_domain, build_omega3, build_sawtooth_cylinder, DomainMask, EdgeBc, GeometryError, HoleGeometry,
    Omega3Spec, PeriodSpec, Point, SawtoothProfile, WindowSpec,
};
use crate::reaction::{Nonlinearity, Reaction, ReactionError};
use crate::solver::{
    make_bump, make_front_like, run, write_probes_csv, write_snapshots, Coefficients, Field, Probe, ProbeSet, Scheme, SolverConfig,
    SolverError, Stepper, TimeStep, Trajectory,
};
use crate::stationary::{embed_radial, find_min_r, solve_radial_dirichlet, StationaryError};

pub const VERSION: &str = concat!("invasion ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Reaction(#[from] ReactionError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Stationary(#[from] StationaryError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DomainRecipe {
    Lattice { hole: HoleGeometry, period: Point, resolution: u32, window: WindowSpec },
    Interval { x0: f64, length: f64, resolution: u32, edge: EdgeBc },
    Cylinder { profile: SawtoothProfile, resolution: u32, first_period: i64, periods: usize, #[serde(default)] mirror: bool },
    Omega3 { spec: Omega3Spec, resolution: u32, first_period: i64, periods: usize, #[serde(default)] mirror: bool },
}

impl DomainRecipe {
    pub fn build(&self) -> Result<DomainMask, GeometryError> {
        match self {
            DomainRecipe::Lattice { hole, period, resolution, window } => {
                build_lattice_domain(hole.clone(), PeriodSpec::new(period.to_vec(), *resolution)?, window)
            }
            DomainRecipe::Interval { x0, length, resolution, edge } => build_interval(*x0, *length, *resolution, *edge),
            DomainRecipe::Cylinder { profile, resolution, first_period, periods, mirror } => {
                build_sawtooth_cylinder(*profile, *resolution, *first_period, *periods, None, *mirror)
            }
            DomainRecipe::Omega3 { spec, resolution, first_period, periods, mirror } => {
                build_omega3(*spec, *resolution, *first_period, *periods, *mirror)
            }
        }
    }

    pub fn resolution(&self) -> u32 {
        match self {
            DomainRecipe::Lattice { resolution, .. }
            | DomainRecipe::Interval { resolution, .. }
            | DomainRecipe::Cylinder { resolution, .. }
            | DomainRecipe::Omega3 { resolution, .. } => *resolution,
        }
    }

    fn resolution_mut(&mut self) -> &mut u32 {
        match self {
            DomainRecipe::Lattice { resolution, .. }
            | DomainRecipe::Interval { resolution, .. }
            | DomainRecipe::Cylinder { resolution, .. }
            | DomainRecipe::Omega3 { resolution, .. } => resolution,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CoefficientRecipe {
    Isotropic { d: f64 },
    Diagonal { a11: f64, a22: f64 },
    /// Isotropic diffusion and the radial drift `strength · (x − c)/max(|x − c|, core)`.
    RadialDrift { d: f64, strength: f64, core: f64, center: Point },
}

impl Default for CoefficientRecipe {
    fn default() -> Self {
        CoefficientRecipe::Isotropic { d: 1.0 }
    }
}

impl CoefficientRecipe {
    pub fn build(&self, mask: &DomainMask) -> Result<Coefficients, SolverError> {
        match *self {
            CoefficientRecipe::Isotropic { d } => Coefficients::from_fn(mask, |_| ([d, 0.0, d], [0.0, 0.0])),
            CoefficientRecipe::Diagonal { a11, a22 } => Coefficients::from_fn(mask, |_| ([a11, 0.0, a22], [0.0, 0.0])),
            CoefficientRecipe::RadialDrift { d, strength, core, center } => Coefficients::from_fn(mask, |x| {
                let dx = [x[0] - center[0], x[1] - center[1]];
                let r = dx[0].hypot(dx[1]).max(core);
                ([d, 0.0, d], [strength * dx[0] / r, strength * dx[1] / r])
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InitialRecipe {
    Constant { value: f64 },
    Bump { center: Point, radius: f64, height: f64 },
    /// `height` on the closed rectangle `[lo, hi]` (only `x` is tested in 1D).
    Box { lo: Point, hi: Point, height: f64 },
    /// Bump of height `height` on the smallest ball `B_R` whose Dirichlet
    /// solution (for `min_x f`) exceeds `eta` on `B_inner`.
    MinRadiusBump { center: Point, eta: f64, inner: f64, height: f64 },
    /// The radial Dirichlet solution on `B_radius(center)`, relaxed to a
    /// discrete subsolution, extended by 0.
    RadialSolution { center: Point, radius: f64 },
    FrontLike { direction: Point, shift: f64, width: f64 },
}

impl InitialRecipe {
    /// The datum and, where one was computed, the radius used.
    pub fn build(&self, mask: Arc<DomainMask>, coeff: &Coefficients, f: &Reaction) -> Result<(Field, Option<f64>), ScenarioError> {
        Ok(match *self {
            InitialRecipe::Constant { value } => (Field::constant(mask, value), None),
            InitialRecipe::Bump { center, radius, height } => (make_bump(mask, center, radius, height), None),
            InitialRecipe::Box { lo, hi, height } => {
                let dim = mask.dim();
                let inside = |x: Point| (0..dim).all(|i| x[i] >= lo[i] && x[i] <= hi[i]);
                (Field::from_fn(mask, |x| if inside(x) { height } else { 0.0 }), None)
            }
            InitialRecipe::MinRadiusBump { center, eta, inner, height } => {
                let r = find_min_r(f, eta, inner, 2)?;
                (make_bump(mask, center, r, height), Some(r))
            }
            InitialRecipe::RadialSolution { center, radius } => {
                let u_r = solve_radial_dirichlet(f, radius, mask.dim())?;
                (embed_radial(mask, coeff, f, &u_r, center)?, Some(radius))
            }
            InitialRecipe::FrontLike { direction, shift, width } => (make_front_like(mask, direction, shift, width), None),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedProbe {
    pub name: String,
    #[serde(flatten)]
    pub probe: Probe,
}

fn default_scheme() -> Scheme {
    Scheme::ExplicitEuler
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub domain: DomainRecipe,
    pub reaction: Nonlinearity,
    #[serde(default)]
    pub coefficients: CoefficientRecipe,
    pub initial: InitialRecipe,
    pub horizon: f64,
    pub record_every: f64,
    #[serde(default)]
    pub snapshot_every: Option<f64>,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    /// Fixed time step; the scheme's automatic step when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub probes: Vec<NamedProbe>,
    #[serde(default)]
    pub classify: ClassifyConfig,
    /// Front-position probes whose trailing-half speed is reported.
    #[serde(default)]
    pub speed_probes: Vec<String>,
    #[serde(default)]
    pub expected: Option<VerdictKind>,
    #[serde(default)]
    pub seed: u64,
}

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub verdict: Verdict,
    pub speeds: BTreeMap<String, SpeedFit>,
    pub trajectory: Trajectory,
    pub mask: Arc<DomainMask>,
    pub final_field: Field,
    pub datum_radius: Option<f64>,
    pub wall_time: f64,
    pub cross_terms_dropped: usize,
}

impl ScenarioOutcome {
    pub fn matches_expectation(&self, expected: Option<VerdictKind>) -> bool {
        expected.is_none_or(|k| self.verdict.is(k))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub name: String,
    pub config_hash: String,
    pub version: String,
    pub seed: u64,
    pub resolution: u32,
    pub wall_time: f64,
    pub outputs: Vec<PathBuf>,
    pub verdict: VerdictKind,
    pub persistence: bool,
    pub expected: Option<VerdictKind>,
    pub speeds: BTreeMap<String, f64>,
}

/// Git blob hash (`sha1("blob <len>\0" + content)`).
pub fn content_hash(bytes: &[u8]) -> String {
    let mut h = Sha1::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| ScenarioError::Config(e.to_string()))
    }

    pub fn from_json_str(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(|e| ScenarioError::Config(format!("{e} (line {}, column {})", e.line(), e.column())))
    }

    /// TOML unless the extension is `.json`.
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)?;
        let s = if path.extension().is_some_and(|e| e == "json") { Self::from_json_str(&text)? } else { Self::from_toml_str(&text)? };
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes to TOML")
    }

    pub fn config_hash(&self) -> String {
        content_hash(self.to_toml().as_bytes())
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.horizon > 0.0) {
            return Err(ScenarioError::Config(format!("horizon: must be positive, got {}", self.horizon)));
        }
        if !(self.record_every > 0.0) {
            return Err(ScenarioError::Config(format!("record_every: must be positive, got {}", self.record_every)));
        }
        let names: Vec<&str> = self.probes.iter().map(|p| p.name.as_str()).collect();
        let cfg = &self.classify;
        let wanted = std::iter::once(&cfg.sup_probe)
            .chain(&cfg.compact_probes)
            .chain(&cfg.edge_probes)
            .chain(&cfg.front_right)
            .chain(&cfg.front_left)
            .chain(&cfg.left_region)
            .chain(&self.speed_probes);
        for w in wanted {
            if !names.contains(&w.as_str()) {
                return Err(ScenarioError::Config(format!("classify: probe {w:?} is not declared under probes")));
            }
        }
        Ok(())
    }

    /// Same scenario with the grid resolution multiplied by `mult`.
    pub fn with_resolution_multiplier(mut self, mult: u32) -> Self {
        *self.domain.resolution_mut() *= mult.max(1);
        self
    }

    pub fn run(&self) -> Result<ScenarioOutcome, ScenarioError> {
        self.validate()?;
        let start = Instant::now();
        let mask = Arc::new(self.domain.build()?);
        let f = Reaction::new(self.reaction.clone())?;
        let coeff = self.coefficients.build(&mask)?;
        let (u0, datum_radius) = self.initial.build(mask.clone(), &coeff, &f)?;
        let mut stepper = Stepper::new(mask.clone(), &coeff, &f, self.scheme)?;
        let probes: Vec<(String, Probe)> = self.probes.iter().map(|p| (p.name.clone(), p.probe.clone())).collect();
        let probes = ProbeSet::new(&mask, &probes);
        let cfg = SolverConfig {
            dt: self.dt.map_or(TimeStep::Auto, TimeStep::Fixed),
            t_end: self.horizon,
            scheme: self.scheme,
            record_every: self.record_every,
            snapshot_every: self.snapshot_every,
        };
        let (final_field, trajectory) = run(u0, &mut stepper, &cfg, &probes)?;
        let verdict = classify(&trajectory, &self.classify)?;
        let mut speeds = BTreeMap::new();
        for name in &self.speed_probes {
            let col = trajectory.column(name).ok_or_else(|| AnalysisError::MissingProbe(name.clone()))?;
            if let Ok(fit) = fit_speed(&trajectory.times, &col, crate::analysis::speed::SPEED_WINDOW) {
                speeds.insert(name.clone(), fit);
            }
        }
        Ok(ScenarioOutcome {
            verdict,
            speeds,
            trajectory,
            mask,
            final_field,
            datum_radius,
            wall_time: start.elapsed().as_secs_f64(),
            cross_terms_dropped: stepper.cross_terms_dropped,
        })
    }

    /// Writes `verdict.json`, `probes.csv`, `scenario.toml`, snapshots (if
    /// requested) and `manifest.json` under `dir`.
    pub fn write_run_dir(&self, out: &ScenarioOutcome, dir: &Path) -> Result<RunManifest, ScenarioError> {
        std::fs::create_dir_all(dir)?;
        let mut outputs = Vec::new();
        let verdict_path = dir.join("verdict.json");
        let body = serde_json::json!({
            "verdict": out.verdict,
            "speeds": out.speeds,
            "datum_radius": out.datum_radius,
            "expected": self.expected,
        });
        std::fs::write(&verdict_path, serde_json::to_string_pretty(&body).expect("json"))?;
        outputs.push(verdict_path);
        let probes_path = dir.join("probes.csv");
        write_probes_csv(&out.trajectory, &probes_path)?;
        outputs.push(probes_path);
        let config_path = dir.join("scenario.toml");
        std::fs::write(&config_path, self.to_toml())?;
        outputs.push(config_path);
        if !out.trajectory.snapshots.is_empty() {
            outputs.extend(write_snapshots(&out.mask, &out.trajectory, &dir.join("snapshots"))?);
        }
        let manifest = RunManifest {
            name: self.name.clone(),
            config_hash: self.config_hash(),
            version: VERSION.into(),
            seed: self.seed,
            resolution: self.domain.resolution(),
            wall_time: out.wall_time,
            outputs,
            verdict: out.verdict.kind,
            persistence: out.verdict.persistence,
            expected: self.expected,
            speeds: out.speeds.iter().map(|(k, v)| (k.clone(), v.speed)).collect(),
        };
        std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest).expect("json"))?;
        Ok(manifest)
    }
}

/// Runs independent scenarios across the rayon pool, writing each run
/// directory under `out_root/<name>` when given.
pub fn run_sweep(scenarios: &[Scenario], out_root: Option<&Path>) -> Vec<Result<ScenarioOutcome, ScenarioError>> {
    scenarios
        .par_iter()
        .map(|s| {
            let out = s.run()?;
            if let Some(root) = out_root {
                s.write_run_dir(&out, &root.join(&s.name))?;
            }
            Ok(out)
        })
        .collect()
}

#[cfg(test)]
mod tests;
