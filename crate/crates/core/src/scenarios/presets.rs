//! The constructions of the theory as ready-made scenarios.
//!
//! Lengths are kept small by steepening the reaction (`scale`), which shrinks
//! every intrinsic length by `1/√scale`; the defaults run in seconds to
//! minutes on one core.

use super::{CoefficientRecipe, DomainRecipe, InitialRecipe, NamedProbe, Scenario, ScenarioError};
use crate::analysis::{ClassifyConfig, VerdictKind};
use crate::geometry::shapes::polygon_diameter;
use crate::geometry::{EdgeBc, HoleGeometry, Omega3Spec, Point, SawtoothProfile, WindowSpec};
use crate::reaction::{Nonlinearity, Reaction};
use crate::solver::probe::Side;
use crate::solver::Probe;
use crate::stationary::find_min_r;

fn probe(name: &str, probe: Probe) -> NamedProbe {
    NamedProbe { name: name.into(), probe }
}

fn window_max(name: &str, lo: Point, hi: Point) -> NamedProbe {
    probe(name, Probe::WindowMax { lo, hi })
}

fn window_min(name: &str, lo: Point, hi: Point) -> NamedProbe {
    probe(name, Probe::WindowMin { lo, hi })
}

fn front(name: &str, side: Side) -> NamedProbe {
    probe(name, Probe::FrontPosition { level: 0.5, side })
}

fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Star-hole lattice with a bump between two holes.
#[derive(Debug, Clone, PartialEq)]
pub struct Omega1Params {
    pub theta: f64,
    pub scale: f64,
    /// Star tips (even, so the cell is symmetric about both axes).
    pub points: usize,
    pub outer: f64,
    pub inner: f64,
    pub eta: f64,
    pub inner_radius: f64,
    pub resolution: u32,
    /// Window size in periods.
    pub periods: usize,
    /// Horizon in units of the time the 1D front needs to cross one period.
    pub crossings: f64,
    /// Remove the holes (control run).
    pub holes: bool,
}

impl Default for Omega1Params {
    fn default() -> Self {
        Self {
            theta: 0.25,
            scale: 4.0,
            points: 4,
            outer: 1.0,
            inner: 0.4,
            eta: 0.6,
            inner_radius: 0.5,
            resolution: 8,
            periods: 2,
            crossings: 2.5,
            holes: true,
        }
    }
}

/// Planar front speed of `scale · s(1−s)(s−θ)`.
pub fn cubic_front_speed(theta: f64, scale: f64) -> f64 {
    (scale / 2.0).sqrt() * (1.0 - 2.0 * theta)
}

/// Star holes centred in `L×L` cells with `L = 2·diam + 2R + 1` rounded up to
/// an integer, and a bump on `B_R(z)`, `z = (L/2, 0)` midway between two holes.
/// The cell is symmetric about both axes through `z`, so only the quadrant
/// `x ≥ L/2, y ≥ 0` is simulated, with walls on the symmetry lines.
pub fn scenario_omega1(p: &Omega1Params) -> Result<Scenario, ScenarioError> {
    let nl = Nonlinearity::Cubic { theta: p.theta, scale: p.scale };
    let f = Reaction::new(nl.clone())?;
    let big_r = find_min_r(&f, p.eta, p.inner_radius, 2)?;
    let star = HoleGeometry::star([0.0, 0.0], p.outer, p.inner, p.points);
    let HoleGeometry::StarHole { vertices, .. } = &star else { unreachable!() };
    let diam = polygon_diameter(vertices);
    let l = (2.0 * diam + 2.0 * big_r + 1.0).ceil();
    let hole = if p.holes { HoleGeometry::star([0.5 * l, 0.5 * l], p.outer, p.inner, p.points) } else { HoleGeometry::None };
    let z = [0.5 * l, 0.0];
    let n = p.periods as f64;
    let window = WindowSpec { origin: z, size: [n * l, n * l], edges: [EdgeBc::Wall, EdgeBc::Wall] };
    let c = cubic_front_speed(p.theta, p.scale);
    let horizon = p.crossings * n * l / c;
    Ok(Scenario {
        name: if p.holes { "omega1".into() } else { "omega1_control".into() },
        domain: DomainRecipe::Lattice { hole, period: [l, l], resolution: p.resolution, window },
        reaction: nl,
        coefficients: CoefficientRecipe::default(),
        initial: InitialRecipe::MinRadiusBump { center: z, eta: p.eta, inner: p.inner_radius, height: 1.0 },
        horizon,
        record_every: horizon / 200.0,
        snapshot_every: Some(horizon / 10.0),
        scheme: crate::solver::Scheme::ExplicitEuler,
        dt: None,
        probes: vec![
            probe("sup", Probe::GlobalMax),
            window_min("near", z, [z[0] + l, z[1] + l]),
            probe("inf", Probe::GlobalMin),
            front("front", Side::Right),
        ],
        classify: ClassifyConfig { compact_probes: names(&["near", "inf"]), ..Default::default() },
        speed_probes: names(&["front"]),
        expected: Some(VerdictKind::Invasion),
        seed: 0,
    })
}

/// Lattice of square chambers joined by gaps of width `aperture`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeckParams {
    pub aperture: f64,
    pub thickness: f64,
    pub period: f64,
    pub theta: f64,
    pub scale: f64,
    pub resolution: u32,
    pub periods: usize,
    pub horizon: f64,
    pub delta_blk: f64,
    /// Start from a front-like datum filling the chambers with `x < 0` instead of one chamber.
    pub front_like: bool,
}

impl Default for NeckParams {
    fn default() -> Self {
        Self {
            aperture: 0.5,
            thickness: 0.5,
            period: 6.0,
            theta: 0.25,
            scale: 4.0,
            resolution: 8,
            periods: 4,
            horizon: 120.0,
            delta_blk: 2e-3,
            front_like: false,
        }
    }
}

/// One chamber (centred at the origin) filled with 1; by symmetry only the
/// quadrant `x, y ≥ 0` is simulated. The persistence compact is the datum
/// chamber, the edge probes cover the two outermost chamber rows. With
/// `front_like`, every chamber with `x < L/2` starts at 1 and the compact is
/// the chamber at `2L`; the top edge probe then starts at `x = L`.
pub fn scenario_blocking(p: &NeckParams) -> Result<Scenario, ScenarioError> {
    let l = p.period;
    let n = p.periods as f64;
    let half = 0.5 * (l - p.thickness);
    let hole = HoleGeometry::NarrowNeck { thickness: p.thickness, aperture: p.aperture };
    let (origin, size, initial, compact) = if p.front_like {
        (
            [-n * l, 0.0],
            [2.0 * n * l, n * l],
            InitialRecipe::FrontLike { direction: [1.0, 0.0], shift: 0.5 * l, width: 0.0 },
            window_min("chamber", [2.0 * l - half, 0.0], [2.0 * l + half, half]),
        )
    } else {
        (
            [0.0, 0.0],
            [n * l, n * l],
            InitialRecipe::Box { lo: [-half, -half], hi: [half, half], height: 1.0 },
            window_min("chamber", [0.0, 0.0], [half, half]),
        )
    };
    let far = origin[0] + size[0];
    Ok(Scenario {
        name: format!("blocking{}_a{}", if p.front_like { "_front" } else { "" }, p.aperture),
        domain: DomainRecipe::Lattice {
            hole,
            period: [l, l],
            resolution: p.resolution,
            window: WindowSpec { origin, size, edges: [EdgeBc::Wall, EdgeBc::Wall] },
        },
        reaction: Nonlinearity::Cubic { theta: p.theta, scale: p.scale },
        coefficients: CoefficientRecipe::default(),
        initial,
        horizon: p.horizon,
        record_every: p.horizon / 200.0,
        snapshot_every: Some(p.horizon / 10.0),
        scheme: crate::solver::Scheme::ExplicitEuler,
        dt: None,
        probes: vec![
            probe("sup", Probe::GlobalMax),
            compact,
            window_max("edge_x", [far - 2.0 * l, 0.0], [far, n * l]),
            window_max("edge_y", [if p.front_like { l } else { 0.0 }, (n - 2.0) * l], [far, n * l]),
            front("front", Side::Right),
        ],
        classify: ClassifyConfig {
            delta_blk: p.delta_blk,
            compact_probes: names(&["chamber"]),
            edge_probes: names(&["edge_x", "edge_y"]),
            ..Default::default()
        },
        speed_probes: names(&["front"]),
        expected: None,
        seed: 0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CylinderParams {
    pub profile: SawtoothProfile,
    pub theta: f64,
    pub scale: f64,
    pub resolution: u32,
    /// Periods left of the datum's period.
    pub left_periods: usize,
    pub right_periods: usize,
    pub bump_radius: f64,
    pub horizon: f64,
    /// Shift of the datum by whole periods.
    pub shift_periods: i64,
    pub mirror: bool,
}

impl Default for CylinderParams {
    fn default() -> Self {
        Self {
            profile: SawtoothProfile { period: 12.0, neck: 0.25, drop: 0.5 },
            theta: 0.25,
            scale: 4.0,
            resolution: 8,
            left_periods: 2,
            right_periods: 5,
            bump_radius: 2.0,
            horizon: 100.0,
            shift_periods: 0,
            mirror: false,
        }
    }
}

/// Sawtooth cylinder with a bump at `x₁ = L/2`; expects invasion to the
/// right and blocking to the left (reversed when `mirror`).
pub fn scenario_cylinder(p: &CylinderParams) -> Result<Scenario, ScenarioError> {
    let l = p.profile.period;
    let sgn = if p.mirror { -1.0 } else { 1.0 };
    let shift = p.shift_periods as f64 * l;
    let cx = sgn * (0.5 * l + shift);
    let first = -(p.left_periods as i64) + p.shift_periods;
    let periods = p.left_periods + 1 + p.right_periods;
    let x_lo = if p.mirror { -((first + periods as i64) as f64) * l } else { first as f64 * l };
    let x_hi = x_lo + periods as f64 * l;
    let top = SawtoothProfile::HALF_HEIGHT;
    let (behind, side) = if p.mirror {
        (window_max("behind", [sgn * shift + l, -top], [x_hi, top]), Side::Left)
    } else {
        (window_max("behind", [x_lo, -top], [shift - l, top]), Side::Right)
    };
    Ok(Scenario {
        name: if p.mirror { "cylinder_mirrored".into() } else { "cylinder".into() },
        domain: DomainRecipe::Cylinder { profile: p.profile, resolution: p.resolution, first_period: first, periods, mirror: p.mirror },
        reaction: Nonlinearity::Cubic { theta: p.theta, scale: p.scale },
        coefficients: CoefficientRecipe::default(),
        initial: InitialRecipe::Bump { center: [cx, 0.0], radius: p.bump_radius, height: 1.0 },
        horizon: p.horizon,
        record_every: p.horizon / 200.0,
        snapshot_every: Some(p.horizon / 10.0),
        scheme: crate::solver::Scheme::ExplicitEuler,
        dt: None,
        probes: vec![probe("sup", Probe::GlobalMax), front("ahead", side), behind],
        classify: leading_front(p.mirror),
        speed_probes: names(&["ahead"]),
        expected: Some(VerdictKind::OrientedInvasion),
        seed: 0,
    })
}

fn leading_front(mirror: bool) -> ClassifyConfig {
    let ahead = Some("ahead".to_string());
    let (front_right, front_left) = if mirror { (None, ahead) } else { (ahead, None) };
    ClassifyConfig { front_right, front_left, left_region: Some("behind".into()), ..Default::default() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Omega3Params {
    pub spec: Omega3Spec,
    pub theta: f64,
    pub scale: f64,
    pub resolution: u32,
    pub left_periods: usize,
    pub right_periods: usize,
    /// Distance of the bump centre from the passage entrance.
    pub bump_center: f64,
    pub bump_radius: f64,
    pub horizon: f64,
    pub shift_periods: i64,
}

impl Default for Omega3Params {
    fn default() -> Self {
        Self {
            spec: Omega3Spec::new(3f64.sqrt() / 4.0, 4.5, 1.125),
            theta: 0.25,
            scale: 4.0,
            resolution: 8,
            left_periods: 1,
            right_periods: 3,
            bump_center: 3.2,
            bump_radius: 2.1,
            horizon: 150.0,
            shift_periods: 0,
        }
    }
}

/// Ω₃ with a bump inside the narrow passage, `bump_center` to the right of its entrance.
pub fn scenario_omega3(p: &Omega3Params) -> Result<Scenario, ScenarioError> {
    let l1 = p.spec.l1();
    let l2 = p.spec.l2();
    let shift = p.shift_periods as f64 * l1;
    let first = -(p.left_periods as i64) + p.shift_periods;
    let periods = p.left_periods + 1 + p.right_periods;
    let x_lo = first as f64 * l1;
    Ok(Scenario {
        name: "omega3".into(),
        domain: DomainRecipe::Omega3 { spec: p.spec, resolution: p.resolution, first_period: first, periods, mirror: false },
        reaction: Nonlinearity::Cubic { theta: p.theta, scale: p.scale },
        coefficients: CoefficientRecipe::default(),
        initial: InitialRecipe::Bump { center: [shift + p.bump_center, 0.0], radius: p.bump_radius, height: 1.0 },
        horizon: p.horizon,
        record_every: p.horizon / 200.0,
        snapshot_every: Some(p.horizon / 10.0),
        scheme: crate::solver::Scheme::ExplicitEuler,
        dt: None,
        probes: vec![
            probe("sup", Probe::GlobalMax),
            front("ahead", Side::Right),
            window_max("behind", [x_lo, -0.5 * l2], [shift - 0.5 * l1, 0.5 * l2]),
        ],
        classify: leading_front(false),
        speed_probes: names(&["ahead"]),
        expected: Some(VerdictKind::OrientedInvasion),
        seed: 0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedBoundParams {
    pub reaction: Nonlinearity,
    pub d: f64,
    /// Radial drift `strength · x/|x|` outside a core of radius `core`.
    pub drift: f64,
    pub core: f64,
    /// Cells per side.
    pub cells: u32,
    pub h: f64,
    pub bump_radius: f64,
    pub horizon: f64,
}

impl Default for SpeedBoundParams {
    fn default() -> Self {
        Self {
            reaction: Nonlinearity::Trapezoid { a: 0.25, b: 0.3, c: 0.9, height: 0.1 },
            d: 1.0,
            drift: 0.0,
            core: 1.0,
            cells: 256,
            h: 0.125,
            bump_radius: 4.0,
            horizon: 16.0,
        }
    }
}

/// Free space, bump at the origin; the spreading speed is the slowest of
/// eight rays.
pub fn scenario_speed_bound(p: &SpeedBoundParams) -> Result<Scenario, ScenarioError> {
    let res = (1.0 / p.h).round() as u32;
    let side = p.cells as f64 * p.h;
    let window = WindowSpec { origin: [-0.5 * side, -0.5 * side], size: [side, side], edges: [EdgeBc::Wall, EdgeBc::Wall] };
    let coefficients = if p.drift == 0.0 {
        CoefficientRecipe::Isotropic { d: p.d }
    } else {
        CoefficientRecipe::RadialDrift { d: p.d, strength: p.drift, core: p.core, center: [0.0, 0.0] }
    };
    Ok(Scenario {
        name: "speed_bound".into(),
        domain: DomainRecipe::Lattice { hole: HoleGeometry::None, period: [1.0, 1.0], resolution: res, window },
        reaction: p.reaction.clone(),
        coefficients,
        initial: InitialRecipe::Bump { center: [0.0, 0.0], radius: p.bump_radius, height: 1.0 },
        horizon: p.horizon,
        record_every: p.horizon / 200.0,
        snapshot_every: Some(p.horizon / 10.0),
        scheme: crate::solver::Scheme::ExplicitEuler,
        dt: None,
        probes: vec![
            probe("sup", Probe::GlobalMax),
            window_min("core", [-2.0, -2.0], [2.0, 2.0]),
            probe("radius", Probe::RayFront { center: [0.0, 0.0], level: 0.5, directions: 8 }),
        ],
        classify: ClassifyConfig { compact_probes: names(&["core"]), ..Default::default() },
        speed_probes: names(&["radius"]),
        expected: Some(VerdictKind::Invasion),
        seed: 0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceParams {
    pub reaction: Nonlinearity,
    pub hole_size: f64,
    pub resolution: u32,
    /// Half-width of the window in periods.
    pub half_periods: usize,
    pub eta: f64,
    pub inner_radius: f64,
    pub horizon: f64,
}

impl Default for PersistenceParams {
    fn default() -> Self {
        Self {
            reaction: Nonlinearity::PeriodicCubic { theta_min: 0.2, theta_max: 0.35, period: [1.0, 1.0], scale: 16.0 },
            hole_size: 0.5,
            resolution: 8,
            half_periods: 8,
            eta: 0.5,
            inner_radius: 0.5,
            horizon: 30.0,
        }
    }
}

/// Perforated unit lattice, bump at a lattice point (between holes).
pub fn scenario_persistence(p: &PersistenceParams) -> Result<Scenario, ScenarioError> {
    let n = p.half_periods as f64;
    let window = WindowSpec { origin: [-n, -n], size: [2.0 * n, 2.0 * n], edges: [EdgeBc::Wall, EdgeBc::Wall] };
    Ok(Scenario {
        name: "persistence".into(),
        domain: DomainRecipe::Lattice {
            hole: HoleGeometry::RectHole { center: [0.5, 0.5], size: [p.hole_size, p.hole_size] },
            period: [1.0, 1.0],
            resolution: p.resolution,
            window,
        },
        reaction: p.reaction.clone(),
        coefficients: CoefficientRecipe::default(),
        initial: InitialRecipe::MinRadiusBump { center: [0.0, 0.0], eta: p.eta, inner: p.inner_radius, height: 1.0 },
        horizon: p.horizon,
        record_every: p.horizon / 200.0,
        snapshot_every: Some(p.horizon / 10.0),
        scheme: crate::solver::Scheme::ExplicitEuler,
        dt: None,
        probes: vec![probe("sup", Probe::GlobalMax), window_min("core", [-1.0, -1.0], [1.0, 1.0])],
        classify: ClassifyConfig { compact_probes: names(&["core"]), ..Default::default() },
        speed_probes: Vec::new(),
        expected: Some(VerdictKind::Persistence),
        seed: 0,
    })
}
