//! Periodic perforated domains discretized as masked Cartesian grids.

pub mod conditions;
pub mod shapes;

use std::collections::VecDeque;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use conditions::{check_exterior_ball, check_sliding_condition, slidable_set, SlidableSet};
pub use shapes::{BoundarySample, HoleGeometry, Omega3Spec, Point, SawtoothProfile};

/// Minimum number of cells across the narrowest geometric feature.
pub const MIN_FEATURE_CELLS: f64 = 4.0;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("feature of width {width} spans only {cells:.2} cells (need at least 4)")]
    FeatureUnresolved { width: f64, cells: f64 },
    #[error("fluid region splits into {components} edge-connected components")]
    DisconnectedDomain { components: usize },
    #[error("slidable set splits into {components} components")]
    NotConnected { components: usize },
    #[error("profile violates its shape constraints: {0}")]
    ProfileViolation(String),
    #[error("invalid geometry: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Boundary treatment at the two ends of a window axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeBc {
    Periodic,
    /// Zero-flux truncation of the window.
    Wall,
}

/// Period lengths along the periodic axes (x first) and the grid resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodSpec {
    pub lengths: Vec<f64>,
    /// Cells per unit length.
    pub resolution: u32,
}

impl PeriodSpec {
    pub fn new(lengths: Vec<f64>, resolution: u32) -> Result<Self, GeometryError> {
        if lengths.is_empty() || lengths.len() > 2 {
            return Err(GeometryError::Invalid("one or two period lengths expected".into()));
        }
        if lengths.iter().any(|l| !(*l > 0.0) || !l.is_finite()) {
            return Err(GeometryError::Invalid(format!("period lengths must be positive: {lengths:?}")));
        }
        if resolution < 8 {
            return Err(GeometryError::Invalid(format!("resolution {resolution} < 8")));
        }
        let spec = Self { lengths, resolution };
        for axis in 0..spec.lengths.len() {
            spec.period_cells(axis)?;
        }
        Ok(spec)
    }

    pub fn h(&self) -> f64 {
        1.0 / self.resolution as f64
    }

    /// Period length of an axis, infinite for a non-periodic one.
    pub fn length(&self, axis: usize) -> f64 {
        self.lengths.get(axis).copied().unwrap_or(f64::INFINITY)
    }

    /// Number of cells in one period; the period must be a whole number of cells.
    pub fn period_cells(&self, axis: usize) -> Result<usize, GeometryError> {
        let l = self.length(axis);
        let n = l * self.resolution as f64;
        if !l.is_finite() {
            return Err(GeometryError::Invalid(format!("axis {axis} is not periodic")));
        }
        if (n - n.round()).abs() > 1e-9 * n.max(1.0) {
            return Err(GeometryError::Invalid(format!(
                "period {l} is not a whole number of cells at resolution {}",
                self.resolution
            )));
        }
        Ok(n.round() as usize)
    }
}

/// Rectangular window in world units, aligned to the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub origin: [f64; 2],
    pub size: [f64; 2],
    pub edges: [EdgeBc; 2],
}

impl WindowSpec {
    /// Window spanning `count[i]` periods from `first[i]·L_i`.
    pub fn periods(period: &PeriodSpec, first: [i64; 2], count: [usize; 2], edges: [EdgeBc; 2]) -> Self {
        let l = [period.length(0), period.length(1)];
        Self {
            origin: [first[0] as f64 * l[0], first[1] as f64 * l[1]],
            size: [count[0] as f64 * l[0], count[1] as f64 * l[1]],
            edges,
        }
    }
}

/// Geometry of the whole (infinite) domain: one cell's obstacle, its
/// periods and an optional reflection `x₁ ↦ -x₁`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shape {
    pub hole: HoleGeometry,
    pub period: [f64; 2],
    #[serde(default)]
    pub mirror: bool,
}

impl Shape {
    pub fn is_fluid(&self, p: Point) -> bool {
        let q = if self.mirror { [-p[0], p[1]] } else { p };
        self.hole.is_fluid(q, self.period)
    }

    /// Boundary samples of all period translates meeting the closed ball `B̄_radius(center)`.
    pub fn boundary_samples_near(&self, center: Point, radius: f64, spacing: f64) -> Vec<BoundarySample> {
        let base = self.hole.boundary_samples(spacing, self.period);
        if base.is_empty() {
            return base;
        }
        let c = if self.mirror { [-center[0], center[1]] } else { center };
        let range = |axis: usize| -> (i64, i64) {
            let l = self.period[axis];
            if !l.is_finite() {
                (0, 0)
            } else {
                (((c[axis] - radius) / l).floor() as i64 - 1, ((c[axis] + radius) / l).floor() as i64 + 1)
            }
        };
        let (ax, bx) = range(0);
        let (ay, by) = range(1);
        let mut out = Vec::new();
        for a in ax..=bx {
            for b in ay..=by {
                let shift = [
                    if self.period[0].is_finite() { a as f64 * self.period[0] } else { 0.0 },
                    if self.period[1].is_finite() { b as f64 * self.period[1] } else { 0.0 },
                ];
                for s in &base {
                    let p = [s.point[0] + shift[0], s.point[1] + shift[1]];
                    if (p[0] - c[0]).hypot(p[1] - c[1]) <= radius {
                        out.push(if self.mirror {
                            BoundarySample { point: [-p[0], p[1]], normal: [-s.normal[0], s.normal[1]] }
                        } else {
                            BoundarySample { point: p, normal: s.normal }
                        });
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Face {
    XMinus,
    XPlus,
    YMinus,
    YPlus,
}

impl Face {
    pub const ALL: [Face; 4] = [Face::XMinus, Face::XPlus, Face::YMinus, Face::YPlus];

    pub fn normal(self) -> Point {
        match self {
            Face::XMinus => [-1.0, 0.0],
            Face::XPlus => [1.0, 0.0],
            Face::YMinus => [0.0, -1.0],
            Face::YPlus => [0.0, 1.0],
        }
    }

    pub fn axis(self) -> usize {
        match self {
            Face::XMinus | Face::XPlus => 0,
            Face::YMinus | Face::YPlus => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaceKind {
    /// Interface between a fluid cell and an obstacle cell.
    Obstacle,
    /// Window edge crossed by the periodic wrap (not a zero-flux face).
    WindowPeriodic,
    /// Window edge closed by a zero-flux truncation.
    WindowWall,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFace {
    /// Grid index of the fluid cell.
    pub cell: usize,
    pub face: Face,
    /// Unit normal pointing out of the fluid cell.
    pub normal: Point,
    pub kind: FaceKind,
}

/// Uniform grid over the window. Cell `(i, j)` has center
/// `((origin[0] + i + 1/2) h, (origin[1] + j + 1/2) h)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub resolution: u32,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    /// Window origin in cells.
    pub origin: [i64; 2],
    pub edges: [EdgeBc; 2],
    /// Spatial dimension (1 for a single row of cells with no y-coupling).
    pub dim: usize,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn ij(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    pub fn center(&self, idx: usize) -> Point {
        let (i, j) = self.ij(idx);
        [
            (self.origin[0] + i as i64) as f64 * self.h + 0.5 * self.h,
            (self.origin[1] + j as i64) as f64 * self.h + 0.5 * self.h,
        ]
    }

    /// Neighbour across a face, following the periodic wrap. The flag is
    /// true when the wrap was used.
    pub fn neighbor(&self, idx: usize, face: Face) -> Option<(usize, bool)> {
        let (i, j) = self.ij(idx);
        let (n, k, delta) = match face {
            Face::XMinus => (self.nx, i, -1i64),
            Face::XPlus => (self.nx, i, 1),
            Face::YMinus => (self.ny, j, -1),
            Face::YPlus => (self.ny, j, 1),
        };
        let axis = face.axis();
        if axis == 1 && self.dim == 1 {
            return None;
        }
        let m = k as i64 + delta;
        let (m, wrapped) = if m < 0 || m >= n as i64 {
            match self.edges[axis] {
                EdgeBc::Wall => return None,
                EdgeBc::Periodic => (m.rem_euclid(n as i64), true),
            }
        } else {
            (m, false)
        };
        let m = m as usize;
        Some((if axis == 0 { self.index(m, j) } else { self.index(i, m) }, wrapped))
    }

    /// Cell containing a world point, if it lies in the window.
    pub fn locate(&self, p: Point) -> Option<usize> {
        let i = (p[0] / self.h).floor() as i64 - self.origin[0];
        let j = if self.dim == 1 { 0 } else { (p[1] / self.h).floor() as i64 - self.origin[1] };
        if i < 0 || j < 0 || i >= self.nx as i64 || j >= self.ny as i64 {
            None
        } else {
            Some(self.index(i as usize, j as usize))
        }
    }

    pub fn lower(&self) -> Point {
        [self.origin[0] as f64 * self.h, self.origin[1] as f64 * self.h]
    }

    pub fn upper(&self) -> Point {
        [
            (self.origin[0] + self.nx as i64) as f64 * self.h,
            (self.origin[1] + self.ny as i64) as f64 * self.h,
        ]
    }
}

const SOLID: u32 = u32::MAX;

/// A periodic perforated domain restricted to a finite window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainMask {
    pub grid: Grid,
    pub period: PeriodSpec,
    pub shape: Shape,
    inside: Vec<bool>,
    fluid: Vec<u32>,
    fluid_index: Vec<u32>,
    boundary_faces: Vec<BoundaryFace>,
}

impl DomainMask {
    pub fn inside(&self, idx: usize) -> bool {
        self.inside[idx]
    }

    pub fn inside_mask(&self) -> &[bool] {
        &self.inside
    }

    /// Grid indices of the fluid cells, in grid order.
    pub fn fluid_cells(&self) -> &[u32] {
        &self.fluid
    }

    pub fn n_fluid(&self) -> usize {
        self.fluid.len()
    }

    /// Fluid index of a grid cell.
    pub fn fluid_index(&self, idx: usize) -> Option<usize> {
        let k = self.fluid_index[idx];
        (k != SOLID).then_some(k as usize)
    }

    pub fn fluid_center(&self, k: usize) -> Point {
        self.grid.center(self.fluid[k] as usize)
    }

    pub fn boundary_faces(&self) -> &[BoundaryFace] {
        &self.boundary_faces
    }

    pub fn cell_area(&self) -> f64 {
        self.grid.h.powi(self.grid.dim as i32)
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    /// Fluid neighbour across a face; `None` for walls and obstacles.
    pub fn fluid_neighbor(&self, k: usize, face: Face) -> Option<usize> {
        let idx = self.fluid[k] as usize;
        let (n, _) = self.grid.neighbor(idx, face)?;
        self.fluid_index(n)
    }

    /// Fluid cells whose centers lie in the closed rectangle `[lo, hi]`.
    pub fn cells_in_rect(&self, lo: Point, hi: Point) -> Vec<usize> {
        (0..self.fluid.len())
            .filter(|&k| {
                let c = self.fluid_center(k);
                c[0] >= lo[0] && c[0] <= hi[0] && (self.grid.dim == 1 || (c[1] >= lo[1] && c[1] <= hi[1]))
            })
            .collect()
    }

    /// Fluid cells whose centers lie in the closed ball `B̄_r(center)`.
    pub fn cells_in_ball(&self, center: Point, r: f64) -> Vec<usize> {
        (0..self.fluid.len())
            .filter(|&k| {
                let c = self.fluid_center(k);
                let dy = if self.grid.dim == 1 { 0.0 } else { c[1] - center[1] };
                (c[0] - center[0]).hypot(dy) <= r
            })
            .collect()
    }

    /// Bit comparison of the mask with its translate by one period along `axis`.
    pub fn is_translation_invariant(&self, axis: usize) -> Result<bool, GeometryError> {
        let p = self.period.period_cells(axis)?;
        let g = &self.grid;
        let (nx, ny) = (g.nx, g.ny);
        for j in 0..ny {
            for i in 0..nx {
                let (i2, j2) = if axis == 0 { (i + p, j) } else { (i, j + p) };
                let (i2, j2) = match g.edges[axis] {
                    EdgeBc::Periodic => (i2 % nx, j2 % ny),
                    EdgeBc::Wall => {
                        if i2 >= nx || j2 >= ny {
                            continue;
                        }
                        (i2, j2)
                    }
                };
                if self.inside[g.index(i, j)] != self.inside[g.index(i2, j2)] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Edge-connected components of the fluid cells (periodic wrap included).
    pub fn fluid_components(&self) -> usize {
        let n = self.fluid.len();
        let mut label = vec![false; n];
        let mut components = 0;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if label[start] {
                continue;
            }
            components += 1;
            label[start] = true;
            queue.push_back(start);
            while let Some(k) = queue.pop_front() {
                for face in Face::ALL {
                    if let Some(m) = self.fluid_neighbor(k, face) {
                        if !label[m] {
                            label[m] = true;
                            queue.push_back(m);
                        }
                    }
                }
            }
        }
        components
    }

    /// Writes the mask as a binary PGM (P5), 255 for fluid, top row = largest y.
    pub fn write_pgm(&self, path: &Path) -> Result<(), GeometryError> {
        let g = &self.grid;
        let mut bytes = Vec::with_capacity(g.len() + 32);
        write!(bytes, "P5\n{} {}\n255\n", g.nx, g.ny)?;
        for j in (0..g.ny).rev() {
            for i in 0..g.nx {
                bytes.push(if self.inside[g.index(i, j)] { 255 } else { 0 });
            }
        }
        std::fs::write(path, bytes)?;
        Ok(())
    }

    /// Number of fluid cells whose center has `x` in `[a, b)`.
    pub fn fluid_area_between(&self, a: f64, b: f64) -> f64 {
        let count = (0..self.fluid.len())
            .filter(|&k| {
                let x = self.fluid_center(k)[0];
                x >= a && x < b
            })
            .count();
        count as f64 * self.cell_area()
    }
}

/// Generic builder: classify every cell center, then enumerate faces.
pub fn build_domain(shape: Shape, period: PeriodSpec, window: &WindowSpec, dim: usize) -> Result<DomainMask, GeometryError> {
    if dim != 1 && dim != 2 {
        return Err(GeometryError::Invalid(format!("dimension {dim} not supported")));
    }
    shape.hole.fits_in_cell(shape.period).map_err(GeometryError::Invalid)?;
    let res = period.resolution as f64;
    let h = period.h();
    let narrow = shape.hole.narrowest_feature(shape.period);
    if narrow.is_finite() && narrow * res < MIN_FEATURE_CELLS - 1e-9 {
        return Err(GeometryError::FeatureUnresolved { width: narrow, cells: narrow * res });
    }
    let to_cells = |v: f64, what: &str| -> Result<i64, GeometryError> {
        let n = v * res;
        if (n - n.round()).abs() > 1e-9 * n.abs().max(1.0) {
            return Err(GeometryError::Invalid(format!("window {what} {v} is not aligned to the grid")));
        }
        Ok(n.round() as i64)
    };
    let origin = [to_cells(window.origin[0], "origin")?, if dim == 1 { 0 } else { to_cells(window.origin[1], "origin")? }];
    let nx = to_cells(window.size[0], "size")?;
    let ny = if dim == 1 { 1 } else { to_cells(window.size[1], "size")? };
    if nx <= 0 || ny <= 0 {
        return Err(GeometryError::Invalid("empty window".into()));
    }
    let mut edges = window.edges;
    if dim == 1 {
        edges[1] = EdgeBc::Wall;
    }
    for axis in 0..dim {
        if edges[axis] == EdgeBc::Periodic {
            let p = period.period_cells(axis)? as i64;
            let n = if axis == 0 { nx } else { ny };
            if n % p != 0 {
                return Err(GeometryError::Invalid(format!(
                    "periodic window edge on axis {axis} needs a whole number of periods"
                )));
            }
        }
    }
    let grid = Grid { resolution: period.resolution, h, nx: nx as usize, ny: ny as usize, origin, edges, dim };

    // Cell centers are computed from period-local integer indices so that the
    // classification is exactly periodic.
    let period_cells: [Option<i64>; 2] = [0, 1].map(|axis| {
        if axis < period.lengths.len() {
            period.period_cells(axis).ok().map(|p| p as i64)
        } else {
            None
        }
    });
    let coord = |axis: usize, cell: i64| -> f64 {
        match period_cells[axis] {
            Some(p) => (cell.rem_euclid(p) as f64 + 0.5) * h,
            None => (cell as f64 + 0.5) * h,
        }
    };
    let mut inside = vec![false; grid.len()];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let x = coord(0, origin[0] + i as i64);
            let y = if dim == 1 { 0.0 } else { coord(1, origin[1] + j as i64) };
            inside[grid.index(i, j)] = shape.is_fluid([x, y]);
        }
    }
    let mut fluid = Vec::new();
    let mut fluid_index = vec![SOLID; grid.len()];
    for (idx, &b) in inside.iter().enumerate() {
        if b {
            fluid_index[idx] = fluid.len() as u32;
            fluid.push(idx as u32);
        }
    }
    let mut boundary_faces = Vec::new();
    for &idx in &fluid {
        let idx = idx as usize;
        for face in Face::ALL {
            if face.axis() == 1 && dim == 1 {
                continue;
            }
            let kind = match grid.neighbor(idx, face) {
                Some((n, wrapped)) => {
                    if !inside[n] {
                        Some(FaceKind::Obstacle)
                    } else if wrapped {
                        Some(FaceKind::WindowPeriodic)
                    } else {
                        None
                    }
                }
                None => {
                    // Decide whether the closed edge is a true obstacle face.
                    let nrm = face.normal();
                    let (i, j) = grid.ij(idx);
                    let bx = coord(0, origin[0] + i as i64 + nrm[0] as i64);
                    let by = if dim == 1 { 0.0 } else { coord(1, origin[1] + j as i64 + nrm[1] as i64) };
                    if shape.is_fluid([bx, by]) {
                        Some(FaceKind::WindowWall)
                    } else {
                        Some(FaceKind::Obstacle)
                    }
                }
            };
            if let Some(kind) = kind {
                boundary_faces.push(BoundaryFace { cell: idx, face, normal: face.normal(), kind });
            }
        }
    }
    let mask = DomainMask { grid, period, shape, inside, fluid, fluid_index, boundary_faces };
    if mask.fluid.is_empty() {
        return Err(GeometryError::DisconnectedDomain { components: 0 });
    }
    let components = mask.fluid_components();
    if components != 1 {
        return Err(GeometryError::DisconnectedDomain { components });
    }
    Ok(mask)
}

/// Lattice of identical holes, periodic along both axes.
pub fn build_lattice_domain(hole: HoleGeometry, period: PeriodSpec, window: &WindowSpec) -> Result<DomainMask, GeometryError> {
    if period.lengths.len() != 2 {
        return Err(GeometryError::Invalid("a planar lattice needs two period lengths".into()));
    }
    let shape = Shape { hole, period: [period.lengths[0], period.lengths[1]], mirror: false };
    build_domain(shape, period, window, 2)
}

/// One-dimensional interval `[x0, x0 + length]` without holes.
pub fn build_interval(x0: f64, length: f64, resolution: u32, edge: EdgeBc) -> Result<DomainMask, GeometryError> {
    let period = PeriodSpec::new(vec![length], resolution)?;
    let shape = Shape { hole: HoleGeometry::None, period: [length, f64::INFINITY], mirror: false };
    let window = WindowSpec { origin: [x0, 0.0], size: [length, 0.0], edges: [edge, EdgeBc::Wall] };
    build_domain(shape, period, &window, 1)
}

/// Sawtooth cylinder `{|x₂| <= υ(x₁)}` over `periods` periods starting at
/// `first_period·L`, closed by walls at both ends of the window.
pub fn build_sawtooth_cylinder(
    profile: SawtoothProfile,
    resolution: u32,
    first_period: i64,
    periods: usize,
    max_neck_area: Option<f64>,
    mirror: bool,
) -> Result<DomainMask, GeometryError> {
    let l = profile.period;
    if !(l > 4.0) {
        return Err(GeometryError::ProfileViolation(format!("period L = {l} must exceed 4")));
    }
    if !(profile.neck > 0.0 && profile.neck <= 1.0) || !(profile.drop > 0.0 && profile.drop < 1.0) {
        return Err(GeometryError::ProfileViolation("neck must lie in (0,1] and drop in (0,1)".into()));
    }
    if let Some(limit) = max_neck_area {
        if profile.neck_area() >= limit {
            return Err(GeometryError::ProfileViolation(format!(
                "neck area {} is not below {limit}",
                profile.neck_area()
            )));
        }
    }
    let period = PeriodSpec::new(vec![l], resolution)?;
    let top = SawtoothProfile::HALF_HEIGHT;
    let shape = Shape { hole: HoleGeometry::SawtoothCylinder { profile }, period: [l, f64::INFINITY], mirror };
    let x0 = if mirror { -((first_period + periods as i64) as f64) * l } else { first_period as f64 * l };
    let window = WindowSpec {
        origin: [x0, -top],
        size: [periods as f64 * l, 2.0 * top],
        edges: [EdgeBc::Wall, EdgeBc::Wall],
    };
    let mask = build_domain(shape, period, &window, 2)?;
    check_sawtooth_discretization(&mask, &profile)?;
    Ok(mask)
}

/// Half-width of the discretized cylinder in each column of the first period.
pub fn discrete_half_widths(mask: &DomainMask) -> Vec<(f64, f64)> {
    let g = &mask.grid;
    let mut out = Vec::with_capacity(g.nx);
    for i in 0..g.nx {
        let count = (0..g.ny).filter(|&j| mask.inside(g.index(i, j))).count();
        let mut x = g.center(g.index(i, 0))[0];
        if mask.shape.mirror {
            x = -x;
        }
        out.push((x, 0.5 * count as f64 * g.h));
    }
    out
}

fn check_sawtooth_discretization(mask: &DomainMask, profile: &SawtoothProfile) -> Result<(), GeometryError> {
    let l = profile.period;
    let h = mask.grid.h;
    let slope_max = 2.0 / (l - 4.0);
    let widths = discrete_half_widths(mask);
    let local = |x: f64| x.rem_euclid(l);
    // nonincreasing on [1,2]
    let mut neck: Vec<(f64, f64)> = widths.iter().copied().filter(|(x, _)| (1.0..=2.0).contains(&local(*x))).collect();
    neck.sort_by(|a, b| local(a.0).total_cmp(&local(b.0)));
    for w in neck.windows(2) {
        if w[1].1 > w[0].1 + 1e-12 {
            return Err(GeometryError::ProfileViolation(format!("profile increases inside the neck at x = {}", w[1].0)));
        }
    }
    // slope bound on [2, L], up to one cell of staircase
    let mut ramp: Vec<(f64, f64)> = widths.iter().copied().filter(|(x, _)| local(*x) >= 2.0).collect();
    ramp.sort_by(|a, b| local(a.0).total_cmp(&local(b.0)));
    for a in 0..ramp.len() {
        for b in a + 1..ramp.len() {
            let dx = local(ramp[b].0) - local(ramp[a].0);
            if dx <= 0.0 {
                continue;
            }
            let rise = ramp[b].1 - ramp[a].1;
            if rise.abs() > slope_max * dx + h + 1e-12 {
                return Err(GeometryError::ProfileViolation(format!(
                    "discrete slope {} exceeds 2/(L-4) = {slope_max}",
                    rise / dx
                )));
            }
        }
    }
    Ok(())
}

/// Asymmetric lattice Ω₃ over `periods` periods in x₁ (walls at both ends)
/// and one period `[-L₂/2, L₂/2]` in x₂ (periodic).
pub fn build_omega3(spec: Omega3Spec, resolution: u32, first_period: i64, periods: usize, mirror: bool) -> Result<DomainMask, GeometryError> {
    spec.validate().map_err(GeometryError::Invalid)?;
    let (l1, l2) = (spec.l1(), spec.l2());
    let period = PeriodSpec::new(vec![l1, l2], resolution)?;
    let shape = Shape { hole: HoleGeometry::Omega3 { spec }, period: [l1, l2], mirror };
    let x0 = if mirror { -((first_period + periods as i64) as f64) * l1 } else { first_period as f64 * l1 };
    let window = WindowSpec {
        origin: [x0, -0.5 * l2],
        size: [periods as f64 * l1, l2],
        edges: [EdgeBc::Wall, EdgeBc::Periodic],
    };
    build_domain(shape, period, &window, 2)
}
