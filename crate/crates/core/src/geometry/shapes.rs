//! Continuous descriptors of the periodic obstacles.
//!
//! Every descriptor answers two questions in world coordinates: is a point in
//! the closed fluid region, and where is the boundary (with its exterior
//! normal). The mask builder only uses the first; the geometric conditions
//! in [`super::conditions`] use the second so that they are not polluted by
//! the staircase of the grid.

use serde::{Deserialize, Serialize};

pub type Point = [f64; 2];

/// A boundary sample: position on the obstacle surface and the unit normal
/// pointing out of the fluid region (into the obstacle).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub point: Point,
    pub normal: Point,
}

fn normalize(v: Point) -> Point {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

fn wrap(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Cutoff used at the closing end of the Ω₃ obstacle.
///
/// `χ(s) = (1 - sqrt(1 - s)) exp(1 - 1/s)` on `(0, 1)`, flat to all orders
/// at 0 and with unbounded derivative at `1⁻`.
pub fn cutoff(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        (1.0 - (1.0 - s).sqrt()) * (1.0 - 1.0 / s).exp()
    }
}

pub fn cutoff_derivative(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        f64::INFINITY
    } else {
        let root = (1.0 - s).sqrt();
        let e = (1.0 - 1.0 / s).exp();
        0.5 / root * e + (1.0 - root) * e / (s * s)
    }
}

/// Parameters of the asymmetric lattice Ω₃.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Omega3Spec {
    /// Half-aperture of the narrow passage.
    pub eps: f64,
    /// Length scale of the closing ramp.
    pub kappa: f64,
    /// Radius of the sliding subsolution the constraints refer to.
    #[serde(rename = "R")]
    pub radius: f64,
}

impl Omega3Spec {
    pub fn new(eps: f64, kappa: f64, radius: f64) -> Self {
        Self { eps, kappa, radius }
    }

    /// Checks `0 < eps < 1`, `kappa >= 4R` and `R <= 1/(2 eps)`.
    pub fn validate(&self) -> Result<(), String> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(format!("eps must lie in (0,1), got {}", self.eps));
        }
        if !(self.kappa > 0.0) {
            return Err(format!("kappa must be positive, got {}", self.kappa));
        }
        if !(self.radius > 0.0) {
            return Err(format!("R must be positive, got {}", self.radius));
        }
        if self.kappa < 4.0 * self.radius - 1e-12 {
            return Err(format!("kappa = {} < 4R = {}", self.kappa, 4.0 * self.radius));
        }
        if self.radius > 1.0 / (2.0 * self.eps) + 1e-12 {
            return Err(format!(
                "R = {} exceeds 1/(2 eps) = {}",
                self.radius,
                1.0 / (2.0 * self.eps)
            ));
        }
        Ok(())
    }

    pub fn l1(&self) -> f64 {
        2.0 * (3.0 / (self.eps * self.eps) + self.kappa)
    }

    pub fn l2(&self) -> f64 {
        2.0 * (1.0 + self.kappa)
    }

    /// Start of the closing ramp, `3/eps²`.
    pub fn ramp_start(&self) -> f64 {
        3.0 / (self.eps * self.eps)
    }

    /// Lower boundary of the obstacle above the passage, for `s ∈ [0, L₁/2]`.
    pub fn profile(&self, s: f64) -> f64 {
        let e = self.eps;
        let inv2 = 1.0 / (e * e);
        if s <= 0.0 {
            2.0 * e
        } else if s <= 1.0 {
            e * (1.0 + (1.0 - s) * (1.0 - s))
        } else if s <= inv2 {
            e
        } else if s <= 2.0 * inv2 {
            e + (1.0 - e) * (s - inv2) / inv2
        } else if s <= 3.0 * inv2 {
            1.0
        } else {
            1.0 + self.kappa * cutoff((s - 3.0 * inv2) / self.kappa)
        }
    }

    pub fn profile_slope(&self, s: f64) -> f64 {
        let e = self.eps;
        let inv2 = 1.0 / (e * e);
        if s <= 0.0 {
            f64::NEG_INFINITY
        } else if s <= 1.0 {
            -2.0 * e * (1.0 - s)
        } else if s <= inv2 {
            0.0
        } else if s <= 2.0 * inv2 {
            (1.0 - e) / inv2
        } else if s <= 3.0 * inv2 {
            0.0
        } else {
            cutoff_derivative((s - 3.0 * inv2) / self.kappa)
        }
    }
}

/// Profile of the sawtooth cylinder `{|x₂| <= υ(x₁)}`.
///
/// `υ = 2` on `[0,1]`, a linear drop to the neck half-width on `[1, 1+drop]`,
/// constant up to 2, then piecewise linear through `(L/2, 1)` and `(L, 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SawtoothProfile {
    pub period: f64,
    /// Half-width of the narrow passage, `υ(2)`.
    pub neck: f64,
    /// Length of the abrupt drop following `x₁ = 1`.
    pub drop: f64,
}

impl SawtoothProfile {
    pub const HALF_HEIGHT: f64 = 2.0;

    pub fn value(&self, x: f64) -> f64 {
        let l = self.period;
        let s = wrap(x, l);
        let top = Self::HALF_HEIGHT;
        if s <= 1.0 {
            top
        } else if s <= 1.0 + self.drop {
            top + (self.neck - top) * (s - 1.0) / self.drop
        } else if s <= 2.0 {
            self.neck
        } else if s <= l / 2.0 {
            self.neck + (1.0 - self.neck) * (s - 2.0) / (l / 2.0 - 2.0)
        } else {
            1.0 + (s - l / 2.0) / (l / 2.0)
        }
    }

    pub fn slope(&self, x: f64) -> f64 {
        let l = self.period;
        let s = wrap(x, l);
        if s <= 1.0 {
            0.0
        } else if s <= 1.0 + self.drop {
            (self.neck - Self::HALF_HEIGHT) / self.drop
        } else if s <= 2.0 {
            0.0
        } else if s <= l / 2.0 {
            (1.0 - self.neck) / (l / 2.0 - 2.0)
        } else {
            2.0 / l
        }
    }

    /// Area of the passage `{x₁ ∈ [1,2]}` of one period.
    pub fn neck_area(&self) -> f64 {
        let top = Self::HALF_HEIGHT;
        (top + self.neck) * self.drop + 2.0 * self.neck * (1.0 - self.drop)
    }
}

/// Geometry of one periodicity cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum HoleGeometry {
    None,
    /// Axis-aligned rectangular obstacle centred in the cell.
    RectHole { center: Point, size: Point },
    /// Polygonal obstacle, star-shaped with respect to `center`.
    StarHole { center: Point, vertices: Vec<Point> },
    /// Plus-shaped wall centred in the cell. Its arms stop `aperture/2` short
    /// of the cell edges, so neighbouring walls enclose square chambers
    /// (centred on the lattice points) joined through gaps of width `aperture`.
    NarrowNeck { thickness: f64, aperture: f64 },
    SawtoothCylinder { profile: SawtoothProfile },
    Omega3 { spec: Omega3Spec },
}

impl HoleGeometry {
    pub fn tag(&self) -> &'static str {
        match self {
            HoleGeometry::None => "none",
            HoleGeometry::RectHole { .. } => "rect_hole",
            HoleGeometry::StarHole { .. } => "star_hole",
            HoleGeometry::NarrowNeck { .. } => "narrow_neck",
            HoleGeometry::SawtoothCylinder { .. } => "sawtooth_cylinder",
            HoleGeometry::Omega3 { .. } => "omega3",
        }
    }

    /// Regular star with `points` tips, outer radius `outer` and inner radius `inner`.
    pub fn star(center: Point, outer: f64, inner: f64, points: usize) -> Self {
        let mut vertices = Vec::with_capacity(2 * points);
        for k in 0..2 * points {
            let r = if k % 2 == 0 { outer } else { inner };
            let a = std::f64::consts::PI * k as f64 / points as f64 + std::f64::consts::FRAC_PI_2;
            vertices.push([center[0] + r * a.cos(), center[1] + r * a.sin()]);
        }
        HoleGeometry::StarHole { center, vertices }
    }

    /// Membership of a point of the periodicity cell in the closed fluid
    /// region. Points exactly on an obstacle boundary count as fluid.
    pub fn is_fluid(&self, p: Point, period: Point) -> bool {
        match self {
            HoleGeometry::None => true,
            HoleGeometry::RectHole { center, size } => {
                let x = wrap(p[0], period[0]);
                let y = wrap(p[1], period[1]);
                !((x - center[0]).abs() < 0.5 * size[0] && (y - center[1]).abs() < 0.5 * size[1])
            }
            HoleGeometry::StarHole { vertices, .. } => {
                let q = [wrap(p[0], period[0]), wrap(p[1], period[1])];
                !point_in_polygon_strict(q, vertices)
            }
            HoleGeometry::NarrowNeck { thickness, aperture } => {
                let x = wrap(p[0], period[0]) - 0.5 * period[0];
                let y = wrap(p[1], period[1]) - 0.5 * period[1];
                let (t, a) = (0.5 * thickness, 0.5 * aperture);
                let vertical = x.abs() < t && y.abs() < 0.5 * period[1] - a;
                let horizontal = y.abs() < t && x.abs() < 0.5 * period[0] - a;
                !(vertical || horizontal)
            }
            HoleGeometry::SawtoothCylinder { profile } => p[1].abs() <= profile.value(p[0]),
            HoleGeometry::Omega3 { spec } => {
                let l1 = spec.l1();
                let l2 = spec.l2();
                let s = wrap(p[0], l1);
                let y = wrap(p[1], l2);
                if s <= 0.0 || s >= 0.5 * l1 {
                    return true;
                }
                let h = spec.profile(s);
                !(y > h && y < l2 - h)
            }
        }
    }

    /// Samples of the obstacle boundary inside one periodicity cell, spaced
    /// by roughly `spacing` along the boundary.
    pub fn boundary_samples(&self, spacing: f64, period: Point) -> Vec<BoundarySample> {
        let mut out = Vec::new();
        match self {
            HoleGeometry::None => {}
            HoleGeometry::RectHole { center, size } => {
                let (x0, x1) = (center[0] - 0.5 * size[0], center[0] + 0.5 * size[0]);
                let (y0, y1) = (center[1] - 0.5 * size[1], center[1] + 0.5 * size[1]);
                push_segment(&mut out, [x0, y0], [x1, y0], [0.0, 1.0], spacing);
                push_segment(&mut out, [x1, y0], [x1, y1], [-1.0, 0.0], spacing);
                push_segment(&mut out, [x1, y1], [x0, y1], [0.0, -1.0], spacing);
                push_segment(&mut out, [x0, y1], [x0, y0], [1.0, 0.0], spacing);
            }
            HoleGeometry::StarHole { vertices, .. } => {
                let orient = polygon_signed_area(vertices).signum();
                for k in 0..vertices.len() {
                    let a = vertices[k];
                    let b = vertices[(k + 1) % vertices.len()];
                    let d = [b[0] - a[0], b[1] - a[1]];
                    // Outward normal of the polygon points into the fluid; we
                    // need the one pointing into the obstacle.
                    let outward_poly = normalize([d[1] * orient, -d[0] * orient]);
                    push_segment(&mut out, a, b, [-outward_poly[0], -outward_poly[1]], spacing);
                }
            }
            HoleGeometry::NarrowNeck { thickness, aperture } => {
                // Walk the twelve edges of the plus, counter-clockwise.
                let (cx, cy) = (0.5 * period[0], 0.5 * period[1]);
                let t = 0.5 * thickness;
                let ex = 0.5 * period[0] - 0.5 * aperture;
                let ey = 0.5 * period[1] - 0.5 * aperture;
                let pts = [
                    [t, -ey], [t, -t], [ex, -t], [ex, t], [t, t], [t, ey],
                    [-t, ey], [-t, t], [-ex, t], [-ex, -t], [-t, -t], [-t, -ey],
                ];
                for k in 0..pts.len() {
                    let a = [cx + pts[k][0], cy + pts[k][1]];
                    let b = [cx + pts[(k + 1) % 12][0], cy + pts[(k + 1) % 12][1]];
                    let d = [b[0] - a[0], b[1] - a[1]];
                    // counter-clockwise polygon: the obstacle lies to the left
                    push_segment(&mut out, a, b, [-d[1], d[0]], spacing);
                }
            }
            HoleGeometry::SawtoothCylinder { profile } => {
                let n = (profile.period / spacing).ceil() as usize;
                for k in 0..n {
                    let x = profile.period * (k as f64 + 0.5) / n as f64;
                    let v = profile.value(x);
                    let dv = profile.slope(x);
                    out.push(BoundarySample { point: [x, v], normal: normalize([-dv, 1.0]) });
                    out.push(BoundarySample { point: [x, -v], normal: normalize([-dv, -1.0]) });
                }
            }
            HoleGeometry::Omega3 { spec } => {
                let l1 = spec.l1();
                let l2 = spec.l2();
                let half = 0.5 * l1;
                // Arclength stepping: the profile is vertical at both ends.
                let mut params = Vec::new();
                let mut s = 0.5 * spacing.min(1e-3);
                while s < half {
                    params.push(s);
                    let dh = spec.profile_slope(s);
                    let ds = if dh.is_finite() { spacing / (1.0 + dh * dh).sqrt() } else { 0.0 };
                    s += ds.max(1e-9);
                }
                out.push(BoundarySample { point: [half, 0.5 * l2], normal: [-1.0, 0.0] });
                for s in params {
                    let h = spec.profile(s);
                    let dh = spec.profile_slope(s);
                    let (lower, upper) = if dh.is_finite() {
                        (normalize([-dh, 1.0]), normalize([-dh, -1.0]))
                    } else {
                        ([1.0, 0.0], [1.0, 0.0])
                    };
                    // Obstacle occupies h < y < L2 - h: the boundary y = h has
                    // its obstacle side above, y = L2 - h below.
                    out.push(BoundarySample { point: [s, h], normal: lower });
                    out.push(BoundarySample { point: [s, l2 - h], normal: upper });
                }
                let e2 = 2.0 * spec.eps;
                push_segment(&mut out, [0.0, e2], [0.0, l2 - e2], [1.0, 0.0], spacing);
            }
        }
        out
    }

    /// Width, in world units, of the narrowest feature a grid has to resolve.
    pub fn narrowest_feature(&self, period: Point) -> f64 {
        match self {
            HoleGeometry::None => f64::INFINITY,
            HoleGeometry::RectHole { size, .. } => size[0]
                .min(size[1])
                .min(period[0] - size[0])
                .min(period[1] - size[1]),
            HoleGeometry::StarHole { center, vertices } => {
                let inner = vertices
                    .iter()
                    .map(|v| (v[0] - center[0]).hypot(v[1] - center[1]))
                    .fold(f64::INFINITY, f64::min);
                let (lo, hi) = bbox(vertices);
                (2.0 * inner)
                    .min(period[0] - (hi[0] - lo[0]))
                    .min(period[1] - (hi[1] - lo[1]))
            }
            HoleGeometry::NarrowNeck { thickness, aperture, .. } => thickness.min(*aperture),
            HoleGeometry::SawtoothCylinder { profile } => 2.0 * profile.neck,
            HoleGeometry::Omega3 { spec } => 2.0 * spec.eps,
        }
    }

    /// Checks that the obstacle lies strictly inside one periodicity cell.
    pub fn fits_in_cell(&self, period: Point) -> Result<(), String> {
        match self {
            HoleGeometry::None | HoleGeometry::SawtoothCylinder { .. } | HoleGeometry::Omega3 { .. } => Ok(()),
            HoleGeometry::RectHole { center, size } => {
                let ok = (0..2).all(|i| {
                    center[i] - 0.5 * size[i] > 0.0 && center[i] + 0.5 * size[i] < period[i]
                });
                if ok {
                    Ok(())
                } else {
                    Err("rectangular hole crosses the periodicity cell".into())
                }
            }
            HoleGeometry::StarHole { vertices, .. } => {
                let (lo, hi) = bbox(vertices);
                if lo[0] > 0.0 && lo[1] > 0.0 && hi[0] < period[0] && hi[1] < period[1] {
                    Ok(())
                } else {
                    Err("star hole crosses the periodicity cell".into())
                }
            }
            HoleGeometry::NarrowNeck { thickness, aperture } => {
                if *thickness > 0.0
                    && *aperture > 0.0
                    && *thickness < period[0].min(period[1]) - *aperture
                {
                    Ok(())
                } else {
                    Err("narrow-neck wall crosses the periodicity cell".into())
                }
            }
        }
    }
}

fn push_segment(out: &mut Vec<BoundarySample>, a: Point, b: Point, normal: Point, spacing: f64) {
    let len = (b[0] - a[0]).hypot(b[1] - a[1]);
    let n = ((len / spacing).ceil() as usize).max(1);
    let normal = normalize(normal);
    for k in 0..n {
        let t = (k as f64 + 0.5) / n as f64;
        out.push(BoundarySample { point: [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])], normal });
    }
}

fn bbox(vertices: &[Point]) -> (Point, Point) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for v in vertices {
        for i in 0..2 {
            lo[i] = lo[i].min(v[i]);
            hi[i] = hi[i].max(v[i]);
        }
    }
    (lo, hi)
}

pub fn polygon_signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|k| {
            let a = vertices[k];
            let b = vertices[(k + 1) % n];
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        * 0.5
}

fn on_segment(p: Point, a: Point, b: Point) -> bool {
    let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    let scale = (b[0] - a[0]).abs() + (b[1] - a[1]).abs();
    if cross.abs() > 1e-12 * scale.max(1.0) {
        return false;
    }
    p[0] >= a[0].min(b[0]) - 1e-12
        && p[0] <= a[0].max(b[0]) + 1e-12
        && p[1] >= a[1].min(b[1]) - 1e-12
        && p[1] <= a[1].max(b[1]) + 1e-12
}

/// Even-odd test for the open polygon interior; points on edges are outside.
pub fn point_in_polygon_strict(p: Point, vertices: &[Point]) -> bool {
    let n = vertices.len();
    let mut inside = false;
    for k in 0..n {
        let a = vertices[k];
        let b = vertices[(k + 1) % n];
        if on_segment(p, a, b) {
            return false;
        }
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Closed-polygon containment (edges count as inside).
pub fn point_in_polygon_closed(p: Point, vertices: &[Point]) -> bool {
    let n = vertices.len();
    (0..n).any(|k| on_segment(p, vertices[k], vertices[(k + 1) % n])) || point_in_polygon_strict(p, vertices)
}

/// Star-shapedness with respect to `center`: every center-to-vertex segment
/// stays in the closed polygon (checked on `samples` points per segment).
pub fn is_star_shaped(center: Point, vertices: &[Point], samples: usize) -> bool {
    if !point_in_polygon_strict(center, vertices) {
        return false;
    }
    vertices.iter().all(|v| {
        (1..=samples).all(|k| {
            let t = k as f64 / samples as f64;
            let q = [center[0] + t * (v[0] - center[0]), center[1] + t * (v[1] - center[1])];
            point_in_polygon_closed(q, vertices)
        })
    })
}

pub fn polygon_diameter(vertices: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for a in vertices {
        for b in vertices {
            d = d.max((a[0] - b[0]).hypot(a[1] - b[1]));
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_endpoints_and_monotonicity() {
        assert_eq!(cutoff(0.0), 0.0);
        assert_eq!(cutoff(1.0), 1.0);
        let n = 10_000;
        let mut prev = 0.0;
        for k in 1..n {
            let v = cutoff(k as f64 / n as f64);
            assert!(v >= prev, "cutoff decreases at {}", k);
            prev = v;
        }
        // flat at 0, steep at 1
        assert!(cutoff(0.02) < 1e-20);
        assert!(cutoff_derivative(1.0 - 1e-10) > 1e4);
    }

    #[test]
    fn omega3_profile_anchor_values() {
        let spec = Omega3Spec::new(0.5, 4.0, 1.0);
        assert_eq!(spec.profile(0.0), 1.0);
        for s in [1.0, 2.0, 3.0, 4.0] {
            assert!((spec.profile(s) - 0.5).abs() < 1e-15, "s = {s}");
        }
        let end = spec.ramp_start() + spec.kappa;
        assert!((spec.profile(end) - 0.5 * spec.l2()).abs() < 1e-12);
        assert!((spec.profile(end) - (1.0 + spec.kappa)).abs() < 1e-12);
        // ramp slope bound on [eps^-2, 2 eps^-2]
        assert!(spec.profile_slope(5.0) <= spec.eps * spec.eps);
    }

    #[test]
    fn omega3_validation() {
        assert!(Omega3Spec::new(0.5, 4.0, 1.0).validate().is_ok());
        assert!(Omega3Spec::new(0.5, 3.0, 1.0).validate().is_err());
        assert!(Omega3Spec::new(0.6, 4.0, 1.0).validate().is_err());
        assert!(Omega3Spec::new(1.5, 4.0, 0.2).validate().is_err());
    }

    #[test]
    fn sawtooth_profile_clauses() {
        let p = SawtoothProfile { period: 40.0, neck: 0.1, drop: 0.1 };
        assert_eq!(p.value(0.5), 2.0);
        assert!((p.value(20.0) - 1.0).abs() < 1e-12);
        assert!((p.value(40.0 - 1e-9) - 2.0).abs() < 1e-6);
        let n = 4000;
        for k in 0..n {
            let x = 2.0 + 38.0 * (k as f64 + 0.5) / n as f64;
            let s = p.slope(x);
            assert!((0.0..=2.0 / 36.0 + 1e-12).contains(&s));
        }
        assert!(p.neck_area() < 0.5);
    }

    #[test]
    fn regular_star_is_star_shaped() {
        let g = HoleGeometry::star([1.0, 1.0], 0.8, 0.35, 5);
        let HoleGeometry::StarHole { center, vertices } = &g else { unreachable!() };
        assert!(is_star_shaped(*center, vertices, 64));
        assert!(!g.is_fluid([1.0, 1.0], [2.0, 2.0]));
        assert!(g.is_fluid([0.05, 0.05], [2.0, 2.0]));
    }

    #[test]
    fn non_star_polygon_detected() {
        // U shape seen from a point in one arm
        let verts = vec![[0.0, 0.0], [3.0, 0.0], [3.0, 3.0], [2.0, 3.0], [2.0, 1.0], [1.0, 1.0], [1.0, 3.0], [0.0, 3.0]];
        assert!(!is_star_shaped([0.5, 2.5], &verts, 64));
    }

    #[test]
    fn rect_boundary_normals_close_up() {
        let g = HoleGeometry::RectHole { center: [0.5, 0.5], size: [0.5, 0.5] };
        let samples = g.boundary_samples(0.01, [1.0, 1.0]);
        let (mut sx, mut sy) = (0.0, 0.0);
        for s in &samples {
            sx += s.normal[0];
            sy += s.normal[1];
        }
        assert!(sx.abs() < 1e-9 && sy.abs() < 1e-9);
    }
}
