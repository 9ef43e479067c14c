//! Geometric admissibility tests for sliding compactly supported subsolutions.

use std::collections::VecDeque;

use super::shapes::{BoundarySample, HoleGeometry, Point};
use super::{DomainMask, EdgeBc, FaceKind, GeometryError};

/// Tolerance on `(z - x)·ν <= 0`.
pub const SLIDING_TOL: f64 = 1e-9;

fn sample_spacing(mask: &DomainMask) -> f64 {
    0.25 * mask.grid.h
}

/// Boundary samples with normals near `center`, from the continuous
/// descriptor when it has one, else from the mask faces.
fn boundary_near(mask: &DomainMask, center: Point, radius: f64) -> Vec<BoundarySample> {
    if !matches!(mask.shape.hole, HoleGeometry::None) {
        return mask.shape.boundary_samples_near(center, radius, sample_spacing(mask));
    }
    let h = mask.grid.h;
    mask.boundary_faces()
        .iter()
        .filter(|f| f.kind == FaceKind::Obstacle)
        .filter_map(|f| {
            let c = mask.grid.center(f.cell);
            let p = [c[0] + 0.5 * h * f.normal[0], c[1] + 0.5 * h * f.normal[1]];
            ((p[0] - center[0]).hypot(p[1] - center[1]) <= radius).then_some(BoundarySample { point: p, normal: f.normal })
        })
        .collect()
}

/// Tests `(z - x)·ν(x) <= 0` for every boundary point `x` in `B̄_R(z)`.
pub fn check_sliding_condition(mask: &DomainMask, z: Point, radius: f64) -> bool {
    boundary_near(mask, z, radius)
        .iter()
        .all(|s| (z[0] - s.point[0]) * s.normal[0] + (z[1] - s.point[1]) * s.normal[1] <= SLIDING_TOL)
}

/// Worst value of `(z - x)·ν(x)` over the boundary in `B̄_R(z)`, `-inf` if none.
pub fn sliding_defect(mask: &DomainMask, z: Point, radius: f64) -> f64 {
    boundary_near(mask, z, radius)
        .iter()
        .map(|s| (z[0] - s.point[0]) * s.normal[0] + (z[1] - s.point[1]) * s.normal[1])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Exterior normal at a boundary point; at corners, the bisector of the
/// distinct normals found within two cells.
pub fn boundary_normal(mask: &DomainMask, x: Point) -> Option<Point> {
    let reach = 2.0 * mask.grid.h;
    let near = boundary_near(mask, x, reach);
    if near.is_empty() {
        return None;
    }
    let mut distinct: Vec<Point> = Vec::new();
    for s in &near {
        if !distinct.iter().any(|n| (n[0] - s.normal[0]).abs() + (n[1] - s.normal[1]).abs() < 1e-6) {
            distinct.push(s.normal);
        }
    }
    let closest = near
        .iter()
        .min_by(|a, b| {
            let da = (a.point[0] - x[0]).hypot(a.point[1] - x[1]);
            let db = (b.point[0] - x[0]).hypot(b.point[1] - x[1]);
            da.total_cmp(&db)
        })
        .unwrap();
    // On a smooth curve the sampled normals vary continuously; only treat the
    // point as a corner when two normals differ by more than 30 degrees.
    let corner = distinct.iter().any(|n| n[0] * closest.normal[0] + n[1] * closest.normal[1] < 0.866);
    if !corner {
        return Some(closest.normal);
    }
    let mut s = [0.0, 0.0];
    for n in &distinct {
        s[0] += n[0];
        s[1] += n[1];
    }
    let len = s[0].hypot(s[1]);
    if len < 1e-12 {
        return Some(closest.normal);
    }
    Some([s[0] / len, s[1] / len])
}

/// Whether a closed disc of the given radius touches the closed fluid region
/// only at `x`: its center is `x + radius·ν(x)` and all sampled points of the
/// disc farther than two cells from `x` must lie outside the fluid.
pub fn check_exterior_ball(mask: &DomainMask, x: Point, radius: f64) -> bool {
    let Some(nu) = boundary_normal(mask, x) else {
        return false;
    };
    let y = [x[0] + radius * nu[0], x[1] + radius * nu[1]];
    let h = mask.grid.h;
    let step = 0.5 * h;
    let skip = 2.0 * h;
    let rings = (radius / step).ceil() as usize;
    let fluid = |p: Point| -> bool {
        if matches!(mask.shape.hole, HoleGeometry::None) {
            match mask.grid.locate(p) {
                Some(idx) => mask.inside(idx),
                None => false,
            }
        } else {
            mask.shape.is_fluid(p)
        }
    };
    if (x[0] - y[0]).hypot(x[1] - y[1]) > skip && fluid(y) {
        return false;
    }
    for k in 1..=rings {
        let rho = (k as f64 * step).min(radius) * (1.0 - 1e-9);
        let n = ((2.0 * std::f64::consts::PI * rho / step).ceil() as usize).max(8);
        for m in 0..n {
            let a = 2.0 * std::f64::consts::PI * m as f64 / n as f64;
            let p = [y[0] + rho * a.cos(), y[1] + rho * a.sin()];
            if (p[0] - x[0]).hypot(p[1] - x[1]) <= skip {
                continue;
            }
            if fluid(p) {
                return false;
            }
        }
    }
    true
}

/// Centers admissible for sliding the subsolution of radius `R` inside one
/// periodicity cell of Ω₃.
#[derive(Debug, Clone)]
pub struct SlidableSet {
    /// Grid indices of the admissible centers.
    pub cells: Vec<usize>,
    /// Which template region each cell came from (1, 2 or 3).
    pub region: Vec<u8>,
    /// Cells of the template rejected by the sliding test.
    pub rejected: Vec<usize>,
}

fn distance_to_boundary(mask: &DomainMask, z: Point, cap: f64) -> f64 {
    boundary_near(mask, z, cap)
        .iter()
        .map(|s| (s.point[0] - z[0]).hypot(s.point[1] - z[1]))
        .fold(cap, f64::min)
}

/// Builds the slidable set of an Ω₃ mask over the cell `[2R, L₁+2R] × [-L₂/2, L₂/2]`
/// and checks that it is 8-connected, alone and together with its vertical
/// period translates.
pub fn slidable_set(mask: &DomainMask, radius: f64) -> Result<SlidableSet, GeometryError> {
    let HoleGeometry::Omega3 { spec } = mask.shape.hole else {
        return Err(GeometryError::Invalid("slidable set needs an Omega3 domain".into()));
    };
    if mask.shape.mirror {
        return Err(GeometryError::Invalid("slidable set is defined on the unreflected domain".into()));
    }
    let (l1, l2) = (spec.l1(), spec.l2());
    let g = &mask.grid;
    let (lo, hi) = (g.lower(), g.upper());
    if lo[0] > 2.0 * radius || hi[0] < l1 + 2.0 * radius {
        return Err(GeometryError::Invalid("window does not contain the periodicity cell".into()));
    }
    let ramp = spec.ramp_start();
    let h = g.h;
    let mut cells = Vec::new();
    let mut region = Vec::new();
    let mut rejected = Vec::new();
    for idx in 0..g.len() {
        let z = g.center(idx);
        if z[0] < 2.0 * radius || z[0] > l1 + 2.0 * radius || z[1] < -0.5 * l2 || z[1] > 0.5 * l2 {
            continue;
        }
        let fluid = mask.shape.is_fluid(z);
        let tag = if z[0] <= l1 && (z[1].abs() - 0.5 * h).abs() < 1e-12 {
            Some(1)
        } else if fluid && z[0] >= ramp - radius && z[0] <= l1 - 2.0 * radius && distance_to_boundary(mask, z, 1.0) >= 1.0 {
            Some(2)
        } else if fluid && z[0] >= l1 - 2.0 * radius && z[0] <= l1 && (z[0] - l1).hypot(z[1]) >= 3.0 * radius {
            Some(3)
        } else {
            None
        };
        if let Some(t) = tag {
            if check_sliding_condition(mask, z, radius) {
                cells.push(idx);
                region.push(t);
            } else {
                rejected.push(idx);
            }
        }
    }
    let components = components_8(mask, &cells, false);
    if components != 1 {
        return Err(GeometryError::NotConnected { components });
    }
    if g.edges[1] == EdgeBc::Periodic {
        let c = components_8(mask, &cells, true);
        if c != 1 {
            return Err(GeometryError::NotConnected { components: c });
        }
    }
    Ok(SlidableSet { cells, region, rejected })
}

fn components_8(mask: &DomainMask, cells: &[usize], wrap_y: bool) -> usize {
    let g = &mask.grid;
    let mut member = vec![false; g.len()];
    for &c in cells {
        member[c] = true;
    }
    let mut seen = vec![false; g.len()];
    let mut components = 0;
    let mut queue = VecDeque::new();
    for &start in cells {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        queue.push_back(start);
        while let Some(c) = queue.pop_front() {
            let (i, j) = g.ij(c);
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let ni = i as i64 + di;
                    let mut nj = j as i64 + dj;
                    if ni < 0 || ni >= g.nx as i64 {
                        continue;
                    }
                    if nj < 0 || nj >= g.ny as i64 {
                        if !wrap_y {
                            continue;
                        }
                        nj = nj.rem_euclid(g.ny as i64);
                    }
                    let n = g.index(ni as usize, nj as usize);
                    if member[n] && !seen[n] {
                        seen[n] = true;
                        queue.push_back(n);
                    }
                }
            }
        }
    }
    components
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;

    fn omega3_mask(mirror: bool) -> (Omega3Spec, DomainMask) {
        let spec = Omega3Spec::new(3f64.sqrt() / 4.0, 4.5, 1.125);
        (spec, build_omega3(spec, 8, 0, 2, mirror).unwrap())
    }

    #[test]
    fn interior_ball_is_vacuous() {
        let period = PeriodSpec::new(vec![4.0, 4.0], 8).unwrap();
        let window = WindowSpec::periods(&period, [0, 0], [1, 1], [EdgeBc::Periodic, EdgeBc::Periodic]);
        let m = build_lattice_domain(HoleGeometry::RectHole { center: [2.0, 2.0], size: [1.0, 1.0] }, period, &window).unwrap();
        assert!(check_sliding_condition(&m, [0.5, 0.5], 0.5));
        assert_eq!(sliding_defect(&m, [0.5, 0.5], 0.5), f64::NEG_INFINITY);
    }

    #[test]
    fn exterior_ball_on_flat_side_and_at_convex_tip() {
        let period = PeriodSpec::new(vec![8.0, 8.0], 16).unwrap();
        let window = WindowSpec::periods(&period, [0, 0], [1, 1], [EdgeBc::Periodic, EdgeBc::Periodic]);
        let m = build_lattice_domain(HoleGeometry::RectHole { center: [4.0, 4.0], size: [4.0, 4.0] }, period.clone(), &window).unwrap();
        assert!(check_exterior_ball(&m, [4.0, 2.0], 1.5));
        let star = HoleGeometry::star([4.0, 4.0], 3.0, 1.0, 5);
        let m = build_lattice_domain(star.clone(), period, &window).unwrap();
        let HoleGeometry::StarHole { vertices, .. } = star else { unreachable!() };
        assert!(!check_exterior_ball(&m, vertices[0], 1.0));
    }

    #[test]
    fn omega3_channel_axis_is_slidable() {
        let (spec, m) = omega3_mask(false);
        let r = spec.radius;
        let n = 50;
        for k in 0..=n {
            let lam = 2.0 * r + (spec.ramp_start() - 3.0 * r) * k as f64 / n as f64;
            assert!(check_sliding_condition(&m, [lam, 0.0], r), "lambda = {lam}");
        }
    }

    #[test]
    fn mirrored_neck_opening_is_not_slidable() {
        let (spec, m) = omega3_mask(true);
        // in the reflected domain the channel ends abruptly at x = 0 and opens to the right
        let z = [-0.5 * spec.radius, 0.0];
        assert!(!check_sliding_condition(&m, z, spec.radius));
    }

    #[test]
    fn omega3_exterior_balls_on_ramp_side() {
        let (spec, m) = omega3_mask(false);
        let r2 = spec.radius * spec.radius;
        let a = 2.0 / (spec.eps * spec.eps);
        let b = 0.5 * spec.l1();
        for k in 0..=20 {
            let s = a + (b - a) * k as f64 / 20.0 - 1e-6;
            let x = [s, spec.profile(s)];
            assert!(check_exterior_ball(&m, x, r2), "s = {s}");
        }
    }
}
