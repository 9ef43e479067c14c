//! Scalar observables sampled along a run.

use serde::{Deserialize, Serialize};

use super::Field;
use crate::geometry::{DomainMask, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Largest `x` reached by the level set.
    Right,
    /// Smallest `x` reached by the level set.
    Left,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Probe {
    GlobalMax,
    GlobalMin,
    Mass,
    WindowMax { lo: Point, hi: Point },
    WindowMin { lo: Point, hi: Point },
    /// Extreme `x` where the column maximum of `u` crosses `level`,
    /// linearly interpolated between columns. NaN when no column reaches it.
    FrontPosition { level: f64, side: Side },
    /// Smallest, over `directions` equally spaced rays from `center`, of the
    /// farthest radius where `u >= level`. NaN when `u(center) < level`.
    RayFront { center: Point, level: f64, directions: usize },
    Value { at: Point },
}

enum Compiled {
    GlobalMax,
    GlobalMin,
    Mass(f64),
    WindowMax(Vec<usize>),
    WindowMin(Vec<usize>),
    Front { level: f64, side: Side, columns: Vec<Vec<usize>>, x0: f64, h: f64 },
    Rays { level: f64, rays: Vec<Vec<(f64, usize)>> },
    Value(Option<usize>),
}

/// Probes resolved against one mask.
pub struct ProbeSet {
    names: Vec<String>,
    compiled: Vec<Compiled>,
}

impl ProbeSet {
    pub fn new(mask: &DomainMask, probes: &[(String, Probe)]) -> Self {
        let g = &mask.grid;
        let compiled = probes
            .iter()
            .map(|(_, p)| match p {
                Probe::GlobalMax => Compiled::GlobalMax,
                Probe::GlobalMin => Compiled::GlobalMin,
                Probe::Mass => Compiled::Mass(mask.cell_area()),
                Probe::WindowMax { lo, hi } => Compiled::WindowMax(mask.cells_in_rect(*lo, *hi)),
                Probe::WindowMin { lo, hi } => Compiled::WindowMin(mask.cells_in_rect(*lo, *hi)),
                Probe::FrontPosition { level, side } => {
                    let mut columns = vec![Vec::new(); g.nx];
                    for (k, &idx) in mask.fluid_cells().iter().enumerate() {
                        columns[g.ij(idx as usize).0].push(k);
                    }
                    Compiled::Front { level: *level, side: *side, columns, x0: g.lower()[0] + 0.5 * g.h, h: g.h }
                }
                Probe::RayFront { center, level, directions } => {
                    let lo = g.lower();
                    let hi = g.upper();
                    let reach = (hi[0] - lo[0]).hypot(hi[1] - lo[1]);
                    let step = 0.5 * g.h;
                    let rays = (0..*directions)
                        .map(|d| {
                            let a = std::f64::consts::TAU * d as f64 / *directions as f64;
                            let e = [a.cos(), a.sin()];
                            let mut ray = Vec::new();
                            let mut r = 0.0;
                            while r <= reach {
                                let p = [center[0] + r * e[0], center[1] + r * e[1]];
                                if let Some(k) = g.locate(p).and_then(|i| mask.fluid_index(i)) {
                                    ray.push((r, k));
                                }
                                r += step;
                            }
                            ray
                        })
                        .collect();
                    Compiled::Rays { level: *level, rays }
                }
                Probe::Value { at } => Compiled::Value(g.locate(*at).and_then(|i| mask.fluid_index(i))),
            })
            .collect();
        Self { names: probes.iter().map(|(n, _)| n.clone()).collect(), compiled }
    }

    pub fn names(&self) -> Vec<String> {
        self.names.clone()
    }

    pub fn sample(&self, u: &Field) -> Vec<f64> {
        let v = &u.values;
        let fold = |cells: &[usize], init: f64, op: fn(f64, f64) -> f64| {
            if cells.is_empty() {
                f64::NAN
            } else {
                cells.iter().map(|&k| v[k]).fold(init, op)
            }
        };
        self.compiled
            .iter()
            .map(|c| match c {
                Compiled::GlobalMax => u.max(),
                Compiled::GlobalMin => u.min(),
                Compiled::Mass(area) => v.iter().sum::<f64>() * area,
                Compiled::WindowMax(cells) => fold(cells, f64::NEG_INFINITY, f64::max),
                Compiled::WindowMin(cells) => fold(cells, f64::INFINITY, f64::min),
                Compiled::Front { level, side, columns, x0, h } => {
                    let colmax: Vec<f64> = columns
                        .iter()
                        .map(|c| c.iter().map(|&k| v[k]).fold(f64::NAN, f64::max))
                        .collect();
                    front_crossing(&colmax, *level, *side, *x0, *h)
                }
                Compiled::Rays { level, rays } => {
                    let mut best = f64::INFINITY;
                    for ray in rays {
                        let Some(first) = ray.first() else { continue };
                        if v[first.1] < *level {
                            return f64::NAN;
                        }
                        let last = ray.iter().rposition(|&(_, k)| v[k] >= *level).unwrap();
                        let (r0, k0) = ray[last];
                        let r = match ray.get(last + 1) {
                            Some(&(r1, k1)) => r0 + (r1 - r0) * (v[k0] - level) / (v[k0] - v[k1]),
                            None => r0,
                        };
                        best = best.min(r);
                    }
                    if best.is_finite() {
                        best
                    } else {
                        f64::NAN
                    }
                }
                Compiled::Value(k) => k.map_or(f64::NAN, |k| v[k]),
            })
            .collect()
    }
}

/// Level crossing of column maxima (`NaN` marks all-solid columns).
pub fn front_crossing(colmax: &[f64], level: f64, side: Side, x0: f64, h: f64) -> f64 {
    let n = colmax.len();
    let above = |i: usize| colmax[i] >= level;
    let found = match side {
        Side::Right => (0..n).rev().find(|&i| above(i)),
        Side::Left => (0..n).find(|&i| above(i)),
    };
    let Some(i) = found else { return f64::NAN };
    let next = match side {
        Side::Right => (i + 1 < n).then_some(i + 1),
        Side::Left => i.checked_sub(1),
    };
    let xi = x0 + i as f64 * h;
    match next {
        Some(j) if !colmax[j].is_nan() => {
            let frac = (colmax[i] - level) / (colmax[i] - colmax[j]);
            let dir = if side == Side::Right { 1.0 } else { -1.0 };
            xi + dir * h * frac
        }
        _ => xi,
    }
}

/// Probe time series, one row per record time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub names: Vec<String>,
    pub times: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    /// `(time, values)` full-field snapshots.
    #[serde(skip)]
    pub snapshots: Vec<(f64, Vec<f64>)>,
    /// Nominal time step.
    pub dt: f64,
}

impl Trajectory {
    pub fn new(names: Vec<String>, dt: f64) -> Self {
        Self { names, times: Vec::new(), rows: Vec::new(), snapshots: Vec::new(), dt }
    }

    pub fn record(&mut self, t: f64, row: Vec<f64>) {
        self.times.push(t);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.names.iter().position(|n| n == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}
