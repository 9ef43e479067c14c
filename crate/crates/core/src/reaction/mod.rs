//! Nonlinearities `f(x, s)`, their primitives and derived scalars.

mod minorant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{DomainMask, Point};

pub use minorant::{make_combustion_minorant, make_front_minorant, ShiftedMinorant};

#[derive(Debug, Error)]
pub enum ReactionError {
    #[error("invalid nonlinearity: {0}")]
    Invalid(String),
    #[error("eps = {eps} leaves no room above theta = {theta}")]
    EpsTooLarge { eps: f64, theta: f64 },
    #[error("minorant is not positively unbalanced (integral {integral})")]
    NotUnbalanced { integral: f64 },
    #[error("cannot parse tabulated nonlinearity at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReactionKind {
    Monostable,
    Combustion,
    Bistable,
    Custom,
}

/// Closed-form families. All vanish at `s = 0` and `s = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Nonlinearity {
    /// `scale · s (1 - s)(s - theta)`.
    Cubic { theta: f64, scale: f64 },
    /// `scale · s (1 - s)`.
    Kpp { scale: f64 },
    /// `scale · (s - ignition)₊ (1 - s)`.
    Combustion { ignition: f64, scale: f64 },
    /// Zero on `[0, a]`, linear up to `height` on `[a, b]`, flat on `[b, c]`,
    /// linear down to 0 on `[c, 1]`.
    Trapezoid { a: f64, b: f64, c: f64, height: f64 },
    /// Cubic with a threshold oscillating in space:
    /// `theta(x) = mid + amp · cos(2π x₁/p₁) cos(2π x₂/p₂)`.
    PeriodicCubic { theta_min: f64, theta_max: f64, period: Point, scale: f64 },
    /// Piecewise-linear interpolation of `(s, f)` knots covering `[0, 1]`.
    PiecewiseLinear { knots: Vec<Point> },
}

impl Nonlinearity {
    pub fn cubic(theta: f64) -> Self {
        Nonlinearity::Cubic { theta, scale: 1.0 }
    }

    pub fn is_homogeneous(&self) -> bool {
        !matches!(self, Nonlinearity::PeriodicCubic { .. })
    }

    fn local_theta(theta_min: f64, theta_max: f64, period: Point, x: Point) -> f64 {
        let mid = 0.5 * (theta_min + theta_max);
        let amp = 0.5 * (theta_max - theta_min);
        let tau = 2.0 * std::f64::consts::PI;
        let cy = if period[1].is_finite() { (tau * x[1] / period[1]).cos() } else { 1.0 };
        mid + amp * (tau * x[0] / period[0]).cos() * cy
    }

    /// The nonlinearity with `x` frozen.
    pub fn local(&self, x: Point) -> Local {
        match self {
            Nonlinearity::Cubic { theta, scale } => Local::Cubic { theta: *theta, scale: *scale },
            Nonlinearity::Kpp { scale } => Local::Kpp { scale: *scale },
            Nonlinearity::Combustion { ignition, scale } => Local::Combustion { ignition: *ignition, scale: *scale },
            Nonlinearity::Trapezoid { a, b, c, height } => Local::Trapezoid { a: *a, b: *b, c: *c, height: *height },
            Nonlinearity::PeriodicCubic { theta_min, theta_max, period, scale } => Local::Cubic {
                theta: Self::local_theta(*theta_min, *theta_max, *period, x),
                scale: *scale,
            },
            Nonlinearity::PiecewiseLinear { .. } => Local::Table(self.clone()),
        }
    }

    /// Value on `[0, 1]` (no extension).
    pub fn value(&self, x: Point, s: f64) -> f64 {
        match self {
            Nonlinearity::PiecewiseLinear { knots } => interpolate(knots, s),
            _ => self.local(x).core(s),
        }
    }

    /// `min_x f(x, s)` on `[0, 1]`.
    pub fn min_over_x(&self, s: f64) -> f64 {
        match self {
            Nonlinearity::PeriodicCubic { theta_max, scale, .. } => scale * s * (1.0 - s) * (s - theta_max),
            _ => self.value([0.0, 0.0], s),
        }
    }

    /// `max_x f(x, s)` on `[0, 1]`.
    pub fn max_over_x(&self, s: f64) -> f64 {
        match self {
            Nonlinearity::PeriodicCubic { theta_min, scale, .. } => scale * s * (1.0 - s) * (s - theta_min),
            _ => self.value([0.0, 0.0], s),
        }
    }

    /// Period of the x-dependence, if any.
    pub fn period(&self) -> Option<Point> {
        match self {
            Nonlinearity::PeriodicCubic { period, .. } => Some(*period),
            _ => None,
        }
    }

    fn validate(&self) -> Result<(), ReactionError> {
        let bad = |m: String| Err(ReactionError::Invalid(m));
        match self {
            Nonlinearity::Cubic { theta, scale } => {
                if !(0.0..1.0).contains(theta) || !(*scale > 0.0) {
                    return bad(format!("cubic needs theta in [0,1) and scale > 0, got {theta}, {scale}"));
                }
            }
            Nonlinearity::Kpp { scale } => {
                if !(*scale > 0.0) {
                    return bad("kpp scale must be positive".into());
                }
            }
            Nonlinearity::Combustion { ignition, scale } => {
                if !(0.0..1.0).contains(ignition) || !(*scale > 0.0) {
                    return bad("combustion needs ignition in [0,1) and scale > 0".into());
                }
            }
            Nonlinearity::Trapezoid { a, b, c, height } => {
                if !(0.0 <= *a && a < b && b <= c && *c < 1.0 && *height > 0.0) {
                    return bad(format!("trapezoid needs 0 <= a < b <= c < 1 and height > 0: {a} {b} {c} {height}"));
                }
            }
            Nonlinearity::PeriodicCubic { theta_min, theta_max, period, scale } => {
                if !(0.0 <= *theta_min && theta_min <= theta_max && *theta_max < 1.0) || !(*scale > 0.0) {
                    return bad("periodic cubic needs 0 <= theta_min <= theta_max < 1".into());
                }
                if !(period[0] > 0.0) || !(period[1] > 0.0) {
                    return bad("periodic cubic needs positive periods".into());
                }
            }
            Nonlinearity::PiecewiseLinear { knots } => {
                if knots.len() < 2 {
                    return bad("need at least two knots".into());
                }
                if knots.windows(2).any(|w| !(w[1][0] > w[0][0])) {
                    return bad("knots must be strictly increasing in s".into());
                }
                let (first, last) = (knots[0], knots[knots.len() - 1]);
                if first[0] > 0.0 || last[0] < 1.0 {
                    return bad("knots must cover [0, 1]".into());
                }
            }
        }
        Ok(())
    }
}

fn interpolate(knots: &[Point], s: f64) -> f64 {
    let k = knots.partition_point(|p| p[0] <= s);
    if k == 0 {
        return knots[0][1];
    }
    if k == knots.len() {
        return knots[k - 1][1];
    }
    let (a, b) = (knots[k - 1], knots[k]);
    a[1] + (b[1] - a[1]) * (s - a[0]) / (b[0] - a[0])
}

fn interpolate_primitive(knots: &[Point], s: f64) -> f64 {
    let mut acc = 0.0;
    let mut prev = [0.0, interpolate(knots, 0.0)];
    for p in knots.iter().filter(|p| p[0] > 0.0) {
        if p[0] >= s {
            let v = interpolate(knots, s);
            return acc + 0.5 * (prev[1] + v) * (s - prev[0]);
        }
        acc += 0.5 * (prev[1] + p[1]) * (p[0] - prev[0]);
        prev = *p;
    }
    acc + prev[1] * (s - prev[0])
}

/// A nonlinearity with its spatial variable frozen; the cheap form used
/// inside time steppers.
#[derive(Debug, Clone, PartialEq)]
pub enum Local {
    Cubic { theta: f64, scale: f64 },
    Kpp { scale: f64 },
    Combustion { ignition: f64, scale: f64 },
    Trapezoid { a: f64, b: f64, c: f64, height: f64 },
    Table(Nonlinearity),
}

impl Local {
    #[inline]
    pub fn core(&self, s: f64) -> f64 {
        match self {
            Local::Cubic { theta, scale } => scale * s * (1.0 - s) * (s - theta),
            Local::Kpp { scale } => scale * s * (1.0 - s),
            Local::Combustion { ignition, scale } => scale * (s - ignition).max(0.0) * (1.0 - s),
            Local::Trapezoid { a, b, c, height } => {
                if s <= *a {
                    0.0
                } else if s < *b {
                    height * (s - a) / (b - a)
                } else if s <= *c {
                    *height
                } else {
                    height * (1.0 - s) / (1.0 - c)
                }
            }
            Local::Table(Nonlinearity::PiecewiseLinear { knots }) => interpolate(knots, s),
            Local::Table(_) => unreachable!("only tables are stored by value"),
        }
    }

    /// `∫₀^s f` for `s ∈ [0, 1]`.
    pub fn core_primitive(&self, s: f64) -> f64 {
        match self {
            Local::Cubic { theta, scale } => {
                // s(1-s)(s-θ) = -s³ + (1+θ)s² - θs
                scale * (-s.powi(4) / 4.0 + (1.0 + theta) * s.powi(3) / 3.0 - theta * s * s / 2.0)
            }
            Local::Kpp { scale } => scale * (s * s / 2.0 - s.powi(3) / 3.0),
            Local::Combustion { ignition, scale } => {
                if s <= *ignition {
                    0.0
                } else {
                    // ∫_ϑ^s (r-ϑ)(1-r) dr
                    let p = |r: f64| -r.powi(3) / 3.0 + (1.0 + ignition) * r * r / 2.0 - ignition * r;
                    scale * (p(s) - p(*ignition))
                }
            }
            Local::Trapezoid { a, b, c, height } => {
                let mut acc = 0.0;
                if s > *a {
                    let t = s.min(*b);
                    acc += height * (t - a) * (t - a) / (2.0 * (b - a));
                }
                if s > *b {
                    acc += height * (s.min(*c) - b);
                }
                if s > *c {
                    // ∫_c^t (1-r)/(1-c) dr = ((1-c)² - (1-t)²) / (2(1-c))
                    let t = s.min(1.0);
                    acc += height * ((1.0 - c).powi(2) - (1.0 - t).powi(2)) / (2.0 * (1.0 - c));
                }
                acc
            }
            Local::Table(Nonlinearity::PiecewiseLinear { knots }) => interpolate_primitive(knots, s),
            Local::Table(_) => unreachable!("only tables are stored by value"),
        }
    }
}

/// A nonlinearity with its derived data and the extension outside `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reaction {
    pub nl: Nonlinearity,
    /// Lipschitz bound of `s ↦ f(x, s)`, also the slope of the extension.
    pub lipschitz: f64,
    pub kind: ReactionKind,
    /// Threshold of a closed-form cubic.
    pub theta_param: Option<f64>,
    /// Whether `f` depends on `x`.
    pub periodic: bool,
}

const LIP_SAMPLES: usize = 4000;

impl Reaction {
    pub fn new(nl: Nonlinearity) -> Result<Self, ReactionError> {
        nl.validate()?;
        let periodic = !nl.is_homogeneous();
        let xs = sample_points(&nl);
        let mut lip: f64 = 0.0;
        for x in &xs {
            let loc = nl.local(*x);
            let mut prev = loc.core(0.0);
            for k in 1..=LIP_SAMPLES {
                let s = k as f64 / LIP_SAMPLES as f64;
                let v = loc.core(s);
                lip = lip.max((v - prev).abs() * LIP_SAMPLES as f64);
                prev = v;
            }
            if loc.core(0.0).abs() > 1e-12 || loc.core(1.0).abs() > 1e-12 {
                return Err(ReactionError::Invalid(format!("f(x,0) or f(x,1) is not zero at x = {x:?}")));
            }
        }
        // Sampled difference quotients underestimate the supremum slightly.
        let lipschitz = lip * (1.0 + 1e-3);
        let theta_param = match &nl {
            Nonlinearity::Cubic { theta, .. } => Some(*theta),
            _ => None,
        };
        let kind = classify_kind(&|s| nl.min_over_x(s));
        if nl.min_over_x(1.0 - 1e-4) <= 0.0 {
            return Err(ReactionError::Invalid("f must be positive just below 1".into()));
        }
        Ok(Self { nl, lipschitz, kind, theta_param, periodic })
    }

    pub fn cubic(theta: f64) -> Self {
        Self::new(Nonlinearity::cubic(theta)).expect("valid cubic")
    }

    /// `f ≡ 0` (pure diffusion). Bypasses the positivity check of [`Reaction::new`].
    pub fn zero() -> Self {
        Self {
            nl: Nonlinearity::PiecewiseLinear { knots: vec![[0.0, 0.0], [1.0, 0.0]] },
            lipschitz: 0.0,
            kind: ReactionKind::Custom,
            theta_param: None,
            periodic: false,
        }
    }

    /// `f(x, s)` with the Lipschitz extension outside `[0, 1]`.
    pub fn eval(&self, x: Point, s: f64) -> f64 {
        extend(s, self.lipschitz, |r| self.nl.value(x, r))
    }

    pub fn local(&self, x: Point) -> LocalReaction {
        LocalReaction { core: self.nl.local(x), lipschitz: self.lipschitz }
    }

    /// `min_x f(x, s)`, extended outside `[0, 1]`.
    pub fn min_over_x(&self, s: f64) -> f64 {
        extend(s, self.lipschitz, |r| self.nl.min_over_x(r))
    }

    pub fn max_over_x(&self, s: f64) -> f64 {
        extend(s, self.lipschitz, |r| self.nl.max_over_x(r))
    }

    /// Primitive `F(x, s) = ∫₀^s f(x, r) dr`.
    pub fn primitive(&self, x: Point, s: f64) -> f64 {
        self.local(x).primitive(s)
    }

    /// Value range `[min f, max f]` over `s ∈ [0,1]` and sampled `x`.
    pub fn range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for k in 0..=1000 {
            let s = k as f64 / 1000.0;
            lo = lo.min(self.nl.min_over_x(s));
            hi = hi.max(self.nl.max_over_x(s));
        }
        (lo, hi)
    }
}

fn sample_points(nl: &Nonlinearity) -> Vec<Point> {
    match nl.period() {
        None => vec![[0.0, 0.0]],
        Some(p) => {
            let n = 16;
            let mut xs = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    let py = if p[1].is_finite() { p[1] } else { 1.0 };
                    xs.push([p[0] * i as f64 / n as f64, py * j as f64 / n as f64]);
                }
            }
            xs
        }
    }
}

#[inline]
fn extend(s: f64, lip: f64, core: impl Fn(f64) -> f64) -> f64 {
    if s > 1.0 {
        -lip * (s - 1.0)
    } else if s < 0.0 {
        lip * s
    } else {
        core(s)
    }
}

/// Frozen-`x` reaction with the extension applied.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalReaction {
    pub core: Local,
    pub lipschitz: f64,
}

impl LocalReaction {
    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        if s > 1.0 {
            -self.lipschitz * (s - 1.0)
        } else if s < 0.0 {
            self.lipschitz * s
        } else {
            self.core.core(s)
        }
    }

    pub fn primitive(&self, s: f64) -> f64 {
        if s > 1.0 {
            self.core.core_primitive(1.0) - 0.5 * self.lipschitz * (s - 1.0) * (s - 1.0)
        } else if s < 0.0 {
            0.5 * self.lipschitz * s * s
        } else {
            self.core.core_primitive(s)
        }
    }
}

fn classify_kind(g: &dyn Fn(f64) -> f64) -> ReactionKind {
    let n = 2000;
    let vals: Vec<f64> = (1..n).map(|k| g(k as f64 / n as f64)).collect();
    let tol = 1e-14;
    if vals.iter().all(|v| *v > tol) {
        return ReactionKind::Monostable;
    }
    // first index where g becomes positive for good
    let last_nonpos = vals.iter().rposition(|v| *v <= tol).unwrap();
    let head = &vals[..=last_nonpos];
    if vals[last_nonpos + 1..].iter().all(|v| *v > tol) {
        if head.iter().all(|v| v.abs() <= tol) {
            return ReactionKind::Combustion;
        }
        if head.iter().all(|v| *v <= tol) && head.iter().any(|v| *v < -tol) {
            return ReactionKind::Bistable;
        }
    }
    ReactionKind::Custom
}

/// Parses two-column CSV `s,f` (header lines starting with a letter or `#` are skipped).
pub fn parse_tabulated(text: &str) -> Result<Nonlinearity, ReactionError> {
    let mut knots = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.chars().next().is_some_and(|c| c.is_alphabetic()) {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 2 {
            return Err(ReactionError::Parse { line: n + 1, msg: format!("expected 2 columns, got {}", cols.len()) });
        }
        let parse = |c: &str| c.parse::<f64>().map_err(|e| ReactionError::Parse { line: n + 1, msg: e.to_string() });
        knots.push([parse(cols[0])?, parse(cols[1])?]);
    }
    let nl = Nonlinearity::PiecewiseLinear { knots };
    nl.validate()?;
    Ok(nl)
}

/// Result of the threshold search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaEstimate {
    pub theta: f64,
    /// Set when `min_x f > 0` on all sampled points of `(0, 1)`; `theta` is then 0.
    pub no_zero_found: bool,
    /// Change of the estimate when the scan step is halved.
    pub refinement_change: f64,
}

fn theta_scan(g: &dyn Fn(f64) -> f64, step: f64) -> (f64, bool) {
    let n = (1.0 / step).round() as usize;
    let mut last = None;
    for k in 0..n {
        let s = k as f64 / n as f64;
        if g(s) <= 0.0 {
            last = Some(k);
        }
    }
    let k = last.unwrap_or(0);
    if k == 0 && (1..n).all(|j| g(j as f64 / n as f64) > 0.0) {
        return (0.0, true);
    }
    let (mut a, mut b) = (k as f64 / n as f64, (k + 1) as f64 / n as f64);
    let tol = step * 1e-3;
    while b - a > tol {
        let m = 0.5 * (a + b);
        if g(m) <= 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    (a, false)
}

/// Largest zero of `min_x f(x, ·)` in `[0, 1)`, found by a sign scan at
/// `grid_step` and bisection to `grid_step·1e-3`.
pub fn compute_theta(f: &Reaction, grid_step: f64) -> ThetaEstimate {
    let g = |s: f64| f.nl.min_over_x(s);
    let (theta, no_zero) = theta_scan(&g, grid_step);
    let (fine, _) = theta_scan(&g, 0.5 * grid_step);
    ThetaEstimate { theta, no_zero_found: no_zero, refinement_change: (fine - theta).abs() }
}

/// Largest rectangle under the graph of `g = min_x f(x, ·)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectangleEstimate {
    pub area: f64,
    /// Argmax interval `[K, H]`.
    pub lower: f64,
    pub upper: f64,
    /// Area at half the step.
    pub refined_area: f64,
    /// Whether the halved step changed the area by less than 1%.
    pub converged: bool,
}

/// Monotone-stack largest rectangle over `g` sampled at `s_i = i·step`,
/// `i = 1..n-1`. Returns `(area, i, j)`.
pub fn largest_rectangle(values: &[f64], step: f64) -> (f64, usize, usize) {
    let n = values.len();
    let mut left = vec![0usize; n];
    let mut right = vec![n - 1; n];
    let mut stack: Vec<usize> = Vec::with_capacity(n);
    for k in 0..n {
        while let Some(&t) = stack.last() {
            if values[t] >= values[k] {
                stack.pop();
            } else {
                break;
            }
        }
        left[k] = stack.last().map_or(0, |&t| t + 1);
        stack.push(k);
    }
    stack.clear();
    for k in (0..n).rev() {
        while let Some(&t) = stack.last() {
            if values[t] >= values[k] {
                stack.pop();
            } else {
                break;
            }
        }
        right[k] = stack.last().map_or(n - 1, |&t| t - 1);
        stack.push(k);
    }
    let mut best = (0.0, 0, 0);
    for k in 0..n {
        let area = values[k] * ((right[k] - left[k]) as f64 * step);
        if area > best.0 {
            best = (area, left[k], right[k]);
        }
    }
    best
}

/// Quadratic reference scan used to validate [`largest_rectangle`].
pub fn largest_rectangle_brute(values: &[f64], step: f64) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..values.len() {
        let mut m = f64::INFINITY;
        for j in i..values.len() {
            m = m.min(values[j]);
            best = best.max(m * ((j - i) as f64 * step));
        }
    }
    best
}

fn rectangle_at(g: &dyn Fn(f64) -> f64, s_step: f64) -> (f64, f64, f64) {
    let n = (1.0 / s_step).round() as usize;
    let step = 1.0 / n as f64;
    let values: Vec<f64> = (1..n).map(|i| g(i as f64 * step)).collect();
    let (area, i, j) = largest_rectangle(&values, step);
    (area, (i + 1) as f64 * step, (j + 1) as f64 * step)
}

/// `R(f) = sup_{0<K<H<1} (H - K) min_{[K,H]} min_x f`, on an `s_step` grid.
pub fn compute_r(f: &Reaction, s_step: f64) -> RectangleEstimate {
    let g = |s: f64| f.nl.min_over_x(s);
    let (area, lower, upper) = rectangle_at(&g, s_step);
    let (refined, _, _) = rectangle_at(&g, 0.5 * s_step);
    let converged = area <= 0.0 || (refined - area).abs() < 0.01 * area;
    RectangleEstimate { area, lower, upper, refined_area: refined, converged }
}

/// `∫_C ∫₀¹ f(x, s) ds dx` by midpoint quadrature over the fluid cells of the
/// first period cell of the window and 200 midpoints in `s`.
pub fn check_mean_positive(f: &Reaction, mask: &DomainMask) -> f64 {
    let lo = mask.grid.lower();
    let dim = mask.dim();
    let l0 = mask.period.length(0);
    let l1 = mask.period.length(1);
    let hi = [
        if l0.is_finite() { lo[0] + l0 } else { f64::INFINITY },
        if l1.is_finite() && dim == 2 { lo[1] + l1 } else { f64::INFINITY },
    ];
    let ns = 200;
    let area = mask.cell_area();
    let mut total = 0.0;
    for k in 0..mask.n_fluid() {
        let c = mask.fluid_center(k);
        if c[0] >= hi[0] || (dim == 2 && c[1] >= hi[1]) {
            continue;
        }
        let loc = f.nl.local(c);
        let sum: f64 = (0..ns).map(|j| loc.core((j as f64 + 0.5) / ns as f64)).sum();
        total += sum / ns as f64 * area;
    }
    total
}

/// Checks `F(x, s) < F(x, 1)` for `s ∈ [0, 1)` at sampled `x` and `s`.
pub fn check_strict_primitive_gap(f: &Reaction, xs: &[Point], ns: usize) -> bool {
    xs.iter().all(|x| {
        let loc = f.local(*x);
        let top = loc.primitive(1.0);
        (0..ns).all(|k| loc.primitive(k as f64 / ns as f64) < top)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnvelopeSide {
    Min,
    Max,
}

/// RK4 trajectory of `z' = min_x f(x, z)` (or `max_x`), as `(t, z)` pairs.
pub fn ode_envelope(f: &Reaction, z0: f64, t_end: f64, dt: f64, side: EnvelopeSide) -> Vec<(f64, f64)> {
    let rhs = |z: f64| match side {
        EnvelopeSide::Min => f.min_over_x(z),
        EnvelopeSide::Max => f.max_over_x(z),
    };
    let n = (t_end / dt).ceil().max(1.0) as usize;
    let h = t_end / n as f64;
    let mut out = Vec::with_capacity(n + 1);
    let mut z = z0;
    out.push((0.0, z));
    for k in 1..=n {
        let k1 = rhs(z);
        let k2 = rhs(z + 0.5 * h * k1);
        let k3 = rhs(z + 0.5 * h * k2);
        let k4 = rhs(z + h * k3);
        z += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push((k as f64 * h, z));
    }
    out
}

#[cfg(test)]
mod tests;
