//! Positive radial solutions of `−Δu = g(u)` in `B_R`, `u = 0` on `∂B_R`,
//! with `g = min_x f`.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::StationaryError;
use crate::geometry::{DomainMask, Point};
use crate::reaction::{compute_theta, Reaction};
use crate::solver::{Coefficients, Field, Scheme, Stepper};

/// Below this `w = 1 − u` the reaction is replaced by its linearization at 1.
const LINEAR_ZONE: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub radius: f64,
    pub dim: usize,
    pub dr: f64,
    /// `u(i dr)` for `i = 0..=n`, last entry at `r = R`.
    pub samples: Vec<f64>,
    /// `1 − u` at the same radii, kept separately since it is resolved
    /// where `u` rounds to 1.
    pub deficit: Vec<f64>,
    pub center_value: f64,
    /// `min` over the closed unit ball, `u(min(1, R))`.
    pub inner_min: f64,
    /// `u(0)`.
    pub center_min: f64,
}

impl RadialSolution {
    /// Linear interpolation, 0 for `r >= R`.
    pub fn eval(&self, r: f64) -> f64 {
        if r >= self.radius {
            return 0.0;
        }
        let x = r.max(0.0) / self.dr;
        let i = (x.floor() as usize).min(self.samples.len() - 2);
        let t = x - i as f64;
        self.samples[i] * (1.0 - t) + self.samples[i + 1] * t
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.deficit.windows(2).all(|w| w[1] > w[0])
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut s = String::from("r,u\n");
        for (i, v) in self.samples.iter().enumerate() {
            s.push_str(&format!("{},{}\n", i as f64 * self.dr, v));
        }
        std::fs::write(path, s)
    }
}

struct Shooter<'a> {
    f: &'a Reaction,
    dim: usize,
    /// `f'(1)` (one-sided difference), used in the linear zone.
    slope_at_one: f64,
}

enum Shot {
    /// `u` reached 0 before `R`.
    Touchdown,
    /// `u` stayed positive up to `R`.
    Positive,
}

impl<'a> Shooter<'a> {
    fn new(f: &'a Reaction, dim: usize) -> Self {
        let e = 1e-6;
        let slope_at_one = (f.min_over_x(1.0) - f.min_over_x(1.0 - e)) / e;
        Self { f, dim, slope_at_one }
    }

    /// `g(1 − w)`.
    fn g_w(&self, w: f64) -> f64 {
        if w < LINEAR_ZONE {
            -self.slope_at_one * w
        } else {
            self.f.min_over_x(1.0 - w)
        }
    }

    /// `w'' + (N−1)/r w' = g(1 − w)` as a first-order system.
    fn rhs(&self, r: f64, y: [f64; 2]) -> [f64; 2] {
        [y[1], self.g_w(y[0]) - (self.dim as f64 - 1.0) / r * y[1]]
    }

    /// Integrates from `w(0) = delta` to `r = radius`, optionally recording `w`.
    fn shoot(&self, delta: f64, radius: f64, n: usize, mut record: Option<&mut Vec<f64>>) -> Shot {
        let dr = radius / n as f64;
        // series start: w ≈ δ + g(1−δ) r² / (2N)
        let g0 = self.g_w(delta);
        let nn = self.dim as f64;
        if let Some(rec) = record.as_deref_mut() {
            rec.clear();
            rec.push(delta);
        }
        let mut r = dr;
        let mut y = [delta + g0 * r * r / (2.0 * nn), g0 * r / nn];
        if let Some(rec) = record.as_deref_mut() {
            rec.push(y[0]);
        }
        if y[0] >= 1.0 {
            return Shot::Touchdown;
        }
        for _ in 1..n {
            let k1 = self.rhs(r, y);
            let k2 = self.rhs(r + 0.5 * dr, [y[0] + 0.5 * dr * k1[0], y[1] + 0.5 * dr * k1[1]]);
            let k3 = self.rhs(r + 0.5 * dr, [y[0] + 0.5 * dr * k2[0], y[1] + 0.5 * dr * k2[1]]);
            let k4 = self.rhs(r + dr, [y[0] + dr * k3[0], y[1] + dr * k3[1]]);
            y[0] += dr / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
            y[1] += dr / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
            r += dr;
            if let Some(rec) = record.as_deref_mut() {
                rec.push(y[0]);
            }
            if y[0] >= 1.0 {
                return Shot::Touchdown;
            }
        }
        Shot::Positive
    }
}

fn radial_steps(radius: f64) -> usize {
    ((radius / 0.005).ceil() as usize).max(4000)
}

/// Positive decreasing solution close to 1 (the one bifurcating from the
/// upper state), by log-bisection on `1 − u(0)`.
pub fn solve_radial_dirichlet(f: &Reaction, radius: f64, dim: usize) -> Result<RadialSolution, StationaryError> {
    solve_radial_dirichlet_with(f, radius, dim, radial_steps(radius))
}

pub fn solve_radial_dirichlet_with(f: &Reaction, radius: f64, dim: usize, n: usize) -> Result<RadialSolution, StationaryError> {
    if !(radius > 0.0) || !(1..=3).contains(&dim) {
        return Err(StationaryError::Invalid(format!("radius {radius}, dimension {dim}")));
    }
    let theta = compute_theta(f, 1e-3).theta;
    let sh = Shooter::new(f, dim);
    let touches = |delta: f64| matches!(sh.shoot(delta, radius, n, None), Shot::Touchdown);
    // scan log δ upwards from a tiny offset: first touchdown brackets the solution
    let lo_exp = -300.0_f64;
    let hi = 1.0 - theta;
    let scan = 600;
    let mut bracket = None;
    let mut prev = lo_exp;
    if touches(10f64.powf(lo_exp)) {
        return Err(StationaryError::NoPositiveSolution { radius });
    }
    for i in 1..=scan {
        let e = lo_exp + (hi.log10() - lo_exp) * i as f64 / scan as f64;
        let d = 10f64.powf(e).min(hi * (1.0 - 1e-9));
        if touches(d) {
            bracket = Some((prev, d.log10()));
            break;
        }
        prev = e;
    }
    let (mut a, mut b) = bracket.ok_or(StationaryError::NoPositiveSolution { radius })?;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if touches(10f64.powf(m)) {
            b = m;
        } else {
            a = m;
        }
    }
    let mut w = Vec::with_capacity(n + 1);
    sh.shoot(10f64.powf(a), radius, n, Some(&mut w));
    w.resize(n + 1, 1.0);
    let samples: Vec<f64> = w.iter().map(|w| (1.0 - w).max(0.0)).collect();
    let dr = radius / n as f64;
    let sol = RadialSolution {
        radius,
        dim,
        dr,
        center_value: samples[0],
        inner_min: 0.0,
        center_min: samples[0],
        samples,
        deficit: w,
    };
    let inner_min = sol.eval(1.0_f64.min(radius));
    Ok(RadialSolution { inner_min, ..sol })
}

/// Smallest `R` (doubling, then bisection to relative `1e-3`) with
/// `min_{[0, r]} u_R > eta`.
pub fn find_min_r(f: &Reaction, eta: f64, r: f64, dim: usize) -> Result<f64, StationaryError> {
    let theta = compute_theta(f, 1e-3).theta;
    if !(eta > theta && eta < 1.0) {
        return Err(StationaryError::Invalid(format!("eta = {eta} must lie in (θ, 1) = ({theta}, 1)")));
    }
    let ok = |big_r: f64| -> bool {
        if big_r <= r {
            return false;
        }
        match solve_radial_dirichlet(f, big_r, dim) {
            Ok(s) => s.eval(r) > eta,
            Err(_) => false,
        }
    };
    let mut lo = r.max(0.0);
    let mut hi = (2.0 * r).max(1.0);
    while !ok(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > 1e4 {
            return Err(StationaryError::NoPositiveSolution { radius: hi });
        }
    }
    while hi - lo > 1e-3 * hi {
        let m = 0.5 * (lo + hi);
        if ok(m) {
            hi = m;
        } else {
            lo = m;
        }
    }
    Ok(hi)
}

/// Radial parabolic run on `B_{R'}` with zero Dirichlet data, started from
/// the discrete steady state on `B_R` extended by 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallEvolution {
    pub outer_radius: f64,
    pub times: Vec<f64>,
    /// `min` over `B_{R'−R}` at each record time.
    pub inner_min: Vec<f64>,
    pub center_min: f64,
    pub monotone_in_time: bool,
    pub radially_decreasing: bool,
    pub final_profile: Vec<f64>,
    /// `inner_min` at the last time exceeds `center_min`.
    pub exceeds_center_value: bool,
}

/// Finite-volume radial operator on cells `[i dr, (i+1) dr]` with a zero
/// Dirichlet ghost at `r = R`.
struct RadialFv {
    /// Face weights towards `i−1` and `i+1`.
    wm: Vec<f64>,
    wp: Vec<f64>,
}

impl RadialFv {
    fn new(n: usize, dr: f64, dim: usize) -> Self {
        let p = dim as i32 - 1;
        let vol = |i: usize| ((i as f64 + 1.0) * dr).powi(p + 1) - (i as f64 * dr).powi(p + 1);
        let area = |i: usize| (i as f64 * dr).powi(p);
        let mut wm = vec![0.0; n];
        let mut wp = vec![0.0; n];
        for i in 0..n {
            let v = vol(i) / (p + 1) as f64;
            wm[i] = if i == 0 { 0.0 } else { area(i) / (dr * v) };
            // last face: Dirichlet 0 at distance dr/2
            wp[i] = if i + 1 == n { 2.0 * area(i + 1) / (dr * v) } else { area(i + 1) / (dr * v) };
        }
        Self { wm, wp }
    }

    fn apply(&self, u: &[f64], i: usize) -> f64 {
        let n = u.len();
        let left = if i == 0 { 0.0 } else { self.wm[i] * (u[i - 1] - u[i]) };
        let right = if i + 1 == n { -self.wp[i] * u[i] } else { self.wp[i] * (u[i + 1] - u[i]) };
        left + right
    }

    fn max_rate(&self) -> f64 {
        self.wm.iter().zip(&self.wp).map(|(a, b)| a + b).fold(0.0, f64::max)
    }
}

/// Newton iteration for the discrete steady state on `n` radial cells.
fn discrete_steady(f: &Reaction, init: &[f64], fv: &RadialFv) -> Vec<f64> {
    let n = init.len();
    let mut u = init.to_vec();
    let g = |s: f64| f.min_over_x(s);
    for _ in 0..50 {
        let res: Vec<f64> = (0..n).map(|i| fv.apply(&u, i) + g(u[i])).collect();
        let worst = res.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        if worst < 1e-13 {
            break;
        }
        // tridiagonal Jacobian J δ = −res
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for i in 0..n {
            let e = 1e-7;
            let gp = (g(u[i] + e) - g(u[i] - e)) / (2.0 * e);
            diag[i] = -fv.wm[i] - fv.wp[i] + gp;
            if i > 0 {
                lower[i] = fv.wm[i];
            }
            if i + 1 < n {
                upper[i] = fv.wp[i];
            }
        }
        let rhs: Vec<f64> = res.iter().map(|r| -r).collect();
        let delta = thomas(&lower, &diag, &upper, &rhs);
        for i in 0..n {
            u[i] += delta[i];
        }
    }
    u
}

fn thomas(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Vec<f64> {
    let n = d.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    cp[0] = c[0] / b[0];
    dp[0] = d[0] / b[0];
    for i in 1..n {
        let m = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / m;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    x
}

pub fn evolve_ball_dirichlet(f: &Reaction, u_r: &RadialSolution, outer_radius: f64, t_end: f64, dr: f64) -> Result<BallEvolution, StationaryError> {
    if !(outer_radius > u_r.radius) {
        return Err(StationaryError::Invalid("outer radius must exceed R".into()));
    }
    let n_inner = (u_r.radius / dr).round() as usize;
    let dr = u_r.radius / n_inner as f64;
    let n_outer = (outer_radius / dr).round() as usize;
    let outer_radius = n_outer as f64 * dr;
    let fv_in = RadialFv::new(n_inner, dr, u_r.dim);
    let init: Vec<f64> = (0..n_inner).map(|i| u_r.eval((i as f64 + 0.5) * dr)).collect();
    let steady = discrete_steady(f, &init, &fv_in);
    if steady.iter().any(|v| *v <= 0.0) {
        return Err(StationaryError::NoPositiveSolution { radius: u_r.radius });
    }
    let center_min = steady[0];
    let fv = RadialFv::new(n_outer, dr, u_r.dim);
    let mut u = vec![0.0; n_outer];
    u[..n_inner].copy_from_slice(&steady);
    let dt = 0.9 / (fv.max_rate() + f.lipschitz);
    let inner_cells = (((outer_radius - u_r.radius) / dr).floor() as usize).max(1);
    let record_every = (t_end / 200.0).max(dt);
    let mut times = vec![0.0];
    let mut inner_min = vec![u[..inner_cells].iter().copied().fold(f64::INFINITY, f64::min)];
    let mut monotone = true;
    let mut decreasing = u.windows(2).all(|w| w[1] <= w[0] + 1e-14);
    let mut t = 0.0;
    let mut next = record_every;
    let mut buf = vec![0.0; n_outer];
    while t < t_end {
        let h = dt.min(t_end - t);
        for i in 0..n_outer {
            buf[i] = u[i] + h * (fv.apply(&u, i) + f.min_over_x(u[i]));
        }
        if buf.iter().zip(&u).any(|(new, old)| *new < old - 1e-10) {
            monotone = false;
        }
        std::mem::swap(&mut u, &mut buf);
        t += h;
        if t + 1e-12 >= next || t >= t_end {
            times.push(t);
            inner_min.push(u[..inner_cells].iter().copied().fold(f64::INFINITY, f64::min));
            decreasing &= u.windows(2).all(|w| w[1] <= w[0] + 1e-12);
            next += record_every;
        }
    }
    let last = *inner_min.last().unwrap();
    Ok(BallEvolution {
        outer_radius,
        times,
        inner_min,
        center_min,
        monotone_in_time: monotone,
        radially_decreasing: decreasing,
        final_profile: u,
        exceeds_center_value: last > center_min,
    })
}

/// Embeds `u_R` around `center` on a mask and relaxes it to the discrete
/// steady state of the lower-envelope problem on the cells with center in
/// `B_R` (zero outside). The result, extended by 0, is a discrete
/// subsolution for `f` and `coeff`.
pub fn embed_radial(
    mask: Arc<DomainMask>,
    coeff: &Coefficients,
    f: &Reaction,
    u_r: &RadialSolution,
    center: Point,
) -> Result<Field, StationaryError> {
    let st = Stepper::lower_envelope(mask.clone(), coeff, f, Scheme::ExplicitEuler)?;
    let one_d = mask.dim() == 1;
    let dist = |x: Point| (x[0] - center[0]).hypot(if one_d { 0.0 } else { x[1] - center[1] });
    let mut u = Field::from_fn(mask.clone(), |x| u_r.eval(dist(x)));
    let active: Vec<bool> = (0..mask.n_fluid()).map(|k| dist(mask.fluid_center(k)) < u_r.radius).collect();
    let n_active = active.iter().filter(|a| **a).count().max(1);
    let side = (n_active as f64).sqrt();
    let omega = (2.0 / (1.0 + std::f64::consts::PI / side)).min(1.95);
    let res = st.relax(&mut u.values, &active, omega, 1e-11, 200 * side as usize + 2000);
    if !(res < 1e-9) {
        return Err(StationaryError::NotConverged { iterations: 0, detail: format!("ball relaxation residual {res:e}") });
    }
    if u.values.iter().zip(&active).any(|(v, a)| *a && *v <= 0.0) {
        return Err(StationaryError::NoPositiveSolution { radius: u_r.radius });
    }
    Ok(u)
}

/// Most negative value of the discrete operator applied to `u` (`>= 0`
/// for a subsolution), with the fluid index where it occurs.
pub fn subsolution_defect(st: &Stepper, u: &Field) -> (f64, usize) {
    st.residual(&u.values)
        .into_iter()
        .enumerate()
        .fold((f64::INFINITY, 0), |(m, at), (k, r)| if r < m { (r, k) } else { (m, at) })
}

