//! Discrete energy `E_r(φ) = ∫ ½ A∇φ·∇φ − F(x, φ)` over `Ω ∩ B_r` with `φ = 0`
//! outside the ball, and its box-constrained minimization.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::StationaryError;
use crate::geometry::{DomainMask, Face, Point};
use crate::reaction::{LocalReaction, Reaction};
use crate::solver::{Coefficients, Field};

/// Face list `(k, m, a_face)` and per-cell reactions for energy evaluation.
pub struct EnergyProblem {
    pub mask: Arc<DomainMask>,
    pub center: Point,
    pub radius: f64,
    /// Fluid indices with center in the open ball.
    pub active: Vec<bool>,
    faces: Vec<(u32, u32, f64)>,
    local: Vec<LocalReaction>,
    h: f64,
}

fn harmonic(a: f64, b: f64) -> f64 {
    2.0 * a * b / (a + b)
}

impl EnergyProblem {
    pub fn new(mask: Arc<DomainMask>, coeff: &Coefficients, f: &Reaction, center: Point, radius: f64) -> Result<Self, StationaryError> {
        if coeff.len() != mask.n_fluid() {
            return Err(StationaryError::Invalid("coefficients sampled on another mask".into()));
        }
        if coeff.has_cross() {
            return Err(StationaryError::Invalid("energy assumes diagonal A".into()));
        }
        let one_d = mask.dim() == 1;
        let active: Vec<bool> = (0..mask.n_fluid())
            .map(|k| {
                let c = mask.fluid_center(k);
                (c[0] - center[0]).hypot(if one_d { 0.0 } else { c[1] - center[1] }) < radius
            })
            .collect();
        // the ball must not touch the window edge
        let g = &mask.grid;
        let lo = g.lower();
        let hi = g.upper();
        if center[0] - radius < lo[0] || center[0] + radius > hi[0] || (!one_d && (center[1] - radius < lo[1] || center[1] + radius > hi[1])) {
            return Err(StationaryError::Invalid("ball B_r leaves the window".into()));
        }
        let mut faces = Vec::new();
        for k in 0..mask.n_fluid() {
            for face in [Face::XPlus, Face::YPlus] {
                if let Some(m) = mask.fluid_neighbor(k, face) {
                    if active[k] || active[m] {
                        let ax = if face == Face::XPlus { 0 } else { 2 };
                        faces.push((k as u32, m as u32, harmonic(coeff.a[k][ax], coeff.a[m][ax])));
                    }
                }
            }
        }
        let local = (0..mask.n_fluid()).map(|k| f.local(mask.fluid_center(k))).collect();
        Ok(Self { h: mask.grid.h, mask, center, radius, active, faces, local })
    }

    /// Midpoint-rule energy (`phi` is read as 0 off the ball).
    pub fn energy(&self, phi: &[f64]) -> f64 {
        let v = |k: usize| if self.active[k] { phi[k] } else { 0.0 };
        let area = self.mask.cell_area();
        let h = self.h;
        let mut grad = 0.0;
        for &(k, m, a) in &self.faces {
            let d = (v(m as usize) - v(k as usize)) / h;
            grad += 0.5 * a * d * d;
        }
        let mut pot = 0.0;
        for k in 0..phi.len() {
            if self.active[k] {
                pot += self.local[k].primitive(phi[k]);
            }
        }
        (grad - pot) * area
    }

    /// Gradient of `energy` with respect to the active values, divided by the cell area.
    fn gradient(&self, phi: &[f64], out: &mut [f64]) {
        let v = |k: usize| if self.active[k] { phi[k] } else { 0.0 };
        let h2 = self.h * self.h;
        for (k, o) in out.iter_mut().enumerate() {
            *o = if self.active[k] { -self.local[k].eval(phi[k]) } else { 0.0 };
        }
        for &(k, m, a) in &self.faces {
            let (k, m) = (k as usize, m as usize);
            let d = a * (v(k) - v(m)) / h2;
            if self.active[k] {
                out[k] += d;
            }
            if self.active[m] {
                out[m] -= d;
            }
        }
    }

    /// `1` inside `B_{r−1}`, `r − |x|` on the collar, 0 outside.
    pub fn collar_profile(&self) -> Vec<f64> {
        let one_d = self.mask.dim() == 1;
        (0..self.mask.n_fluid())
            .map(|k| {
                if !self.active[k] {
                    return 0.0;
                }
                let c = self.mask.fluid_center(k);
                let d = (c[0] - self.center[0]).hypot(if one_d { 0.0 } else { c[1] - self.center[1] });
                (self.radius - d).clamp(0.0, 1.0)
            })
            .collect()
    }
}

pub fn energy(phi: &Field, coeff: &Coefficients, f: &Reaction, center: Point, radius: f64) -> Result<f64, StationaryError> {
    Ok(EnergyProblem::new(phi.mask.clone(), coeff, f, center, radius)?.energy(&phi.values))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Basin {
    pub start: String,
    pub energy: f64,
    pub max_value: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyReport {
    pub r: f64,
    pub center: Point,
    /// Lowest-energy minimizer found, on the fluid cells (0 off the ball).
    pub minimizer: Vec<f64>,
    pub energy: f64,
    pub max_value: f64,
    pub collar_energy: f64,
    pub basins: Vec<Basin>,
    /// Energy never increased during any descent.
    pub monotone: bool,
}

impl EnergyReport {
    /// Minimizer below `tol` everywhere.
    pub fn is_trivial(&self, tol: f64) -> bool {
        self.max_value <= tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescentOptions {
    pub iters: usize,
    /// Stop when the relative energy decrease over an iteration and the
    /// projected gradient both fall below this.
    pub tol: f64,
    pub random_starts: usize,
    pub seed: u64,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self { iters: 20_000, tol: 1e-12, random_starts: 1, seed: 0 }
    }
}

struct Descent {
    values: Vec<f64>,
    energy: f64,
    iterations: usize,
    monotone: bool,
    converged: bool,
}

/// Projected gradient with Barzilai–Borwein steps and Armijo backtracking on `[0,1]`.
fn descend(p: &EnergyProblem, mut x: Vec<f64>, opts: &DescentOptions) -> Descent {
    let n = x.len();
    for (k, v) in x.iter_mut().enumerate() {
        *v = if p.active[k] { v.clamp(0.0, 1.0) } else { 0.0 };
    }
    let area = p.mask.cell_area();
    let mut g = vec![0.0; n];
    p.gradient(&x, &mut g);
    let mut e = p.energy(&x);
    let h2 = p.h * p.h;
    let mut step = 0.2 * h2;
    let mut monotone = true;
    let mut converged = false;
    let mut trial = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut it = 0;
    while it < opts.iters {
        it += 1;
        let mut alpha = step;
        let accepted = loop {
            for k in 0..n {
                trial[k] = if p.active[k] { (x[k] - alpha * g[k]).clamp(0.0, 1.0) } else { 0.0 };
            }
            let decrease: f64 = (0..n).map(|k| g[k] * (x[k] - trial[k])).sum::<f64>() * area;
            if decrease <= 0.0 {
                break None;
            }
            let et = p.energy(&trial);
            if et <= e - 1e-4 * decrease {
                break Some(et);
            }
            alpha *= 0.5;
            if alpha < 1e-12 * h2 {
                break None;
            }
        };
        // no admissible step: the projected gradient vanishes to roundoff
        let Some(e_new) = accepted else {
            converged = true;
            break;
        };
        p.gradient(&trial, &mut g_new);
        let mut sy = 0.0;
        let mut ss = 0.0;
        let mut pg: f64 = 0.0;
        for k in 0..n {
            let s = trial[k] - x[k];
            sy += s * (g_new[k] - g[k]);
            ss += s * s;
            if p.active[k] {
                let proj = (trial[k] - g_new[k]).clamp(0.0, 1.0) - trial[k];
                pg = pg.max(proj.abs());
            }
        }
        step = if sy > 0.0 { (ss / sy).clamp(1e-3 * h2, 1e6) } else { 10.0 * alpha };
        if e_new > e + 1e-14 * e.abs().max(1e-300) {
            monotone = false;
        }
        let rel = (e - e_new).abs() / e.abs().max(1e-12);
        std::mem::swap(&mut x, &mut trial);
        std::mem::swap(&mut g, &mut g_new);
        e = e_new;
        if (rel < opts.tol && pg < 1e-9) || pg == 0.0 {
            converged = true;
            break;
        }
    }
    Descent { values: x, energy: e, iterations: it, monotone, converged }
}

/// Minimizes `E_r` over `[0,1]`-valued functions on `Ω ∩ B_r(center)`
/// from the zero, collar and `random_starts` random initial guesses.
pub fn minimize_energy(
    mask: Arc<DomainMask>,
    coeff: &Coefficients,
    f: &Reaction,
    center: Point,
    r: f64,
    opts: &DescentOptions,
) -> Result<EnergyReport, StationaryError> {
    let p = EnergyProblem::new(mask.clone(), coeff, f, center, r)?;
    let collar = p.collar_profile();
    let collar_energy = p.energy(&collar);
    let mut starts: Vec<(String, Vec<f64>)> = vec![("zero".into(), vec![0.0; mask.n_fluid()]), ("collar".into(), collar)];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for i in 0..opts.random_starts {
        starts.push((format!("random{i}"), (0..mask.n_fluid()).map(|_| rng.gen::<f64>()).collect()));
    }
    let mut basins = Vec::new();
    let mut best: Option<Descent> = None;
    let mut monotone = true;
    for (name, x0) in starts {
        let d = descend(&p, x0, opts);
        if !d.converged {
            return Err(StationaryError::NotConverged { iterations: d.iterations, detail: format!("energy descent from {name}") });
        }
        monotone &= d.monotone;
        basins.push(Basin { start: name, energy: d.energy, max_value: d.values.iter().copied().fold(0.0, f64::max), iterations: d.iterations });
        if best.as_ref().is_none_or(|b| d.energy < b.energy) {
            best = Some(d);
        }
    }
    let best = best.unwrap();
    let max_value = best.values.iter().copied().fold(0.0, f64::max);
    Ok(EnergyReport { r, center, minimizer: best.values, energy: best.energy, max_value, collar_energy, basins, monotone })
}

/// Bisection on `r` between a radius with trivial minimizer and one with
/// negative minimal energy. Returns `(r_small, r_big)` with `r_big − r_small <= tol`.
pub fn energy_threshold(
    mask: Arc<DomainMask>,
    coeff: &Coefficients,
    f: &Reaction,
    center: Point,
    mut r_small: f64,
    mut r_big: f64,
    tol: f64,
    opts: &DescentOptions,
) -> Result<(f64, f64), StationaryError> {
    let nontrivial = |r: f64| -> Result<bool, StationaryError> {
        let rep = minimize_energy(mask.clone(), coeff, f, center, r, opts)?;
        Ok(rep.energy < 0.0 && !rep.is_trivial(1e-6))
    };
    if nontrivial(r_small)? || !nontrivial(r_big)? {
        return Err(StationaryError::Invalid(format!("[{r_small}, {r_big}] does not bracket the energy threshold")));
    }
    while r_big - r_small > tol {
        let m = 0.5 * (r_small + r_big);
        if nontrivial(m)? {
            r_big = m;
        } else {
            r_small = m;
        }
    }
    Ok((r_small, r_big))
}
