//! Monotone finite-volume stepping of `∂t u = ∇·(A∇u) + q·∇u + f(x,u)`
//! with zero flux on obstacle faces.

pub mod coefficients;
pub mod init;
pub mod output;
pub mod probe;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use coefficients::{Coefficients, DriftChecks};
pub use init::{make_bump, make_front_like};
pub use output::{write_probes_csv, write_snapshot_pgm, write_snapshots};
pub use probe::{Probe, ProbeSet, Trajectory};

use crate::geometry::{DomainMask, Face, Point};
use crate::reaction::{LocalReaction, Reaction};

pub const CFL_SAFETY: f64 = 0.9;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("time step {dt} exceeds the stability limit {max}")]
    CflViolation { dt: f64, max: f64 },
    #[error("non-finite value at fluid cell {cell} (t = {time})")]
    NonFiniteValue { time: f64, cell: usize },
    #[error("field and stepper live on different masks")]
    MaskMismatch,
    #[error("conjugate gradient stalled after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("invalid solver input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Values at the fluid cells of a mask.
#[derive(Debug, Clone)]
pub struct Field {
    pub values: Vec<f64>,
    pub time: f64,
    pub mask: Arc<DomainMask>,
}

impl Field {
    pub fn constant(mask: Arc<DomainMask>, c: f64) -> Self {
        Self { values: vec![c; mask.n_fluid()], time: 0.0, mask }
    }

    pub fn from_fn(mask: Arc<DomainMask>, mut f: impl FnMut(Point) -> f64) -> Self {
        let values = (0..mask.n_fluid()).map(|k| f(mask.fluid_center(k))).collect();
        Self { values, time: 0.0, mask }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `∑ u · cell area`.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.mask.cell_area()
    }

    /// Value at the fluid cell containing `p`.
    pub fn at(&self, p: Point) -> Option<f64> {
        let idx = self.mask.grid.locate(p)?;
        self.mask.fluid_index(idx).map(|k| self.values[k])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ExplicitEuler,
    /// Diffusion implicit (conjugate gradient), drift and reaction explicit.
    ImexDiffusion,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeStep {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: TimeStep,
    pub t_end: f64,
    pub scheme: Scheme,
    /// Probe sampling interval.
    pub record_every: f64,
    /// Full-field snapshot interval.
    #[serde(default)]
    pub snapshot_every: Option<f64>,
}

impl SolverConfig {
    pub fn explicit(t_end: f64, record_every: f64) -> Self {
        Self { dt: TimeStep::Auto, t_end, scheme: Scheme::ExplicitEuler, record_every, snapshot_every: None }
    }
}

/// Compressed rows: for fluid cell `k`, neighbours `cols[rows[k]..rows[k+1]]`
/// with weights `w` so that the operator reads `∑ w (u_m − u_k)`.
#[derive(Debug, Clone, Default)]
struct Rows {
    rows: Vec<usize>,
    cols: Vec<u32>,
    w: Vec<f64>,
}

impl Rows {
    fn push_row(&mut self, entries: &[(usize, f64)]) {
        if self.rows.is_empty() {
            self.rows.push(0);
        }
        for &(m, w) in entries {
            if w != 0.0 {
                self.cols.push(m as u32);
                self.w.push(w);
            }
        }
        self.rows.push(self.cols.len());
    }

    #[inline]
    fn apply(&self, k: usize, u: &[f64]) -> f64 {
        let uk = u[k];
        let mut acc = 0.0;
        for e in self.rows[k]..self.rows[k + 1] {
            acc += self.w[e] * (u[self.cols[e] as usize] - uk);
        }
        acc
    }

    fn row_sum(&self, k: usize) -> f64 {
        self.w[self.rows[k]..self.rows[k + 1]].iter().sum()
    }
}

enum Source {
    Uniform(LocalReaction),
    PerCell(Vec<LocalReaction>),
    /// `min_x f(x, s)`.
    Envelope(Reaction),
}

/// Precomputed stencil and reaction for one (mask, coefficients, f) triple.
pub struct Stepper {
    mask: Arc<DomainMask>,
    scheme: Scheme,
    /// Symmetric axial diffusion.
    diffusion: Rows,
    /// Drift (upwind) and cross-diffusion terms.
    transport: Rows,
    source: Source,
    lipschitz: f64,
    dt_max: f64,
    /// Cells where requested cross terms had to be dropped to stay monotone.
    pub cross_terms_dropped: usize,
    scratch: Vec<f64>,
    tridiagonal: bool,
}

fn harmonic(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

impl Stepper {
    pub fn new(mask: Arc<DomainMask>, coeff: &Coefficients, f: &Reaction, scheme: Scheme) -> Result<Self, SolverError> {
        Self::build(mask, coeff, f, scheme, false)
    }

    /// Stepper for the x-independent lower envelope `min_x f(x, ·)`. Its
    /// subsolutions are subsolutions for `f`.
    pub fn lower_envelope(mask: Arc<DomainMask>, coeff: &Coefficients, f: &Reaction, scheme: Scheme) -> Result<Self, SolverError> {
        Self::build(mask, coeff, f, scheme, true)
    }

    fn build(mask: Arc<DomainMask>, coeff: &Coefficients, f: &Reaction, scheme: Scheme, envelope: bool) -> Result<Self, SolverError> {
        let n = mask.n_fluid();
        if coeff.len() != n {
            return Err(SolverError::MaskMismatch);
        }
        let h = mask.grid.h;
        let h2 = h * h;
        let mut diffusion = Rows::default();
        let mut transport = Rows::default();
        let mut dropped = 0;
        let mut diff_row = Vec::with_capacity(4);
        let mut tr_row = Vec::with_capacity(8);
        for k in 0..n {
            diff_row.clear();
            tr_row.clear();
            let nb: [Option<usize>; 4] = Face::ALL.map(|face| mask.fluid_neighbor(k, face));
            for (face, m) in Face::ALL.iter().zip(nb) {
                let Some(m) = m else { continue };
                let ax = if face.axis() == 0 { 0 } else { 2 };
                diff_row.push((m, harmonic(coeff.a[k][ax], coeff.a[m][ax]) / h2));
                // upwind: q_x > 0 reads the right neighbour
                let qa = coeff.q[k][face.axis()];
                let sign = face.normal()[face.axis()];
                if qa * sign > 0.0 {
                    tr_row.push((m, qa.abs() / h));
                }
            }
            let a12 = coeff.a[k][1];
            if coeff.cross_terms && a12 != 0.0 && mask.dim() == 2 {
                // Positive-type cross stencil: for a12 > 0 uses the NE/SW
                // diagonals, for a12 < 0 NW/SE; monotone when a11, a22 >= |a12|.
                let [xm, xp, ym, yp] = nb;
                let diag = |m: Option<usize>, face: Face| m.and_then(|m| mask.fluid_neighbor(m, face));
                let (d1, d2) = if a12 > 0.0 { (diag(xp, Face::YPlus), diag(xm, Face::YMinus)) } else { (diag(xm, Face::YPlus), diag(xp, Face::YMinus)) };
                let ok = coeff.a[k][0] >= a12.abs() && coeff.a[k][2] >= a12.abs();
                match (xm, xp, ym, yp, d1, d2) {
                    (Some(xm), Some(xp), Some(ym), Some(yp), Some(d1), Some(d2)) if ok => {
                        let c = a12.abs() / h2;
                        for m in [xm, xp, ym, yp] {
                            tr_row.push((m, -c));
                        }
                        tr_row.push((d1, c));
                        tr_row.push((d2, c));
                    }
                    _ => dropped += 1,
                }
            }
            diffusion.push_row(&diff_row);
            transport.push_row(&tr_row);
        }
        if n == 0 {
            diffusion.rows.push(0);
            transport.rows.push(0);
        }
        let source = if envelope && f.periodic {
            Source::Envelope(f.clone())
        } else if f.periodic {
            Source::PerCell((0..n).map(|k| f.local(mask.fluid_center(k))).collect())
        } else {
            Source::Uniform(f.local([0.0, 0.0]))
        };
        let lipschitz = f.lipschitz;
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let s = match scheme {
                Scheme::ExplicitEuler => diffusion.row_sum(k) + transport.row_sum(k),
                Scheme::ImexDiffusion => transport.row_sum(k),
            };
            worst = worst.max(s);
        }
        let rate = worst + lipschitz;
        let dt_max = if rate > 0.0 { CFL_SAFETY / rate } else { f64::INFINITY };
        let mut stepper = Self {
            mask,
            scheme,
            diffusion,
            transport,
            source,
            lipschitz,
            dt_max,
            cross_terms_dropped: dropped,
            scratch: vec![0.0; n],
            tridiagonal: false,
        };
        stepper.tridiagonal = n > 0 && stepper.is_tridiagonal();
        Ok(stepper)
    }

    pub fn mask(&self) -> &Arc<DomainMask> {
        &self.mask
    }

    /// Largest monotone time step (`CFL_SAFETY` included).
    pub fn dt_max(&self) -> f64 {
        self.dt_max
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Default time step for a scheme: the stability limit for the explicit
    /// scheme; for IMEX the drift/reaction limit capped at 20 explicit steps.
    pub fn auto_dt(&self) -> f64 {
        match self.scheme {
            Scheme::ExplicitEuler => self.dt_max,
            Scheme::ImexDiffusion => {
                let mut worst: f64 = 0.0;
                for k in 0..self.mask.n_fluid() {
                    worst = worst.max(self.diffusion.row_sum(k) + self.transport.row_sum(k));
                }
                let explicit = CFL_SAFETY / (worst + self.lipschitz).max(1e-300);
                self.dt_max.min(20.0 * explicit)
            }
        }
    }

    #[inline]
    fn reaction(&self, k: usize, s: f64) -> f64 {
        match &self.source {
            Source::Uniform(r) => r.eval(s),
            Source::PerCell(rs) => rs[k].eval(s),
            Source::Envelope(f) => f.min_over_x(s),
        }
    }

    /// Time derivative of the explicit part (everything for the explicit scheme).
    pub fn rhs(&self, u: &[f64], out: &mut [f64]) {
        let explicit_diffusion = self.scheme == Scheme::ExplicitEuler;
        for k in 0..u.len() {
            let mut r = self.transport.apply(k, u) + self.reaction(k, u[k]);
            if explicit_diffusion {
                r += self.diffusion.apply(k, u);
            }
            out[k] = r;
        }
    }

    /// Full operator `∇·(A∇u) + q·∇u + f(x,u)` at each fluid cell.
    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        (0..u.len())
            .map(|k| self.diffusion.apply(k, u) + self.transport.apply(k, u) + self.reaction(k, u[k]))
            .collect()
    }

    /// Nonlinear SOR for the steady problem on the `active` cells, the others
    /// held fixed (Dirichlet data). Returns the final max residual over the
    /// active cells.
    pub fn relax(&self, u: &mut [f64], active: &[bool], omega: f64, tol: f64, max_sweeps: usize) -> f64 {
        let n = u.len();
        let diag: Vec<f64> = (0..n).map(|k| self.diffusion.row_sum(k) + self.transport.row_sum(k)).collect();
        let mut worst = f64::INFINITY;
        for _ in 0..max_sweeps {
            worst = 0.0;
            for k in 0..n {
                if !active[k] {
                    continue;
                }
                let r = self.diffusion.apply(k, u) + self.transport.apply(k, u) + self.reaction(k, u[k]);
                worst = f64::max(worst, r.abs());
                let eps = 1e-7;
                let slope = (self.reaction(k, u[k] + eps) - self.reaction(k, u[k] - eps)) / (2.0 * eps);
                let denom = (diag[k] - slope).max(0.5 * diag[k]).max(1e-300);
                u[k] += omega * r / denom;
            }
            if worst < tol {
                break;
            }
        }
        worst
    }

    /// One update of size `dt`.
    pub fn step(&mut self, u: &mut Field, dt: f64) -> Result<(), SolverError> {
        if !Arc::ptr_eq(&u.mask, &self.mask) && *u.mask.inside_mask() != *self.mask.inside_mask() {
            return Err(SolverError::MaskMismatch);
        }
        if !(dt > 0.0) || dt > self.dt_max * (1.0 + 1e-12) {
            return Err(SolverError::CflViolation { dt, max: self.dt_max });
        }
        let mut rhs = std::mem::take(&mut self.scratch);
        self.rhs(&u.values, &mut rhs);
        for (v, r) in u.values.iter_mut().zip(&rhs) {
            *v += dt * r;
        }
        self.scratch = rhs;
        if self.scheme == Scheme::ImexDiffusion {
            self.implicit_diffusion(&mut u.values, dt)?;
        }
        u.time += dt;
        if let Some(cell) = u.values.iter().position(|v| !v.is_finite()) {
            return Err(SolverError::NonFiniteValue { time: u.time, cell });
        }
        Ok(())
    }

    /// Whether every diffusion coupling links `k` to `k ± 1` (1D without wrap).
    fn is_tridiagonal(&self) -> bool {
        let d = &self.diffusion;
        (0..self.mask.n_fluid()).all(|k| (d.rows[k]..d.rows[k + 1]).all(|e| (d.cols[e] as usize).abs_diff(k) == 1))
    }

    /// Thomas algorithm for the tridiagonal case of [`Self::implicit_diffusion`].
    fn implicit_diffusion_tridiagonal(&self, b: &mut [f64], dt: f64) {
        let n = b.len();
        let d = &self.diffusion;
        let mut lower = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut diag = vec![0.0; n];
        for k in 0..n {
            diag[k] = 1.0 + dt * d.row_sum(k);
            for e in d.rows[k]..d.rows[k + 1] {
                if d.cols[e] as usize > k {
                    upper[k] = -dt * d.w[e];
                } else {
                    lower[k] = -dt * d.w[e];
                }
            }
        }
        let mut c = vec![0.0; n];
        c[0] = upper[0] / diag[0];
        b[0] /= diag[0];
        for k in 1..n {
            let m = diag[k] - lower[k] * c[k - 1];
            c[k] = upper[k] / m;
            b[k] = (b[k] - lower[k] * b[k - 1]) / m;
        }
        for k in (0..n - 1).rev() {
            b[k] -= c[k] * b[k + 1];
        }
    }

    /// Solves `(I − dt D) x = b` in place: directly in the tridiagonal case,
    /// otherwise by Jacobi-preconditioned CG.
    fn implicit_diffusion(&self, b: &mut [f64], dt: f64) -> Result<(), SolverError> {
        if self.tridiagonal {
            self.implicit_diffusion_tridiagonal(b, dt);
            return Ok(());
        }
        let n = b.len();
        let d = &self.diffusion;
        let apply = |x: &[f64], out: &mut [f64]| {
            for k in 0..n {
                out[k] = x[k] - dt * d.apply(k, x);
            }
        };
        let diag: Vec<f64> = (0..n).map(|k| 1.0 + dt * d.row_sum(k)).collect();
        let rhs = b.to_vec();
        let x = b;
        let mut ax = vec![0.0; n];
        apply(x, &mut ax);
        let mut r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
        let mut p = z.clone();
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let norm_b = rhs.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        let tol = 1e-13 * norm_b;
        let max_iter = 10 * n + 100;
        let mut ap = vec![0.0; n];
        for _ in 0..max_iter {
            let rn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if rn <= tol {
                return Ok(());
            }
            apply(&p, &mut ap);
            let alpha = rz / p.iter().zip(&ap).map(|(a, b)| a * b).sum::<f64>();
            for k in 0..n {
                x[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            for k in 0..n {
                z[k] = r[k] / diag[k];
            }
            let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for k in 0..n {
                p[k] = z[k] + beta * p[k];
            }
        }
        let residual = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if residual <= 1e-9 * norm_b {
            Ok(())
        } else {
            Err(SolverError::NoConvergence { iterations: max_iter, residual })
        }
    }
}

/// One step of size `dt` from scratch (builds the stencil each call).
pub fn step(u: &Field, coeff: &Coefficients, f: &Reaction, dt: f64, scheme: Scheme) -> Result<Field, SolverError> {
    let mut stepper = Stepper::new(u.mask.clone(), coeff, f, scheme)?;
    let mut out = u.clone();
    stepper.step(&mut out, dt)?;
    Ok(out)
}

/// Integrates to `cfg.t_end`, sampling probes every `record_every` and
/// snapshots every `snapshot_every`. Each interval between sample times is
/// split into equal steps no larger than the chosen `dt`.
pub fn run(u0: Field, stepper: &mut Stepper, cfg: &SolverConfig, probes: &ProbeSet) -> Result<(Field, Trajectory), SolverError> {
    run_until(u0, stepper, cfg, probes, |_, _| false)
}

/// As [`run`], stopping early once `stop(field, last probe row)` returns true
/// at a record time.
pub fn run_until(
    mut u: Field,
    stepper: &mut Stepper,
    cfg: &SolverConfig,
    probes: &ProbeSet,
    mut stop: impl FnMut(&Field, &[f64]) -> bool,
) -> Result<(Field, Trajectory), SolverError> {
    if !(cfg.t_end >= 0.0) || !(cfg.record_every > 0.0) {
        return Err(SolverError::Invalid("t_end must be >= 0 and record_every > 0".into()));
    }
    let dt = match cfg.dt {
        TimeStep::Auto => stepper.auto_dt(),
        TimeStep::Fixed(dt) => dt,
    };
    if (stepper.scheme() == Scheme::ExplicitEuler || matches!(cfg.dt, TimeStep::Fixed(_)))
        && (!(dt > 0.0) || dt > stepper.dt_max() * (1.0 + 1e-12)) {
            return Err(SolverError::CflViolation { dt, max: stepper.dt_max() });
        }
    let dt = dt.min(cfg.t_end.max(f64::MIN_POSITIVE));
    let mut traj = Trajectory::new(probes.names(), dt);
    let t0 = u.time;
    traj.record(u.time, probes.sample(&u));
    let mut next_snap = cfg.snapshot_every.map(|_| t0);
    if let Some(ts) = next_snap {
        if ts <= t0 {
            traj.snapshots.push((u.time, u.values.clone()));
            next_snap = Some(t0 + cfg.snapshot_every.unwrap());
        }
    }
    let t_end = t0 + cfg.t_end;
    let mut k_rec = 1u64;
    loop {
        let target = (t0 + k_rec as f64 * cfg.record_every).min(t_end);
        let span = target - u.time;
        if span <= 1e-12 * t_end.abs().max(1.0) {
            if target >= t_end {
                break;
            }
            k_rec += 1;
            continue;
        }
        let n = (span / dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let sub = span / n as f64;
        for _ in 0..n {
            stepper.step(&mut u, sub)?;
        }
        u.time = target;
        let row = probes.sample(&u);
        let done = stop(&u, &row);
        traj.record(u.time, row);
        if let (Some(ts), Some(every)) = (next_snap, cfg.snapshot_every) {
            if u.time + 1e-9 >= ts {
                traj.snapshots.push((u.time, u.values.clone()));
                next_snap = Some(ts + every);
            }
        }
        if done || target >= t_end {
            break;
        }
        k_rec += 1;
    }
    Ok((u, traj))
}

#[cfg(test)]
mod tests;
