use serde::{Deserialize, Serialize};

use super::SolverError;
use crate::geometry::{DomainMask, Face, FaceKind, Point};

/// Per-fluid-cell diffusion matrix `[a11, a12, a22]` and drift `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub a: Vec<[f64; 3]>,
    pub q: Vec<[f64; 2]>,
    /// Smallest eigenvalue of `A` over the cells.
    pub lambda: f64,
    /// Largest eigenvalue of `A` over the cells.
    pub big_lambda: f64,
    /// Discretize `a12` (positive-type stencil). Off by default.
    pub cross_terms: bool,
}

/// Structural checks on the drift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftChecks {
    pub divergence_free: bool,
    pub zero_mean: bool,
    pub tangential: bool,
    pub max_divergence: f64,
    pub mean: [f64; 2],
    pub max_normal: f64,
}

fn eigenvalues(a: [f64; 3]) -> (f64, f64) {
    let m = 0.5 * (a[0] + a[2]);
    let d = (0.25 * (a[0] - a[2]).powi(2) + a[1] * a[1]).sqrt();
    (m - d, m + d)
}

impl Coefficients {
    /// `A = d I`, `q = 0`.
    pub fn isotropic(mask: &DomainMask, d: f64) -> Self {
        Self::from_fn(mask, |_| ([d, 0.0, d], [0.0, 0.0])).expect("positive diffusion")
    }

    /// Samples `A` and `q` at the fluid cell centers.
    pub fn from_fn(mask: &DomainMask, mut sample: impl FnMut(Point) -> ([f64; 3], [f64; 2])) -> Result<Self, SolverError> {
        let n = mask.n_fluid();
        let mut a = Vec::with_capacity(n);
        let mut q = Vec::with_capacity(n);
        for k in 0..n {
            let (ak, qk) = sample(mask.fluid_center(k));
            a.push(ak);
            q.push(qk);
        }
        Self::new(a, q)
    }

    pub fn new(a: Vec<[f64; 3]>, q: Vec<[f64; 2]>) -> Result<Self, SolverError> {
        if a.len() != q.len() {
            return Err(SolverError::Invalid("A and q sampled on different cell sets".into()));
        }
        let mut lambda = f64::INFINITY;
        let mut big_lambda: f64 = 0.0;
        for (k, ak) in a.iter().enumerate() {
            if !ak.iter().all(|v| v.is_finite()) || !q[k].iter().all(|v| v.is_finite()) {
                return Err(SolverError::Invalid(format!("non-finite coefficient at fluid cell {k}")));
            }
            let (lo, hi) = eigenvalues(*ak);
            lambda = lambda.min(lo);
            big_lambda = big_lambda.max(hi);
        }
        if a.is_empty() {
            lambda = 1.0;
            big_lambda = 1.0;
        }
        if !(lambda > 0.0) {
            return Err(SolverError::Invalid(format!("A is not uniformly elliptic (smallest eigenvalue {lambda})")));
        }
        Ok(Self { a, q, lambda, big_lambda, cross_terms: false })
    }

    pub fn with_cross_terms(mut self, on: bool) -> Self {
        self.cross_terms = on;
        self
    }

    pub fn q_sup(&self) -> f64 {
        self.q.iter().map(|q| q[0].hypot(q[1])).fold(0.0, f64::max)
    }

    pub fn has_cross(&self) -> bool {
        self.a.iter().any(|a| a[1] != 0.0)
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Discrete divergence (face-averaged drift through cell faces), mean
    /// over the window and normal component on obstacle faces.
    pub fn drift_checks(&self, mask: &DomainMask, tol: f64) -> DriftChecks {
        let h = mask.grid.h;
        let mut max_div: f64 = 0.0;
        for k in 0..mask.n_fluid() {
            let mut div = 0.0;
            for face in Face::ALL {
                let n = face.normal();
                let qf = match mask.fluid_neighbor(k, face) {
                    Some(m) => [0.5 * (self.q[k][0] + self.q[m][0]), 0.5 * (self.q[k][1] + self.q[m][1])],
                    None => self.q[k],
                };
                if face.axis() == 1 && mask.dim() == 1 {
                    continue;
                }
                div += (qf[0] * n[0] + qf[1] * n[1]) / h;
            }
            max_div = max_div.max(div.abs());
        }
        let n = self.q.len().max(1) as f64;
        let mean = [self.q.iter().map(|q| q[0]).sum::<f64>() / n, self.q.iter().map(|q| q[1]).sum::<f64>() / n];
        let mut max_normal: f64 = 0.0;
        for bf in mask.boundary_faces() {
            if bf.kind != FaceKind::Obstacle {
                continue;
            }
            let k = mask.fluid_index(bf.cell).expect("boundary face on a fluid cell");
            max_normal = max_normal.max((self.q[k][0] * bf.normal[0] + self.q[k][1] * bf.normal[1]).abs());
        }
        DriftChecks {
            divergence_free: max_div <= tol,
            zero_mean: mean[0].abs() <= tol && mean[1].abs() <= tol,
            tangential: max_normal <= tol,
            max_divergence: max_div,
            mean,
            max_normal,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_lattice_domain, EdgeBc, HoleGeometry, PeriodSpec, WindowSpec};

    fn mask() -> DomainMask {
        let period = PeriodSpec::new(vec![1.0, 1.0], 16).unwrap();
        let w = WindowSpec::periods(&period, [0, 0], [2, 2], [EdgeBc::Periodic, EdgeBc::Periodic]);
        build_lattice_domain(HoleGeometry::None, period, &w).unwrap()
    }

    #[test]
    fn eigenvalue_bounds() {
        let m = mask();
        let c = Coefficients::from_fn(&m, |_| ([2.0, 1.0, 2.0], [0.0, 0.0])).unwrap();
        assert!((c.lambda - 1.0).abs() < 1e-14 && (c.big_lambda - 3.0).abs() < 1e-14);
        assert!(Coefficients::from_fn(&m, |_| ([1.0, 2.0, 1.0], [0.0, 0.0])).is_err());
    }

    #[test]
    fn shear_drift_checks() {
        let m = mask();
        let tau = std::f64::consts::TAU;
        let c = Coefficients::from_fn(&m, |x| ([1.0, 0.0, 1.0], [(tau * x[1]).sin(), 0.0])).unwrap();
        let d = c.drift_checks(&m, 1e-10);
        assert!(d.divergence_free && d.zero_mean && d.tangential, "{d:?}");
        let c = Coefficients::from_fn(&m, |x| ([1.0, 0.0, 1.0], [1.0 + (tau * x[0]).sin(), 0.0])).unwrap();
        let d = c.drift_checks(&m, 1e-10);
        assert!(!d.divergence_free && !d.zero_mean);
    }
}
