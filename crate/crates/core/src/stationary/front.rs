//! Travelling fronts `d φ'' + c φ' + g(φ) = 0`, `φ(−∞) = upper`, `φ(+∞) = lower`,
//! and the curved subsolution `φ(x₁ + η|x₂|² − ct)` built from one.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::StationaryError;
use crate::geometry::{Point, SawtoothProfile};
use crate::reaction::{Reaction, ShiftedMinorant};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontProfile {
    pub c: f64,
    /// Diffusivity.
    pub d: f64,
    pub upper: f64,
    pub lower: f64,
    pub z: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
}

impl FrontProfile {
    fn locate(&self, z: f64) -> Option<(usize, f64)> {
        let n = self.z.len();
        if z <= self.z[0] || z >= self.z[n - 1] {
            return None;
        }
        let step = self.z[1] - self.z[0];
        let i = (((z - self.z[0]) / step).floor() as usize).min(n - 2);
        Some((i, (z - self.z[i]) / step))
    }

    /// Cubic Hermite interpolation, constant tails beyond the sampled window.
    pub fn eval(&self, z: f64) -> f64 {
        match self.locate(z) {
            None if z <= self.z[0] => self.upper,
            None => self.lower,
            Some((i, t)) => {
                let hz = self.z[i + 1] - self.z[i];
                let (p0, p1, m0, m1) = (self.phi[i], self.phi[i + 1], self.dphi[i] * hz, self.dphi[i + 1] * hz);
                let t2 = t * t;
                let t3 = t2 * t;
                (2.0 * t3 - 3.0 * t2 + 1.0) * p0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * p1 + (t3 - t2) * m1
            }
        }
    }

    pub fn derivative(&self, z: f64) -> f64 {
        match self.locate(z) {
            None => 0.0,
            Some((i, t)) => {
                let hz = self.z[i + 1] - self.z[i];
                let (p0, p1, m0, m1) = (self.phi[i], self.phi[i + 1], self.dphi[i] * hz, self.dphi[i + 1] * hz);
                let t2 = t * t;
                ((6.0 * t2 - 6.0 * t) * p0 + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (-6.0 * t2 + 6.0 * t) * p1 + (3.0 * t2 - 2.0 * t) * m1) / hz
            }
        }
    }

    pub fn is_monotone_decreasing(&self) -> bool {
        self.phi.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut s = String::from("z,phi\n");
        for (z, p) in self.z.iter().zip(&self.phi) {
            s.push_str(&format!("{z},{p}\n"));
        }
        std::fs::write(path, s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontOptions {
    /// Bisection tolerance on `c`.
    pub tol: f64,
    pub dz: f64,
    /// Integration length cap.
    pub z_max: f64,
    /// Initial offset from the upper state along the unstable direction.
    pub offset: f64,
    pub diffusivity: f64,
}

impl Default for FrontOptions {
    fn default() -> Self {
        Self { tol: 1e-10, dz: 2e-3, z_max: 400.0, offset: 1e-9, diffusivity: 1.0 }
    }
}

enum Outcome {
    /// Crossed below the lower state: `c` too small.
    Overshoot,
    /// Turned back (or stalled) above the lower state: `c` too large.
    Undershoot,
}

struct Shooter<'a> {
    g: &'a dyn Fn(f64) -> f64,
    upper: f64,
    lower: f64,
    opts: FrontOptions,
}

impl Shooter<'_> {
    fn rhs(&self, c: f64, y: [f64; 2]) -> [f64; 2] {
        [y[1], -(c * y[1] + (self.g)(y[0])) / self.opts.diffusivity]
    }

    fn shoot(&self, c: f64, mut record: Option<&mut Vec<[f64; 2]>>) -> Outcome {
        let d = self.opts.diffusivity;
        let e = 1e-7;
        let gp = ((self.g)(self.upper) - (self.g)(self.upper - e)) / e;
        // unstable eigenvalue of d κ² + c κ + g'(upper) = 0
        let kappa = (-c + (c * c - 4.0 * d * gp).max(0.0).sqrt()) / (2.0 * d);
        let mut y = [self.upper - self.opts.offset, -self.opts.offset * kappa];
        let dz = self.opts.dz;
        let n = (self.opts.z_max / dz) as usize;
        if let Some(r) = record.as_deref_mut() {
            r.clear();
            r.push(y);
        }
        for _ in 0..n {
            let k1 = self.rhs(c, y);
            let k2 = self.rhs(c, [y[0] + 0.5 * dz * k1[0], y[1] + 0.5 * dz * k1[1]]);
            let k3 = self.rhs(c, [y[0] + 0.5 * dz * k2[0], y[1] + 0.5 * dz * k2[1]]);
            let k4 = self.rhs(c, [y[0] + dz * k3[0], y[1] + dz * k3[1]]);
            y[0] += dz / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
            y[1] += dz / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
            if let Some(r) = record.as_deref_mut() {
                r.push(y);
            }
            if y[0] < self.lower {
                return Outcome::Overshoot;
            }
            if y[1] >= 0.0 {
                return Outcome::Undershoot;
            }
        }
        Outcome::Undershoot
    }
}

/// Front connecting `upper` to `lower` for the nonlinearity `g`. The speed is
/// bisected in `[−bound, bound]`.
pub fn front_profile_generic(
    g: &dyn Fn(f64) -> f64,
    upper: f64,
    lower: f64,
    bound: f64,
    opts: &FrontOptions,
) -> Result<FrontProfile, StationaryError> {
    let sh = Shooter { g, upper, lower, opts: *opts };
    let (mut a, mut b) = (-bound, bound);
    if !matches!(sh.shoot(a, None), Outcome::Overshoot) || !matches!(sh.shoot(b, None), Outcome::Undershoot) {
        return Err(StationaryError::NoFront { bound });
    }
    while b - a > opts.tol {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        match sh.shoot(m, None) {
            Outcome::Overshoot => a = m,
            Outcome::Undershoot => b = m,
        }
    }
    let c = 0.5 * (a + b);
    // profile from the undershooting side, cut where it reaches the lower tail
    let mut path = Vec::new();
    sh.shoot(b, Some(&mut path));
    let span = upper - lower;
    let mut cut = path.len();
    for (i, y) in path.iter().enumerate() {
        if y[0] - lower < 1e-6 * span || y[1] >= 0.0 || y[0] < lower {
            cut = i;
            break;
        }
    }
    path.truncate(cut.max(2));
    let mid = lower + 0.5 * span;
    let i_mid = path.iter().position(|y| y[0] <= mid).unwrap_or(path.len() / 2);
    let z: Vec<f64> = (0..path.len()).map(|i| (i as f64 - i_mid as f64) * opts.dz).collect();
    Ok(FrontProfile {
        c,
        d: opts.diffusivity,
        upper,
        lower,
        z,
        phi: path.iter().map(|y| y[0]).collect(),
        dphi: path.iter().map(|y| y[1].min(0.0)).collect(),
    })
}

/// Front of `min_x f` between 1 and 0, bisection bracket `±3√(Λ · lip)`.
pub fn front_profile_1d(f: &Reaction, opts: &FrontOptions) -> Result<FrontProfile, StationaryError> {
    let g = |s: f64| f.min_over_x(s);
    let bound = 3.0 * (opts.diffusivity * f.lipschitz).sqrt();
    front_profile_generic(&g, 1.0, 0.0, bound, opts)
}

/// Front of a shifted minorant between `1 − μ` and `−μ`.
pub fn minorant_front(m: &ShiftedMinorant, opts: &FrontOptions) -> Result<FrontProfile, StationaryError> {
    let g = |s: f64| m.eval(s);
    let bound = 3.0 * (opts.diffusivity * m.lipschitz()).sqrt();
    front_profile_generic(&g, m.upper(), m.lower(), bound, opts)
}

/// `ψ(t, x) = φ(x₁ + η x₂² − c t)` for a front `φ` of the minorant with speed `c' > c`.
#[derive(Debug, Clone)]
pub struct ParaboloidSubsolution {
    pub front: FrontProfile,
    pub minorant: ShiftedMinorant,
    pub c: f64,
    pub eta: f64,
}

/// Largest admissible curvature, `min((c' − c) / (2(N−1)), √μ / 4)`.
pub fn paraboloid_eta(front_speed: f64, c: f64, mu: f64, dim: usize) -> f64 {
    let n1 = (dim as f64 - 1.0).max(1.0);
    ((front_speed - c) / (2.0 * n1)).min(mu.sqrt() / 4.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// Largest value of `∂tψ − Δψ − f(max(ψ, 0))` over the samples.
    pub worst: f64,
    pub at: [f64; 2],
    pub samples: usize,
}

impl ParaboloidSubsolution {
    pub fn new(front: FrontProfile, minorant: ShiftedMinorant, c: f64, eta: f64) -> Result<Self, StationaryError> {
        if !(c <= front.c) || eta < 0.0 {
            return Err(StationaryError::Invalid(format!("need c <= c' = {} and eta >= 0", front.c)));
        }
        Ok(Self { front, minorant, c, eta })
    }

    pub fn eval(&self, t: f64, x: Point) -> f64 {
        self.front.eval(x[0] + self.eta * x[1] * x[1] - self.c * t)
    }

    /// Residual at a profile coordinate `z` and transverse position `y`
    /// (time-independent in these variables), for `N = 2`.
    pub fn residual(&self, z: f64, y: f64) -> f64 {
        let phi = self.front.eval(z);
        let dphi = self.front.derivative(z);
        let stretch = 1.0 + 4.0 * self.eta * self.eta * y * y;
        let cp = self.front.c;
        (cp * stretch - self.c - 2.0 * self.eta) * dphi + stretch * self.minorant.eval(phi) - self.minorant.dominating(phi)
    }

    /// Samples the residual on an `nz × ny` grid of `z` over the profile
    /// window and `|x₂| <= half_height`.
    pub fn verify_interior(&self, half_height: f64, nz: usize, ny: usize, tol: f64) -> Result<ResidualReport, StationaryError> {
        let (z0, z1) = (self.front.z[0], *self.front.z.last().unwrap());
        let mut rep = ResidualReport { worst: f64::NEG_INFINITY, at: [0.0, 0.0], samples: 0 };
        for i in 0..nz {
            let z = z0 + (z1 - z0) * (i as f64 + 0.5) / nz as f64;
            for j in 0..ny {
                let y = -half_height + 2.0 * half_height * j as f64 / (ny - 1).max(1) as f64;
                let r = self.residual(z, y);
                rep.samples += 1;
                if r > rep.worst {
                    rep.worst = r;
                    rep.at = [z, y];
                }
            }
        }
        if rep.worst > tol {
            return Err(StationaryError::ResidualPositive { worst: rep.worst, at: rep.at });
        }
        Ok(rep)
    }

    /// Conormal sign on the upper wall `x₂ = υ(x₁)` of a sawtooth cylinder:
    /// `ν·∇ψ ∝ (−υ' + 2η υ) φ'` must be `<= 0`. Returns the smallest bracket
    /// `−υ' + 2ηυ` over the slanted parts (the wall is symmetric in `x₂`).
    pub fn verify_cylinder_boundary(&self, profile: &SawtoothProfile, samples: usize) -> Result<ResidualReport, StationaryError> {
        let mut rep = ResidualReport { worst: f64::INFINITY, at: [0.0, 0.0], samples: 0 };
        for i in 0..samples {
            let x = profile.period * (i as f64 + 0.5) / samples as f64;
            let v = profile.value(x);
            let bracket = -profile.slope(x) + 2.0 * self.eta * v;
            rep.samples += 1;
            if bracket < rep.worst {
                rep.worst = bracket;
                rep.at = [x, v];
            }
        }
        if rep.worst < 0.0 {
            return Err(StationaryError::ResidualPositive { worst: -rep.worst, at: rep.at });
        }
        Ok(rep)
    }
}
