//! Non-increasing profile `h` with `A h'' + B h' + f(h) >= 0` on `[0, L]` for
//! `A ∈ [λ, Λ]`, `B <= B̄ = (λ/√Λ)√R(f)`: `H` on `(−∞, 0]`, a downward parabola
//! to `K` on `[0, z₁]`, then `μ (z₂ − z)^β` down to 0 at `z₂ = L`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::reaction::{compute_r, compute_theta, Reaction};

pub const BETA_START: f64 = 4.0;
pub const BETA_MAX: f64 = 65_536.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Beta {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsolutionProfile {
    pub upper: f64,
    pub knee: f64,
    /// `min_{[K, H]} f`.
    pub plateau_min: f64,
    pub lambda: f64,
    pub big_lambda: f64,
    /// `B̄`.
    pub drift_bound: f64,
    pub gamma: f64,
    pub z1: f64,
    pub z2: f64,
    pub delta: f64,
    pub beta: f64,
    /// `ln μ` (μ itself under- or overflows for large β).
    pub ln_mu: f64,
}

/// Residuals of the five algebraic conditions, signed so that `>= 0` (first
/// two) or `== 0` (last three) is the requirement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgebraicResiduals {
    /// `λ(β−1) − B̄Δ` (>= 0).
    pub tail_slope: f64,
    /// `min f − γ(Λ + B̄ z₁)` (>= 0).
    pub cap: f64,
    /// `γ z₁²/2 − (H − K)`.
    pub knee_height: f64,
    /// `μ Δ^β − K`.
    pub tail_height: f64,
    /// `γ z₁ − K β / Δ`.
    pub slope_match: f64,
}

impl AlgebraicResiduals {
    /// All five hold within `tol`.
    pub fn hold(&self, tol: f64) -> bool {
        self.tail_slope >= -tol && self.cap >= -tol && self.knee_height.abs() <= tol && self.tail_height.abs() <= tol && self.slope_match.abs() <= tol
    }
}

impl SubsolutionProfile {
    pub fn length(&self) -> f64 {
        self.z2
    }

    pub fn mu(&self) -> f64 {
        self.ln_mu.exp()
    }

    /// `(h, h', h'')` from the closed-form pieces.
    pub fn eval(&self, z: f64) -> (f64, f64, f64) {
        let (hh, k, g, b, d) = (self.upper, self.knee, self.gamma, self.beta, self.delta);
        if z <= 0.0 {
            (hh, 0.0, 0.0)
        } else if z <= self.z1 {
            (hh - 0.5 * g * z * z, -g * z, -g)
        } else if z < self.z2 {
            // μ(z₂−z)^β = K ((z₂−z)/Δ)^β
            let s = (self.z2 - z) / d;
            let p = s.powf(b - 2.0);
            (k * p * s * s, -k * b / d * p * s, k * b * (b - 1.0) / (d * d) * p)
        } else {
            (0.0, 0.0, 0.0)
        }
    }

    pub fn residuals(&self) -> AlgebraicResiduals {
        let (k, b, d, g, z1) = (self.knee, self.beta, self.delta, self.gamma, self.z1);
        let ln_tail = self.ln_mu + b * d.ln() - k.ln();
        AlgebraicResiduals {
            tail_slope: self.lambda * (b - 1.0) - self.drift_bound * d,
            cap: self.plateau_min - g * (self.big_lambda + self.drift_bound * z1),
            knee_height: 0.5 * g * z1 * z1 - (self.upper - k),
            tail_height: k * ln_tail.exp_m1(),
            slope_match: g * z1 - k * b / d,
        }
    }

    pub fn write_csv(&self, path: &Path, n: usize) -> std::io::Result<()> {
        let mut s = String::from("z,h\n");
        for i in 0..=n {
            let z = -0.1 * self.z2 + 1.2 * self.z2 * i as f64 / n as f64;
            s.push_str(&format!("{z},{}\n", self.eval(z).0));
        }
        std::fs::write(path, s)
    }
}

/// Closed-form parameters for a given `β`.
fn profile_for_beta(upper: f64, knee: f64, plateau_min: f64, lambda: f64, big_lambda: f64, beta: f64) -> SubsolutionProfile {
    let r = (upper - knee) * plateau_min;
    let bbar = lambda / big_lambda.sqrt() * r.sqrt();
    let two_hk = 2.0 * (upper - knee);
    let gamma = (bbar * beta * knee / (lambda * two_hk.sqrt() * (beta - 1.0))).powi(2);
    let z1 = two_hk.sqrt() / gamma.sqrt();
    let delta = beta * knee / (gamma * two_hk).sqrt();
    let ln_mu = 0.5 * beta * (gamma * two_hk).ln() - beta * beta.ln() - (beta - 1.0) * knee.ln();
    SubsolutionProfile {
        upper,
        knee,
        plateau_min,
        lambda,
        big_lambda,
        drift_bound: bbar,
        gamma,
        z1,
        z2: z1 + delta,
        delta,
        beta,
        ln_mu,
    }
}

/// `(K, H, min_{[K,H]} f)` realizing the largest rectangle under `min_x f`.
pub fn plateau(f: &Reaction) -> Result<(f64, f64, f64), AnalysisError> {
    let est = compute_r(f, 1e-3);
    if !(est.area > 0.0) {
        return Err(AnalysisError::NotApplicable("R(f) = 0".into()));
    }
    let (k, h) = (est.lower, est.upper);
    let n = 10_000;
    let m = (0..=n).map(|i| f.min_over_x(k + (h - k) * i as f64 / n as f64)).fold(f64::INFINITY, f64::min);
    let theta = compute_theta(f, 1e-3).theta;
    if !(m > 0.0 && k > theta && h < 1.0) {
        return Err(AnalysisError::NotApplicable(format!("degenerate rectangle [{k}, {h}] with height {m}")));
    }
    Ok((k, h, m))
}

pub fn build_propdim_profile(f: &Reaction, lambda: f64, big_lambda: f64, beta: Beta) -> Result<SubsolutionProfile, AnalysisError> {
    if !(lambda > 0.0 && lambda <= big_lambda) {
        return Err(AnalysisError::Invalid(format!("need 0 < λ <= Λ, got {lambda}, {big_lambda}")));
    }
    let (k, h, m) = plateau(f)?;
    match beta {
        Beta::Fixed(b) => {
            if !(b >= 2.0) {
                return Err(AnalysisError::Invalid(format!("β = {b} < 2")));
            }
            Ok(profile_for_beta(h, k, m, lambda, big_lambda, b))
        }
        Beta::Auto => {
            let mut b = BETA_START;
            while b <= BETA_MAX {
                let p = profile_for_beta(h, k, m, lambda, big_lambda, b);
                if p.residuals().cap >= 0.0 {
                    return Ok(p);
                }
                b *= 2.0;
            }
            Err(AnalysisError::BetaSearchFailed { beta_max: BETA_MAX })
        }
    }
}

/// `min` over `n_samples` points of `[0, L]` and `A ∈ {λ, Λ}` of
/// `A h'' + B h' + f(h)`, with the exact derivatives. Returns the worst value and its `z`.
pub fn verify_propdim(p: &SubsolutionProfile, f: &Reaction, lambda: f64, big_lambda: f64, drift: f64, n_samples: usize) -> (f64, f64) {
    let mut worst = f64::INFINITY;
    let mut at = 0.0;
    for i in 0..n_samples {
        let z = p.z2 * (i as f64 + 0.5) / n_samples as f64;
        let (h, d1, d2) = p.eval(z);
        for a in [lambda, big_lambda] {
            let r = a * d2 + drift * d1 + f.min_over_x(h);
            if r < worst {
                worst = r;
                at = z;
            }
        }
    }
    (worst, at)
}

/// `v(t, x) = h(|x − center| − c̄ t − ρ)`.
#[derive(Debug, Clone)]
pub struct ExpandingSubsolution {
    pub profile: SubsolutionProfile,
    pub c_bar: f64,
    pub rho: f64,
    pub center: [f64; 2],
    pub dim: usize,
}

/// Checks `NΛ/ρ + c̄ + q_sup < B̄` and returns the radial barrier.
pub fn radial_expanding_subsolution(
    profile: &SubsolutionProfile,
    c_bar: f64,
    rho: f64,
    q_radial_sup: f64,
    dim: usize,
) -> Result<ExpandingSubsolution, AnalysisError> {
    let lhs = dim as f64 * profile.big_lambda / rho + c_bar + q_radial_sup;
    if !(rho > 0.0) || lhs >= profile.drift_bound {
        return Err(AnalysisError::RhoTooSmall { rho, lhs, bound: profile.drift_bound });
    }
    Ok(ExpandingSubsolution { profile: profile.clone(), c_bar, rho, center: [0.0, 0.0], dim })
}

impl ExpandingSubsolution {
    pub fn with_center(mut self, center: [f64; 2]) -> Self {
        self.center = center;
        self
    }

    pub fn eval(&self, t: f64, x: [f64; 2]) -> f64 {
        let r = (x[0] - self.center[0]).hypot(x[1] - self.center[1]);
        self.profile.eval(r - self.c_bar * t - self.rho).0
    }

    /// Largest `∂t v − a Δv − q_r ∂r v − f(v)` over `nt × nr` samples of the
    /// moving annulus, for isotropic diffusion `a ∈ {λ, Λ}` and radial drift `q_r`.
    pub fn verify(&self, f: &Reaction, q_radial: f64, t_end: f64, nt: usize, nr: usize) -> f64 {
        let p = &self.profile;
        let n1 = self.dim as f64 - 1.0;
        let mut worst = f64::NEG_INFINITY;
        for it in 0..nt {
            let t = t_end * it as f64 / (nt - 1).max(1) as f64;
            for ir in 0..nr {
                let z = p.z2 * (ir as f64 + 0.5) / nr as f64;
                let r = z + self.c_bar * t + self.rho;
                let (h, d1, d2) = p.eval(z);
                for a in [p.lambda, p.big_lambda] {
                    let res = -self.c_bar * d1 - a * (d2 + n1 / r * d1) - q_radial * d1 - f.min_over_x(h);
                    worst = worst.max(res);
                }
            }
        }
        worst
    }
}
