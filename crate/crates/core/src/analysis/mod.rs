//! Long-time classification of recorded runs, front-speed fits, the `w*`
//! bound and the explicit subsolution profile behind it.

pub mod classify;
pub mod propdim;
pub mod speed;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use classify::{classify, ClassifyConfig, Verdict, VerdictKind};
pub use propdim::{
    build_propdim_profile, plateau, radial_expanding_subsolution, verify_propdim, AlgebraicResiduals, Beta, ExpandingSubsolution,
    SubsolutionProfile,
};
pub use speed::{fit_speed, measure_speed, SpeedFit};

use crate::reaction::{compute_r, Reaction};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("level never crossed in the fit window")]
    LevelNeverCrossed,
    #[error("no β <= {beta_max} satisfies the cap relation")]
    BetaSearchFailed { beta_max: f64 },
    #[error("ρ = {rho} too small: {lhs} >= {bound}")]
    RhoTooSmall { rho: f64, lhs: f64, bound: f64 },
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("unknown probe {0:?}")]
    MissingProbe(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// `(λ/√Λ)√R − limsup q·x/|x|`; `applicable` is false when it is not positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WStar {
    pub value: f64,
    pub applicable: bool,
}

pub fn w_star_from_r(r: f64, lambda: f64, big_lambda: f64, q_radial_limsup: f64) -> WStar {
    let value = lambda / big_lambda.sqrt() * r.max(0.0).sqrt() - q_radial_limsup;
    WStar { value, applicable: value > 0.0 }
}

pub fn w_star(f: &Reaction, lambda: f64, big_lambda: f64, q_radial_limsup: f64) -> WStar {
    w_star_from_r(compute_r(f, 1e-3).area, lambda, big_lambda, q_radial_limsup)
}
