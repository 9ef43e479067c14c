use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::solver::Trajectory;

/// Fraction of the record used by [`measure_speed`].
pub const SPEED_WINDOW: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedFit {
    pub speed: f64,
    pub intercept: f64,
    pub r2: f64,
    pub samples: usize,
}

/// Least-squares line through the finite `(t, x)` pairs with `t` in the
/// trailing `fraction` of the time span.
pub fn fit_speed(times: &[f64], positions: &[f64], fraction: f64) -> Result<SpeedFit, AnalysisError> {
    let (Some(&t0), Some(&t1)) = (times.first(), times.last()) else {
        return Err(AnalysisError::LevelNeverCrossed);
    };
    let start = t1 - fraction * (t1 - t0);
    let pts: Vec<(f64, f64)> = times.iter().zip(positions).filter(|(t, x)| **t >= start - 1e-12 && x.is_finite()).map(|(t, x)| (*t, *x)).collect();
    if pts.is_empty() {
        return Err(AnalysisError::LevelNeverCrossed);
    }
    let n = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let xm = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let stt: f64 = pts.iter().map(|p| (p.0 - tm).powi(2)).sum();
    let stx: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - xm)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.1 - xm).powi(2)).sum();
    if pts.len() < 2 || stt == 0.0 {
        return Ok(SpeedFit { speed: 0.0, intercept: xm, r2: 0.0, samples: pts.len() });
    }
    let speed = stx / stt;
    let r2 = if sxx > 0.0 { stx * stx / (stt * sxx) } else { 1.0 };
    Ok(SpeedFit { speed, intercept: xm - speed * tm, r2, samples: pts.len() })
}

/// Speed of a front-position probe column over the trailing half of the run.
pub fn measure_speed(traj: &Trajectory, probe: &str) -> Result<SpeedFit, AnalysisError> {
    let col = traj.column(probe).ok_or_else(|| AnalysisError::MissingProbe(probe.into()))?;
    fit_speed(&traj.times, &col, SPEED_WINDOW)
}
