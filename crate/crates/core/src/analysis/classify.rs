//! Finite-horizon surrogate for blocking / persistence / invasion.
//!
//! Statistics are taken over the trailing `tail_fraction` of the record.
//! A statistic that is still moving toward the opposite verdict by more than
//! `drift_tol` makes the result `Inconclusive`; drift in the favourable
//! direction (a blocked solution still decaying) is accepted.

use serde::{Deserialize, Serialize};

use super::speed::{fit_speed, SpeedFit, SPEED_WINDOW};
use super::AnalysisError;
use crate::solver::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    Blocking,
    Persistence,
    Invasion,
    OrientedInvasion,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyConfig {
    pub eps_inv: f64,
    pub delta_blk: f64,
    /// `compact_min_tail` above this counts as persistence.
    pub persistence_floor: f64,
    pub tail_fraction: f64,
    pub drift_tol: f64,
    /// Probe holding the global sup.
    pub sup_probe: String,
    /// Window-min probes over the compacts.
    pub compact_probes: Vec<String>,
    /// Window-max probes near the ends of the computational window; they must
    /// stay below `delta_blk` for a Blocking or Persistence verdict.
    pub edge_probes: Vec<String>,
    pub front_right: Option<String>,
    pub front_left: Option<String>,
    /// Window-max probe over the region behind the datum; enables OrientedInvasion.
    /// The leading front is `front_right`, or `front_left` (moving left) when
    /// `front_right` is unset.
    pub left_region: Option<String>,
    /// Bound on `left_region` for OrientedInvasion.
    pub left_region_max: f64,
    /// Leading fraction of the horizon ignored for `left_region`.
    pub transient_fraction: f64,
    pub min_r2: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            eps_inv: 0.05,
            delta_blk: 0.2,
            persistence_floor: 1e-3,
            tail_fraction: 0.2,
            drift_tol: 0.02,
            sup_probe: "sup".into(),
            compact_probes: Vec::new(),
            edge_probes: Vec::new(),
            front_right: None,
            front_left: None,
            left_region: None,
            left_region_max: 0.1,
            transient_fraction: 0.05,
            min_r2: 0.99,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Set whenever `compact_min_tail` stays above the floor, whatever `kind` is.
    pub persistence: bool,
    pub sup_tail: f64,
    pub compact_min_tail: f64,
    pub edge_max_tail: f64,
    pub speed_right: Option<SpeedFit>,
    pub speed_left: Option<SpeedFit>,
    pub left_region_sup: Option<f64>,
    pub eps_inv: f64,
    pub delta_blk: f64,
    pub notes: Vec<String>,
}

impl Verdict {
    /// Blocking or Invasion with the persistence flag also count as Persistence.
    pub fn is(&self, kind: VerdictKind) -> bool {
        self.kind == kind
            || (kind == VerdictKind::Persistence
                && self.persistence
                && matches!(self.kind, VerdictKind::Blocking | VerdictKind::Invasion))
    }
}

fn column(traj: &Trajectory, name: &str) -> Result<Vec<f64>, AnalysisError> {
    traj.column(name).ok_or_else(|| AnalysisError::MissingProbe(name.into()))
}

/// `(max, min, first, last)` of a column over the rows with `t >= start`.
fn tail_stats(times: &[f64], col: &[f64], start: f64) -> (f64, f64, f64, f64) {
    let vals: Vec<f64> = times.iter().zip(col).filter(|(t, _)| **t >= start - 1e-12).map(|(_, v)| *v).collect();
    let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    (max, min, vals.first().copied().unwrap_or(f64::NAN), vals.last().copied().unwrap_or(f64::NAN))
}

pub fn classify(traj: &Trajectory, cfg: &ClassifyConfig) -> Result<Verdict, AnalysisError> {
    if traj.len() < 2 {
        return Err(AnalysisError::Invalid("trajectory needs at least two records".into()));
    }
    let t0 = traj.times[0];
    let t1 = *traj.times.last().unwrap();
    let start = t1 - cfg.tail_fraction * (t1 - t0);
    let times = &traj.times;
    let mut notes = Vec::new();

    let sup = column(traj, &cfg.sup_probe)?;
    let (sup_tail, _, sup_first, sup_last) = tail_stats(times, &sup, start);
    let sup_rising = sup_last - sup_first > cfg.drift_tol;

    let mut compact_min_tail = f64::INFINITY;
    let mut compact_falling = false;
    for name in &cfg.compact_probes {
        let col = column(traj, name)?;
        let (_, min, first, last) = tail_stats(times, &col, start);
        compact_min_tail = compact_min_tail.min(min);
        if first > 0.0 && (first - last) / first > cfg.drift_tol {
            compact_falling = true;
        }
    }
    if cfg.compact_probes.is_empty() {
        compact_min_tail = f64::NAN;
    }

    let mut edge_max_tail = f64::NEG_INFINITY;
    for name in &cfg.edge_probes {
        let col = column(traj, name)?;
        edge_max_tail = edge_max_tail.max(tail_stats(times, &col, start).0);
    }
    let edges_quiet = cfg.edge_probes.is_empty() || edge_max_tail < cfg.delta_blk;

    let speed_right = match &cfg.front_right {
        Some(n) => fit_speed(times, &column(traj, n)?, SPEED_WINDOW).ok(),
        None => None,
    };
    let speed_left = match &cfg.front_left {
        Some(n) => fit_speed(times, &column(traj, n)?, SPEED_WINDOW).ok(),
        None => None,
    };
    let left_region_sup = match &cfg.left_region {
        Some(n) => {
            let col = column(traj, n)?;
            let after = t0 + cfg.transient_fraction * (t1 - t0);
            Some(tail_stats(times, &col, after).0)
        }
        None => None,
    };

    let persistence = compact_min_tail > cfg.persistence_floor && !compact_falling;
    let invasion = compact_min_tail > 1.0 - cfg.eps_inv;
    let blocking = sup_tail < 1.0 - cfg.delta_blk && !sup_rising;

    let kind = if let Some(left) = left_region_sup {
        // The leading front is `front_right`; a mirrored run names only `front_left`.
        let fit_ok = match (&cfg.front_right, &speed_left) {
            (None, Some(s)) => s.speed < 0.0 && s.r2 > cfg.min_r2,
            _ => speed_right.is_some_and(|s| s.speed > 0.0 && s.r2 > cfg.min_r2),
        };
        if !fit_ok {
            notes.push(format!("leading front fit {:?} fails |slope| > 0, R² > {}", speed_right.or(speed_left), cfg.min_r2));
        }
        if left >= cfg.left_region_max {
            notes.push(format!("left region sup {left} >= {}", cfg.left_region_max));
        }
        if fit_ok && left < cfg.left_region_max {
            VerdictKind::OrientedInvasion
        } else if invasion {
            VerdictKind::Invasion
        } else {
            VerdictKind::Inconclusive
        }
    } else if invasion {
        VerdictKind::Invasion
    } else if blocking && edges_quiet {
        VerdictKind::Blocking
    } else if persistence && edges_quiet && !sup_rising {
        VerdictKind::Persistence
    } else {
        if !edges_quiet {
            notes.push(format!("solution reached the window edge ({edge_max_tail})"));
        }
        if sup_rising {
            notes.push(format!("sup still rising over the tail ({sup_first} -> {sup_last})"));
        }
        if compact_falling {
            notes.push("compact minimum still falling over the tail".into());
        }
        VerdictKind::Inconclusive
    };

    Ok(Verdict {
        kind,
        persistence,
        sup_tail,
        compact_min_tail,
        edge_max_tail: if cfg.edge_probes.is_empty() { f64::NAN } else { edge_max_tail },
        speed_right,
        speed_left,
        left_region_sup,
        eps_inv: cfg.eps_inv,
        delta_blk: cfg.delta_blk,
        notes,
    })
}
