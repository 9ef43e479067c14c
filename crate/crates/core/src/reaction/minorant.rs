use super::{compute_theta, Nonlinearity, Reaction, ReactionError, ReactionKind};

const TABLE_POINTS: usize = 2000;

/// x-independent combustion-type minorant: zero on `[0, θ+eps]` and
/// `0 < f̃ <= min_x f / (1+mu)` on `(θ+eps, 1)`, capped by linear ramps of slope
/// `lipschitz` at both ends.
pub fn make_combustion_minorant(f: &Reaction, eps: f64, mu: f64) -> Result<Reaction, ReactionError> {
    let theta = compute_theta(f, 1e-3).theta;
    let cut = theta + eps;
    if !(eps > 0.0) || cut >= 1.0 {
        return Err(ReactionError::EpsTooLarge { eps, theta });
    }
    let lip = f.lipschitz;
    let value = |s: f64| -> f64 {
        if s <= cut {
            0.0
        } else {
            (f.nl.min_over_x(s) / (1.0 + mu)).min(lip * (s - cut)).min(lip * (1.0 - s)).max(0.0)
        }
    };
    let mut knots: Vec<[f64; 2]> = (0..=TABLE_POINTS)
        .map(|k| k as f64 / TABLE_POINTS as f64)
        .filter(|s| *s < cut)
        .map(|s| [s, 0.0])
        .collect();
    knots.push([cut, 0.0]);
    for k in 0..=TABLE_POINTS {
        let s = k as f64 / TABLE_POINTS as f64;
        if s > cut {
            knots.push([s, value(s)]);
        }
    }
    // Linear interpolation can overshoot a convex stretch of min f; shrink
    // until a 10x finer scan confirms domination.
    let fine = 10 * TABLE_POINTS;
    for _ in 0..50 {
        let nl = Nonlinearity::PiecewiseLinear { knots: knots.clone() };
        let ok = (0..=fine).all(|k| {
            let s = k as f64 / fine as f64;
            s <= cut || nl.value([0.0, 0.0], s) <= f.nl.min_over_x(s)
        });
        if ok {
            let mut r = Reaction::new(nl)?;
            r.kind = ReactionKind::Combustion;
            return Ok(r);
        }
        for k in knots.iter_mut() {
            k[1] *= 0.99;
        }
    }
    Err(ReactionError::Invalid("could not build a dominated minorant".into()))
}

/// Lipschitz nonlinearity on `[-mu, 1-mu]` lying below `f` (extended by 0
/// for negative arguments), vanishing at both ends and positively
/// unbalanced. Used to build travelling subsolutions.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedMinorant {
    pub mu: f64,
    pub theta: f64,
    /// Curvature of the negative lobe `-a (s+mu)(theta-s)`.
    pub a: f64,
    pub source: Reaction,
}

impl ShiftedMinorant {
    pub fn eval(&self, s: f64) -> f64 {
        let (mu, theta) = (self.mu, self.theta);
        if s <= theta {
            -self.a * (s + mu) * (theta - s)
        } else {
            let top = 1.0 - mu;
            (self.source.nl.min_over_x(s.min(1.0)) / (1.0 + mu)).min(self.source.lipschitz * (top - s))
        }
    }

    /// Upper state of the shifted problem.
    pub fn upper(&self) -> f64 {
        1.0 - self.mu
    }

    /// Lower state of the shifted problem.
    pub fn lower(&self) -> f64 {
        -self.mu
    }

    pub fn lipschitz(&self) -> f64 {
        (self.a * (self.theta + self.mu)).max(self.source.lipschitz)
    }

    pub fn integral(&self) -> f64 {
        let n = 20_000;
        let (a, b) = (self.lower(), self.upper());
        let h = (b - a) / n as f64;
        (0..n).map(|k| self.eval(a + (k as f64 + 0.5) * h)).sum::<f64>() * h
    }

    /// `f(max(s, 0))` with `f = min_x f` extended by 0 below 0.
    pub fn dominating(&self, s: f64) -> f64 {
        if s <= 0.0 {
            0.0
        } else {
            self.source.min_over_x(s)
        }
    }
}

pub fn make_front_minorant(f: &Reaction, mu: f64) -> Result<ShiftedMinorant, ReactionError> {
    let theta = compute_theta(f, 1e-3).theta;
    if !(mu > 0.0 && mu < 1.0 - theta) {
        return Err(ReactionError::EpsTooLarge { eps: mu, theta });
    }
    let mut sup: f64 = 0.0;
    let n = 4000;
    for k in 1..n {
        let s = theta * k as f64 / n as f64;
        let g = f.nl.min_over_x(s);
        sup = sup.max(-g / ((s + mu) * (theta - s)));
    }
    let a = (1.1 * sup).max(1e-3);
    let m = ShiftedMinorant { mu, theta, a, source: f.clone() };
    let integral = m.integral();
    if integral <= 0.0 {
        return Err(ReactionError::NotUnbalanced { integral });
    }
    Ok(m)
}
