//! Initial data.

use std::sync::Arc;

use super::Field;
use crate::geometry::{DomainMask, Point};

/// C¹ ramp from 1 (for `x·e ≤ shift − width/2`) to 0 (for `x·e ≥ shift + width/2`).
/// `width = 0` gives the half-space indicator, with 1/2 on the hyperplane.
pub fn make_front_like(mask: Arc<DomainMask>, e: Point, shift: f64, width: f64) -> Field {
    let norm = e[0].hypot(e[1]);
    let e = [e[0] / norm, e[1] / norm];
    Field::from_fn(mask, |x| front_ramp(x[0] * e[0] + x[1] * e[1] - shift, width))
}

pub fn front_ramp(z: f64, width: f64) -> f64 {
    if width <= 0.0 {
        return if z < 0.0 {
            1.0
        } else if z > 0.0 {
            0.0
        } else {
            0.5
        };
    }
    let t = (z / width + 0.5).clamp(0.0, 1.0);
    1.0 - t * t * (3.0 - 2.0 * t)
}

/// `height` on the fluid part of `B_radius(center)`, decaying linearly to 0
/// over one cell outside it.
pub fn make_bump(mask: Arc<DomainMask>, center: Point, radius: f64, height: f64) -> Field {
    let h = mask.grid.h;
    let one_d = mask.dim() == 1;
    Field::from_fn(mask, |x| {
        let dy = if one_d { 0.0 } else { x[1] - center[1] };
        let r = (x[0] - center[0]).hypot(dy);
        height * ((radius + h - r) / h).clamp(0.0, 1.0)
    })
}
