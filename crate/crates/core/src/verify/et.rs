use serde::{Deserialize, Serialize};

use super::holo_scalar;
use crate::error::Result;
use crate::immersion::ShapeField;
use crate::numerics::CompensatedSum;
use crate::warp::WarpingModel;

/// Pointwise terms of the inequality
/// `|dH + (K_tan - K_rad) ν dt| <= f sqrt(H^2 - K + K_tan - (1 - ν^2)(K_tan - K_rad))`
/// over the owned nodes of a shape field, in [`ShapeField::owned_complete`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtReport {
    pub lhs: Vec<f64>,
    pub radicand: Vec<f64>,
    /// Smallest admissible `f`; `None` at umbilic points (radicand at or below the floor).
    pub f_min: Vec<Option<f64>>,
    pub sup_f_min: f64,
    pub norm_p: f64,
    pub p: f64,
}

impl EtReport {
    pub fn umbilic_count(&self) -> usize {
        self.f_min.iter().filter(|f| f.is_none()).count()
    }

    pub fn min_radicand(&self) -> f64 {
        self.radicand.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Evaluate the inequality terms on `shape`. The covector norm uses
/// `|ω| = (2/√α)|ω_z|` on conformal charts and the inverse first fundamental
/// form otherwise; `‖f_min‖_p` integrates against the induced area element.
///
/// `K` in the radicand is taken as `κ1 κ2 + K̄(TΣ)`, so the radicand carries
/// only first-layer finite-difference error.
pub fn et_test(
    shape: &ShapeField,
    model: &WarpingModel,
    p: f64,
    rad_floor: f64,
) -> Result<EtReport> {
    let mut lhs = Vec::new();
    let mut radicand = Vec::new();
    let mut f_min = Vec::new();
    let mut integral = CompensatedSum::default();
    let mut sup: f64 = 0.0;
    let cell = shape.spacing * shape.spacing;
    for (_, _, _, s, d) in shape.owned_complete() {
        let (k_tan, k_rad) = model.curvatures(s.t)?;
        let gap = k_tan - k_rad;
        let w = (
            d.h_grad.0 + gap * s.nu * s.t_grad.0,
            d.h_grad.1 + gap * s.nu * s.t_grad.1,
        );
        let norm = if shape.conformal {
            2.0 / s.alpha.sqrt() * holo_scalar(w.0, w.1).norm()
        } else {
            s.covector_norm(w.0, w.1)
        };
        let rad = s.h * s.h - (s.k_ext + s.kbar_t) + k_tan - (1.0 - s.nu * s.nu) * gap;
        let f = (rad > rad_floor).then(|| norm / rad.sqrt());
        if let Some(f) = f {
            sup = sup.max(f);
            integral.add(f.powf(p) * s.area * cell);
        }
        lhs.push(norm);
        radicand.push(rad);
        f_min.push(f);
    }
    Ok(EtReport {
        lhs,
        radicand,
        f_min,
        sup_f_min: sup,
        norm_p: integral.total().powf(1.0 / p),
        p,
    })
}
