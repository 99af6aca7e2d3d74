use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::immersion::ShapeField;
use crate::warp::WarpingModel;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ClassifyTolerances {
    /// Absolute umbilicity tolerance; defaults to `1e-5 (1 + max |H|)`.
    pub umbilic_tol: Option<f64>,
}

impl ClassifyTolerances {
    pub fn resolve(&self, max_abs_h: f64) -> f64 {
        self.umbilic_tol.unwrap_or(1e-5 * (1.0 + max_abs_h))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub umbilic: bool,
    pub cmc: bool,
    pub slice: bool,
    /// Fraction of nodes with `ν = 0` (within tolerance).
    #[serde(rename = "D1_fraction")]
    pub d1_fraction: f64,
    /// Fraction of nodes with `dt = 0` (within tolerance).
    #[serde(rename = "D2_fraction")]
    pub d2_fraction: f64,
    /// `max (κ1 - κ2)`.
    pub kappa_spread: f64,
    /// `max H - min H`.
    pub h_spread: f64,
    /// Fraction of nodes where `|K_tan - K_rad|` is within tolerance of zero.
    pub curvature_gap_zero_fraction: f64,
    pub tolerance: f64,
}

/// Umbilic / constant-mean-curvature / slice verdicts over the owned nodes.
pub fn classify(
    shape: &ShapeField,
    model: &WarpingModel,
    tol: ClassifyTolerances,
) -> Result<Verdict> {
    let samples: Vec<_> = shape.owned().map(|(_, _, _, s)| s).collect();
    let max_abs_h = samples.iter().map(|s| s.h.abs()).fold(0.0, f64::max);
    let tol = tol.resolve(max_abs_h);
    let (mut h_min, mut h_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut spread, mut max_dt, mut min_nu2): (f64, f64, f64) = (0.0, 0.0, f64::INFINITY);
    let (mut d1, mut d2, mut gap_zero) = (0usize, 0usize, 0usize);
    for s in &samples {
        h_min = h_min.min(s.h);
        h_max = h_max.max(s.h);
        spread = spread.max(s.kappa1 - s.kappa2);
        let dt = s.covector_norm(s.t_grad.0, s.t_grad.1);
        max_dt = max_dt.max(dt);
        min_nu2 = min_nu2.min(s.nu * s.nu);
        d1 += usize::from(s.nu.abs() < tol);
        d2 += usize::from(dt < tol);
        let (k_tan, k_rad) = model.curvatures(s.t)?;
        gap_zero += usize::from((k_tan - k_rad).abs() < tol);
    }
    let count = samples.len().max(1) as f64;
    let h_spread = h_max - h_min;
    Ok(Verdict {
        umbilic: 0.25 * spread * spread < tol * tol,
        cmc: h_spread < tol,
        slice: max_dt < tol && min_nu2 > 1.0 - tol,
        d1_fraction: d1 as f64 / count,
        d2_fraction: d2 as f64 / count,
        kappa_spread: spread,
        h_spread,
        curvature_gap_zero_fraction: gap_zero as f64 / count,
        tolerance: tol,
    })
}
