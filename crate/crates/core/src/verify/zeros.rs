use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::immersion::{ChartId, ChartShape, ShapeField};

/// One isolated zero of the normalised Hopf function `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopfZero {
    pub chart: ChartId,
    pub i: usize,
    pub j: usize,
    /// Chart parameter of the lattice node nearest to the zero.
    pub z: [f64; 2],
    /// Euclidean position of that node.
    pub position: [f64; 3],
    pub abs_p: f64,
    /// Winding number of `p` around the zero; `None` if unresolved.
    pub winding: Option<i32>,
    /// Index `-w/2` of the line field `Im(p dz^2) = 0`.
    pub line_field_index: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HopfZeros {
    /// `p` vanishes to tolerance everywhere.
    Umbilic { max_abs_p: f64 },
    Isolated {
        zeros: Vec<HopfZero>,
        unresolved: Vec<HopfZero>,
        index_sum: f64,
    },
}

const CIRCLE_POINTS: usize = 16;
const RADII: [f64; 5] = [3.0, 2.0, 4.0, 1.5, 6.0];

/// Locate the zeros of `p` (the traceless second fundamental form in a
/// Gram-Schmidt frame, `2P/α` on conformal charts) and compute their winding
/// numbers on 16-point circles.
///
/// A zero candidate is an owned node whose `|p|` is minimal over its 5×5
/// neighbourhood and below `threshold · max |p|`. If `max |p| < umbilic_tol`
/// the surface is reported as umbilic. Candidates whose circle has winding 0
/// are not zeros and are dropped.
pub fn hopf_zero_indices(shape: &ShapeField, umbilic_tol: f64, threshold: f64) -> HopfZeros {
    let max_abs_p = shape
        .owned()
        .map(|(_, _, _, s)| s.p_frame.norm())
        .fold(0.0, f64::max);
    if max_abs_p < umbilic_tol {
        return HopfZeros::Umbilic { max_abs_p };
    }
    let mut zeros: Vec<HopfZero> = Vec::new();
    let mut unresolved = Vec::new();
    let merge_distance = 4.0 * shape.spacing;
    for chart in &shape.charts {
        for (i, j) in candidates(shape, chart, threshold * max_abs_p) {
            let s = chart.get(i, j).expect("candidate has a sample");
            let unit = chart.id.sphere_point(s.z);
            let seen = zeros
                .iter()
                .chain(unresolved.iter())
                .any(|zero: &HopfZero| {
                    let other = zero
                        .chart
                        .sphere_point(Complex64::new(zero.z[0], zero.z[1]));
                    zero.chart != chart.id && (other - unit).norm() < merge_distance
                });
            if seen {
                continue;
            }
            let winding = winding_number(chart, s.z);
            let zero = HopfZero {
                chart: chart.id,
                i,
                j,
                z: [s.z.re, s.z.im],
                position: [s.x[0], s.x[1], s.x[2]],
                abs_p: s.p_frame.norm(),
                winding,
                line_field_index: winding.map(|w| -f64::from(w) / 2.0),
            };
            match winding {
                Some(0) => {}
                Some(_) => zeros.push(zero),
                None => unresolved.push(zero),
            }
        }
    }
    let index_sum = zeros.iter().filter_map(|z| z.line_field_index).sum();
    HopfZeros::Isolated {
        zeros,
        unresolved,
        index_sum,
    }
}

fn candidates(shape: &ShapeField, chart: &ChartShape, level: f64) -> Vec<(usize, usize)> {
    let n = chart.n;
    let owned: Vec<_> = shape
        .owned()
        .filter(|(id, ..)| *id == chart.id)
        .map(|(_, i, j, s)| (i, j, s))
        .collect();
    owned
        .into_iter()
        .filter(|&(i, j, s)| {
            let value = s.p_frame.norm();
            if value >= level {
                return false;
            }
            for a in i.saturating_sub(2)..=(i + 2).min(n - 1) {
                for b in j.saturating_sub(2)..=(j + 2).min(n - 1) {
                    if (a, b) == (i, j) {
                        continue;
                    }
                    match chart.get(a, b) {
                        Some(o) => {
                            let other = o.p_frame.norm();
                            // Ties go to the first node in lattice order.
                            if other < value || (other == value && (a, b) < (i, j)) {
                                return false;
                            }
                        }
                        None => return false,
                    }
                }
            }
            true
        })
        .map(|(i, j, _)| (i, j))
        .collect()
}

fn winding_number(chart: &ChartShape, center: Complex64) -> Option<i32> {
    'radius: for factor in RADII {
        let radius = factor * chart.spacing;
        let mut phases = Vec::with_capacity(CIRCLE_POINTS);
        for k in 0..CIRCLE_POINTS {
            let angle = 2.0 * PI * k as f64 / CIRCLE_POINTS as f64;
            let z = center + Complex64::from_polar(radius, angle);
            let Some([re, im]) = chart.interpolate(z, |s| Some([s.p_frame.re, s.p_frame.im]))
            else {
                continue 'radius;
            };
            phases.push(im.atan2(re));
        }
        let mut total = 0.0;
        for k in 0..CIRCLE_POINTS {
            let mut step = phases[(k + 1) % CIRCLE_POINTS] - phases[k];
            step -= 2.0 * PI * (step / (2.0 * PI)).round();
            if step.abs() >= FRAC_PI_2 {
                continue 'radius;
            }
            total += step;
        }
        return Some((total / (2.0 * PI)).round() as i32);
    }
    None
}
