//! Immersed spheres sampled on two stereographic charts.
//!
//! The north chart sends `z` to `(2 Re z, 2 Im z, 1 - |z|^2) / (1 + |z|^2)`,
//! the south chart sends `w` to `(2 Re w, -2 Im w, |w|^2 - 1) / (1 + |w|^2)`;
//! on the overlap `w = 1/z`, so both charts induce the same orientation and
//! conformal structure. Each chart is an `n × n` lattice on the square
//! `[-ρ, ρ]^2` with `ρ = 1.2`. A sphere point is reported by the chart in
//! which its parameter is smaller (`|z| <= 1` north, `|w| < 1` south).

mod derivative;
mod fields;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ambient::RadialConformalFactor;
use crate::error::{GeometryError, Result};
use crate::Vec3;

pub use derivative::{complex_derivative, LatticeField};
pub use fields::{shape_field, ChartShape, Derivatives, ShapeField, ShapeSample};

/// Half-width of the parameter square of each chart.
pub const CHART_RADIUS: f64 = 1.2;
/// Smallest supported lattice: the doubly differentiated band must stay
/// outside the unit disk of owned parameters.
pub const MIN_GRID: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartId {
    North,
    South,
}

impl ChartId {
    pub fn name(self) -> &'static str {
        match self {
            ChartId::North => "north",
            ChartId::South => "south",
        }
    }

    /// Unit-sphere point of the chart parameter.
    pub fn sphere_point(self, z: Complex64) -> Vec3 {
        let d = 1.0 + z.norm_sqr();
        match self {
            ChartId::North => Vec3::new(2.0 * z.re, 2.0 * z.im, 1.0 - z.norm_sqr()) / d,
            ChartId::South => Vec3::new(2.0 * z.re, -2.0 * z.im, z.norm_sqr() - 1.0) / d,
        }
    }

    /// Chart parameter of a unit-sphere point (inverse of [`Self::sphere_point`]).
    pub fn parameter(self, w: &Vec3) -> Complex64 {
        match self {
            ChartId::North => Complex64::new(w[0], w[1]) / (1.0 + w[2]),
            ChartId::South => Complex64::new(w[0], -w[1]) / (1.0 - w[2]),
        }
    }

    pub fn other(self) -> ChartId {
        match self {
            ChartId::North => ChartId::South,
            ChartId::South => ChartId::North,
        }
    }
}

/// One stereographic lattice with the immersion sampled on it. Node `(i, j)`
/// sits at `z = (-ρ + iΔ) + (-ρ + jΔ) i`, stored at index `i * n + j`.
#[derive(Debug, Clone)]
pub struct Chart {
    pub id: ChartId,
    pub n: usize,
    pub rho: f64,
    pub spacing: f64,
    pub positions: Vec<Vec3>,
}

impl Chart {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    pub fn z(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(
            -self.rho + i as f64 * self.spacing,
            -self.rho + j as f64 * self.spacing,
        )
    }

    /// Whether this chart reports the sphere point at node `(i, j)`.
    pub fn owns(&self, i: usize, j: usize) -> bool {
        owns(self.id, self.z(i, j))
    }

    /// Fractional lattice coordinates of a parameter value.
    pub fn lattice_coords(&self, z: Complex64) -> (f64, f64) {
        (
            (z.re + self.rho) / self.spacing,
            (z.im + self.rho) / self.spacing,
        )
    }
}

pub(crate) fn owns(id: ChartId, z: Complex64) -> bool {
    match id {
        ChartId::North => z.norm_sqr() <= 1.0,
        ChartId::South => z.norm_sqr() < 1.0,
    }
}

/// A real spherical-harmonic term `amp * Y_lm` of a radial graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTerm {
    pub l: u32,
    pub m: i32,
    pub amp: f64,
}

/// Catalog of test surfaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SurfaceSpec {
    /// The level set `{t0} × S^2`, i.e. the Euclidean sphere `|x| = G^{-1}(t0)`.
    Slice { t0: f64 },
    /// `center + radius * ω`.
    EuclideanSphere { center: [f64; 3], radius: f64 },
    /// Radial graph `t = t0 + Σ amp Y_lm(ω)` over the slices.
    Graph { t0: f64, terms: Vec<HarmonicTerm> },
    /// `t = t0 + eps * Y_lm(ω)`.
    PerturbedSlice { t0: f64, eps: f64, l: u32, m: i32 },
    /// `(a ω1, b ω2, c ω3)`.
    Ellipsoid { semiaxes: [f64; 3] },
}

impl SurfaceSpec {
    /// Whether the stereographic charts are conformal for the induced metric.
    /// Euclidean-conformal charts stay conformal for `|dx|^2 / F^2`.
    pub fn is_conformal(&self) -> bool {
        matches!(
            self,
            SurfaceSpec::Slice { .. } | SurfaceSpec::EuclideanSphere { .. }
        )
    }

    fn position(&self, ambient: &RadialConformalFactor, w: &Vec3) -> Result<Vec3> {
        Ok(match self {
            SurfaceSpec::Slice { t0 } => w * ambient.g_inv(*t0)?,
            SurfaceSpec::EuclideanSphere { center, radius } => Vec3::from(*center) + w * *radius,
            SurfaceSpec::Graph { t0, terms } => {
                let t = t0
                    + terms
                        .iter()
                        .map(|term| term.amp * real_spherical_harmonic(term.l, term.m, w))
                        .sum::<f64>();
                w * ambient.g_inv(t)?
            }
            SurfaceSpec::PerturbedSlice { t0, eps, l, m } => {
                w * ambient.g_inv(t0 + eps * real_spherical_harmonic(*l, *m, w))?
            }
            SurfaceSpec::Ellipsoid { semiaxes } => {
                Vec3::new(semiaxes[0] * w[0], semiaxes[1] * w[1], semiaxes[2] * w[2])
            }
        })
    }
}

/// Orthonormal real spherical harmonic `Y_lm` at the unit vector `w`
/// (`m > 0`: cosine type, `m < 0`: sine type), evaluated through
/// `P_l^m(cos θ) / sin^m θ` so that it is smooth at the poles.
pub fn real_spherical_harmonic(l: u32, m: i32, w: &Vec3) -> f64 {
    let am = m.unsigned_abs();
    if am > l {
        return 0.0;
    }
    let x = w[2];
    // Reduced associated Legendre P_l^m(x) / (1 - x^2)^(m/2).
    let mut p_mm = 1.0;
    for k in 1..=am {
        p_mm *= (2 * k - 1) as f64;
    }
    let reduced = if l == am {
        p_mm
    } else {
        let mut prev = p_mm;
        let mut cur = x * (2 * am + 1) as f64 * p_mm;
        for ll in (am + 2)..=l {
            let next =
                ((2 * ll - 1) as f64 * x * cur - (ll + am - 1) as f64 * prev) / (ll - am) as f64;
            prev = cur;
            cur = next;
        }
        cur
    };
    let ratio: f64 = ((l - am + 1)..=(l + am)).map(|k| k as f64).product();
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) / ratio).sqrt();
    let azimuth = Complex64::new(w[0], w[1]).powu(am);
    match m.signum() {
        0 => norm * reduced,
        1 => std::f64::consts::SQRT_2 * norm * reduced * azimuth.re,
        _ => std::f64::consts::SQRT_2 * norm * reduced * azimuth.im,
    }
}

/// A discretised immersed sphere.
#[derive(Debug, Clone)]
pub struct ImmersionGrid {
    pub surface: SurfaceSpec,
    pub charts: [Chart; 2],
    pub conformal: bool,
    pub n: usize,
    pub spacing: f64,
}

impl ImmersionGrid {
    pub fn chart(&self, id: ChartId) -> &Chart {
        match id {
            ChartId::North => &self.charts[0],
            ChartId::South => &self.charts[1],
        }
    }
}

/// Sample `spec` on both charts with `n × n` nodes each.
pub fn build_surface(
    spec: &SurfaceSpec,
    ambient: &RadialConformalFactor,
    n: usize,
) -> Result<ImmersionGrid> {
    if n < MIN_GRID {
        return Err(GeometryError::GridTooSmall(n, MIN_GRID));
    }
    let rho = CHART_RADIUS;
    let spacing = 2.0 * rho / (n - 1) as f64;
    let build = |id: ChartId| -> Result<Chart> {
        let mut chart = Chart {
            id,
            n,
            rho,
            spacing,
            positions: Vec::with_capacity(n * n),
        };
        for i in 0..n {
            for j in 0..n {
                let w = id.sphere_point(chart.z(i, j));
                let x = spec
                    .position(ambient, &w)
                    .map_err(|e| GeometryError::SurfaceEscapes {
                        chart: id.name(),
                        i,
                        j,
                        reason: e.to_string(),
                    })?;
                if !ambient.contains(x.norm()) {
                    let (r0, r1) = ambient.annulus();
                    return Err(GeometryError::SurfaceEscapes {
                        chart: id.name(),
                        i,
                        j,
                        reason: format!("|X| = {} not in [{r0}, {r1}]", x.norm()),
                    });
                }
                chart.positions.push(x);
            }
        }
        Ok(chart)
    };
    Ok(ImmersionGrid {
        surface: spec.clone(),
        charts: [build(ChartId::North)?, build(ChartId::South)?],
        conformal: spec.is_conformal(),
        n,
        spacing,
    })
}

/// Per-node Beltrami coefficient `μ = (E - G + 2iF) / (4λ)` of the chart,
/// `λ = (E + G + 2 sqrt(EG - F^2)) / 4`. The value does not depend on the
/// conformal factor, so Euclidean `(E, F, G)` are used.
#[derive(Debug, Clone)]
pub struct ConformalityDefect {
    pub charts: [LatticeField<Complex64>; 2],
    /// Nodes where `EG - F^2 <= 0`.
    pub degenerate: Vec<(ChartId, usize, usize)>,
}

impl ConformalityDefect {
    /// Largest `|μ|` over the nodes each chart reports.
    pub fn max_abs_owned(&self) -> f64 {
        self.charts
            .iter()
            .zip([ChartId::North, ChartId::South])
            .flat_map(|(field, id)| {
                let n = field.n;
                (0..n * n).filter_map(move |k| {
                    let z = field.z(k / n, k % n);
                    if owns(id, z) {
                        field.values[k].map(|m| m.norm())
                    } else {
                        None
                    }
                })
            })
            .fold(0.0, f64::max)
    }

    /// Largest `|μ|` over every node where it is defined.
    pub fn max_abs(&self) -> f64 {
        self.charts
            .iter()
            .flat_map(|f| f.values.iter().flatten().map(|m| m.norm()))
            .fold(0.0, f64::max)
    }
}

pub fn conformality_defect(grid: &ImmersionGrid) -> ConformalityDefect {
    let mut degenerate = Vec::new();
    let charts = grid.charts.clone().map(|chart| {
        let n = chart.n;
        let values = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                let xu = derivative::d1(
                    &chart.positions,
                    n,
                    chart.spacing,
                    i,
                    j,
                    derivative::Axis::U,
                )?;
                let xv = derivative::d1(
                    &chart.positions,
                    n,
                    chart.spacing,
                    i,
                    j,
                    derivative::Axis::V,
                )?;
                let (e, f, g) = (xu.dot(&xu), xu.dot(&xv), xv.dot(&xv));
                let det = e * g - f * f;
                if !(det > 0.0) {
                    degenerate.push((chart.id, i, j));
                    return None;
                }
                let lambda = 0.25 * (e + g + 2.0 * det.sqrt());
                Some(Complex64::new(e - g, 2.0 * f) / (4.0 * lambda))
            })
            .collect();
        LatticeField {
            n,
            spacing: chart.spacing,
            rho: chart.rho,
            values,
        }
    });
    ConformalityDefect { charts, degenerate }
}
