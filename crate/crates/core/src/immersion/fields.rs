use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use super::derivative::{d1, d2, d_uv, Axis, LatticeField};
use super::{owns, Chart, ChartId, ImmersionGrid, SurfaceSpec};
use crate::ambient::{sectional_with, ProfileValues, RadialConformalFactor};
use crate::error::{GeometryError, Result};
use crate::numerics::lagrange_weights;
use crate::Vec3;

/// Quantities that need two layers of differencing (width-4 boundary band).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    /// Gaussian curvature of the induced metric.
    pub k: f64,
    /// `(∂u H, ∂v H)`.
    pub h_grad: (f64, f64),
    /// `∂P/∂z̄` (conformal charts only).
    pub p_zbar: Option<Complex64>,
    /// `(∂u N_F, ∂v N_F)`.
    pub normal_grad: (Vec3, Vec3),
}

/// Geometry of the immersed surface at one lattice node.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSample {
    pub z: Complex64,
    pub x: Vec3,
    pub r: f64,
    /// Warped-product height `t = G(|X|)`.
    pub t: f64,
    pub profile: ProfileValues,
    pub xu: Vec3,
    pub xv: Vec3,
    /// `(X_uu, X_uv, X_vv)`.
    pub x2: [Vec3; 3],
    /// `(E, F, G)` of the induced metric.
    pub first: [f64; 3],
    /// `(L, M, N)`: `II(X_a, X_b) = <∇_{X_a} X_b, N_F>_F`.
    pub second: [f64; 3],
    /// `2<X_z, X_z̄>_F` on conformal charts, `sqrt(EG - F^2)` otherwise.
    pub alpha: f64,
    /// `sqrt(EG - F^2)`.
    pub area: f64,
    /// `N_F` in Euclidean components (Euclidean length `F`).
    pub normal: Vec3,
    pub h: f64,
    pub k_ext: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub nu: f64,
    /// Hopf value `P = <∇_{X_z} X_z, N_F>_F` (conformal charts only).
    pub p: Option<Complex64>,
    /// Traceless second fundamental form `(II11 - II22)/2 - i II12` in the
    /// Gram-Schmidt frame of `(X_u, X_v)`; equals `2P/α` on conformal charts.
    pub p_frame: Complex64,
    /// Ambient sectional curvature of the tangent plane.
    pub kbar_t: f64,
    /// Same, from the Hessian formula `-|∇F|^2 + 4 Hess F(X_z, X_z̄)/(αF)` (conformal charts only).
    pub kbar_t_hessian: Option<f64>,
    pub t_grad: (f64, f64),
    pub r_grad: (f64, f64),
    pub derivatives: Option<Derivatives>,
}

impl ShapeSample {
    /// `|p|^2 = (κ1 - κ2)^2 / 4`.
    pub fn umbilicity(&self) -> f64 {
        0.25 * (self.kappa1 - self.kappa2).powi(2)
    }

    /// Inverse of the induced metric `(g^uu, g^uv, g^vv)`.
    pub fn inverse_metric(&self) -> (f64, f64, f64) {
        let [e, f, g] = self.first;
        let det = e * g - f * f;
        (g / det, -f / det, e / det)
    }

    /// Norm of the covector `a du + b dv` in the induced metric.
    pub fn covector_norm(&self, a: f64, b: f64) -> f64 {
        let (guu, guv, gvv) = self.inverse_metric();
        (guu * a * a + 2.0 * guv * a * b + gvv * b * b)
            .max(0.0)
            .sqrt()
    }
}

/// Shape samples of one chart, indexed like its lattice.
#[derive(Debug, Clone)]
pub struct ChartShape {
    pub id: ChartId,
    pub n: usize,
    pub rho: f64,
    pub spacing: f64,
    pub samples: Vec<Option<ShapeSample>>,
}

impl ChartShape {
    pub fn get(&self, i: usize, j: usize) -> Option<&ShapeSample> {
        self.samples[i * self.n + j].as_ref()
    }

    fn field<T: Copy>(&self, f: impl Fn(&ShapeSample) -> Option<T>) -> LatticeField<T> {
        LatticeField {
            n: self.n,
            spacing: self.spacing,
            rho: self.rho,
            values: self
                .samples
                .iter()
                .map(|s| s.as_ref().and_then(&f))
                .collect(),
        }
    }
}

/// Per-node geometry of an immersed sphere on both charts.
#[derive(Debug, Clone)]
pub struct ShapeField {
    pub surface: SurfaceSpec,
    pub conformal: bool,
    pub n: usize,
    pub spacing: f64,
    pub charts: [ChartShape; 2],
}

impl ShapeField {
    pub fn chart(&self, id: ChartId) -> &ChartShape {
        match id {
            ChartId::North => &self.charts[0],
            ChartId::South => &self.charts[1],
        }
    }

    /// Samples reported by their owning chart, in lattice order (north first).
    pub fn owned(&self) -> impl Iterator<Item = (ChartId, usize, usize, &ShapeSample)> + '_ {
        self.charts.iter().flat_map(|chart| {
            let n = chart.n;
            (0..n * n).filter_map(move |k| {
                let sample = chart.samples[k].as_ref()?;
                owns(chart.id, sample.z).then_some((chart.id, k / n, k % n, sample))
            })
        })
    }

    /// Owned samples that also carry second-layer derivatives.
    pub fn owned_complete(
        &self,
    ) -> impl Iterator<Item = (ChartId, usize, usize, &ShapeSample, &Derivatives)> + '_ {
        self.owned()
            .filter_map(|(id, i, j, s)| s.derivatives.as_ref().map(|d| (id, i, j, s, d)))
    }

    /// Largest disagreement of the chart-independent scalars between a north
    /// sample near the equator and the south field interpolated at the same
    /// sphere point (6×6 Lagrange), with the number of compared points.
    pub fn chart_consistency(&self) -> (f64, usize) {
        let north = self.chart(ChartId::North);
        let south = self.chart(ChartId::South);
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for sample in north.samples.iter().flatten() {
            let modulus = sample.z.norm();
            if !(modulus > 0.92 && modulus <= 1.0) {
                continue;
            }
            let Some(own) = sample.derivatives else {
                continue;
            };
            let w = 1.0 / sample.z;
            let Some(other) = south.interpolate(w, |s| s.derivatives.map(|d| scalars(s, d.k)))
            else {
                continue;
            };
            for (a, b) in scalars(sample, own.k).iter().zip(other.iter()) {
                worst = worst.max((a - b).abs());
            }
            count += 1;
        }
        (worst, count)
    }

    /// CSV dump of the owned samples.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(
            out,
            "chart,i,j,z_re,z_im,X1,X2,X3,alpha,H,K,nu,kappa1,kappa2,P_re,P_im"
        )?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for (id, i, j, s) in self.owned() {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                id.name(),
                i,
                j,
                s.z.re,
                s.z.im,
                s.x[0],
                s.x[1],
                s.x[2],
                s.alpha,
                s.h,
                opt(s.derivatives.map(|d| d.k)),
                s.nu,
                s.kappa1,
                s.kappa2,
                opt(s.p.map(|p| p.re)),
                opt(s.p.map(|p| p.im)),
            )?;
        }
        Ok(())
    }
}

fn scalars(s: &ShapeSample, k: f64) -> [f64; 7] {
    [s.h, k, s.nu, s.kappa1, s.kappa2, s.kbar_t, s.umbilicity()]
}

impl ChartShape {
    /// 6×6 Lagrange interpolation of per-sample values at chart parameter `z`;
    /// `None` when the stencil leaves the lattice or meets an undefined value.
    pub fn interpolate<const D: usize>(
        &self,
        z: Complex64,
        value: impl Fn(&ShapeSample) -> Option<[f64; D]>,
    ) -> Option<[f64; D]> {
        let fi = (z.re + self.rho) / self.spacing;
        let fj = (z.im + self.rho) / self.spacing;
        let (si, sj) = (fi.floor() as isize - 2, fj.floor() as isize - 2);
        if si < 0 || sj < 0 || si + 6 > self.n as isize || sj + 6 > self.n as isize {
            return None;
        }
        let (wi, wj) = (lagrange_weights(si, 6, fi), lagrange_weights(sj, 6, fj));
        let mut acc = [0.0; D];
        for (a, wa) in wi.iter().enumerate() {
            for (b, wb) in wj.iter().enumerate() {
                let s = self.get(si as usize + a, sj as usize + b)?;
                let v = value(s)?;
                for (slot, x) in acc.iter_mut().zip(v) {
                    *slot += wa * wb * x;
                }
            }
        }
        Some(acc)
    }
}

fn gamma(g: &Vec3, a: &Vec3, b: &Vec3) -> Vec3 {
    b * -a.dot(g) - a * b.dot(g) + g * a.dot(b)
}

fn first_layer(
    chart: &Chart,
    heights: &[f64],
    radii: &[f64],
    profiles: &[ProfileValues],
    conformal: bool,
    i: usize,
    j: usize,
) -> Option<ShapeSample> {
    let (n, step) = (chart.n, chart.spacing);
    let pos = &chart.positions;
    let xu = d1(pos, n, step, i, j, Axis::U)?;
    let xv = d1(pos, n, step, i, j, Axis::V)?;
    let xuu = d2(pos, n, step, i, j, Axis::U)?;
    let xvv = d2(pos, n, step, i, j, Axis::V)?;
    let xuv = d_uv(pos, n, step, i, j)?;
    let k = chart.index(i, j);
    let x = pos[k];
    let r = radii[k];
    let v = profiles[k];
    let f = v.u;
    let f2 = f * f;
    let grad_log_f = x * (v.du_over_r / f);

    let cross = xu.cross(&xv);
    let cross_norm = cross.norm();
    if !(cross_norm > 0.0) {
        return None;
    }
    let nhat = cross / cross_norm;
    let (e, ff, g) = (xu.dot(&xu) / f2, xu.dot(&xv) / f2, xv.dot(&xv) / f2);
    let det = e * g - ff * ff;
    if !(det > 0.0) {
        return None;
    }
    let area = det.sqrt();
    let second = |a: &Vec3, b: &Vec3, ab: &Vec3| (ab + gamma(&grad_log_f, a, b)).dot(&nhat) / f;
    let (l, m, nn) = (
        second(&xu, &xu, &xuu),
        second(&xu, &xv, &xuv),
        second(&xv, &xv, &xvv),
    );

    let ratio = ff / e;
    let ii11 = l / e;
    let ii12 = (m - ratio * l) / area;
    let ii22 = (nn - 2.0 * ratio * m + ratio * ratio * l) * e / det;
    let p_frame = Complex64::new(0.5 * (ii11 - ii22), -ii12);

    let (alpha, h, p, spread) = if conformal {
        let alpha = 0.5 * (e + g);
        let p = Complex64::new(l - nn, -2.0 * m) * 0.25;
        (
            alpha,
            (l + nn) / (2.0 * alpha),
            Some(p),
            (2.0 * p / alpha).norm(),
        )
    } else {
        (
            area,
            (e * nn - 2.0 * ff * m + g * l) / (2.0 * det),
            None,
            p_frame.norm(),
        )
    };
    let (kappa1, kappa2) = (h + spread, h - spread);
    let kbar_t = sectional_with(&x, &v, &xu, &xv).ok()?;
    let hess = |a: &Vec3| v.du_over_r * a.dot(a) + v.hess_coeff * x.dot(a).powi(2);
    let kbar_t_hessian = conformal.then(|| -v.du * v.du + (hess(&xu) + hess(&xv)) / (alpha * f));
    let t_grad = (
        d1(heights, n, step, i, j, Axis::U)?,
        d1(heights, n, step, i, j, Axis::V)?,
    );
    let r_grad = (
        d1(radii, n, step, i, j, Axis::U)?,
        d1(radii, n, step, i, j, Axis::V)?,
    );
    let nu = if r > 0.0 { x.dot(&nhat) / r } else { 0.0 };

    Some(ShapeSample {
        z: chart.z(i, j),
        x,
        r,
        t: heights[k],
        profile: v,
        xu,
        xv,
        x2: [xuu, xuv, xvv],
        first: [e, ff, g],
        second: [l, m, nn],
        alpha,
        area,
        normal: nhat * f,
        h,
        k_ext: kappa1 * kappa2,
        kappa1,
        kappa2,
        nu,
        p,
        p_frame,
        kbar_t,
        kbar_t_hessian,
        t_grad,
        r_grad,
        derivatives: None,
    })
}

/// Brioschi formula for the Gaussian curvature from `(E, F, G)` and their derivatives.
fn brioschi(
    [e, f, g]: [f64; 3],
    (eu, ev): (f64, f64),
    (fu, fv): (f64, f64),
    (gu, gv): (f64, f64),
    evv: f64,
    fuv: f64,
    guu: f64,
) -> f64 {
    let det3 = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let a = det3([
        [-0.5 * evv + fuv - 0.5 * guu, 0.5 * eu, fu - 0.5 * ev],
        [fv - 0.5 * gu, e, f],
        [0.5 * gv, f, g],
    ]);
    let b = det3([
        [0.0, 0.5 * ev, 0.5 * gu],
        [0.5 * ev, e, f],
        [0.5 * gu, f, g],
    ]);
    (a - b) / (e * g - f * f).powi(2)
}

fn second_layer(
    sample: &ShapeSample,
    conformal: bool,
    fields: &SecondLayerInputs,
    i: usize,
    j: usize,
) -> Option<Derivatives> {
    let h_grad = fields.h.gradient(i, j)?;
    let normal_grad = fields.normal.gradient(i, j)?;
    let (k, p_zbar) = if conformal {
        let k = -fields.log_alpha.laplacian(i, j)? / (2.0 * sample.alpha);
        let (_, pzb) = super::complex_derivative(&fields.p, i, j)?;
        (k, Some(pzb))
    } else {
        let (e1, e2, e3) = (
            fields.e.gradient(i, j)?,
            fields.f.gradient(i, j)?,
            fields.g.gradient(i, j)?,
        );
        let (_, _, evv) = fields.e.hessian(i, j)?;
        let (_, fuv, _) = fields.f.hessian(i, j)?;
        let (guu, _, _) = fields.g.hessian(i, j)?;
        (brioschi(sample.first, e1, e2, e3, evv, fuv, guu), None)
    };
    Some(Derivatives {
        k,
        h_grad,
        p_zbar,
        normal_grad,
    })
}

struct SecondLayerInputs {
    h: LatticeField<f64>,
    normal: LatticeField<Vec3>,
    log_alpha: LatticeField<f64>,
    p: LatticeField<Complex64>,
    e: LatticeField<f64>,
    f: LatticeField<f64>,
    g: LatticeField<f64>,
}

fn chart_shape(
    chart: &Chart,
    ambient: &RadialConformalFactor,
    conformal: bool,
) -> Result<ChartShape> {
    let n = chart.n;
    let radii: Vec<f64> = chart.positions.iter().map(|x| x.norm()).collect();
    let mut profiles = Vec::with_capacity(n * n);
    let mut heights = Vec::with_capacity(n * n);
    for (k, x) in chart.positions.iter().enumerate() {
        let escape = |e: GeometryError| GeometryError::SurfaceEscapes {
            chart: chart.id.name(),
            i: k / n,
            j: k % n,
            reason: e.to_string(),
        };
        profiles.push(ambient.at(x).map_err(escape)?);
        heights.push(ambient.g(radii[k]).map_err(escape)?);
    }
    let first: Vec<Option<ShapeSample>> = (0..n * n)
        .into_par_iter()
        .map(|k| first_layer(chart, &heights, &radii, &profiles, conformal, k / n, k % n))
        .collect();
    let mut shape = ChartShape {
        id: chart.id,
        n,
        rho: chart.rho,
        spacing: chart.spacing,
        samples: first,
    };
    let inputs = SecondLayerInputs {
        h: shape.field(|s| Some(s.h)),
        normal: shape.field(|s| Some(s.normal)),
        log_alpha: shape.field(|s| Some(s.alpha.ln())),
        p: shape.field(|s| s.p),
        e: shape.field(|s| Some(s.first[0])),
        f: shape.field(|s| Some(s.first[1])),
        g: shape.field(|s| Some(s.first[2])),
    };
    let second: Vec<Option<Derivatives>> = shape
        .samples
        .par_iter()
        .enumerate()
        .map(|(k, s)| {
            s.as_ref()
                .and_then(|s| second_layer(s, conformal, &inputs, k / n, k % n))
        })
        .collect();
    for (sample, d) in shape.samples.iter_mut().zip(second) {
        if let Some(sample) = sample {
            sample.derivatives = d;
        }
    }
    Ok(shape)
}

/// Compute the per-node geometry of `grid` in the ambient metric `|dx|^2 / u(|x|)^2`.
///
/// The normal is `N_F = F (X_u × X_v) / |X_u × X_v|`, outward for both charts.
pub fn shape_field(grid: &ImmersionGrid, ambient: &RadialConformalFactor) -> Result<ShapeField> {
    let [north, south] = &grid.charts;
    Ok(ShapeField {
        surface: grid.surface.clone(),
        conformal: grid.conformal,
        n: grid.n,
        spacing: grid.spacing,
        charts: [
            chart_shape(north, ambient, grid.conformal)?,
            chart_shape(south, ambient, grid.conformal)?,
        ],
    })
}
