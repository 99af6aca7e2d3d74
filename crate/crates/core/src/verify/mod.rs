//! Numerical checks on computed shape fields: residuals of the structure
//! identities, the rigidity-inequality evaluator, umbilic/slice
//! classification and Hopf-zero winding numbers.

mod classify;
mod et;
mod zeros;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambient::{christoffel_contract, riemann_with, ProfileValues, RadialConformalFactor};
use crate::error::{GeometryError, Result};
use crate::immersion::{Derivatives, ShapeField, ShapeSample};
use crate::numerics::{central_d1, central_d2, CompensatedSum};
use crate::warp::WarpingModel;
use crate::{CVec3, Vec3};

pub use classify::{classify, ClassifyTolerances, Verdict};
pub use et::{et_test, EtReport};
pub use zeros::{hopf_zero_indices, HopfZero, HopfZeros};

/// Residuals at or below this value (after normalisation) are treated as
/// rounding noise when measuring convergence orders.
pub const ROUNDOFF_FLOOR: f64 = 1e-9;

/// Catalog of identities checked numerically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IdentityId {
    /// `∇_{X_z̄} X_z = (αH/2) N_F` and `∇_{X_z} N_F = -H X_z - (2P/α) X_z̄`.
    I1,
    /// `|2P/α|^2 = H^2 - K + K̄(TΣ)`.
    I2,
    /// `P_z̄ = (α/2) H_z + <R̄(X_z, X_z̄) X_z, N_F>_F`.
    I3,
    /// `<R̄(X_z, X_z̄) X_z, N_F>_F = -(α/2F) Hess F(X_z, N_F)`.
    I4,
    /// `4 r_z r_z̄ / (α u(r)^2) + ν^2 = 1`.
    I5,
    /// `K̄(TΣ) = -|∇F|^2 + 4 Hess F(X_z, X_z̄) / (αF)`.
    I6,
    /// `u'(r) = (1 - h')/h` and `u'' u = -h''/h - (1 - h') h'/h^2`.
    I7,
    /// `Hess F(X_z, N) = -(K_tan - K_rad) ν t_z`.
    I8,
    /// `P_z̄ = (α/2) [H_z + (K_tan - K_rad) ν t_z]`.
    I9,
    /// `K_tan - (1 - ν^2)(K_tan - K_rad)` against its closed forms for dss/rn.
    I10,
}

impl IdentityId {
    pub const ALL: [IdentityId; 10] = [
        IdentityId::I1,
        IdentityId::I2,
        IdentityId::I3,
        IdentityId::I4,
        IdentityId::I5,
        IdentityId::I6,
        IdentityId::I7,
        IdentityId::I8,
        IdentityId::I9,
        IdentityId::I10,
    ];

    /// Whether the identity is stated for conformal parameterisations.
    pub fn requires_conformal(self) -> bool {
        !matches!(self, IdentityId::I7 | IdentityId::I10)
    }

    /// Whether the identity involves a surface at all.
    pub fn needs_surface(self) -> bool {
        self != IdentityId::I10
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for IdentityId {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL
            .into_iter()
            .find(|id| id.to_string() == s)
            .ok_or_else(|| GeometryError::InvalidParameters(format!("unknown identity id {s:?}")))
    }
}

/// Size of the residual `|LHS - RHS|` of one identity over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub identity: IdentityId,
    /// `max |LHS - RHS| / scale`.
    pub max_residual: f64,
    /// RMS of `|LHS - RHS| / scale`.
    pub rms_residual: f64,
    /// `max(1, max |LHS|, max |RHS|)`.
    pub scale: f64,
    pub node_count: usize,
    pub grid_step: f64,
    pub convergence_order: Option<f64>,
}

impl ResidualReport {
    fn from_terms(identity: IdentityId, terms: &[Term], grid_step: f64) -> Self {
        let scale = terms.iter().map(|t| t.lhs.max(t.rhs)).fold(1.0, f64::max);
        let max = terms.iter().map(|t| t.residual).fold(0.0, f64::max);
        let sq: CompensatedSum = terms.iter().map(|t| t.residual * t.residual).collect();
        let rms = if terms.is_empty() {
            0.0
        } else {
            (sq.total() / terms.len() as f64).sqrt()
        };
        ResidualReport {
            identity,
            max_residual: max / scale,
            rms_residual: rms / scale,
            scale,
            node_count: terms.len(),
            grid_step,
            convergence_order: None,
        }
    }

    /// Attach the order measured against a run at a finer step.
    pub fn with_convergence(mut self, fine: &ResidualReport) -> Self {
        self.convergence_order = Some(convergence_order(&self, fine));
        self
    }
}

/// `log(max_coarse / max_fine) / log(step_coarse / step_fine)`.
pub fn convergence_order(coarse: &ResidualReport, fine: &ResidualReport) -> f64 {
    (coarse.max_residual / fine.max_residual).ln() / (coarse.grid_step / fine.grid_step).ln()
}

/// Whether a coarse/fine pair meets `min_order`, counting a fine-grid residual
/// at the rounding floor as converged.
pub fn meets_order(coarse: &ResidualReport, fine: &ResidualReport, min_order: f64) -> bool {
    fine.max_residual <= ROUNDOFF_FLOOR || convergence_order(coarse, fine) >= min_order
}

struct Term {
    lhs: f64,
    rhs: f64,
    residual: f64,
}

impl Term {
    fn real(lhs: f64, rhs: f64) -> Self {
        Term {
            lhs: lhs.abs(),
            rhs: rhs.abs(),
            residual: (lhs - rhs).abs(),
        }
    }

    fn complex(lhs: Complex64, rhs: Complex64) -> Self {
        Term {
            lhs: lhs.norm(),
            rhs: rhs.norm(),
            residual: (lhs - rhs).norm(),
        }
    }
}

pub(crate) fn to_c(v: &Vec3) -> CVec3 {
    v.map(Complex64::from)
}

/// `(a - i b) / 2`, e.g. `X_z` from `(X_u, X_v)`.
pub(crate) fn holo(a: &Vec3, b: &Vec3) -> CVec3 {
    CVec3::new(
        Complex64::new(a[0], -b[0]) * 0.5,
        Complex64::new(a[1], -b[1]) * 0.5,
        Complex64::new(a[2], -b[2]) * 0.5,
    )
}

pub(crate) fn holo_scalar(du: f64, dv: f64) -> Complex64 {
    Complex64::new(du, -dv) * 0.5
}

fn cnorm(v: &CVec3) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn hess_c(x: &Vec3, v: &ProfileValues, a: &CVec3, b: &CVec3) -> Complex64 {
    let xc = to_c(x);
    a.dot(b) * v.du_over_r + xc.dot(a) * xc.dot(b) * v.hess_coeff
}

/// `<R̄(X_z, X_z̄) X_z, N_F>_F`.
fn curvature_normal_term(s: &ShapeSample) -> Complex64 {
    let xz = holo(&s.xu, &s.xv);
    let xzb = xz.map(|c| c.conj());
    let r = riemann_with(&s.x, &s.profile, &xz, &xzb, &xz);
    r.dot(&to_c(&s.normal)) / (s.profile.u * s.profile.u)
}

fn curvature_gap(model: &WarpingModel, t: f64) -> Result<f64> {
    let (k_tan, k_rad) = model.curvatures(t)?;
    Ok(k_tan - k_rad)
}

fn node_term(
    id: IdentityId,
    s: &ShapeSample,
    d: &Derivatives,
    ambient: &RadialConformalFactor,
    model: &WarpingModel,
) -> Result<Term> {
    let f = s.profile.u;
    let alpha = s.alpha;
    let p = s.p.unwrap_or_default();
    let h_z = holo_scalar(d.h_grad.0, d.h_grad.1);
    let t_z = holo_scalar(s.t_grad.0, s.t_grad.1);
    Ok(match id {
        IdentityId::I1 => {
            let xz = holo(&s.xu, &s.xv);
            let xzb = xz.map(|c| c.conj());
            let g = to_c(&(s.x * (s.profile.du_over_r / f)));
            let normal = to_c(&s.normal);
            let [xuu, _, xvv] = s.x2;
            let mixed = to_c(&((xuu + xvv) * 0.25)) + christoffel_contract(&g, &xzb, &xz);
            let mixed_rhs = normal * Complex64::from(0.5 * alpha * s.h);
            let n_z =
                holo(&d.normal_grad.0, &d.normal_grad.1) + christoffel_contract(&g, &xz, &normal);
            let n_z_rhs = xz * Complex64::from(-s.h) - xzb * (2.0 * p / alpha);
            let lhs = (cnorm(&mixed).powi(2) + cnorm(&n_z).powi(2)).sqrt() / f;
            let rhs = (cnorm(&mixed_rhs).powi(2) + cnorm(&n_z_rhs).powi(2)).sqrt() / f;
            let residual =
                (cnorm(&(mixed - mixed_rhs)).powi(2) + cnorm(&(n_z - n_z_rhs)).powi(2)).sqrt() / f;
            Term { lhs, rhs, residual }
        }
        IdentityId::I2 => Term::real((2.0 * p / alpha).norm_sqr(), s.h * s.h - d.k + s.kbar_t),
        IdentityId::I3 => {
            let rhs = h_z * (0.5 * alpha) + curvature_normal_term(s);
            Term::complex(d.p_zbar.unwrap_or_default(), rhs)
        }
        IdentityId::I4 => {
            let xz = holo(&s.xu, &s.xv);
            let rhs = hess_c(&s.x, &s.profile, &xz, &to_c(&s.normal)) * (-alpha / (2.0 * f));
            Term::complex(curvature_normal_term(s), rhs)
        }
        IdentityId::I5 => {
            let rr = s.r_grad.0 * s.r_grad.0 + s.r_grad.1 * s.r_grad.1;
            Term::real(rr / (alpha * f * f) + s.nu * s.nu, 1.0)
        }
        IdentityId::I6 => Term::real(s.kbar_t_hessian.unwrap_or(f64::NAN), s.kbar_t),
        IdentityId::I7 => profile_term(ambient, model, s.r, s.t)?,
        IdentityId::I8 => {
            let xz = holo(&s.xu, &s.xv);
            let lhs = hess_c(&s.x, &s.profile, &xz, &to_c(&(s.normal / f)));
            Term::complex(lhs, t_z * (-curvature_gap(model, s.t)? * s.nu))
        }
        IdentityId::I9 => {
            let rhs = (h_z + t_z * (curvature_gap(model, s.t)? * s.nu)) * (0.5 * alpha);
            Term::complex(d.p_zbar.unwrap_or_default(), rhs)
        }
        IdentityId::I10 => unreachable!("surface-free identity"),
    })
}

/// `(u', u'' u)` by central differences of the profile against the warping function.
fn profile_term(
    ambient: &RadialConformalFactor,
    model: &WarpingModel,
    r: f64,
    t: f64,
) -> Result<Term> {
    let step = 5e-3 * r;
    let u = |x: f64| ambient.values(x).u;
    let du = central_d1(u, r, step);
    let uddu = central_d2(u, r, step) * u(r);
    let (h, dh, ddh) = model.eval(t)?;
    let du_rhs = (1.0 - dh) / h;
    let uddu_rhs = -ddh / h - (1.0 - dh) * dh / (h * h);
    Ok(Term {
        lhs: du.hypot(uddu),
        rhs: du_rhs.hypot(uddu_rhs),
        residual: (du - du_rhs).hypot(uddu - uddu_rhs),
    })
}

/// Residual of `id` over the owned, fully differentiated nodes of `shape`.
///
/// `ambient` must be the radial picture of `model`. [`IdentityId::I10`] does
/// not look at the surface; see [`radicand_identity`].
pub fn evaluate_identity(
    shape: &ShapeField,
    ambient: &RadialConformalFactor,
    model: &WarpingModel,
    id: IdentityId,
) -> Result<ResidualReport> {
    if id == IdentityId::I10 {
        return radicand_identity(model);
    }
    if id.requires_conformal() && !shape.conformal {
        return Err(GeometryError::ConformalRequired(format!(
            "{id} needs a conformal chart, surface {:?} is not conformally parameterised",
            shape.surface
        )));
    }
    let nodes: Vec<_> = shape
        .owned_complete()
        .map(|(_, _, _, s, d)| (s, d))
        .collect();
    let terms: Vec<Term> = nodes
        .par_iter()
        .map(|(s, d)| node_term(id, s, d, ambient, model))
        .collect::<Result<_>>()?;
    Ok(ResidualReport::from_terms(id, &terms, shape.spacing))
}

/// Surface-free check of the radicand closed forms on a 100 × 21 grid of
/// `(t, ν)` spanning the model's domain and `[-1, 1]`.
pub fn radicand_identity(model: &WarpingModel) -> Result<ResidualReport> {
    let (t0, t1) = model.domain();
    let span = (t1 - t0).min(1e3);
    let (nt, nn) = (100, 21);
    let mut terms = Vec::with_capacity(nt * nn);
    for a in 0..nt {
        let t = t0 + (a as f64 + 0.5) / nt as f64 * span;
        for b in 0..nn {
            let nu = -1.0 + 2.0 * b as f64 / (nn - 1) as f64;
            let lhs = model.radicand_ambient(t, nu)?;
            let rhs = model.radicand_closed_form(t, nu)?.ok_or_else(|| {
                GeometryError::InvalidParameters(
                    "no closed-form radicand for a custom warping function".into(),
                )
            })?;
            terms.push(Term::real(lhs, rhs));
        }
    }
    Ok(ResidualReport::from_terms(
        IdentityId::I10,
        &terms,
        span / nt as f64,
    ))
}

#[cfg(test)]
mod tests;
