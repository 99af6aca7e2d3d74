//! The conformally flat ambient space `(R^3, |dx|^2 / F^2)` with a radial
//! factor `F(x) = u(|x|)`, and its identification with a warped product via
//! `dr / u(r) = dt`, `r / u(r) = h(t)`.
//!
//! Curvature tensors follow the sign convention
//! `R(X, Y)Z = ∇_Y ∇_X Z - ∇_X ∇_Y Z + ∇_[X,Y] Z`, under which the sectional
//! curvature of `span(A, B)` is `<R(A, B)A, B> / |A ∧ B|^2`. This is the
//! convention in which the conformal-change formula with `φ = -log F` and the
//! Hopf-derivative formula hold verbatim.

use std::sync::Arc;

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::error::{GeometryError, Result};
use crate::warp::{OdeSolution, Repr, WarpingModel};
use crate::{CVec3, Vec3};

/// `u` and the derived radial coefficients at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileValues {
    pub u: f64,
    pub du: f64,
    pub ddu: f64,
    /// `u'(r) / r`, finite at `r = 0` for profiles regular at the origin.
    pub du_over_r: f64,
    /// `(u''(r) - u'(r)/r) / r^2`, the coefficient of `(x·a)(x·b)` in `Hess F`.
    pub hess_coeff: f64,
}

#[derive(Debug, Clone)]
enum Profile {
    /// `u = a + c r^2 / (4a)`: the constant-curvature-`c` metric.
    Quadratic { a: f64, c: f64 },
    /// Tabulated from an ODE warping model with `r(t) = anchor * exp(∫_0^t ds/h)`.
    Warped {
        sol: Arc<OdeSolution>,
        model: WarpingModel,
        anchor: f64,
    },
}

/// A positive radial profile `u(r)` on an annulus `[r0, r1]`, realising the
/// metric `|dx|^2 / u(|x|)^2`.
#[derive(Debug, Clone)]
pub struct RadialConformalFactor {
    profile: Profile,
    /// Gauge dilation `x -> λ x`: `u_λ(r) = λ u(r/λ)`.
    scale: f64,
}

impl RadialConformalFactor {
    /// `u(r) = a + c r^2 / (4a)`; constant sectional curvature `c`.
    pub fn quadratic(a: f64, c: f64) -> Result<Self> {
        if !(a > 0.0) || !c.is_finite() {
            return Err(GeometryError::InvalidParameters(format!(
                "quadratic profile needs a > 0 (got {a})"
            )));
        }
        Ok(Self {
            profile: Profile::Quadratic { a, c },
            scale: 1.0,
        })
    }

    /// Flat space, `u ≡ 1`.
    pub fn flat() -> Self {
        Self {
            profile: Profile::Quadratic { a: 1.0, c: 0.0 },
            scale: 1.0,
        }
    }

    /// Validity annulus `(r0, r1)` in Euclidean radius.
    pub fn annulus(&self) -> (f64, f64) {
        let (r0, r1) = match &self.profile {
            Profile::Quadratic { a, c } => {
                if *c < 0.0 {
                    (0.0, 2.0 * a / (-c).sqrt())
                } else {
                    (0.0, f64::INFINITY)
                }
            }
            Profile::Warped { sol, anchor, .. } => (*anchor, anchor * sol.log_r_max().exp()),
        };
        (r0 * self.scale, r1 * self.scale)
    }

    pub fn contains(&self, r: f64) -> bool {
        let (r0, r1) = self.annulus();
        let open_upper = matches!(self.profile, Profile::Quadratic { c, .. } if c < 0.0);
        r.is_finite()
            && r >= r0 * (1.0 - 1e-12)
            && if open_upper {
                r < r1
            } else {
                r <= r1 * (1.0 + 1e-12)
            }
    }

    fn check(&self, r: f64) -> Result<()> {
        if self.contains(r) {
            Ok(())
        } else {
            let (r0, r1) = self.annulus();
            Err(GeometryError::OutsideAnnulus { r, r0, r1 })
        }
    }

    /// `(u, u', u'')` at radius `r`.
    pub fn u(&self, r: f64) -> Result<(f64, f64, f64)> {
        self.check(r)?;
        let v = self.values(r);
        Ok((v.u, v.du, v.ddu))
    }

    /// Profile values without the annulus check.
    pub fn values(&self, r: f64) -> ProfileValues {
        let lam = self.scale;
        let rho = r / lam;
        let base = match &self.profile {
            Profile::Quadratic { a, c } => ProfileValues {
                u: a + c * rho * rho / (4.0 * a),
                du: c * rho / (2.0 * a),
                ddu: c / (2.0 * a),
                du_over_r: c / (2.0 * a),
                hess_coeff: 0.0,
            },
            Profile::Warped { sol, model, anchor } => {
                let t = sol.t_of_log_r((rho / anchor).ln().max(0.0));
                let (h, dh, ddh) = model.eval_unchecked(t);
                let u = rho / h;
                let du = (1.0 - dh) / h;
                let ddu = (-ddh / h - (1.0 - dh) * dh / (h * h)) / u;
                ProfileValues {
                    u,
                    du,
                    ddu,
                    du_over_r: du / rho,
                    hess_coeff: (ddu - du / rho) / (rho * rho),
                }
            }
        };
        ProfileValues {
            u: lam * base.u,
            du: base.du,
            ddu: base.ddu / lam,
            du_over_r: base.du_over_r / lam,
            hess_coeff: base.hess_coeff / (lam * lam * lam),
        }
    }

    /// Arc-length reparameterisation `t = G(r)` with `G' = 1/u`.
    pub fn g(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(self.g_unchecked(r))
    }

    pub(crate) fn g_unchecked(&self, r: f64) -> f64 {
        let rho = r / self.scale;
        match &self.profile {
            Profile::Quadratic { a, c } => {
                if *c > 0.0 {
                    2.0 / c.sqrt() * (c.sqrt() * rho / (2.0 * a)).atan()
                } else if *c < 0.0 {
                    2.0 / (-c).sqrt() * ((-c).sqrt() * rho / (2.0 * a)).atanh()
                } else {
                    rho / a
                }
            }
            Profile::Warped { sol, anchor, .. } => sol.t_of_log_r((rho / anchor).ln().max(0.0)),
        }
    }

    /// `r = G^{-1}(t)`.
    pub fn g_inv(&self, t: f64) -> Result<f64> {
        let (r0, r1) = self.annulus();
        let (t0, t1) = (
            self.g_unchecked(r0),
            if r1.is_finite() {
                self.g_unchecked(r1)
            } else {
                f64::INFINITY
            },
        );
        let t1 = if t1.is_nan() { f64::INFINITY } else { t1 };
        if !(t >= t0 - 1e-12 && t <= t1 + 1e-12) {
            return Err(GeometryError::OutOfDomain {
                t,
                min: t0,
                max: t1,
            });
        }
        Ok(self.g_inv_unchecked(t))
    }

    pub(crate) fn g_inv_unchecked(&self, t: f64) -> f64 {
        let rho = match &self.profile {
            Profile::Quadratic { a, c } => {
                if *c > 0.0 {
                    2.0 * a / c.sqrt() * (c.sqrt() * t / 2.0).tan()
                } else if *c < 0.0 {
                    2.0 * a / (-c).sqrt() * ((-c).sqrt() * t / 2.0).tanh()
                } else {
                    a * t
                }
            }
            Profile::Warped { sol, anchor, .. } => anchor * sol.log_r_at(t.max(0.0)).exp(),
        };
        rho * self.scale
    }

    /// The warping model this profile was built from, if any.
    pub fn paired_model(&self) -> Option<&WarpingModel> {
        match &self.profile {
            Profile::Warped { model, .. } => Some(model),
            Profile::Quadratic { .. } => None,
        }
    }

    /// Values at the point `x`, checking the annulus.
    pub fn at(&self, x: &Vec3) -> Result<ProfileValues> {
        let r = x.norm();
        self.check(r)?;
        Ok(self.values(r))
    }

    /// `F(x) = u(|x|)`.
    pub fn conformal_factor(&self, x: &Vec3) -> Result<f64> {
        Ok(self.at(x)?.u)
    }

    /// Euclidean gradient of `F`: `x u'(r) / r`.
    pub fn grad_f(&self, x: &Vec3) -> Result<Vec3> {
        Ok(x * self.at(x)?.du_over_r)
    }

    /// Euclidean Hessian matrix of `F`.
    pub fn hess_f(&self, x: &Vec3) -> Result<Matrix3<f64>> {
        let v = self.at(x)?;
        Ok(hess_matrix(x, &v))
    }

    /// `<a, b>_F = a·b / F^2`.
    pub fn inner(&self, x: &Vec3, a: &Vec3, b: &Vec3) -> Result<f64> {
        let f = self.conformal_factor(x)?;
        Ok(a.dot(b) / (f * f))
    }
}

pub(crate) fn hess_matrix(x: &Vec3, v: &ProfileValues) -> Matrix3<f64> {
    Matrix3::identity() * v.du_over_r + x * x.transpose() * v.hess_coeff
}

/// Radial picture of a warping model.
///
/// Gauge: for a model with a smooth pole (`h(t_min) = 0`), `r_anchor` is the
/// limit of `r/t` at the pole; for a model with a horizon (`h(t_min) > 0`) it
/// is the Euclidean radius of the horizon, `r(t_min) = r_anchor`. In between,
/// `r(t) = r_anchor exp(∫ ds/h(s))` follows from `dr/r = dt/h`.
pub fn radial_from_warp(model: &WarpingModel, r_anchor: f64) -> Result<RadialConformalFactor> {
    if !(r_anchor > 0.0) || !r_anchor.is_finite() {
        return Err(GeometryError::InvalidParameters(format!(
            "anchor must be positive (got {r_anchor})"
        )));
    }
    match &model.repr {
        Repr::SpaceForm { c } => RadialConformalFactor::quadratic(r_anchor, *c),
        Repr::Ode(sol) => {
            if sol.h.iter().any(|&h| !(h > 0.0)) {
                return Err(GeometryError::Divergence(
                    "h vanishes inside the ODE domain".into(),
                ));
            }
            Ok(RadialConformalFactor {
                profile: Profile::Warped {
                    sol: Arc::clone(sol),
                    model: model.clone(),
                    anchor: r_anchor,
                },
                scale: 1.0,
            })
        }
        Repr::Radial(profile) => {
            let (r0, _) = profile.annulus();
            let current = if r0 > 0.0 { r0 } else { profile.values(0.0).u };
            let mut rescaled = (**profile).clone();
            rescaled.scale *= r_anchor / current;
            Ok(rescaled)
        }
    }
}

/// Warping function of a radial profile: `h(t) = G^{-1}(t) / u(G^{-1}(t))`,
/// with `h' = 1 - h u'` and `h'' = -h (u'' u + (1 - h') h' / h^2)`.
pub fn warp_from_radial(u: &RadialConformalFactor) -> WarpingModel {
    WarpingModel::from_radial(u.clone())
}

/// Christoffel symbols `Γ[k][i][j] = Γ^k_{ij}` of `|dx|^2/F^2`, written out
/// entry by entry in terms of `f_i = ∂_i log F`.
pub fn christoffel(u: &RadialConformalFactor, x: &Vec3) -> Result<[[[f64; 3]; 3]; 3]> {
    let v = u.at(x)?;
    let f = x * (v.du_over_r / v.u);
    let (f1, f2, f3) = (f[0], f[1], f[2]);
    let mut g = [[[0.0; 3]; 3]; 3];
    // Γ^k_{11}
    g[0][0][0] = -f1;
    g[1][0][0] = f2;
    g[2][0][0] = f3;
    // Γ^k_{12} = Γ^k_{21}
    g[0][0][1] = -f2;
    g[1][0][1] = -f1;
    g[2][0][1] = 0.0;
    // Γ^k_{13} = Γ^k_{31}
    g[0][0][2] = -f3;
    g[1][0][2] = 0.0;
    g[2][0][2] = -f1;
    // Γ^k_{22}
    g[0][1][1] = f1;
    g[1][1][1] = -f2;
    g[2][1][1] = f3;
    // Γ^k_{23} = Γ^k_{32}
    g[0][1][2] = 0.0;
    g[1][1][2] = -f3;
    g[2][1][2] = -f2;
    // Γ^k_{33}
    g[0][2][2] = f1;
    g[1][2][2] = f2;
    g[2][2][2] = -f3;
    for k in 0..3 {
        g[k][1][0] = g[k][0][1];
        g[k][2][0] = g[k][0][2];
        g[k][2][1] = g[k][1][2];
    }
    Ok(g)
}

/// Contraction `Γ(A, B)^k = Γ^k_{ij} A^i B^j` in closed form:
/// `-(A·∇f) B - (B·∇f) A + (A·B) ∇f` with `f = log F`.
pub(crate) fn christoffel_contract(grad_log_f: &CVec3, a: &CVec3, b: &CVec3) -> CVec3 {
    b * -a.dot(grad_log_f) - a * b.dot(grad_log_f) + grad_log_f * a.dot(b)
}

/// Coefficients `c[i][j][k]` of `∇_{E_i} E_j = Σ_k c[i][j][k] E_k` in the
/// orthonormal frame `E_i = F e_i`, with `F_i = ∂F/∂x_i`.
pub fn frame_connection(u: &RadialConformalFactor, x: &Vec3) -> Result<[[[f64; 3]; 3]; 3]> {
    let grad = u.grad_f(x)?;
    let (f1, f2, f3) = (grad[0], grad[1], grad[2]);
    let mut c = [[[0.0; 3]; 3]; 3];
    c[0][0] = [0.0, f2, f3];
    c[0][1] = [-f2, 0.0, 0.0];
    c[0][2] = [-f3, 0.0, 0.0];
    c[1][0] = [0.0, -f1, 0.0];
    c[1][1] = [f1, 0.0, f3];
    c[1][2] = [0.0, -f3, 0.0];
    c[2][0] = [0.0, 0.0, -f1];
    c[2][1] = [0.0, 0.0, -f2];
    c[2][2] = [f1, f2, 0.0];
    Ok(c)
}

fn to_c(v: &Vec3) -> CVec3 {
    v.map(Complex64::from)
}

/// Curvature tensor `R(X, Y)Z` of `|dx|^2/F^2`, complex-trilinear in its
/// arguments, from the conformal-change formula with `φ = -log F` over the
/// flat metric.
pub fn riemann_complex(
    u: &RadialConformalFactor,
    x: &Vec3,
    xv: &CVec3,
    yv: &CVec3,
    zv: &CVec3,
) -> Result<CVec3> {
    let v = u.at(x)?;
    Ok(riemann_with(x, &v, xv, yv, zv))
}

pub(crate) fn riemann_with(
    x: &Vec3,
    v: &ProfileValues,
    xv: &CVec3,
    yv: &CVec3,
    zv: &CVec3,
) -> CVec3 {
    let grad_f = x * v.du_over_r;
    let grad_phi = to_c(&(-grad_f / v.u));
    let hess_phi = -hess_matrix(x, v) / v.u + grad_f * grad_f.transpose() / (v.u * v.u);
    let hess_phi = hess_phi.map(Complex64::from);
    let grad_sq = grad_phi.dot(&grad_phi);
    let bracket = |a: &CVec3, b: &CVec3| {
        (hess_phi * b).dot(a) - a.dot(&grad_phi) * b.dot(&grad_phi) + a.dot(b) * grad_sq
    };
    let shifted = |a: &CVec3| hess_phi * a - grad_phi * a.dot(&grad_phi);
    xv * bracket(yv, zv) - yv * bracket(xv, zv) + shifted(xv) * yv.dot(zv)
        - shifted(yv) * xv.dot(zv)
}

/// Real version of [`riemann_complex`].
pub fn riemann(
    u: &RadialConformalFactor,
    x: &Vec3,
    xv: &Vec3,
    yv: &Vec3,
    zv: &Vec3,
) -> Result<Vec3> {
    Ok(riemann_complex(u, x, &to_c(xv), &to_c(yv), &to_c(zv))?.map(|c| c.re))
}

/// Brute-force curvature tensor from the coordinate formula
/// `R^l_{ijk} = ∂_i Γ^l_{jk} - ∂_j Γ^l_{ik} + Γ^l_{im} Γ^m_{jk} - Γ^l_{jm} Γ^m_{ik}`
/// with `∂Γ` by central differences of [`christoffel`]. The coordinate formula
/// computes `∇_i ∇_j - ∇_j ∇_i`; the result is negated to match the
/// convention of [`riemann`].
pub fn riemann_oracle(
    u: &RadialConformalFactor,
    x: &Vec3,
    xv: &Vec3,
    yv: &Vec3,
    zv: &Vec3,
) -> Result<Vec3> {
    let gamma = christoffel(u, x)?;
    let step = 1e-5 * x.norm().max(1.0);
    let mut d_gamma = [[[[0.0; 3]; 3]; 3]; 3];
    for (m, slot) in d_gamma.iter_mut().enumerate() {
        let mut e = Vec3::zeros();
        e[m] = step;
        let plus = christoffel(u, &(x + e))?;
        let minus = christoffel(u, &(x - e))?;
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    slot[k][i][j] = (plus[k][i][j] - minus[k][i][j]) / (2.0 * step);
                }
            }
        }
    }
    let mut out = Vec3::zeros();
    for l in 0..3 {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let mut r = d_gamma[i][l][j][k] - d_gamma[j][l][i][k];
                    for m in 0..3 {
                        r += gamma[l][i][m] * gamma[m][j][k] - gamma[l][j][m] * gamma[m][i][k];
                    }
                    acc += r * xv[i] * yv[j] * zv[k];
                }
            }
        }
        out[l] = -acc;
    }
    Ok(out)
}

/// Sectional curvature of `span(A, B)` at `x`.
pub fn sectional(u: &RadialConformalFactor, x: &Vec3, a: &Vec3, b: &Vec3) -> Result<f64> {
    let v = u.at(x)?;
    sectional_with(x, &v, a, b)
}

pub(crate) fn sectional_with(x: &Vec3, v: &ProfileValues, a: &Vec3, b: &Vec3) -> Result<f64> {
    let f2 = v.u * v.u;
    let (aa, bb, ab) = (a.dot(a) / f2, b.dot(b) / f2, a.dot(b) / f2);
    let area2 = aa * bb - ab * ab;
    if !(area2 > 1e-14 * aa * bb) {
        return Err(GeometryError::DegeneratePlane);
    }
    let r = riemann_with(x, v, &to_c(a), &to_c(b), &to_c(a)).map(|c| c.re);
    Ok(r.dot(b) / f2 / area2)
}

/// Euclidean Hessian of `F(x) = u(|x|)` applied to `(a, b)`:
/// `(u'/r)(a·b) + (1/r^2)(u'' - u'/r)(x·a)(x·b)`.
pub fn hess_radial(u: &RadialConformalFactor, x: &Vec3, a: &Vec3, b: &Vec3) -> Result<f64> {
    let v = u.at(x)?;
    Ok(v.du_over_r * a.dot(b) + v.hess_coeff * x.dot(a) * x.dot(b))
}
