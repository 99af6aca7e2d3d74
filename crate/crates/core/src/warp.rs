//! Warping functions `h(t)` of the metric `dt^2 + h(t)^2 dω^2` and the two
//! sectional curvatures they induce.
//!
//! Space forms are evaluated in closed form. The de Sitter-Schwarzschild and
//! Reissner-Nordström profiles are defined by `h'^2 = 1 - m/h - c h^2` and
//! `h'^2 = 1 - m/h + q^2/h^2` with `h'(0) = 0`; both are integrated in the
//! regularised second-order form `h'' = m/(2h^2) - c h` (resp.
//! `m/(2h^2) - q^2/h^3`), which is Lipschitz at the horizon. The first-order
//! relation is then a conserved quantity and is checked on every node.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ambient::RadialConformalFactor;
use crate::error::{GeometryError, Result};
use crate::numerics::{bisect, quintic_hermite};

/// Which family a [`WarpingModel`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WarpKind {
    Euclidean,
    Sphere { c: f64 },
    Hyperbolic { c: f64 },
    Dss { m: f64, c: f64 },
    Rn { m: f64, q: f64 },
    Custom,
}

/// Integration controls for ODE-defined models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    /// Fixed RK4 step in `t`.
    pub step: f64,
    /// Stop once `h >= h_stop_factor * s0`.
    pub h_stop_factor: f64,
    /// Maximum tolerated `|h'^2 - radicand(h)|` on the stored nodes.
    pub conservation_tol: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            step: 2e-3,
            h_stop_factor: 50.0,
            conservation_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Force {
    Dss { m: f64, c: f64 },
    Rn { m: f64, q: f64 },
}

impl Force {
    /// `1 - m/h - c h^2` or `1 - m/h + q^2/h^2`: the value `h'^2` must take.
    pub(crate) fn radicand(self, h: f64) -> f64 {
        match self {
            Force::Dss { m, c } => 1.0 - m / h - c * h * h,
            Force::Rn { m, q } => 1.0 - m / h + q * q / (h * h),
        }
    }

    fn accel(self, h: f64) -> f64 {
        match self {
            Force::Dss { m, c } => m / (2.0 * h * h) - c * h,
            Force::Rn { m, q } => m / (2.0 * h * h) - q * q / (h * h * h),
        }
    }

    fn jerk(self, h: f64, dh: f64) -> f64 {
        match self {
            Force::Dss { m, c } => -m * dh / (h * h * h) - c * dh,
            Force::Rn { m, q } => -m * dh / (h * h * h) + 3.0 * q * q * dh / (h * h * h * h),
        }
    }
}

/// Dense RK4 solution on a uniform grid starting at `t = 0`.
///
/// Alongside `(h, h')` it carries `log_r(t) = ∫_0^t ds / h(s)`, the logarithm
/// of the Euclidean radius of the conformally flat picture (gauge `r(0) = 1`).
#[derive(Debug, Clone)]
pub(crate) struct OdeSolution {
    pub(crate) step: f64,
    pub(crate) force: Force,
    pub(crate) h: Vec<f64>,
    pub(crate) dh: Vec<f64>,
    pub(crate) log_r: Vec<f64>,
}

impl OdeSolution {
    fn integrate(force: Force, s0: f64, opts: OdeOptions, stop_on_turn: bool) -> Self {
        let step = opts.step;
        let h_stop = opts.h_stop_factor * s0;
        let rhs = |s: [f64; 3]| [s[1], force.accel(s[0]), 1.0 / s[0]];
        let mut state = [s0, 0.0, 0.0];
        let (mut h, mut dh, mut log_r) = (vec![s0], vec![0.0], vec![0.0]);
        let max_steps = 20_000_000usize;
        for _ in 0..max_steps {
            let k1 = rhs(state);
            let k2 = rhs(axpy(state, 0.5 * step, k1));
            let k3 = rhs(axpy(state, 0.5 * step, k2));
            let k4 = rhs(axpy(state, step, k3));
            let next: [f64; 3] = std::array::from_fn(|i| {
                state[i] + step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            });
            if stop_on_turn && next[1] <= 0.0 {
                break;
            }
            state = next;
            h.push(state[0]);
            dh.push(state[1]);
            log_r.push(state[2]);
            if state[0] >= h_stop {
                break;
            }
        }
        Self {
            step,
            force,
            h,
            dh,
            log_r,
        }
    }

    fn t_max(&self) -> f64 {
        (self.h.len() - 1) as f64 * self.step
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let last = self.h.len() - 2;
        let k = ((t / self.step).floor().max(0.0) as usize).min(last);
        (k, (t - k as f64 * self.step) / self.step)
    }

    fn eval(&self, t: f64) -> (f64, f64, f64) {
        let (k, s) = self.locate(t);
        let f = self.force;
        let node_h = |i: usize| [self.h[i], self.dh[i], f.accel(self.h[i])];
        let node_dh = |i: usize| {
            [
                self.dh[i],
                f.accel(self.h[i]),
                f.jerk(self.h[i], self.dh[i]),
            ]
        };
        let h = quintic_hermite(node_h(k), node_h(k + 1), self.step, s);
        let dh = quintic_hermite(node_dh(k), node_dh(k + 1), self.step, s);
        (h, dh, f.accel(h))
    }

    fn log_r_node(&self, i: usize) -> [f64; 3] {
        let (h, dh) = (self.h[i], self.dh[i]);
        [self.log_r[i], 1.0 / h, -dh / (h * h)]
    }

    pub(crate) fn log_r_at(&self, t: f64) -> f64 {
        let (k, s) = self.locate(t);
        quintic_hermite(self.log_r_node(k), self.log_r_node(k + 1), self.step, s)
    }

    /// Inverse of [`Self::log_r_at`]; `target` must lie in `[0, log_r_max]`.
    pub(crate) fn t_of_log_r(&self, target: f64) -> f64 {
        let n = self.log_r.len();
        // log_r is strictly increasing (1/h > 0).
        let k = match self
            .log_r
            .binary_search_by(|v| v.partial_cmp(&target).unwrap())
        {
            Ok(i) => return i as f64 * self.step,
            Err(i) => i.clamp(1, n - 1) - 1,
        };
        let (lo, hi) = (k as f64 * self.step, (k + 1) as f64 * self.step);
        let mut t = lo + (target - self.log_r[k]) / (self.log_r[k + 1] - self.log_r[k]) * self.step;
        for _ in 0..50 {
            let (h, _, _) = self.eval(t);
            let delta = (self.log_r_at(t) - target) * h;
            let next = (t - delta).clamp(lo, hi);
            if (next - t).abs() <= 1e-16 * (1.0 + t.abs()) {
                t = next;
                break;
            }
            t = next;
        }
        t
    }

    pub(crate) fn log_r_max(&self) -> f64 {
        *self.log_r.last().unwrap()
    }

    fn max_conservation_residual(&self) -> f64 {
        self.h
            .iter()
            .zip(&self.dh)
            .map(|(&h, &dh)| (dh * dh - self.force.radicand(h)).abs())
            .fold(0.0, f64::max)
    }
}

fn axpy(s: [f64; 3], a: f64, k: [f64; 3]) -> [f64; 3] {
    [s[0] + a * k[0], s[1] + a * k[1], s[2] + a * k[2]]
}

#[derive(Debug, Clone)]
pub(crate) enum Repr {
    SpaceForm { c: f64 },
    Ode(Arc<OdeSolution>),
    Radial(Arc<RadialConformalFactor>),
}

/// A warping function with its domain. Immutable after construction.
#[derive(Debug, Clone)]
pub struct WarpingModel {
    kind: WarpKind,
    t_min: f64,
    t_max: f64,
    s0: f64,
    pub(crate) repr: Repr,
}

/// Closed-form space form of curvature `c`: `h = t`, `sin(√c t)/√c` or
/// `sinh(√-c t)/√-c`.
pub fn make_space_form(c: f64) -> WarpingModel {
    let (kind, t_max) = if c > 0.0 {
        (WarpKind::Sphere { c }, PI / c.sqrt())
    } else if c < 0.0 {
        (WarpKind::Hyperbolic { c }, f64::INFINITY)
    } else {
        (WarpKind::Euclidean, f64::INFINITY)
    };
    WarpingModel {
        kind,
        t_min: 0.0,
        t_max,
        s0: 0.0,
        repr: Repr::SpaceForm { c },
    }
}

/// De Sitter-Schwarzschild warping function with default integration options.
pub fn make_dss(m: f64, c: f64) -> Result<WarpingModel> {
    make_dss_with(m, c, OdeOptions::default())
}

pub fn make_dss_with(m: f64, c: f64, opts: OdeOptions) -> Result<WarpingModel> {
    if !(m > 0.0) || !m.is_finite() || !c.is_finite() {
        return Err(GeometryError::InvalidParameters(format!(
            "dss requires m > 0 (got m = {m}, c = {c})"
        )));
    }
    if c > 0.0 && c * m * m >= 4.0 / 27.0 {
        return Err(GeometryError::InvalidParameters(format!(
            "dss with c > 0 requires c m^2 < 4/27 (got {})",
            c * m * m
        )));
    }
    let (s0, _) = dss_horizons(m, c)?;
    build_ode_model(
        WarpKind::Dss { m, c },
        Force::Dss { m, c },
        s0,
        opts,
        c > 0.0,
    )
}

/// Positivity window `(s0, s1)` of `1 - m/r - c r^2`; `s1 = ∞` when `c <= 0`.
pub fn dss_horizons(m: f64, c: f64) -> Result<(f64, f64)> {
    let f = |r: f64| 1.0 - m / r - c * r * r;
    let tol = 1e-15;
    if c > 0.0 {
        // f is maximal at r* = (m / 2c)^(1/3).
        let r_star = (m / (2.0 * c)).cbrt();
        if f(r_star) <= 0.0 {
            return Err(GeometryError::InvalidParameters(
                "dss positivity window is empty".into(),
            ));
        }
        let s0 = bisect(f, m * 1e-9, r_star, tol).expect("bracket checked");
        let mut hi = 2.0 * r_star;
        while f(hi) > 0.0 {
            hi *= 2.0;
        }
        let s1 = bisect(f, r_star, hi, tol).expect("bracket checked");
        Ok((s0, s1))
    } else {
        let mut hi = 2.0 * m;
        while f(hi) <= 0.0 {
            hi *= 2.0;
        }
        let s0 = bisect(f, m * 1e-9, hi, tol).expect("f increasing on (0, ∞)");
        Ok((s0, f64::INFINITY))
    }
}

/// Reissner-Nordström warping function with default integration options.
pub fn make_rn(m: f64, q: f64) -> Result<WarpingModel> {
    make_rn_with(m, q, OdeOptions::default())
}

pub fn make_rn_with(m: f64, q: f64, opts: OdeOptions) -> Result<WarpingModel> {
    if !(q > 0.0 && m > 2.0 * q) || !m.is_finite() {
        return Err(GeometryError::InvalidParameters(format!(
            "rn requires m > 2q > 0 (got m = {m}, q = {q})"
        )));
    }
    build_ode_model(
        WarpKind::Rn { m, q },
        Force::Rn { m, q },
        rn_horizon(m, q),
        opts,
        false,
    )
}

/// Larger root of `1 - m/r + q^2/r^2`, i.e. `2q^2 / (m - sqrt(m^2 - 4q^2))`,
/// evaluated in the cancellation-free form `(m + sqrt(m^2 - 4q^2)) / 2`.
pub fn rn_horizon(m: f64, q: f64) -> f64 {
    0.5 * (m + (m * m - 4.0 * q * q).sqrt())
}

fn build_ode_model(
    kind: WarpKind,
    force: Force,
    s0: f64,
    opts: OdeOptions,
    stop_on_turn: bool,
) -> Result<WarpingModel> {
    let mut opts = opts;
    for _ in 0..6 {
        let sol = OdeSolution::integrate(force, s0, opts, stop_on_turn);
        if sol.h.len() < 8 {
            return Err(GeometryError::InvalidParameters(
                "ODE domain collapsed to fewer than 8 nodes".into(),
            ));
        }
        if sol.max_conservation_residual() < opts.conservation_tol {
            return Ok(WarpingModel {
                kind,
                t_min: 0.0,
                t_max: sol.t_max(),
                s0,
                repr: Repr::Ode(Arc::new(sol)),
            });
        }
        opts.step *= 0.5;
    }
    Err(GeometryError::InvalidParameters(
        "could not meet the conservation tolerance".into(),
    ))
}

/// `h(t_min)`, `h'(t_min)` and a one-sided finite-difference `h''(t_min)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothnessReport {
    pub h: f64,
    pub dh: f64,
    pub ddh_fd: f64,
    pub smooth_pole: bool,
}

impl WarpingModel {
    pub(crate) fn from_radial(profile: RadialConformalFactor) -> Self {
        let (r0, r1) = profile.annulus();
        let t_min = profile.g(r0).expect("annulus endpoint");
        let t_max = if r1.is_finite() {
            profile.g(r1).unwrap_or(f64::INFINITY)
        } else {
            f64::INFINITY
        };
        let s0 = if r0 > 0.0 {
            r0 / profile.values(r0).u
        } else {
            0.0
        };
        WarpingModel {
            kind: WarpKind::Custom,
            t_min,
            t_max,
            s0,
            repr: Repr::Radial(Arc::new(profile)),
        }
    }

    pub fn kind(&self) -> WarpKind {
        self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.t_min, self.t_max)
    }

    /// `h(t_min)`: zero at a pole, the horizon radius for dss/rn.
    pub fn s0(&self) -> f64 {
        self.s0
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let slack = 1e-12 * (1.0 + t.abs());
        if t.is_nan() || t < self.t_min - slack || t > self.t_max + slack {
            return Err(GeometryError::OutOfDomain {
                t,
                min: self.t_min,
                max: self.t_max,
            });
        }
        Ok(())
    }

    /// `(h, h', h'')` at `t`.
    pub fn eval(&self, t: f64) -> Result<(f64, f64, f64)> {
        self.check_domain(t)?;
        Ok(self.eval_unchecked(t.clamp(self.t_min, self.t_max)))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> (f64, f64, f64) {
        match &self.repr {
            Repr::SpaceForm { c } => space_form_eval(*c, t),
            Repr::Ode(sol) => sol.eval(t),
            Repr::Radial(profile) => {
                let r = profile.g_inv_unchecked(t);
                let v = profile.values(r);
                let h = r / v.u;
                let dh = 1.0 - h * v.du;
                let ddh = -h * (v.ddu * v.u + (1.0 - dh) * dh / (h * h));
                (h, dh, ddh)
            }
        }
    }

    /// `(K_tan, K_rad) = ((1 - h'^2)/h^2, -h''/h)`.
    pub fn curvatures(&self, t: f64) -> Result<(f64, f64)> {
        let (h, dh, ddh) = self.eval(t)?;
        if !(h > 0.0) {
            return Err(GeometryError::OutOfDomain {
                t,
                min: self.t_min,
                max: self.t_max,
            });
        }
        Ok(((1.0 - dh * dh) / (h * h), -ddh / h))
    }

    /// `K_tan - (1 - ν^2)(K_tan - K_rad)`, the ambient part of the rigidity radicand.
    pub fn radicand_ambient(&self, t: f64, nu: f64) -> Result<f64> {
        let (k_tan, k_rad) = self.curvatures(t)?;
        Ok(k_tan - (1.0 - nu * nu) * (k_tan - k_rad))
    }

    /// Closed form of the same quantity for dss/rn/space forms:
    /// `c + m(3ν^2 - 1)/(2h^3)` and `m(3ν^2 - 1)/(2h^3) + q^2(1 - 2ν^2)/h^4`.
    pub fn radicand_closed_form(&self, t: f64, nu: f64) -> Result<Option<f64>> {
        let (h, _, _) = self.eval(t)?;
        let nu2 = nu * nu;
        Ok(match self.kind {
            WarpKind::Euclidean => Some(0.0),
            WarpKind::Sphere { c } | WarpKind::Hyperbolic { c } => Some(c),
            WarpKind::Dss { m, c } => Some(c + m * (3.0 * nu2 - 1.0) / (2.0 * h.powi(3))),
            WarpKind::Rn { m, q } => Some(
                m * (3.0 * nu2 - 1.0) / (2.0 * h.powi(3)) + q * q * (1.0 - 2.0 * nu2) / h.powi(4),
            ),
            WarpKind::Custom => None,
        })
    }

    /// Largest `|h'^2 - radicand(h)|` over the stored ODE nodes (`None` for closed forms).
    pub fn conservation_residual(&self) -> Option<f64> {
        match &self.repr {
            Repr::Ode(sol) => Some(sol.max_conservation_residual()),
            _ => None,
        }
    }

    /// Stored ODE nodes `(t, h, h')`; empty for closed-form models.
    pub fn nodes(&self) -> Vec<(f64, f64, f64)> {
        match &self.repr {
            Repr::Ode(sol) => sol
                .h
                .iter()
                .zip(&sol.dh)
                .enumerate()
                .map(|(i, (&h, &dh))| (i as f64 * sol.step, h, dh))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// `t` with `h(t) = target`, for monotone models (`h' > 0` on the interior).
    pub fn t_for_h(&self, target: f64) -> Result<f64> {
        let hi = if self.t_max.is_finite() {
            self.t_max
        } else {
            self.t_min + 1.0
        };
        let mut hi = hi;
        if !self.t_max.is_finite() {
            while self.eval_unchecked(hi).0 < target {
                hi *= 2.0;
                if hi > 1e12 {
                    break;
                }
            }
        }
        let lo = self.t_min;
        bisect(|t| self.eval_unchecked(t).0 - target, lo, hi, 1e-15).ok_or_else(|| {
            GeometryError::InvalidParameters(format!("h = {target} is not attained on the domain"))
        })
    }

    /// Inspect the left end of the domain for a smooth pole: `h = 0`,
    /// `h' = 1`, `h'' = 0`.
    pub fn check_origin_smoothness(&self) -> SmoothnessReport {
        let t0 = self.t_min;
        let (h, dh, _) = self.eval_unchecked(t0);
        let span = if self.t_max.is_finite() {
            self.t_max - t0
        } else {
            1.0
        };
        let d = (1e-3_f64).min(span / 20.0);
        let f: Vec<f64> = (0..6)
            .map(|k| self.eval_unchecked(t0 + k as f64 * d).0)
            .collect();
        let ddh_fd = (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4]
            - 10.0 * f[5])
            / (12.0 * d * d);
        let tol = 1e-6;
        let smooth_pole = h.abs() < tol && (dh - 1.0).abs() < tol && ddh_fd.abs() < tol;
        SmoothnessReport {
            h,
            dh,
            ddh_fd,
            smooth_pole,
        }
    }
}

fn space_form_eval(c: f64, t: f64) -> (f64, f64, f64) {
    if c > 0.0 {
        let k = c.sqrt();
        let s = (k * t).sin() / k;
        (s, (k * t).cos(), -c * s)
    } else if c < 0.0 {
        let k = (-c).sqrt();
        let s = (k * t).sinh() / k;
        (s, (k * t).cosh(), -c * s)
    } else {
        (t, 1.0, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::central_d1;

    #[test]
    fn space_form_values() {
        assert_eq!(make_space_form(0.0).eval(3.0).unwrap(), (3.0, 1.0, 0.0));
        let (h, dh, ddh) = make_space_form(1.0).eval(PI / 2.0).unwrap();
        assert!((h - 1.0).abs() < 1e-15 && dh.abs() < 1e-15 && (ddh + 1.0).abs() < 1e-15);
        let (h, dh, ddh) = make_space_form(-1.0).eval(1.0).unwrap();
        assert!((h - 1.175_201_193_643_801_4).abs() < 1e-14);
        assert!((dh - 1.543_080_634_815_243_7).abs() < 1e-14);
        assert!((ddh - 1.175_201_193_643_801_4).abs() < 1e-14);
        assert_eq!(make_space_form(1.0).domain(), (0.0, PI));
    }

    #[test]
    fn space_form_curvatures_are_constant() {
        let (kt, kr) = make_space_form(1.0).curvatures(PI / 3.0).unwrap();
        assert!((kt - 1.0).abs() < 1e-12 && (kr - 1.0).abs() < 1e-12);
        assert_eq!(make_space_form(0.0).curvatures(5.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn dss_horizon_and_initial_acceleration() {
        // Oracle: the root of 1 - 2/r by plain bisection.
        let oracle = bisect(|r| 1.0 - 2.0 / r, 0.5, 10.0, 1e-15).unwrap();
        let model = make_dss(2.0, 0.0).unwrap();
        assert!((model.s0() - oracle).abs() < 1e-12);
        assert!((model.s0() - 2.0).abs() < 1e-12);
        let (h, dh, ddh) = model.eval(0.0).unwrap();
        assert!((h - 2.0).abs() < 1e-12 && dh == 0.0);
        assert!((ddh - 0.25).abs() < 1e-12);
        // Independent check: finite difference of h' near the horizon.
        let fd = central_d1(|t| model.eval_unchecked(t).1, 0.05, 1e-3);
        let (_, _, ddh_at) = model.eval(0.05).unwrap();
        assert!((fd - ddh_at).abs() < 1e-8);
    }

    #[test]
    fn dss_conservation_on_nodes() {
        for (m, c) in [(1.0, 0.0), (2.0, 0.0), (1.0, -0.1), (1.0, 0.1)] {
            let model = make_dss(m, c).unwrap();
            let res = model.conservation_residual().unwrap();
            assert!(res < 1e-8, "m={m} c={c}: {res}");
            for (_, h, dh) in model.nodes() {
                assert!(dh >= 0.0);
                assert!(h > 0.0);
            }
        }
    }

    #[test]
    fn dss_positive_c_truncates_at_outer_horizon() {
        let (m, c) = (1.0, 0.1);
        let (_, s1) = dss_horizons(m, c).unwrap();
        let model = make_dss(m, c).unwrap();
        let (_, t_max) = model.domain();
        let (h, dh, _) = model.eval(t_max).unwrap();
        assert!((h - s1).abs() < 1e-3 * s1, "h={h} s1={s1}");
        assert!(dh < 0.05);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(make_dss(0.0, 0.0).is_err());
        assert!(make_dss(-1.0, 0.0).is_err());
        assert!(make_dss(1.0, 4.0 / 27.0).is_err());
        assert!(make_rn(1.0, 0.5).is_err());
        assert!(make_rn(1.0, 0.0).is_err());
    }

    #[test]
    fn rn_horizon_closed_form() {
        let (m, q): (f64, f64) = (2.0, 0.5);
        let closed_form = 2.0 * q * q / (m - (m * m - 4.0 * q * q).sqrt());
        let model = make_rn(m, q).unwrap();
        assert!((model.s0() - closed_form).abs() < 1e-12);
        assert!((model.s0() - (1.0 + 3f64.sqrt() / 2.0)).abs() < 1e-12);
        let s0 = model.s0();
        assert!((1.0 - m / s0 + q * q / (s0 * s0)).abs() < 1e-12);
        let (_, _, ddh) = model.eval(0.0).unwrap();
        let expected = m / (2.0 * s0 * s0) - q * q / s0.powi(3);
        assert!((ddh - expected).abs() < 1e-12);
        assert!((ddh - 0.248_711_305_964_282).abs() < 1e-12);
        let fd = central_d1(|t| model.eval_unchecked(t).1, 0.05, 1e-3);
        assert!((fd - model.eval(0.05).unwrap().2).abs() < 1e-8);
    }

    #[test]
    fn rn_tends_to_dss_as_charge_vanishes() {
        let rn = make_rn(2.0, 1e-4).unwrap();
        let dss = make_dss(2.0, 0.0).unwrap();
        for k in 0..50 {
            let t = 0.1 + k as f64 * 0.4;
            let a = rn.eval(t).unwrap().0;
            let b = dss.eval(t).unwrap().0;
            assert!((a - b).abs() < 1e-3, "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn dss_curvature_gap() {
        let model = make_dss(2.0, 0.0).unwrap();
        let (_, t_max) = model.domain();
        for k in 0..20 {
            let t = t_max * (k as f64 + 0.5) / 20.0;
            let (kt, kr) = model.curvatures(t).unwrap();
            let h = model.eval(t).unwrap().0;
            assert!((kt - kr - 3.0 / h.powi(3)).abs() < 1e-9);
        }
    }

    #[test]
    fn interpolation_is_self_consistent() {
        // h' must be the derivative of h, not just close to it at nodes.
        let model = make_rn(2.0, 0.5).unwrap();
        for k in 0..40 {
            let t = 0.0137 + k as f64 * 0.731;
            let fd = central_d1(|s| model.eval_unchecked(s).0, t, 1e-3);
            assert!((fd - model.eval(t).unwrap().1).abs() < 1e-10);
        }
    }

    #[test]
    fn origin_smoothness() {
        assert!(make_space_form(1.0).check_origin_smoothness().smooth_pole);
        assert!(make_space_form(0.0).check_origin_smoothness().smooth_pole);
        assert!(make_space_form(-1.0).check_origin_smoothness().smooth_pole);
        let dss = make_dss(2.0, 0.0).unwrap().check_origin_smoothness();
        assert!(!dss.smooth_pole);
        assert!((dss.h - 2.0).abs() < 1e-12);
    }

    #[test]
    fn t_for_h_inverts() {
        let model = make_dss(2.0, 0.0).unwrap();
        let t = model.t_for_h(3.0).unwrap();
        assert!((model.eval(t).unwrap().0 - 3.0).abs() < 1e-12);
    }
}
