//! Numerical geometry of closed surfaces in conformally flat, radially
//! symmetric 3-manifolds `(R^3, |dx|^2 / u(|x|)^2)`, equivalently warped
//! products `dt^2 + h(t)^2 dω^2`.
//!
//! The crate is organised bottom-up:
//!
//! - [`warp`]: warping functions `h(t)` (space forms, de Sitter-Schwarzschild,
//!   Reissner-Nordström) and the two ambient sectional curvatures.
//! - [`ambient`]: the radial conformal factor `u(r)`, Christoffel symbols,
//!   the curvature tensor of the conformal metric and a brute-force oracle.
//! - [`immersion`]: two-chart stereographic grids of immersed spheres and the
//!   per-node shape quantities (normal, mean curvature, Hopf differential).
//! - [`verify`]: residuals of the structure identities, the rigidity
//!   inequality evaluator, umbilic/slice classification and Hopf-zero indices.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod ambient;
pub mod error;
pub mod immersion;
pub mod numerics;
pub mod verify;
pub mod warp;

pub use ambient::RadialConformalFactor;
pub use error::{GeometryError, Result};
pub use immersion::{
    build_surface, shape_field, ChartId, HarmonicTerm, ImmersionGrid, ShapeField, SurfaceSpec,
};
pub use verify::{
    classify, et_test, evaluate_identity, hopf_zero_indices, radicand_identity, ClassifyTolerances,
    EtReport, HopfZero, HopfZeros, IdentityId, ResidualReport, Verdict,
};
pub use warp::{make_dss, make_rn, make_space_form, WarpKind, WarpingModel};

/// Euclidean 3-vector used throughout.
pub type Vec3 = nalgebra::Vector3<f64>;
/// Complexified 3-vector (bilinear, not Hermitian, extension of the dot product).
pub type CVec3 = nalgebra::Vector3<num_complex::Complex64>;
