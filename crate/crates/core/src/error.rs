use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("t = {t} lies outside the model domain [{min}, {max}]")]
    OutOfDomain { t: f64, min: f64, max: f64 },

    #[error("radius {r} lies outside the ambient annulus [{r0}, {r1}]")]
    OutsideAnnulus { r: f64, r0: f64, r1: f64 },

    #[error("vectors span a degenerate plane")]
    DegeneratePlane,

    #[error("surface node (chart {chart}, i={i}, j={j}) escapes the ambient annulus: {reason}")]
    SurfaceEscapes {
        chart: &'static str,
        i: usize,
        j: usize,
        reason: String,
    },

    #[error("identity {0} requires a conformal chart but the surface grid is not conformal")]
    ConformalRequired(String),

    #[error("integral of 1/h diverges: {0}")]
    Divergence(String),

    #[error("grid size {0} is too small (need at least {1} nodes per side)")]
    GridTooSmall(usize, usize),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
