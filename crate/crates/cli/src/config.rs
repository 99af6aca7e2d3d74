use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;
use warphopf::{
    make_dss, make_rn, make_space_form, HarmonicTerm, IdentityId, SurfaceSpec, WarpingModel,
};

pub const MIN_GRID_N: usize = 32;
pub const MAX_GRID_N: usize = 2048;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// One verification run, read from a JSON file. Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub manifold: ManifoldConfig,
    pub surface: SurfaceConfig,
    pub checks: Vec<Check>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

/// Ambient warped product. `anchor` fixes the scale of the conformal picture:
/// the limit of `r/t` at a pole, or the Euclidean radius of the horizon.
/// Defaults: 1 for space forms, `m/4` for dss and rn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ManifoldConfig {
    SpaceForm {
        c: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        anchor: Option<f64>,
    },
    Dss {
        m: f64,
        #[serde(default)]
        c: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        anchor: Option<f64>,
    },
    Rn {
        m: f64,
        q: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        anchor: Option<f64>,
    },
}

impl ManifoldConfig {
    pub fn model(&self) -> warphopf::Result<WarpingModel> {
        match *self {
            ManifoldConfig::SpaceForm { c, .. } => Ok(make_space_form(c)),
            ManifoldConfig::Dss { m, c, .. } => make_dss(m, c),
            ManifoldConfig::Rn { m, q, .. } => make_rn(m, q),
        }
    }

    pub fn anchor(&self) -> f64 {
        match *self {
            ManifoldConfig::SpaceForm { anchor, .. } => anchor.unwrap_or(1.0),
            ManifoldConfig::Dss { m, anchor, .. } | ManifoldConfig::Rn { m, anchor, .. } => {
                anchor.unwrap_or(m / 4.0)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceKind {
    Slice,
    EuclideanSphere,
    Graph,
    PerturbedSlice,
    Ellipsoid,
}

impl SurfaceKind {
    fn name(self) -> &'static str {
        match self {
            SurfaceKind::Slice => "slice",
            SurfaceKind::EuclideanSphere => "euclidean_sphere",
            SurfaceKind::Graph => "graph",
            SurfaceKind::PerturbedSlice => "perturbed_slice",
            SurfaceKind::Ellipsoid => "ellipsoid",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    #[serde(rename = "type")]
    pub kind: SurfaceKind,
    #[serde(default)]
    pub params: SurfaceParams,
    pub grid_n: usize,
}

/// Surface parameters. A slice level is given either as `t0` or as the warping
/// value `h0`, in which case `t0` solves `h(t0) = h0`. `mode` is `[l, m]`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 3]>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<(u32, i32)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<HarmonicTerm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semiaxes: Option<[f64; 3]>,
}

impl SurfaceParams {
    fn present(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        let mut note = |set: bool, key| {
            if set {
                keys.push(key);
            }
        };
        note(self.t0.is_some(), "t0");
        note(self.h0.is_some(), "h0");
        note(self.center.is_some(), "center");
        note(self.radius.is_some(), "R");
        note(self.eps.is_some(), "eps");
        note(self.mode.is_some(), "mode");
        note(self.terms.is_some(), "terms");
        note(self.semiaxes.is_some(), "semiaxes");
        keys
    }
}

impl SurfaceConfig {
    fn allowed(&self) -> &'static [&'static str] {
        match self.kind {
            SurfaceKind::Slice => &["t0", "h0"],
            SurfaceKind::EuclideanSphere => &["center", "R"],
            SurfaceKind::Graph => &["t0", "h0", "terms"],
            SurfaceKind::PerturbedSlice => &["t0", "h0", "eps", "mode"],
            SurfaceKind::Ellipsoid => &["semiaxes"],
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if !(MIN_GRID_N..=MAX_GRID_N).contains(&self.grid_n) {
            return Err(invalid(format!(
                "grid_n = {} is outside [{MIN_GRID_N}, {MAX_GRID_N}]",
                self.grid_n
            )));
        }
        let allowed = self.allowed();
        if let Some(key) = self
            .params
            .present()
            .into_iter()
            .find(|k| !allowed.contains(k))
        {
            return Err(invalid(format!(
                "parameter {key} does not apply to surface {}",
                self.kind.name()
            )));
        }
        let p = &self.params;
        let level = matches!(
            self.kind,
            SurfaceKind::Slice | SurfaceKind::Graph | SurfaceKind::PerturbedSlice
        );
        if level && p.t0.is_some() == p.h0.is_some() {
            return Err(invalid(format!(
                "surface {} needs exactly one of t0, h0",
                self.kind.name()
            )));
        }
        let missing = |key: &str| {
            invalid(format!(
                "surface {} needs parameter {key}",
                self.kind.name()
            ))
        };
        match self.kind {
            SurfaceKind::EuclideanSphere => {
                p.center.ok_or_else(|| missing("center"))?;
                p.radius.ok_or_else(|| missing("R"))?;
            }
            SurfaceKind::Graph => {
                p.terms.as_ref().ok_or_else(|| missing("terms"))?;
            }
            SurfaceKind::PerturbedSlice => {
                p.eps.ok_or_else(|| missing("eps"))?;
                p.mode.ok_or_else(|| missing("mode"))?;
            }
            SurfaceKind::Ellipsoid => {
                p.semiaxes.ok_or_else(|| missing("semiaxes"))?;
            }
            SurfaceKind::Slice => {}
        }
        Ok(())
    }

    /// Resolve the parameters against `model`; must follow [`RunConfig::validate`].
    pub fn spec(&self, model: &WarpingModel) -> warphopf::Result<SurfaceSpec> {
        let p = &self.params;
        let t0 = || match (p.t0, p.h0) {
            (Some(t0), _) => Ok(t0),
            (None, Some(h0)) => model.t_for_h(h0),
            (None, None) => unreachable!("validated"),
        };
        Ok(match self.kind {
            SurfaceKind::Slice => SurfaceSpec::Slice { t0: t0()? },
            SurfaceKind::EuclideanSphere => SurfaceSpec::EuclideanSphere {
                center: p.center.expect("validated"),
                radius: p.radius.expect("validated"),
            },
            SurfaceKind::Graph => SurfaceSpec::Graph {
                t0: t0()?,
                terms: p.terms.clone().expect("validated"),
            },
            SurfaceKind::PerturbedSlice => {
                let (l, m) = p.mode.expect("validated");
                SurfaceSpec::PerturbedSlice {
                    t0: t0()?,
                    eps: p.eps.expect("validated"),
                    l,
                    m,
                }
            }
            SurfaceKind::Ellipsoid => SurfaceSpec::Ellipsoid {
                semiaxes: p.semiaxes.expect("validated"),
            },
        })
    }
}

/// A requested check: an identity id (`"I1"` … `"I10"`) or one of
/// `"et_test"`, `"classify"`, `"zero_index"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Identity(IdentityId),
    EtTest,
    Classify,
    ZeroIndex,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::Identity(id) => write!(f, "{id}"),
            Check::EtTest => f.write_str("et_test"),
            Check::Classify => f.write_str("classify"),
            Check::ZeroIndex => f.write_str("zero_index"),
        }
    }
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "et_test" => Ok(Check::EtTest),
            "classify" => Ok(Check::Classify),
            "zero_index" => Ok(Check::ZeroIndex),
            _ => s
                .parse()
                .map(Check::Identity)
                .map_err(|_| format!("unknown check {s:?}")),
        }
    }
}

impl Serialize for Check {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Check {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute umbilicity tolerance; `1e-5 (1 + max |H|)` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub umbilic_tol: Option<f64>,
    #[serde(default = "default_rad_floor")]
    pub rad_floor: f64,
    #[serde(default = "default_p_norm")]
    pub p_norm: f64,
    /// Bound on the normalised max residual of every requested identity.
    #[serde(default = "default_residual_tol")]
    pub residual_tol: f64,
}

fn default_rad_floor() -> f64 {
    1e-12
}

fn default_p_norm() -> f64 {
    4.0
}

fn default_residual_tol() -> f64 {
    1e-5
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            umbilic_tol: None,
            rad_floor: default_rad_floor(),
            p_norm: default_p_norm(),
            residual_tol: default_residual_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub report_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_path: Option<PathBuf>,
    #[serde(default)]
    pub convergence_pair: bool,
    /// Include wall-clock times in the report (makes reports differ between runs).
    #[serde(default)]
    pub timings: bool,
}

/// Expected classification verdicts; unset fields are not checked.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub umbilic: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cmc: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice: Option<bool>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.into(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.surface.validate()?;
        if self.checks.is_empty() && self.expect.is_none() {
            return Err(invalid("no checks requested"));
        }
        if self.manifold.anchor().partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(invalid("anchor must be positive"));
        }
        let t = &self.tolerances;
        if t.p_norm.is_nan() || t.p_norm <= 2.0 {
            return Err(invalid(format!("p_norm = {} must exceed 2", t.p_norm)));
        }
        if t.umbilic_tol.is_some_and(|v| v.is_nan() || v <= 0.0) {
            return Err(invalid("umbilic_tol must be positive"));
        }
        if t.rad_floor.is_nan()
            || t.rad_floor < 0.0
            || t.residual_tol.is_nan()
            || t.residual_tol <= 0.0
        {
            return Err(invalid(
                "rad_floor must be non-negative and residual_tol positive",
            ));
        }
        if self.threads == Some(0) {
            return Err(invalid("threads must be at least 1"));
        }
        Ok(())
    }
}
