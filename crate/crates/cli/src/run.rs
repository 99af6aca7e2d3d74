use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use warphopf::ambient::radial_from_warp;
use warphopf::verify::meets_order;
use warphopf::{
    build_surface, classify, et_test, evaluate_identity, hopf_zero_indices, ClassifyTolerances,
    GeometryError, HopfZeros, IdentityId, RadialConformalFactor, ResidualReport, ShapeField,
    SurfaceSpec, Verdict, WarpingModel,
};

use crate::config::{Check, ConfigError, Expect, RunConfig};

/// Minimum convergence order reported as met for a coarse/fine residual pair.
pub const MIN_ORDER: f64 = 3.5;
/// `|p|` threshold, relative to its maximum, for Hopf-zero candidates.
pub const ZERO_THRESHOLD: f64 = 0.1;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot build thread pool: {0}")]
    Threads(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        1
    }
}

/// Options from the command line that override the config file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub threads: Option<usize>,
    pub csv_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub results: Vec<CheckResult>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<Timing>>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            2
        }
    }

    pub fn identity(&self, id: IdentityId) -> Option<&IdentityResult> {
        self.results.iter().find_map(|r| match r {
            CheckResult::Identity(r) if r.report.identity == id => Some(r),
            _ => None,
        })
    }

    pub fn classify(&self) -> Option<&ClassifyResult> {
        self.results.iter().find_map(|r| match r {
            CheckResult::Classify(r) => Some(r),
            _ => None,
        })
    }

    pub fn et_test(&self) -> Option<&EtSummary> {
        self.results.iter().find_map(|r| match r {
            CheckResult::EtTest(r) => Some(r),
            _ => None,
        })
    }

    pub fn zero_index(&self) -> Option<&HopfZeros> {
        self.results.iter().find_map(|r| match r {
            CheckResult::ZeroIndex { zeros } => Some(zeros),
            _ => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum CheckResult {
    Identity(IdentityResult),
    EtTest(EtSummary),
    Classify(ClassifyResult),
    ZeroIndex { zeros: HopfZeros },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResult {
    pub report: ResidualReport,
    pub tolerance: f64,
    pub passed: bool,
    /// The same identity at `2 grid_n` when a convergence pair was requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fine: Option<ResidualReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meets_order: Option<bool>,
}

/// Scalar part of an [`warphopf::EtReport`]; per-node values go to the CSV dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtSummary {
    pub sup_f_min: f64,
    pub norm_p: f64,
    pub p: f64,
    pub node_count: usize,
    pub umbilic_count: usize,
    pub max_lhs: f64,
    pub min_radicand: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyResult {
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_met: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

/// Effective worker count: command line, then config, then `WARPHOPF_THREADS`.
pub fn resolve_threads(
    flag: Option<usize>,
    config: Option<usize>,
    env: Option<&str>,
) -> Result<Option<usize>, RunError> {
    if let Some(n) = flag.or(config) {
        return if n == 0 {
            Err(ConfigError::Invalid("threads must be at least 1".into()).into())
        } else {
            Ok(Some(n))
        };
    }
    match env.map(str::trim).filter(|s| !s.is_empty()) {
        None => Ok(None),
        Some(s) => match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(ConfigError::Invalid(format!(
                "WARPHOPF_THREADS = {s:?} is not a positive integer"
            ))
            .into()),
        },
    }
}

/// Load `path`, run every check and write the report (and CSV, if asked).
pub fn run_file(path: &Path, opts: &RunOptions) -> Result<Report, RunError> {
    let config = RunConfig::load(path)?;
    let env = std::env::var("WARPHOPF_THREADS").ok();
    let threads = resolve_threads(opts.threads, config.threads, env.as_deref())?;
    let report = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| RunError::Threads(e.to_string()))?
            .install(|| run(&config, opts.csv_path.as_deref())),
        None => run(&config, opts.csv_path.as_deref()),
    }?;
    write_report(&report, &config.output.report_path)?;
    Ok(report)
}

pub fn write_report(report: &Report, path: &Path) -> Result<(), RunError> {
    let write_err = |source| RunError::Write {
        path: path.into(),
        source,
    };
    let mut text = serde_json::to_string_pretty(report).expect("reports serialise");
    text.push('\n');
    std::fs::write(path, text).map_err(write_err)
}

struct Clock {
    enabled: bool,
    start: Instant,
    stages: Vec<Timing>,
}

impl Clock {
    fn lap(&mut self, stage: impl Into<String>) {
        if self.enabled {
            let now = Instant::now();
            self.stages.push(Timing {
                stage: stage.into(),
                seconds: (now - self.start).as_secs_f64(),
            });
            self.start = now;
        }
    }
}

struct Scene {
    model: WarpingModel,
    ambient: RadialConformalFactor,
    spec: SurfaceSpec,
}

impl Scene {
    fn shape(&self, n: usize) -> Result<ShapeField, GeometryError> {
        warphopf::shape_field(&build_surface(&self.spec, &self.ambient, n)?, &self.ambient)
    }
}

/// Run the checks of `config` in the current rayon pool. `csv_override`
/// replaces `output.csv_path`. The report is returned, not written.
pub fn run(config: &RunConfig, csv_override: Option<&Path>) -> Result<Report, RunError> {
    config.validate()?;
    let mut clock = Clock {
        enabled: config.output.timings,
        start: Instant::now(),
        stages: Vec::new(),
    };
    let model = config.manifold.model()?;
    let ambient = radial_from_warp(&model, config.manifold.anchor())?;
    let spec = config.surface.spec(&model)?;
    let scene = Scene {
        model,
        ambient,
        spec,
    };
    clock.lap("ambient");

    let n = config.surface.grid_n;
    let wants_surface = config.expect.is_some()
        || config
            .checks
            .iter()
            .any(|c| !matches!(c, Check::Identity(id) if !id.needs_surface()));
    let shape = if wants_surface {
        Some(scene.shape(n)?)
    } else {
        None
    };
    clock.lap("shape_field");
    let mut fine: Option<ShapeField> = None;

    let tol = &config.tolerances;
    let mut results = Vec::new();
    let mut passed = true;
    let mut classified = false;
    for check in &config.checks {
        let result = match *check {
            Check::Identity(id) => {
                let report = match &shape {
                    Some(shape) => evaluate_identity(shape, &scene.ambient, &scene.model, id)?,
                    None => warphopf::radicand_identity(&scene.model)?,
                };
                let ok = report.max_residual < tol.residual_tol;
                passed &= ok;
                let mut result = IdentityResult {
                    report,
                    tolerance: tol.residual_tol,
                    passed: ok,
                    fine: None,
                    meets_order: None,
                };
                if config.output.convergence_pair && id.needs_surface() {
                    if fine.is_none() {
                        fine = Some(scene.shape(2 * n)?);
                        clock.lap("shape_field_fine");
                    }
                    let fine_shape = fine.as_ref().expect("built above");
                    let fine_report =
                        evaluate_identity(fine_shape, &scene.ambient, &scene.model, id)?;
                    result.meets_order = Some(meets_order(&result.report, &fine_report, MIN_ORDER));
                    result.report = result.report.with_convergence(&fine_report);
                    result.fine = Some(fine_report);
                }
                CheckResult::Identity(result)
            }
            Check::EtTest => {
                let shape = shape.as_ref().expect("surface built");
                let et = et_test(shape, &scene.model, tol.p_norm, tol.rad_floor)?;
                CheckResult::EtTest(EtSummary {
                    sup_f_min: et.sup_f_min,
                    norm_p: et.norm_p,
                    p: et.p,
                    node_count: et.f_min.len(),
                    umbilic_count: et.umbilic_count(),
                    max_lhs: et.lhs.iter().copied().fold(0.0, f64::max),
                    min_radicand: et.min_radicand(),
                })
            }
            Check::Classify => {
                classified = true;
                let result =
                    classify_check(shape.as_ref().expect("surface built"), &scene.model, config)?;
                passed &= result.expect_met != Some(false);
                CheckResult::Classify(result)
            }
            Check::ZeroIndex => {
                let shape = shape.as_ref().expect("surface built");
                let max_abs_h = shape
                    .owned()
                    .map(|(_, _, _, s)| s.h.abs())
                    .fold(0.0, f64::max);
                let umbilic_tol = ClassifyTolerances {
                    umbilic_tol: tol.umbilic_tol,
                }
                .resolve(max_abs_h);
                CheckResult::ZeroIndex {
                    zeros: hopf_zero_indices(shape, umbilic_tol, ZERO_THRESHOLD),
                }
            }
        };
        clock.lap(check.to_string());
        results.push(result);
    }
    if config.expect.is_some() && !classified {
        let result = classify_check(shape.as_ref().expect("surface built"), &scene.model, config)?;
        passed &= result.expect_met != Some(false);
        results.push(CheckResult::Classify(result));
        clock.lap("classify");
    }

    if let Some(path) = csv_override.or(config.output.csv_path.as_deref()) {
        let shape = match &shape {
            Some(shape) => shape,
            None => &scene.shape(n)?,
        };
        let write_err = |source| RunError::Write {
            path: path.into(),
            source,
        };
        let mut out = BufWriter::new(File::create(path).map_err(write_err)?);
        shape.write_csv(&mut out).map_err(write_err)?;
        out.flush().map_err(write_err)?;
        clock.lap("csv");
    }

    Ok(Report {
        config: config.clone(),
        results,
        passed,
        timings: config.output.timings.then_some(clock.stages),
    })
}

fn classify_check(
    shape: &ShapeField,
    model: &WarpingModel,
    config: &RunConfig,
) -> Result<ClassifyResult, RunError> {
    let verdict = classify(
        shape,
        model,
        ClassifyTolerances {
            umbilic_tol: config.tolerances.umbilic_tol,
        },
    )?;
    let expect_met = config.expect.as_ref().map(|e| expectation_met(e, &verdict));
    Ok(ClassifyResult {
        verdict,
        expect_met,
    })
}

fn expectation_met(expect: &Expect, verdict: &Verdict) -> bool {
    let agrees = |want: Option<bool>, got: bool| want.is_none_or(|w| w == got);
    agrees(expect.umbilic, verdict.umbilic)
        && agrees(expect.cmc, verdict.cmc)
        && agrees(expect.slice, verdict.slice)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_precedence() {
        assert_eq!(
            resolve_threads(Some(3), Some(2), Some("5")).unwrap(),
            Some(3)
        );
        assert_eq!(resolve_threads(None, Some(2), Some("5")).unwrap(), Some(2));
        assert_eq!(resolve_threads(None, None, Some(" 5 ")).unwrap(), Some(5));
        assert_eq!(resolve_threads(None, None, Some("")).unwrap(), None);
        assert_eq!(resolve_threads(None, None, None).unwrap(), None);
        assert!(resolve_threads(None, None, Some("many")).is_err());
        assert!(resolve_threads(Some(0), None, None).is_err());
    }

    #[test]
    fn expectations_ignore_unset_fields() {
        let verdict = Verdict {
            umbilic: true,
            cmc: true,
            slice: false,
            d1_fraction: 0.0,
            d2_fraction: 0.0,
            kappa_spread: 0.0,
            h_spread: 0.0,
            curvature_gap_zero_fraction: 1.0,
            tolerance: 1e-5,
        };
        assert!(expectation_met(&Expect::default(), &verdict));
        assert!(expectation_met(
            &Expect {
                umbilic: Some(true),
                slice: Some(false),
                ..Default::default()
            },
            &verdict
        ));
        assert!(!expectation_met(
            &Expect {
                slice: Some(true),
                ..Default::default()
            },
            &verdict
        ));
    }
}
