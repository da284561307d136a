//! Verification requests, the target registry and report assembly.

pub mod report;
pub mod targets;

use crate::error::GeomError;
use crate::sweep::{Execution, Grid};
use report::{Location, ReportError, ResidualReport};
use std::collections::BTreeMap;
use targets::{FixtureKind, TargetInfo, TARGETS};

pub use report::{REPORT_SCHEMA, SCHEMA_VERSION};

/// The meta-target running every registered target with its defaults.
pub const ALL: &str = "all";

/// Threshold overrides. `checks` replaces every positive-check tolerance;
/// `named` replaces the threshold of any measure with that name.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Tolerances {
    pub checks: Option<f64>,
    pub named: BTreeMap<String, f64>,
}

impl Tolerances {
    /// Parses `value` or `name=value` items.
    pub fn parse(items: &[String]) -> Result<Tolerances, UsageError> {
        let mut t = Tolerances::default();
        for item in items {
            let (name, value) = match item.split_once('=') {
                Some((n, v)) => (Some(n.trim()), v),
                None => (None, item.as_str()),
            };
            let v: f64 = value
                .trim()
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite() && *v >= 0.0)
                .ok_or_else(|| UsageError(format!("bad tolerance {item:?}")))?;
            match name {
                Some(n) => {
                    t.named.insert(n.to_string(), v);
                }
                None => t.checks = Some(v),
            }
        }
        Ok(t)
    }

    pub fn apply(&self, mut spec: report::MeasureSpec, is_check: bool) -> report::MeasureSpec {
        if is_check {
            if let Some(t) = self.checks {
                spec.threshold = t;
            }
        }
        if let Some(t) = self.named.get(&spec.name) {
            spec.threshold = *t;
        }
        spec
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyRequest {
    pub target: String,
    /// Empty selects the target's default fixtures.
    pub fixtures: Vec<String>,
    /// `None` selects the target's default grid.
    pub grid: Option<Vec<usize>>,
    pub rect: Option<Vec<(f64, f64)>>,
    pub tol: Tolerances,
    pub seed: u64,
    pub execution: Execution,
}

impl VerifyRequest {
    pub fn new(target: &str) -> Self {
        VerifyRequest {
            target: target.into(),
            fixtures: Vec::new(),
            grid: None,
            rect: None,
            tol: Tolerances::default(),
            seed: 0,
            execution: Execution::default(),
        }
    }
}

/// Bad request: unknown names, malformed grids and the like.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

/// Why a target stopped early.
#[derive(Clone, Debug)]
pub enum Failure {
    Usage(String),
    Precondition(ReportError),
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(msg.into())
    }

    pub fn at(e: GeomError, fixture: &str, at: Option<Location>) -> Self {
        Failure::Precondition(ReportError {
            kind: error_kind(&e).into(),
            message: e.to_string(),
            fixture: fixture.into(),
            at,
        })
    }
}

pub fn error_kind(e: &GeomError) -> &'static str {
    match e {
        GeomError::MalformedInput(_) => "malformed-input",
        GeomError::ArityMismatch { .. } => "arity-mismatch",
        GeomError::JetOrderInsufficient { .. } => "jet-order-insufficient",
        GeomError::DegenerateMetric { .. } => "degenerate-metric",
        GeomError::BranchCut { .. } => "branch-cut",
        GeomError::IsometryViolation { .. } => "isometry-violation",
        GeomError::NonGeneric(_) => "non-generic",
        GeomError::DegeneratePfaffian { .. } => "degenerate-pfaffian",
        GeomError::NotTangent { .. } => "not-tangent",
        GeomError::IllConditioned { .. } => "ill-conditioned-extraction",
        GeomError::FactorizationFailed { .. } => "factorization-failed",
        GeomError::DegenerateDirection(_) => "degenerate-direction",
        GeomError::NormalComponentVanishes { .. } => "normal-component-vanishes",
        GeomError::LeafAreaVanishes { .. } => "leaf-area-vanishes",
        GeomError::InvalidFixture(_) => "invalid-fixture",
    }
}

/// Evaluation context handed to target runners.
pub struct Ctx<'a> {
    pub req: &'a VerifyRequest,
    pub info: &'static TargetInfo,
    pub tol: &'a Tolerances,
}

impl Ctx<'_> {
    pub fn exec(&self) -> Execution {
        self.req.execution
    }

    pub fn seed(&self) -> u64 {
        self.req.seed
    }

    pub fn dims(&self) -> Vec<usize> {
        self.req.grid.clone().unwrap_or_else(|| self.info.default_grid.to_vec())
    }

    fn checked_dims(&self, axes: usize) -> Result<Vec<usize>, Failure> {
        let dims = self.dims();
        if dims.len() != axes {
            return Err(Failure::usage(format!(
                "{} sweeps {axes} parameters, grid {dims:?} has {}",
                self.info.id,
                dims.len()
            )));
        }
        Ok(dims)
    }

    /// Grid over the requested box (or `default_rect`).
    pub fn grid(&self, default_rect: Vec<(f64, f64)>, axes: usize) -> Result<Grid, Failure> {
        let dims = self.checked_dims(axes)?;
        let rect = self.req.rect.clone().unwrap_or(default_rect);
        Grid::new(dims, rect).map_err(|e| Failure::usage(e.to_string()))
    }

    /// Grid for a negative control: requested dimensions, the control
    /// fixture's own box.
    pub fn control_grid(&self, rect: Vec<(f64, f64)>, axes: usize) -> Result<Grid, Failure> {
        let dims = self.checked_dims(axes)?;
        Grid::new(dims, rect).map_err(|e| Failure::usage(e.to_string()))
    }
}

fn usage_listing(what: &str) -> UsageError {
    let ids: Vec<&str> = TARGETS.iter().map(|t| t.id).chain([ALL]).collect();
    UsageError(format!("unknown target {what:?}; registered: {}", ids.join(", ")))
}

/// Runs one request. Usage errors abort; precondition failures are recorded
/// in the report.
pub fn run_verify(req: &VerifyRequest) -> Result<ResidualReport, UsageError> {
    if req.target == ALL {
        return run_all(req);
    }
    let info = targets::find(&req.target).ok_or_else(|| usage_listing(&req.target))?;
    run_target(info, req)
}

fn run_target(info: &'static TargetInfo, req: &VerifyRequest) -> Result<ResidualReport, UsageError> {
    let cx = Ctx {
        req,
        info,
        tol: &req.tol,
    };
    let mut report = ResidualReport::new(info.id, info.formula, req.seed);
    let fixtures: Vec<String> = if req.fixtures.is_empty() {
        info.default_fixtures.iter().map(|s| s.to_string()).collect()
    } else {
        req.fixtures.clone()
    };
    if info.kind == FixtureKind::Instances {
        if let Some(f) = fixtures.iter().find(|f| f.as_str() != "random") {
            return Err(UsageError(format!("{} only takes the fixture \"random\", got {f:?}", info.id)));
        }
    }
    let handle = |r: Result<(), Failure>, report: &mut ResidualReport| match r {
        Ok(()) => Ok(()),
        Err(Failure::Usage(m)) => Err(UsageError(m)),
        Err(Failure::Precondition(e)) => {
            report.errors.push(e);
            Ok(())
        }
    };
    for f in &fixtures {
        report.fixtures.push(f.clone());
        handle((info.run)(&cx, f, &mut report), &mut report)?;
    }
    handle((info.controls)(&cx, &mut report), &mut report)?;
    Ok(report.finish())
}

fn run_all(req: &VerifyRequest) -> Result<ResidualReport, UsageError> {
    let mut all = ResidualReport::new(ALL, "every registered target", req.seed);
    if req.grid.is_some() || req.rect.is_some() || !req.fixtures.is_empty() {
        all.notes
            .push("grid, box and fixture overrides are ignored by the all target".into());
    }
    for info in TARGETS {
        let sub = VerifyRequest {
            target: info.id.into(),
            fixtures: Vec::new(),
            grid: None,
            rect: None,
            ..req.clone()
        };
        let r = run_target(info, &sub)?;
        let prefix = |mut m: report::Measure| {
            m.name = format!("{}/{}", info.id, m.name);
            m
        };
        for f in r.fixtures {
            if !all.fixtures.contains(&f) {
                all.fixtures.push(f);
            }
        }
        all.grids.extend(r.grids);
        all.checks.extend(r.checks.into_iter().map(prefix));
        all.negative_controls.extend(r.negative_controls.into_iter().map(prefix));
        all.notes.extend(r.notes.into_iter().map(|n| format!("{}: {n}", info.id)));
        all.errors.extend(r.errors.into_iter().map(|mut e| {
            e.kind = format!("{}/{}", info.id, e.kind);
            e
        }));
    }
    Ok(all.finish())
}

/// `id  formula` for every registered target, in registry order, with the
/// ids padded to one column.
pub fn list_targets() -> Vec<String> {
    let width = TARGETS.iter().map(|t| t.id.len()).max().unwrap_or(0);
    TARGETS
        .iter()
        .map(|t| (t.id, t.formula))
        .chain([(ALL, "every registered target with its defaults")])
        .map(|(id, formula)| format!("{id:<width$}  {formula}"))
        .collect()
}

/// Process exit status for a finished report.
pub fn exit_code(report: &ResidualReport) -> i32 {
    if !report.errors.is_empty() {
        2
    } else if report.pass {
        0
    } else {
        1
    }
}
