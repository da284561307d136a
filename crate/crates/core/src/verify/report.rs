//! Residual reports and their JSON form.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), complex numbers
//! as `[re, im]`, and keys in declaration order, so two reports from the same
//! request and seed are byte-identical.

use crate::scalar::C64;
use crate::sweep::{Grid, Summary};
use serde::ser::{Serialize, SerializeSeq, Serializer};
use serde_json::value::RawValue;

pub const SCHEMA_VERSION: &str = "rollcheck-report/1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// `f64` serialized with 17 significant digits; non-finite values become the
/// strings `"inf"`, `"-inf"`, `"nan"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else if self.0.is_nan() {
            s.serialize_str("nan")
        } else if self.0 > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

/// Complex number as `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cx(pub C64);

impl Serialize for Cx {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&Num(self.0.re))?;
        seq.serialize_element(&Num(self.0.im))?;
        seq.end()
    }
}

fn nums<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|&x| Num(x)))
}

fn intervals<S: Serializer>(xs: &[(f64, f64)], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|&(a, b)| [Num(a), Num(b)]))
}

fn num<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    Num(*x).serialize(s)
}

fn cx<S: Serializer>(x: &C64, s: S) -> Result<S::Ok, S::Error> {
    Cx(*x).serialize(s)
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Statistic {
    MaxAbs,
    MinAbs,
    /// Fraction of grid points where `|r| > level`.
    FractionAbove(f64),
}

impl Serialize for Statistic {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Statistic::MaxAbs => s.serialize_str("max_abs"),
            Statistic::MinAbs => s.serialize_str("min_abs"),
            Statistic::FractionAbove(level) => s.serialize_str(&format!("fraction_above:{level:.16e}")),
        }
    }
}

/// Where a statistic was attained.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Location {
    pub indices: Vec<usize>,
    #[serde(serialize_with = "nums")]
    pub params: Vec<f64>,
}

/// Maps a flat sample index to a [`Location`].
#[derive(Clone, Copy, Debug)]
pub enum Sites<'a> {
    Grid(&'a Grid),
    /// Random instances, located by their index alone.
    Instances,
}

impl Sites<'_> {
    pub fn locate(&self, k: usize) -> Location {
        match self {
            Sites::Grid(g) => Location {
                indices: g.indices(k),
                params: g.point(k),
            },
            Sites::Instances => Location {
                indices: vec![k],
                params: Vec::new(),
            },
        }
    }
}

/// One residual statistic compared against a threshold.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Measure {
    pub name: String,
    pub formula: String,
    pub fixture: String,
    pub statistic: Statistic,
    #[serde(serialize_with = "num")]
    pub value: f64,
    #[serde(serialize_with = "num")]
    pub max_abs: f64,
    #[serde(serialize_with = "num")]
    pub mean_abs: f64,
    pub samples: usize,
    /// Point attaining `max_abs` (or `min_abs` for lower bounds).
    pub at: Option<Location>,
    #[serde(serialize_with = "cx")]
    pub value_at: C64,
    pub bound: Bound,
    #[serde(serialize_with = "num")]
    pub threshold: f64,
    pub pass: bool,
}

/// Specification of a measure before its values are known.
#[derive(Clone, Debug)]
pub struct MeasureSpec {
    pub name: String,
    pub formula: String,
    pub statistic: Statistic,
    pub bound: Bound,
    pub threshold: f64,
}

impl MeasureSpec {
    pub fn at_most(name: &str, formula: &str, threshold: f64) -> Self {
        MeasureSpec {
            name: name.into(),
            formula: formula.into(),
            statistic: Statistic::MaxAbs,
            bound: Bound::AtMost,
            threshold,
        }
    }

    pub fn min_at_least(name: &str, formula: &str, threshold: f64) -> Self {
        MeasureSpec {
            statistic: Statistic::MinAbs,
            bound: Bound::AtLeast,
            ..Self::at_most(name, formula, threshold)
        }
    }

    pub fn max_at_least(name: &str, formula: &str, threshold: f64) -> Self {
        MeasureSpec {
            bound: Bound::AtLeast,
            ..Self::at_most(name, formula, threshold)
        }
    }

    /// At least `fraction` of points with `|r| > level`.
    pub fn fraction_above(name: &str, formula: &str, level: f64, fraction: f64) -> Self {
        MeasureSpec {
            statistic: Statistic::FractionAbove(level),
            bound: Bound::AtLeast,
            ..Self::at_most(name, formula, fraction)
        }
    }

    /// Reduces `(sample index, value)` pairs in the given order. Several
    /// values may share an index.
    pub fn evaluate(&self, fixture: &str, values: &[(usize, C64)], sites: Sites) -> Measure {
        let mut s = Summary::default();
        for &(k, z) in values {
            s.push(k, z);
        }
        let (value, at, value_at) = match self.statistic {
            Statistic::MaxAbs => (s.max_abs, s.argmax, s.value_at_max),
            Statistic::MinAbs => (s.min_abs, s.argmin, s.value_at_min),
            Statistic::FractionAbove(level) => {
                let zs: Vec<C64> = values.iter().map(|p| p.1).collect();
                (Summary::fraction_above(&zs, level), s.argmin, s.value_at_min)
            }
        };
        let pass = !values.is_empty()
            && match self.bound {
                Bound::AtMost => value <= self.threshold,
                Bound::AtLeast => value >= self.threshold,
            };
        Measure {
            name: self.name.clone(),
            formula: self.formula.clone(),
            fixture: fixture.to_string(),
            statistic: self.statistic,
            value,
            max_abs: s.max_abs,
            mean_abs: s.mean_abs(),
            samples: s.count,
            at: at.map(|k| sites.locate(k)),
            value_at,
            bound: self.bound,
            threshold: self.threshold,
            pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct GridInfo {
    pub dims: Vec<usize>,
    #[serde(serialize_with = "intervals")]
    pub rect: Vec<(f64, f64)>,
}

impl From<&Grid> for GridInfo {
    fn from(g: &Grid) -> Self {
        GridInfo {
            dims: g.dims.clone(),
            rect: g.rect.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ReportError {
    pub kind: String,
    pub message: String,
    pub fixture: String,
    pub at: Option<Location>,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ResidualReport {
    pub schema_version: String,
    pub tool_version: String,
    pub target: String,
    pub formula: String,
    pub fixtures: Vec<String>,
    pub seed: u64,
    pub grids: Vec<GridInfo>,
    pub checks: Vec<Measure>,
    pub negative_controls: Vec<Measure>,
    pub notes: Vec<String>,
    pub errors: Vec<ReportError>,
    pub pass: bool,
}

impl ResidualReport {
    pub fn new(target: &str, formula: &str, seed: u64) -> Self {
        ResidualReport {
            schema_version: SCHEMA_VERSION.into(),
            tool_version: TOOL_VERSION.into(),
            target: target.into(),
            formula: formula.into(),
            fixtures: Vec::new(),
            seed,
            grids: Vec::new(),
            checks: Vec::new(),
            negative_controls: Vec::new(),
            notes: Vec::new(),
            errors: Vec::new(),
            pass: false,
        }
    }

    /// `pass` ⇔ no errors, at least one check, and every measure passes.
    pub fn finish(mut self) -> Self {
        self.pass = self.errors.is_empty()
            && !self.checks.is_empty()
            && self.checks.iter().chain(&self.negative_controls).all(|m| m.pass);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Every measure, failing ones first, as one line each.
    pub fn summary_lines(&self) -> Vec<String> {
        let line = |kind: &str, m: &Measure| {
            let rel = match m.bound {
                Bound::AtMost => "<=",
                Bound::AtLeast => ">=",
            };
            format!(
                "{} {kind} {} [{}] {:?} = {:.3e} {rel} {:.1e}",
                if m.pass { "ok  " } else { "FAIL" },
                m.name,
                m.fixture,
                m.statistic,
                m.value,
                m.threshold
            )
        };
        let mut out: Vec<(bool, String)> = self
            .checks
            .iter()
            .map(|m| (m.pass, line("check", m)))
            .chain(self.negative_controls.iter().map(|m| (m.pass, line("control", m))))
            .collect();
        out.sort_by_key(|p| p.0);
        let mut lines: Vec<String> = self
            .errors
            .iter()
            .map(|e| format!("ERROR {} [{}]: {}", e.kind, e.fixture, e.message))
            .collect();
        lines.extend(out.into_iter().map(|p| p.1));
        lines
    }
}

/// Description of the report document, printed by `report-schema`.
pub const REPORT_SCHEMA: &str = r#"{
  "schema_version": "rollcheck-report/1",
  "encoding": {
    "float": "JSON number with 17 significant digits, or one of \"inf\", \"-inf\", \"nan\"",
    "complex": "[re, im]",
    "grid_order": "row-major in (u, v, w); points are cell centres of the box"
  },
  "report": {
    "schema_version": "string",
    "tool_version": "string",
    "target": "registered target id",
    "formula": "identity checked by the target",
    "fixtures": ["fixture names evaluated for the checks"],
    "seed": "unsigned integer seeding every random probe and instance",
    "grids": [{"dims": ["integer"], "rect": [["float", "float"]]}],
    "checks": ["measure"],
    "negative_controls": ["measure"],
    "notes": ["string"],
    "errors": [{"kind": "string", "message": "string", "fixture": "string", "at": "location | null"}],
    "pass": "true iff there are no errors and every check and negative control passes"
  },
  "measure": {
    "name": "string",
    "formula": "string",
    "fixture": "string",
    "statistic": "max_abs | min_abs | fraction_above:<level>",
    "value": "float, the statistic",
    "max_abs": "float",
    "mean_abs": "float",
    "samples": "integer",
    "at": "location of max_abs (min_abs for min_abs and fraction statistics) | null",
    "value_at": "complex residual at that location",
    "bound": "at_most | at_least",
    "threshold": "float",
    "pass": "value <= threshold for at_most, value >= threshold for at_least"
  },
  "location": {
    "indices": ["grid indices, or [instance] for random instances"],
    "params": ["parameter values (u, v[, w]); empty for instances"]
  }
}
"#;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::re;

    #[test]
    fn seventeen_digits() {
        let s = serde_json::to_string(&Num(0.1)).unwrap();
        assert_eq!(s, "1.0000000000000001e-1");
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
        assert_eq!(serde_json::to_string(&Num(f64::INFINITY)).unwrap(), "\"inf\"");
        assert_eq!(
            serde_json::to_string(&Cx(C64::new(1.0, -2.0))).unwrap(),
            "[1.0000000000000000e0,-2.0000000000000000e0]"
        );
    }

    #[test]
    fn measure_bounds() {
        let vals = [(0, re(1e-9)), (1, re(-3e-9)), (2, re(2e-9))];
        let m = MeasureSpec::at_most("r", "r = 0", 1e-8).evaluate("f", &vals, Sites::Instances);
        assert!(m.pass);
        assert_eq!(m.at.unwrap().indices, vec![1]);
        assert_eq!(m.value_at, re(-3e-9));
        let m = MeasureSpec::min_at_least("g", "g ≠ 0", 2e-9).evaluate("f", &vals, Sites::Instances);
        assert!(!m.pass);
        let m = MeasureSpec::fraction_above("n", "n ≠ 0", 1.5e-9, 0.6).evaluate("f", &vals, Sites::Instances);
        assert!((m.value - 2.0 / 3.0).abs() < 1e-15 && m.pass);
        let empty = MeasureSpec::at_most("r", "", 1.0).evaluate("f", &[], Sites::Instances);
        assert!(!empty.pass);
    }

    #[test]
    fn schema_parses_and_names_every_report_key() {
        let schema: serde_json::Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
        let mut r = ResidualReport::new("t", "f", 1);
        r.checks.push(MeasureSpec::at_most("r", "", 1.0).evaluate("x", &[(0, re(0.5))], Sites::Instances));
        let v: serde_json::Value = serde_json::from_str(&r.finish().to_json()).unwrap();
        for key in v.as_object().unwrap().keys() {
            assert!(schema["report"].get(key).is_some(), "{key}");
        }
        for key in v["checks"][0].as_object().unwrap().keys() {
            assert!(schema["measure"].get(key).is_some(), "{key}");
        }
        assert_eq!(schema["schema_version"], SCHEMA_VERSION);
    }
}
