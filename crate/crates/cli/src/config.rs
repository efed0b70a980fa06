//! The TOML run configuration. Expressions are strings parsed against the chart coordinates.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use jacobi_core::geometry::{Chart, Kind, TensorField};
use jacobi_core::jacobi::{conformal_transform, contact_to_jacobi, corpus, JacobiStructure, VerifyOptions};
use jacobi_core::monodromy::LeafDomain;
use jacobi_core::Expr;
use serde::Deserialize;
use toml::Spanned;

use crate::error::{CliError, CliResult};

pub type Src = Spanned<String>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// When present it must name the subcommand being run.
    pub command: Option<String>,
    #[serde(default)]
    pub settings: Settings,
    pub chart: Option<ChartConfig>,
    pub structure: Option<StructureConfig>,
    pub ma: Option<MaConfig>,
    pub apath: Option<APathConfig>,
    pub groupoid: Option<GroupoidConfig>,
    pub periods: Option<PeriodsConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Settings {
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        let d = VerifyOptions::default();
        Settings { tol: d.tol, samples: d.samples, seed: d.seed }
    }
}

impl Settings {
    pub fn verify_options(&self) -> VerifyOptions {
        VerifyOptions { samples: self.samples, tol: self.tol, seed: self.seed }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartConfig {
    pub coords: Vec<String>,
    pub bounds: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureConfig {
    /// Name of a corpus structure; it brings its own chart.
    pub builtin: Option<String>,
    /// Bivector entries keyed `"a,b"`.
    #[serde(default)]
    pub lambda: BTreeMap<String, Src>,
    /// Vector field components keyed by coordinate.
    #[serde(default)]
    pub reeb: BTreeMap<String, Src>,
    /// Contact form components keyed by coordinate.
    #[serde(default)]
    pub theta: BTreeMap<String, Src>,
    /// Conformal factor applied after construction.
    pub tau: Option<Src>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaConfig {
    pub a: Src,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default = "default_ma_grid")]
    pub grid: usize,
    #[serde(default = "default_csv_rows")]
    pub csv_rows: usize,
    #[serde(default = "default_flat_tol")]
    pub flat_tol: f64,
    /// Radii at which the sphere quadrature is compared with `4πr/a`.
    #[serde(default)]
    pub verify_area_at: Vec<f64>,
}

fn default_r_max() -> f64 {
    10.0
}
fn default_ma_grid() -> usize {
    10_000
}
fn default_csv_rows() -> usize {
    200
}
fn default_flat_tol() -> f64 {
    1e-10
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebroidKind {
    Tangent,
    Cotangent,
    Jacobi,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct APathConfig {
    pub algebroid: AlgebroidKind,
    /// Fiber components as expressions in `t`.
    pub fiber: Vec<Src>,
    pub x0: Vec<f64>,
    #[serde(default = "default_path_grid")]
    pub grid: usize,
    /// Function of the chart coordinates whose drift along γ is reported.
    pub invariant: Option<Src>,
    #[serde(default = "default_drift_tol")]
    pub drift_tol: f64,
    #[serde(default = "default_drift_tol")]
    pub path_tol: f64,
    #[serde(default)]
    pub translate: bool,
    #[serde(default)]
    pub s0: f64,
    pub family: Option<FamilyConfig>,
}

fn default_path_grid() -> usize {
    256
}
fn default_drift_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    /// Fiber components as expressions in `eps` and `t`.
    pub fiber: Vec<Src>,
    #[serde(default = "default_eps_grid")]
    pub eps_grid: usize,
}

fn default_eps_grid() -> usize {
    16
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupoidKind {
    Pair,
    PairContact,
    Vf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidConfig {
    pub kind: GroupoidKind,
    /// Vector field components keyed by coordinate (`vf` only).
    #[serde(default)]
    pub field: BTreeMap<String, Src>,
    #[serde(default = "default_t_range")]
    pub t_range: [f64; 2],
    /// Conformal factor on the base (`pair-contact` only).
    pub tau: Option<Src>,
    pub period_point: Option<Vec<f64>>,
    #[serde(default = "default_period_window")]
    pub period_window: [f64; 2],
    #[serde(default = "default_period_tol")]
    pub period_tol: f64,
}

fn default_t_range() -> [f64; 2] {
    [-20.0, 20.0]
}
fn default_period_window() -> [f64; 2] {
    [0.5, 10.0]
}
fn default_period_tol() -> f64 {
    1e-9
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PeriodCheck {
    Discreteness,
    Prequantizable,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodsConfig {
    #[serde(default)]
    pub points: Vec<Vec<f64>>,
    #[serde(default)]
    pub generators: Vec<Vec<f64>>,
    /// Leaves of a 2-dimensional Poisson `[structure]`; replaces `points`/`generators`.
    #[serde(default)]
    pub leaves: Vec<LeafDomain>,
    #[serde(default = "default_period_tol")]
    pub tol: f64,
    #[serde(default = "default_checks")]
    pub checks: Vec<PeriodCheck>,
}

fn default_checks() -> Vec<PeriodCheck> {
    vec![PeriodCheck::Discreteness, PeriodCheck::Prequantizable]
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub report: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

/// A parsed config together with its source text, for line numbers in diagnostics.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: RunConfig,
    text: String,
}

impl Loaded {
    pub fn parse(text: &str) -> CliResult<Loaded> {
        let config: RunConfig = toml::from_str(text).map_err(|e| CliError::config(e.to_string().trim_end()))?;
        Ok(Loaded { config, text: text.to_string() })
    }

    pub fn line_of(&self, s: &Src) -> usize {
        let off = s.span().start.min(self.text.len());
        self.text[..off].matches('\n').count() + 1
    }

    /// Parses an expression field, reporting the field name and line on failure.
    pub fn expr(&self, field: &str, s: &Src, coords: &[impl AsRef<str>]) -> CliResult<Expr> {
        jacobi_core::parse(s.get_ref(), coords)
            .map_err(|e| CliError::config(format!("line {}: field `{field}`: {e}", self.line_of(s))))
    }

    pub fn section<'a, T>(&self, v: &'a Option<T>, name: &str) -> CliResult<&'a T> {
        v.as_ref().ok_or_else(|| CliError::config(format!("missing section [{name}]")))
    }

    pub fn chart(&self) -> CliResult<Arc<Chart>> {
        let c = self.section(&self.config.chart, "chart")?;
        let chart = match &c.bounds {
            None => Chart::euclidean(&c.coords),
            Some(b) => {
                if b.len() != c.coords.len() {
                    return Err(CliError::config(format!(
                        "field `chart.bounds`: {} intervals for {} coordinates",
                        b.len(),
                        c.coords.len()
                    )));
                }
                Chart::new(&c.coords, b.iter().map(|p| (p[0], p[1])).collect())
            }
        };
        chart.map(Arc::new).map_err(|e| CliError::config(format!("section [chart]: {e}")))
    }

    fn index(&self, chart: &Chart, field: &str, name: &str, at: &Src) -> CliResult<usize> {
        chart.index_of(name.trim()).ok_or_else(|| {
            CliError::config(format!("line {}: field `{field}`: `{}` is not a chart coordinate", self.line_of(at), name.trim()))
        })
    }

    /// A dense field of degree ≤ 1 from a table keyed by coordinate names.
    pub fn vector_like(&self, chart: &Arc<Chart>, kind: Kind, field: &str, m: &BTreeMap<String, Src>) -> CliResult<TensorField> {
        let mut entries = Vec::new();
        for (k, v) in m {
            let i = self.index(chart, field, k, v)?;
            entries.push((vec![i], self.expr(&format!("{field}.{k}"), v, chart.coords())?));
        }
        Ok(TensorField::from_sparse(chart.clone(), kind, 1, entries)?)
    }

    fn bivector(&self, chart: &Arc<Chart>, m: &BTreeMap<String, Src>) -> CliResult<TensorField> {
        let mut entries = Vec::new();
        for (k, v) in m {
            let parts: Vec<&str> = k.split(',').collect();
            if parts.len() != 2 {
                return Err(CliError::config(format!(
                    "line {}: field `structure.lambda`: key `{k}` must name two coordinates as \"a,b\"",
                    self.line_of(v)
                )));
            }
            let idx = parts.iter().map(|p| self.index(chart, "structure.lambda", p, v)).collect::<CliResult<Vec<_>>>()?;
            if idx[0] == idx[1] {
                return Err(CliError::config(format!("line {}: field `structure.lambda`: repeated coordinate in `{k}`", self.line_of(v))));
            }
            entries.push((idx, self.expr(&format!("structure.lambda.\"{k}\""), v, chart.coords())?));
        }
        Ok(TensorField::from_sparse(chart.clone(), Kind::Multivector, 2, entries)?)
    }

    /// The contact form of `[structure]` on the configured chart.
    pub fn theta(&self) -> CliResult<TensorField> {
        let s = self.section(&self.config.structure, "structure")?;
        if s.theta.is_empty() {
            return Err(CliError::config("missing field `structure.theta`"));
        }
        let chart = self.chart()?;
        self.vector_like(&chart, Kind::Form, "structure.theta", &s.theta)
    }

    /// The Jacobi structure of `[structure]`: a corpus entry, a contact form, or `Λ` and `R`.
    pub fn jacobi(&self, opts: VerifyOptions) -> CliResult<JacobiStructure> {
        let s = self.section(&self.config.structure, "structure")?;
        let j = if let Some(name) = &s.builtin {
            if !(s.lambda.is_empty() && s.reeb.is_empty() && s.theta.is_empty()) {
                return Err(CliError::config("`structure.builtin` excludes `lambda`, `reeb` and `theta`"));
            }
            builtin(name).ok_or_else(|| {
                CliError::config(format!("field `structure.builtin`: unknown structure `{name}`; known: {}", builtin_names().join(", ")))
            })?
        } else if !s.theta.is_empty() {
            if !(s.lambda.is_empty() && s.reeb.is_empty()) {
                return Err(CliError::config("`structure.theta` excludes `lambda` and `reeb`"));
            }
            contact_to_jacobi(&self.theta()?)?
        } else {
            if s.lambda.is_empty() && s.reeb.is_empty() {
                return Err(CliError::config("missing field `structure.lambda` (or `reeb`, `theta`, `builtin`)"));
            }
            let chart = self.chart()?;
            let l = self.bivector(&chart, &s.lambda)?;
            let r = self.vector_like(&chart, Kind::Multivector, "structure.reeb", &s.reeb)?;
            JacobiStructure::new(l, r)?
        };
        match &s.tau {
            None => Ok(j),
            Some(t) => {
                let tau = self.expr("structure.tau", t, j.chart().coords())?;
                Ok(conformal_transform(&j, &tau, opts)?)
            }
        }
    }

    pub fn structure_present(&self) -> bool {
        self.config.structure.is_some()
    }
}

fn builtins() -> Vec<(&'static str, JacobiStructure)> {
    let mut v = corpus::known_jacobi();
    v.extend(corpus::perturbed());
    v
}

pub fn builtin_names() -> Vec<&'static str> {
    builtins().into_iter().map(|(n, _)| n).collect()
}

pub fn builtin(name: &str) -> Option<JacobiStructure> {
    builtins().into_iter().find(|(n, _)| *n == name).map(|(_, j)| j)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expression_errors_carry_line_and_field() {
        let text = "[chart]\ncoords = [\"x\", \"y\"]\n\n[structure]\nlambda = { \"x,y\" = \"1 +* x\" }\n";
        let l = Loaded::parse(text).unwrap();
        let err = l.jacobi(VerifyOptions::default()).unwrap_err().to_string();
        assert!(err.contains("line 5") && err.contains("structure.lambda"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_line() {
        let err = Loaded::parse("[settings]\ntoll = 1e-3\n").unwrap_err().to_string();
        assert!(err.contains("line 2") && err.contains("toll"), "{err}");
    }

    #[test]
    fn reversed_bivector_keys_flip_sign() {
        let text = "[chart]\ncoords = [\"x\", \"y\"]\n[structure]\nlambda = { \"y,x\" = \"2\" }\n";
        let j = Loaded::parse(text).unwrap().jacobi(VerifyOptions::default()).unwrap();
        assert_eq!(j.lambda().eval(&[0.3, 0.1]).unwrap(), vec![-2.0]);
    }

    #[test]
    fn missing_pieces() {
        let l = Loaded::parse("[structure]\n").unwrap();
        assert!(l.jacobi(VerifyOptions::default()).unwrap_err().to_string().contains("structure.lambda"));
        let l = Loaded::parse("[structure]\nreeb = { x = \"1\" }\n").unwrap();
        assert!(l.jacobi(VerifyOptions::default()).unwrap_err().to_string().contains("[chart]"));
        let l = Loaded::parse("[structure]\nbuiltin = \"nope\"\n").unwrap();
        assert!(l.jacobi(VerifyOptions::default()).unwrap_err().to_string().contains("standard_contact"));
    }
}
