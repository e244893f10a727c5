use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::GH_MAX_POINTS;
use crate::pinching::FieldFixture;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Profile,
    Waist,
    Chain,
    Bounds,
    Gh,
    Pinch,
    N1,
    Euler,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Profile => "profile",
            Experiment::Waist => "waist",
            Experiment::Chain => "chain",
            Experiment::Bounds => "bounds",
            Experiment::Gh => "gh",
            Experiment::Pinch => "pinch",
            Experiment::N1 => "n1",
            Experiment::Euler => "euler",
        }
    }

    pub fn is_monte_carlo(self) -> bool {
        matches!(
            self,
            Experiment::Profile | Experiment::Waist | Experiment::Chain
        )
    }
}

/// `kind` is `sphere`, `grassmannian` or `rotation` for sampled spaces and a
/// topology kind (`sphere`, `complexProjective`, `quaternionicProjective`)
/// for `euler`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub kind: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl EpsGrid {
    /// Grid points with both endpoints exact.
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i + 1 == self.count {
                    return self.max;
                }
                let t = i as f64 / last;
                match self.spacing {
                    Spacing::Linear => self.min + t * (self.max - self.min),
                    Spacing::Log => (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }

    fn check(&self) -> std::result::Result<(), String> {
        if !self.min.is_finite() || !self.max.is_finite() || !(self.min > 0.0) {
            return Err(format!(
                "epsGrid needs finite 0 < min, got min = {}",
                self.min
            ));
        }
        if self.count == 0 {
            return Err("epsGrid.count must be at least 1".into());
        }
        if self.count > 1 && !(self.max > self.min) {
            return Err(format!(
                "epsGrid must be strictly increasing: max = {} is not above min = {}",
                self.max, self.min
            ));
        }
        let pts = self.points();
        if pts.windows(2).any(|w| w[1] <= w[0]) {
            return Err("epsGrid is too fine to be strictly increasing in floating point".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub name: String,
    /// n, or R for `levy-gromov`. Defaults to `space.n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
    /// Push the curve forward through an L-Lipschitz map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
}

/// One experiment, read from a single JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_grid: Option<EpsGrid>,
    #[serde(default)]
    pub seed: u64,
    pub out: String,

    /// Level-band half-width for `waist` and `chain`; pinching δ for `pinch`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Tolerance in standard errors for `chain`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigmas: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curves: Option<Vec<CurveSpec>>,
    /// Two metric-space documents for `gh`; random pairs when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spaces: Option<Vec<serde_json::Value>>,
    /// Largest random space size for `gh`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldFixture>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strict: Option<bool>,
    /// Extra dimensions: the Lipschitz trend for `pinch`, table rows for `euler`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diameters: Option<Vec<f64>>,
    /// Covering degree for `euler`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u64>,
}

/// A validation failure pinned to the config key that caused it.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub key: &'static str,
    pub message: String,
}

fn fail<T>(key: &'static str, message: impl Into<String>) -> std::result::Result<T, FieldError> {
    Err(FieldError {
        key,
        message: message.into(),
    })
}

pub const SAMPLED_SPACES: &[&str] = &["sphere", "grassmannian", "rotation"];
pub const MIN_MONTE_CARLO_SAMPLES: usize = 100;

impl ExperimentConfig {
    pub fn require_space(&self) -> std::result::Result<&SpaceSpec, FieldError> {
        self.space.as_ref().map_or_else(
            || {
                fail(
                    "experiment",
                    format!("{} needs a space", self.experiment.name()),
                )
            },
            Ok,
        )
    }

    pub fn require_grid(&self) -> std::result::Result<Vec<f64>, FieldError> {
        match &self.eps_grid {
            Some(g) => Ok(g.points()),
            None => fail(
                "experiment",
                format!("{} needs an epsGrid", self.experiment.name()),
            ),
        }
    }

    pub fn require_samples(&self) -> std::result::Result<usize, FieldError> {
        self.samples.map_or_else(
            || fail("experiment", format!("{} needs N", self.experiment.name())),
            Ok,
        )
    }

    /// Checks everything that can be checked without running.
    pub fn validate(&self) -> std::result::Result<(), FieldError> {
        use Experiment::*;
        if self.out.trim().is_empty() {
            return fail("out", "out must be a non-empty path prefix");
        }
        if let Some(g) = &self.eps_grid {
            g.check().or_else(|m| fail("epsGrid", m))?;
        }
        if self.experiment.is_monte_carlo() {
            let n = self.require_samples()?;
            if n < MIN_MONTE_CARLO_SAMPLES {
                return fail(
                    "N",
                    format!("Monte Carlo experiments need N >= {MIN_MONTE_CARLO_SAMPLES}, got {n}"),
                );
            }
            self.require_grid()?;
            let space = self.require_space()?;
            if !SAMPLED_SPACES.contains(&space.kind.as_str()) {
                return fail(
                    "kind",
                    format!(
                        "unknown space kind '{}'; expected one of {SAMPLED_SPACES:?}",
                        space.kind
                    ),
                );
            }
            let function = self.function.as_deref().unwrap_or("distance-to-pole");
            if self.function.is_none() && self.experiment != Chain {
                return fail(
                    "experiment",
                    format!("{} needs a function", self.experiment.name()),
                );
            }
            let ok = super::catalog::FUNCTIONS
                .iter()
                .any(|f| f.name == function && f.space == space.kind);
            if !ok {
                return fail(
                    "function",
                    format!("function '{function}' is not defined on a {}", space.kind),
                );
            }
            check_space_dims(space)?;
        }
        match self.experiment {
            Waist | Chain => {
                let n = self.require_samples()?;
                if n < crate::concentration::MIN_WAIST_SAMPLES {
                    return fail(
                        "N",
                        format!(
                            "{} needs N >= {}, got {n}",
                            self.experiment.name(),
                            crate::concentration::MIN_WAIST_SAMPLES
                        ),
                    );
                }
                if self.experiment == Waist && self.require_space()?.kind == "rotation" {
                    return fail("kind", "waist is not available on rotation groups");
                }
                if self.experiment == Chain && self.require_space()?.kind != "sphere" {
                    return fail(
                        "kind",
                        "chain needs a sphere: the isoperimetric function is exact only there",
                    );
                }
                if let Some(d) = self.delta {
                    if !(d > 0.0) || !d.is_finite() {
                        return fail("delta", format!("delta must be positive, got {d}"));
                    }
                }
                if let Some(s) = self.sigmas {
                    if !(s >= 0.0) || !s.is_finite() {
                        return fail("sigmas", format!("sigmas must be non-negative, got {s}"));
                    }
                }
            }
            Bounds => {
                self.require_grid()?;
                let curves = match &self.curves {
                    Some(c) if !c.is_empty() => c,
                    _ => return fail("experiment", "bounds needs a non-empty curves list"),
                };
                for c in curves {
                    if c.param.is_none() && self.space.is_none() {
                        return fail(
                            "curves",
                            format!("curve '{}' needs a param or a space", c.name),
                        );
                    }
                    let param = c
                        .param
                        .unwrap_or_else(|| self.space.as_ref().map_or(0.0, |s| s.n as f64));
                    let curve = crate::bounds::BoundCurve::by_name(&c.name, param)
                        .or_else(|e| fail("curves", e.to_string()))?;
                    if let Some(l) = c.lipschitz {
                        curve
                            .pushforward(l)
                            .or_else(|e| fail("lipschitz", e.to_string()))?;
                    }
                }
            }
            Gh => {
                if let Some(spaces) = &self.spaces {
                    if spaces.len() != 2 {
                        return fail(
                            "spaces",
                            format!("gh compares exactly two spaces, got {}", spaces.len()),
                        );
                    }
                } else {
                    let n = self.require_samples()?;
                    if n == 0 {
                        return fail("N", "gh needs at least one random pair");
                    }
                    let m = self.max_points.unwrap_or(5);
                    if !(1..=GH_MAX_POINTS).contains(&m) {
                        return fail(
                            "maxPoints",
                            format!("maxPoints must lie in 1..={GH_MAX_POINTS}, got {m}"),
                        );
                    }
                }
            }
            Pinch => {
                let space = self.require_space()?;
                if space.kind != "grassmannian" || space.k.unwrap_or(2) != 2 {
                    return fail(
                        "kind",
                        "pinch samples planes: use kind grassmannian with k = 2",
                    );
                }
                if space.n < 2 {
                    return fail("n", "pinch needs n >= 2");
                }
                let n = self.require_samples()?;
                if !(2..=MAX_FIELD_PLANES).contains(&n) {
                    return fail(
                        "N",
                        format!("pinch needs 2 <= N <= {MAX_FIELD_PLANES} planes, got {n}"),
                    );
                }
                if self.field.is_none() {
                    return fail("experiment", "pinch needs a field fixture");
                }
                if let Some(d) = self.delta {
                    if !(d > 0.0 && d <= 1.0) {
                        return fail(
                            "delta",
                            format!("pinching delta must lie in (0, 1], got {d}"),
                        );
                    }
                }
                if let Some(dims) = &self.dims {
                    if dims.iter().any(|&d| d < 2) {
                        return fail("dims", "trend dimensions must be at least 2");
                    }
                }
            }
            N1 => match &self.diameters {
                Some(d) if !d.is_empty() => {
                    if let Some(bad) = d.iter().find(|x| !(**x > 0.0) || !x.is_finite()) {
                        return fail(
                            "diameters",
                            format!("diameters must be positive, got {bad}"),
                        );
                    }
                }
                _ => return fail("experiment", "n1 needs a non-empty diameters list"),
            },
            Euler => {
                let space = self.require_space()?;
                space
                    .kind
                    .parse::<crate::pinching::SpaceKind>()
                    .or_else(|e| fail("kind", e.to_string()))?;
                if space.n == 0 || self.dims.as_ref().is_some_and(|d| d.contains(&0)) {
                    return fail("n", "euler needs n >= 1");
                }
                if self.degree == Some(0) {
                    return fail("degree", "covering degree must be at least 1");
                }
            }
            Profile => {}
        }
        Ok(())
    }
}

/// Largest field accepted by `pinch`; the Lipschitz estimate is quadratic.
pub const MAX_FIELD_PLANES: usize = 20_000;

fn check_space_dims(space: &SpaceSpec) -> std::result::Result<(), FieldError> {
    match space.kind.as_str() {
        "sphere" if space.n < 2 => fail("n", "sphere experiments need n >= 2"),
        "rotation" if space.n < 2 => fail("n", "rotation groups need n >= 2"),
        "grassmannian" => {
            let k = space.k.unwrap_or(2);
            if k == 0 || k > space.n {
                fail(
                    "k",
                    format!(
                        "grassmannian needs 1 <= k <= n, got k = {k}, n = {}",
                        space.n
                    ),
                )
            } else {
                Ok(())
            }
        }
        _ => Ok(()),
    }
}

/// 1-based line and column of the first `"key"` in the source.
fn locate(source: &str, key: &str) -> Option<(usize, usize)> {
    let needle = format!("\"{key}\"");
    let offset = source.find(&needle)?;
    let before = &source[..offset];
    let line = before.matches('\n').count() + 1;
    let column = offset - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    Some((line, column))
}

/// Parses and validates a config. Every error names a line and column.
pub fn parse_config(source: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = serde_json::from_str(source).map_err(|e| {
        Error::Parse(format!(
            "line {}, column {}: {}",
            e.line(),
            e.column(),
            strip_position(&e)
        ))
    })?;
    cfg.validate().map_err(|e| positioned(source, &e))?;
    Ok(cfg)
}

pub(crate) fn positioned(source: &str, e: &FieldError) -> Error {
    let (line, column) = locate(source, e.key)
        .or_else(|| locate(source, "experiment"))
        .unwrap_or((1, 1));
    Error::InvalidInput(format!("line {line}, column {column}: {}", e.message))
}

fn strip_position(e: &serde_json::Error) -> String {
    let text = e.to_string();
    match text.rfind(" at line ") {
        Some(i) => text[..i].to_string(),
        None => text,
    }
}
