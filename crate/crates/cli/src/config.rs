//! JSON run configuration: a preset name or an inline scenario, run
//! options and dotted solver overrides.

use std::path::{Path, PathBuf};

use ldd_core::ldd::{LambdaOverride, SolverParams};
use ldd_core::verify::{preset, Scenario, VerifyError};
use serde_json::{Map, Value};

use crate::CliError;

/// Solver fields that may be given without the `solver.` prefix.
const SOLVER_SHORTHANDS: [&str; 7] = [
    "tau",
    "epsilon",
    "max_iterations",
    "gravity_on",
    "gravity_coupling",
    "m_estimate",
    "stopping_norm",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Preset(String),
    Inline(Box<Scenario>),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub source: Option<Source>,
    pub resolution: Option<usize>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub verbose: bool,
    pub strict: bool,
    /// Dotted solver paths without the `solver.` prefix, in file order.
    pub overrides: Vec<(String, Value)>,
}

fn invalid(key: &str, message: impl Into<String>) -> CliError {
    CliError::InvalidValue {
        key: key.to_string(),
        message: message.into(),
    }
}

fn as_usize(key: &str, v: &Value) -> Result<usize, CliError> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| invalid(key, "expected a nonnegative integer"))
}

fn as_bool(key: &str, v: &Value) -> Result<bool, CliError> {
    v.as_bool()
        .ok_or_else(|| invalid(key, "expected true or false"))
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let value: Value = serde_json::from_str(text)?;
        let Value::Object(map) = value else {
            return Err(invalid("<root>", "expected a JSON object"));
        };
        Self::from_map(map)
    }

    fn from_map(map: Map<String, Value>) -> Result<Self, CliError> {
        if map.contains_key("preset") && map.contains_key("scenario") {
            return Err(CliError::ConflictingSource);
        }
        let mut cfg = RunConfig::default();
        for (key, v) in map {
            match key.as_str() {
                "preset" => {
                    let name = v
                        .as_str()
                        .ok_or_else(|| invalid(&key, "expected a preset name"))?;
                    cfg.set_source(Source::Preset(name.to_string()))?;
                }
                "scenario" => {
                    let s: Scenario =
                        serde_json::from_value(v).map_err(|e| invalid(&key, e.to_string()))?;
                    cfg.set_source(Source::Inline(Box::new(s)))?;
                }
                "resolution" => cfg.resolution = Some(as_usize(&key, &v)?),
                "steps" => cfg.steps = Some(as_usize(&key, &v)?),
                "threads" => cfg.threads = Some(as_usize(&key, &v)?),
                "out" => {
                    cfg.out = Some(PathBuf::from(
                        v.as_str().ok_or_else(|| invalid(&key, "expected a path"))?,
                    ))
                }
                "verbose" => cfg.verbose = as_bool(&key, &v)?,
                "strict" => cfg.strict = as_bool(&key, &v)?,
                k if SOLVER_SHORTHANDS.contains(&k) => cfg.overrides.push((key, v)),
                k if k.starts_with("solver.") => {
                    cfg.overrides.push((k["solver.".len()..].to_string(), v))
                }
                _ => return Err(CliError::UnknownKey(key)),
            }
        }
        Ok(cfg)
    }

    pub fn set_source(&mut self, source: Source) -> Result<(), CliError> {
        if self.source.is_some() {
            return Err(CliError::ConflictingSource);
        }
        self.source = Some(source);
        Ok(())
    }

    /// Resolved scenario with resolution, step count and overrides applied
    /// and validated.
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let mut s = match &self.source {
            Some(Source::Preset(name)) => preset(name)?,
            Some(Source::Inline(s)) => (**s).clone(),
            None => return Err(CliError::MissingSource),
        };
        if let Some(r) = self.resolution {
            s.resolution = r;
        }
        if let Some(n) = self.steps {
            s.solver.steps = n;
        }
        for (path, v) in &self.overrides {
            apply_override(&mut s.solver, path, v)?;
        }
        s.validate().map_err(|e| match e {
            VerifyError::Solver(ldd_core::ldd::LddError::InvalidParameter { field, value }) => {
                invalid(&field, format!("{value} violates its constraint"))
            }
            other => CliError::Scenario(other),
        })?;
        Ok(s)
    }
}

/// Applies `value` at a dotted path such as `tau`, `L.w.1`, `lambda.nw`,
/// `lambda.w.1.2` or `linear.rel_tol`.
pub fn apply_override(
    solver: &mut SolverParams,
    path: &str,
    value: &Value,
) -> Result<(), CliError> {
    let key = format!("solver.{path}");
    let parts: Vec<&str> = path.split('.').collect();
    let index = |s: &str| s.parse::<usize>().ok().filter(|&i| i >= 1);
    let mut tree = serde_json::to_value(&*solver).map_err(|e| invalid(&key, e.to_string()))?;
    match parts.as_slice() {
        ["L", phase @ ("w" | "nw"), l] => {
            let l = index(l).ok_or_else(|| CliError::UnknownKey(key.clone()))?;
            let slot = tree["L"]
                .get_mut(l - 1)
                .ok_or_else(|| CliError::UnknownKey(key.clone()))?;
            slot[*phase] = value.clone();
        }
        ["lambda", phase @ ("w" | "nw"), a, b] => {
            let (a, b) = (index(a), index(b));
            let (Some(a), Some(b)) = (a, b) else {
                return Err(CliError::UnknownKey(key));
            };
            let v = value
                .as_f64()
                .ok_or_else(|| invalid(&key, "expected a number"))?;
            let phase = serde_json::from_value(Value::String(phase.to_string()))
                .map_err(|e| invalid(&key, e.to_string()))?;
            solver.lambda_overrides.push(LambdaOverride {
                between: [a, b],
                phase,
                value: v,
            });
            return Ok(());
        }
        _ => {
            let mut node = &mut tree;
            for p in &parts {
                node = node
                    .as_object_mut()
                    .and_then(|m| m.get_mut(*p))
                    .ok_or_else(|| CliError::UnknownKey(key.clone()))?;
            }
            *node = value.clone();
        }
    }
    *solver = serde_json::from_value(tree).map_err(|e| invalid(&key, e.to_string()))?;
    Ok(())
}
