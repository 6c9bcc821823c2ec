//! Reading command inputs: a file path, `-` for stdin, or inline JSON.

use std::io::Read;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{Map, Value};
use squeeze_core::scalar::complex_from_interleaved;
use squeeze_core::wlc::{ball_polytope, polydisk_polygon, BodyDescriptor};
use squeeze_core::{Body, CartanFactor, DomainSpec, Point, RemovedSet};

use crate::CliError;

pub struct Input {
    source: String,
    value: Value,
}

impl Input {
    pub fn load(arg: &str) -> Result<Self, CliError> {
        let (source, text) = if arg.trim_start().starts_with('{') {
            ("<inline>".to_string(), arg.to_string())
        } else if arg == "-" {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Input(format!("stdin: {e}")))?;
            ("<stdin>".to_string(), s)
        } else {
            let s = std::fs::read_to_string(arg).map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
            (arg.to_string(), s)
        };
        let value: Value = serde_json::from_str(&text).map_err(|e| {
            CliError::Input(format!("{source}: malformed JSON at line {} column {}: {e}", e.line(), e.column()))
        })?;
        if !value.is_object() {
            return Err(CliError::Input(format!("{source}: expected a JSON object")));
        }
        Ok(Input { source, value })
    }

    fn object(&self) -> &Map<String, Value> {
        self.value.as_object().expect("checked on load")
    }

    pub fn has(&self, key: &str) -> bool {
        self.object().contains_key(key)
    }

    /// The whole input parsed as `T`.
    pub fn whole<T: DeserializeOwned>(&self) -> Result<T, CliError> {
        T::deserialize(&self.value).map_err(|e| CliError::Input(format!("{}: {e}", self.source)))
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Result<T, CliError> {
        self.opt(key)?.ok_or_else(|| CliError::Input(format!("{}: missing field `{key}`", self.source)))
    }

    pub fn opt<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.object()
            .get(key)
            .map(|v| T::deserialize(v).map_err(|e| CliError::Input(format!("{}: field `{key}`: {e}", self.source))))
            .transpose()
    }

    fn nested(&self, key: &str) -> Result<Input, CliError> {
        match self.object().get(key) {
            Some(v) if v.is_object() => Ok(Input { source: format!("{}#{key}", self.source), value: v.clone() }),
            Some(_) => Err(CliError::Input(format!("{}: field `{key}` must be an object", self.source))),
            None => Err(CliError::Input(format!("{}: missing field `{key}`", self.source))),
        }
    }

    /// A domain given as `{"factors": ...}` or as a single factor `{"kind": ...}`.
    pub fn domain_here(&self) -> Result<DomainSpec, CliError> {
        if self.has("factors") {
            self.whole()
        } else {
            Ok(DomainSpec::single(self.whole::<CartanFactor>()?))
        }
    }

    /// The `domain` or `factor` field if present, else the whole input.
    pub fn domain(&self) -> Result<DomainSpec, CliError> {
        if self.has("domain") {
            self.nested("domain")?.domain_here()
        } else if self.has("factor") {
            self.nested("factor")?.domain_here()
        } else {
            self.domain_here()
        }
    }

    pub fn point(&self, key: &str) -> Result<Point, CliError> {
        let raw: Vec<f64> = self.get(key)?;
        interleaved(&raw).ok_or_else(|| {
            CliError::Input(format!("{}: field `{key}` needs an even number of reals [re, im, ...]", self.source))
        })
    }

    pub fn removed_set(&self) -> Result<RemovedSet, CliError> {
        let v = self.object().get("set").ok_or_else(|| CliError::Input(format!("{}: missing field `set`", self.source)))?;
        let d = serde_json::from_value(v.clone()).map_err(|e| CliError::Input(format!("{}: field `set`: {e}", self.source)))?;
        Ok(RemovedSet::from_descriptor(&d)?)
    }

    /// A body given by halfspaces or by a named polyhedral approximation,
    /// together with its optional base point `z0`.
    pub fn body(&self) -> Result<(Body, Option<Point>), CliError> {
        let src = if self.has("body") { self.nested("body")? } else { Input { source: self.source.clone(), value: self.value.clone() } };
        let z0 = if src.has("z0") {
            Some(src.point("z0")?)
        } else if self.has("z0") {
            Some(self.point("z0")?)
        } else {
            None
        };
        if src.has("preset") {
            let p: Preset = src.whole()?;
            let body = match p.preset.as_str() {
                "polydisk" => polydisk_polygon(p.n.unwrap_or(2), p.m.unwrap_or(64))?,
                "ball" => ball_polytope(p.half_alpha.unwrap_or(8), p.phases.unwrap_or(32))?,
                other => return Err(CliError::Input(format!("{}: unknown preset `{other}` (polydisk, ball)", src.source))),
            };
            return Ok((body, z0));
        }
        let mut d: BodyDescriptor = src.whole()?;
        d.z0 = None;
        Ok((Body::from_descriptor(&d)?, z0))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Preset {
    preset: String,
    n: Option<usize>,
    m: Option<usize>,
    half_alpha: Option<usize>,
    phases: Option<usize>,
    #[allow(dead_code)]
    z0: Option<Vec<f64>>,
}

pub fn interleaved(raw: &[f64]) -> Option<Point> {
    complex_from_interleaved(raw)
}
