//! Versioned JSON descriptions of single instances and parameter grids.
//!
//! ```json
//! {"schema_version": 1, "family": "half_power", "field": "3^1:2",
//!  "params": {"k": 1, "a": "1", "b": "g^1", "delta": "0"}}
//! ```
//!
//! A grid has the same shape; `"fields"` may list several fields and each
//! parameter may be an array or a keyword (see [`super::grid`]).

use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{build, build_lenient, FamilyId, FamilyInstance, GRecipe, ParamKind, ParamValue, Params};
use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldSpec};
use crate::linearized::parse_linpoly;
use crate::poly::parse_poly;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub schema_version: u32,
    pub family: FamilyId,
    pub field: String,
    pub params: Map<String, Value>,
}

impl InstanceSpec {
    pub fn parse(text: &str) -> Result<InstanceSpec> {
        let grid = GridSpec::parse(text)?;
        match grid.fields.as_slice() {
            [field] => Ok(InstanceSpec {
                schema_version: grid.schema_version,
                family: grid.family,
                field: field.clone(),
                params: grid.params,
            }),
            _ => Err(Error::Schema("an instance names exactly one field".into())),
        }
    }

    fn resolve(&self, seed: u64) -> Result<(Arc<FieldCtx>, Params)> {
        let ctx = parse_field(&self.field)?;
        let mut params = Params::new();
        for &(name, kind) in self.family.schema() {
            let v = self.params.get(name).ok_or_else(|| missing(self.family, name))?;
            params.push((name, parse_param(&ctx, name, kind, v, seed)?));
        }
        Ok((ctx, params))
    }

    /// Strict: unsatisfied hypotheses are errors.
    pub fn instantiate(&self, seed: u64) -> Result<FamilyInstance> {
        let (ctx, params) = self.resolve(seed)?;
        build(self.family, &ctx, params)
    }

    pub fn instantiate_lenient(&self, seed: u64) -> Result<FamilyInstance> {
        let (ctx, params) = self.resolve(seed)?;
        build_lenient(self.family, &ctx, params)
    }
}

/// A family, one or more fields, and per-parameter value sets.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub schema_version: u32,
    pub family: FamilyId,
    pub fields: Vec<String>,
    pub params: Map<String, Value>,
}

impl GridSpec {
    pub fn parse(text: &str) -> Result<GridSpec> {
        let v: Value = serde_json::from_str(text)
            .map_err(|e| Error::Schema(format!("invalid JSON at line {} column {}: {e}", e.line(), e.column())))?;
        Self::from_value(v)
    }

    pub fn from_value(v: Value) -> Result<GridSpec> {
        let schema = |m: &str| Error::Schema(m.to_string());
        let obj = v.as_object().ok_or_else(|| schema("top level must be an object"))?;
        if let Some(key) =
            obj.keys().find(|k| !["schema_version", "family", "field", "fields", "params"].contains(&k.as_str()))
        {
            return Err(Error::Schema(format!("unknown key `{key}`")));
        }
        let schema_version = match obj.get("schema_version") {
            None => SCHEMA_VERSION,
            Some(v) => match v.as_u64() {
                Some(v) if v == u64::from(SCHEMA_VERSION) => SCHEMA_VERSION,
                _ => {
                    return Err(Error::Schema(format!(
                        "unsupported schema_version {v}; this build reads {SCHEMA_VERSION}"
                    )))
                }
            },
        };
        let family = obj.get("family").and_then(Value::as_str).ok_or_else(|| schema("`family` must be a string"))?;
        let family = FamilyId::from_str(family)?;
        let fields = match (obj.get("field"), obj.get("fields")) {
            (Some(Value::String(f)), None) => vec![f.clone()],
            (None, Some(Value::Array(fs))) => fs
                .iter()
                .map(|f| f.as_str().map(str::to_string).ok_or_else(|| schema("`fields` must hold strings")))
                .collect::<Result<_>>()?,
            (Some(_), Some(_)) => return Err(schema("give either `field` or `fields`, not both")),
            _ => return Err(schema("`field` must be a string or `fields` an array")),
        };
        for f in &fields {
            FieldSpec::from_str(f)?;
        }
        let params = match obj.get("params") {
            None => Map::new(),
            Some(Value::Object(m)) => m.clone(),
            Some(_) => return Err(schema("`params` must be an object")),
        };
        let names: Vec<&str> = family.schema().iter().map(|(n, _)| *n).collect();
        if let Some(k) = params.keys().find(|k| !names.contains(&k.as_str())) {
            return Err(Error::Schema(format!("{family} has no parameter `{k}` (expects {names:?})")));
        }
        if let Some(k) = names.iter().find(|k| !params.contains_key(**k)) {
            return Err(missing(family, k));
        }
        Ok(GridSpec { schema_version, family, fields, params })
    }

    pub fn to_value(&self) -> Value {
        serde_json::json!({
            "schema_version": self.schema_version,
            "family": self.family,
            "fields": self.fields,
            "params": self.params,
        })
    }
}

impl From<InstanceSpec> for GridSpec {
    fn from(s: InstanceSpec) -> GridSpec {
        GridSpec { schema_version: s.schema_version, family: s.family, fields: vec![s.field], params: s.params }
    }
}

fn missing(family: FamilyId, name: &str) -> Error {
    Error::Schema(format!("{family} needs parameter `{name}`"))
}

pub(crate) fn parse_field(s: &str) -> Result<Arc<FieldCtx>> {
    FieldSpec::from_str(s)?.build()
}

/// Parses one literal parameter value.
pub(crate) fn parse_param(ctx: &FieldCtx, name: &str, kind: ParamKind, v: &Value, seed: u64) -> Result<ParamValue> {
    let wrap = |e: Error| match e {
        Error::Parse { message, .. } => Error::Schema(format!("parameter `{name}`: {message}")),
        Error::Schema(_) => e,
        other => Error::Schema(format!("parameter `{name}`: {other}")),
    };
    let text = || -> Result<String> {
        match v {
            Value::String(s) => Ok(s.clone()),
            Value::Number(n) => Ok(n.to_string()),
            _ => Err(Error::Schema(format!("parameter `{name}` must be a string or number, got {v}"))),
        }
    };
    match kind {
        ParamKind::Int => v
            .as_i64()
            .map(ParamValue::Int)
            .ok_or_else(|| Error::Schema(format!("parameter `{name}` must be an integer, got {v}"))),
        ParamKind::Elem => ctx.parse_elem(&text()?).map(ParamValue::Elem).map_err(wrap),
        ParamKind::Lin => parse_linpoly(ctx, &text()?, seed).map(ParamValue::Lin).map_err(wrap),
        ParamKind::Poly => parse_poly(ctx, &text()?).map(ParamValue::Poly).map_err(wrap),
        ParamKind::Recipe => serde_json::from_value::<GRecipe>(v.clone())
            .map(ParamValue::Recipe)
            .map_err(|e| Error::Schema(format!("parameter `{name}`: {e}"))),
        ParamKind::Variant(all) => {
            let s = text()?;
            all.iter()
                .find(|a| **a == s)
                .map(|a| ParamValue::Variant(a))
                .ok_or_else(|| Error::Schema(format!("parameter `{name}` must be one of {all:?}, got `{s}`")))
        }
    }
}
