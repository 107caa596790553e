use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A model constant: numeric, or a textual switch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConstValue {
    Number(f64),
    Text(String),
}

impl From<f64> for ConstValue {
    fn from(x: f64) -> Self {
        ConstValue::Number(x)
    }
}

impl From<&str> for ConstValue {
    fn from(s: &str) -> Self {
        ConstValue::Text(s.to_string())
    }
}

impl fmt::Display for ConstValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstValue::Number(x) => write!(f, "{x}"),
            ConstValue::Text(s) => f.write_str(s),
        }
    }
}

/// Registered family name plus its constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub variant: String,
    #[serde(default)]
    pub constants: BTreeMap<String, ConstValue>,
}

impl ModelSpec {
    pub fn new(variant: impl Into<String>) -> Self {
        Self {
            variant: variant.into(),
            constants: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<ConstValue>) -> Self {
        self.constants.insert(key.to_string(), value.into());
        self
    }
}

/// Declared constant with its default.
#[derive(Clone, Debug)]
pub struct ConstantDef {
    pub name: &'static str,
    pub default: ConstValue,
    pub doc: &'static str,
}

impl ConstantDef {
    pub fn number(name: &'static str, default: f64, doc: &'static str) -> Self {
        Self {
            name,
            default: ConstValue::Number(default),
            doc,
        }
    }

    pub fn text(name: &'static str, default: &str, doc: &'static str) -> Self {
        Self {
            name,
            default: ConstValue::Text(default.to_string()),
            doc,
        }
    }
}

/// Constants resolved against a family's declarations: defaults filled in,
/// unknown keys rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct Constants {
    values: BTreeMap<String, ConstValue>,
}

impl Constants {
    pub fn resolve(
        family: &str,
        defs: &[ConstantDef],
        given: &BTreeMap<String, ConstValue>,
    ) -> Result<Self> {
        if let Some(unknown) = given
            .keys()
            .find(|k| !defs.iter().any(|d| d.name == k.as_str()))
        {
            return Err(Error::InvalidModel(format!(
                "unknown constant `{unknown}` for model `{family}`"
            )));
        }
        let values = defs
            .iter()
            .map(|d| {
                (
                    d.name.to_string(),
                    given
                        .get(d.name)
                        .cloned()
                        .unwrap_or_else(|| d.default.clone()),
                )
            })
            .collect();
        Ok(Self { values })
    }

    pub fn into_map(self) -> BTreeMap<String, ConstValue> {
        self.values
    }

    pub fn number(&self, name: &str) -> Result<f64> {
        match self.values.get(name) {
            Some(ConstValue::Number(x)) if x.is_finite() => Ok(*x),
            Some(other) => Err(Error::InvalidModel(format!(
                "constant `{name}` must be a finite number, got `{other}`"
            ))),
            None => Err(Error::InvalidModel(format!("missing constant `{name}`"))),
        }
    }

    pub fn count(&self, name: &str) -> Result<usize> {
        let x = self.number(name)?;
        if x < 0.0 || x.fract() != 0.0 {
            return Err(Error::InvalidModel(format!(
                "constant `{name}` must be a non-negative integer, got {x}"
            )));
        }
        Ok(x as usize)
    }

    pub fn text(&self, name: &str) -> Result<&str> {
        match self.values.get(name) {
            Some(ConstValue::Text(s)) => Ok(s),
            Some(other) => Err(Error::InvalidModel(format!(
                "constant `{name}` must be text, got `{other}`"
            ))),
            None => Err(Error::InvalidModel(format!("missing constant `{name}`"))),
        }
    }
}
