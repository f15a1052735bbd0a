//! Chart/field definition files.
//!
//! ```json
//! {
//!   "chart": "spherical",
//!   "params": { "k": 2.0 },
//!   "field": { "f0_re": "k*r^2", "f1_re": "1", "f3_im": "sin(theta)" }
//! }
//! ```
//!
//! `chart` is either a built-in name or an object
//! `{name, coords, maps: {x, y, z}, metric?: {h1, h2, h3}, domain?, region?}`.
//! `domain` lists expressions that must be strictly positive; `region` is
//! the sampling box `[[lo, hi], [lo, hi], [lo, hi]]` used for validation and
//! corpus generation. `field` keys are `f{0..3}_re` / `f{0..3}_im`, each
//! optional (zero when absent). Unknown keys anywhere are rejected.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{builtin_chart, Chart, ChartSpec, FieldSpec, GeometryError, QuatField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapsDef {
    pub x: String,
    pub y: String,
    pub z: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricDef {
    pub h1: String,
    pub h2: String,
    pub h3: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartDef {
    pub name: String,
    pub coords: [String; 3],
    pub maps: MapsDef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub domain: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<[[f64; 2]; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChartRef {
    Builtin(String),
    Custom(Box<ChartDef>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f0_re: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f0_im: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f1_re: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f1_im: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f2_re: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f2_im: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f3_re: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f3_im: Option<String>,
}

impl FieldDef {
    pub fn spec(&self) -> FieldSpec<'_> {
        FieldSpec {
            re: [&self.f0_re, &self.f1_re, &self.f2_re, &self.f3_re].map(|s| s.as_deref()),
            im: [&self.f0_im, &self.f1_im, &self.f2_im, &self.f3_im].map(|s| s.as_deref()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefinitionFile {
    pub chart: ChartRef,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldDef>,
}

/// Grid resolution per axis used to validate a user chart over its region.
const VALIDATION_GRID: usize = 4;

impl DefinitionFile {
    pub fn from_json(text: &str) -> Result<Self, GeometryError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| GeometryError::Definition(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| GeometryError::Definition("definition must be a JSON object".into()))?;
        // the untagged chart enum would swallow the precise error, so decode it first
        if let Some(chart) = obj.get("chart") {
            if !chart.is_string() {
                serde_json::from_value::<ChartDef>(chart.clone())
                    .map_err(|e| GeometryError::Definition(format!("chart: {e}")))?;
            }
        }
        serde_json::from_value(value).map_err(|e| GeometryError::Definition(e.to_string()))
    }

    /// Builds the chart. Built-in charts come back validated; user charts
    /// are validated on their region grid when one is given, otherwise the
    /// caller must validate them.
    pub fn chart(&self) -> Result<Chart, GeometryError> {
        match &self.chart {
            ChartRef::Builtin(name) => builtin_chart(name),
            ChartRef::Custom(def) => {
                let chart = def.build()?;
                if def.region.is_some() {
                    let samples = chart.region_grid(VALIDATION_GRID);
                    chart.validated(&samples)
                } else {
                    Ok(chart)
                }
            }
        }
    }

    /// The field over `chart` (which should come from [`Self::chart`]).
    pub fn field(&self, chart: Arc<Chart>) -> Result<QuatField, GeometryError> {
        let def = self.field.clone().unwrap_or_default();
        let params: Vec<(&str, f64)> = self.params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        for (k, v) in &params {
            if !v.is_finite() {
                return Err(GeometryError::Definition(format!("parameter `{k}` is not finite")));
            }
        }
        QuatField::parse(chart, &def.spec(), &params)
    }
}

impl ChartDef {
    pub fn build(&self) -> Result<Chart, GeometryError> {
        let coords = [0, 1, 2].map(|i| self.coords[i].as_str());
        let domain: Vec<&str> = self.domain.iter().map(String::as_str).collect();
        let region = self
            .region
            .map(|r| r.map(|[lo, hi]| (lo, hi)))
            .unwrap_or([(-1.0, 1.0); 3]);
        Chart::from_spec(&ChartSpec {
            name: &self.name,
            coords,
            maps: [&self.maps.x, &self.maps.y, &self.maps.z].map(String::as_str),
            metric: self.metric.as_ref().map(|m| [&m.h1, &m.h2, &m.h3].map(String::as_str)),
            domain: &domain,
            region,
        })
    }
}

/// Parses a comma-separated coordinate triple such as `2,1.0,0.5`.
pub fn parse_point(text: &str) -> Result<[f64; 3], GeometryError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(GeometryError::Definition(format!(
            "point `{text}` must have exactly three comma-separated coordinates"
        )));
    }
    let mut p = [0.0; 3];
    for (i, s) in parts.iter().enumerate() {
        let v: f64 = s
            .parse()
            .map_err(|_| GeometryError::Definition(format!("bad coordinate `{s}` in `{text}`")))?;
        if !v.is_finite() {
            return Err(GeometryError::Definition(format!(
                "coordinate `{s}` in `{text}` is not finite"
            )));
        }
        p[i] = v;
    }
    Ok(p)
}
