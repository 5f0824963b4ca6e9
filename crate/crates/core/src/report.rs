//! Machine-readable report document emitted by the CLI. Schema version "1";
//! every pass/fail entry is recomputable from the inputs and the document
//! round-trips through its own parser.

use serde::{Deserialize, Serialize};

use crate::constructions::{ConlonReport, ThreeProductReport};
use crate::error::{Error, Result};
use crate::group::GroupDescriptor;
use crate::triplet::{ConditionReport, StructureSizes};
use crate::walk::{BoundRecord, CertificateRecord};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputInfo {
    pub description: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub triples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralTable {
    pub lambda_local: f64,
    pub lambda_gcay: f64,
    pub lambda_zigzag: f64,
    pub t_norm_plus: f64,
    pub lambda_walk: f64,
}

impl SpectralTable {
    pub fn from_certificate(c: &CertificateRecord) -> Self {
        SpectralTable {
            lambda_local: c.lambda_local,
            lambda_gcay: c.lambda_gcay,
            lambda_zigzag: c.lambda_zigzag,
            t_norm_plus: c.t_norm_plus,
            lambda_walk: c.lambda_walk,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaTable {
    pub two_centers_pass: bool,
    pub lift_pass: bool,
    pub dual_construction_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lift_witness: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub input: InputInfo,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditions: Option<ConditionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sizes: Option<StructureSizes>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralTable>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bounds: Vec<BoundRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemmas: Option<LemmaTable>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mixing_curve_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conlon: Option<ConlonReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub three_product: Option<ThreeProductReport>,
    pub pass: bool,
}

impl Report {
    pub fn new(description: &str) -> Self {
        Report {
            schema_version: SCHEMA_VERSION.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            timestamp: None,
            seed: None,
            input: InputInfo {
                description: description.into(),
                group: None,
                triples: None,
            },
            conditions: None,
            sizes: None,
            spectral: None,
            bounds: Vec::new(),
            lemmas: None,
            mixing_curve_file: None,
            conlon: None,
            three_product: None,
            pass: false,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("report JSON: {e}")))
    }
}
