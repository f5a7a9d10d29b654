//! Machine-readable report documents written by the command-line tool.

use serde::{Deserialize, Serialize};

use crate::equilibrium::{EquilibriumChain, NumericSettings};
use crate::error::Result;
use crate::orderings::{AgeingClassification, OrderingReport};
use crate::transforms::UnitCurve;

/// Serializes non-finite floats as `null` and reads `null` back as NaN.
pub mod finite_or_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub version: String,
    pub inputs: Inputs,
    pub results: Results,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inputs {
    pub command: String,
    pub specs: Vec<String>,
    pub levels: usize,
    pub settings: NumericSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Results {
    Chain(ChainSummary),
    Curves(CurveSet),
    Order(OrderingReport),
    Classify(AgeingClassification),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub distribution: String,
    pub closed_form: bool,
    pub levels: Vec<LevelSummary>,
}

/// One ladder level sampled on its window. Rates and residual lives are
/// `null` where the survival is below the tail cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: usize,
    pub generalized_mean: f64,
    pub window: (f64, f64),
    pub x: Vec<f64>,
    pub t_bar: Vec<f64>,
    pub failure_rate: Vec<Option<f64>>,
    pub mrl: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSet {
    pub distribution: String,
    pub curves: Vec<UnitCurve>,
    /// CSV files written next to the report, relative to the output directory.
    pub files: Vec<String>,
}

impl ChainSummary {
    pub fn from_chain(chain: &EquilibriumChain) -> Result<Self> {
        let levels = (1..=chain.max_level())
            .map(|s| {
                let x = chain.x_grid(s)?;
                let t_bar = x.iter().map(|&v| chain.t_bar(s, v)).collect::<Result<Vec<_>>>()?;
                let failure_rate = x.iter().map(|&v| chain.failure_rate(s, v).ok()).collect();
                let mrl = x.iter().map(|&v| chain.mrl(s, v).ok()).collect();
                Ok(LevelSummary {
                    level: s,
                    generalized_mean: chain.generalized_mean(s)?,
                    window: chain.window(s)?,
                    x,
                    t_bar,
                    failure_rate,
                    mrl,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            distribution: chain.base().name().to_string(),
            closed_form: chain.is_closed_form(),
            levels,
        })
    }
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report documents always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
