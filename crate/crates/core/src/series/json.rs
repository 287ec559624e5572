//! JSON form of series: `{"vars": [...], "coeffs": [[e1, …, "re", "im"], …]}`.
//!
//! Rationals are `"p/q"` strings; terms are in graded-lex order, so output is
//! byte-stable. An unbounded `prec` is written as `null`.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::matrix::MatSeries;
use super::multi::{MultiSeries, VarSpec, UNBOUNDED};
use super::scalar::Scalar;
use crate::error::SeriesError;

type Res<T> = Result<T, SeriesError>;

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct VarJson {
    pub name: String,
    pub ramification: u32,
    pub low: i64,
    pub prec: Option<i64>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct SeriesJson {
    pub vars: Vec<VarJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_prec: Option<i64>,
    pub coeffs: Vec<Vec<Value>>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct MatJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<SeriesJson>,
}

impl From<&MultiSeries> for SeriesJson {
    fn from(s: &MultiSeries) -> Self {
        let vars = s
            .vars()
            .iter()
            .map(|v| VarJson {
                name: v.name.clone(),
                ramification: v.ramification,
                low: v.low,
                prec: (v.prec < UNBOUNDED).then_some(v.prec),
            })
            .collect();
        let coeffs = s
            .terms()
            .map(|(e, c)| {
                let (re, im) = c.to_strings();
                e.iter()
                    .map(|&x| Value::from(x))
                    .chain([Value::from(re), Value::from(im)])
                    .collect()
            })
            .collect();
        SeriesJson {
            vars,
            total_prec: s.total_prec(),
            coeffs,
        }
    }
}

impl TryFrom<&SeriesJson> for MultiSeries {
    type Error = SeriesError;

    fn try_from(j: &SeriesJson) -> Res<Self> {
        let vars: Vec<VarSpec> = j
            .vars
            .iter()
            .map(|v| VarSpec::new(v.name.clone(), v.ramification, v.low, v.prec.unwrap_or(UNBOUNDED)))
            .collect();
        let n = vars.len();
        let mut terms = Vec::with_capacity(j.coeffs.len());
        for row in &j.coeffs {
            if row.len() != n + 2 {
                return Err(SeriesError::Parse(format!(
                    "coefficient row of length {} for {n} variables",
                    row.len()
                )));
            }
            let e = row[..n]
                .iter()
                .map(|x| x.as_i64().ok_or_else(|| SeriesError::Parse(format!("bad exponent {x}"))))
                .collect::<Res<Vec<i64>>>()?;
            let re = value_str(&row[n])?;
            let im = value_str(&row[n + 1])?;
            terms.push((e, Scalar::from_strings(&re, &im)?));
        }
        MultiSeries::from_terms(vars, j.total_prec, terms)
    }
}

/// Accepts strings and plain JSON integers.
pub fn value_str(v: &Value) -> Res<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) if n.is_i64() => Ok(n.to_string()),
        _ => Err(SeriesError::Parse(format!("expected a rational string, got {v}"))),
    }
}

impl From<&MatSeries> for MatJson {
    fn from(m: &MatSeries) -> Self {
        MatJson {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(SeriesJson::from).collect(),
        }
    }
}

impl TryFrom<&MatJson> for MatSeries {
    type Error = SeriesError;

    fn try_from(j: &MatJson) -> Res<Self> {
        let entries = j.entries.iter().map(MultiSeries::try_from).collect::<Res<Vec<_>>>()?;
        MatSeries::new(j.rows, j.cols, entries)
    }
}

pub fn series_to_string(s: &MultiSeries) -> String {
    serde_json::to_string(&SeriesJson::from(s)).expect("serializable")
}

pub fn series_from_str(text: &str) -> Res<MultiSeries> {
    let j: SeriesJson = serde_json::from_str(text).map_err(|e| SeriesError::Parse(e.to_string()))?;
    MultiSeries::try_from(&j)
}
