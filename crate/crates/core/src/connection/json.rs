//! `{"rank", "pole_order", "ramification", "matrix": [[poly, …], …]}` where a
//! poly is a list of `[exponent, "re", "im"]` triples. Optional `"variable"`
//! (default `"z"`) and `"prec"` (exponents `>= prec` unknown; absent means the
//! entries are exact polynomials).

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::system::{MeromorphicSystem, ScalarOperator};
use crate::error::{ConnectionError, SeriesError};
use crate::series::json::value_str;
use crate::series::{MatSeries, MultiSeries, Scalar, VarSpec, UNBOUNDED};

pub type PolyJson = Vec<Vec<Value>>;

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct SystemJson {
    pub rank: usize,
    pub pole_order: u32,
    pub ramification: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variable: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prec: Option<i64>,
    pub matrix: Vec<Vec<PolyJson>>,
}

fn parse_poly(p: &PolyJson) -> Result<Vec<(Vec<i64>, Scalar)>, SeriesError> {
    p.iter()
        .map(|t| {
            if t.len() != 3 {
                return Err(SeriesError::Parse(format!("term {t:?} is not [exponent, re, im]")));
            }
            let e = t[0]
                .as_i64()
                .ok_or_else(|| SeriesError::Parse(format!("bad exponent {}", t[0])))?;
            Ok((vec![e], Scalar::from_strings(&value_str(&t[1])?, &value_str(&t[2])?)?))
        })
        .collect()
}

impl TryFrom<&SystemJson> for MeromorphicSystem {
    type Error = ConnectionError;

    fn try_from(j: &SystemJson) -> Result<Self, ConnectionError> {
        if j.rank == 0 || j.matrix.len() != j.rank || j.matrix.iter().any(|r| r.len() != j.rank) {
            return Err(SeriesError::Parse(format!("matrix is not {0}x{0}", j.rank)).into());
        }
        if j.ramification == 0 {
            return Err(SeriesError::Parse("ramification 0".into()).into());
        }
        let name = j.variable.clone().unwrap_or_else(|| "z".into());
        let vars = vec![VarSpec::new(name, j.ramification, 0, j.prec.unwrap_or(UNBOUNDED))];
        let mut entries = Vec::with_capacity(j.rank * j.rank);
        for row in &j.matrix {
            for p in row {
                let terms = parse_poly(p)?;
                if let Some((e, _)) = terms.iter().find(|(e, _)| e[0] < 0) {
                    return Err(SeriesError::Parse(format!("negative exponent {} in A", e[0])).into());
                }
                entries.push(MultiSeries::from_terms(vars.clone(), None, terms)?);
            }
        }
        MeromorphicSystem::new(j.pole_order, MatSeries::new(j.rank, j.rank, entries)?)
    }
}

impl From<&MeromorphicSystem> for SystemJson {
    fn from(s: &MeromorphicSystem) -> Self {
        let n = s.rank();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        s.matrix()
                            .get(i, j)
                            .terms()
                            .map(|(e, c)| {
                                let (re, im) = c.to_strings();
                                vec![Value::from(e[0]), Value::from(re), Value::from(im)]
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        SystemJson {
            rank: n,
            pole_order: s.pole_order(),
            ramification: s.ramification(),
            variable: Some(s.var().to_string()),
            prec: s.prec(),
            matrix,
        }
    }
}

/// `{"pole_order", "ramification", "coeffs": [poly, …]}` for
/// `δ^n + p_{n-1} δ^{n-1} + … + p_0`, `coeffs[i] = p_i`.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct OperatorJson {
    pub pole_order: u32,
    #[serde(default = "one")]
    pub ramification: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variable: Option<String>,
    pub coeffs: Vec<PolyJson>,
}

fn one() -> u32 {
    1
}

impl TryFrom<&OperatorJson> for ScalarOperator {
    type Error = ConnectionError;

    fn try_from(j: &OperatorJson) -> Result<Self, ConnectionError> {
        if j.ramification == 0 {
            return Err(SeriesError::Parse("ramification 0".into()).into());
        }
        let name = j.variable.clone().unwrap_or_else(|| "z".into());
        let vars = vec![VarSpec::exact(name, j.ramification)];
        let coeffs = j
            .coeffs
            .iter()
            .map(|p| {
                let terms = parse_poly(p)?;
                if let Some((e, _)) = terms.iter().find(|(e, _)| e[0] < 0) {
                    return Err(SeriesError::Parse(format!("negative exponent {} in p", e[0])).into());
                }
                Ok(MultiSeries::from_terms(vars.clone(), None, terms)?)
            })
            .collect::<Result<Vec<_>, ConnectionError>>()?;
        ScalarOperator::new(j.pole_order, coeffs)
    }
}

impl ScalarOperator {
    pub fn from_json_str(text: &str) -> Result<Self, ConnectionError> {
        let j: OperatorJson = serde_json::from_str(text).map_err(|e| SeriesError::Parse(e.to_string()))?;
        ScalarOperator::try_from(&j)
    }
}

impl MeromorphicSystem {
    pub fn from_json_str(text: &str) -> Result<Self, ConnectionError> {
        let j: SystemJson = serde_json::from_str(text).map_err(|e| SeriesError::Parse(e.to_string()))?;
        MeromorphicSystem::try_from(&j)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&SystemJson::from(self)).expect("serializable")
    }
}
