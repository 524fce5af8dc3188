//! Scenario document format: one JSON object per scenario.
//!
//! ```json
//! {
//!   "name": "portfolio",
//!   "kind": "bounded-sum",
//!   "vars": [{"lo": 25.0, "hi": 65.0, "mean": 50.0, "variance": 625.0}],
//!   "query": {"direction": "upper", "threshold_kind": "sum-deviation", "threshold": 10.0},
//!   "applicable": ["bennett", "bernstein", "hoeffding"],
//!   "oracle": {"kind": "exact-binomial", "n": 100, "p": 0.5},
//!   "expected": [{"method": "bennett", "value": 0.9545, "tolerance": 5e-4}]
//! }
//! ```
//!
//! `kind` selects the payload: `moment` uses `mean`/`variance`/`support_lo`/
//! `support_hi`/`nonnegative`, `bounded-sum` uses `vars`, and `martingale` /
//! `bounded-difference` use `c`. Unknown keys are rejected, fields from the
//! wrong kind are rejected by name, and all model invariants are enforced
//! after parsing. Monte Carlo oracles name their aggregate: `sum`, `mean`,
//! `max`, or a registered custom (`dna-3mer-count`, `kde-l1-box`).

use serde::{Deserialize, Serialize};

use crate::model::{
    BoundMethod, BoundedSumSpec, MartingaleDifferenceSpec, MomentProfile, TailQuery, VarRange,
};
use crate::oracle::{Aggregate, Distribution, SamplerSpec};

use super::catalog::custom_aggregate_by_name;
use super::{Expected, OracleConfig, Scenario, ScenarioData, ScenarioError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum KindDoc {
    Moment,
    BoundedSum,
    Martingale,
    BoundedDifference,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    name: String,
    kind: KindDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    variance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    support_lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    support_hi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nonnegative: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vars: Option<Vec<VarRange>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c: Option<Vec<f64>>,
    query: TailQuery,
    applicable: Vec<BoundMethod>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    expected: Option<Vec<Expected>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum OracleKindDoc {
    ExactBinomial,
    MonteCarlo,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OracleDoc {
    kind: OracleKindDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dist: Option<DistDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    copies: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    aggregate: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum DistKindDoc {
    Bernoulli,
    Uniform,
    TwoPoint,
    Categorical,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistDoc {
    kind: DistKindDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lo: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
}

fn schema_err<T>(field: &str, message: impl Into<String>) -> Result<T, ScenarioError> {
    Err(ScenarioError::Schema {
        field: field.to_string(),
        message: message.into(),
    })
}

fn require<T>(value: Option<T>, field: &str, kind: &str) -> Result<T, ScenarioError> {
    match value {
        Some(v) => Ok(v),
        None => schema_err(field, format!("required for kind `{kind}`")),
    }
}

fn forbid<T>(value: &Option<T>, field: &str, kind: &str) -> Result<(), ScenarioError> {
    if value.is_some() {
        schema_err(field, format!("not allowed for kind `{kind}`"))
    } else {
        Ok(())
    }
}

fn dist_from_doc(doc: DistDoc) -> Result<Distribution, ScenarioError> {
    let DistDoc {
        kind,
        p,
        lo,
        hi,
        x1,
        x2,
        values,
        weights,
    } = doc;
    match kind {
        DistKindDoc::Bernoulli => {
            forbid(&lo, "dist.lo", "bernoulli")?;
            forbid(&hi, "dist.hi", "bernoulli")?;
            forbid(&x1, "dist.x1", "bernoulli")?;
            forbid(&x2, "dist.x2", "bernoulli")?;
            forbid(&values, "dist.values", "bernoulli")?;
            forbid(&weights, "dist.weights", "bernoulli")?;
            Ok(Distribution::Bernoulli {
                p: require(p, "dist.p", "bernoulli")?,
            })
        }
        DistKindDoc::Uniform => {
            forbid(&p, "dist.p", "uniform")?;
            forbid(&x1, "dist.x1", "uniform")?;
            forbid(&x2, "dist.x2", "uniform")?;
            forbid(&values, "dist.values", "uniform")?;
            forbid(&weights, "dist.weights", "uniform")?;
            Ok(Distribution::Uniform {
                lo: require(lo, "dist.lo", "uniform")?,
                hi: require(hi, "dist.hi", "uniform")?,
            })
        }
        DistKindDoc::TwoPoint => {
            forbid(&lo, "dist.lo", "two-point")?;
            forbid(&hi, "dist.hi", "two-point")?;
            forbid(&values, "dist.values", "two-point")?;
            forbid(&weights, "dist.weights", "two-point")?;
            Ok(Distribution::TwoPoint {
                x1: require(x1, "dist.x1", "two-point")?,
                p: require(p, "dist.p", "two-point")?,
                x2: require(x2, "dist.x2", "two-point")?,
            })
        }
        DistKindDoc::Categorical => {
            forbid(&p, "dist.p", "categorical")?;
            forbid(&lo, "dist.lo", "categorical")?;
            forbid(&hi, "dist.hi", "categorical")?;
            forbid(&x1, "dist.x1", "categorical")?;
            forbid(&x2, "dist.x2", "categorical")?;
            Ok(Distribution::Categorical {
                values: require(values, "dist.values", "categorical")?,
                weights: require(weights, "dist.weights", "categorical")?,
            })
        }
    }
}

fn dist_to_doc(dist: &Distribution) -> DistDoc {
    let empty = DistDoc {
        kind: DistKindDoc::Bernoulli,
        p: None,
        lo: None,
        hi: None,
        x1: None,
        x2: None,
        values: None,
        weights: None,
    };
    match dist {
        Distribution::Bernoulli { p } => DistDoc {
            kind: DistKindDoc::Bernoulli,
            p: Some(*p),
            ..empty
        },
        Distribution::Uniform { lo, hi } => DistDoc {
            kind: DistKindDoc::Uniform,
            lo: Some(*lo),
            hi: Some(*hi),
            ..empty
        },
        Distribution::TwoPoint { x1, p, x2 } => DistDoc {
            kind: DistKindDoc::TwoPoint,
            x1: Some(*x1),
            p: Some(*p),
            x2: Some(*x2),
            ..empty
        },
        Distribution::Categorical { values, weights } => DistDoc {
            kind: DistKindDoc::Categorical,
            values: Some(values.clone()),
            weights: Some(weights.clone()),
            ..empty
        },
    }
}

fn oracle_from_doc(doc: OracleDoc) -> Result<OracleConfig, ScenarioError> {
    match doc.kind {
        OracleKindDoc::ExactBinomial => {
            forbid(&doc.dist, "oracle.dist", "exact-binomial")?;
            forbid(&doc.copies, "oracle.copies", "exact-binomial")?;
            forbid(&doc.aggregate, "oracle.aggregate", "exact-binomial")?;
            Ok(OracleConfig::ExactBinomial {
                n: require(doc.n, "oracle.n", "exact-binomial")?,
                p: require(doc.p, "oracle.p", "exact-binomial")?,
            })
        }
        OracleKindDoc::MonteCarlo => {
            forbid(&doc.n, "oracle.n", "monte-carlo")?;
            forbid(&doc.p, "oracle.p", "monte-carlo")?;
            let dist = dist_from_doc(require(doc.dist, "oracle.dist", "monte-carlo")?)?;
            let copies = require(doc.copies, "oracle.copies", "monte-carlo")?;
            let aggregate = require(doc.aggregate, "oracle.aggregate", "monte-carlo")?;
            let aggregate =
                match aggregate.as_str() {
                    "sum" => Aggregate::Sum,
                    "mean" => Aggregate::Mean,
                    "max" => Aggregate::Max,
                    name => Aggregate::Custom(custom_aggregate_by_name(name, copies).ok_or_else(
                        || ScenarioError::Schema {
                            field: "oracle.aggregate".into(),
                            message: format!("unknown aggregate `{name}`"),
                        },
                    )?),
                };
            Ok(OracleConfig::MonteCarlo(SamplerSpec::new(
                dist, copies, aggregate,
            )))
        }
    }
}

fn oracle_to_doc(config: &OracleConfig) -> OracleDoc {
    match config {
        OracleConfig::ExactBinomial { n, p } => OracleDoc {
            kind: OracleKindDoc::ExactBinomial,
            n: Some(*n),
            p: Some(*p),
            dist: None,
            copies: None,
            aggregate: None,
        },
        OracleConfig::MonteCarlo(sampler) => OracleDoc {
            kind: OracleKindDoc::MonteCarlo,
            n: None,
            p: None,
            dist: Some(dist_to_doc(&sampler.dist)),
            copies: Some(sampler.copies),
            aggregate: Some(match &sampler.aggregate {
                Aggregate::Sum => "sum".to_string(),
                Aggregate::Mean => "mean".to_string(),
                Aggregate::Max => "max".to_string(),
                Aggregate::Custom(c) => c.name.clone(),
            }),
        },
    }
}

fn scenario_from_doc(doc: ScenarioDoc) -> Result<Scenario, ScenarioError> {
    let kind_name = match doc.kind {
        KindDoc::Moment => "moment",
        KindDoc::BoundedSum => "bounded-sum",
        KindDoc::Martingale => "martingale",
        KindDoc::BoundedDifference => "bounded-difference",
    };
    let data = match doc.kind {
        KindDoc::Moment => {
            forbid(&doc.vars, "vars", kind_name)?;
            forbid(&doc.c, "c", kind_name)?;
            ScenarioData::Moment(MomentProfile {
                mean: require(doc.mean, "mean", kind_name)?,
                variance: doc.variance,
                support_lo: doc.support_lo,
                support_hi: doc.support_hi,
                nonnegative: doc.nonnegative.unwrap_or(false),
            })
        }
        KindDoc::BoundedSum => {
            forbid(&doc.mean, "mean", kind_name)?;
            forbid(&doc.variance, "variance", kind_name)?;
            forbid(&doc.support_lo, "support_lo", kind_name)?;
            forbid(&doc.support_hi, "support_hi", kind_name)?;
            forbid(&doc.nonnegative, "nonnegative", kind_name)?;
            forbid(&doc.c, "c", kind_name)?;
            ScenarioData::BoundedSum(BoundedSumSpec::new(require(doc.vars, "vars", kind_name)?))
        }
        KindDoc::Martingale | KindDoc::BoundedDifference => {
            forbid(&doc.mean, "mean", kind_name)?;
            forbid(&doc.variance, "variance", kind_name)?;
            forbid(&doc.support_lo, "support_lo", kind_name)?;
            forbid(&doc.support_hi, "support_hi", kind_name)?;
            forbid(&doc.nonnegative, "nonnegative", kind_name)?;
            forbid(&doc.vars, "vars", kind_name)?;
            let spec = MartingaleDifferenceSpec::new(require(doc.c, "c", kind_name)?);
            if doc.kind == KindDoc::Martingale {
                ScenarioData::Martingale(spec)
            } else {
                ScenarioData::BoundedDifference(spec)
            }
        }
    };
    let oracle = doc.oracle.map(oracle_from_doc).transpose()?;
    let scenario = Scenario {
        name: doc.name,
        data,
        query: doc.query,
        applicable: doc.applicable,
        oracle,
        expected: doc.expected.unwrap_or_default(),
    };
    scenario.validate()?;
    Ok(scenario)
}

fn scenario_to_doc(scenario: &Scenario) -> ScenarioDoc {
    let mut doc = ScenarioDoc {
        name: scenario.name.clone(),
        kind: KindDoc::Moment,
        mean: None,
        variance: None,
        support_lo: None,
        support_hi: None,
        nonnegative: None,
        vars: None,
        c: None,
        query: scenario.query,
        applicable: scenario.applicable.clone(),
        oracle: scenario.oracle.as_ref().map(oracle_to_doc),
        expected: if scenario.expected.is_empty() {
            None
        } else {
            Some(scenario.expected.clone())
        },
    };
    match &scenario.data {
        ScenarioData::Moment(p) => {
            doc.kind = KindDoc::Moment;
            doc.mean = Some(p.mean);
            doc.variance = p.variance;
            doc.support_lo = p.support_lo;
            doc.support_hi = p.support_hi;
            doc.nonnegative = if p.nonnegative { Some(true) } else { None };
        }
        ScenarioData::BoundedSum(s) => {
            doc.kind = KindDoc::BoundedSum;
            doc.vars = Some(s.vars.clone());
        }
        ScenarioData::Martingale(m) => {
            doc.kind = KindDoc::Martingale;
            doc.c = Some(m.c.clone());
        }
        ScenarioData::BoundedDifference(m) => {
            doc.kind = KindDoc::BoundedDifference;
            doc.c = Some(m.c.clone());
        }
    }
    doc
}

/// Parse and fully validate one scenario document.
pub fn load_scenario(document: &str) -> Result<Scenario, ScenarioError> {
    let doc: ScenarioDoc = serde_json::from_str(document).map_err(|e| {
        ScenarioError::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
    })?;
    scenario_from_doc(doc)
}

/// Serialize a scenario to the document format (pretty-printed).
pub fn scenario_to_json(scenario: &Scenario) -> String {
    let doc = scenario_to_doc(scenario);
    let mut json = serde_json::to_string_pretty(&doc).expect("scenario documents serialize");
    json.push('\n');
    json
}
