//! Executable scenarios: named tail-bound problems carrying the data the
//! inequalities consume, the query, the declared-applicable methods, an
//! optional oracle configuration, and pinned regression values.
//!
//! Applicability is declared per scenario rather than inferred, because
//! preconditions like nonnegativity are assertions only the scenario author
//! can make. A declared method whose preconditions fail at runtime is a hard
//! error (the scenario is wrong); methods simply not declared are reported
//! as omissions with a reason.

mod catalog;
mod file;

use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::model::{
    BoundMethod, BoundResult, BoundedSumSpec, Direction, MartingaleDifferenceSpec, MomentProfile,
    TailQuery, ThresholdKind, Validate, ValidationReport,
};
use crate::oracle::{
    exact_binomial_tail_at, mc_tail_estimate, OracleError, SamplerSpec, TailEstimate,
};

pub use catalog::{builtin, builtin_catalog, dna_small_variant, kde_l1_box_aggregate};
pub use file::{load_scenario, scenario_to_json};

/// The quantity a scenario describes.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioData {
    Moment(MomentProfile),
    BoundedSum(BoundedSumSpec),
    Martingale(MartingaleDifferenceSpec),
    BoundedDifference(MartingaleDifferenceSpec),
}

impl ScenarioData {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ScenarioData::Moment(_) => "moment",
            ScenarioData::BoundedSum(_) => "bounded-sum",
            ScenarioData::Martingale(_) => "martingale",
            ScenarioData::BoundedDifference(_) => "bounded-difference",
        }
    }

    fn validate(&self) -> Result<(), ValidationReport> {
        match self {
            ScenarioData::Moment(p) => p.validate(),
            ScenarioData::BoundedSum(s) => s.validate(),
            ScenarioData::Martingale(m) | ScenarioData::BoundedDifference(m) => m.validate(),
        }
    }
}

/// Ground-truth source for soundness checks.
#[derive(Debug, Clone, PartialEq)]
pub enum OracleConfig {
    ExactBinomial { n: u64, p: f64 },
    MonteCarlo(SamplerSpec),
}

/// A pinned regression value for one method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub method: BoundMethod,
    pub value: f64,
    pub tolerance: f64,
    /// Tolerance is relative rather than absolute.
    #[serde(default)]
    pub relative: bool,
}

impl Expected {
    pub fn matches(&self, computed: f64) -> bool {
        let err = (computed - self.value).abs();
        if self.relative {
            err <= self.tolerance * self.value.abs()
        } else {
            err <= self.tolerance
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub data: ScenarioData,
    pub query: TailQuery,
    pub applicable: Vec<BoundMethod>,
    pub oracle: Option<OracleConfig>,
    pub expected: Vec<Expected>,
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("scenario `{name}` is invalid: {report}")]
    Invalid {
        name: String,
        report: ValidationReport,
    },
    #[error("scenario `{name}`: declared-applicable method {method} failed: {reason}")]
    ApplicableMethodFailed {
        name: String,
        method: BoundMethod,
        reason: String,
    },
    #[error("scenario `{name}` has no oracle configuration")]
    MissingOracle { name: String },
    #[error("oracle failed: {0}")]
    Oracle(#[from] OracleError),
    #[error("scenario document parse error: {0}")]
    Parse(String),
    #[error("scenario document schema violation: field `{field}`: {message}")]
    Schema { field: String, message: String },
}

/// One bound method that was not run, and why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Omission {
    pub method: BoundMethod,
    pub reason: String,
}

/// Oracle ground truth: exact value or seeded estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleValue {
    Exact(f64),
    Estimate(TailEstimate),
}

impl OracleValue {
    pub fn point(&self) -> f64 {
        match self {
            OracleValue::Exact(v) => *v,
            OracleValue::Estimate(e) => e.point,
        }
    }

    /// Distance from the point estimate down to the 99% lower limit (zero
    /// for exact values).
    pub fn slack(&self) -> f64 {
        match self {
            OracleValue::Exact(_) => 0.0,
            OracleValue::Estimate(e) => e.point - e.ci_lo,
        }
    }
}

/// Every applicable bound for one scenario, sorted ascending by value, plus
/// the reasons the remaining methods were omitted.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub scenario: String,
    pub rows: Vec<BoundResult>,
    pub omissions: Vec<Omission>,
    pub oracle_row: Option<OracleValue>,
}

/// One (bound, oracle) pairing with its verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct SoundnessRow {
    pub method: BoundMethod,
    pub bound: BoundResult,
    pub oracle: OracleValue,
    /// Pass iff bound.value >= oracle point − slack (the oracle's lower
    /// confidence limit; exact oracles have zero slack).
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SoundnessReport {
    pub scenario: String,
    pub samples: u64,
    pub seed: u64,
    pub rows: Vec<SoundnessRow>,
    pub passed: bool,
}

/// The event a bound dominates, in aggregate units. Deviations are resolved
/// against the oracle's own notion of E(Z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundEvent {
    Level { direction: Direction, level: f64 },
    Deviation { direction: Direction, dev: f64 },
}

/// Methods that can be derived from each data kind.
pub fn method_universe(data: &ScenarioData) -> &'static [BoundMethod] {
    match data {
        ScenarioData::Moment(_) => &[
            BoundMethod::Markov,
            BoundMethod::ReverseMarkov,
            BoundMethod::Chebyshev,
            BoundMethod::ChebyshevSymmetric,
            BoundMethod::ChernoffBernoulli,
            BoundMethod::ChernoffBinomialTwoSided,
        ],
        ScenarioData::BoundedSum(_) => &[
            BoundMethod::Hoeffding,
            BoundMethod::Bennett,
            BoundMethod::Bernstein,
            BoundMethod::Mcdiarmid,
            BoundMethod::Markov,
            BoundMethod::Chebyshev,
            BoundMethod::ChebyshevSymmetric,
        ],
        ScenarioData::Martingale(_) => &[BoundMethod::Azuma],
        ScenarioData::BoundedDifference(_) => &[BoundMethod::Mcdiarmid],
    }
}

type MethodOutcome = Result<(BoundResult, BoundEvent), String>;

fn err<T>(reason: impl Into<String>) -> Result<T, String> {
    Err(reason.into())
}

/// Deviation of X itself (moment scenarios treat sum- and mean-deviation
/// thresholds as plain deviations of the profiled variable).
fn profile_deviation(profile: &MomentProfile, query: &TailQuery) -> Result<f64, String> {
    let dev = match query.threshold_kind {
        ThresholdKind::AbsoluteLevel => (query.threshold - profile.mean).abs(),
        ThresholdKind::SumDeviation | ThresholdKind::MeanDeviation => query.threshold,
    };
    if dev > 0.0 {
        Ok(dev)
    } else {
        err("deviation derived from the query is not positive")
    }
}

/// Level in X units for one-sided level bounds.
fn profile_level(profile: &MomentProfile, query: &TailQuery, upper: bool) -> f64 {
    match query.threshold_kind {
        ThresholdKind::AbsoluteLevel => query.threshold,
        ThresholdKind::SumDeviation | ThresholdKind::MeanDeviation => {
            if upper {
                profile.mean + query.threshold
            } else {
                profile.mean - query.threshold
            }
        }
    }
}

/// Sum-scale deviation for bounded-sum scenarios.
fn sum_scale_deviation(spec: &BoundedSumSpec, query: &TailQuery) -> Result<f64, String> {
    let t = match query.threshold_kind {
        ThresholdKind::SumDeviation => query.threshold,
        ThresholdKind::MeanDeviation => query.threshold * spec.n() as f64,
        ThresholdKind::AbsoluteLevel => {
            let total = spec
                .total_mean()
                .ok_or("absolute levels need a mean on every variable")?;
            match query.direction {
                Direction::Upper => query.threshold - total,
                Direction::Lower => total - query.threshold,
                Direction::TwoSided => (query.threshold - total).abs(),
            }
        }
    };
    if t >= 0.0 {
        Ok(t)
    } else {
        err("level lies on the wrong side of the mean for this direction")
    }
}

fn run_moment(profile: &MomentProfile, query: &TailQuery, method: BoundMethod) -> MethodOutcome {
    match method {
        BoundMethod::Markov => {
            if query.direction != Direction::Upper {
                return err("bounds the upper tail only");
            }
            let a = profile_level(profile, query, true);
            let r = bounds::markov(profile, a).map_err(|e| e.to_string())?;
            Ok((
                r,
                BoundEvent::Level {
                    direction: Direction::Upper,
                    level: a,
                },
            ))
        }
        BoundMethod::ReverseMarkov => {
            if query.direction != Direction::Lower {
                return err("bounds the lower tail only");
            }
            let a = profile_level(profile, query, false);
            let r = bounds::reverse_markov(profile, a).map_err(|e| e.to_string())?;
            Ok((
                r,
                BoundEvent::Level {
                    direction: Direction::Lower,
                    level: a,
                },
            ))
        }
        BoundMethod::Chebyshev => {
            let dev = profile_deviation(profile, query)?;
            let r = bounds::chebyshev(profile, dev, false).map_err(|e| e.to_string())?;
            Ok((
                r,
                BoundEvent::Deviation {
                    direction: Direction::TwoSided,
                    dev,
                },
            ))
        }
        BoundMethod::ChebyshevSymmetric => {
            if query.direction == Direction::TwoSided {
                return err("the symmetric halving applies to one-sided queries");
            }
            let dev = profile_deviation(profile, query)?;
            let r = bounds::chebyshev(profile, dev, true).map_err(|e| e.to_string())?;
            Ok((
                r,
                BoundEvent::Deviation {
                    direction: query.direction,
                    dev,
                },
            ))
        }
        BoundMethod::ChernoffBernoulli => {
            if query.direction != Direction::Upper {
                return err("bounds the upper tail only");
            }
            let np = profile.mean;
            let a = profile_level(profile, query, true);
            if !(np > 0.0) {
                return err("needs a positive mean np");
            }
            let delta = a / np - 1.0;
            if !(delta > 0.0) {
                return err("level must exceed the mean");
            }
            let r = bounds::chernoff_bernoulli(np, delta).map_err(|e| e.to_string())?;
            Ok((
                r,
                BoundEvent::Level {
                    direction: Direction::Upper,
                    level: a,
                },
            ))
        }
        BoundMethod::ChernoffBinomialTwoSided => {
            let mu = profile.mean;
            if !(mu > 0.0) {
                return err("needs a positive mean");
            }
            let dev = profile_deviation(profile, query)?;
            let r = bounds::chernoff_binomial_two_sided(mu, dev / mu).map_err(|e| e.to_string())?;
            Ok((
                r,
                BoundEvent::Deviation {
                    direction: Direction::TwoSided,
                    dev,
                },
            ))
        }
        _ => err("not derivable from a moment profile"),
    }
}

fn run_bounded_sum(spec: &BoundedSumSpec, query: &TailQuery, method: BoundMethod) -> MethodOutcome {
    let n = spec.n();
    match method {
        BoundMethod::Hoeffding => {
            let t = sum_scale_deviation(spec, query)?;
            let q = TailQuery::sum_deviation(query.direction, t);
            let r = bounds::hoeffding_tail(spec, &q).map_err(|e| e.to_string())?;
            Ok((
                r,
                BoundEvent::Deviation {
                    direction: query.direction,
                    dev: t,
                },
            ))
        }
        BoundMethod::Bennett => {
            let v = spec
                .mean_variance()
                .ok_or("needs a variance on every variable")?;
            let s = {
                let one_sided = |upper: bool| -> Result<f64, String> {
                    spec.vars
                        .iter()
                        .map(|r| {
                            r.mean
                                .map(|m| if upper { r.hi - m } else { m - r.lo })
                                .ok_or_else(|| "needs a mean on every variable".to_string())
                        })
                        .try_fold(f64::NEG_INFINITY, |acc, x| x.map(|x| acc.max(x)))
                };
                match query.direction {
                    Direction::Upper => one_sided(true)?,
                    Direction::Lower => one_sided(false)?,
                    Direction::TwoSided => one_sided(true)?.max(one_sided(false)?),
                }
            };
            if !(s > 0.0) {
                return err("centered range scale s is not positive");
            }
            let t = sum_scale_deviation(spec, query)?;
            let q = TailQuery::mean_deviation(query.direction, t / n as f64);
            let r = bounds::bennett(n, v, s, &q).map_err(|e| e.to_string())?;
            Ok((
                r,
                BoundEvent::Deviation {
                    direction: query.direction,
                    dev: t,
                },
            ))
        }
        BoundMethod::Bernstein => {
            let v = spec
                .mean_variance()
                .ok_or("needs a variance on every variable")?;
            let t = sum_scale_deviation(spec, query)?;
            let q = TailQuery::sum_deviation(query.direction, t);
            let r = bounds::bernstein(n, v, &q).map_err(|e| e.to_string())?;
            Ok((
                r,
                BoundEvent::Deviation {
                    direction: query.direction,
                    dev: t,
                },
            ))
        }
        BoundMethod::Mcdiarmid => {
            let c: Vec<f64> = spec
                .vars
                .iter()
                .map(|r| r.width())
                .filter(|w| *w > 0.0)
                .collect();
            if c.is_empty() {
                return err("all ranges are degenerate");
            }
            let t = sum_scale_deviation(spec, query)?;
            let r = bounds::mcdiarmid(&MartingaleDifferenceSpec::new(c), t, query.direction)
                .map_err(|e| e.to_string())?;
            Ok((
                r,
                BoundEvent::Deviation {
                    direction: query.direction,
                    dev: t,
                },
            ))
        }
        BoundMethod::Markov => {
            if query.direction != Direction::Upper {
                return err("bounds the upper tail only");
            }
            if spec.vars.iter().any(|r| r.lo < 0.0) {
                return err("sum is not provably nonnegative");
            }
            let total = spec.total_mean().ok_or("needs a mean on every variable")?;
            let a = match query.threshold_kind {
                ThresholdKind::AbsoluteLevel => query.threshold,
                _ => total + sum_scale_deviation(spec, query)?,
            };
            let profile = MomentProfile::with_mean(total).nonnegative();
            let r = bounds::markov(&profile, a).map_err(|e| e.to_string())?;
            Ok((
                r,
                BoundEvent::Level {
                    direction: Direction::Upper,
                    level: a,
                },
            ))
        }
        BoundMethod::Chebyshev | BoundMethod::ChebyshevSymmetric => {
            let symmetric = method == BoundMethod::ChebyshevSymmetric;
            if symmetric && query.direction == Direction::TwoSided {
                return err("the symmetric halving applies to one-sided queries");
            }
            let var = spec
                .total_variance()
                .ok_or("needs a variance on every variable")?;
            let dev = sum_scale_deviation(spec, query)?;
            if !(dev > 0.0) {
                return err("deviation derived from the query is not positive");
            }
            let profile = MomentProfile::with_mean(spec.total_mean().unwrap_or(0.0)).variance(var);
            let r = bounds::chebyshev(&profile, dev, symmetric).map_err(|e| e.to_string())?;
            Ok((
                r,
                BoundEvent::Deviation {
                    direction: if symmetric {
                        query.direction
                    } else {
                        Direction::TwoSided
                    },
                    dev,
                },
            ))
        }
        _ => err("not derivable from a bounded-sum spec"),
    }
}

fn run_differences(
    spec: &MartingaleDifferenceSpec,
    query: &TailQuery,
    method: BoundMethod,
    martingale: bool,
) -> MethodOutcome {
    if query.threshold_kind != ThresholdKind::SumDeviation {
        return err("difference-bound deviations are sum-scale");
    }
    let t = query.threshold;
    let event = BoundEvent::Deviation {
        direction: query.direction,
        dev: t,
    };
    match (method, martingale) {
        (BoundMethod::Azuma, true) => {
            let r = bounds::azuma(spec, t, query.direction).map_err(|e| e.to_string())?;
            Ok((r, event))
        }
        (BoundMethod::Mcdiarmid, false) => {
            let r = bounds::mcdiarmid(spec, t, query.direction).map_err(|e| e.to_string())?;
            Ok((r, event))
        }
        (_, true) => err("not derivable from a martingale spec"),
        (_, false) => err("not derivable from a bounded-difference spec"),
    }
}

pub(crate) fn run_method(
    data: &ScenarioData,
    query: &TailQuery,
    method: BoundMethod,
) -> MethodOutcome {
    match data {
        ScenarioData::Moment(p) => run_moment(p, query, method),
        ScenarioData::BoundedSum(s) => run_bounded_sum(s, query, method),
        ScenarioData::Martingale(m) => run_differences(m, query, method, true),
        ScenarioData::BoundedDifference(m) => run_differences(m, query, method, false),
    }
}

impl Scenario {
    /// Full validation: data invariants, query invariants, sampler validity,
    /// and satisfiability of every declared-applicable method.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let invalid = |report| ScenarioError::Invalid {
            name: self.name.clone(),
            report,
        };
        self.data.validate().map_err(invalid)?;
        self.query
            .validate()
            .map_err(|report| ScenarioError::Invalid {
                name: self.name.clone(),
                report,
            })?;
        if let Some(OracleConfig::MonteCarlo(sampler)) = &self.oracle {
            sampler.validate()?;
        }
        if let Some(OracleConfig::ExactBinomial { p, .. }) = &self.oracle {
            if !(0.0..=1.0).contains(p) {
                return Err(ScenarioError::Oracle(OracleError::InvalidProbability(*p)));
            }
        }
        for method in &self.applicable {
            run_method(&self.data, &self.query, *method).map_err(|reason| {
                ScenarioError::ApplicableMethodFailed {
                    name: self.name.clone(),
                    method: *method,
                    reason,
                }
            })?;
        }
        Ok(())
    }

    /// Regression check: every pinned expected value against the computed
    /// bound. Returns (method, computed, expected) triples that missed.
    pub fn regression_misses(&self) -> Result<Vec<(Expected, f64)>, ScenarioError> {
        let table = compare_bounds(self)?;
        let mut misses = Vec::new();
        for exp in &self.expected {
            let row = table.rows.iter().find(|r| r.method == exp.method);
            match row {
                Some(r) if exp.matches(r.value) => {}
                Some(r) => misses.push((*exp, r.value)),
                None => misses.push((*exp, f64::NAN)),
            }
        }
        Ok(misses)
    }
}

/// Run every declared-applicable bound; rows sorted ascending by value.
/// Bounds not declared applicable are omitted with a reason, never aborting
/// the table.
pub fn compare_bounds(scenario: &Scenario) -> Result<ComparisonTable, ScenarioError> {
    scenario.validate()?;
    let mut rows = Vec::new();
    for method in &scenario.applicable {
        let (result, _) =
            run_method(&scenario.data, &scenario.query, *method).map_err(|reason| {
                ScenarioError::ApplicableMethodFailed {
                    name: scenario.name.clone(),
                    method: *method,
                    reason,
                }
            })?;
        rows.push(result);
    }
    rows.sort_by(|a, b| {
        a.value
            .total_cmp(&b.value)
            .then(a.log_value.total_cmp(&b.log_value))
            .then(a.method.as_str().cmp(b.method.as_str()))
    });
    let omissions = method_universe(&scenario.data)
        .iter()
        .filter(|m| !scenario.applicable.contains(m))
        .map(|m| Omission {
            method: *m,
            reason: match run_method(&scenario.data, &scenario.query, *m) {
                Ok(_) => "not declared applicable".to_string(),
                Err(reason) => reason,
            },
        })
        .collect();
    Ok(ComparisonTable {
        scenario: scenario.name.clone(),
        rows,
        omissions,
        oracle_row: None,
    })
}

fn oracle_for_event(
    config: &OracleConfig,
    event: &BoundEvent,
    samples: u64,
    seed: u64,
) -> Result<OracleValue, ScenarioError> {
    match config {
        OracleConfig::ExactBinomial { n, p } => {
            let value = match *event {
                BoundEvent::Level { direction, level } => {
                    exact_binomial_tail_at(*n, *p, level, direction)?
                }
                BoundEvent::Deviation { direction, dev } => {
                    let mean = *n as f64 * p;
                    let level = match direction {
                        Direction::Lower => mean - dev,
                        _ => mean + dev,
                    };
                    exact_binomial_tail_at(*n, *p, level, direction)?
                }
            };
            Ok(OracleValue::Exact(value))
        }
        OracleConfig::MonteCarlo(sampler) => {
            let query = match *event {
                BoundEvent::Level { direction, level } => TailQuery {
                    direction,
                    threshold_kind: ThresholdKind::AbsoluteLevel,
                    threshold: level,
                },
                BoundEvent::Deviation { direction, dev } => TailQuery {
                    direction,
                    threshold_kind: ThresholdKind::SumDeviation,
                    threshold: dev,
                },
            };
            Ok(OracleValue::Estimate(mc_tail_estimate(
                sampler, &query, samples, seed,
            )?))
        }
    }
}

/// Pair every applicable bound with the oracle value of the event it
/// dominates. A row passes iff bound ≥ oracle point − CI slack (for exact
/// oracles: bound ≥ exact value).
pub fn soundness_check(
    scenario: &Scenario,
    samples: u64,
    seed: u64,
) -> Result<SoundnessReport, ScenarioError> {
    let config = scenario
        .oracle
        .as_ref()
        .ok_or_else(|| ScenarioError::MissingOracle {
            name: scenario.name.clone(),
        })?;
    scenario.validate()?;
    let mut rows = Vec::new();
    for method in &scenario.applicable {
        let (bound, event) =
            run_method(&scenario.data, &scenario.query, *method).map_err(|reason| {
                ScenarioError::ApplicableMethodFailed {
                    name: scenario.name.clone(),
                    method: *method,
                    reason,
                }
            })?;
        let oracle = oracle_for_event(config, &event, samples, seed)?;
        let pass = bound.value >= oracle.point() - oracle.slack();
        rows.push(SoundnessRow {
            method: *method,
            bound,
            oracle,
            pass,
        });
    }
    let passed = rows.iter().all(|r| r.pass);
    Ok(SoundnessReport {
        scenario: scenario.name.clone(),
        samples,
        seed,
        rows,
        passed,
    })
}
