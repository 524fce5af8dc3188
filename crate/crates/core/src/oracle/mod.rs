//! Independent ground truth for the bounds: exact enumeration and seeded
//! Monte Carlo estimation of the tail probabilities (and variances) the
//! inequalities are supposed to dominate.
//!
//! Determinism contract: identical (sampler, query, samples, seed) yields a
//! bit-identical estimate regardless of the degree of parallelism. See
//! [`rng`] for the chunked seeding rule that makes this hold.

mod efron_stein;
mod exact;
pub mod rng;
mod wilson;

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Direction, TailQuery, ThresholdKind};

type AggregateFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

pub use efron_stein::{efron_stein_estimate, EfronSteinEstimate, EsMode};
pub use exact::{exact_binomial_tail, exact_binomial_tail_at};
pub use rng::{chunk_rng, CHUNK_SAMPLES};
pub use wilson::{wilson_interval, Z_99};

/// Hard cap on Monte Carlo sample counts, to keep desk-scale runtimes under
/// a minute. Thresholds whose true probability is below ~1/samples come back
/// as "0 hits, Wilson upper limit" rather than being chased further.
pub const MAX_MC_SAMPLES: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("probability must lie in [0, 1] (got {0})")]
    InvalidProbability(f64),
    #[error("level k = {k} out of range for n = {n}")]
    LevelOutOfRange { k: u64, n: u64 },
    #[error("sample count must be >= 1")]
    NoSamples,
    #[error("sample count {0} exceeds the configured cap {MAX_MC_SAMPLES}")]
    SampleCapExceeded(u64),
    #[error("replicate counts must be >= 2 (outer = {outer}, inner = {inner})")]
    TooFewReplicates { outer: u64, inner: u64 },
    #[error("aggregate produced a non-finite value ({value}) at sample {index}")]
    NonFiniteAggregate { index: u64, value: f64 },
    #[error("sampler is invalid: {0}")]
    InvalidSampler(String),
    #[error("query needs E[Z], which is unavailable for this aggregate")]
    MeanUnavailable,
    #[error("mean-deviation thresholds are not defined for this aggregate")]
    MeanDeviationUnsupported,
    #[error("deviation threshold must be >= 0 (got {0})")]
    NegativeDeviation(f64),
    #[error("event level must be finite (got {0})")]
    NonFiniteLevel(f64),
}

/// Distribution of one independent draw.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Bernoulli { p: f64 },
    Uniform { lo: f64, hi: f64 },
    TwoPoint { x1: f64, p: f64, x2: f64 },
    Categorical { values: Vec<f64>, weights: Vec<f64> },
}

impl Distribution {
    pub fn mean(&self) -> f64 {
        match self {
            Distribution::Bernoulli { p } => *p,
            Distribution::Uniform { lo, hi } => 0.5 * (lo + hi),
            Distribution::TwoPoint { x1, p, x2 } => p * x1 + (1.0 - p) * x2,
            Distribution::Categorical { values, weights } => {
                values.iter().zip(weights).map(|(v, w)| v * w).sum()
            }
        }
    }

    fn validate(&self) -> Result<(), OracleError> {
        let bad = |msg: String| Err(OracleError::InvalidSampler(msg));
        match self {
            Distribution::Bernoulli { p } | Distribution::TwoPoint { p, .. } => {
                if !(0.0..=1.0).contains(p) {
                    return bad(format!("p = {p} outside [0, 1]"));
                }
            }
            Distribution::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return bad(format!("uniform range [{lo}, {hi}] is invalid"));
                }
            }
            Distribution::Categorical { values, weights } => {
                if values.is_empty() || values.len() != weights.len() {
                    return bad("categorical values/weights length mismatch".into());
                }
                if weights.iter().any(|w| !(*w >= 0.0)) {
                    return bad("categorical weights must be >= 0".into());
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return bad(format!("categorical weights sum to {total}, expected 1"));
                }
            }
        }
        Ok(())
    }
}

/// Pre-resolved sampling state (cumulative weights for categoricals).
enum CompiledDist {
    Bernoulli { p: f64 },
    Uniform { lo: f64, width: f64 },
    TwoPoint { x1: f64, p: f64, x2: f64 },
    Categorical { values: Vec<f64>, cum: Vec<f64> },
}

impl CompiledDist {
    fn new(dist: &Distribution) -> Self {
        match dist {
            Distribution::Bernoulli { p } => CompiledDist::Bernoulli { p: *p },
            Distribution::Uniform { lo, hi } => CompiledDist::Uniform {
                lo: *lo,
                width: hi - lo,
            },
            Distribution::TwoPoint { x1, p, x2 } => CompiledDist::TwoPoint {
                x1: *x1,
                p: *p,
                x2: *x2,
            },
            Distribution::Categorical { values, weights } => {
                let mut cum = Vec::with_capacity(weights.len());
                let mut acc = 0.0;
                for w in weights {
                    acc += w;
                    cum.push(acc);
                }
                CompiledDist::Categorical {
                    values: values.clone(),
                    cum,
                }
            }
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        let u: f64 = rng.random();
        match self {
            CompiledDist::Bernoulli { p } => {
                if u < *p {
                    1.0
                } else {
                    0.0
                }
            }
            CompiledDist::Uniform { lo, width } => lo + u * width,
            CompiledDist::TwoPoint { x1, p, x2 } => {
                if u < *p {
                    *x1
                } else {
                    *x2
                }
            }
            CompiledDist::Categorical { values, cum } => {
                let idx = cum.partition_point(|c| *c < u).min(values.len() - 1);
                values[idx]
            }
        }
    }
}

/// A named aggregate with declared bounded-difference constants, for
/// statistics with no closed-form aggregate like string-match counts or
/// density-estimation errors.
#[derive(Clone)]
pub struct CustomAggregate {
    pub name: String,
    pub diff_bounds: Vec<f64>,
    /// E(Z) when known analytically; deviation queries need it.
    pub known_mean: Option<f64>,
    func: AggregateFn,
}

impl CustomAggregate {
    pub fn new(
        name: impl Into<String>,
        func: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        diff_bounds: Vec<f64>,
        known_mean: Option<f64>,
    ) -> Self {
        CustomAggregate {
            name: name.into(),
            diff_bounds,
            known_mean,
            func: Arc::new(func),
        }
    }

    pub fn eval(&self, draws: &[f64]) -> f64 {
        (self.func)(draws)
    }
}

impl std::fmt::Debug for CustomAggregate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CustomAggregate")
            .field("name", &self.name)
            .field("known_mean", &self.known_mean)
            .finish_non_exhaustive()
    }
}

impl PartialEq for CustomAggregate {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.diff_bounds == other.diff_bounds
            && self.known_mean == other.known_mean
    }
}

/// How the independent copies are reduced to the statistic Z under study.
#[derive(Debug, Clone, PartialEq)]
pub enum Aggregate {
    Sum,
    Mean,
    Max,
    Custom(CustomAggregate),
}

impl Aggregate {
    fn eval(&self, draws: &[f64]) -> f64 {
        match self {
            Aggregate::Sum => draws.iter().sum(),
            Aggregate::Mean => draws.iter().sum::<f64>() / draws.len() as f64,
            Aggregate::Max => draws.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Aggregate::Custom(c) => c.eval(draws),
        }
    }
}

/// Description of the sampled statistic: a distribution, the number of
/// independent copies, and an aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerSpec {
    pub dist: Distribution,
    pub copies: usize,
    pub aggregate: Aggregate,
}

impl SamplerSpec {
    pub fn new(dist: Distribution, copies: usize, aggregate: Aggregate) -> Self {
        SamplerSpec {
            dist,
            copies,
            aggregate,
        }
    }

    /// E(Z) when derivable: linear aggregates get it from the distribution,
    /// customs from their declaration.
    pub fn aggregate_mean(&self) -> Option<f64> {
        match &self.aggregate {
            Aggregate::Sum => Some(self.copies as f64 * self.dist.mean()),
            Aggregate::Mean => Some(self.dist.mean()),
            Aggregate::Max => None,
            Aggregate::Custom(c) => c.known_mean,
        }
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        self.dist.validate()?;
        if self.copies == 0 {
            return Err(OracleError::InvalidSampler("copies must be >= 1".into()));
        }
        if let Aggregate::Custom(c) = &self.aggregate {
            if c.diff_bounds.len() != self.copies {
                return Err(OracleError::InvalidSampler(format!(
                    "custom aggregate `{}` declares {} difference bounds for {} copies",
                    c.name,
                    c.diff_bounds.len(),
                    self.copies
                )));
            }
        }
        Ok(())
    }
}

/// Empirical frequency of a tail event with a two-sided 99% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub point: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub samples: u64,
    pub seed: u64,
}

/// The event whose frequency is being estimated, in aggregate units.
#[derive(Debug, Clone, Copy, PartialEq)]
enum EventTest {
    GreaterEq(f64),
    LessEq(f64),
    AbsDevGe { center: f64, dev: f64 },
}

impl EventTest {
    fn hit(&self, z: f64) -> bool {
        match *self {
            EventTest::GreaterEq(a) => z >= a,
            EventTest::LessEq(a) => z <= a,
            EventTest::AbsDevGe { center, dev } => (z - center).abs() >= dev,
        }
    }
}

fn compile_event(spec: &SamplerSpec, query: &TailQuery) -> Result<EventTest, OracleError> {
    let center = || spec.aggregate_mean().ok_or(OracleError::MeanUnavailable);
    let dev_of = |t: f64| -> Result<f64, OracleError> {
        if t < 0.0 || !t.is_finite() {
            Err(OracleError::NegativeDeviation(t))
        } else {
            Ok(t)
        }
    };
    if query.threshold.is_nan() {
        return Err(OracleError::NonFiniteLevel(query.threshold));
    }
    match query.threshold_kind {
        ThresholdKind::AbsoluteLevel => match query.direction {
            Direction::Upper => Ok(EventTest::GreaterEq(query.threshold)),
            Direction::Lower => Ok(EventTest::LessEq(query.threshold)),
            Direction::TwoSided => {
                let c = center()?;
                Ok(EventTest::AbsDevGe {
                    center: c,
                    dev: (query.threshold - c).abs(),
                })
            }
        },
        ThresholdKind::SumDeviation | ThresholdKind::MeanDeviation => {
            let t = dev_of(query.threshold)?;
            let t = match query.threshold_kind {
                ThresholdKind::MeanDeviation => match spec.aggregate {
                    Aggregate::Sum => t * spec.copies as f64,
                    Aggregate::Mean => t,
                    _ => return Err(OracleError::MeanDeviationUnsupported),
                },
                _ => t,
            };
            let c = center()?;
            Ok(match query.direction {
                Direction::Upper => EventTest::GreaterEq(c + t),
                Direction::Lower => EventTest::LessEq(c - t),
                Direction::TwoSided => EventTest::AbsDevGe { center: c, dev: t },
            })
        }
    }
}

/// Estimate the probability of the queried tail event by seeded Monte Carlo.
///
/// Identical (sampler, query, samples, seed) yields a bit-identical estimate
/// regardless of worker count. Non-finite aggregate values abort with a
/// diagnostic naming the offending sample.
pub fn mc_tail_estimate(
    spec: &SamplerSpec,
    query: &TailQuery,
    samples: u64,
    seed: u64,
) -> Result<TailEstimate, OracleError> {
    if samples == 0 {
        return Err(OracleError::NoSamples);
    }
    if samples > MAX_MC_SAMPLES {
        return Err(OracleError::SampleCapExceeded(samples));
    }
    spec.validate()?;
    let event = compile_event(spec, query)?;
    let dist = CompiledDist::new(&spec.dist);
    let copies = spec.copies;

    let chunk_hits = rng::map_chunks(samples, |chunk, len| -> Result<u64, OracleError> {
        let mut rng = chunk_rng(seed, chunk);
        let mut buf = vec![0.0f64; copies];
        let mut hits = 0u64;
        for s in 0..len {
            for slot in buf.iter_mut() {
                *slot = dist.sample(&mut rng);
            }
            let z = spec.aggregate.eval(&buf);
            if !z.is_finite() {
                return Err(OracleError::NonFiniteAggregate {
                    index: chunk * CHUNK_SAMPLES + s,
                    value: z,
                });
            }
            if event.hit(z) {
                hits += 1;
            }
        }
        Ok(hits)
    })?;

    let hits: u64 = chunk_hits.iter().sum();
    let point = hits as f64 / samples as f64;
    let (ci_lo, ci_hi) = wilson_interval(hits, samples, Z_99);
    Ok(TailEstimate {
        point,
        ci_lo,
        ci_hi,
        samples,
        seed,
    })
}
