//! Concentration-inequality engine.
//!
//! Computes classic tail bounds (Markov, reverse Markov, Chebyshev, Chernoff,
//! Hoeffding, Azuma, Bennett, Bernstein, McDiarmid) from scenario
//! descriptions, optimizes generic Chernoff exponents numerically, and
//! verifies every bound's soundness against exact binomial enumeration and
//! seeded Monte Carlo oracles.
//!
//! Organization:
//!
//! - [`model`] — shared vocabulary: moment profiles, bounded-sum and
//!   difference specs, tail queries, bound results, validation.
//! - [`bounds`] — closed-form calculators, all in the log domain.
//! - [`chernoff`] — the 1-D exponent optimizer over a caller-supplied
//!   log-MGF.
//! - [`oracle`] — exact binomial tails, reproducible Monte Carlo tail
//!   estimation (Wilson 99% intervals), and variance-decomposition
//!   estimation. With the default `parallel` feature the samplers fan out
//!   over rayon; results are bit-identical for any worker count.
//! - [`scenarios`] — the builtin catalog of worked examples, scenario-file
//!   ingestion, the bound-comparison engine, and soundness checking.
//!
//! ```
//! use tailbound::{builtin, compare_bounds, soundness_check, BoundMethod};
//!
//! // Every applicable bound for the 100-coin example, tightest first.
//! let coin = builtin("coin").unwrap();
//! let table = compare_bounds(&coin).unwrap();
//! assert_eq!(table.rows[0].method, BoundMethod::ChebyshevSymmetric);
//! assert!(table.rows.windows(2).all(|w| w[0].value <= w[1].value));
//!
//! // Each bound dominates the exact binomial probability of its event.
//! let report = soundness_check(&coin, 10_000, 42).unwrap();
//! assert!(report.passed);
//! ```

// Guards are written `!(x > 0.0)` rather than `x <= 0.0` so that NaN inputs
// fail them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod chernoff;
pub mod model;
pub mod oracle;
pub mod scenarios;

pub use bounds::BoundError;
pub use chernoff::{chernoff_optimize, MgfHandle};
pub use model::{
    BoundMethod, BoundResult, BoundedSumSpec, Direction, MartingaleDifferenceSpec, MomentProfile,
    TailQuery, ThresholdKind, Validate, ValidationReport, VarRange,
};
pub use oracle::{
    efron_stein_estimate, exact_binomial_tail, mc_tail_estimate, EfronSteinEstimate, EsMode,
    OracleError, SamplerSpec, TailEstimate,
};
pub use scenarios::{
    builtin, builtin_catalog, compare_bounds, load_scenario, scenario_to_json, soundness_check,
    ComparisonTable, Expected, OracleConfig, OracleValue, Scenario, ScenarioData, ScenarioError,
    SoundnessReport,
};
