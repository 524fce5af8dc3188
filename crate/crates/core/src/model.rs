//! Shared vocabulary between bounds, oracles, and scenarios: summary
//! statistics of random variables, tail queries, and bound results.
//!
//! Every type here is an immutable value after construction and is safe to
//! share across threads. Construction does not validate; call
//! [`Validate::validate`] to get either the instance back or a report listing
//! every violated invariant.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Summary of one random variable: mean, optional variance, optional support
/// bounds, and a nonnegativity flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentProfile {
    /// E(X).
    pub mean: f64,
    /// Var(X), if known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance: Option<f64>,
    /// Lower support bound a, if known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_lo: Option<f64>,
    /// Upper support bound b (the "U" of the reverse Markov bound), if known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_hi: Option<f64>,
    /// X ≥ 0 almost surely.
    #[serde(default)]
    pub nonnegative: bool,
}

impl MomentProfile {
    /// Profile with a mean only.
    pub fn with_mean(mean: f64) -> Self {
        MomentProfile {
            mean,
            variance: None,
            support_lo: None,
            support_hi: None,
            nonnegative: false,
        }
    }

    pub fn nonnegative(mut self) -> Self {
        self.nonnegative = true;
        self
    }

    pub fn variance(mut self, variance: f64) -> Self {
        self.variance = Some(variance);
        self
    }

    pub fn support(mut self, lo: f64, hi: f64) -> Self {
        self.support_lo = Some(lo);
        self.support_hi = Some(hi);
        self
    }

    pub fn support_hi(mut self, hi: f64) -> Self {
        self.support_hi = Some(hi);
        self
    }
}

/// One variable of a bounded-sum specification: range `[lo, hi]` plus
/// optional mean and variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarRange {
    pub lo: f64,
    pub hi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance: Option<f64>,
}

impl VarRange {
    pub fn new(lo: f64, hi: f64) -> Self {
        VarRange {
            lo,
            hi,
            mean: None,
            variance: None,
        }
    }

    pub fn with_moments(lo: f64, hi: f64, mean: f64, variance: f64) -> Self {
        VarRange {
            lo,
            hi,
            mean: Some(mean),
            variance: Some(variance),
        }
    }

    /// Range width hi − lo.
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Sum of independent bounded variables, one [`VarRange`] per summand.
///
/// Per-variable means may be heterogeneous; the Hoeffding argument only needs
/// each centered variable to have zero mean. Degenerate ranges (lo == hi) are
/// legal and contribute zero to squared-range denominators; a spec where
/// *every* range is degenerate makes those denominators zero and is rejected
/// by the bounds that divide by them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedSumSpec {
    pub vars: Vec<VarRange>,
}

impl BoundedSumSpec {
    pub fn new(vars: Vec<VarRange>) -> Self {
        BoundedSumSpec { vars }
    }

    /// n identical copies of one range.
    pub fn homogeneous(n: usize, var: VarRange) -> Self {
        BoundedSumSpec { vars: vec![var; n] }
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    /// Σ (hi_i − lo_i)².
    pub fn sum_sq_widths(&self) -> f64 {
        self.vars.iter().map(|v| v.width() * v.width()).sum()
    }

    /// Σ mean_i, if every variable has one.
    pub fn total_mean(&self) -> Option<f64> {
        self.vars.iter().map(|v| v.mean).sum()
    }

    /// Σ variance_i, if every variable has one.
    pub fn total_variance(&self) -> Option<f64> {
        self.vars.iter().map(|v| v.variance).sum()
    }

    /// (1/n) Σ variance_i, if every variable has one.
    pub fn mean_variance(&self) -> Option<f64> {
        self.total_variance().map(|t| t / self.n() as f64)
    }
}

/// Per-step difference bounds c_i for martingale / bounded-difference
/// arguments: |Z_i − Z_{i−1}| ≤ c_i, or |f(..x_i..) − f(..x_i'..)| ≤ c_i.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleDifferenceSpec {
    pub c: Vec<f64>,
}

impl MartingaleDifferenceSpec {
    pub fn new(c: Vec<f64>) -> Self {
        MartingaleDifferenceSpec { c }
    }

    /// n steps, all with the same bound c.
    pub fn uniform(n: usize, c: f64) -> Self {
        MartingaleDifferenceSpec { c: vec![c; n] }
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    /// Σ c_i².
    pub fn sum_sq(&self) -> f64 {
        self.c.iter().map(|c| c * c).sum()
    }
}

/// Which tail is being bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Pr(X ≥ ...).
    Upper,
    /// Pr(X ≤ ...).
    Lower,
    /// Pr(|X − E(X)| ≥ ...).
    TwoSided,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Upper => "upper",
            Direction::Lower => "lower",
            Direction::TwoSided => "two-sided",
        })
    }
}

/// How the threshold is expressed.
///
/// The distinction is explicit rather than inferred because the inequalities
/// switch silently between sum-scale deviations (Hoeffding, Bernstein sum
/// form) and mean-scale deviations (Bennett generic form, Bernstein mean
/// form).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdKind {
    /// X ≥ a (or ≤ a): the threshold is a plain level.
    AbsoluteLevel,
    /// S − E(S) ≥ t: deviation of the sum (or of the variable itself).
    SumDeviation,
    /// (1/n)Σ(X_i − E(X_i)) ≥ ε: deviation of the mean.
    MeanDeviation,
}

impl fmt::Display for ThresholdKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdKind::AbsoluteLevel => "absolute-level",
            ThresholdKind::SumDeviation => "sum-deviation",
            ThresholdKind::MeanDeviation => "mean-deviation",
        })
    }
}

/// What is being bounded: direction, threshold kind, threshold value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailQuery {
    pub direction: Direction,
    pub threshold_kind: ThresholdKind,
    pub threshold: f64,
}

impl TailQuery {
    pub fn new(direction: Direction, threshold_kind: ThresholdKind, threshold: f64) -> Self {
        TailQuery {
            direction,
            threshold_kind,
            threshold,
        }
    }

    pub fn upper_level(a: f64) -> Self {
        TailQuery::new(Direction::Upper, ThresholdKind::AbsoluteLevel, a)
    }

    pub fn lower_level(a: f64) -> Self {
        TailQuery::new(Direction::Lower, ThresholdKind::AbsoluteLevel, a)
    }

    pub fn sum_deviation(direction: Direction, t: f64) -> Self {
        TailQuery::new(direction, ThresholdKind::SumDeviation, t)
    }

    pub fn mean_deviation(direction: Direction, eps: f64) -> Self {
        TailQuery::new(direction, ThresholdKind::MeanDeviation, eps)
    }
}

/// Identifier of a bound method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMethod {
    Markov,
    ReverseMarkov,
    Chebyshev,
    ChebyshevSymmetric,
    ChernoffOptimized,
    ChernoffBernoulli,
    ChernoffBinomialTwoSided,
    Hoeffding,
    Azuma,
    Bennett,
    Bernstein,
    Mcdiarmid,
}

impl BoundMethod {
    pub const ALL: [BoundMethod; 12] = [
        BoundMethod::Markov,
        BoundMethod::ReverseMarkov,
        BoundMethod::Chebyshev,
        BoundMethod::ChebyshevSymmetric,
        BoundMethod::ChernoffOptimized,
        BoundMethod::ChernoffBernoulli,
        BoundMethod::ChernoffBinomialTwoSided,
        BoundMethod::Hoeffding,
        BoundMethod::Azuma,
        BoundMethod::Bennett,
        BoundMethod::Bernstein,
        BoundMethod::Mcdiarmid,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundMethod::Markov => "markov",
            BoundMethod::ReverseMarkov => "reverse-markov",
            BoundMethod::Chebyshev => "chebyshev",
            BoundMethod::ChebyshevSymmetric => "chebyshev-symmetric",
            BoundMethod::ChernoffOptimized => "chernoff-optimized",
            BoundMethod::ChernoffBernoulli => "chernoff-bernoulli",
            BoundMethod::ChernoffBinomialTwoSided => "chernoff-binomial-two-sided",
            BoundMethod::Hoeffding => "hoeffding",
            BoundMethod::Azuma => "azuma",
            BoundMethod::Bennett => "bennett",
            BoundMethod::Bernstein => "bernstein",
            BoundMethod::Mcdiarmid => "mcdiarmid",
        }
    }
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BoundMethod {
    type Err = UnknownMethod;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BoundMethod::ALL
            .iter()
            .copied()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| UnknownMethod(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown bound method `{0}`")]
pub struct UnknownMethod(pub String);

/// Result of one bound evaluation.
///
/// `value` is always clamped to [0, 1]; `log_value` keeps the (clamped)
/// natural-log bound so e^{-40}-scale results stay comparable, and `clamped`
/// records that the raw bound exceeded 1 before clamping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub method: BoundMethod,
    /// min(1, exp(raw log bound)).
    pub value: f64,
    /// min(0, raw log bound).
    pub log_value: f64,
    /// Raw bound exceeded 1 before clamping.
    pub clamped: bool,
    /// The minimizing free parameter (t*, s*, λ*) where one was optimized.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimal_param: Option<f64>,
}

impl BoundResult {
    /// Build from a raw natural-log bound, clamping to a probability.
    pub fn from_log(method: BoundMethod, raw_log: f64) -> Self {
        let clamped = raw_log > 0.0;
        BoundResult {
            method,
            value: if clamped { 1.0 } else { raw_log.exp() },
            log_value: if clamped { 0.0 } else { raw_log },
            clamped,
            optimal_param: None,
        }
    }

    /// Build from a raw linear-domain bound. For single-ratio bounds the
    /// direct quotient is exact where a log/exp round trip is not; the log
    /// is derived from it.
    pub fn from_raw(method: BoundMethod, raw: f64) -> Self {
        let clamped = raw > 1.0;
        let value = if clamped { 1.0 } else { raw };
        BoundResult {
            method,
            value,
            log_value: value.ln().min(0.0),
            clamped,
            optimal_param: None,
        }
    }

    pub fn with_param(mut self, param: f64) -> Self {
        self.optimal_param = Some(param);
        self
    }
}

/// One violated invariant: the field at fault and the rule it broke.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl Violation {
    fn new(field: &str, rule: impl Into<String>) -> Self {
        Violation {
            field: field.to_string(),
            rule: rule.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

/// Non-empty list of violated invariants.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} invariant violation(s): ", self.violations.len())?;
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Validation is total: every instance either validates or yields a
/// non-empty violation report; there is no third outcome.
pub trait Validate {
    fn validate(&self) -> Result<(), ValidationReport>;
}

fn finish(violations: Vec<Violation>) -> Result<(), ValidationReport> {
    if violations.is_empty() {
        Ok(())
    } else {
        Err(ValidationReport { violations })
    }
}

fn check_finite(violations: &mut Vec<Violation>, field: &str, x: f64) {
    if !x.is_finite() {
        violations.push(Violation::new(field, "must be finite"));
    }
}

impl Validate for MomentProfile {
    fn validate(&self) -> Result<(), ValidationReport> {
        let mut v = Vec::new();
        check_finite(&mut v, "mean", self.mean);
        if let Some(var) = self.variance {
            check_finite(&mut v, "variance", var);
            if var < 0.0 {
                v.push(Violation::new("variance", "must be >= 0"));
            }
        }
        if let Some(lo) = self.support_lo {
            check_finite(&mut v, "support_lo", lo);
            if lo > self.mean {
                v.push(Violation::new(
                    "support_lo",
                    format!("support_lo ({lo}) must be <= mean ({})", self.mean),
                ));
            }
        }
        if let Some(hi) = self.support_hi {
            check_finite(&mut v, "support_hi", hi);
            if self.mean > hi {
                v.push(Violation::new(
                    "mean",
                    format!("mean ({}) must be <= support_hi ({hi})", self.mean),
                ));
            }
        }
        if let (Some(lo), Some(hi)) = (self.support_lo, self.support_hi) {
            if lo > hi {
                v.push(Violation::new(
                    "support_lo",
                    "support_lo must be <= support_hi",
                ));
            }
            if let Some(var) = self.variance {
                let cap = (hi - lo) * (hi - lo) / 4.0;
                if var > cap {
                    v.push(Violation::new(
                        "variance",
                        format!("variance ({var}) exceeds (support_hi - support_lo)^2/4 = {cap}"),
                    ));
                }
            }
        }
        if self.nonnegative {
            if let Some(lo) = self.support_lo {
                if lo < 0.0 {
                    v.push(Violation::new(
                        "support_lo",
                        "nonnegative flag requires support_lo >= 0",
                    ));
                }
            }
        }
        finish(v)
    }
}

impl Validate for BoundedSumSpec {
    fn validate(&self) -> Result<(), ValidationReport> {
        let mut v = Vec::new();
        if self.vars.is_empty() {
            v.push(Violation::new("vars", "must contain at least one variable"));
        }
        for (i, r) in self.vars.iter().enumerate() {
            let field = |name: &str| format!("vars[{i}].{name}");
            check_finite(&mut v, &field("lo"), r.lo);
            check_finite(&mut v, &field("hi"), r.hi);
            if r.lo > r.hi {
                v.push(Violation::new(&field("lo"), "lo must be <= hi"));
            }
            if let Some(m) = r.mean {
                check_finite(&mut v, &field("mean"), m);
                if m < r.lo || m > r.hi {
                    v.push(Violation::new(
                        &field("mean"),
                        format!("mean ({m}) must lie in [{}, {}]", r.lo, r.hi),
                    ));
                }
            }
            if let Some(s2) = r.variance {
                check_finite(&mut v, &field("variance"), s2);
                if s2 < 0.0 {
                    v.push(Violation::new(&field("variance"), "must be >= 0"));
                }
            }
        }
        finish(v)
    }
}

impl Validate for MartingaleDifferenceSpec {
    fn validate(&self) -> Result<(), ValidationReport> {
        let mut v = Vec::new();
        if self.c.is_empty() {
            v.push(Violation::new("c", "must contain at least one step bound"));
        }
        for (i, c) in self.c.iter().enumerate() {
            let field = format!("c[{i}]");
            check_finite(&mut v, &field, *c);
            if *c <= 0.0 {
                v.push(Violation::new(&field, "must be > 0"));
            }
        }
        finish(v)
    }
}

impl Validate for TailQuery {
    fn validate(&self) -> Result<(), ValidationReport> {
        let mut v = Vec::new();
        check_finite(&mut v, "threshold", self.threshold);
        finish(v)
    }
}

impl Validate for BoundResult {
    fn validate(&self) -> Result<(), ValidationReport> {
        let mut v = Vec::new();
        if !(0.0..=1.0).contains(&self.value) {
            v.push(Violation::new("value", "must lie in [0, 1]"));
        }
        if self.log_value > 0.0 {
            v.push(Violation::new("log_value", "must be <= 0 after clamping"));
        }
        if let Some(p) = self.optimal_param {
            if !(p > 0.0) {
                v.push(Violation::new("optimal_param", "must be > 0 when present"));
            }
        }
        finish(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_profile_is_valid() {
        let p = MomentProfile::with_mean(100.0).nonnegative();
        assert!(p.validate().is_ok());
    }

    #[test]
    fn mean_above_support_is_reported() {
        let p = MomentProfile::with_mean(5.0).support(0.0, 3.0);
        let report = p.validate().unwrap_err();
        assert!(report.violations.iter().any(|v| v.field == "mean"));
        assert!(!report.violations.is_empty());
    }

    #[test]
    fn portfolio_spec_is_valid() {
        let spec = BoundedSumSpec::new(vec![
            VarRange::with_moments(25.0, 65.0, 50.0, 625.0),
            VarRange::with_moments(60.0, 80.0, 70.0, 400.0),
        ]);
        assert!(spec.validate().is_ok());
        assert_eq!(spec.n(), 2);
        assert_eq!(spec.total_mean(), Some(120.0));
        assert_eq!(spec.sum_sq_widths(), 2000.0);
    }

    #[test]
    fn variance_cap_applies_to_profiles_only() {
        // Bounded in [0, 1] with variance above 1/4: impossible.
        let p = MomentProfile::with_mean(0.5)
            .support(0.0, 1.0)
            .variance(0.3);
        assert!(p.validate().is_err());
        // The sum spec has no such invariant (per-variable moments are taken
        // as given, even when jointly infeasible).
        let s = BoundedSumSpec::new(vec![VarRange::with_moments(0.0, 1.0, 0.5, 0.3)]);
        assert!(s.validate().is_ok());
    }

    #[test]
    fn empty_specs_are_rejected() {
        assert!(BoundedSumSpec::new(vec![]).validate().is_err());
        assert!(MartingaleDifferenceSpec::new(vec![]).validate().is_err());
    }

    #[test]
    fn zero_step_bound_is_rejected() {
        let m = MartingaleDifferenceSpec::new(vec![1.0, 0.0, 2.0]);
        let report = m.validate().unwrap_err();
        assert_eq!(report.violations[0].field, "c[1]");
    }

    #[test]
    fn degenerate_range_is_legal() {
        let s = BoundedSumSpec::new(vec![VarRange::new(3.0, 3.0)]);
        assert!(s.validate().is_ok());
        assert_eq!(s.sum_sq_widths(), 0.0);
    }

    #[test]
    fn bound_result_clamps_to_one() {
        let r = BoundResult::from_log(BoundMethod::Markov, 0.5);
        assert_eq!(r.value, 1.0);
        assert_eq!(r.log_value, 0.0);
        assert!(r.clamped);
        let r = BoundResult::from_log(BoundMethod::Markov, -1.0);
        assert!((r.value - (-1.0f64).exp()).abs() < 1e-15);
        assert!(!r.clamped);
        assert!(r.validate().is_ok());
    }

    #[test]
    fn method_names_round_trip() {
        for m in BoundMethod::ALL {
            assert_eq!(m.as_str().parse::<BoundMethod>().unwrap(), m);
        }
        assert!("nope".parse::<BoundMethod>().is_err());
    }
}
