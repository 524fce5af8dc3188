//! Closed-form tail-bound calculators.
//!
//! All arithmetic happens in the log domain: the interesting bounds live at
//! e^{-40} scale and must not underflow through intermediate products. Every
//! calculator returns a [`BoundResult`] whose `value` is clamped to [0, 1]
//! while `log_value` keeps the exponent for comparisons.

use crate::model::{
    BoundMethod, BoundResult, BoundedSumSpec, Direction, MartingaleDifferenceSpec, MomentProfile,
    TailQuery, ThresholdKind,
};

/// Why a bound could not be computed from the given inputs.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BoundError {
    #[error("threshold must be > 0 (got {0})")]
    NonPositiveThreshold(f64),
    #[error("threshold must be >= 0 (got {0})")]
    NegativeThreshold(f64),
    #[error("threshold must be finite (got {0})")]
    NonFiniteThreshold(f64),
    #[error("requires the nonnegative flag on the profile")]
    RequiresNonnegative,
    #[error("requires a finite support_hi on the profile")]
    MissingSupportHi,
    #[error("requires a variance on the profile")]
    MissingVariance,
    #[error("level {a} must be < support_hi {hi}")]
    LevelAboveSupport { a: f64, hi: f64 },
    #[error("mean {mean} must lie in [{lo}, {hi}]")]
    MeanOutsideRange { mean: f64, lo: f64, hi: f64 },
    #[error("mean of a nonnegative variable must be finite and >= 0 (got {0})")]
    InvalidNonnegativeMean(f64),
    #[error("mean {mean} must not exceed support_hi {hi}")]
    MeanAboveSupport { mean: f64, hi: f64 },
    #[error("variance must be finite and >= 0 (got {0})")]
    InvalidVariance(f64),
    #[error("{0} must be > 0 (got {1})")]
    NonPositiveParameter(&'static str, f64),
    #[error("delta must lie in (0, 1] (got {0})")]
    DeltaOutOfRange(f64),
    #[error("alpha must lie in (0, 1) (got {0})")]
    AlphaOutOfRange(f64),
    #[error("all ranges are degenerate: sum of squared widths is zero")]
    ZeroSquaredWidths,
    #[error("difference bounds are empty or all zero")]
    ZeroDifferences,
    #[error("crescent functions require u >= 0 (got {0})")]
    NegativeCrescentArg(f64),
    #[error("threshold kind {0} is not supported by this bound")]
    UnsupportedThresholdKind(ThresholdKind),
    #[error("MGF evaluation was not finite at t = {t} (got {value})")]
    NonFiniteMgf { t: f64, value: f64 },
    #[error("MGF t-domain upper end must be > 0 (got {0})")]
    EmptyMgfDomain(f64),
}

fn check_threshold(t: f64) -> Result<f64, BoundError> {
    if !t.is_finite() {
        Err(BoundError::NonFiniteThreshold(t))
    } else if t < 0.0 {
        Err(BoundError::NegativeThreshold(t))
    } else {
        Ok(t)
    }
}

/// Doubles a one-sided log bound when the query is two-sided.
fn apply_direction(raw_log: f64, direction: Direction) -> f64 {
    match direction {
        Direction::Upper | Direction::Lower => raw_log,
        Direction::TwoSided => std::f64::consts::LN_2 + raw_log,
    }
}

/// Markov: Pr(X ≥ a) ≤ E(X)/a for nonnegative X and a > 0.
pub fn markov(profile: &MomentProfile, a: f64) -> Result<BoundResult, BoundError> {
    if !profile.nonnegative {
        return Err(BoundError::RequiresNonnegative);
    }
    if !(profile.mean >= 0.0) || !profile.mean.is_finite() {
        return Err(BoundError::InvalidNonnegativeMean(profile.mean));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(BoundError::NonPositiveThreshold(a));
    }
    Ok(BoundResult::from_raw(BoundMethod::Markov, profile.mean / a))
}

/// Reverse Markov: Pr(X ≤ a) ≤ (U − E(X))/(U − a) when X ≤ U almost surely
/// and a < U. X need not be nonnegative.
pub fn reverse_markov(profile: &MomentProfile, a: f64) -> Result<BoundResult, BoundError> {
    let hi = profile.support_hi.ok_or(BoundError::MissingSupportHi)?;
    if !hi.is_finite() {
        return Err(BoundError::MissingSupportHi);
    }
    if !(profile.mean <= hi) {
        return Err(BoundError::MeanAboveSupport {
            mean: profile.mean,
            hi,
        });
    }
    if !(a < hi) {
        return Err(BoundError::LevelAboveSupport { a, hi });
    }
    Ok(BoundResult::from_raw(
        BoundMethod::ReverseMarkov,
        (hi - profile.mean) / (hi - a),
    ))
}

/// Chebyshev: Pr(|X − E(X)| ≥ a) ≤ Var(X)/a² for a > 0.
///
/// With `symmetric` set, returns half the (clamped) two-sided value, the
/// one-sided bound for distributions symmetric about their mean.
pub fn chebyshev(
    profile: &MomentProfile,
    a: f64,
    symmetric: bool,
) -> Result<BoundResult, BoundError> {
    let var = profile.variance.ok_or(BoundError::MissingVariance)?;
    if !(var >= 0.0) || !var.is_finite() {
        return Err(BoundError::InvalidVariance(var));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(BoundError::NonPositiveThreshold(a));
    }
    let raw = var / (a * a);
    if symmetric {
        let halved = BoundResult::from_raw(BoundMethod::ChebyshevSymmetric, raw.min(1.0) / 2.0);
        Ok(BoundResult {
            clamped: raw > 1.0,
            ..halved
        })
    } else {
        Ok(BoundResult::from_raw(BoundMethod::Chebyshev, raw))
    }
}

/// Multiplicative Chernoff bound for a sum of independent Bernoulli
/// variables with E(X) = np, at level a = (1+δ)np:
///
/// ```text
/// Pr[X ≥ (1+δ)np] ≤ [e^δ / (1+δ)^(1+δ)]^(np)
/// ```
///
/// computed as exp(np·(δ − (1+δ)ln(1+δ))). The optimal exponent parameter
/// t = ln(1+δ) is reported as `optimal_param`.
pub fn chernoff_bernoulli(np: f64, delta: f64) -> Result<BoundResult, BoundError> {
    if !(np > 0.0) || !np.is_finite() {
        return Err(BoundError::NonPositiveParameter("np", np));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(BoundError::NonPositiveParameter("delta", delta));
    }
    let t_star = delta.ln_1p();
    let raw_log = np * (delta - (1.0 + delta) * t_star);
    Ok(BoundResult::from_log(BoundMethod::ChernoffBernoulli, raw_log).with_param(t_star))
}

/// Two-sided Chernoff form for a binomial-type mean μ and relative deviation
/// δ ∈ (0, 1]:
///
/// ```text
/// Pr[|X − μ| ≥ δμ] ≤ 2·exp(−μδ²/3)
/// ```
///
/// This closed form is used as given (it is a standard corollary; its
/// derivation is not part of this crate).
pub fn chernoff_binomial_two_sided(mu: f64, delta: f64) -> Result<BoundResult, BoundError> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(BoundError::NonPositiveParameter("mu", mu));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(BoundError::DeltaOutOfRange(delta));
    }
    let raw_log = std::f64::consts::LN_2 - mu * delta * delta / 3.0;
    Ok(BoundResult::from_log(
        BoundMethod::ChernoffBinomialTwoSided,
        raw_log,
    ))
}

/// Sub-Gaussian MGF bound from the bounded-support lemma: for any X with
/// E(X) = mean and lo ≤ X ≤ hi almost surely,
///
/// ```text
/// E(e^(λX)) ≤ exp(λ·mean + λ²(hi − lo)²/8)    for all real λ.
/// ```
///
/// Returns the right-hand side (an MGF bound, not a probability).
pub fn hoeffding_lemma_bound(lambda: f64, mean: f64, lo: f64, hi: f64) -> Result<f64, BoundError> {
    if !lambda.is_finite() {
        return Err(BoundError::NonFiniteThreshold(lambda));
    }
    if !(lo <= mean && mean <= hi) {
        return Err(BoundError::MeanOutsideRange { mean, lo, hi });
    }
    let width = hi - lo;
    Ok((lambda * mean + lambda * lambda * width * width / 8.0).exp())
}

fn sum_deviation(spec_n: usize, query: &TailQuery) -> Result<f64, BoundError> {
    let t = check_threshold(query.threshold)?;
    match query.threshold_kind {
        ThresholdKind::SumDeviation => Ok(t),
        ThresholdKind::MeanDeviation => Ok(t * spec_n as f64),
        ThresholdKind::AbsoluteLevel => Err(BoundError::UnsupportedThresholdKind(
            ThresholdKind::AbsoluteLevel,
        )),
    }
}

/// Hoeffding: for independent X_i ∈ [a_i, b_i],
///
/// ```text
/// Pr[S − E(S) ≥ t] ≤ exp(−2t² / Σ(b_i − a_i)²)
/// ```
///
/// Two-sided queries double the bound (clamped); mean-deviation thresholds ε
/// convert via t = n·ε, which recovers the exp(−2t²n²/Σ(b_i−a_i)²) shape of
/// the mean-scale statement.
pub fn hoeffding_tail(spec: &BoundedSumSpec, query: &TailQuery) -> Result<BoundResult, BoundError> {
    let denom = spec.sum_sq_widths();
    if !(denom > 0.0) {
        return Err(BoundError::ZeroSquaredWidths);
    }
    let t = sum_deviation(spec.n(), query)?;
    let raw_log = apply_direction(-2.0 * t * t / denom, query.direction);
    Ok(BoundResult::from_log(BoundMethod::Hoeffding, raw_log))
}

/// Smallest n with n ≥ ln(2/α)/(2t²): the sample count that makes the
/// two-sided bound 2·exp(−2nt²) at most α for variables on unit ranges.
pub fn hoeffding_sample_size(alpha: f64, half_width: f64) -> Result<u64, BoundError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(BoundError::AlphaOutOfRange(alpha));
    }
    if !(half_width > 0.0) || !half_width.is_finite() {
        return Err(BoundError::NonPositiveParameter("half_width", half_width));
    }
    let raw = (2.0 / alpha).ln() / (2.0 * half_width * half_width);
    Ok(raw.ceil() as u64)
}

/// The two-sided level α' = 2·exp(−2nt²) achieved by n samples at
/// half-width t. Companion to [`hoeffding_sample_size`].
pub fn hoeffding_achieved_alpha(n: u64, half_width: f64) -> f64 {
    (std::f64::consts::LN_2 - 2.0 * n as f64 * half_width * half_width)
        .exp()
        .min(1.0)
}

/// Azuma: for a martingale with |Z_i − Z_{i−1}| ≤ c_i,
///
/// ```text
/// Pr[Z_n − Z_0 ≥ t] ≤ exp(−t² / (2Σc_i²))
/// ```
///
/// and the same bound for the lower tail; two-sided doubles.
pub fn azuma(
    spec: &MartingaleDifferenceSpec,
    t: f64,
    direction: Direction,
) -> Result<BoundResult, BoundError> {
    let denom = spec.sum_sq();
    if spec.c.is_empty() || !(denom > 0.0) {
        return Err(BoundError::ZeroDifferences);
    }
    let t = check_threshold(t)?;
    let raw_log = apply_direction(-t * t / (2.0 * denom), direction);
    Ok(BoundResult::from_log(BoundMethod::Azuma, raw_log))
}

/// Bennett, generic form: for independent X_i with per-variable variance
/// averaging v and centered one-sided range at most s,
///
/// ```text
/// Pr[(1/n)Σ(X_i − E(X_i)) ≥ t] ≤ exp(−(nv/s²)·h(ts/v))
/// ```
///
/// where h is the crescent function [`h_crescent`]. The standard statement
/// (|X_i| ≤ 1, zero mean, sum deviation) is the s = 1 case: the two
/// parameterizations coincide as exp(−nσ²·h(t_sum/(nσ²))).
pub fn bennett(n: usize, v: f64, s: f64, query: &TailQuery) -> Result<BoundResult, BoundError> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(BoundError::NonPositiveParameter("v", v));
    }
    if !(s > 0.0) || !s.is_finite() {
        return Err(BoundError::NonPositiveParameter("s", s));
    }
    let t = check_threshold(query.threshold)?;
    let t_mean = match query.threshold_kind {
        ThresholdKind::MeanDeviation => t,
        ThresholdKind::SumDeviation => t / n as f64,
        ThresholdKind::AbsoluteLevel => {
            return Err(BoundError::UnsupportedThresholdKind(
                ThresholdKind::AbsoluteLevel,
            ))
        }
    };
    let raw_log = apply_direction(
        -(n as f64 * v / (s * s)) * h_raw(t_mean * s / v),
        query.direction,
    );
    Ok(BoundResult::from_log(BoundMethod::Bennett, raw_log))
}

/// Bernstein: with σ² the mean of the per-variable variances,
///
/// ```text
/// mean form:  Pr[(1/n)ΣX_i − E ≥ ε] ≤ exp(−nε² / (2σ² + 2ε/3))
/// sum form:   Pr[ΣX_i − E[Σ] ≥ t]   ≤ exp(−t² / (2(nσ² + t/3)))
/// ```
///
/// The two coincide under t = nε.
pub fn bernstein(n: usize, sigma2: f64, query: &TailQuery) -> Result<BoundResult, BoundError> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(BoundError::NonPositiveParameter("sigma2", sigma2));
    }
    let t = check_threshold(query.threshold)?;
    let nf = n as f64;
    let exponent = match query.threshold_kind {
        ThresholdKind::MeanDeviation => -nf * t * t / (2.0 * sigma2 + 2.0 * t / 3.0),
        ThresholdKind::SumDeviation => -t * t / (2.0 * (nf * sigma2 + t / 3.0)),
        ThresholdKind::AbsoluteLevel => {
            return Err(BoundError::UnsupportedThresholdKind(
                ThresholdKind::AbsoluteLevel,
            ))
        }
    };
    let raw_log = apply_direction(exponent, query.direction);
    Ok(BoundResult::from_log(BoundMethod::Bernstein, raw_log))
}

/// McDiarmid: for f with bounded differences c_i,
///
/// ```text
/// Pr[f − E[f] ≥ ε] ≤ exp(−2ε² / Σc_i²)
/// ```
///
/// two-sided doubles (clamped).
pub fn mcdiarmid(
    spec: &MartingaleDifferenceSpec,
    epsilon: f64,
    direction: Direction,
) -> Result<BoundResult, BoundError> {
    let denom = spec.sum_sq();
    if spec.c.is_empty() || !(denom > 0.0) {
        return Err(BoundError::ZeroDifferences);
    }
    let eps = check_threshold(epsilon)?;
    let raw_log = apply_direction(-2.0 * eps * eps / denom, direction);
    Ok(BoundResult::from_log(BoundMethod::Mcdiarmid, raw_log))
}

fn h_raw(u: f64) -> f64 {
    (1.0 + u) * u.ln_1p() - u
}

/// Crescent function h(u) = (1+u)ln(1+u) − u, the exponent shape of
/// Bennett's inequality. Defined for u ≥ 0.
pub fn h_crescent(u: f64) -> Result<f64, BoundError> {
    if !(u >= 0.0) {
        return Err(BoundError::NegativeCrescentArg(u));
    }
    Ok(h_raw(u))
}

/// Lower envelope G(u) = (3/2)·u²/(u+3) with h(u) ≥ G(u) for all u ≥ 0;
/// substituting G for h in Bennett's exponent yields Bernstein's bound.
pub fn g_lower(u: f64) -> Result<f64, BoundError> {
    if !(u >= 0.0) {
        return Err(BoundError::NegativeCrescentArg(u));
    }
    Ok(1.5 * u * u / (u + 3.0))
}
