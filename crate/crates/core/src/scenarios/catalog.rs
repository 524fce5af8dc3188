//! The builtin scenario catalog: nine classic worked examples, each with its
//! pinned regression values, plus the named custom aggregates that
//! Monte Carlo oracles can reference from scenario files.

use std::f64::consts::LN_2;

use crate::model::{
    BoundMethod, BoundedSumSpec, Direction, MartingaleDifferenceSpec, MomentProfile, TailQuery,
    VarRange,
};
use crate::oracle::{Aggregate, CustomAggregate, Distribution, SamplerSpec};

use super::{Expected, OracleConfig, Scenario, ScenarioData};

fn exact(method: BoundMethod, value: f64) -> Expected {
    Expected {
        method,
        value,
        tolerance: 1e-9,
        relative: false,
    }
}

fn rounded(method: BoundMethod, value: f64, tolerance: f64) -> Expected {
    Expected {
        method,
        value,
        tolerance,
        relative: false,
    }
}

fn relative(method: BoundMethod, value: f64, tolerance: f64) -> Expected {
    Expected {
        method,
        value,
        tolerance,
        relative: true,
    }
}

/// Population weight, mean 100 pounds: chance a random person weighs at
/// least 200.
fn weight() -> Scenario {
    Scenario {
        name: "weight".into(),
        data: ScenarioData::Moment(MomentProfile::with_mean(100.0).nonnegative()),
        query: TailQuery::upper_level(200.0),
        applicable: vec![BoundMethod::Markov],
        oracle: None,
        expected: vec![exact(BoundMethod::Markov, 0.5)],
    }
}

/// Exam marks capped at 100 with mean 75: chance a random student scores 50
/// or less.
fn marks() -> Scenario {
    Scenario {
        name: "marks".into(),
        data: ScenarioData::Moment(MomentProfile::with_mean(75.0).support_hi(100.0)),
        query: TailQuery::lower_level(50.0),
        applicable: vec![BoundMethod::ReverseMarkov],
        oracle: None,
        expected: vec![exact(BoundMethod::ReverseMarkov, 0.5)],
    }
}

/// Heads among 100 fair coin flips: chance of at least 3n/4 = 75 heads.
/// Carries the exact binomial oracle.
fn coin() -> Scenario {
    Scenario {
        name: "coin".into(),
        data: ScenarioData::Moment(
            MomentProfile::with_mean(50.0)
                .variance(25.0)
                .support(0.0, 100.0)
                .nonnegative(),
        ),
        query: TailQuery::upper_level(75.0),
        applicable: vec![
            BoundMethod::Markov,
            BoundMethod::Chebyshev,
            BoundMethod::ChebyshevSymmetric,
            BoundMethod::ChernoffBinomialTwoSided,
        ],
        oracle: Some(OracleConfig::ExactBinomial { n: 100, p: 0.5 }),
        expected: vec![
            exact(BoundMethod::Markov, 2.0 / 3.0),
            exact(BoundMethod::Chebyshev, 0.04),
            exact(BoundMethod::ChebyshevSymmetric, 0.02),
            exact(
                BoundMethod::ChernoffBinomialTwoSided,
                2.0 * (-100.0f64 / 24.0).exp(),
            ),
        ],
    }
}

/// IQ with mean 100 and standard deviation 15: chance of an IQ of at least
/// 250.
fn iq() -> Scenario {
    Scenario {
        name: "iq".into(),
        data: ScenarioData::Moment(
            MomentProfile::with_mean(100.0)
                .variance(225.0)
                .nonnegative(),
        ),
        query: TailQuery::upper_level(250.0),
        applicable: vec![BoundMethod::Markov, BoundMethod::Chebyshev],
        oracle: None,
        expected: vec![
            exact(BoundMethod::Markov, 0.4),
            exact(BoundMethod::Chebyshev, 0.01),
        ],
    }
}

/// One million pick-4 players (win probability 1/10000, 100 expected
/// winners): chance of at least 200 winners. The multiplicative Chernoff
/// value is exp(100(1 − 2 ln 2)) ≈ 1.6728e-17; the often-quoted 4.05e-18
/// comes from rounding e/4 ≈ 0.6796 down to 0.67 before taking the 100th
/// power and is recorded here as documentation, not asserted.
fn lottery() -> Scenario {
    Scenario {
        name: "lottery".into(),
        data: ScenarioData::Moment(MomentProfile::with_mean(100.0).nonnegative()),
        query: TailQuery::upper_level(200.0),
        applicable: vec![BoundMethod::Markov, BoundMethod::ChernoffBernoulli],
        oracle: Some(OracleConfig::ExactBinomial {
            n: 1_000_000,
            p: 1e-4,
        }),
        expected: vec![
            exact(BoundMethod::Markov, 0.5),
            relative(
                BoundMethod::ChernoffBernoulli,
                (100.0 * (1.0 - 2.0 * LN_2)).exp(),
                1e-12,
            ),
        ],
    }
}

/// Two investments with floors/ceilings (25..65 and 60..80), means 50 and
/// 70, standard deviations 25 and 20: chance the total payoff beats the
/// expected 120 by at least 10 (i.e. reaches 130).
///
/// The stated moments of investment 1 are not jointly realizable by any
/// distribution bounded in [25, 65] (maximum standard deviation there is
/// √375 ≈ 19.36), so this scenario has no sampling oracle; the bounds are
/// computed from the stated parameters as given.
fn portfolio() -> Scenario {
    Scenario {
        name: "portfolio".into(),
        data: ScenarioData::BoundedSum(BoundedSumSpec::new(vec![
            VarRange::with_moments(25.0, 65.0, 50.0, 625.0),
            VarRange::with_moments(60.0, 80.0, 70.0, 400.0),
        ])),
        query: TailQuery::sum_deviation(Direction::Upper, 10.0),
        applicable: vec![
            BoundMethod::Bennett,
            BoundMethod::Bernstein,
            BoundMethod::Hoeffding,
        ],
        oracle: None,
        expected: vec![
            rounded(BoundMethod::Bennett, 0.9545, 5e-4),
            rounded(BoundMethod::Bernstein, 0.9525, 5e-4),
            rounded(BoundMethod::Hoeffding, 0.9048, 5e-4),
        ],
    }
}

/// Occurrences of a fixed 5-character pattern in a random string of 1000
/// characters, as a Doob martingale with per-step bounds c_i = 5: chance
/// the count deviates from its mean by 200 either way.
fn dna() -> Scenario {
    Scenario {
        name: "dna".into(),
        data: ScenarioData::Martingale(MartingaleDifferenceSpec::uniform(1000, 5.0)),
        query: TailQuery::sum_deviation(Direction::TwoSided, 200.0),
        applicable: vec![BoundMethod::Azuma],
        oracle: None,
        expected: vec![exact(BoundMethod::Azuma, 2.0 * (-0.8f64).exp())],
    }
}

/// L1 error of a kernel density estimate from 100 samples: changing one
/// sample moves the error by at most 2/n, so bounded differences apply with
/// c_i = 0.02; chance of deviating from the mean error by 0.5 either way.
fn kde() -> Scenario {
    Scenario {
        name: "kde".into(),
        data: ScenarioData::BoundedDifference(MartingaleDifferenceSpec::uniform(100, 0.02)),
        query: TailQuery::sum_deviation(Direction::TwoSided, 0.5),
        applicable: vec![BoundMethod::Mcdiarmid],
        oracle: None,
        expected: vec![relative(
            BoundMethod::Mcdiarmid,
            2.0 * (-12.5f64).exp(),
            1e-9,
        )],
    }
}

/// Sup-distance between an empirical distribution over 100 samples and its
/// truth: one observation moves it by at most 1/n, so c_i = 0.01; chance of
/// deviating from its mean by 0.1 either way.
fn empirical_process() -> Scenario {
    Scenario {
        name: "empirical-process".into(),
        data: ScenarioData::BoundedDifference(MartingaleDifferenceSpec::uniform(100, 0.01)),
        query: TailQuery::sum_deviation(Direction::TwoSided, 0.1),
        applicable: vec![BoundMethod::Mcdiarmid],
        oracle: None,
        expected: vec![exact(BoundMethod::Mcdiarmid, 2.0 * (-2.0f64).exp())],
    }
}

/// The nine builtin scenarios with their pinned regression targets.
pub fn builtin_catalog() -> Vec<Scenario> {
    vec![
        weight(),
        marks(),
        coin(),
        iq(),
        lottery(),
        portfolio(),
        dna(),
        kde(),
        empirical_process(),
    ]
}

/// Look up one builtin scenario by name.
pub fn builtin(name: &str) -> Option<Scenario> {
    builtin_catalog().into_iter().find(|s| s.name == name)
}

/// Small-n Monte Carlo companion to the "dna" scenario: the full-size
/// version has no tractable oracle, so soundness is checked on a 30-character
/// string over a 4-letter alphabet with a fixed 3-mer, whose match count can
/// be sampled directly. Not part of the nine-scenario catalog.
pub fn dna_small_variant() -> Scenario {
    let copies = 30;
    Scenario {
        name: "dna-small".into(),
        data: ScenarioData::Martingale(MartingaleDifferenceSpec::uniform(copies, 3.0)),
        query: TailQuery::sum_deviation(Direction::TwoSided, 20.0),
        applicable: vec![BoundMethod::Azuma],
        oracle: Some(OracleConfig::MonteCarlo(SamplerSpec::new(
            Distribution::Categorical {
                values: vec![0.0, 1.0, 2.0, 3.0],
                weights: vec![0.25, 0.25, 0.25, 0.25],
            },
            copies,
            Aggregate::Custom(dna_3mer_count_aggregate(copies)),
        ))),
        expected: vec![exact(BoundMethod::Azuma, 2.0 * (-400.0f64 / 540.0).exp())],
    }
}

/// Count of (possibly overlapping) occurrences of the fixed pattern
/// (0, 1, 2) in the drawn character sequence. Each character participates in
/// at most 3 windows, so the bounded-difference constants are all 3; over a
/// 4-letter uniform alphabet the expected count is (n − 2)/64.
pub(crate) fn dna_3mer_count_aggregate(copies: usize) -> CustomAggregate {
    let mean = if copies >= 3 {
        (copies - 2) as f64 / 64.0
    } else {
        0.0
    };
    CustomAggregate::new(
        "dna-3mer-count",
        |draws: &[f64]| {
            draws
                .windows(3)
                .filter(|w| w[0] == 0.0 && w[1] == 1.0 && w[2] == 2.0)
                .count() as f64
        },
        vec![3.0; copies],
        Some(mean),
    )
}

/// L1 distance between the uniform(0, 1) density and a box-kernel density
/// estimate built from the draws, with bandwidth h = n^(-1/5).
///
/// The estimate is piecewise constant with breakpoints at x_i ± h, so the
/// integral is computed exactly by a sweep over sorted breakpoints. Changing
/// one sample moves the value by at most 2/n for any kernel integrating
/// to 1, hence the declared difference bounds.
pub fn kde_l1_box_aggregate(copies: usize) -> CustomAggregate {
    CustomAggregate::new(
        "kde-l1-box",
        kde_l1_box_error,
        vec![2.0 / copies as f64; copies],
        None,
    )
}

fn kde_l1_box_error(xs: &[f64]) -> f64 {
    let n = xs.len();
    let h = (n as f64).powf(-0.2);
    // Each sample whose window covers x contributes K(·)/(nh) = 1/(2nh).
    let per_window = 1.0 / (2.0 * n as f64 * h);
    let mut events: Vec<(f64, i32)> = Vec::with_capacity(2 * n + 2);
    for &x in xs {
        events.push((x - h, 1));
        events.push((x + h, -1));
    }
    events.push((0.0, 0));
    events.push((1.0, 0));
    events.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut active = events[0].1;
    let mut prev = events[0].0;
    let mut total = 0.0;
    for &(pos, delta) in &events[1..] {
        let len = pos - prev;
        if len > 0.0 {
            let mid = 0.5 * (prev + pos);
            let truth = if (0.0..=1.0).contains(&mid) { 1.0 } else { 0.0 };
            total += (truth - active as f64 * per_window).abs() * len;
        }
        active += delta;
        prev = pos;
    }
    total
}

/// Named aggregates that scenario files may reference.
pub(crate) fn custom_aggregate_by_name(name: &str, copies: usize) -> Option<CustomAggregate> {
    match name {
        "dna-3mer-count" => Some(dna_3mer_count_aggregate(copies)),
        "kde-l1-box" => Some(kde_l1_box_aggregate(copies)),
        _ => None,
    }
}
