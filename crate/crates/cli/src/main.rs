//! Batch front door for the tail-bound engine: compute single bounds,
//! compare scenarios, solve sample sizes, and run soundness checks, emitting
//! human tables, CSV, or JSON.
//!
//! Exit codes: 0 success; 1 computation or validation error (including
//! regression misses in `compare`); 2 argument or parse error; 3 soundness
//! check failure.

mod output;

use std::fmt::Display;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{
    BoundRecord, CatalogRecord, CatalogRow, CompareRecord, CompareRow, Format, SampleSizeRecord,
    VerifyRecord, VerifyRow,
};
use tailbound::bounds;
use tailbound::chernoff::{chernoff_optimize, MgfHandle};
use tailbound::model::{
    BoundResult, BoundedSumSpec, Direction, MartingaleDifferenceSpec, MomentProfile, TailQuery,
    VarRange,
};
use tailbound::scenarios::{
    builtin, builtin_catalog, compare_bounds, load_scenario, soundness_check, OracleConfig,
    OracleValue, Scenario,
};

#[derive(Debug, Parser)]
#[command(
    name = "tailbound",
    about = "Tail-probability bounds with exact and Monte Carlo soundness oracles",
    version
)]
struct Cli {
    /// Output format for results on stdout.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Human)]
    format: FormatArg,
    /// Override the regression tolerance used by `compare`.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Human,
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Human => Format::Human,
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DirectionArg {
    Upper,
    Lower,
    TwoSided,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Direction {
        match d {
            DirectionArg::Upper => Direction::Upper,
            DirectionArg::Lower => Direction::Lower,
            DirectionArg::TwoSided => Direction::TwoSided,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute one bound from explicit parameters.
    #[command(subcommand)]
    Bound(BoundCommand),
    /// Run every applicable bound for a scenario and print the table.
    Compare(ScenarioArgs),
    /// Smallest sample count for a two-sided confidence interval.
    Samplesize {
        /// Significance level in (0, 1).
        #[arg(long)]
        alpha: f64,
        /// Interval half-width t for unit-range variables.
        #[arg(long)]
        half_width: f64,
    },
    /// Check every applicable bound against the scenario's oracle.
    Verify {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Monte Carlo sample count (ignored by exact oracles).
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Seed for the reproducible sampler.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads for the sampler pool (default: all cores). The
        /// result is bit-identical for any worker count.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// List the builtin scenarios.
    Catalog,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct ScenarioSource {
    /// Name of a builtin scenario.
    #[arg(long)]
    builtin: Option<String>,
    /// Path to a scenario JSON document.
    #[arg(long)]
    file: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    #[command(flatten)]
    source: ScenarioSource,
}

#[derive(Debug, Subcommand)]
enum BoundCommand {
    /// E(X)/a for nonnegative X.
    Markov {
        #[arg(long)]
        mean: f64,
        /// Level a of the upper-tail event X >= a.
        #[arg(long)]
        at: f64,
    },
    /// (U − E(X))/(U − a) for X bounded above by U.
    ReverseMarkov {
        #[arg(long)]
        mean: f64,
        /// Upper support bound U.
        #[arg(long)]
        max: f64,
        /// Level a of the lower-tail event X <= a.
        #[arg(long)]
        at: f64,
    },
    /// Var(X)/a² for the two-sided deviation event.
    Chebyshev {
        #[arg(long)]
        variance: f64,
        /// Deviation a from the mean.
        #[arg(long)]
        deviation: f64,
        /// Halve the bound (valid for symmetric distributions).
        #[arg(long)]
        symmetric: bool,
    },
    /// Multiplicative form [e^δ/(1+δ)^(1+δ)]^(np) at level (1+δ)np.
    ChernoffBernoulli {
        #[arg(long)]
        np: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Two-sided 2·exp(−μδ²/3) for δ in (0, 1].
    ChernoffBinomialTwoSided {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Numerically optimized Chernoff bound over the exact Binomial(n, p)
    /// MGF at level `at`.
    ChernoffOptimized {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        at: f64,
    },
    /// exp(−2t²/Σ(b−a)²) for a sum of independent bounded variables.
    Hoeffding {
        /// Comma-separated ranges lo:hi, e.g. `25:65,60:80`.
        #[arg(long, value_parser = parse_ranges)]
        ranges: Ranges,
        #[command(flatten)]
        threshold: DeviationThreshold,
        #[arg(long, value_enum, default_value_t = DirectionArg::Upper)]
        direction: DirectionArg,
    },
    /// Sub-Gaussian MGF bound exp(λ·mean + λ²(hi−lo)²/8); the value is an
    /// MGF bound, not a probability.
    HoeffdingLemma {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        mean: f64,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
    },
    /// exp(−t²/(2Σc²)) for martingales with bounded differences.
    Azuma {
        /// Comma-separated step bounds, with `VALxN` repetition, e.g.
        /// `5x1000` or `1,2,0.5`.
        #[arg(long, value_parser = parse_steps)]
        steps: Steps,
        #[arg(long)]
        deviation: f64,
        #[arg(long, value_enum, default_value_t = DirectionArg::Upper)]
        direction: DirectionArg,
    },
    /// exp(−(nv/s²)h(ts/v)) with the crescent function h.
    Bennett {
        #[arg(long)]
        n: usize,
        /// Mean per-variable variance v.
        #[arg(long)]
        variance: f64,
        /// Centered one-sided range scale s.
        #[arg(long)]
        scale: f64,
        #[command(flatten)]
        threshold: DeviationThreshold,
        #[arg(long, value_enum, default_value_t = DirectionArg::Upper)]
        direction: DirectionArg,
    },
    /// exp(−t²/(2(nσ² + t/3))) (sum form) or exp(−nε²/(2σ² + 2ε/3)) (mean form).
    Bernstein {
        #[arg(long)]
        n: usize,
        /// Mean per-variable variance σ².
        #[arg(long)]
        variance: f64,
        #[command(flatten)]
        threshold: DeviationThreshold,
        #[arg(long, value_enum, default_value_t = DirectionArg::Upper)]
        direction: DirectionArg,
    },
    /// exp(−2ε²/Σc²) for functions with bounded differences.
    Mcdiarmid {
        #[arg(long, value_parser = parse_steps)]
        steps: Steps,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = DirectionArg::Upper)]
        direction: DirectionArg,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct DeviationThreshold {
    /// Deviation of the sum, t.
    #[arg(long)]
    sum_deviation: Option<f64>,
    /// Deviation of the mean, ε.
    #[arg(long)]
    mean_deviation: Option<f64>,
}

impl DeviationThreshold {
    fn to_query(&self, direction: DirectionArg) -> TailQuery {
        match (self.sum_deviation, self.mean_deviation) {
            (Some(t), None) => TailQuery::sum_deviation(direction.into(), t),
            (None, Some(e)) => TailQuery::mean_deviation(direction.into(), e),
            _ => unreachable!("clap enforces exactly one threshold"),
        }
    }
}

#[derive(Debug, Clone)]
struct Ranges(Vec<(f64, f64)>);

fn parse_ranges(s: &str) -> Result<Ranges, String> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let (lo, hi) = item
            .split_once(':')
            .ok_or_else(|| format!("range `{item}` must look like lo:hi"))?;
        let lo: f64 = lo
            .trim()
            .parse()
            .map_err(|e| format!("bad lo in `{item}`: {e}"))?;
        let hi: f64 = hi
            .trim()
            .parse()
            .map_err(|e| format!("bad hi in `{item}`: {e}"))?;
        out.push((lo, hi));
    }
    if out.is_empty() {
        return Err("at least one range is required".into());
    }
    Ok(Ranges(out))
}

#[derive(Debug, Clone)]
struct Steps(Vec<f64>);

fn parse_steps(s: &str) -> Result<Steps, String> {
    let mut out = Vec::new();
    for item in s.split(',') {
        if let Some((value, count)) = item.split_once('x') {
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|e| format!("bad value in `{item}`: {e}"))?;
            let count: usize = count
                .trim()
                .parse()
                .map_err(|e| format!("bad count in `{item}`: {e}"))?;
            out.extend(std::iter::repeat_n(value, count));
        } else {
            out.push(
                item.trim()
                    .parse()
                    .map_err(|e| format!("bad value in `{item}`: {e}"))?,
            );
        }
    }
    if out.is_empty() {
        return Err("at least one step bound is required".into());
    }
    Ok(Steps(out))
}

struct Failure(String);

impl<E: Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format.into();
    match run(&cli, format) {
        Ok(code) => code,
        Err(Failure(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli, format: Format) -> Result<ExitCode, Failure> {
    match &cli.command {
        Command::Bound(cmd) => {
            print!("{}", bound_record(cmd)?.render(format));
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare(args) => {
            let scenario = resolve_scenario(&args.source)?;
            let record = compare_record(&scenario, cli.tolerance)?;
            print!("{}", record.render(format));
            if record.all_within() {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!(
                    "error: scenario `{}` missed pinned regression values",
                    scenario.name
                );
                Ok(ExitCode::from(1))
            }
        }
        Command::Samplesize { alpha, half_width } => {
            let n = bounds::hoeffding_sample_size(*alpha, *half_width)?;
            let record = SampleSizeRecord {
                alpha: *alpha,
                half_width: *half_width,
                n,
                achieved_alpha: bounds::hoeffding_achieved_alpha(n, *half_width),
            };
            print!("{}", record.render(format));
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            scenario,
            samples,
            seed,
            workers,
        } => {
            let scenario = resolve_scenario(&scenario.source)?;
            let record = verify_record(&scenario, *samples, *seed, *workers)?;
            print!("{}", record.render(format));
            if record.passed {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("error: soundness check failed for `{}`", scenario.name);
                Ok(ExitCode::from(3))
            }
        }
        Command::Catalog => {
            print!("{}", catalog_record().render(format));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn resolve_scenario(source: &ScenarioSource) -> Result<Scenario, Failure> {
    match (&source.builtin, &source.file) {
        (Some(name), None) => builtin(name).ok_or_else(|| {
            Failure(format!(
                "unknown builtin `{name}` (see `tailbound catalog`)"
            ))
        }),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
            Ok(load_scenario(&text)?)
        }
        _ => unreachable!("clap enforces exactly one source"),
    }
}

fn to_bound_record(result: &BoundResult) -> BoundRecord {
    BoundRecord {
        kind: "bound",
        method: result.method.to_string(),
        value: result.value,
        log_value: result.log_value,
        clamped: result.clamped,
        optimal_param: result.optimal_param,
    }
}

fn bound_record(cmd: &BoundCommand) -> Result<BoundRecord, Failure> {
    let record = match cmd {
        BoundCommand::Markov { mean, at } => {
            let profile = MomentProfile::with_mean(*mean).nonnegative();
            to_bound_record(&bounds::markov(&profile, *at)?)
        }
        BoundCommand::ReverseMarkov { mean, max, at } => {
            let profile = MomentProfile::with_mean(*mean).support_hi(*max);
            to_bound_record(&bounds::reverse_markov(&profile, *at)?)
        }
        BoundCommand::Chebyshev {
            variance,
            deviation,
            symmetric,
        } => {
            let profile = MomentProfile::with_mean(0.0).variance(*variance);
            to_bound_record(&bounds::chebyshev(&profile, *deviation, *symmetric)?)
        }
        BoundCommand::ChernoffBernoulli { np, delta } => {
            to_bound_record(&bounds::chernoff_bernoulli(*np, *delta)?)
        }
        BoundCommand::ChernoffBinomialTwoSided { mu, delta } => {
            to_bound_record(&bounds::chernoff_binomial_two_sided(*mu, *delta)?)
        }
        BoundCommand::ChernoffOptimized { n, p, at } => {
            let mgf = MgfHandle::binomial(*n, *p)?;
            to_bound_record(&chernoff_optimize(&mgf, *at)?)
        }
        BoundCommand::Hoeffding {
            ranges,
            threshold,
            direction,
        } => {
            let spec = BoundedSumSpec::new(
                ranges
                    .0
                    .iter()
                    .map(|(lo, hi)| VarRange::new(*lo, *hi))
                    .collect(),
            );
            let query = threshold.to_query(*direction);
            to_bound_record(&bounds::hoeffding_tail(&spec, &query)?)
        }
        BoundCommand::HoeffdingLemma {
            lambda,
            mean,
            lo,
            hi,
        } => {
            let value = bounds::hoeffding_lemma_bound(*lambda, *mean, *lo, *hi)?;
            BoundRecord {
                kind: "mgf-bound",
                method: "hoeffding-lemma".into(),
                value,
                log_value: value.ln(),
                clamped: false,
                optimal_param: None,
            }
        }
        BoundCommand::Azuma {
            steps,
            deviation,
            direction,
        } => {
            let spec = MartingaleDifferenceSpec::new(steps.0.clone());
            to_bound_record(&bounds::azuma(&spec, *deviation, (*direction).into())?)
        }
        BoundCommand::Bennett {
            n,
            variance,
            scale,
            threshold,
            direction,
        } => {
            let query = threshold.to_query(*direction);
            to_bound_record(&bounds::bennett(*n, *variance, *scale, &query)?)
        }
        BoundCommand::Bernstein {
            n,
            variance,
            threshold,
            direction,
        } => {
            let query = threshold.to_query(*direction);
            to_bound_record(&bounds::bernstein(*n, *variance, &query)?)
        }
        BoundCommand::Mcdiarmid {
            steps,
            epsilon,
            direction,
        } => {
            let spec = MartingaleDifferenceSpec::new(steps.0.clone());
            to_bound_record(&bounds::mcdiarmid(&spec, *epsilon, (*direction).into())?)
        }
    };
    Ok(record)
}

fn compare_record(scenario: &Scenario, tolerance: Option<f64>) -> Result<CompareRecord, Failure> {
    let table = compare_bounds(scenario)?;
    let rows = table
        .rows
        .iter()
        .map(|r| {
            let expected = scenario.expected.iter().find(|e| e.method == r.method);
            let (expected_value, tol, within) = match expected {
                Some(e) => {
                    let tol = tolerance.unwrap_or(e.tolerance);
                    let err = (r.value - e.value).abs();
                    let ok = if e.relative {
                        err <= tol * e.value.abs()
                    } else {
                        err <= tol
                    };
                    (Some(e.value), Some(tol), Some(ok))
                }
                None => (None, None, None),
            };
            CompareRow {
                method: r.method.to_string(),
                value: r.value,
                log_value: r.log_value,
                clamped: r.clamped,
                optimal_param: r.optimal_param,
                expected: expected_value,
                tolerance: tol,
                within,
            }
        })
        .collect();
    Ok(CompareRecord {
        scenario: scenario.name.clone(),
        rows,
        omissions: table
            .omissions
            .iter()
            .map(|o| (o.method.to_string(), o.reason.clone()))
            .collect(),
    })
}

fn verify_record(
    scenario: &Scenario,
    samples: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<VerifyRecord, Failure> {
    if scenario.oracle.is_none() {
        // Accept the name; there is simply nothing to check against.
        scenario.validate()?;
        return Ok(VerifyRecord {
            scenario: scenario.name.clone(),
            samples,
            seed,
            rows: vec![],
            passed: true,
            note: Some("no oracle configured; nothing to verify".into()),
        });
    }
    let run = || soundness_check(scenario, samples, seed);
    let report = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Failure(e.to_string()))?
            .install(run),
        None => run(),
    }?;
    let rows = report
        .rows
        .iter()
        .map(|r| {
            let (oracle_kind, ci_lo, ci_hi) = match &r.oracle {
                OracleValue::Exact(_) => ("exact", None, None),
                OracleValue::Estimate(e) => ("monte-carlo", Some(e.ci_lo), Some(e.ci_hi)),
            };
            VerifyRow {
                method: r.method.to_string(),
                bound_value: r.bound.value,
                bound_log_value: r.bound.log_value,
                oracle_kind,
                oracle_point: r.oracle.point(),
                ci_lo,
                ci_hi,
                pass: r.pass,
            }
        })
        .collect();
    Ok(VerifyRecord {
        scenario: report.scenario,
        samples: report.samples,
        seed: report.seed,
        rows,
        passed: report.passed,
        note: None,
    })
}

fn catalog_record() -> CatalogRecord {
    let rows = builtin_catalog()
        .into_iter()
        .map(|s| CatalogRow {
            name: s.name.clone(),
            data_kind: s.data.kind_name().to_string(),
            direction: s.query.direction.to_string(),
            threshold_kind: s.query.threshold_kind.to_string(),
            threshold: s.query.threshold,
            methods: s.applicable.iter().map(|m| m.to_string()).collect(),
            oracle: s.oracle.as_ref().map(|o| match o {
                OracleConfig::ExactBinomial { .. } => "exact-binomial",
                OracleConfig::MonteCarlo(_) => "monte-carlo",
            }),
            expected_count: s.expected.len(),
        })
        .collect();
    CatalogRecord { rows }
}
