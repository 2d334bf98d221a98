use std::fmt;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use dsgibbs::chain::{self, ChainParams};
use dsgibbs::counts::{self, BoxModel, CountRecord, Method};
use dsgibbs::geometry::{Assertion, Observations};
use dsgibbs::oracle;
use dsgibbs::report;
use dsgibbs::rng::SeedSplitter;
use dsgibbs::stats::{self, MIN_KS_SAMPLES};
use dsgibbs::Error;

use crate::table::{self, num, opt};
use crate::{Cli, Command, CountArgs, Format};

const DEFAULT_CHAIN_REPLICATES: usize = 10_000;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Library(Error),
    Output(std::io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Output(_) => 1,
            Failure::Library(e) => match e {
                Error::Domain(_) | Error::Precondition(_) | Error::Parse { .. } => 2,
                Error::Numeric { .. } => 3,
                Error::SamplingBudget { .. } => 4,
                Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
            },
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage: {m}"),
            Failure::Library(e) => write!(f, "{e}"),
            Failure::Output(e) => write!(f, "cannot write output: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Library(e)
    }
}

type Outcome<T> = Result<T, Failure>;

pub fn run(cli: &Cli) -> Outcome<()> {
    let bytes = match &cli.command {
        Command::Chain {
            n1,
            n2,
            z0,
            t_max,
            states,
        } => cmd_chain(cli, *n1, *n2, *z0, *t_max, states.as_deref())?,
        Command::Oracle {
            counts,
            labels,
            samples,
            max_attempts,
            states,
        } => cmd_oracle(
            cli,
            counts,
            labels.as_deref(),
            *samples,
            *max_attempts,
            states.as_deref(),
        )?,
        Command::Ds {
            labels,
            j,
            lo,
            hi,
            samples,
            categories,
            max_attempts,
        } => cmd_ds(
            cli,
            labels,
            *j,
            *lo,
            *hi,
            *samples,
            *categories,
            *max_attempts,
        )?,
        Command::Birthday(args) => cmd_counts(cli, args, Problem::Birthday)?,
        Command::Coupon(args) => cmd_counts(cli, args, Problem::Coupon)?,
    };
    match &cli.run.out {
        Some(path) => std::fs::write(path, bytes).map_err(Failure::Output),
        None => std::io::stdout().write_all(&bytes).map_err(Failure::Output),
    }
}

fn write_file(path: &Path, bytes: Vec<u8>) -> Outcome<()> {
    std::fs::write(path, bytes).map_err(Failure::Output)
}

fn to_csv<T: Serialize>(rows: &[T]) -> Outcome<Vec<u8>> {
    let mut buf = Vec::new();
    report::write_csv(&mut buf, rows)?;
    Ok(buf)
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> Outcome<Vec<u8>> {
    let mut buf = Vec::new();
    report::write_json(&mut buf, value)?;
    Ok(buf)
}

fn cmd_chain(
    cli: &Cli,
    n1: u32,
    n2: u32,
    z0: f64,
    t_max: u32,
    states_path: Option<&Path>,
) -> Outcome<Vec<u8>> {
    let params = ChainParams::new(n1, n2)?;
    if !(0.0..=1.0).contains(&z0) {
        return Err(Failure::Usage(format!("z0 = {z0} must lie in [0, 1]")));
    }
    let replicates = cli
        .run
        .replicates
        .map_or(DEFAULT_CHAIN_REPLICATES, |r| r as usize);
    let report = chain::run_trajectories(
        params,
        z0,
        t_max,
        replicates,
        cli.run.seed,
        states_path.is_some(),
    )?;
    if let Some(path) = states_path {
        let mut buf = Vec::new();
        report::write_states_csv(&mut buf, &report::state_records(&report))?;
        write_file(path, buf)?;
    }
    match cli.run.format {
        Format::Csv => to_csv(&report.summary),
        Format::Json => to_json(&report),
        Format::Table => {
            let headers = [
                "t",
                "sample_mean",
                "std_error",
                "closed_form_mean",
                "empirical_w1",
                "w1_lower",
                "w1_upper",
                "w1_worst_case",
            ];
            let rows: Vec<Vec<String>> = report
                .summary
                .iter()
                .map(|s| {
                    vec![
                        s.t.to_string(),
                        num(s.sample_mean),
                        num(s.std_error),
                        num(s.closed_form_mean),
                        num(s.empirical_w1),
                        num(s.w1_lower),
                        num(s.w1_upper),
                        num(s.w1_worst_case),
                    ]
                })
                .collect();
            let mut text = format!(
                "# chain N1={n1} N2={n2} z0={z0} replicates={replicates} seed={}\n",
                cli.run.seed
            );
            text.push_str(&table::render(&headers, &rows));
            Ok(text.into_bytes())
        }
    }
}

fn read_labels(path: &Path, categories: Option<usize>) -> Outcome<Observations> {
    let file = File::open(path)
        .map_err(|e| Failure::Usage(format!("cannot open labels file {}: {e}", path.display())))?;
    Ok(Observations::parse(BufReader::new(file), categories)?)
}

#[derive(Debug, Serialize)]
struct OracleSummary {
    n1: usize,
    n2: usize,
    samples: usize,
    attempts: u64,
    acceptance_rate: f64,
    acceptance_std_error: f64,
    sample_mean: f64,
    sample_mean_std_error: f64,
    stationary_mean: f64,
    ks_statistic: Option<f64>,
    ks_p_value: Option<f64>,
}

#[derive(Debug, Serialize)]
struct OracleDocument<'a> {
    spec_version: u32,
    version: &'static str,
    seed: u64,
    summary: &'a OracleSummary,
    samples: &'a [f64],
}

fn cmd_oracle(
    cli: &Cli,
    counts: &[u32],
    labels: Option<&Path>,
    n: usize,
    max_attempts: u64,
    states_path: Option<&Path>,
) -> Outcome<Vec<u8>> {
    let obs = match (labels, counts) {
        (Some(path), []) => read_labels(path, Some(2))?,
        (None, [n1, n2]) => Observations::from_counts(&[*n1 as usize, *n2 as usize])?,
        _ => {
            return Err(Failure::Usage(
                "give either the two counts N1 N2 or --labels FILE".into(),
            ))
        }
    };
    if n == 0 {
        return Err(Failure::Usage("--samples must be positive".into()));
    }
    let (n1, n2) = (obs.counts()[0], obs.counts()[1]);
    let params = ChainParams::new(n1 as u32, n2 as u32)?;
    let pi = chain::stationary_distribution(params);
    let splitter = SeedSplitter::new(cli.run.seed);
    let endpoints = oracle::stationary_endpoint_samples(&obs, n, &splitter, max_attempts)?;
    let rate = endpoints.acceptance_rate();
    let mean = stats::mean_with_error(&endpoints.values);
    let ks = if n >= MIN_KS_SAMPLES {
        Some(stats::ks_one_sample(&endpoints.values, |x| pi.cdf(x))?)
    } else {
        None
    };
    let summary = OracleSummary {
        n1,
        n2,
        samples: n,
        attempts: endpoints.attempts,
        acceptance_rate: rate.estimate,
        acceptance_std_error: rate.std_error,
        sample_mean: mean.estimate,
        sample_mean_std_error: mean.std_error,
        stationary_mean: pi.mean(),
        ks_statistic: ks.map(|k| k.statistic),
        ks_p_value: ks.map(|k| k.p_value),
    };
    if let Some(path) = states_path {
        let mut buf = Vec::new();
        report::write_states_csv(&mut buf, &report::sample_records(&endpoints.values))?;
        write_file(path, buf)?;
    }
    match cli.run.format {
        Format::Csv => to_csv(std::slice::from_ref(&summary)),
        Format::Json => to_json(&OracleDocument {
            spec_version: dsgibbs::SCHEMA_VERSION,
            version: dsgibbs::VERSION,
            seed: cli.run.seed,
            summary: &summary,
            samples: &endpoints.values,
        }),
        Format::Table => {
            let rows = [
                ("N1", n1.to_string()),
                ("N2", n2.to_string()),
                ("samples", n.to_string()),
                ("attempts", summary.attempts.to_string()),
                ("acceptance_rate", num(summary.acceptance_rate)),
                ("acceptance_std_error", num(summary.acceptance_std_error)),
                ("sample_mean", num(summary.sample_mean)),
                ("sample_mean_std_error", num(summary.sample_mean_std_error)),
                ("stationary_mean", num(summary.stationary_mean)),
                ("ks_statistic", opt(summary.ks_statistic)),
                ("ks_p_value", opt(summary.ks_p_value)),
            ];
            let rows: Vec<Vec<String>> = rows
                .into_iter()
                .map(|(k, v)| vec![k.to_string(), v])
                .collect();
            Ok(table::render(&["quantity", "value"], &rows).into_bytes())
        }
    }
}

/// Versioned JSON envelope; the body's fields are inlined.
#[derive(Debug, Serialize)]
struct Document<'a, T: Serialize> {
    spec_version: u32,
    version: &'static str,
    seed: u64,
    #[serde(flatten)]
    body: &'a T,
}

#[derive(Debug, Serialize)]
struct CountsBody<'a> {
    records: &'a [CountRecord],
}

#[derive(Debug, Serialize)]
struct DsSummary {
    categories: usize,
    observations: usize,
    coordinate: usize,
    lo: f64,
    hi: f64,
    samples: usize,
    attempts: u64,
    lower: f64,
    lower_std_error: f64,
    upper: f64,
    upper_std_error: f64,
}

#[allow(clippy::too_many_arguments)]
fn cmd_ds(
    cli: &Cli,
    labels: &Path,
    j: usize,
    lo: f64,
    hi: f64,
    n: usize,
    categories: Option<usize>,
    max_attempts: u64,
) -> Outcome<Vec<u8>> {
    let obs = read_labels(labels, categories)?;
    if j == 0 || j > obs.categories() {
        return Err(Failure::Usage(format!(
            "coordinate {j} out of range 1..={}",
            obs.categories()
        )));
    }
    if n == 0 {
        return Err(Failure::Usage("--samples must be positive".into()));
    }
    let assertion = Assertion::new(j - 1, lo, hi)?;
    let splitter = SeedSplitter::new(cli.run.seed);
    let result = oracle::lower_upper_from_oracle(&obs, &assertion, n, &splitter, max_attempts)?;
    let p = result.probabilities;
    let summary = DsSummary {
        categories: obs.categories(),
        observations: obs.len(),
        coordinate: j,
        lo,
        hi,
        samples: p.samples,
        attempts: result.attempts,
        lower: p.lower,
        lower_std_error: p.lower_estimate().std_error,
        upper: p.upper,
        upper_std_error: p.upper_estimate().std_error,
    };
    match cli.run.format {
        Format::Csv => to_csv(std::slice::from_ref(&summary)),
        Format::Json => to_json(&Document {
            spec_version: dsgibbs::SCHEMA_VERSION,
            version: dsgibbs::VERSION,
            seed: cli.run.seed,
            body: &summary,
        }),
        Format::Table => {
            let headers = [
                "coordinate",
                "lo",
                "hi",
                "samples",
                "lower",
                "lower_se",
                "upper",
                "upper_se",
            ];
            let row = vec![
                j.to_string(),
                num(lo),
                num(hi),
                summary.samples.to_string(),
                num(summary.lower),
                num(summary.lower_std_error),
                num(summary.upper),
                num(summary.upper_std_error),
            ];
            Ok(table::render(&headers, &[row]).into_bytes())
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Problem {
    Birthday,
    Coupon,
}

fn cmd_counts(cli: &Cli, args: &CountArgs, problem: Problem) -> Outcome<Vec<u8>> {
    if args.k <= 0 {
        return Err(Failure::Usage(format!(
            "k must be positive, got {}",
            args.k
        )));
    }
    let k = args.k as u64;
    let (n, method) = match (args.find_half, args.rest.as_slice()) {
        (true, [method]) => (None, method),
        (false, [n, method]) => {
            let n: i64 = n
                .parse()
                .map_err(|_| Failure::Usage(format!("N must be an integer, got {n:?}")))?;
            if n <= 0 {
                return Err(Failure::Usage(format!("N must be positive, got {n}")));
            }
            (Some(n as u64), method)
        }
        (true, _) => return Err(Failure::Usage("with --find-half give only METHOD".into())),
        (false, _) => return Err(Failure::Usage("expected <K> <N> <METHOD>".into())),
    };
    let method: Method = method
        .parse()
        .map_err(|e: Error| Failure::Usage(e.to_string()))?;
    let replicates = cli
        .run
        .replicates
        .map_or(counts::DEFAULT_COUPON_REPLICATES, |r| r as usize);
    let splitter = SeedSplitter::new(cli.run.seed);
    let started = Instant::now();

    let exact = move |n: u64| -> Result<f64, Error> {
        let m = BoxModel::new(k, n)?;
        Ok(match (problem, method) {
            (Problem::Birthday, Method::Classical) => counts::birthday_prob_classical(m),
            (Problem::Birthday, Method::FlatPrior) => counts::birthday_prob_uniform_prior(m),
            (Problem::Coupon, Method::Classical) => counts::coupon_prob_classical(m),
            (Problem::Coupon, Method::FlatPrior) => counts::coupon_prob_uniform_prior_exact(m),
        })
    };

    let mut records: Vec<CountRecord> = match n {
        None => {
            let c = counts::find_threshold_n(exact, 0.5)?;
            [c.before, c.after]
                .into_iter()
                .map(|(n, p)| CountRecord {
                    k,
                    n,
                    method,
                    estimate: p,
                    std_error: None,
                    runtime_ms: None,
                })
                .collect()
        }
        Some(n) => {
            let m = BoxModel::new(k, n)?;
            let (estimate, std_error) = match (problem, method) {
                (Problem::Coupon, Method::FlatPrior) => {
                    let e = counts::coupon_prob_uniform_prior(m, replicates, &splitter)?;
                    (e.estimate, Some(e.std_error))
                }
                _ => (exact(n)?, None),
            };
            vec![CountRecord {
                k,
                n,
                method,
                estimate,
                std_error,
                runtime_ms: None,
            }]
        }
    };
    if args.timing {
        let ms = started.elapsed().as_secs_f64() * 1e3;
        for r in &mut records {
            r.runtime_ms = Some(ms);
        }
    }

    match cli.run.format {
        Format::Csv => to_csv(&records),
        Format::Json => to_json(&Document {
            spec_version: dsgibbs::SCHEMA_VERSION,
            version: dsgibbs::VERSION,
            seed: cli.run.seed,
            body: &CountsBody { records: &records },
        }),
        Format::Table => {
            let headers = ["k", "n", "method", "estimate", "std_error", "runtime_ms"];
            let rows: Vec<Vec<String>> = records
                .iter()
                .map(|r| {
                    vec![
                        r.k.to_string(),
                        r.n.to_string(),
                        r.method.to_string(),
                        num(r.estimate),
                        opt(r.std_error),
                        opt(r.runtime_ms),
                    ]
                })
                .collect();
            Ok(table::render(&headers, &rows).into_bytes())
        }
    }
}
