//! Brute-force uniform sampling on the feasible configuration set by rejection.
//!
//! Draw `N` independent uniform points of the simplex and keep the
//! configuration if its feasible parameter set is nonempty. Accepted
//! configurations are exactly uniform on the feasible set; the price is an
//! acceptance rate that decays combinatorially in `N` (for two categories it is
//! `1 / C(N1 + N2, N1)`). This is a desk-scale ground truth, not a production
//! sampler.

use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{self, Assertion, FeasibleThetaSet, LowerUpper, Observations, SimplexPoint};
use crate::rng::SeedSplitter;
use crate::stats::{self, McEstimate};
use crate::{Error, Result};

pub const DEFAULT_MAX_ATTEMPTS: u64 = 10_000_000;

/// Largest total observation count accepted with three or more categories.
pub const MAX_OBSERVATIONS_MULTI: usize = 6;

/// Uniform point of the `k`-simplex: normalized independent standard exponentials.
pub fn sample_uniform_simplex<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<SimplexPoint> {
    if k < 2 {
        return Err(Error::domain(format!(
            "simplex dimension must be at least 2, got {k}"
        )));
    }
    let weights: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    SimplexPoint::from_weights(weights)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleDraw {
    pub us: Vec<SimplexPoint>,
    pub feasible: FeasibleThetaSet,
    /// Attempts used, including the accepted one.
    pub attempts: u64,
}

fn check_observations(obs: &Observations) -> Result<()> {
    if obs.is_empty() {
        return Err(Error::domain(
            "rejection sampling needs at least one observation",
        ));
    }
    if obs.categories() > 2 && obs.len() > MAX_OBSERVATIONS_MULTI {
        return Err(Error::domain(format!(
            "with {} categories the rejection oracle is limited to {MAX_OBSERVATIONS_MULTI} \
             observations, got {}",
            obs.categories(),
            obs.len()
        )));
    }
    Ok(())
}

/// Rejection-samples one configuration uniformly from the feasible set.
pub fn sample_feasible_u<R: Rng + ?Sized>(
    obs: &Observations,
    rng: &mut R,
    max_attempts: u64,
) -> Result<FeasibleDraw> {
    check_observations(obs)?;
    if max_attempts == 0 {
        return Err(Error::domain("max_attempts must be at least 1"));
    }
    let k = obs.categories();
    for attempt in 1..=max_attempts {
        let us = (0..obs.len())
            .map(|_| sample_uniform_simplex(k, rng))
            .collect::<Result<Vec<_>>>()?;
        let feasible = geometry::feasible_set(&us, obs)?;
        if geometry::is_nonempty(&feasible)? {
            return Ok(FeasibleDraw {
                us,
                feasible,
                attempts: attempt,
            });
        }
    }
    Err(Error::SamplingBudget {
        attempts: max_attempts,
        accepted: 0,
        rate: 0.0,
        max_attempts,
    })
}

/// Draws `n` accepted configurations, configuration `i` from stream `i`.
fn sample_many(
    obs: &Observations,
    n: usize,
    splitter: &SeedSplitter,
    max_attempts: u64,
) -> Result<(Vec<FeasibleDraw>, u64)> {
    check_observations(obs)?;
    let results: Vec<Result<FeasibleDraw>> = (0..n)
        .into_par_iter()
        .map(|i| sample_feasible_u(obs, &mut splitter.stream(i as u64), max_attempts))
        .collect();
    let mut draws = Vec::with_capacity(n);
    let mut attempts = 0u64;
    let mut failed = false;
    for r in results {
        match r {
            Ok(d) => {
                attempts += d.attempts;
                draws.push(d);
            }
            Err(Error::SamplingBudget { attempts: a, .. }) => {
                attempts += a;
                failed = true;
            }
            Err(e) => return Err(e),
        }
    }
    if failed {
        let accepted = draws.len() as u64;
        return Err(Error::SamplingBudget {
            attempts,
            accepted,
            rate: accepted as f64 / attempts as f64,
            max_attempts,
        });
    }
    Ok((draws, attempts))
}

/// Accepted sample values together with the total number of attempts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointSamples {
    pub values: Vec<f64>,
    pub attempts: u64,
}

impl EndpointSamples {
    pub fn acceptance_rate(&self) -> McEstimate {
        stats::proportion(self.values.len() as u64, self.attempts)
    }
}

/// Upper endpoints `min_{x_n = 1} u_{n,0}` of the feasible interval under
/// uniform draws on the feasible set (two categories, both present). Their
/// law is `Beta(N1 + 1, N2)`: the endpoint is the `(N1 + 1)`-th order
/// statistic of `N1 + N2` uniforms conditioned on the first-category values
/// being the smallest.
pub fn stationary_endpoint_samples(
    obs: &Observations,
    n: usize,
    splitter: &SeedSplitter,
    max_attempts: u64,
) -> Result<EndpointSamples> {
    if obs.categories() != 2 {
        return Err(Error::domain(
            "endpoint samples need exactly two categories",
        ));
    }
    if obs.counts().contains(&0) {
        return Err(Error::domain(
            "endpoint samples need both categories observed",
        ));
    }
    let (draws, attempts) = sample_many(obs, n, splitter, max_attempts)?;
    let values = draws
        .iter()
        .map(|d| match d.feasible {
            FeasibleThetaSet::Interval(iv) => iv.hi,
            FeasibleThetaSet::Polytope { .. } => unreachable!("two categories give intervals"),
        })
        .collect();
    Ok(EndpointSamples { values, attempts })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleLowerUpper {
    pub probabilities: LowerUpper,
    pub attempts: u64,
}

/// Lower and upper probabilities of `assertion` from `n` oracle configurations.
pub fn lower_upper_from_oracle(
    obs: &Observations,
    assertion: &Assertion,
    n: usize,
    splitter: &SeedSplitter,
    max_attempts: u64,
) -> Result<OracleLowerUpper> {
    if assertion.coordinate() >= obs.categories() {
        return Err(Error::domain(format!(
            "assertion coordinate {} out of range for {} categories",
            assertion.coordinate(),
            obs.categories()
        )));
    }
    let (draws, attempts) = sample_many(obs, n, splitter, max_attempts)?;
    let sets: Vec<FeasibleThetaSet> = draws.into_iter().map(|d| d.feasible).collect();
    let probabilities = geometry::lower_upper_probability(&sets, assertion)?;
    Ok(OracleLowerUpper {
        probabilities,
        attempts,
    })
}
