//! The two-category chain `Z' = B1 (1 - B2) Z + B2` with
//! `B1 ~ Beta(N1, 1)` and `B2 ~ Beta(1, N2)` drawn afresh at every step.
//!
//! Closed forms:
//!
//! * stationary law `π = Beta(N1 + 1, N2)` with mean `m = (N1 + 1) / (N1 + N2 + 1)`;
//! * contraction rate `ρ = N1 N2 / ((N1 + 1)(N2 + 1))`;
//! * `E Z(t) = ρ^t (z0 - m) + m`;
//! * `|z0 - m| ρ^t <= W1(P^t(z0, ·), π) <= ρ^t E|Z - z0|`, with equality at
//!   `z0 ∈ {0, 1}`;
//! * `sup_z W1(P^t(z, ·), π) = max(N1 + 1, N2) / (N1 + N2 + 1) · ρ^t`.
//!
//! The lower bound decays at rate `ρ`, the rate forced by the mean recursion.
//! A base of `(N1 + 1) / (N1 + N2 + 1)` would not be a valid bound: for
//! `N1 = N2 = 1` and `z0 = 0` it gives `(2/3)^(t+1)`, which exceeds the exact
//! `W1 = (2/3)(1/4)^t` for every `t >= 1`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beta::BetaParams;
use crate::rng::SeedSplitter;
use crate::{Error, Result};

/// Category counts `(N1, N2)`, both at least one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainParams {
    n1: u32,
    n2: u32,
}

impl ChainParams {
    pub fn new(n1: u32, n2: u32) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return Err(Error::domain(format!(
                "category counts must be positive, got ({n1}, {n2})"
            )));
        }
        Ok(Self { n1, n2 })
    }

    pub fn n1(&self) -> u32 {
        self.n1
    }

    pub fn n2(&self) -> u32 {
        self.n2
    }

    /// Contraction rate `N1 N2 / ((N1 + 1)(N2 + 1))`.
    pub fn rho(&self) -> f64 {
        let (a, b) = (f64::from(self.n1), f64::from(self.n2));
        (a / (a + 1.0)) * (b / (b + 1.0))
    }

    /// Stationary mean `(N1 + 1) / (N1 + N2 + 1)`.
    pub fn stationary_mean(&self) -> f64 {
        stationary_distribution(*self).mean()
    }

    fn b1_law(&self) -> BetaParams {
        BetaParams::new(f64::from(self.n1), 1.0).expect("positive count")
    }

    fn b2_law(&self) -> BetaParams {
        BetaParams::new(1.0, f64::from(self.n2)).expect("positive count")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainState {
    pub z: f64,
    pub t: u64,
}

impl ChainState {
    pub fn new(z: f64) -> Result<Self> {
        check_unit(z)?;
        Ok(Self { z, t: 0 })
    }
}

fn check_unit(z: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::domain(format!("state {z} outside [0, 1]")));
    }
    Ok(())
}

/// The affine map with fixed coefficients. Rounding can push `b1(1-b2)z + b2`
/// one ulp above one, so the result is clamped.
#[inline]
pub fn apply_map(z: f64, b1: f64, b2: f64) -> f64 {
    (b1 * (1.0 - b2) * z + b2).min(1.0)
}

/// Draws the coefficient pair `(B1, B2)` of one step.
#[inline]
pub fn draw_coefficients<R: Rng + ?Sized>(params: ChainParams, rng: &mut R) -> (f64, f64) {
    let b1 = params.b1_law().sample(rng);
    let b2 = params.b2_law().sample(rng);
    (b1, b2)
}

pub fn step_with(state: ChainState, b1: f64, b2: f64) -> ChainState {
    ChainState {
        z: apply_map(state.z, b1, b2),
        t: state.t + 1,
    }
}

pub fn step<R: Rng + ?Sized>(params: ChainParams, state: ChainState, rng: &mut R) -> ChainState {
    let (b1, b2) = draw_coefficients(params, rng);
    step_with(state, b1, b2)
}

/// `Beta(N1 + 1, N2)`.
pub fn stationary_distribution(params: ChainParams) -> BetaParams {
    BetaParams::new(f64::from(params.n1) + 1.0, f64::from(params.n2)).expect("positive shapes")
}

fn rho_pow(params: ChainParams, t: u32) -> f64 {
    params.rho().powi(t.min(i32::MAX as u32) as i32)
}

/// Exact `E Z(t)` started from `z0`.
pub fn expected_value_at(params: ChainParams, t: u32, z0: f64) -> Result<f64> {
    check_unit(z0)?;
    let m = params.stationary_mean();
    Ok(rho_pow(params, t) * (z0 - m) + m)
}

/// `ρ^t · W1(δ_{z0}, π)`.
pub fn w1_upper_bound(params: ChainParams, t: u32, z0: f64) -> Result<f64> {
    let w = stationary_distribution(params).w1_to_point(z0)?;
    Ok(rho_pow(params, t) * w)
}

/// `|z0 - m| · ρ^t`, the first-moment lower bound.
pub fn w1_lower_bound(params: ChainParams, t: u32, z0: f64) -> Result<f64> {
    check_unit(z0)?;
    let m = params.stationary_mean();
    Ok(rho_pow(params, t) * (z0 - m).abs())
}

/// `sup_z W1(P^t(z, ·), π) = max(N1 + 1, N2) / (N1 + N2 + 1) · ρ^t`.
pub fn worst_case_w1(params: ChainParams, t: u32) -> f64 {
    let (a, b) = (f64::from(params.n1), f64::from(params.n2));
    rho_pow(params, t) * ((a + 1.0).max(b) / (a + b + 1.0))
}

/// Exact W1 between two equally sized empirical measures given as sorted
/// samples: the mean absolute difference of matched order statistics.
pub fn empirical_w1(sorted_a: &[f64], sorted_b: &[f64]) -> Result<f64> {
    if sorted_a.len() != sorted_b.len() {
        return Err(Error::domain(format!(
            "sample sizes differ: {} vs {}",
            sorted_a.len(),
            sorted_b.len()
        )));
    }
    if sorted_a.is_empty() {
        return Err(Error::domain("empirical W1 of empty samples"));
    }
    let is_sorted = |xs: &[f64]| xs.windows(2).all(|w| w[0] <= w[1]);
    if !is_sorted(sorted_a) || !is_sorted(sorted_b) {
        return Err(Error::domain(
            "empirical W1 expects samples sorted ascending",
        ));
    }
    let total: f64 = sorted_a
        .iter()
        .zip(sorted_b)
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok(total / sorted_a.len() as f64)
}

fn sorted_copy(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.par_sort_unstable_by(f64::total_cmp);
    v
}

/// Per-time-step summary of a trajectory ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    pub t: u32,
    pub sample_mean: f64,
    pub std_error: f64,
    pub closed_form_mean: f64,
    pub empirical_w1: f64,
    pub w1_lower: f64,
    pub w1_upper: f64,
    pub w1_worst_case: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub spec_version: u32,
    pub version: String,
    pub params: ChainParams,
    pub z0: f64,
    pub t_max: u32,
    pub replicates: usize,
    pub seed: u64,
    pub summary: Vec<StepSummary>,
    /// `states[t][replicate]`, present when recording was requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<Vec<f64>>>,
}

struct Walker {
    rng: ChaCha8Rng,
    z: f64,
    reference: f64,
}

fn spawn_walkers(params: ChainParams, z0: f64, replicates: usize, seed: u64) -> Vec<Walker> {
    let splitter = SeedSplitter::new(seed);
    let pi = stationary_distribution(params);
    (0..replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = splitter.stream(i as u64);
            let reference = pi.sample(&mut rng);
            Walker {
                rng,
                z: z0,
                reference,
            }
        })
        .collect()
}

fn advance(params: ChainParams, walkers: &mut [Walker]) {
    walkers.par_iter_mut().for_each(|w| {
        let (b1, b2) = draw_coefficients(params, &mut w.rng);
        w.z = apply_map(w.z, b1, b2);
        w.reference = apply_map(w.reference, b1, b2);
    });
}

/// Runs `replicates` independent trajectories from `z0` for `t_max` steps.
///
/// Replicate `i` draws from stream `i` of the master seed. Its first draw is a
/// reference point from the stationary law, which is then pushed through the
/// same random maps as the trajectory. The reference ensemble is an exact
/// stationary sample at every `t`; coupling it to the trajectories keeps the
/// empirical W1 estimate precise when the true distance is far below the
/// `n^{-1/2}` noise floor of independent samples.
pub fn run_trajectories(
    params: ChainParams,
    z0: f64,
    t_max: u32,
    replicates: usize,
    seed: u64,
    record_states: bool,
) -> Result<SimulationReport> {
    check_unit(z0)?;
    if replicates == 0 {
        return Err(Error::domain("need at least one replicate"));
    }
    let w1_start = stationary_distribution(params).w1_to_point(z0)?;
    let m = params.stationary_mean();
    let mut walkers = spawn_walkers(params, z0, replicates, seed);
    let mut summary = Vec::with_capacity(t_max as usize + 1);
    let mut states = record_states.then(|| Vec::with_capacity(t_max as usize + 1));

    for t in 0..=t_max {
        if t > 0 {
            advance(params, &mut walkers);
        }
        let zs: Vec<f64> = walkers.iter().map(|w| w.z).collect();
        let refs: Vec<f64> = walkers.iter().map(|w| w.reference).collect();
        let moments = crate::stats::mean_with_error(&zs);
        let rt = rho_pow(params, t);
        summary.push(StepSummary {
            t,
            sample_mean: moments.estimate,
            std_error: moments.std_error,
            closed_form_mean: rt * (z0 - m) + m,
            empirical_w1: empirical_w1(&sorted_copy(&zs), &sorted_copy(&refs))?,
            w1_lower: rt * (z0 - m).abs(),
            w1_upper: rt * w1_start,
            w1_worst_case: worst_case_w1(params, t),
        });
        if let Some(states) = states.as_mut() {
            states.push(zs);
        }
    }

    Ok(SimulationReport {
        spec_version: crate::SCHEMA_VERSION,
        version: crate::VERSION.to_string(),
        params,
        z0,
        t_max,
        replicates,
        seed,
        summary,
        states,
    })
}

/// States at time `t` of the same replicates [`run_trajectories`] would
/// produce for `seed`, without the per-step summaries.
pub fn final_states(
    params: ChainParams,
    z0: f64,
    t: u32,
    replicates: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    check_unit(z0)?;
    let splitter = SeedSplitter::new(seed);
    let pi = stationary_distribution(params);
    Ok((0..replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = splitter.stream(i as u64);
            let _reference = pi.sample(&mut rng);
            let mut z = z0;
            for _ in 0..t {
                let (b1, b2) = draw_coefficients(params, &mut rng);
                z = apply_map(z, b1, b2);
            }
            z
        })
        .collect())
}

/// Mean and repetition standard error of the empirical W1 at one time step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RepeatedW1 {
    pub t: u32,
    pub mean: f64,
    pub std_error: f64,
}

/// Repeats [`run_trajectories`] `repetitions` times with independent seeds and
/// summarizes the spread of the empirical W1 at every `t`.
pub fn repeated_empirical_w1(
    params: ChainParams,
    z0: f64,
    t_max: u32,
    replicates: usize,
    repetitions: usize,
    seed: u64,
) -> Result<Vec<RepeatedW1>> {
    if repetitions < 2 {
        return Err(Error::domain(
            "need at least two repetitions for a standard error",
        ));
    }
    let splitter = SeedSplitter::new(seed);
    let mut per_t: Vec<Vec<f64>> = vec![Vec::with_capacity(repetitions); t_max as usize + 1];
    for r in 0..repetitions {
        let rep_seed = splitter.derive(r as u64).seed();
        let report = run_trajectories(params, z0, t_max, replicates, rep_seed, false)?;
        for s in report.summary {
            per_t[s.t as usize].push(s.empirical_w1);
        }
    }
    Ok(per_t
        .iter()
        .enumerate()
        .map(|(t, xs)| {
            let e = crate::stats::mean_with_error(xs);
            RepeatedW1 {
                t: t as u32,
                mean: e.estimate,
                std_error: e.std_error,
            }
        })
        .collect())
}
