//! Birthday and coupon-collector probabilities for `n` balls in `k` boxes,
//! with equal box probabilities ("classical") or box probabilities drawn from
//! the flat Dirichlet prior on the simplex ("flat prior").
//!
//! Under the flat prior the ball sequence is a Pólya urn: ball `t` (with `t`
//! balls already placed) lands in a box with probability proportional to one
//! plus that box's current count. Equivalently it copies a uniformly chosen
//! earlier ball with probability `t / (t + k)` and otherwise picks a uniform
//! box.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rng::SeedSplitter;
use crate::stats::{self, McEstimate};
use crate::{Error, Result};

/// Default replicate count of the flat-prior coupon simulation.
pub const DEFAULT_COUPON_REPLICATES: usize = 2000;

/// `n` balls dropped into `k >= 1` boxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxModel {
    k: u64,
    n: u64,
}

impl BoxModel {
    pub fn new(k: u64, n: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("need at least one box"));
        }
        Ok(Self { k, n })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn n(&self) -> u64 {
        self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Classical,
    FlatPrior,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Classical => "classical",
            Method::FlatPrior => "flat-prior",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Method::Classical),
            "flat-prior" => Ok(Method::FlatPrior),
            other => Err(Error::domain(format!(
                "unknown method {other:?}; expected classical or flat-prior"
            ))),
        }
    }
}

/// `P(all balls in distinct boxes) = prod_{i=1}^{n-1} (1 - i/k)`.
pub fn birthday_prob_classical(m: BoxModel) -> f64 {
    if m.n > m.k {
        return 0.0;
    }
    let k = m.k as f64;
    (1..m.n).fold(1.0, |acc, i| acc * (1.0 - i as f64 / k))
}

/// Flat-prior `P(all distinct) = prod_{i=0}^{n-1} (k - i) / (k + i)`: ball `i`
/// avoids the occupied boxes with urn probability `(k - i) / (k + i)`.
pub fn birthday_prob_uniform_prior(m: BoxModel) -> f64 {
    if m.n > m.k {
        return 0.0;
    }
    let k = m.k as f64;
    (0..m.n).fold(1.0, |acc, i| {
        let i = i as f64;
        acc * ((k - i) / (k + i))
    })
}

/// `P(every box occupied)` with equal box probabilities, by forward dynamic
/// programming over the number of occupied boxes. Equivalent to
/// `Σ_j (-1)^j C(k, j) (1 - j/k)^n` without its catastrophic cancellation.
pub fn coupon_prob_classical(m: BoxModel) -> f64 {
    if m.n < m.k {
        return 0.0;
    }
    let k = m.k as usize;
    let kf = m.k as f64;
    // dist[d] = P(d boxes occupied); only d <= min(t, k) can be nonzero.
    let mut dist = vec![0.0f64; k + 1];
    dist[0] = 1.0;
    for t in 0..m.n {
        let top = (t as usize + 1).min(k);
        for d in (1..=top).rev() {
            let stay = dist[d] * (d as f64 / kf);
            let enter = dist[d - 1] * ((k - d + 1) as f64 / kf);
            dist[d] = stay + enter;
        }
        dist[0] = 0.0;
    }
    dist[k]
}

/// Exact flat-prior coverage probability `prod_{i=0}^{k-1} (n - i) / (n + i)`.
///
/// Under the flat prior the occupancy vector is uniform over the
/// `C(n + k - 1, k - 1)` compositions of `n`; `C(n - 1, k - 1)` of them leave
/// no box empty.
pub fn coupon_prob_uniform_prior_exact(m: BoxModel) -> f64 {
    if m.n < m.k {
        return 0.0;
    }
    let n = m.n as f64;
    (0..m.k).fold(1.0, |acc, i| {
        let i = i as f64;
        acc * ((n - i) / (n + i))
    })
}

/// Monte Carlo flat-prior coverage probability via the sequential urn.
///
/// With `d` boxes occupied and `t` balls placed, the next ball opens a new box
/// exactly when it is a fresh draw (probability `k / (t + k)`) that lands in one
/// of the `k - d` empty boxes, i.e. with probability `(k - d) / (t + k)`. Each
/// draw therefore costs one uniform. Replicate `i` uses stream `i` of `splitter`.
pub fn coupon_prob_uniform_prior(
    m: BoxModel,
    replicates: usize,
    splitter: &SeedSplitter,
) -> Result<McEstimate> {
    if replicates == 0 {
        return Err(Error::domain("need at least one replicate"));
    }
    if m.n < m.k {
        return Ok(McEstimate {
            estimate: 0.0,
            std_error: 0.0,
        });
    }
    let covered: u64 = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = splitter.stream(i as u64);
            u64::from(urn_covers(m, &mut rng))
        })
        .sum();
    Ok(stats::proportion(covered, replicates as u64))
}

fn urn_covers<R: Rng + ?Sized>(m: BoxModel, rng: &mut R) -> bool {
    let k = m.k as f64;
    let mut occupied = 0u64;
    for t in 0..m.n {
        if occupied == m.k {
            return true;
        }
        let u: f64 = rng.gen();
        if u * (t as f64 + k) < (m.k - occupied) as f64 {
            occupied += 1;
        }
    }
    occupied == m.k
}

/// The two adjacent `n` values straddling a target probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// Last `n` on the starting side of the target.
    pub before: (u64, f64),
    /// First `n` strictly past the target.
    pub after: (u64, f64),
}

const THRESHOLD_LIMIT: u64 = 1 << 48;
const MONOTONE_SLACK: f64 = 1e-12;

/// Smallest `n` at which a monotone `prob_fn` passes `target`.
///
/// The direction is read from `prob_fn(0)`: a function starting above the
/// target is treated as nonincreasing and the crossing is the first `n` with
/// `prob_fn(n) < target`; otherwise the first `n` with `prob_fn(n) > target`.
/// Exponential search brackets the crossing and bisection pins it down; every
/// evaluation is checked against monotonicity.
pub fn find_threshold_n<F>(mut prob_fn: F, target: f64) -> Result<Crossing>
where
    F: FnMut(u64) -> Result<f64>,
{
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::domain(format!("target {target} must lie in (0, 1)")));
    }
    let start = prob_fn(0)?;
    if start == target {
        return Err(Error::domain("probability at n = 0 equals the target"));
    }
    let decreasing = start > target;
    let crossed = |p: f64| if decreasing { p < target } else { p > target };
    let ordered = |earlier: f64, later: f64| {
        if decreasing {
            later <= earlier + MONOTONE_SLACK
        } else {
            later >= earlier - MONOTONE_SLACK
        }
    };
    let non_monotone = |a: u64, b: u64| {
        Error::domain(format!(
            "probability is not monotone between n = {a} and n = {b}"
        ))
    };

    let (mut lo, mut p_lo) = (0u64, start);
    let mut hi = 1u64;
    let mut p_hi;
    loop {
        p_hi = prob_fn(hi)?;
        if !ordered(p_lo, p_hi) {
            return Err(non_monotone(lo, hi));
        }
        if crossed(p_hi) {
            break;
        }
        lo = hi;
        p_lo = p_hi;
        hi = hi
            .checked_mul(2)
            .filter(|&h| h <= THRESHOLD_LIMIT)
            .ok_or_else(|| {
                Error::domain(format!(
                    "probability does not cross {target} below n = {THRESHOLD_LIMIT}"
                ))
            })?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let p = prob_fn(mid)?;
        if !ordered(p_lo, p) || !ordered(p, p_hi) {
            return Err(non_monotone(lo, hi));
        }
        if crossed(p) {
            hi = mid;
            p_hi = p;
        } else {
            lo = mid;
            p_lo = p;
        }
    }
    Ok(Crossing {
        before: (lo, p_lo),
        after: (hi, p_hi),
    })
}

/// One line of calculator output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub k: u64,
    pub n: u64,
    pub method: Method,
    pub estimate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    /// Wall-clock time; left empty unless timing was requested, because
    /// timings would make otherwise identical runs differ.
    pub runtime_ms: Option<f64>,
}
