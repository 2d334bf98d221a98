//! Categorical Dempster–Shafer geometry on the probability simplex.
//!
//! For a parameter `θ` in the `K`-simplex, the sub-simplex `Δ_k(θ)` has the
//! vertices of the simplex except that vertex `k` is replaced by `θ`. Writing
//! `u = λ_k θ + Σ_{j≠k} λ_j e_j` with `λ >= 0` shows
//!
//! ```text
//! u ∈ Δ_k(θ)  ⇔  u_j θ_k >= u_k θ_j  for every j ≠ k,
//! ```
//!
//! which is the test used by [`subsimplex_contains`]. Sub-simplices are closed:
//! ties count as membership.
//!
//! Categories are 0-based throughout the library API; the labels file format
//! and the CLI use 1-based labels.

use std::io::BufRead;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lp::{LinearProgram, LpOutcome};
use crate::stats::{self, McEstimate};
use crate::{Error, Result};

/// Tolerance on the coordinate sum of a [`SimplexPoint`].
pub const SIMPLEX_SUM_TOL: f64 = 1e-12;

/// A point of the probability simplex in barycentric coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexPoint {
    coords: Vec<f64>,
}

impl SimplexPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::domain("simplex point needs at least one coordinate"));
        }
        if coords.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::domain(format!(
                "simplex coordinates must be finite and nonnegative: {coords:?}"
            )));
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_SUM_TOL {
            return Err(Error::domain(format!(
                "simplex coordinates sum to {sum}, not 1"
            )));
        }
        Ok(Self { coords })
    }

    /// Normalizes nonnegative weights with a positive total.
    ///
    /// The last coordinate is set to one minus the others, so a two-category
    /// point is exactly `(x, 1 - x)` and membership ties resolve consistently
    /// with the interval form of the feasible set.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::domain("weights must have a positive finite total"));
        }
        let mut coords: Vec<f64> = weights.iter().map(|w| w / total).collect();
        if let Some((last, head)) = coords.split_last_mut() {
            *last = (1.0 - head.iter().sum::<f64>()).max(0.0);
        }
        Self::new(coords)
    }

    /// The `i`-th unit vertex of the `dim`-simplex.
    pub fn vertex(dim: usize, i: usize) -> Result<Self> {
        if i >= dim {
            return Err(Error::domain(format!(
                "vertex {i} out of range for dimension {dim}"
            )));
        }
        let mut coords = vec![0.0; dim];
        coords[i] = 1.0;
        Ok(Self { coords })
    }

    pub fn barycenter(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("dimension must be positive"));
        }
        Self::from_weights(vec![1.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.coords[i]
    }
}

/// Observed category labels and their counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observations {
    labels: Vec<usize>,
    counts: Vec<usize>,
}

impl Observations {
    /// `labels` are 0-based categories below `categories`.
    pub fn new(labels: Vec<usize>, categories: usize) -> Result<Self> {
        if categories < 2 {
            return Err(Error::domain("need at least two categories"));
        }
        let mut counts = vec![0; categories];
        for (i, &l) in labels.iter().enumerate() {
            if l >= categories {
                return Err(Error::domain(format!(
                    "observation {i} has category {l}, only {categories} categories"
                )));
            }
            counts[l] += 1;
        }
        Ok(Self { labels, counts })
    }

    /// Observations listed category by category: `counts[0]` zeros, then ones, ...
    pub fn from_counts(counts: &[usize]) -> Result<Self> {
        let labels = counts
            .iter()
            .enumerate()
            .flat_map(|(k, &c)| std::iter::repeat(k).take(c))
            .collect();
        Self::new(labels, counts.len())
    }

    /// Reads one 1-based integer label per line. Blank lines are skipped.
    ///
    /// The number of categories is `categories` when given, otherwise the
    /// largest label seen (at least two).
    pub fn parse<R: BufRead>(reader: R, categories: Option<usize>) -> Result<Self> {
        let mut labels = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line?;
            let text = line.trim();
            if text.is_empty() {
                continue;
            }
            let label: usize = text.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("expected a positive integer label, found {text:?}"),
            })?;
            if label == 0 {
                return Err(Error::Parse {
                    line: line_no,
                    message: "labels are 1-based; found 0".into(),
                });
            }
            if let Some(k) = categories {
                if label > k {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("label {label} exceeds the {k} categories"),
                    });
                }
            }
            labels.push(label - 1);
        }
        let k =
            categories.unwrap_or_else(|| labels.iter().map(|l| l + 1).max().unwrap_or(2).max(2));
        Self::new(labels, k)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn categories(&self) -> usize {
        self.counts.len()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// A copy with one more observation appended.
    pub fn with_observation(&self, category: usize) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.push(category);
        Self::new(labels, self.categories())
    }
}

/// A closed interval `[lo, hi]`; empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo.max(other.lo) <= self.hi.min(other.hi)
    }
}

/// The constraints `u_j θ_k - u_k θ_j >= 0 (j ≠ k)` contributed by one observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintGroup {
    pub observation: usize,
    pub category: usize,
    pub point: SimplexPoint,
}

/// The polytope `F_u` of parameters consistent with a configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FeasibleThetaSet {
    /// Two categories: the range of `θ_0`.
    Interval(Interval),
    /// Three or more categories: the simplex cut by homogeneous constraints.
    Polytope {
        categories: usize,
        groups: Vec<ConstraintGroup>,
    },
}

impl FeasibleThetaSet {
    pub fn categories(&self) -> usize {
        match self {
            FeasibleThetaSet::Interval(_) => 2,
            FeasibleThetaSet::Polytope { categories, .. } => *categories,
        }
    }

    /// Does `theta` satisfy every constraint of the set?
    pub fn contains(&self, theta: &SimplexPoint) -> Result<bool> {
        match self {
            FeasibleThetaSet::Interval(iv) => {
                if theta.dim() != 2 {
                    return Err(Error::domain("expected a two-category parameter"));
                }
                let t = theta.coord(0);
                Ok(iv.lo <= t && t <= iv.hi)
            }
            FeasibleThetaSet::Polytope { groups, .. } => {
                for g in groups {
                    if !subsimplex_contains(theta, g.category, &g.point)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }

    /// Equality-form program in `(θ, slack)` with `Σ θ = 1`.
    fn program(categories: usize, groups: &[ConstraintGroup]) -> Result<LinearProgram> {
        let k = categories;
        let n_rows = groups.len() * (k - 1);
        let n_vars = k + n_rows;
        let mut lp = LinearProgram::new(n_vars);
        let mut simplex_row = vec![0.0; n_vars];
        simplex_row[..k].fill(1.0);
        lp.add_equality(simplex_row, 1.0)?;
        let mut slack = k;
        for g in groups {
            let u = g.point.coords();
            for j in (0..k).filter(|&j| j != g.category) {
                let mut row = vec![0.0; n_vars];
                row[g.category] += u[j];
                row[j] -= u[g.category];
                row[slack] = -1.0;
                slack += 1;
                lp.add_equality(row, 0.0)?;
            }
        }
        Ok(lp)
    }
}

/// `u ∈ Δ_k(θ)` for 0-based category `k`.
pub fn subsimplex_contains(theta: &SimplexPoint, k: usize, u: &SimplexPoint) -> Result<bool> {
    let dim = theta.dim();
    if u.dim() != dim {
        return Err(Error::domain(format!(
            "dimension mismatch: θ has {dim} coordinates, u has {}",
            u.dim()
        )));
    }
    if k >= dim {
        return Err(Error::domain(format!(
            "category {k} out of range for dimension {dim}"
        )));
    }
    let (tk, uk) = (theta.coord(k), u.coord(k));
    Ok((0..dim)
        .filter(|&j| j != k)
        .all(|j| u.coord(j) * tk >= uk * theta.coord(j)))
}

/// The feasible set `F_u = {θ : u_n ∈ Δ_{x_n}(θ) for every n}`.
///
/// With two categories this is the interval
/// `[max_{x_n = 0} u_{n,0}, min_{x_n = 1} u_{n,0}]`, where an empty group
/// contributes `0` (resp. `1`).
pub fn feasible_set(us: &[SimplexPoint], obs: &Observations) -> Result<FeasibleThetaSet> {
    if us.len() != obs.len() {
        return Err(Error::domain(format!(
            "{} points for {} observations",
            us.len(),
            obs.len()
        )));
    }
    let k = obs.categories();
    if let Some(bad) = us.iter().find(|u| u.dim() != k) {
        return Err(Error::domain(format!(
            "point of dimension {} for {k} categories",
            bad.dim()
        )));
    }
    if k == 2 {
        let mut iv = Interval { lo: 0.0, hi: 1.0 };
        for (u, &label) in us.iter().zip(obs.labels()) {
            let first = u.coord(0);
            if label == 0 {
                iv.lo = iv.lo.max(first);
            } else {
                iv.hi = iv.hi.min(first);
            }
        }
        return Ok(FeasibleThetaSet::Interval(iv));
    }
    let groups = us
        .iter()
        .zip(obs.labels())
        .enumerate()
        .map(|(observation, (u, &category))| ConstraintGroup {
            observation,
            category,
            point: u.clone(),
        })
        .collect();
    Ok(FeasibleThetaSet::Polytope {
        categories: k,
        groups,
    })
}

pub fn is_nonempty(fs: &FeasibleThetaSet) -> Result<bool> {
    match fs {
        FeasibleThetaSet::Interval(iv) => Ok(!iv.is_empty()),
        FeasibleThetaSet::Polytope { categories, groups } => {
            if groups.len() <= 1 {
                // θ = u satisfies a single group with equality.
                return Ok(true);
            }
            let lp = FeasibleThetaSet::program(*categories, groups)?;
            Ok(lp.find_feasible()?.is_some())
        }
    }
}

/// `[min θ_j, max θ_j]` over a nonempty feasible set.
pub fn coordinate_bounds(fs: &FeasibleThetaSet, j: usize) -> Result<Interval> {
    let k = fs.categories();
    if j >= k {
        return Err(Error::domain(format!(
            "coordinate {j} out of range for {k} categories"
        )));
    }
    match fs {
        FeasibleThetaSet::Interval(iv) => {
            if iv.is_empty() {
                return Err(Error::Precondition(
                    "bounds of an empty feasible set".into(),
                ));
            }
            Ok(if j == 0 {
                *iv
            } else {
                Interval {
                    lo: 1.0 - iv.hi,
                    hi: 1.0 - iv.lo,
                }
            })
        }
        FeasibleThetaSet::Polytope { categories, groups } => {
            let lp = FeasibleThetaSet::program(*categories, groups)?;
            let mut objective = vec![0.0; lp.n_vars()];
            objective[j] = 1.0;
            let solve = |outcome: LpOutcome| match outcome {
                LpOutcome::Optimal { value, .. } => Ok(Some(value.clamp(0.0, 1.0))),
                LpOutcome::Infeasible => Ok(None),
                LpOutcome::Unbounded => Err(Error::numeric(format!(
                    "coordinate bound reported unbounded on the simplex; constraints:\n{}",
                    lp.dump()
                ))),
            };
            let lo = solve(lp.minimize(&objective)?)?;
            let hi = solve(lp.maximize(&objective)?)?;
            match (lo, hi) {
                (Some(lo), Some(hi)) => Ok(Interval { lo, hi }),
                _ => Err(Error::Precondition(
                    "bounds of an empty feasible set".into(),
                )),
            }
        }
    }
}

/// An assertion `θ_j ∈ [lo, hi]` about the parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    coordinate: usize,
    range: Interval,
}

impl Assertion {
    pub fn new(coordinate: usize, lo: f64, hi: f64) -> Result<Self> {
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(Error::domain(format!(
                "assertion interval [{lo}, {hi}] is not a closed subinterval of [0, 1]"
            )));
        }
        Ok(Self {
            coordinate,
            range: Interval { lo, hi },
        })
    }

    pub fn coordinate(&self) -> usize {
        self.coordinate
    }

    pub fn range(&self) -> Interval {
        self.range
    }
}

/// Monte Carlo lower (belief) and upper (plausibility) probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerUpper {
    pub lower: f64,
    pub upper: f64,
    pub samples: usize,
}

impl LowerUpper {
    pub fn lower_estimate(&self) -> McEstimate {
        stats::proportion(
            (self.lower * self.samples as f64).round() as u64,
            self.samples as u64,
        )
    }

    pub fn upper_estimate(&self) -> McEstimate {
        stats::proportion(
            (self.upper * self.samples as f64).round() as u64,
            self.samples as u64,
        )
    }
}

/// Fraction of feasible sets whose coordinate range lies inside (lower) or
/// meets (upper) the assertion.
pub fn lower_upper_probability(
    feasible_sets: &[FeasibleThetaSet],
    assertion: &Assertion,
) -> Result<LowerUpper> {
    if feasible_sets.is_empty() {
        return Err(Error::domain("no feasible sets supplied"));
    }
    let bounds: Vec<Interval> = feasible_sets
        .par_iter()
        .map(|fs| coordinate_bounds(fs, assertion.coordinate))
        .collect::<Result<_>>()?;
    let (mut inside, mut meets) = (0usize, 0usize);
    for b in &bounds {
        if assertion.range.contains_interval(b) {
            inside += 1;
        }
        if assertion.range.intersects(b) {
            meets += 1;
        }
    }
    let n = bounds.len() as f64;
    Ok(LowerUpper {
        lower: inside as f64 / n,
        upper: meets as f64 / n,
        samples: bounds.len(),
    })
}
