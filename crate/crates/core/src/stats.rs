//! Goodness-of-fit tests and small estimators shared by the simulation modules.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Smallest sample size accepted by the Kolmogorov–Smirnov tests. Critical
/// values come from the asymptotic Kolmogorov law, which is only trusted at
/// this scale.
pub const MIN_KS_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
}

impl KsTest {
    pub fn rejects_at(&self, level: f64) -> bool {
        self.p_value < level
    }
}

/// Survival function `P(K > lambda)` of the Kolmogorov distribution.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi theta form, rapidly convergent for small lambda.
        let c = -std::f64::consts::PI * std::f64::consts::PI / (8.0 * lambda * lambda);
        let s: f64 = (1..=20)
            .map(|j| {
                let odd = (2 * j - 1) as f64;
                (c * odd * odd).exp()
            })
            .sum();
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / lambda * s;
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let s: f64 = (1..=100)
            .map(|j| {
                let jf = j as f64;
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * jf * jf * lambda * lambda).exp()
            })
            .sum();
        (2.0 * s).clamp(0.0, 1.0)
    }
}

fn check_size(n: usize, what: &str) -> Result<()> {
    if n < MIN_KS_SAMPLES {
        return Err(Error::domain(format!(
            "{what} has {n} points; KS tests need at least {MIN_KS_SAMPLES}"
        )));
    }
    Ok(())
}

fn sorted(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::domain("sample contains NaN"));
    }
    let mut v = xs.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    Ok(v)
}

/// Two-sample Kolmogorov–Smirnov test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsTest> {
    check_size(a.len(), "first sample")?;
    check_size(b.len(), "second sample")?;
    let a = sorted(a)?;
    let b = sorted(b)?;
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let effective = (n * m / (n + m)).sqrt();
    Ok(KsTest {
        statistic: d,
        p_value: kolmogorov_survival(effective * d),
    })
}

/// One-sample Kolmogorov–Smirnov test against a continuous CDF.
pub fn ks_one_sample<F>(samples: &[f64], cdf: F) -> Result<KsTest>
where
    F: Fn(f64) -> Result<f64>,
{
    check_size(samples.len(), "sample")?;
    let xs = sorted(samples)?;
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x)?;
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(KsTest {
        statistic: d,
        p_value: kolmogorov_survival(n.sqrt() * d),
    })
}

/// A Monte Carlo mean together with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

impl McEstimate {
    /// `|estimate - target| <= sigmas * std_error`.
    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        (self.estimate - target).abs() <= sigmas * self.std_error
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_with_error(xs: &[f64]) -> McEstimate {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return McEstimate {
            estimate: f64::NAN,
            std_error: f64::NAN,
        };
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return McEstimate {
            estimate: mean,
            std_error: 0.0,
        };
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    McEstimate {
        estimate: mean,
        std_error: (var / n).sqrt(),
    }
}

/// Estimate of `E[X^k]` from a sample, with standard error.
pub fn raw_moment(xs: &[f64], k: i32) -> McEstimate {
    let powers: Vec<f64> = xs.iter().map(|x| x.powi(k)).collect();
    mean_with_error(&powers)
}

/// Estimate of a Bernoulli probability from `hits` successes in `trials`.
pub fn proportion(hits: u64, trials: u64) -> McEstimate {
    if trials == 0 {
        return McEstimate {
            estimate: f64::NAN,
            std_error: f64::NAN,
        };
    }
    let p = hits as f64 / trials as f64;
    McEstimate {
        estimate: p,
        std_error: (p * (1.0 - p) / trials as f64).sqrt(),
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn regression_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::domain(
            "regression needs two equal-length series of length >= 2",
        ));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("regression abscissae are all equal"));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedSplitter;
    use rand::Rng;

    #[test]
    fn kolmogorov_survival_reference_points() {
        // Classical critical values of the Kolmogorov distribution.
        assert!((kolmogorov_survival(1.3581) - 0.05).abs() < 2e-4);
        assert!((kolmogorov_survival(1.6276) - 0.01).abs() < 1e-4);
        assert!((kolmogorov_survival(1.9495) - 0.001).abs() < 1e-5);
        assert_eq!(kolmogorov_survival(0.0), 1.0);
        assert!(kolmogorov_survival(0.2) > 0.999_99);
        // Both series agree at the switch point.
        let lo = kolmogorov_survival(1.18 - 1e-12);
        let hi = kolmogorov_survival(1.18);
        assert!((lo - hi).abs() < 1e-10);
    }

    #[test]
    fn ks_rejects_small_samples() {
        let xs = vec![0.5; 100];
        assert!(ks_two_sample(&xs, &xs).is_err());
        assert!(ks_one_sample(&xs, Ok).is_err());
    }

    #[test]
    fn uniform_sample_passes_and_shifted_fails() {
        let mut rng = SeedSplitter::new(5).stream(0);
        let n = 100_000;
        let u: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
        let uniform_cdf = |x: f64| Ok(x.clamp(0.0, 1.0));
        assert!(!ks_one_sample(&u, uniform_cdf).unwrap().rejects_at(0.001));
        assert!(!ks_two_sample(&u, &v).unwrap().rejects_at(0.001));
        let shifted: Vec<f64> = v.iter().map(|x| x * 0.98).collect();
        assert!(ks_two_sample(&u, &shifted).unwrap().rejects_at(0.001));
    }

    #[test]
    fn two_sample_statistic_handles_ties() {
        let a: Vec<f64> = (0..10_000).map(|i| (i % 10) as f64).collect();
        assert_eq!(ks_two_sample(&a, &a).unwrap().statistic, 0.0);
    }

    #[test]
    fn regression_recovers_slope() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 0.5 * x).collect();
        assert!((regression_slope(&xs, &ys).unwrap() + 0.5).abs() < 1e-14);
    }

    #[test]
    fn proportion_error() {
        let p = proportion(50, 100);
        assert_eq!(p.estimate, 0.5);
        assert!((p.std_error - 0.05).abs() < 1e-15);
    }
}
