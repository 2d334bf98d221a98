//! Beta-distribution machinery: moments, CDF, sampling and the Wasserstein-1
//! distance from a point mass.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

/// Relative step tolerance of the incomplete-beta continued fraction.
const CF_EPS: f64 = 1e-15;
const CF_MAX_ITER: usize = 10_000;
const CF_TINY: f64 = 1e-300;

/// Absolute tolerance of the adaptive Simpson rule used by [`BetaParams::w1_to_point`].
pub const W1_QUADRATURE_TOL: f64 = 1e-9;
const SIMPSON_MAX_DEPTH: u32 = 48;

/// Shape pair `(alpha, beta)` of a Beta distribution. Both shapes are positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    alpha: f64,
    beta: f64,
}

impl BetaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        // `!(x > 0)` also rejects NaN.
        if !(alpha > 0.0 && alpha.is_finite()) || !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::domain(format!(
                "Beta shapes must be positive and finite, got ({alpha}, {beta})"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    pub fn variance(&self) -> f64 {
        let s = self.alpha + self.beta;
        self.alpha * self.beta / (s * s * (s + 1.0))
    }

    /// `E[X^k] = prod_{j<k} (alpha + j) / (alpha + beta + j)`; `1` for `k = 0`.
    ///
    /// Each factor lies in `(0, 1)`, so the running product cannot overflow
    /// however large the shapes are.
    pub fn kth_moment(&self, k: u32) -> f64 {
        let s = self.alpha + self.beta;
        (0..k).fold(1.0, |acc, j| {
            let j = f64::from(j);
            acc * ((self.alpha + j) / (s + j))
        })
    }

    /// Density at `x`; zero outside `[0, 1]`.
    pub fn pdf(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        let ln = (self.alpha - 1.0) * x.ln() + (self.beta - 1.0) * (1.0 - x).ln()
            - ln_beta(self.alpha, self.beta);
        ln.exp()
    }

    /// Regularized incomplete beta function `I_x(alpha, beta)`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::domain(format!(
                "Beta CDF argument {x} outside [0, 1]"
            )));
        }
        let (a, b) = (self.alpha, self.beta);
        if x == 0.0 {
            return Ok(0.0);
        }
        if x == 1.0 {
            return Ok(1.0);
        }
        // Closed forms for the shapes the chain uses.
        if b == 1.0 {
            return Ok(x.powf(a));
        }
        if a == 1.0 {
            return Ok(1.0 - (1.0 - x).powf(b));
        }
        let ln_front = a * x.ln() + b * (1.0 - x).ln() - ln_beta(a, b);
        let front = ln_front.exp();
        let value = if x < a / (a + b) {
            front * continued_fraction(a, b, x)? / a
        } else {
            1.0 - front * continued_fraction(b, a, 1.0 - x)? / b
        };
        Ok(value.clamp(0.0, 1.0))
    }

    /// Draw one variate.
    ///
    /// `Beta(a, 1)` and `Beta(1, b)` use the exact inverse CDFs `U^(1/a)` and
    /// `1 - U^(1/b)`; other shapes use the ratio `G_a / (G_a + G_b)` of two
    /// unit-scale Gamma variates.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.beta == 1.0 {
            let u: f64 = rng.gen();
            return u.powf(1.0 / self.alpha);
        }
        if self.alpha == 1.0 {
            let u: f64 = rng.gen();
            return 1.0 - u.powf(1.0 / self.beta);
        }
        // Shapes were validated in `new`, so the Gamma constructors succeed.
        let ga = Gamma::new(self.alpha, 1.0).expect("positive shape");
        let gb = Gamma::new(self.beta, 1.0).expect("positive shape");
        loop {
            let x = ga.sample(rng);
            let y = gb.sample(rng);
            let s = x + y;
            // Both Gamma draws can underflow to zero for very small shapes.
            if s > 0.0 {
                return x / s;
            }
        }
    }

    /// `W1(δ_z, Beta(alpha, beta)) = E|Z - z|`.
    ///
    /// Computed as `∫_0^z F(t) dt + ∫_z^1 (1 - F(t)) dt` by adaptive Simpson
    /// quadrature with absolute tolerance [`W1_QUADRATURE_TOL`]. At the
    /// endpoints the value is the exact mean (`z = 0`) or `1 - mean` (`z = 1`).
    pub fn w1_to_point(&self, z: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::domain(format!("point {z} outside [0, 1]")));
        }
        if z == 0.0 {
            return Ok(self.mean());
        }
        if z == 1.0 {
            return Ok(1.0 - self.mean());
        }
        // Since ∫_0^1 (1 - F) = mean, the two integrals collapse to
        // |mean - z| plus twice the tail on the near side of the mean. The
        // tail integrand is nonnegative, so the result never drops below
        // |mean - z| even with quadrature error.
        let m = self.mean();
        let tail = if z < m {
            adaptive_simpson(|t| self.cdf(t), 0.0, z, W1_QUADRATURE_TOL / 2.0)?
        } else {
            adaptive_simpson(
                |t| self.cdf(t).map(|f| 1.0 - f),
                z,
                1.0,
                W1_QUADRATURE_TOL / 2.0,
            )?
        };
        Ok((m - z).abs() + 2.0 * tail.max(0.0))
    }
}

pub(crate) fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn continued_fraction(a: f64, b: f64, x: f64) -> Result<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let guard = |v: f64| if v.abs() < CF_TINY { CF_TINY } else { v };

    let mut c = 1.0;
    let mut d = 1.0 / guard(1.0 - qab * x / qap);
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 / guard(1.0 + aa * d);
        c = guard(1.0 + aa / c);
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 / guard(1.0 + aa * d);
        c = guard(1.0 + aa / c);
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < CF_EPS {
            return Ok(h);
        }
    }
    Err(Error::numeric(format!(
        "incomplete beta continued fraction did not converge for a={a}, b={b}, x={x} \
         after {CF_MAX_ITER} iterations"
    )))
}

/// Adaptive Simpson quadrature of a fallible integrand on `[a, b]`.
pub(crate) fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, SIMPSON_MAX_DEPTH).map_err(|_| {
        Error::numeric(format!(
            "adaptive Simpson on [{a}, {b}] did not reach tolerance {tol:e} \
                 within depth {SIMPSON_MAX_DEPTH}"
        ))
    })
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if diff.abs() <= 15.0 * tol {
        return Ok(left + right + diff / 15.0);
    }
    if depth == 0 {
        return Err(Error::numeric("depth exhausted"));
    }
    Ok(
        simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
            + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?,
    )
}
