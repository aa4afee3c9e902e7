//! Small statistics toolbox: proportion intervals, chi-square goodness of
//! fit, least-squares fits on log-log data, and a couple of closed forms used
//! to sanity-check the samplers.

use statrs::function::gamma::gamma_lr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Arithmetic mean. Panics on an empty slice.
pub fn mean<T: Scalar>(xs: &[T]) -> T {
    assert!(!xs.is_empty(), "mean of empty slice");
    xs.iter().copied().sum::<T>() / T::from_count(xs.len())
}

/// Half-width of a 95% normal-approximation interval for the difference of
/// two proportions, each estimated from `trials` Bernoulli samples.
pub fn two_proportion_halfwidth<T: Scalar>(p1: T, p2: T, trials: usize) -> T {
    assert!(trials > 0, "trials must be positive");
    let t = T::from_count(trials);
    let z = T::from_f64(1.96).unwrap();
    let var = p1 * (T::one() - p1) / t + p2 * (T::one() - p2) / t;
    z * var.sqrt()
}

/// Pearson chi-square statistic for observed counts against expected counts.
pub fn chi_square_statistic(observed: &[u64], expected: &[f64]) -> Result<f64> {
    if observed.len() != expected.len() {
        return Err(Error::SizeMismatch {
            expected: expected.len(),
            found: observed.len(),
        });
    }
    if observed.is_empty() {
        return Err(Error::InvalidParameter("chi-square needs at least one cell".into()));
    }
    if expected.iter().any(|&e| e <= 0.0) {
        return Err(Error::InvalidParameter(
            "expected counts must be positive".into(),
        ));
    }
    let mut stat = 0.0;
    for (&o, &e) in observed.iter().zip(expected) {
        let diff = o as f64 - e;
        stat += diff * diff / e;
    }
    Ok(stat)
}

/// Upper tail probability of a chi-square distribution with `dof` degrees of
/// freedom at `statistic`.
pub fn chi_square_pvalue(statistic: f64, dof: usize) -> Result<f64> {
    if dof == 0 {
        return Err(Error::InvalidParameter("degrees of freedom must be positive".into()));
    }
    if statistic <= 0.0 {
        return Ok(1.0);
    }
    Ok(1.0 - gamma_lr(dof as f64 / 2.0, statistic / 2.0))
}

/// Ordinary least-squares line through `points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
}

/// Fits `y = slope * x + intercept` by least squares and reports r².
///
/// Requires at least two points and at least two distinct x values. A fit
/// with zero residual on constant y reports r² = 1.
pub fn linear_fit<T: Scalar>(points: &[(T, T)]) -> Result<LinearFit<T>> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter(
            "linear fit needs at least two points".into(),
        ));
    }
    let k = T::from_count(points.len());
    let mean_x = points.iter().map(|p| p.0).sum::<T>() / k;
    let mean_y = points.iter().map(|p| p.1).sum::<T>() / k;
    let mut ss_xx = T::zero();
    let mut ss_xy = T::zero();
    let mut ss_yy = T::zero();
    for &(x, y) in points {
        let dx = x - mean_x;
        let dy = y - mean_y;
        ss_xx += dx * dx;
        ss_xy += dx * dy;
        ss_yy += dy * dy;
    }
    if ss_xx.is_zero() {
        return Err(Error::InvalidParameter(
            "linear fit needs at least two distinct x values".into(),
        ));
    }
    let slope = ss_xy / ss_xx;
    let intercept = mean_y - slope * mean_x;
    let ss_res = ss_yy - slope * ss_xy;
    let r_squared = if ss_yy.is_zero() {
        T::one()
    } else {
        T::one() - ss_res / ss_yy
    };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Probability that `q` distinct uniform samples from a set of size `n`
/// contain at least one repeated value: `1 - prod_{k<q} (1 - k/n)`.
pub fn birthday_collision_probability(n: usize, q: usize) -> f64 {
    assert!(n > 0, "n must be positive");
    let mut miss = 1.0;
    for k in 1..q {
        miss *= 1.0 - (k as f64 / n as f64).min(1.0);
    }
    1.0 - miss
}

/// Limiting probability that a fixed range value of a uniform random
/// function has exactly `k` preimages: `e^{-1} / k!`.
pub fn poisson_one_pmf(k: usize) -> f64 {
    let mut factorial = 1.0;
    for i in 2..=k {
        factorial *= i as f64;
    }
    (-1.0f64).exp() / factorial
}

/// Hoeffding bound on the failure probability of a majority vote over
/// `reps` independent trials whose acceptance gap from the threshold is
/// at least `gap`.
pub fn hoeffding_failure_bound(reps: usize, gap: f64) -> f64 {
    (-2.0 * reps as f64 * gap * gap).exp().min(1.0)
}
