//! Empirical likelihood for the difference in means among the observed, and the
//! semi-parametric two-part test built on it.
//!
//! For one sample `y` and a hypothesised mean `mu`, the maximising weights are
//! `p_i = 1 / (n (1 + lambda (y_i - mu)))` where `lambda` solves
//! `sum (y_i - mu) / (1 + lambda (y_i - mu)) = 0`, and
//! `-2 log R(mu) = 2 sum log(1 + lambda (y_i - mu))`.
//! Two samples are tied together through a common nuisance mean `mu` and a
//! fixed difference `mu_delta`; the nuisance is profiled out by minimising the
//! sum of the two one-sample statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, PartialResult, Result};
use crate::model::{split_by_atom, Arm, TrialData};
use crate::numerics::{find_root, minimize_scalar, Interval, ToleranceSpec};
use crate::parametric::{
    binary_component, estimates_for, require_two_observed, Method, TestFlag, TestResult,
};
use crate::scalar::{mean, Real};

/// Relative margins tried, in order, when pulling the multiplier search
/// interval inside the positivity region.
const LAMBDA_MARGINS: [f64; 3] = [1e-10, 1e-13, 1e-15];

/// Tolerance on the nuisance mean when profiling.
const PROFILE_TOL: f64 = 1e-9;

/// Solution of the two-sample profile problem at a fixed `mu_delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElState<T = f64> {
    /// Multiplier for the control sample at the profiled mean.
    pub lambda1: T,
    /// Multiplier for the treatment sample.
    pub lambda2: T,
    /// Profiled nuisance mean of the control sample.
    pub mu_profile: T,
    /// `-2 log` empirical likelihood ratio; `+inf` when infeasible.
    pub w1e: T,
    pub feasible: bool,
}

fn estimating_fn<T: Real>(values: &[T], mu: T, lambda: T) -> T {
    values
        .iter()
        .map(|&y| {
            let d = y - mu;
            d / (T::one() + lambda * d)
        })
        .sum()
}

/// Lagrange multiplier for the mean constraint at `mu`.
///
/// Fails with [`Error::Hull`] unless `min(values) < mu < max(values)`.
pub fn el_lambda<T: Real>(values: &[T], mu: T) -> Result<T> {
    let hull = || Error::Hull {
        mu: mu.to_f64_lossy(),
    };
    if values.len() < 2 || !mu.is_finite() {
        return Err(hull());
    }
    let (lo_y, hi_y) = values
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &y| {
            (lo.min(y), hi.max(y))
        });
    let (d_min, d_max) = (lo_y - mu, hi_y - mu);
    if !(d_min < T::zero() && d_max > T::zero()) {
        return Err(hull());
    }
    if estimating_fn(values, mu, T::zero()) == T::zero() {
        return Ok(T::zero());
    }
    // 1 + lambda d_i > 0 for all i  <=>  lambda in (-1/d_max, -1/d_min)
    let lower = -T::one() / d_max;
    let upper = -T::one() / d_min;
    let tol = ToleranceSpec::default()
        .with_tol(T::epsilon() * T::lit(4.0))
        .with_max_iter(400);
    let tol = ToleranceSpec {
        abs_tol: T::epsilon() * (upper - lower),
        ..tol
    };
    for margin in LAMBDA_MARGINS {
        let shrink = T::one() - T::lit(margin).max(T::epsilon());
        let (lo, hi) = (lower * shrink, upper * shrink);
        // the estimating function decreases in lambda: positive at lo, negative at hi
        if estimating_fn(values, mu, lo) > T::zero() && estimating_fn(values, mu, hi) < T::zero() {
            return find_root(
                |l| estimating_fn(values, mu, l),
                Interval::new(lo, hi)?,
                &tol,
            );
        }
    }
    // root pinned against the positivity boundary: numerically on the hull
    Err(hull())
}

/// Empirical-likelihood weights at `mu`; positive and summing to one.
pub fn el_weights<T: Real>(values: &[T], mu: T) -> Result<Vec<T>> {
    let lambda = el_lambda(values, mu)?;
    let n = T::from_usize_lossy(values.len());
    Ok(values
        .iter()
        .map(|&y| T::one() / (n * (T::one() + lambda * (y - mu))))
        .collect())
}

/// One-sample `-2 log R(mu)`; `+inf` when `mu` is outside the open hull.
pub fn el_m2logr_one<T: Real>(values: &[T], mu: T) -> T {
    match el_lambda(values, mu) {
        Ok(lambda) => {
            let s: T = values.iter().map(|&y| (lambda * (y - mu)).ln_1p()).sum();
            (T::lit(2.0) * s).max(T::zero())
        }
        Err(_) => T::infinity(),
    }
}

/// Range of `mu_delta` for which the two-sample problem is feasible.
pub fn feasible_delta_range<T: Real>(observed0: &[T], observed1: &[T]) -> (T, T) {
    let (min0, max0) = min_max(observed0);
    let (min1, max1) = min_max(observed1);
    (min1 - max0, max1 - min0)
}

fn min_max<T: Real>(v: &[T]) -> (T, T) {
    v.iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &y| {
            (lo.min(y), hi.max(y))
        })
}

/// Profile statistic for the difference in means among the observed.
///
/// Minimises `el(observed0, mu) + el(observed1, mu + mu_delta)` over the nuisance
/// mean `mu`. Returns an infeasible state with `w1e = +inf` when no `mu` keeps
/// both means inside their hulls.
pub fn el_profile_w1<T: Real>(observed0: &[T], observed1: &[T], mu_delta: T) -> Result<ElState<T>> {
    if observed0.len() < 2 || observed1.len() < 2 {
        return Err(Error::Input(
            "empirical likelihood needs at least two observed values per group".into(),
        ));
    }
    let (min0, max0) = min_max(observed0);
    let (min1, max1) = min_max(observed1);
    let lo = min0.max(min1 - mu_delta);
    let hi = max0.min(max1 - mu_delta);
    let infeasible = ElState {
        lambda1: T::nan(),
        lambda2: T::nan(),
        mu_profile: T::nan(),
        w1e: T::infinity(),
        feasible: false,
    };
    if !(lo < hi) || !mu_delta.is_finite() {
        return Ok(infeasible);
    }
    let objective = |mu: T| el_m2logr_one(observed0, mu) + el_m2logr_one(observed1, mu + mu_delta);
    let tol = ToleranceSpec::default()
        .with_tol(T::lit(PROFILE_TOL).max(T::epsilon().sqrt()))
        .with_max_iter(500);
    let mu_star = match minimize_scalar(objective, Interval::new(lo, hi)?, &tol) {
        Ok(m) => m.x,
        Err(Error::Convergence { best, .. }) => T::lit(best),
        Err(e) => return Err(e),
    };
    let w1e = objective(mu_star);
    if w1e.is_infinite() {
        return Ok(infeasible);
    }
    Ok(ElState {
        lambda1: el_lambda(observed0, mu_star).unwrap_or(T::nan()),
        lambda2: el_lambda(observed1, mu_star + mu_delta).unwrap_or(T::nan()),
        mu_profile: mu_star,
        w1e,
        feasible: true,
    })
}

/// Semi-parametric two-part test: empirical likelihood for the observed values
/// plus the logistic statistic for being observed.
pub fn semiparametric_lrt<T: Real>(data: &TrialData<T>) -> Result<TestResult<T>> {
    if data.n_covariates() > 0 {
        return Err(Error::Input(
            "covariate adjustment is only available for the parametric test".into(),
        ));
    }
    let split = split_by_atom(data);
    require_two_observed(&split)?;
    let obs0 = split.observed(Arm::Control);
    let obs1 = split.observed(Arm::Treatment);
    let state = el_profile_w1(obs0, obs1, T::zero())?;
    let mu_delta_hat = mean(obs1) - mean(obs0);
    let binary = binary_component(data, &split).map_err(|e| match e {
        Error::Separation { column, .. } => Error::Separation {
            column,
            partial: Some(Box::new(PartialResult {
                w1: state.w1e.to_f64_lossy(),
                mu_delta_hat: mu_delta_hat.to_f64_lossy(),
            })),
        },
        other => other,
    })?;
    let mut flags = Vec::new();
    if !state.feasible {
        flags.push(TestFlag::ContinuousPartInfeasible);
    }
    let estimates = estimates_for(data, &split, mu_delta_hat, binary.beta_delta_hat);
    TestResult::assemble(state.w1e, binary, estimates, Method::Semiparametric, flags)
}
