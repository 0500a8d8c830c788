//! Confidence intervals and regions by inverting the likelihood-ratio statistics,
//! plus a delta-method interval for the combined-outcome mean difference.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::empirical_likelihood::{el_profile_w1, feasible_delta_range};
use crate::error::{Error, Result};
use crate::model::{split_by_atom, Arm, SplitData, TrialData};
use crate::numerics::{chisq_quantile, find_root, normal_quantile, Interval, ToleranceSpec};
use crate::parametric::{design_for, observation_indicator, require_two_observed, Method};
use crate::regression::{logistic_mle, logistic_mle_with_offset, ols_mle, Design};
use crate::scalar::{mean, sum_sq_dev, Real};

/// Maximum number of bracket doublings when searching for an interval endpoint.
const MAX_DOUBLINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    MuDelta,
    BetaDelta,
    OddsRatio,
    DeltaCombined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalFlag {
    /// No finite lower endpoint exists (or none was found).
    OpenLower,
    OpenUpper,
    /// The search reached the edge of the empirical-likelihood hull below the
    /// threshold; that side is reported as infinite.
    HullExhausted,
    /// The observation proportion of some arm is 0 or 1.
    BinaryBoundary,
    /// Plug-in variance uses a boundary proportion; consider a bootstrap interval.
    DegenerateVariance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval<T = f64> {
    pub lower: T,
    pub upper: T,
    pub estimate: T,
    pub level: T,
    pub target: Target,
    pub flags: Vec<IntervalFlag>,
}

impl<T: Real> ConfidenceInterval<T> {
    pub fn contains(&self, x: T) -> bool {
        x >= self.lower && x <= self.upper
    }

    pub fn width(&self) -> T {
        self.upper - self.lower
    }

    pub fn has_flag(&self, flag: IntervalFlag) -> bool {
        self.flags.contains(&flag)
    }
}

/// Grid evaluation of `W1(m) + W2(b)` with membership at the chi-square(2) threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceRegion<T = f64> {
    pub m_grid: Vec<T>,
    pub b_grid: Vec<T>,
    /// `w_values[i][j] = W1(m_grid[i]) + W2(b_grid[j])`.
    pub w_values: Vec<Vec<T>>,
    pub threshold: T,
    pub membership: Vec<Vec<bool>>,
    pub level: T,
    pub estimate: (T, T),
    pub method: Method,
}

impl<T: Real> ConfidenceRegion<T> {
    pub fn resolution(&self) -> usize {
        self.m_grid.len()
    }

    /// Indices of the grid cell closest to `(m, b)`.
    pub fn nearest_cell(&self, m: T, b: T) -> (usize, usize) {
        let nearest = |grid: &[T], x: T| {
            grid.iter()
                .enumerate()
                .min_by(|(_, a), (_, c)| {
                    (**a - x)
                        .abs()
                        .partial_cmp(&(**c - x).abs())
                        .expect("finite grid")
                })
                .map_or(0, |(i, _)| i)
        };
        (nearest(&self.m_grid, m), nearest(&self.b_grid, b))
    }
}

enum ContinuousKind<T> {
    Gaussian {
        y: Vec<T>,
        treated: Vec<T>,
        reduced: Design<T>,
        rss_full: T,
    },
    Empirical {
        observed0: Vec<T>,
        observed1: Vec<T>,
        feasible: (T, T),
    },
}

/// The two profile statistics `W1(m)` and `W2(b)` for one dataset.
///
/// `W1` profiles the nuisance parameters of the observed-value model at a
/// fixed difference in means `m`; `W2` profiles the logistic intercept (and
/// covariates) at a fixed log odds-ratio `b`.
pub struct ProfileSurface<T = f64> {
    method: Method,
    continuous: ContinuousKind<T>,
    mu_delta_hat: T,
    mu_delta_se: T,
    binary: BinaryProfile<T>,
}

struct BinaryProfile<T> {
    design: Design<T>,
    a: Vec<T>,
    treated: Vec<T>,
    max_loglik: T,
    estimate: T,
    se: T,
    constant: bool,
}

fn saturated_two_group_loglik<T: Real>(split: &SplitData<T>) -> T {
    (0..2)
        .map(|g| {
            let k = T::from_usize_lossy(split.n_obs[g]);
            let n = T::from_usize_lossy(split.n_total[g]);
            let term = |c: T, p: T| if c > T::zero() { c * p.ln() } else { T::zero() };
            term(k, k / n) + term(n - k, (n - k) / n)
        })
        .sum()
}

impl<T: Real> BinaryProfile<T> {
    fn new(data: &TrialData<T>, split: &SplitData<T>) -> Result<Self> {
        let p = data.n_covariates();
        let a = observation_indicator(data);
        let treated: Vec<T> = data.records().iter().map(|r| r.arm.indicator()).collect();
        let design = design_for(data.records().iter(), false, p);
        let constant = split.indicator_constant();
        let (k, n) = (split.n_obs, split.n_total);
        let se = if (0..2).all(|g| k[g] > 0 && k[g] < n[g]) {
            (0..2)
                .map(|g| {
                    T::one() / T::from_usize_lossy(k[g])
                        + T::one() / T::from_usize_lossy(n[g] - k[g])
                })
                .sum::<T>()
                .sqrt()
        } else {
            T::one()
        };
        let (max_loglik, estimate) = if constant {
            (T::zero(), T::nan())
        } else if p == 0 && split.indicator_on_boundary() {
            // the maximum is approached as the log odds-ratio diverges
            let direction = if k[1] == n[1] || k[0] == 0 {
                T::one()
            } else {
                -T::one()
            };
            (saturated_two_group_loglik(split), direction * T::infinity())
        } else {
            let full = logistic_mle(&design_for(data.records().iter(), true, p), &a)?;
            (full.loglik, full.coef[1])
        };
        Ok(Self {
            design,
            a,
            treated,
            max_loglik,
            estimate,
            se,
            constant,
        })
    }

    fn statistic(&self, b: T) -> T {
        if self.constant {
            return T::zero();
        }
        if !b.is_finite() {
            return if b == self.estimate {
                T::zero()
            } else {
                T::infinity()
            };
        }
        let offset: Vec<T> = self.treated.iter().map(|&r| r * b).collect();
        match logistic_mle_with_offset(&self.design, &self.a, Some(&offset)) {
            Ok(fit) => (T::lit(2.0) * (self.max_loglik - fit.loglik)).max(T::zero()),
            Err(_) => T::infinity(),
        }
    }
}

impl<T: Real> ProfileSurface<T> {
    pub fn new(data: &TrialData<T>, method: Method) -> Result<Self> {
        let split = split_by_atom(data);
        require_two_observed(&split)?;
        if method == Method::Semiparametric && data.n_covariates() > 0 {
            return Err(Error::Input(
                "covariate adjustment is only available for the parametric test".into(),
            ));
        }
        let obs0 = split.observed(Arm::Control).to_vec();
        let obs1 = split.observed(Arm::Treatment).to_vec();
        let (m0, m1) = (
            T::from_usize_lossy(obs0.len()),
            T::from_usize_lossy(obs1.len()),
        );
        let one = T::one();
        let mu_delta_se =
            (sum_sq_dev(&obs0) / (m0 - one) / m0 + sum_sq_dev(&obs1) / (m1 - one) / m1).sqrt();

        let (continuous, mu_delta_hat) = match method {
            Method::Parametric => {
                let p = data.n_covariates();
                let observed: Vec<_> = data
                    .records()
                    .iter()
                    .filter(|r| data.is_observed(r))
                    .collect();
                let y: Vec<T> = observed.iter().map(|r| r.y).collect();
                let treated: Vec<T> = observed.iter().map(|r| r.arm.indicator()).collect();
                let full = ols_mle(&design_for(observed.iter().copied(), true, p), &y)?;
                let reduced = design_for(observed.iter().copied(), false, p);
                (
                    ContinuousKind::Gaussian {
                        y,
                        treated,
                        reduced,
                        rss_full: full.rss,
                    },
                    full.coef[1],
                )
            }
            Method::Semiparametric => {
                let feasible = feasible_delta_range(&obs0, &obs1);
                let md = mean(&obs1) - mean(&obs0);
                (
                    ContinuousKind::Empirical {
                        observed0: obs0,
                        observed1: obs1,
                        feasible,
                    },
                    md,
                )
            }
        };
        Ok(Self {
            method,
            continuous,
            mu_delta_hat,
            mu_delta_se,
            binary: BinaryProfile::new(data, &split)?,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn mu_delta_hat(&self) -> T {
        self.mu_delta_hat
    }

    pub fn beta_delta_hat(&self) -> T {
        self.binary.estimate
    }

    /// Profile statistic for the difference in means among the observed.
    pub fn w1(&self, m: T) -> T {
        match &self.continuous {
            ContinuousKind::Gaussian {
                y,
                treated,
                reduced,
                rss_full,
            } => {
                let shifted: Vec<T> = y.iter().zip(treated).map(|(&v, &r)| v - m * r).collect();
                match ols_mle(reduced, &shifted) {
                    Ok(fit) => {
                        let n = T::from_usize_lossy(y.len());
                        (n * (fit.rss / *rss_full).ln()).max(T::zero())
                    }
                    Err(_) => T::infinity(),
                }
            }
            ContinuousKind::Empirical {
                observed0,
                observed1,
                ..
            } => el_profile_w1(observed0, observed1, m).map_or(T::infinity(), |s| s.w1e),
        }
    }

    /// Profile statistic for the log odds-ratio of being observed.
    pub fn w2(&self, b: T) -> T {
        self.binary.statistic(b)
    }

    pub fn w(&self, m: T, b: T) -> T {
        self.w1(m) + self.w2(b)
    }

    fn mu_delta_limits(&self) -> (Option<T>, Option<T>) {
        match &self.continuous {
            ContinuousKind::Gaussian { .. } => (None, None),
            ContinuousKind::Empirical { feasible, .. } => (Some(feasible.0), Some(feasible.1)),
        }
    }
}

enum Endpoint<T> {
    Finite(T),
    /// No crossing before the limit / doubling budget.
    Open {
        hull: bool,
    },
}

/// Walks outward from `start` (where `f < threshold`) until `f` crosses the
/// threshold, then solves for the crossing.
fn find_endpoint<T: Real>(
    f: &dyn Fn(T) -> T,
    start: T,
    step: T,
    direction: T,
    threshold: T,
    limit: Option<T>,
) -> Result<Endpoint<T>> {
    let cap = T::max_value().sqrt();
    let g = |x: T| {
        let v = f(x) - threshold;
        if v.is_nan() {
            cap
        } else {
            v.min(cap)
        }
    };
    let mut inner = start;
    let mut scale = step;
    for _ in 0..MAX_DOUBLINGS {
        let mut x = start + direction * scale;
        let mut at_limit = false;
        if let Some(lim) = limit {
            if (direction > T::zero() && x >= lim) || (direction < T::zero() && x <= lim) {
                x = lim;
                at_limit = true;
            }
        }
        if g(x) >= T::zero() {
            let (lo, hi) = if inner < x { (inner, x) } else { (x, inner) };
            let scale_tol = (hi - lo).abs().max(start.abs()).max(T::one());
            let tol = ToleranceSpec::default()
                .with_tol(T::lit(1e-12).max(T::epsilon() * T::lit(64.0)))
                .with_max_iter(300);
            let tol = ToleranceSpec {
                abs_tol: tol.abs_tol * scale_tol,
                ..tol
            };
            let root = match find_root(g, Interval::new(lo, hi)?, &tol) {
                Ok(r) => r,
                Err(Error::Convergence { best, .. }) => T::lit(best),
                Err(e) => return Err(e),
            };
            return Ok(Endpoint::Finite(root));
        }
        if at_limit {
            return Ok(Endpoint::Open { hull: true });
        }
        inner = x;
        scale = scale * T::lit(2.0);
    }
    Ok(Endpoint::Open { hull: false })
}

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::Domain(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(())
}

fn invert<T: Real>(
    f: &dyn Fn(T) -> T,
    estimate: T,
    step: T,
    threshold: T,
    limits: (Option<T>, Option<T>),
) -> Result<(T, T, Vec<IntervalFlag>)> {
    let step = if step.is_finite() && step > T::zero() {
        step
    } else {
        T::one()
    };
    let mut flags = Vec::new();
    let lower = match find_endpoint(f, estimate, step, -T::one(), threshold, limits.0)? {
        Endpoint::Finite(x) => x,
        Endpoint::Open { hull } => {
            flags.push(IntervalFlag::OpenLower);
            if hull {
                flags.push(IntervalFlag::HullExhausted);
            }
            T::neg_infinity()
        }
    };
    let upper = match find_endpoint(f, estimate, step, T::one(), threshold, limits.1)? {
        Endpoint::Finite(x) => x,
        Endpoint::Open { hull } => {
            flags.push(IntervalFlag::OpenUpper);
            if hull && !flags.contains(&IntervalFlag::HullExhausted) {
                flags.push(IntervalFlag::HullExhausted);
            }
            T::infinity()
        }
    };
    Ok((lower, upper, flags))
}

fn mu_delta_interval<T: Real>(
    surface: &ProfileSurface<T>,
    alpha: T,
) -> Result<ConfidenceInterval<T>> {
    check_alpha(alpha)?;
    let threshold = chisq_quantile(T::one() - alpha, 1)?;
    let (lower, upper, flags) = invert(
        &|m| surface.w1(m),
        surface.mu_delta_hat,
        surface.mu_delta_se,
        threshold,
        surface.mu_delta_limits(),
    )?;
    Ok(ConfidenceInterval {
        lower,
        upper,
        estimate: surface.mu_delta_hat,
        level: T::one() - alpha,
        target: Target::MuDelta,
        flags,
    })
}

fn beta_delta_interval<T: Real>(
    surface: &ProfileSurface<T>,
    alpha: T,
) -> Result<ConfidenceInterval<T>> {
    check_alpha(alpha)?;
    let binary = &surface.binary;
    let level = T::one() - alpha;
    if binary.constant {
        return Ok(ConfidenceInterval {
            lower: T::neg_infinity(),
            upper: T::infinity(),
            estimate: T::nan(),
            level,
            target: Target::BetaDelta,
            flags: vec![
                IntervalFlag::BinaryBoundary,
                IntervalFlag::OpenLower,
                IntervalFlag::OpenUpper,
            ],
        });
    }
    let threshold = chisq_quantile(level, 1)?;
    let f = |b: T| binary.statistic(b);
    if binary.estimate.is_finite() {
        let (lower, upper, flags) =
            invert(&f, binary.estimate, binary.se, threshold, (None, None))?;
        return Ok(ConfidenceInterval {
            lower,
            upper,
            estimate: binary.estimate,
            level,
            target: Target::BetaDelta,
            flags,
        });
    }
    // Estimate at +/- infinity: one side is open, the other is found by walking
    // in from the far side until the statistic drops below the threshold.
    let direction = binary.estimate.signum();
    let mut inside = T::zero();
    let mut found = false;
    let mut reach = T::one();
    for _ in 0..MAX_DOUBLINGS {
        let b = direction * reach;
        if f(b) < threshold {
            inside = b;
            found = true;
            break;
        }
        reach = reach * T::lit(2.0);
    }
    let mut flags = vec![IntervalFlag::BinaryBoundary];
    let finite_side = if found {
        match find_endpoint(&f, inside, binary.se, -direction, threshold, None)? {
            Endpoint::Finite(x) => Some(x),
            Endpoint::Open { .. } => None,
        }
    } else {
        None
    };
    let (lower, upper) = if direction > T::zero() {
        flags.push(IntervalFlag::OpenUpper);
        if finite_side.is_none() {
            flags.push(IntervalFlag::OpenLower);
        }
        (finite_side.unwrap_or(T::neg_infinity()), T::infinity())
    } else {
        flags.push(IntervalFlag::OpenLower);
        if finite_side.is_none() {
            flags.push(IntervalFlag::OpenUpper);
        }
        (T::neg_infinity(), finite_side.unwrap_or(T::infinity()))
    };
    Ok(ConfidenceInterval {
        lower,
        upper,
        estimate: binary.estimate,
        level,
        target: Target::BetaDelta,
        flags,
    })
}

/// Interval for the difference in means among the observed: all `m` with
/// `W1(m)` at most the chi-square(1) critical value.
pub fn ci_mu_delta<T: Real>(
    data: &TrialData<T>,
    alpha: T,
    method: Method,
) -> Result<ConfidenceInterval<T>> {
    mu_delta_interval(&ProfileSurface::new(data, method)?, alpha)
}

/// Interval for the log odds-ratio of being observed, by inverting `W2(b)`.
pub fn ci_beta_delta<T: Real>(data: &TrialData<T>, alpha: T) -> Result<ConfidenceInterval<T>> {
    let split = split_by_atom(data);
    let binary = BinaryProfile::new(data, &split)?;
    let surface_stub = BetaOnly { binary };
    beta_delta_interval(&surface_stub.into_surface(), alpha)
}

/// Exponentiated [`ci_beta_delta`].
pub fn ci_odds_ratio<T: Real>(data: &TrialData<T>, alpha: T) -> Result<ConfidenceInterval<T>> {
    Ok(exponentiate(ci_beta_delta(data, alpha)?))
}

fn exponentiate<T: Real>(ci: ConfidenceInterval<T>) -> ConfidenceInterval<T> {
    ConfidenceInterval {
        lower: ci.lower.exp(),
        upper: ci.upper.exp(),
        estimate: ci.estimate.exp(),
        target: Target::OddsRatio,
        ..ci
    }
}

/// Lets the binary interval run on data without two observed values per arm.
struct BetaOnly<T> {
    binary: BinaryProfile<T>,
}

impl<T: Real> BetaOnly<T> {
    fn into_surface(self) -> ProfileSurface<T> {
        ProfileSurface {
            method: Method::Parametric,
            continuous: ContinuousKind::Empirical {
                observed0: Vec::new(),
                observed1: Vec::new(),
                feasible: (T::zero(), T::zero()),
            },
            mu_delta_hat: T::nan(),
            mu_delta_se: T::nan(),
            binary: self.binary,
        }
    }
}

/// Both marginal intervals from one profile computation.
pub fn marginal_intervals<T: Real>(
    data: &TrialData<T>,
    alpha: T,
    method: Method,
) -> Result<(ConfidenceInterval<T>, ConfidenceInterval<T>)> {
    let surface = ProfileSurface::new(data, method)?;
    Ok((
        mu_delta_interval(&surface, alpha)?,
        exponentiate(beta_delta_interval(&surface, alpha)?),
    ))
}

fn linspace<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let step = (hi - lo) / T::from_usize_lossy(n - 1);
    (0..n).map(|i| lo + step * T::from_usize_lossy(i)).collect()
}

/// Simultaneous region for `(mu_delta, beta_delta)` evaluated on a
/// `resolution x resolution` grid.
///
/// The grid spans the marginal intervals at level `1 - min(alpha / 10, 0.001)`,
/// widened by 20% of their width on each side.
pub fn simultaneous_region<T: Real>(
    data: &TrialData<T>,
    alpha: T,
    resolution: usize,
    method: Method,
) -> Result<ConfidenceRegion<T>> {
    check_alpha(alpha)?;
    if resolution < 10 {
        return Err(Error::Domain(format!(
            "resolution must be at least 10, got {resolution}"
        )));
    }
    let surface = ProfileSurface::new(data, method)?;
    let wide_alpha = (alpha / T::lit(10.0)).min(T::lit(0.001));
    let m_ci = mu_delta_interval(&surface, wide_alpha)?;
    let b_ci = beta_delta_interval(&surface, wide_alpha)?;
    for (name, ci) in [("difference in means", &m_ci), ("log odds-ratio", &b_ci)] {
        if !(ci.lower.is_finite() && ci.upper.is_finite()) {
            return Err(Error::Region(format!(
                "the marginal interval for the {name} is unbounded, so no finite grid covers the region"
            )));
        }
    }
    let pad = T::lit(0.2);
    let padded = |ci: &ConfidenceInterval<T>| {
        let w = ci.width();
        (ci.lower - pad * w, ci.upper + pad * w)
    };
    let (m_lo, m_hi) = padded(&m_ci);
    let (b_lo, b_hi) = padded(&b_ci);
    let m_grid = linspace(m_lo, m_hi, resolution);
    let b_grid = linspace(b_lo, b_hi, resolution);

    let w1: Vec<T> = m_grid.par_iter().map(|&m| surface.w1(m)).collect();
    let w2: Vec<T> = b_grid.par_iter().map(|&b| surface.w2(b)).collect();
    let threshold = chisq_quantile(T::one() - alpha, 2)?;
    let w_values: Vec<Vec<T>> = w1
        .iter()
        .map(|&a| w2.iter().map(|&b| a + b).collect())
        .collect();
    let membership = w_values
        .iter()
        .map(|row| row.iter().map(|&w| w <= threshold).collect())
        .collect();
    Ok(ConfidenceRegion {
        m_grid,
        b_grid,
        w_values,
        threshold,
        membership,
        level: T::one() - alpha,
        estimate: (surface.mu_delta_hat, surface.binary.estimate),
        method,
    })
}

/// Wald interval for the combined-outcome mean difference with a first-order
/// delta-method standard error.
///
/// The observed-value block `(mu0, mu_delta)` and the proportion block
/// `(pi0, pi1)` are treated as independent.
pub fn ci_delta_combined<T: Real>(data: &TrialData<T>, alpha: T) -> Result<ConfidenceInterval<T>> {
    check_alpha(alpha)?;
    let split = split_by_atom(data);
    require_two_observed(&split)?;
    let obs0 = split.observed(Arm::Control);
    let obs1 = split.observed(Arm::Treatment);
    let observed: Vec<_> = data
        .records()
        .iter()
        .filter(|r| data.is_observed(r))
        .collect();
    let y: Vec<T> = observed.iter().map(|r| r.y).collect();
    let fit = ols_mle(&design_for(observed.iter().copied(), true, 0), &y)?;
    let (mu0, mu_delta) = (fit.coef[0], fit.coef[1]);
    let mu1 = mu0 + mu_delta;
    let atom = data.atom();
    let pi0 = split.proportion_observed(Arm::Control);
    let pi1 = split.proportion_observed(Arm::Treatment);
    let delta = crate::model::recompose_delta(mu_delta, pi0, pi1, mu0, atom);

    let one = T::one();
    let m0 = T::from_usize_lossy(obs0.len());
    let m1 = T::from_usize_lossy(obs1.len());
    let n0 = T::from_usize_lossy(split.n_total[0]);
    let n1 = T::from_usize_lossy(split.n_total[1]);
    let var_mean = fit.sigma2_hat * (pi0 * pi0 / m0 + pi1 * pi1 / m1);
    let var_prop = (mu0 - atom) * (mu0 - atom) * pi0 * (one - pi0) / n0
        + (mu1 - atom) * (mu1 - atom) * pi1 * (one - pi1) / n1;
    let se = (var_mean + var_prop).sqrt();
    let z = normal_quantile(one - alpha / T::lit(2.0))?;

    let mut flags = Vec::new();
    if [pi0, pi1].iter().any(|&p| p == T::zero() || p == one) {
        flags.push(IntervalFlag::DegenerateVariance);
    }
    Ok(ConfidenceInterval {
        lower: delta - z * se,
        upper: delta + z * se,
        estimate: delta,
        level: one - alpha,
        target: Target::DeltaCombined,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parametric::parametric_lrt;

    fn fixture() -> TrialData<f64> {
        TrialData::from_groups(
            &[0.0, 2.1, 3.3, 0.0, 1.7, 2.9, 3.0, 0.0, 2.4, 0.0, 1.1, 2.6],
            &[3.9, 0.0, 2.8, 4.4, 3.6, 4.1, 0.0, 3.2, 5.0, 3.3, 4.7],
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn estimate_inside_interval() {
        let d = fixture();
        for method in [Method::Parametric, Method::Semiparametric] {
            let ci = ci_mu_delta(&d, 0.05, method).unwrap();
            assert!(ci.lower < ci.estimate && ci.estimate < ci.upper, "{ci:?}");
            let surface = ProfileSurface::new(&d, method).unwrap();
            let c = chisq_quantile(0.95, 1).unwrap();
            assert!((surface.w1(ci.lower) - c).abs() < 1e-7);
            assert!((surface.w1(ci.upper) - c).abs() < 1e-7);
        }
    }

    #[test]
    fn parametric_profile_at_zero_is_test_w1() {
        let d = fixture();
        let s = ProfileSurface::new(&d, Method::Parametric).unwrap();
        let r = parametric_lrt(&d).unwrap();
        assert!((s.w1(0.0) - r.w1).abs() < 1e-9);
        assert!((s.w2(0.0) - r.w2).abs() < 1e-9);
        assert!(s.w(s.mu_delta_hat(), s.beta_delta_hat()) < 1e-12);
    }

    #[test]
    fn equal_proportions_contain_zero() {
        let d: TrialData<f64> =
            TrialData::from_groups(&[0.0, 1.0, 2.0, 0.0, 3.0], &[5.0, 0.0, 0.0, 2.0, 4.0], 0.0)
                .unwrap();
        let ci = ci_beta_delta(&d, 0.05).unwrap();
        assert!(ci.contains(0.0));
        let or = ci_odds_ratio(&d, 0.05).unwrap();
        assert!(or.contains(1.0));
    }

    #[test]
    fn all_observed_gives_unbounded_beta_interval() {
        let d: TrialData<f64> =
            TrialData::from_groups(&[1.0, 2.0, 3.0], &[2.0, 4.0, 5.0], 0.0).unwrap();
        let ci = ci_beta_delta(&d, 0.05).unwrap();
        assert!(ci.lower.is_infinite() && ci.upper.is_infinite());
        assert!(ci.has_flag(IntervalFlag::BinaryBoundary));
    }

    #[test]
    fn one_group_fully_observed_gives_one_sided_interval() {
        let d: TrialData<f64> =
            TrialData::from_groups(&[0.0, 1.0, 0.0, 2.0, 3.0, 2.5], &[2.0, 4.0, 5.0, 3.5], 0.0)
                .unwrap();
        let ci = ci_beta_delta(&d, 0.05).unwrap();
        assert!(ci.upper.is_infinite() && ci.lower.is_finite());
        assert!(ci.has_flag(IntervalFlag::OpenUpper));
        let c = chisq_quantile(0.95, 1).unwrap();
        let split = split_by_atom(&d);
        let bp = BinaryProfile::new(&d, &split).unwrap();
        assert!((bp.statistic(ci.lower) - c).abs() < 1e-7);
    }

    #[test]
    fn region_contains_estimate_and_matches_pointwise() {
        let d = fixture();
        let r = simultaneous_region(&d, 0.05, 20, Method::Semiparametric).unwrap();
        assert_eq!(r.membership.len(), 20);
        assert_eq!(r.w_values[0].len(), 20);
        let (i, j) = r.nearest_cell(r.estimate.0, r.estimate.1);
        assert!(r.membership[i][j]);
        let s = ProfileSurface::new(&d, Method::Semiparametric).unwrap();
        for (i, &m) in r.m_grid.iter().enumerate() {
            for (j, &b) in r.b_grid.iter().enumerate() {
                let w = s.w(m, b);
                assert_eq!(r.membership[i][j], w <= r.threshold);
            }
        }
        assert!(simultaneous_region(&d, 0.05, 5, Method::Semiparametric).is_err());
    }

    #[test]
    fn delta_method_reduces_to_wald_without_atoms() {
        let a = [1.0, 2.0, 3.5, 2.2];
        let b = [2.0, 4.0, 5.0, 3.1, 2.9];
        let d: TrialData<f64> = TrialData::from_groups(&a, &b, 0.0).unwrap();
        let ci = ci_delta_combined(&d, 0.05).unwrap();
        let ma = a.iter().sum::<f64>() / 4.0;
        let mb = b.iter().sum::<f64>() / 5.0;
        let ss = |v: &[f64], m: f64| v.iter().map(|x| (x - m).powi(2)).sum::<f64>();
        let s2 = (ss(&a, ma) + ss(&b, mb)) / 9.0;
        let se = (s2 * (1.0 / 4.0 + 1.0 / 5.0)).sqrt();
        assert!((ci.estimate - (mb - ma)).abs() < 1e-12);
        assert!((ci.upper - ci.estimate - 1.959_963_984_540_054 * se).abs() < 1e-9);
        assert!(ci.has_flag(IntervalFlag::DegenerateVariance));
    }

    #[test]
    fn delta_method_zero_effect_is_centered() {
        let g = [0.0, 1.0, 2.0, 0.0, 3.0];
        let d: TrialData<f64> = TrialData::from_groups(&g, &g, 0.0).unwrap();
        let ci = ci_delta_combined(&d, 0.05).unwrap();
        assert!(ci.estimate.abs() < 1e-12);
        assert!((ci.upper + ci.lower).abs() < 1e-12);
    }
}
