//! Parametric two-part likelihood-ratio test: a Gaussian linear model for the
//! observed values and a logistic model for being observed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, PartialResult, Result};
use crate::model::{split_by_atom, Arm, EffectEstimates, SplitData, TrialData};
use crate::numerics::chisq_sf;
use crate::regression::{logistic_mle, lrt_nested, ols_mle, Design};
use crate::scalar::{mean, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Parametric,
    Semiparametric,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Parametric => "Parametric Likelihood Ratio Test",
            Method::Semiparametric => "Semi-empirical Likelihood Ratio Test",
        }
    }
}

/// Conditions worth surfacing next to a test result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFlag {
    /// The observation indicator is constant, so `W2 = 0` on the parameter boundary.
    BinaryPartBoundary,
    /// No record equals the atom.
    NoAtomsFound,
    /// Zero lies outside the empirical-likelihood hull, so `W1 = +inf`.
    ContinuousPartInfeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult<T = f64> {
    /// Joint statistic, always `w1 + w2`.
    pub w: T,
    pub w1: T,
    pub w2: T,
    pub df: u32,
    pub p_value: T,
    pub estimates: EffectEstimates<T>,
    pub method: Method,
    pub alpha: T,
    pub flags: Vec<TestFlag>,
}

impl<T: Real> TestResult<T> {
    pub(crate) fn assemble(
        w1: T,
        binary: BinaryPart<T>,
        estimates: EffectEstimates<T>,
        method: Method,
        mut flags: Vec<TestFlag>,
    ) -> Result<Self> {
        let w = w1 + binary.w2;
        let p_value = if w.is_infinite() {
            T::zero()
        } else {
            chisq_sf(w, 2)?
        };
        flags.extend(binary.flags);
        Ok(Self {
            w,
            w1,
            w2: binary.w2,
            df: 2,
            p_value,
            estimates,
            method,
            alpha: T::lit(0.05),
            flags,
        })
    }

    pub fn has_flag(&self, flag: TestFlag) -> bool {
        self.flags.contains(&flag)
    }

    pub fn rejects(&self, alpha: T) -> bool {
        self.p_value < alpha
    }
}

/// Logistic component of the two-part statistic.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct BinaryPart<T> {
    pub w2: T,
    pub beta_delta_hat: T,
    pub flags: Vec<TestFlag>,
}

/// Design with an intercept, optional treatment column, then covariates.
pub(crate) fn design_for<'a, T: Real>(
    rows: impl Iterator<Item = &'a crate::model::Record<T>>,
    with_treatment: bool,
    n_covariates: usize,
) -> Design<T> {
    let rows: Vec<Vec<T>> = rows
        .map(|r| {
            let mut row = Vec::with_capacity(2 + n_covariates);
            row.push(T::one());
            if with_treatment {
                row.push(r.arm.indicator());
            }
            row.extend_from_slice(&r.covariates);
            row
        })
        .collect();
    let cols = 1 + usize::from(with_treatment) + n_covariates;
    if rows.is_empty() {
        return Design::from_fn(0, cols, |_, _| T::zero());
    }
    Design::from_rows(&rows).expect("rows share one width")
}

pub(crate) fn observation_indicator<T: Real>(data: &TrialData<T>) -> Vec<T> {
    data.records()
        .iter()
        .map(|r| {
            if data.is_observed(r) {
                T::one()
            } else {
                T::zero()
            }
        })
        .collect()
}

/// Logistic likelihood-ratio statistic for treatment on the observation indicator.
pub(crate) fn binary_component<T: Real>(
    data: &TrialData<T>,
    split: &SplitData<T>,
) -> Result<BinaryPart<T>> {
    let mut flags = Vec::new();
    if split.indicator_constant() {
        flags.push(TestFlag::BinaryPartBoundary);
        if split.n_obs == split.n_total {
            flags.push(TestFlag::NoAtomsFound);
        }
        return Ok(BinaryPart {
            w2: T::zero(),
            beta_delta_hat: T::nan(),
            flags,
        });
    }
    let p = data.n_covariates();
    let a = observation_indicator(data);
    let full = logistic_mle(&design_for(data.records().iter(), true, p), &a)?;
    let reduced = logistic_mle(&design_for(data.records().iter(), false, p), &a)?;
    let (w2, _) = lrt_nested(full.loglik, reduced.loglik, 1)?;
    Ok(BinaryPart {
        w2,
        beta_delta_hat: full.coef[1],
        flags,
    })
}

pub(crate) fn require_two_observed<T: Real>(split: &SplitData<T>) -> Result<()> {
    for g in 0..2 {
        if split.n_obs[g] < 2 {
            return Err(Error::ContinuousPartUndefined {
                group: g,
                observed: split.n_obs[g],
            });
        }
    }
    Ok(())
}

/// Gaussian likelihood-ratio statistic for treatment among the observed, with the
/// fitted treatment coefficient.
pub(crate) fn gaussian_component<T: Real>(data: &TrialData<T>) -> Result<(T, T)> {
    let p = data.n_covariates();
    let observed: Vec<_> = data
        .records()
        .iter()
        .filter(|r| data.is_observed(r))
        .collect();
    let y: Vec<T> = observed.iter().map(|r| r.y).collect();
    let full = ols_mle(&design_for(observed.iter().copied(), true, p), &y)?;
    let reduced = ols_mle(&design_for(observed.iter().copied(), false, p), &y)?;
    let (w1, _) = lrt_nested(full.loglik, reduced.loglik, 1)?;
    Ok((w1, full.coef[1]))
}

/// Point estimates of the two contrasts plus the combined-outcome difference.
pub(crate) fn estimates_for<T: Real>(
    data: &TrialData<T>,
    split: &SplitData<T>,
    mu_delta_hat: T,
    beta_delta_hat: T,
) -> EffectEstimates<T> {
    EffectEstimates::new(
        mu_delta_hat,
        beta_delta_hat,
        mean(split.observed(Arm::Control)),
        [
            split.proportion_observed(Arm::Control),
            split.proportion_observed(Arm::Treatment),
        ],
        data.atom(),
    )
}

/// Parametric two-part likelihood-ratio test of no treatment effect.
///
/// Covariates carried by `data` enter both parts linearly. The joint statistic
/// is referred to a chi-square distribution with two degrees of freedom.
pub fn parametric_lrt<T: Real>(data: &TrialData<T>) -> Result<TestResult<T>> {
    let split = split_by_atom(data);
    require_two_observed(&split)?;
    let (w1, mu_delta_hat) = gaussian_component(data)?;
    let binary = binary_component(data, &split).map_err(|e| match e {
        Error::Separation { column, .. } => Error::Separation {
            column,
            partial: Some(Box::new(PartialResult {
                w1: w1.to_f64_lossy(),
                mu_delta_hat: mu_delta_hat.to_f64_lossy(),
            })),
        },
        other => other,
    })?;
    let estimates = estimates_for(data, &split, mu_delta_hat, binary.beta_delta_hat);
    TestResult::assemble(w1, binary, estimates, Method::Parametric, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Record;

    fn fixture() -> TrialData<f64> {
        TrialData::from_groups(
            &[0.0, 2.1, 3.3, 0.0, 1.7, 2.9, 3.0, 0.0],
            &[3.9, 0.0, 2.8, 4.4, 3.6, 4.1, 0.0],
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn identical_groups_give_zero() {
        let g = [0.0_f64, 1.0, 2.5, 0.0, 3.0];
        let d = TrialData::from_groups(&g, &g, 0.0).unwrap();
        let r = parametric_lrt(&d).unwrap();
        assert!(r.w1.abs() < 1e-12 && r.w2.abs() < 1e-12);
        assert!((r.p_value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn equal_proportions_leave_only_w1() {
        let d =
            TrialData::from_groups(&[0.0_f64, 1.0, 2.0, 3.0], &[0.0, 3.0, 4.5, 5.0], 0.0).unwrap();
        let r = parametric_lrt(&d).unwrap();
        assert!(r.w2.abs() < 1e-12);
        assert_eq!(r.w, r.w1 + r.w2);
        assert!(r.w1 > 1.0);
    }

    #[test]
    fn decomposition_and_estimates() {
        let d = fixture();
        let r = parametric_lrt(&d).unwrap();
        assert_eq!(r.w, r.w1 + r.w2);
        assert_eq!(r.df, 2);
        let obs0 = [2.1, 3.3, 1.7, 2.9, 3.0];
        let obs1 = [3.9, 2.8, 4.4, 3.6, 4.1];
        let md = obs1.iter().sum::<f64>() / 5.0 - obs0.iter().sum::<f64>() / 5.0;
        assert!((r.estimates.mu_delta_hat - md).abs() < 1e-10);
        let logit = |p: f64| (p / (1.0 - p)).ln();
        assert!((r.estimates.beta_delta_hat - (logit(5.0 / 7.0) - logit(5.0 / 8.0))).abs() < 1e-9);
        // recomposed delta equals the raw difference of combined means
        let raw = d.combined(Arm::Treatment).iter().sum::<f64>() / 7.0
            - d.combined(Arm::Control).iter().sum::<f64>() / 8.0;
        assert!((r.estimates.delta_hat - raw).abs() < 1e-12);
    }

    #[test]
    fn relabeling_flips_estimates() {
        let d = fixture();
        let a = parametric_lrt(&d).unwrap();
        let b = parametric_lrt(&d.relabeled()).unwrap();
        assert!((a.w - b.w).abs() < 1e-9);
        assert!((a.estimates.mu_delta_hat + b.estimates.mu_delta_hat).abs() < 1e-10);
        assert!((a.estimates.beta_delta_hat + b.estimates.beta_delta_hat).abs() < 1e-9);
    }

    #[test]
    fn too_few_observed() {
        let d = TrialData::from_groups(&[0.0, 0.0, 1.0], &[1.0, 2.0], 0.0).unwrap();
        assert!(matches!(
            parametric_lrt(&d),
            Err(Error::ContinuousPartUndefined {
                group: 0,
                observed: 1
            })
        ));
    }

    #[test]
    fn no_atoms_is_boundary_not_error() {
        let d = TrialData::from_groups(&[1.0, 2.0, 3.0], &[2.0, 4.0, 5.0], 0.0).unwrap();
        let r = parametric_lrt(&d).unwrap();
        assert_eq!(r.w2, 0.0);
        assert_eq!(r.df, 2);
        assert!(r.has_flag(TestFlag::BinaryPartBoundary));
        assert!(r.has_flag(TestFlag::NoAtomsFound));
        assert_eq!(r.w, r.w1);
    }

    #[test]
    fn one_sided_boundary_reports_partial_result() {
        let d = TrialData::from_groups(&[0.0, 1.0, 2.0, 3.0], &[2.0, 4.0, 5.0], 0.0).unwrap();
        match parametric_lrt(&d) {
            Err(Error::Separation {
                partial: Some(p), ..
            }) => {
                assert!(p.w1 > 0.0);
                assert!((p.mu_delta_hat - (11.0 / 3.0 - 2.0)).abs() < 1e-10);
            }
            other => panic!("expected separation, got {other:?}"),
        }
    }

    #[test]
    fn scale_and_shift_leave_w1_unchanged() {
        let d = fixture();
        let atom = d.atom();
        let transformed: Vec<Record<f64>> = d
            .records()
            .iter()
            .map(|r| {
                let y = if r.y == atom { -7.0 } else { 2.5 * r.y + 11.0 };
                Record::new(y, r.arm)
            })
            .collect();
        let t = TrialData::new(transformed, -7.0).unwrap();
        let a = parametric_lrt(&d).unwrap();
        let b = parametric_lrt(&t).unwrap();
        assert!((a.w1 - b.w1).abs() < 1e-8);
        assert!((a.w2 - b.w2).abs() < 1e-10);
    }

    #[test]
    fn covariates_enter_both_parts() {
        let recs: Vec<Record<f64>> = (0..40)
            .map(|i| {
                let arm = if i % 2 == 0 {
                    Arm::Control
                } else {
                    Arm::Treatment
                };
                let x = (i as f64 * 0.37).sin();
                let obs = (i * 7) % 5 != 0;
                let y = if obs {
                    2.0 + arm.indicator::<f64>() + 1.5 * x + 0.3 * (i as f64 * 1.3).cos()
                } else {
                    0.0
                };
                Record::with_covariates(y, arm, vec![x])
            })
            .collect();
        let d = TrialData::new(recs, 0.0).unwrap();
        let adjusted = parametric_lrt(&d).unwrap();
        let plain = parametric_lrt(&d.without_covariates()).unwrap();
        assert!((adjusted.w1 - plain.w1).abs() > 1e-3);
        assert_eq!(adjusted.w, adjusted.w1 + adjusted.w2);
    }

    #[test]
    fn f32_agrees_with_f64() {
        let d = fixture();
        let recs: Vec<Record<f32>> = d
            .records()
            .iter()
            .map(|r| Record::new(r.y as f32, r.arm))
            .collect();
        let d32 = TrialData::new(recs, 0.0f32).unwrap();
        let a = parametric_lrt(&d).unwrap();
        let b = parametric_lrt(&d32).unwrap();
        assert!((a.w - b.w as f64).abs() < 1e-3 * a.w.max(1.0));
    }
}
