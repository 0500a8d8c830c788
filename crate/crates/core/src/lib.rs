//! Two-part likelihood-ratio testing for semi-continuous outcomes.
//!
//! A semi-continuous outcome is a continuous measurement that is replaced by a
//! fixed atom when it cannot be observed (for example a quality-of-life score
//! coded as zero for patients who died). Treatment can act on both the chance
//! of being observed and the observed value, so the crate tests both parts
//! jointly with a two degree-of-freedom likelihood-ratio statistic
//! `W = W1 + W2`:
//!
//! * `W1` compares the observed values between arms, either with a Gaussian
//!   linear model ([`parametric_lrt`]) or with empirical likelihood
//!   ([`semiparametric_lrt`]).
//! * `W2` compares the probability of being observed with a logistic model.
//!
//! The statistical core is generic over [`Real`] (`f32` or `f64`); the plain
//! type names default to `f64` and `*32` aliases are provided for `f32`.

// `!(a < b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod empirical_likelihood;
pub mod error;
pub mod inference;
pub mod io;
pub mod model;
pub mod numerics;
pub mod parametric;
pub mod regression;
pub mod scalar;
pub mod simulate;

pub use baselines::{t_test, wilcoxon, BaselineMethod, BaselineResult, TVariant};
pub use empirical_likelihood::{
    el_lambda, el_m2logr_one, el_profile_w1, el_weights, feasible_delta_range, semiparametric_lrt,
    ElState,
};
pub use error::{Error, Result};
pub use inference::{
    ci_beta_delta, ci_delta_combined, ci_mu_delta, ci_odds_ratio, marginal_intervals,
    simultaneous_region, ConfidenceInterval, ConfidenceRegion, IntervalFlag, ProfileSurface,
    Target,
};
pub use model::{
    marginal_delta, recompose_delta, split_by_atom, Arm, EffectEstimates, Record, ScenarioSpec,
    SplitData, SurvivorDist, TrialData,
};
pub use numerics::{Interval, ToleranceSpec};
pub use parametric::{parametric_lrt, Method, TestFlag, TestResult};
pub use regression::{logistic_mle, lrt_nested, ols_mle, Design, LinearFit, LogisticFit};
pub use scalar::Real;
pub use simulate::{
    power_study, sample_dataset, PowerRow, PowerStudy, PowerTable, RngSpec, StudyMethod, MIN_REPS,
};

pub type TrialData32 = TrialData<f32>;
pub type SplitData32 = SplitData<f32>;
pub type TestResult32 = TestResult<f32>;
pub type EffectEstimates32 = EffectEstimates<f32>;
pub type ConfidenceInterval32 = ConfidenceInterval<f32>;
pub type ConfidenceRegion32 = ConfidenceRegion<f32>;
pub type LinearFit32 = LinearFit<f32>;
pub type LogisticFit32 = LogisticFit<f32>;
pub type Design32 = Design<f32>;
pub type ElState32 = ElState<f32>;
pub type BaselineResult32 = BaselineResult<f32>;
