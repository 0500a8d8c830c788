//! Monte Carlo power engine.
//!
//! Every replicate draws one dataset from its own ChaCha8 stream, keyed by the
//! study seed and `(scenario index, n, replicate)`, so results do not depend on
//! the number of worker threads or on scheduling order. All requested methods
//! are applied to the same dataset.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{t_test, wilcoxon, TVariant};
use crate::empirical_likelihood::semiparametric_lrt;
use crate::error::{Error, Result};
use crate::model::{Arm, Record, ScenarioSpec, SurvivorDist, TrialData};
use crate::parametric::parametric_lrt;

pub const MIN_REPS: usize = 100;

/// Median of `T^2` for `T ~ t(2)`.
const SQUARED_T2_MEDIAN: f64 = 2.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSpec {
    pub seed: u64,
    pub stream: u64,
}

impl RngSpec {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Stream for one replicate of one `(scenario, n)` cell.
    pub fn for_replicate(seed: u64, scenario: usize, n: usize, replicate: usize) -> Self {
        let mut h = 0x9e37_79b9_7f4a_7c15_u64;
        for v in [scenario as u64, n as u64, replicate as u64] {
            h = splitmix(h ^ v);
        }
        Self { seed, stream: h }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn draw_observed<R: Rng + ?Sized>(dist: SurvivorDist, location: f64, rng: &mut R) -> f64 {
    match dist {
        SurvivorDist::Normal => {
            let z: f64 = StandardNormal.sample(rng);
            location + z
        }
        SurvivorDist::ScaledSquaredT => {
            let z: f64 = StandardNormal.sample(rng);
            let v: f64 = ChiSquared::new(2.0).expect("df > 0").sample(rng);
            let t2 = z * z / (v / 2.0);
            location / SQUARED_T2_MEDIAN * t2
        }
    }
}

/// Draws `n_per_group` records per arm: each record is observed with
/// probability `pi` of its arm and otherwise set to the atom.
pub fn sample_dataset<R: Rng + ?Sized>(
    spec: &ScenarioSpec,
    n_per_group: usize,
    rng: &mut R,
) -> Result<TrialData<f64>> {
    spec.validate()?;
    let mut records = Vec::with_capacity(2 * n_per_group);
    for arm in [Arm::Control, Arm::Treatment] {
        for _ in 0..n_per_group {
            let y = if rng.random::<f64>() < spec.pi(arm) {
                draw_observed(spec.dist, spec.location(arm), rng)
            } else {
                spec.atom
            };
            records.push(Record::new(y, arm));
        }
    }
    TrialData::new(records, spec.atom)
}

/// Tests available to the power engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyMethod {
    Lrt,
    Splrt,
    Wilcoxon,
    Ttest,
}

impl StudyMethod {
    pub const ALL: [StudyMethod; 4] = [Self::Lrt, Self::Splrt, Self::Wilcoxon, Self::Ttest];

    pub fn name(self) -> &'static str {
        match self {
            Self::Lrt => "lrt",
            Self::Splrt => "splrt",
            Self::Wilcoxon => "wilcoxon",
            Self::Ttest => "ttest",
        }
    }

    /// p-value on `data`, or `None` when the method is undefined for it.
    pub fn p_value(self, data: &TrialData<f64>) -> Option<f64> {
        let p = match self {
            Self::Lrt => parametric_lrt(data).ok()?.p_value,
            Self::Splrt => semiparametric_lrt(data).ok()?.p_value,
            Self::Wilcoxon => {
                let r =
                    wilcoxon(&data.combined(Arm::Control), &data.combined(Arm::Treatment)).ok()?;
                if r.degenerate {
                    return None;
                }
                r.p_value
            }
            Self::Ttest => {
                t_test(
                    &data.combined(Arm::Control),
                    &data.combined(Arm::Treatment),
                    TVariant::Welch,
                )
                .ok()?
                .p_value
            }
        };
        p.is_finite().then_some(p)
    }
}

impl fmt::Display for StudyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StudyMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lrt" | "parametric" => Ok(Self::Lrt),
            "splrt" | "semiparametric" => Ok(Self::Splrt),
            "wilcoxon" => Ok(Self::Wilcoxon),
            "ttest" | "t_test" | "t-test" => Ok(Self::Ttest),
            other => Err(Error::Config(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerStudy {
    pub scenarios: Vec<ScenarioSpec>,
    pub n_grid: Vec<usize>,
    pub reps: usize,
    pub alpha: f64,
    pub methods: Vec<StudyMethod>,
    pub seed: u64,
    /// Worker threads; 0 uses the rayon default.
    pub workers: usize,
}

impl PowerStudy {
    pub fn new(scenarios: Vec<ScenarioSpec>, n_grid: Vec<usize>, reps: usize) -> Self {
        Self {
            scenarios,
            n_grid,
            reps,
            alpha: 0.05,
            methods: StudyMethod::ALL.to_vec(),
            seed: 1,
            workers: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.scenarios.is_empty() {
            return Err(Error::Config("no scenarios given".into()));
        }
        for s in &self.scenarios {
            s.validate()?;
        }
        if self.n_grid.is_empty() || self.n_grid.contains(&0) {
            return Err(Error::Config(
                "n grid must be non-empty with positive sizes".into(),
            ));
        }
        if self.reps < MIN_REPS {
            return Err(Error::Config(format!(
                "reps must be at least {MIN_REPS}, got {}",
                self.reps
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods given".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerRow {
    pub scenario_id: String,
    pub method: StudyMethod,
    pub n_per_group: usize,
    pub reps: usize,
    /// Replicates where the method was undefined; excluded from the denominator.
    pub degenerate: usize,
    pub rejections: usize,
    pub power: f64,
    pub mc_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerTable {
    pub alpha: f64,
    pub seed: u64,
    pub rows: Vec<PowerRow>,
}

impl PowerTable {
    pub fn get(
        &self,
        scenario_id: &str,
        method: StudyMethod,
        n_per_group: usize,
    ) -> Option<&PowerRow> {
        self.rows.iter().find(|r| {
            r.scenario_id == scenario_id && r.method == method && r.n_per_group == n_per_group
        })
    }
}

/// Runs every `(scenario, n, method)` cell of the study.
pub fn power_study(study: &PowerStudy) -> Result<PowerTable> {
    study.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(study.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let mut rows = Vec::new();
    for (si, spec) in study.scenarios.iter().enumerate() {
        for &n in &study.n_grid {
            let outcomes: Vec<Vec<Option<bool>>> = pool.install(|| {
                (0..study.reps)
                    .into_par_iter()
                    .map(|r| {
                        let mut rng = RngSpec::for_replicate(study.seed, si, n, r).rng();
                        match sample_dataset(spec, n, &mut rng) {
                            Ok(data) => study
                                .methods
                                .iter()
                                .map(|m| m.p_value(&data).map(|p| p < study.alpha))
                                .collect(),
                            Err(_) => vec![None; study.methods.len()],
                        }
                    })
                    .collect()
            });
            for (k, &method) in study.methods.iter().enumerate() {
                let degenerate = outcomes.iter().filter(|o| o[k].is_none()).count();
                let rejections = outcomes.iter().filter(|o| o[k] == Some(true)).count();
                let used = study.reps - degenerate;
                let (power, mc_se) = if used == 0 {
                    (f64::NAN, f64::NAN)
                } else {
                    let p = rejections as f64 / used as f64;
                    (p, (p * (1.0 - p) / used as f64).sqrt())
                };
                rows.push(PowerRow {
                    scenario_id: spec.id.clone(),
                    method,
                    n_per_group: n,
                    reps: study.reps,
                    degenerate,
                    rejections,
                    power,
                    mc_se,
                });
            }
        }
    }
    Ok(PowerTable {
        alpha: study.alpha,
        seed: study.seed,
        rows,
    })
}
