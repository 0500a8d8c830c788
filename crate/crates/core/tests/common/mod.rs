//! Reference computations for the integration tests. Each one is written from
//! the defining formulas and avoids the library's own solvers.
#![allow(dead_code)]

use atomtest::{Arm, Record, TrialData};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random two-arm dataset: `n0`/`n1` records, each observed with probability
/// `p_obs`, observed values uniform on `[lo, hi]` shifted by `shift` in the
/// treatment arm; atom 0.
pub fn random_trial(
    rng: &mut ChaCha8Rng,
    n0: usize,
    n1: usize,
    p_obs: f64,
    shift: f64,
) -> TrialData<f64> {
    let mut records = Vec::new();
    for (arm, n) in [(Arm::Control, n0), (Arm::Treatment, n1)] {
        for _ in 0..n {
            let y = if rng.random::<f64>() < p_obs {
                1.0 + rng.random_range(0.0..4.0) + if arm == Arm::Treatment { shift } else { 0.0 }
            } else {
                0.0
            };
            records.push(Record::new(y, arm));
        }
    }
    TrialData::new(records, 0.0).unwrap()
}

pub fn random_values(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn observed(data: &TrialData<f64>, arm: Arm) -> Vec<f64> {
    data.records()
        .iter()
        .filter(|r| r.arm == arm && r.y != data.atom())
        .map(|r| r.y)
        .collect()
}

pub fn counts(data: &TrialData<f64>) -> [(usize, usize); 2] {
    let mut c = [(0, 0); 2];
    for r in data.records() {
        let g = r.arm.index();
        c[g].1 += 1;
        if r.y != data.atom() {
            c[g].0 += 1;
        }
    }
    c
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn ss(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum()
}

fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// Binomial log-likelihood of `k` successes in `n` at the MLE `k/n`.
fn binom_max(k: f64, n: f64) -> f64 {
    xlogy(k, k / n) + xlogy(n - k, (n - k) / n)
}

/// Gaussian part: `m ln(SS_total / SS_within)` over the observed values.
pub fn gaussian_w1(obs0: &[f64], obs1: &[f64]) -> f64 {
    let pooled: Vec<f64> = obs0.iter().chain(obs1).copied().collect();
    pooled.len() as f64 * (ss(&pooled) / (ss(obs0) + ss(obs1))).ln()
}

/// Logistic part: deviance of the 2x2 table of observed counts.
pub fn two_by_two_w2(k0: usize, n0: usize, k1: usize, n1: usize) -> f64 {
    let (k0, n0, k1, n1) = (k0 as f64, n0 as f64, k1 as f64, n1 as f64);
    2.0 * (binom_max(k0, n0) + binom_max(k1, n1) - binom_max(k0 + k1, n0 + n1))
}

pub fn closed_form_parametric_w(data: &TrialData<f64>) -> (f64, f64) {
    let [(k0, n0), (k1, n1)] = counts(data);
    (
        gaussian_w1(
            &observed(data, Arm::Control),
            &observed(data, Arm::Treatment),
        ),
        two_by_two_w2(k0, n0, k1, n1),
    )
}

/// Parametric interval for the difference in means, solved in closed form from
/// `W1(m) = M ln(1 + m0 m1 (d - m)^2 / (M SS_within))`.
pub fn closed_form_mu_interval(obs0: &[f64], obs1: &[f64], critical: f64) -> (f64, f64) {
    let (m0, m1) = (obs0.len() as f64, obs1.len() as f64);
    let big_m = m0 + m1;
    let d = mean(obs1) - mean(obs0);
    let half = ((critical / big_m).exp_m1() * (ss(obs0) + ss(obs1)) * big_m / (m0 * m1)).sqrt();
    (d - half, d + half)
}

fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Lagrange multiplier of the one-sample empirical likelihood at `mu`, by
/// bisection of the (decreasing) estimating equation.
pub fn bisection_lambda(values: &[f64], mu: f64) -> f64 {
    let d: Vec<f64> = values.iter().map(|v| v - mu).collect();
    let dmax = d.iter().cloned().fold(f64::MIN, f64::max);
    let dmin = d.iter().cloned().fold(f64::MAX, f64::min);
    let (lo, hi) = (-1.0 / dmax, -1.0 / dmin);
    let shrink = 1e-14 * (hi - lo);
    bisect(lo + shrink, hi - shrink, |l| {
        d.iter().map(|di| di / (1.0 + l * di)).sum()
    })
}

pub fn m2logr(values: &[f64], mu: f64) -> f64 {
    let lambda = bisection_lambda(values, mu);
    2.0 * values
        .iter()
        .map(|v| (lambda * (v - mu)).ln_1p())
        .sum::<f64>()
}

/// Profile `W1` for the semiparametric test: minimum over the control mean of
/// the two-sample `-2 log R`, by repeated zooming of a 21-point grid.
pub fn grid_profile_w1(obs0: &[f64], obs1: &[f64], delta: f64) -> f64 {
    let min = |v: &[f64]| v.iter().cloned().fold(f64::MAX, f64::min);
    let max = |v: &[f64]| v.iter().cloned().fold(f64::MIN, f64::max);
    let mut lo = min(obs0).max(min(obs1) - delta);
    let mut hi = max(obs0).min(max(obs1) - delta);
    if lo >= hi {
        return f64::INFINITY;
    }
    let objective = |mu: f64| m2logr(obs0, mu) + m2logr(obs1, mu + delta);
    let pad = 1e-9 * (hi - lo);
    lo += pad;
    hi -= pad;
    let mut best = f64::INFINITY;
    for _ in 0..200 {
        let step = (hi - lo) / 20.0;
        let (mut arg, mut val) = (lo, f64::INFINITY);
        for k in 0..=20 {
            let mu = lo + step * k as f64;
            let f = objective(mu);
            if f < val {
                val = f;
                arg = mu;
            }
        }
        best = best.min(val);
        let (new_lo, new_hi) = ((arg - step).max(lo), (arg + step).min(hi));
        if new_hi - new_lo < 1e-13 * (1.0 + arg.abs()) {
            break;
        }
        lo = new_lo;
        hi = new_hi;
    }
    best
}

/// Profile deviance for the log odds-ratio in a 2x2 table: the intercept is
/// maximized by bisection of its score equation.
pub fn profile_deviance_beta(k0: f64, n0: f64, k1: f64, n1: f64, b: f64) -> f64 {
    let sig = |x: f64| 1.0 / (1.0 + (-x).exp());
    let score = |a: f64| (k0 - n0 * sig(a)) + (k1 - n1 * sig(a + b));
    let a = bisect(-60.0, 60.0, score);
    let ll = |a: f64| {
        let l = |k: f64, n: f64, x: f64| k * x - n * (x.exp().ln_1p());
        l(k0, n0, a) + l(k1, n1, a + b)
    };
    2.0 * (binom_max(k0, n0) + binom_max(k1, n1) - ll(a))
}

/// Interval endpoints from a dense grid scan of the profile deviance,
/// refined by bisection between the bracketing grid points.
pub fn grid_beta_interval(k0: f64, n0: f64, k1: f64, n1: f64, critical: f64) -> (f64, f64) {
    let f = |b: f64| profile_deviance_beta(k0, n0, k1, n1, b) - critical;
    let grid: Vec<f64> = (0..=4000).map(|i| -10.0 + 0.005 * i as f64).collect();
    let mut crossings = Vec::new();
    for w in grid.windows(2) {
        if (f(w[0]) > 0.0) != (f(w[1]) > 0.0) {
            crossings.push(bisect(w[0], w[1], f));
        }
    }
    assert_eq!(crossings.len(), 2, "expected two crossings");
    (crossings[0], crossings[1])
}

/// Percentile bootstrap for the combined-outcome mean difference, resampling
/// within each arm.
pub fn bootstrap_delta_interval(
    data: &TrialData<f64>,
    resamples: usize,
    alpha: f64,
    seed: u64,
) -> (f64, f64) {
    let mut r = rng(seed);
    let g0 = data.combined(Arm::Control);
    let g1 = data.combined(Arm::Treatment);
    let mut stats: Vec<f64> = (0..resamples)
        .map(|_| {
            let draw = |g: &[f64], r: &mut ChaCha8Rng| {
                (0..g.len())
                    .map(|_| g[r.random_range(0..g.len())])
                    .sum::<f64>()
                    / g.len() as f64
            };
            let m0 = draw(&g0, &mut r);
            draw(&g1, &mut r) - m0
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    let q = |p: f64| stats[((p * resamples as f64).floor() as usize).min(resamples - 1)];
    (q(alpha / 2.0), q(1.0 - alpha / 2.0))
}
