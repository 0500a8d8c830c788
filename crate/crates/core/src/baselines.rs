//! Two-sample t-test and Wilcoxon rank-sum test on the combined outcome.
//!
//! Tie policy for the rank-sum test: pooled values receive midranks; the normal
//! approximation uses the tie-corrected variance
//! `n0 n1 / 12 * ((N + 1) - sum(t^3 - t) / (N (N - 1)))` and a continuity
//! correction of 0.5 toward zero. Tie-free samples with `N <= 20` use the exact
//! null distribution of the Mann-Whitney statistic instead.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{normal_cdf, student_t_sf_two_sided};
use crate::scalar::{mean, sum_sq_dev, Real};

/// Largest pooled sample size that uses the exact rank-sum distribution.
pub const EXACT_MAX_N: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TVariant {
    Pooled,
    #[default]
    Welch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineMethod {
    TPooled,
    TWelch,
    Wilcoxon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineResult<T = f64> {
    /// t statistic (control minus treatment), or the Mann-Whitney U of the control arm.
    pub statistic: T,
    pub p_value: T,
    pub method: BaselineMethod,
    pub n0: usize,
    pub n1: usize,
    /// Degrees of freedom for t-tests.
    pub df: Option<T>,
    /// Whether the p-value comes from the exact rank-sum distribution.
    pub exact: bool,
    /// All pooled values equal; the test carries no information.
    pub degenerate: bool,
}

pub fn t_test<T: Real>(x0: &[T], x1: &[T], variant: TVariant) -> Result<BaselineResult<T>> {
    let (n0, n1) = (x0.len(), x1.len());
    if n0 < 2 || n1 < 2 {
        return Err(Error::Input(
            "t-test needs at least two values per group".into(),
        ));
    }
    let (n0f, n1f) = (T::from_usize_lossy(n0), T::from_usize_lossy(n1));
    let one = T::one();
    let (ss0, ss1) = (sum_sq_dev(x0), sum_sq_dev(x1));
    if ss0 == T::zero() && ss1 == T::zero() {
        return Err(Error::Degenerate("both groups have zero variance".into()));
    }
    let diff = mean(x0) - mean(x1);
    let (se, df, method) = match variant {
        TVariant::Pooled => {
            let df = n0f + n1f - T::lit(2.0);
            let sp2 = (ss0 + ss1) / df;
            (
                (sp2 * (one / n0f + one / n1f)).sqrt(),
                df,
                BaselineMethod::TPooled,
            )
        }
        TVariant::Welch => {
            let v0 = ss0 / (n0f - one) / n0f;
            let v1 = ss1 / (n1f - one) / n1f;
            let se2 = v0 + v1;
            let df = se2 * se2 / (v0 * v0 / (n0f - one) + v1 * v1 / (n1f - one));
            (se2.sqrt(), df, BaselineMethod::TWelch)
        }
    };
    let t = diff / se;
    Ok(BaselineResult {
        statistic: t,
        p_value: student_t_sf_two_sided(t, df)?,
        method,
        n0,
        n1,
        df: Some(df),
        exact: false,
        degenerate: false,
    })
}

/// Midranks (1-based) of the pooled sample and the tie-group sizes.
pub fn midranks<T: Real>(pooled: &[T]) -> (Vec<T>, Vec<usize>) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].partial_cmp(&pooled[b]).expect("finite values"));
    let mut ranks = vec![T::zero(); pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && pooled[order[j]] == pooled[order[i]] {
            j += 1;
        }
        // positions i..j share ranks i+1..=j
        let avg = T::from_usize_lossy(i + 1 + j) / T::lit(2.0);
        for &k in &order[i..j] {
            ranks[k] = avg;
        }
        if j - i > 1 {
            ties.push(j - i);
        }
        i = j;
    }
    (ranks, ties)
}

/// Null variance of U with the tie correction.
pub fn tie_corrected_variance<T: Real>(n0: usize, n1: usize, ties: &[usize]) -> T {
    let n = n0 + n1;
    let tie_sum: usize = ties.iter().map(|&t| t * t * t - t).sum();
    let nf = T::from_usize_lossy(n);
    let base = T::from_usize_lossy(n0 * n1) / T::lit(12.0);
    let correction = if n > 1 {
        T::from_usize_lossy(tie_sum) / (nf * (nf - T::one()))
    } else {
        T::zero()
    };
    base * ((nf + T::one()) - correction)
}

/// Counts of the Mann-Whitney statistic over all `C(n0 + n1, n0)` rank assignments.
fn mann_whitney_counts(n0: usize, n1: usize) -> Vec<f64> {
    // table[m][u] for the current n, built up one treatment observation at a time
    let max_u = n0 * n1;
    let mut prev: Vec<Vec<f64>> = (0..=n0)
        .map(|_| {
            let mut v = vec![0.0; max_u + 1];
            v[0] = 1.0;
            v
        })
        .collect();
    for n in 1..=n1 {
        let mut cur = vec![vec![0.0; max_u + 1]; n0 + 1];
        cur[0][0] = 1.0;
        for m in 1..=n0 {
            for u in 0..=m * n {
                // largest observation belongs to the control arm (adds n to U) or not
                let from_control = if u >= n { cur[m - 1][u - n] } else { 0.0 };
                cur[m][u] = from_control + prev[m][u];
            }
        }
        prev = cur;
    }
    prev.swap_remove(n0)
}

fn exact_p<T: Real>(u: T, n0: usize, n1: usize) -> T {
    let counts = mann_whitney_counts(n0, n1);
    let total: f64 = counts.iter().sum();
    let u = u.to_f64_lossy().round() as usize;
    let lower: f64 = counts[..=u].iter().sum::<f64>() / total;
    let upper: f64 = counts[u..].iter().sum::<f64>() / total;
    T::lit((2.0 * lower.min(upper)).min(1.0))
}

/// Normal-approximation p-value with tie and continuity corrections.
pub fn wilcoxon_normal_p<T: Real>(u: T, n0: usize, n1: usize, ties: &[usize]) -> T {
    let centered = u - T::from_usize_lossy(n0 * n1) / T::lit(2.0);
    let sigma = tie_corrected_variance::<T>(n0, n1, ties).sqrt();
    let correction = if centered > T::zero() {
        T::lit(0.5)
    } else if centered < T::zero() {
        T::lit(-0.5)
    } else {
        T::zero()
    };
    let z = (centered - correction) / sigma;
    (T::lit(2.0) * normal_cdf(z).min(normal_cdf(-z))).min(T::one())
}

/// Wilcoxon rank-sum (Mann-Whitney) test, two-sided.
pub fn wilcoxon<T: Real>(x0: &[T], x1: &[T]) -> Result<BaselineResult<T>> {
    let (n0, n1) = (x0.len(), x1.len());
    if n0 == 0 || n1 == 0 {
        return Err(Error::Input(
            "rank-sum test needs at least one value per group".into(),
        ));
    }
    if x0.iter().chain(x1).any(|v| !v.is_finite()) {
        return Err(Error::Input("rank-sum test needs finite values".into()));
    }
    let pooled: Vec<T> = x0.iter().chain(x1).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let rank_sum: T = ranks[..n0].iter().copied().sum();
    let u = rank_sum - T::from_usize_lossy(n0 * (n0 + 1)) / T::lit(2.0);

    let mut result = BaselineResult {
        statistic: u,
        p_value: T::one(),
        method: BaselineMethod::Wilcoxon,
        n0,
        n1,
        df: None,
        exact: false,
        degenerate: false,
    };
    if ties.len() == 1 && ties[0] == n0 + n1 {
        result.degenerate = true;
        return Ok(result);
    }
    if ties.is_empty() && n0 + n1 <= EXACT_MAX_N {
        result.p_value = exact_p(u, n0, n1);
        result.exact = true;
    } else {
        result.p_value = wilcoxon_normal_p(u, n0, n1, &ties);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn t_identical_samples() {
        let x = [1.0_f64, 2.0, 4.0];
        for v in [TVariant::Pooled, TVariant::Welch] {
            let r = t_test(&x, &x, v).unwrap();
            assert_eq!(r.statistic, 0.0);
            assert!((r.p_value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pooled_t_direct_formula() {
        let r = t_test(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0], TVariant::Pooled).unwrap();
        // pooled sd 1, se sqrt(2/3), df 4
        assert!((r.statistic + 1.0 / (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((r.statistic + 1.2247).abs() < 1e-4);
        assert!((r.p_value - 0.2879).abs() < 1e-3);
        assert_eq!(r.df, Some(4.0));
    }

    #[test]
    fn t_antisymmetry() {
        let a = [1.0_f64, 2.5, 3.0, 7.0];
        let b = [0.5, 2.0, 2.2];
        for v in [TVariant::Pooled, TVariant::Welch] {
            let r1 = t_test(&a, &b, v).unwrap();
            let r2 = t_test(&b, &a, v).unwrap();
            assert!((r1.statistic + r2.statistic).abs() < 1e-12);
            assert!((r1.p_value - r2.p_value).abs() < 1e-12);
        }
    }

    #[test]
    fn t_degenerate() {
        assert!(matches!(
            t_test(&[1.0, 1.0], &[2.0, 2.0], TVariant::Welch),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn wilcoxon_exact_small() {
        let r = wilcoxon(&[1.0_f64, 2.0], &[3.0, 4.0]).unwrap();
        assert!(r.exact);
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 1.0 / 3.0).abs() < 1e-12);
    }

    /// Brute force over all subsets of ranks assigned to the control arm.
    fn brute_force_p(u_obs: f64, n0: usize, n1: usize) -> f64 {
        let n = n0 + n1;
        let (mut below, mut above, mut total) = (0u64, 0u64, 0u64);
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != n0 {
                continue;
            }
            let rank_sum: usize = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).sum();
            let u = (rank_sum - n0 * (n0 + 1) / 2) as f64;
            total += 1;
            if u <= u_obs {
                below += 1;
            }
            if u >= u_obs {
                above += 1;
            }
        }
        (2.0 * below.min(above) as f64 / total as f64).min(1.0)
    }

    #[test]
    fn exact_distribution_matches_enumeration() {
        let x0 = [0.3, 1.9, 2.4, 5.0, 5.1];
        let x1 = [0.1, 0.2, 1.0, 1.2, 3.3, 4.4, 6.0];
        let r = wilcoxon(&x0, &x1).unwrap();
        assert!(r.exact);
        assert!((r.p_value - brute_force_p(r.statistic, 5, 7)).abs() < 1e-12);
    }

    #[test]
    fn identical_samples_wilcoxon() {
        let x: Vec<f64> = (0..15).map(|i| i as f64 * 0.7).collect();
        let r = wilcoxon(&x, &x).unwrap();
        assert!((r.p_value - 1.0).abs() < 1e-12);
        let r = wilcoxon(&[2.0, 2.0], &[2.0]).unwrap();
        assert!(r.degenerate && r.p_value == 1.0);
    }

    #[test]
    fn heavy_ties_shrink_variance() {
        // 40% atoms against 30% atoms
        let mut x0 = vec![0.0; 8];
        x0.extend((0..12).map(|i| 1.0 + i as f64 * 0.3));
        let mut x1 = vec![0.0; 6];
        x1.extend((0..14).map(|i| 1.1 + i as f64 * 0.3));
        let pooled: Vec<f64> = x0.iter().chain(&x1).copied().collect();
        let (_, ties) = midranks(&pooled);
        let corrected: f64 = tie_corrected_variance(20, 20, &ties);
        let plain: f64 = tie_corrected_variance(20, 20, &[]);
        assert!(corrected < plain);
        let r = wilcoxon(&x0, &x1).unwrap();
        assert!(!r.exact);
        assert!((0.0..=1.0).contains(&r.p_value));
    }

    #[test]
    fn exact_and_normal_agree_at_twenty() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for shift in [0.0, 0.3, 0.8, 1.5] {
            let x0: Vec<f64> = (0..10).map(|_| rng.random_range(0.0..3.0)).collect();
            let x1: Vec<f64> = (0..10)
                .map(|_| rng.random_range(0.0..3.0) + shift)
                .collect();
            let r = wilcoxon(&x0, &x1).unwrap();
            assert!(r.exact);
            let approx = wilcoxon_normal_p(r.statistic, 10, 10, &[]);
            assert!(
                (r.p_value - approx).abs() < 0.02,
                "shift {shift}: {} vs {approx}",
                r.p_value
            );
        }
    }

    proptest! {
        #[test]
        fn midranks_sum(v in proptest::collection::vec(prop_oneof![Just(0.0f64), 0.0f64..3.0], 1..60)) {
            let (r, _) = midranks(&v);
            let n = v.len() as f64;
            prop_assert!((r.iter().sum::<f64>() - n * (n + 1.0) / 2.0).abs() < 1e-9);
        }

        #[test]
        fn wilcoxon_monotone_invariant(
            a in proptest::collection::vec(prop_oneof![Just(0.0f64), 0.1f64..5.0], 2..30),
            b in proptest::collection::vec(prop_oneof![Just(0.0f64), 0.1f64..5.0], 2..30),
        ) {
            let r = wilcoxon(&a, &b).unwrap();
            let f = |x: &f64| (x * 0.7).exp() * 3.0 - 1.0;
            let ta: Vec<f64> = a.iter().map(f).collect();
            let tb: Vec<f64> = b.iter().map(f).collect();
            let s = wilcoxon(&ta, &tb).unwrap();
            prop_assert!((r.p_value - s.p_value).abs() < 1e-12);
        }
    }
}
