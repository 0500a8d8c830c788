//! Gaussian and logistic maximum likelihood for the two parts of the model.

use crate::error::{Error, Result};
use crate::numerics::chisq_sf;
use crate::scalar::Real;

/// Dense row-major design matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Design<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Design<T> {
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Input("design rows have unequal length".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    /// Builds an `n x p` design from a per-row filler.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn intercept(rows: usize) -> Self {
        Self::from_fn(rows, 1, |_, _| T::one())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn mul_vec(&self, beta: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(beta).map(|(&x, &b)| x * b).sum())
            .collect()
    }
}

/// Least squares by Householder QR. Returns the coefficient vector.
fn least_squares<T: Real>(x: &Design<T>, y: &[T]) -> Result<Vec<T>> {
    let (n, p) = (x.rows(), x.cols());
    let mut a = x.data.clone();
    let mut b = y.to_vec();
    let col_norm = |a: &[T], j: usize, from: usize| -> T {
        (from..n)
            .map(|i| a[i * p + j] * a[i * p + j])
            .sum::<T>()
            .sqrt()
    };
    let scale: Vec<T> = (0..p).map(|j| col_norm(&a, j, 0)).collect();
    let rank_tol = T::epsilon().sqrt() * T::lit(1e-2);

    for k in 0..p {
        let norm = col_norm(&a, k, k);
        if !(norm > rank_tol * scale[k]) || scale[k] == T::zero() {
            return Err(Error::SingularDesign { column: k });
        }
        let alpha = if a[k * p + k] > T::zero() {
            -norm
        } else {
            norm
        };
        // v = x - alpha e_k, stored in place below the diagonal
        let mut v: Vec<T> = (k..n).map(|i| a[i * p + k]).collect();
        v[0] = v[0] - alpha;
        let vnorm2: T = v.iter().map(|&t| t * t).sum();
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::lit(2.0);
        for j in k..p {
            let dot: T = (k..n).map(|i| v[i - k] * a[i * p + j]).sum();
            let f = two * dot / vnorm2;
            for i in k..n {
                a[i * p + j] = a[i * p + j] - f * v[i - k];
            }
        }
        let dot: T = (k..n).map(|i| v[i - k] * b[i]).sum();
        let f = two * dot / vnorm2;
        for i in k..n {
            b[i] = b[i] - f * v[i - k];
        }
    }

    let mut coef = vec![T::zero(); p];
    for k in (0..p).rev() {
        let s: T = ((k + 1)..p).map(|j| a[k * p + j] * coef[j]).sum();
        coef[k] = (b[k] - s) / a[k * p + k];
    }
    Ok(coef)
}

/// Gaussian linear model fitted by maximum likelihood.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit<T = f64> {
    pub coef: Vec<T>,
    /// MLE of the residual variance (divisor `n`).
    pub sigma2_hat: T,
    pub rss: T,
    pub loglik: T,
    pub n: usize,
}

/// Ordinary least squares with the maximized Gaussian log-likelihood.
pub fn ols_mle<T: Real>(design: &Design<T>, y: &[T]) -> Result<LinearFit<T>> {
    let n = design.rows();
    if y.len() != n {
        return Err(Error::Input(format!(
            "design has {n} rows but response has {} values",
            y.len()
        )));
    }
    if n < design.cols() + 1 {
        return Err(Error::Input(format!(
            "need at least {} observations for {} coefficients, got {n}",
            design.cols() + 1,
            design.cols()
        )));
    }
    let coef = least_squares(design, y)?;
    let fitted = design.mul_vec(&coef);
    let rss: T = y
        .iter()
        .zip(&fitted)
        .map(|(&yi, &fi)| (yi - fi) * (yi - fi))
        .sum();
    // exact fits leave only rounding noise, measured against the spread and size of y
    let nf = T::from_usize_lossy(n);
    let y_bar = y.iter().copied().sum::<T>() / nf;
    let ss_centered: T = y.iter().map(|&v| (v - y_bar) * (v - y_bar)).sum();
    let ss_raw: T = y.iter().map(|&v| v * v).sum();
    let eps = T::epsilon();
    if !(rss > eps * ss_centered + eps * eps * ss_raw * nf) {
        return Err(Error::DegenerateFit);
    }
    let sigma2_hat = rss / nf;
    let loglik = -nf / T::lit(2.0) * ((T::lit(2.0) * T::PI() * sigma2_hat).ln() + T::one());
    Ok(LinearFit {
        coef,
        sigma2_hat,
        rss,
        loglik,
        n,
    })
}

/// Logistic regression fitted by maximum likelihood.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit<T = f64> {
    pub coef: Vec<T>,
    pub loglik: T,
    pub converged: bool,
    pub iterations: usize,
    pub n: usize,
}

impl<T: Real> LogisticFit<T> {
    pub fn fitted(&self, design: &Design<T>, offset: Option<&[T]>) -> Vec<T> {
        let mut eta = design.mul_vec(&self.coef);
        if let Some(off) = offset {
            for (e, &o) in eta.iter_mut().zip(off) {
                *e = *e + o;
            }
        }
        eta.into_iter().map(logistic).collect()
    }
}

/// Coefficient magnitude on the logit scale beyond which the fit is declared separated.
pub const SEPARATION_THRESHOLD: f64 = 30.0;
const IRLS_MAX_ITER: usize = 100;

fn logistic<T: Real>(eta: T) -> T {
    if eta >= T::zero() {
        T::one() / (T::one() + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (T::one() + e)
    }
}

/// log(1 + exp(eta)) without overflow.
fn softplus<T: Real>(eta: T) -> T {
    if eta > T::zero() {
        eta + (-eta).exp().ln_1p()
    } else {
        eta.exp().ln_1p()
    }
}

fn bernoulli_loglik<T: Real>(a: &[T], eta: &[T]) -> T {
    a.iter()
        .zip(eta)
        .map(|(&ai, &e)| ai * e - softplus(e))
        .sum()
}

/// Logistic maximum likelihood by iteratively reweighted least squares.
pub fn logistic_mle<T: Real>(design: &Design<T>, a: &[T]) -> Result<LogisticFit<T>> {
    logistic_mle_with_offset(design, a, None)
}

/// As [`logistic_mle`], with a fixed additive offset on the linear predictor.
pub fn logistic_mle_with_offset<T: Real>(
    design: &Design<T>,
    a: &[T],
    offset: Option<&[T]>,
) -> Result<LogisticFit<T>> {
    let (n, p) = (design.rows(), design.cols());
    if a.len() != n || offset.is_some_and(|o| o.len() != n) {
        return Err(Error::Input(
            "logistic response/offset length mismatch".into(),
        ));
    }
    if a.iter().any(|&v| v != T::zero() && v != T::one()) {
        return Err(Error::Input("logistic response must be 0/1".into()));
    }
    let zero_offset;
    let offset = match offset {
        Some(o) => o,
        None => {
            zero_offset = vec![T::zero(); n];
            &zero_offset
        }
    };
    let threshold = T::lit(SEPARATION_THRESHOLD);
    let grad_tol = T::lit(1e-10).max(T::epsilon() * T::lit(100.0) * T::from_usize_lossy(n));
    let step_tol = T::lit(1e-6);
    let half = T::lit(0.5);
    let ll_slack = T::epsilon() * T::lit(1e3);

    let linear_predictor = |beta: &[T]| -> Vec<T> {
        design
            .mul_vec(beta)
            .into_iter()
            .zip(offset)
            .map(|(e, &o)| e + o)
            .collect()
    };

    let mut beta = vec![T::zero(); p];
    let mut eta = linear_predictor(&beta);
    let mut loglik = bernoulli_loglik(a, &eta);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < IRLS_MAX_ITER {
        let prob: Vec<T> = eta.iter().map(|&e| logistic(e)).collect();
        let grad: Vec<T> = (0..p)
            .map(|j| (0..n).map(|i| design.get(i, j) * (a[i] - prob[i])).sum())
            .collect();
        let grad_norm = grad.iter().map(|&g| g * g).sum::<T>().sqrt();

        // Newton step as a weighted least-squares problem on sqrt(w)-scaled rows.
        let w: Vec<T> = prob
            .iter()
            .map(|&pi| (pi * (T::one() - pi)).max(T::min_positive_value().sqrt()))
            .collect();
        let scaled = Design::from_fn(n, p, |i, j| design.get(i, j) * w[i].sqrt());
        let rhs: Vec<T> = (0..n).map(|i| (a[i] - prob[i]) / w[i].sqrt()).collect();
        let step = least_squares(&scaled, &rhs)?;

        // A vanishing gradient alone is not enough: along a separating direction
        // the gradient decays geometrically while Newton keeps stepping by ~1.
        let step_max = step.iter().fold(T::zero(), |m, s| m.max(s.abs()));
        if grad_norm < grad_tol && step_max < step_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut t = T::one();
        let mut accepted = false;
        for _ in 0..30 {
            let candidate: Vec<T> = beta.iter().zip(&step).map(|(&b, &s)| b + t * s).collect();
            let cand_eta = linear_predictor(&candidate);
            let cand_ll = bernoulli_loglik(a, &cand_eta);
            // Near the optimum the log-likelihood change falls below its own
            // rounding error, so allow a few hundred ulps of slack.
            if cand_ll >= loglik - ll_slack * (T::one() + loglik.abs()) {
                beta = candidate;
                eta = cand_eta;
                loglik = cand_ll;
                accepted = true;
                break;
            }
            t = t * half;
        }
        if let Some(column) = beta.iter().position(|b| b.abs() > threshold) {
            return Err(Error::Separation {
                column,
                partial: None,
            });
        }
        if !accepted {
            break;
        }
    }

    Ok(LogisticFit {
        coef: beta,
        loglik,
        converged,
        iterations,
        n,
    })
}

/// Likelihood-ratio statistic of nested models and its chi-square p-value.
pub fn lrt_nested<T: Real>(full: T, reduced: T, df: u32) -> Result<(T, T)> {
    let slack = T::lit(1e-8).max(T::epsilon().sqrt() * (full.abs() + reduced.abs()));
    if full < reduced - slack {
        return Err(Error::ModelNesting {
            full: full.to_f64_lossy(),
            reduced: reduced.to_f64_lossy(),
        });
    }
    let w = (T::lit(2.0) * (full - reduced)).max(T::zero());
    let p = chisq_sf(w, df)?;
    Ok((w, p))
}
