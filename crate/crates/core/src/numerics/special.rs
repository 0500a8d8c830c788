use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{find_root, Interval, ToleranceSpec};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const MAX_SERIES_TERMS: usize = 100_000;

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma<T: Real>(x: T) -> T {
    if x < T::lit(0.5) {
        // reflection
        let pi = T::PI();
        return (pi / (pi * x).sin()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::lit(LANCZOS_COEF[0]);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (x + T::from_usize_lossy(i));
    }
    let t = x + T::lit(LANCZOS_G + 0.5);
    T::lit(0.5) * (T::lit(2.0) * T::PI()).ln() + (x + T::lit(0.5)) * t.ln() - t + acc.ln()
}

fn check_gamma_args<T: Real>(a: T, x: T) -> Result<()> {
    if !(a > T::zero()) || x.is_nan() || x < T::zero() {
        return Err(Error::Domain(format!(
            "incomplete gamma needs a > 0 and x >= 0 (a = {a}, x = {x})"
        )));
    }
    Ok(())
}

/// Series for the lower regularized incomplete gamma P(a, x); converges fast for x < a + 1.
fn gamma_p_series<T: Real>(a: T, x: T) -> T {
    let mut ap = a;
    let mut term = T::one() / a;
    let mut sum = term;
    for _ in 0..MAX_SERIES_TERMS {
        ap = ap + T::one();
        term = term * x / ap;
        sum = sum + term;
        if term.abs() < sum.abs() * T::epsilon() {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Continued fraction (modified Lentz) for the upper regularized incomplete gamma Q(a, x).
fn gamma_q_cf<T: Real>(a: T, x: T) -> T {
    let tiny = T::min_positive_value() / T::epsilon();
    let two = T::lit(2.0);
    let mut b = x + T::one() - a;
    let mut c = T::one() / tiny;
    let mut d = T::one() / b;
    let mut h = d;
    for i in 1..MAX_SERIES_TERMS {
        let fi = T::from_usize_lossy(i);
        let an = -fi * (fi - a);
        b = b + two;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = T::one() / d;
        let delta = d * c;
        h = h * delta;
        if (delta - T::one()).abs() < T::epsilon() {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Lower regularized incomplete gamma function P(a, x).
pub fn regularized_gamma_p<T: Real>(a: T, x: T) -> Result<T> {
    check_gamma_args(a, x)?;
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x.is_infinite() {
        return Ok(T::one());
    }
    Ok(if x < a + T::one() {
        gamma_p_series(a, x)
    } else {
        T::one() - gamma_q_cf(a, x)
    })
}

/// Upper regularized incomplete gamma function Q(a, x) = 1 - P(a, x).
pub fn regularized_gamma_q<T: Real>(a: T, x: T) -> Result<T> {
    check_gamma_args(a, x)?;
    if x == T::zero() {
        return Ok(T::one());
    }
    if x.is_infinite() {
        return Ok(T::zero());
    }
    Ok(if x < a + T::one() {
        T::one() - gamma_p_series(a, x)
    } else {
        gamma_q_cf(a, x)
    })
}

fn check_df<T: Real>(df: u32) -> Result<T> {
    if df == 0 {
        return Err(Error::Domain("degrees of freedom must be positive".into()));
    }
    Ok(T::from_u32(df).expect("df representable"))
}

/// Upper tail P(X > x) of the chi-square distribution with `df` degrees of freedom.
pub fn chisq_sf<T: Real>(x: T, df: u32) -> Result<T> {
    let k = check_df::<T>(df)?;
    if x.is_nan() || x < T::zero() {
        return Err(Error::Domain(format!(
            "chi-square argument must be >= 0, got {x}"
        )));
    }
    regularized_gamma_q(k / T::lit(2.0), x / T::lit(2.0))
}

pub fn chisq_cdf<T: Real>(x: T, df: u32) -> Result<T> {
    let k = check_df::<T>(df)?;
    if x.is_nan() || x < T::zero() {
        return Err(Error::Domain(format!(
            "chi-square argument must be >= 0, got {x}"
        )));
    }
    regularized_gamma_p(k / T::lit(2.0), x / T::lit(2.0))
}

/// The `p` quantile of the chi-square distribution, i.e. `x` with `P(X <= x) = p`.
pub fn chisq_quantile<T: Real>(p: T, df: u32) -> Result<T> {
    let k = check_df::<T>(df)?;
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::Domain(format!(
            "quantile level must lie in (0, 1), got {p}"
        )));
    }
    let target = T::one() - p;
    // Work on whichever tail is smaller so the residual keeps its relative precision.
    let residual = |x: T| -> T {
        if p < T::lit(0.5) {
            chisq_cdf(x, df).map(|c| p - c).unwrap_or(T::nan())
        } else {
            chisq_sf(x, df).map(|s| s - target).unwrap_or(T::nan())
        }
    };
    let mut hi = k.max(T::one());
    let mut expansions = 0;
    while residual(hi) > T::zero() {
        hi = hi * T::lit(2.0);
        expansions += 1;
        if expansions > 2000 || hi.is_infinite() {
            return Err(Error::Convergence {
                iterations: expansions,
                best: hi.to_f64_lossy(),
            });
        }
    }
    let tol = ToleranceSpec::default()
        .with_tol(T::epsilon() * T::lit(16.0))
        .with_max_iter(500);
    find_root(residual, Interval::new(T::zero(), hi)?, &tol)
}

/// Complementary error function via erfc(x) = Q(1/2, x^2) for x >= 0.
pub fn erfc<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x.is_nan() {
        return x;
    }
    if x >= T::zero() {
        regularized_gamma_q(half, x * x).expect("valid arguments")
    } else {
        T::one() + regularized_gamma_p(half, x * x).expect("valid arguments")
    }
}

/// Standard normal cumulative distribution function.
pub fn normal_cdf<T: Real>(z: T) -> T {
    T::lit(0.5) * erfc(-z / T::SQRT_2())
}

/// Standard normal quantile, found by inverting [`normal_cdf`].
pub fn normal_quantile<T: Real>(p: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::Domain(format!(
            "quantile level must lie in (0, 1), got {p}"
        )));
    }
    // |z| for p = 1e-300 is about 37; the bracket below is generous.
    let bound = T::lit(40.0);
    let tol = ToleranceSpec::default()
        .with_tol(T::epsilon() * T::lit(16.0))
        .with_max_iter(500);
    if p < T::lit(0.5) {
        find_root(
            |z| normal_cdf(z) - p,
            Interval::new(-bound, T::zero())?,
            &tol,
        )
    } else {
        // upper tail through symmetry keeps precision for p near 1
        let q = T::one() - p;
        find_root(
            |z| normal_cdf(-z) - q,
            Interval::new(T::zero(), bound)?,
            &tol,
        )
    }
}

/// Continued fraction for the regularized incomplete beta function.
fn beta_cf<T: Real>(a: T, b: T, x: T) -> T {
    let tiny = T::min_positive_value() / T::epsilon();
    let one = T::one();
    let two = T::lit(2.0);
    let qab = a + b;
    let qap = a + one;
    let qam = a - one;
    let mut c = one;
    let mut d = one - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = one / d;
    let mut h = d;
    for m in 1..MAX_SERIES_TERMS {
        let m = T::from_usize_lossy(m);
        let m2 = two * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        h = h * d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        let del = d * c;
        h = h * del;
        if (del - one).abs() < T::epsilon() {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function I_x(a, b).
pub fn regularized_beta<T: Real>(x: T, a: T, b: T) -> Result<T> {
    if !(a > T::zero() && b > T::zero()) || !(x >= T::zero() && x <= T::one()) {
        return Err(Error::Domain(format!(
            "incomplete beta needs a, b > 0 and x in [0, 1] (x = {x}, a = {a}, b = {b})"
        )));
    }
    if x == T::zero() || x == T::one() {
        return Ok(x);
    }
    let ln_front =
        ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (T::one() - x).ln();
    let front = ln_front.exp();
    Ok(if x < (a + T::one()) / (a + b + T::lit(2.0)) {
        front * beta_cf(a, b, x) / a
    } else {
        T::one() - front * beta_cf(b, a, T::one() - x) / b
    })
}

/// Two-sided tail probability P(|T| > |t|) for Student's t with `df` degrees of freedom.
pub fn student_t_sf_two_sided<T: Real>(t: T, df: T) -> Result<T> {
    if !(df > T::zero()) || t.is_nan() {
        return Err(Error::Domain(format!(
            "invalid t-distribution arguments (t = {t}, df = {df})"
        )));
    }
    if t.is_infinite() {
        return Ok(T::zero());
    }
    regularized_beta(df / (df + t * t), df / T::lit(2.0), T::lit(0.5))
}
