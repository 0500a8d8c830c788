use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{Interval, ToleranceSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum<T = f64> {
    pub x: T,
    pub f: T,
    pub iterations: usize,
}

/// Brent's minimizer (parabolic interpolation with golden-section fallback).
///
/// The bracket endpoints are probed after convergence, so monotone objectives
/// return the boundary. `+inf` values are allowed and treated as "very large".
pub fn minimize_scalar<T, F>(
    mut f: F,
    bracket: Interval<T>,
    tol: &ToleranceSpec<T>,
) -> Result<Minimum<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let golden = T::lit(0.381_966_011_250_105_1);
    let half = T::lit(0.5);
    let two = T::lit(2.0);

    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let mut x = a + golden * (b - a);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x);
    if fx.is_nan() {
        return Err(Error::Domain(format!("objective is NaN at {x}")));
    }
    let mut fw = fx;
    let mut fv = fx;
    let mut d = T::zero();
    let mut e = T::zero();

    let mut converged = false;
    let mut iterations = 0;
    while iterations < tol.max_iter {
        iterations += 1;
        let xm = half * (a + b);
        let tol1 = tol.rel_tol * x.abs() + tol.abs_tol / two;
        let tol2 = two * tol1;
        if (x - xm).abs() <= tol2 - half * (b - a) {
            converged = true;
            break;
        }
        let mut golden_step = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = two * (q - r);
            if q > T::zero() {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            if p.is_finite()
                && q.is_finite()
                && q != T::zero()
                && p.abs() < (half * q * etemp).abs()
                && p > q * (a - x)
                && p < q * (b - x)
            {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
                golden_step = false;
            }
        }
        if golden_step {
            e = if x >= xm { a - x } else { b - x };
            d = golden * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d >= T::zero() {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u);
        if fu.is_nan() {
            return Err(Error::Domain(format!("objective is NaN at {u}")));
        }
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }

    let mut best = Minimum {
        x,
        f: fx,
        iterations,
    };
    for end in [bracket.lo, bracket.hi] {
        let fe = f(end);
        if fe < best.f {
            best = Minimum {
                x: end,
                f: fe,
                iterations,
            };
        }
    }
    if !converged {
        return Err(Error::Convergence {
            iterations,
            best: best.x.to_f64_lossy(),
        });
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> ToleranceSpec<f64> {
        ToleranceSpec::default()
    }

    #[test]
    fn quadratic_vertex() {
        let m = minimize_scalar(
            |x| (x - 2.0) * (x - 2.0),
            Interval::new(0.0, 5.0).unwrap(),
            &tol(),
        )
        .unwrap();
        assert!((m.x - 2.0).abs() < 1e-8);
        assert!(m.f.abs() < 1e-15);
    }

    #[test]
    fn kink_matches_grid_oracle() {
        let f = |x: f64| (x - 1.5).abs();
        let grid_best = (0..=300_000)
            .map(|i| i as f64 * 1e-5)
            .min_by(|a, b| f(*a).partial_cmp(&f(*b)).unwrap())
            .unwrap();
        let m = minimize_scalar(f, Interval::new(0.0, 3.0).unwrap(), &tol()).unwrap();
        assert!((m.x - grid_best).abs() < 1e-6);
    }

    #[test]
    fn monotone_returns_left_boundary() {
        let m =
            minimize_scalar(|x: f64| x.exp(), Interval::new(-1.0, 4.0).unwrap(), &tol()).unwrap();
        assert_eq!(m.x, -1.0);
        let m = minimize_scalar(|x: f64| -x, Interval::new(-1.0, 4.0).unwrap(), &tol()).unwrap();
        assert_eq!(m.x, 4.0);
    }

    #[test]
    fn infinite_walls_are_tolerated() {
        // barrier objective that is infinite at and beyond the edges
        let f = |x: f64| {
            if x <= 0.0 || x >= 1.0 {
                f64::INFINITY
            } else {
                -(x.ln() + (1.0 - x).ln()) + 0.3 * x
            }
        };
        let m = minimize_scalar(f, Interval::new(0.0, 1.0).unwrap(), &tol()).unwrap();
        // derivative: -1/x + 1/(1-x) + 0.3 = 0
        let g = |x: f64| -1.0 / x + 1.0 / (1.0 - x) + 0.3;
        assert!(g(m.x).abs() < 1e-6);
    }
}
