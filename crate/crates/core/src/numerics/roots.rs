use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{Interval, ToleranceSpec};

fn same_sign<T: Real>(a: T, b: T) -> bool {
    (a > T::zero() && b > T::zero()) || (a < T::zero() && b < T::zero())
}

/// Brent's method: bisection safeguarding secant and inverse quadratic steps.
///
/// Requires `f(lo)` and `f(hi)` to have opposite signs (or one to vanish). The
/// returned point lies inside the bracket; the final bracket half-width is at
/// most `abs_tol / 2 + rel_tol * |x| / 2` plus a few ulps.
pub fn find_root<T, F>(mut f: F, bracket: Interval<T>, tol: &ToleranceSpec<T>) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let three = T::lit(3.0);

    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::Domain(
            "function is NaN at a bracket endpoint".into(),
        ));
    }
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if same_sign(fa, fb) {
        return Err(Error::Bracket {
            lo: a.to_f64_lossy(),
            hi: b.to_f64_lossy(),
        });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..tol.max_iter {
        if same_sign(fb, fc) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + half * tol.abs_tol.max(tol.rel_tol * b.abs());
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = three * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if p.is_finite() && q.is_finite() && two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if d.abs() > tol1 {
            b = b + d;
        } else {
            b = b + if xm > T::zero() { tol1 } else { -tol1 };
        }
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::Domain(format!("function is NaN at {b}")));
        }
    }
    Err(Error::Convergence {
        iterations: tol.max_iter,
        best: b.to_f64_lossy(),
    })
}
