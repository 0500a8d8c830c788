//! Special functions, bracketed root finding and scalar minimization.
//!
//! Everything here is a pure function of its inputs and generic over [`Real`].

mod minimize;
mod roots;
mod special;

pub use minimize::{minimize_scalar, Minimum};
pub use roots::find_root;
pub use special::{
    chisq_cdf, chisq_quantile, chisq_sf, erfc, ln_gamma, normal_cdf, normal_quantile,
    regularized_beta, regularized_gamma_p, regularized_gamma_q, student_t_sf_two_sided,
};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T = f64> {
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Interval<T> {
    pub fn new(lo: T, hi: T) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::Domain(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> T {
        self.hi - self.lo
    }

    pub fn contains(&self, x: T) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Convergence controls for the iterative solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceSpec<T = f64> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_iter: usize,
}

impl<T: Real> ToleranceSpec<T> {
    pub fn new(abs_tol: T, rel_tol: T, max_iter: usize) -> Result<Self> {
        if !(abs_tol > T::zero() && rel_tol > T::zero() && max_iter >= 1) {
            return Err(Error::Domain(
                "tolerances must be positive and max_iter at least 1".into(),
            ));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_iter,
        })
    }

    /// Same iteration budget, with both tolerances set to `tol`.
    pub fn with_tol(self, tol: T) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            ..self
        }
    }

    pub fn with_max_iter(self, max_iter: usize) -> Self {
        Self { max_iter, ..self }
    }
}

impl<T: Real> Default for ToleranceSpec<T> {
    fn default() -> Self {
        // 1e-10 is below the resolution of f32; floor at a few ulps.
        let tol = T::lit(1e-10).max(T::epsilon() * T::lit(4.0));
        Self {
            abs_tol: tol,
            rel_tol: tol,
            max_iter: 200,
        }
    }
}
