//! Brent's bracketed scalar minimization (golden section with parabolic steps).

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarMinimum<T> {
    pub x: T,
    pub fx: T,
    pub iterations: usize,
}

/// Minimizes `f` on `[low, high]` starting from the interior point `start`.
///
/// `rel_tol` is the relative tolerance on `x` (floored at a few ulps); the
/// returned point is never worse than `start`.
pub fn minimize<T, F>(
    mut f: F,
    low: T,
    high: T,
    start: T,
    rel_tol: T,
    max_iter: usize,
) -> Result<ScalarMinimum<T>>
where
    T: Scalar,
    F: FnMut(T) -> Result<T>,
{
    let golden = T::lit(0.381_966_011_250_105_1);
    let tiny = T::epsilon() * T::lit(1e-3);
    let rel_tol = rel_tol.max(T::lit(4.0) * T::epsilon());
    let (mut a, mut b) = if low <= high { (low, high) } else { (high, low) };
    let half = T::lit(0.5);
    let two = T::lit(2.0);

    let mut x = start.max(a).min(b);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x)?;
    let mut fw = fx;
    let mut fv = fx;
    let mut d = T::zero();
    let mut e = T::zero();

    for iter in 0..max_iter {
        let mid = half * (a + b);
        let tol1 = rel_tol * x.abs() + tiny;
        let tol2 = two * tol1;
        if (x - mid).abs() <= tol2 - half * (b - a) {
            return Ok(ScalarMinimum {
                x,
                fx,
                iterations: iter,
            });
        }

        let mut take_golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = two * (q - r);
            if q > T::zero() {
                p = -p;
            }
            q = q.abs();
            if p.abs() < (half * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if mid >= x { tol1 } else { -tol1 };
                }
                take_golden = false;
            }
        }
        if take_golden {
            e = if x >= mid { a - x } else { b - x };
            d = golden * e;
        }

        let u = if d.abs() >= tol1 {
            x + d
        } else if d > T::zero() {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u)?;

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

    Err(Error::NonConvergence {
        what: "bracketed minimization",
        iterations: max_iter,
        residual: (b - a).to_f64_lossy(),
    })
}
