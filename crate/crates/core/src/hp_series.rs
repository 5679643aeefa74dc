//! Coherent-state expectation of the Holstein-Primakoff square root,
//!
//! ```text
//! F(rho, j) = exp(-rho^2) * sum_{n=0}^{2j} rho^(2n)/n! * sqrt(1 - n/2j),
//! ```
//!
//! i.e. a Poisson(rho^2)-weighted average of `sqrt(1 - n/2j)` truncated at
//! `n = 2j`, and its large-`j` limit `sqrt(1 - rho^2/2j)`.
//!
//! The full normalization `exp(-rho^2)` of the untruncated coherent state is
//! kept; the sum is not renormalized to the truncated Fock space.
//!
//! Weights are never formed as `rho^(2n)` and `n!` separately. The production
//! path anchors the log Poisson weight at the mode with a saddle-point
//! (Stirling remainder + deviance) formula and walks outwards with the ratio
//! recurrence `t_{n+1} = t_n * rho^2/(n+1)`, stopping once a geometric bound
//! on the remaining tail is negligible. Cost is `O(sqrt(rho^2))` rather than
//! `O(2j)`. [`eval_f_full`] sums every term `0..=2j` in the log domain and is
//! kept as a reference.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spin::Spin;

/// Default bound on the Poisson mass dropped by the windowed summation.
pub const DEFAULT_SKIP_TOLERANCE: f64 = 1e-15;

/// Result of a windowed evaluation of `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEval<T> {
    pub value: T,
    pub terms_used: u64,
    /// Upper bound on the Poisson weight inside `0..=2j` that the window skipped.
    pub truncated_mass: T,
}

/// One sample of `F` against its limit on the `rho / sqrt(2j)` axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint<T> {
    pub rho_over_sqrt2j: T,
    pub rho: T,
    pub f: T,
    pub f_limit: T,
    pub abs_dev: T,
}

fn check_rho<T: Scalar>(rho: T) -> Result<()> {
    if rho.is_nan() || rho < T::zero() {
        return Err(Error::invalid("rho", format!("must be >= 0, got {rho}")));
    }
    Ok(())
}

/// `F(rho, j)` with the default skip tolerance.
pub fn eval_f<T: Scalar>(rho: T, j: Spin) -> Result<T> {
    eval_f_windowed(rho, j, T::lit(DEFAULT_SKIP_TOLERANCE)).map(|e| e.value)
}

/// Windowed summation of `F(rho, j)`.
///
/// Terms are accumulated outwards from `c = min(floor(rho^2), 2j - 1)` (the
/// `n = 2j` term carries zero weight); each side
/// stops when the tail bound drops below `skip_tol / 2` of the running sum.
pub fn eval_f_windowed<T: Scalar>(rho: T, j: Spin, skip_tol: T) -> Result<SeriesEval<T>> {
    check_rho(rho)?;
    let lambda = rho * rho;
    let twice = j.twice();
    if lambda == T::zero() {
        return Ok(SeriesEval {
            value: T::one(),
            terms_used: 1,
            truncated_mass: T::zero(),
        });
    }
    if !lambda.is_finite() {
        return Ok(SeriesEval {
            value: T::zero(),
            terms_used: 0,
            truncated_mass: T::zero(),
        });
    }

    let two_j = T::from_count(twice);
    let radical = |n: u64| (T::from_count(twice - n) / two_j).sqrt();
    let half_tol = skip_tol / T::lit(2.0);

    let center = lambda.floor().to_u64().unwrap_or(u64::MAX).min(twice - 1);
    let log_anchor = log_poisson_pmf(center, lambda);

    // Weights below are relative to the anchor term t_c = 1.
    let mut sum = radical(center);
    let mut terms = 1u64;
    let mut upper_tail = T::zero();
    let mut lower_tail = T::zero();

    let mut t = T::one();
    let mut n = center;
    while n < twice {
        let q = lambda / T::from_count(n + 1);
        let bound = t * q / (T::one() - q);
        if bound <= half_tol * sum {
            upper_tail = bound;
            break;
        }
        n += 1;
        t = t * q;
        sum = sum + t * radical(n);
        terms += 1;
    }

    t = T::one();
    n = center;
    while n > 0 {
        let q = T::from_count(n) / lambda;
        if q < T::one() {
            let bound = t * q / (T::one() - q);
            if bound <= half_tol * sum {
                lower_tail = bound;
                break;
            }
        }
        t = t * q;
        n -= 1;
        sum = sum + t * radical(n);
        terms += 1;
    }

    let scale = log_anchor.exp();
    Ok(SeriesEval {
        value: (scale * sum).min(T::one()),
        terms_used: terms,
        truncated_mass: scale * (upper_tail + lower_tail),
    })
}

/// Reference path: every term `n = 0..=2j`, summed in the log domain.
pub fn eval_f_full<T: Scalar>(rho: T, j: Spin) -> Result<T> {
    check_rho(rho)?;
    let lambda = rho * rho;
    if lambda == T::zero() {
        return Ok(T::one());
    }
    if !lambda.is_finite() {
        return Ok(T::zero());
    }
    let twice = j.twice();
    let two_j = T::from_count(twice);
    let logs: Vec<T> = (0..twice)
        .map(|n| {
            log_poisson_pmf(n, lambda) + T::lit(0.5) * (T::from_count(twice - n) / two_j).ln()
        })
        .collect();
    let max = logs.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() {
        return Ok(T::zero());
    }
    let sum = logs
        .iter()
        .fold(T::zero(), |acc, &l| acc + (l - max).exp());
    Ok((max.exp() * sum).min(T::one()))
}

/// Large-`j` limit `sqrt(1 - rho^2 / 2j)`.
///
/// A radicand within a few ulps below zero (as produced by `rho = sqrt(2j)`
/// in floating point) is treated as zero; anything further is a domain error.
pub fn eval_f_limit<T: Scalar>(rho: T, j: Spin) -> Result<T> {
    check_rho(rho)?;
    let radicand = T::one() - rho * rho / j.n_atoms::<T>();
    if radicand >= T::zero() {
        Ok(radicand.sqrt())
    } else if radicand >= -T::lit(8.0) * T::epsilon() {
        Ok(T::zero())
    } else {
        Err(Error::Domain(format!(
            "rho^2 = {} exceeds 2j = {}",
            rho * rho,
            j.twice()
        )))
    }
}

/// `F` against its limit on a uniform grid of `rho / sqrt(2j)` over `[0, 1]`.
pub fn convergence_curve<T: Scalar>(j: Spin, grid_points: usize) -> Result<Vec<SeriesPoint<T>>> {
    if grid_points < 2 {
        return Err(Error::invalid("grid_points", "need at least 2"));
    }
    let root = j.n_atoms::<T>().sqrt();
    let last = T::from_count(grid_points as u64 - 1);
    (0..grid_points)
        .map(|k| {
            let u = T::from_count(k as u64) / last;
            let rho = u * root;
            let f = eval_f(rho, j)?;
            let f_limit = eval_f_limit(rho, j)?;
            Ok(SeriesPoint {
                rho_over_sqrt2j: u,
                rho,
                f,
                f_limit,
                abs_dev: (f - f_limit).abs(),
            })
        })
        .collect()
}

/// Max of `|F - F_limit|` over a uniform grid of `rho / sqrt(2j)` in `[0, 1]`.
pub fn sup_deviation<T: Scalar>(j: Spin, grid_points: usize) -> Result<T> {
    Ok(convergence_curve::<T>(j, grid_points)?
        .iter()
        .fold(T::zero(), |acc, p| acc.max(p.abs_dev)))
}

/// `ln(lambda^x e^-lambda / x!)` via Loader's saddle-point form, accurate to a
/// few ulps of the result even when `x ln lambda` and `ln x!` are huge.
pub(crate) fn log_poisson_pmf<T: Scalar>(x: u64, lambda: T) -> T {
    if x == 0 {
        return -lambda;
    }
    let xf = T::from_count(x);
    -stirling_remainder::<T>(x) - deviance(xf, lambda) - T::lit(0.5) * (T::TAU() * xf).ln()
}

/// `ln n! - (n + 1/2) ln n + n - ln(2 pi)/2`.
fn stirling_remainder<T: Scalar>(n: u64) -> T {
    const TABLE: [f64; 16] = [
        0.0,
        0.081_061_466_795_327_258_22,
        0.041_340_695_955_409_294_09,
        0.027_677_925_684_998_339_15,
        0.020_790_672_103_765_093_11,
        0.016_644_691_189_821_192_16,
        0.013_876_128_823_070_747_99,
        0.011_896_709_945_891_770_10,
        0.010_411_265_261_972_096_50,
        0.009_255_462_182_712_732_918,
        0.008_330_563_433_362_871_256,
        0.007_573_675_487_951_840_795,
        0.006_942_840_107_209_529_866,
        0.006_408_994_188_004_207_068,
        0.005_951_370_112_758_847_736,
        0.005_554_733_551_962_801_371,
    ];
    if n < 16 {
        return T::lit(TABLE[n as usize]);
    }
    let s0 = T::lit(1.0 / 12.0);
    let s1 = T::lit(1.0 / 360.0);
    let s2 = T::lit(1.0 / 1260.0);
    let s3 = T::lit(1.0 / 1680.0);
    let s4 = T::lit(1.0 / 1188.0);
    let nf = T::from_count(n);
    let nn = nf * nf;
    if n > 500 {
        (s0 - s1 / nn) / nf
    } else if n > 80 {
        (s0 - (s1 - s2 / nn) / nn) / nf
    } else if n > 35 {
        (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / nf
    } else {
        (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / nf
    }
}

/// `x ln(x / mean) + mean - x`, computed without cancellation near `x = mean`.
fn deviance<T: Scalar>(x: T, mean: T) -> T {
    let diff = x - mean;
    if diff.abs() < T::lit(0.1) * (x + mean) {
        let mut v = diff / (x + mean);
        let mut s = diff * v;
        let mut ej = T::lit(2.0) * x * v;
        v = v * v;
        for k in 1..1000u64 {
            ej = ej * v;
            let next = s + ej / T::from_count(2 * k + 1);
            if next == s {
                return next;
            }
            s = next;
        }
        s
    } else {
        x * (x / mean).ln() + mean - x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spin(twice: u64) -> Spin {
        Spin::from_twice(twice).unwrap()
    }

    #[test]
    fn f_at_origin_is_one() {
        for twice in [1, 2, 20, 2000, 2_000_000] {
            assert_eq!(eval_f(0.0, spin(twice)).unwrap(), 1.0);
            assert_eq!(eval_f_full(0.0, spin(twice.min(4000))).unwrap(), 1.0);
        }
    }

    #[test]
    fn spin_half_is_a_gaussian() {
        let e = (-1.0f64).exp();
        assert_relative_eq!(eval_f(1.0, spin(1)).unwrap(), e, max_relative = 1e-15);
        assert_relative_eq!(eval_f_full(1.0, spin(1)).unwrap(), e, max_relative = 1e-15);
    }

    #[test]
    fn spin_one_three_term_sum() {
        let expected = (-1.0f64).exp() * (1.0 + 0.5f64.sqrt());
        assert_relative_eq!(eval_f(1.0, spin(2)).unwrap(), expected, max_relative = 1e-15);
        assert_relative_eq!(expected, 0.628_009, epsilon = 1e-6);
    }

    #[test]
    fn far_tail_is_negligible() {
        // exp(-1e4) * 1e4^20 / 20! is far below the smallest double.
        let v = eval_f(100.0, spin(20)).unwrap();
        assert!((0.0..1e-50).contains(&v), "{v}");
        assert_eq!(eval_f_full(100.0, spin(20)).unwrap(), v);
        // Still representable a bit closer in: rho^2 = 400 > 2j.
        let near = eval_f(20.0, spin(20)).unwrap();
        assert!(near > 0.0 && near < 1e-50, "{near}");
        assert_relative_eq!(near, eval_f_full(20.0, spin(20)).unwrap(), max_relative = 1e-13);
    }

    #[test]
    fn limit_values() {
        let j = spin(20);
        assert_eq!(eval_f_limit(0.0, j).unwrap(), 1.0);
        assert_eq!(eval_f_limit(20f64.sqrt(), j).unwrap(), 0.0);
        assert_relative_eq!(
            eval_f_limit(10f64.sqrt(), j).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            max_relative = 1e-15
        );
        assert!(matches!(eval_f_limit(5.0, j), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_negative_rho() {
        assert!(eval_f(-1.0, spin(2)).is_err());
        assert!(eval_f_full(-1.0, spin(2)).is_err());
        assert!(eval_f_limit(-0.1, spin(2)).is_err());
        assert!(eval_f(f64::NAN, spin(2)).is_err());
    }

    #[test]
    fn window_skips_little_mass() {
        let e = eval_f_windowed(30.0, spin(2000), 1e-15).unwrap();
        assert!(e.truncated_mass <= 1e-15);
        assert!(e.terms_used < 2001, "window should be narrower: {}", e.terms_used);
        assert!(e.terms_used > 100);
    }

    #[test]
    fn pmf_matches_direct_formula_for_small_counts() {
        let lambda = 3.7f64;
        let mut log_fact = 0.0;
        for n in 0..40u64 {
            if n > 0 {
                log_fact += (n as f64).ln();
            }
            let direct = n as f64 * lambda.ln() - lambda - log_fact;
            assert_relative_eq!(log_poisson_pmf(n, lambda), direct, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_precision_works() {
        let v: f32 = eval_f(1.0f32, spin(1)).unwrap();
        assert_relative_eq!(v, (-1.0f32).exp(), max_relative = 1e-6);
        let d: f32 = sup_deviation(spin(20), 101).unwrap();
        assert_relative_eq!(d, 0.194_087, max_relative = 1e-4);
    }

    #[test]
    fn grid_needs_two_points() {
        assert!(sup_deviation::<f64>(spin(20), 1).is_err());
        let c = convergence_curve::<f64>(spin(20), 2).unwrap();
        assert_eq!(c[0].f, 1.0);
        assert_eq!(c[1].f_limit, 0.0);
    }
}
