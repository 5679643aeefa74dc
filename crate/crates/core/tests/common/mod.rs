//! Independent reference computations shared by the integration tests.
//!
//! None of these go through the library's numerics: the series oracle works in
//! big-integer fixed point with exact rational arguments, and the grid oracles
//! scan closed-form expressions directly.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

/// Fractional bits of the fixed-point representation.
const FRAC_BITS: u64 = 320;

fn to_f64(fixed: &BigInt) -> f64 {
    // keep 64 significant bits before converting so huge values do not overflow
    let bits = fixed.bits();
    if bits > 1000 {
        let shift = bits - 64;
        let top = (fixed >> shift).to_f64().unwrap();
        return top * 2f64.powi(shift as i32 - FRAC_BITS as i32);
    }
    let mantissa = fixed.to_f64().unwrap();
    mantissa * 2f64.powi(-(FRAC_BITS as i32))
}

/// Big-integer evaluation of `F(rho, j)` and of `sqrt(1 - rho^2/2j)` at
/// rational `rho^2`, for one fixed `2j`.
///
/// `F = sum_{n<=2j} t_n sqrt(1 - n/2j) / sum_{n>=0} t_n` with `t_n = x^n/n!`,
/// so the exponential prefactor never has to be formed.
pub struct SeriesOracle {
    two_j: u64,
    roots: Vec<BigInt>,
}

impl SeriesOracle {
    pub fn new(two_j: u64) -> Self {
        let roots = (0..=two_j)
            .map(|n| ((BigInt::from(two_j - n) << (2 * FRAC_BITS)) / BigInt::from(two_j)).sqrt())
            .collect();
        SeriesOracle { two_j, roots }
    }

    /// `(F, limit)` at `rho^2 = x_num / x_den`.
    pub fn eval(&self, x_num: u64, x_den: u64) -> (f64, f64) {
        let two_j = self.two_j;
        let xn = BigInt::from(x_num);
        let xd = BigInt::from(x_den);
        let mut term = BigInt::one() << FRAC_BITS;
        let mut truncated = BigInt::zero();
        let mut full = BigInt::zero();
        let mut n: u64 = 0;
        while !term.is_zero() || n <= two_j {
            if n <= two_j {
                truncated += (&term * &self.roots[n as usize]) >> FRAC_BITS;
            }
            full += &term;
            n += 1;
            term = (&term * &xn) / (&xd * BigInt::from(n));
        }
        let ratio = (truncated << FRAC_BITS) / full;
        let den = u128::from(x_den) * u128::from(two_j);
        let lim_rad = (BigInt::from(den - u128::from(x_num).min(den)) << (2 * FRAC_BITS)) / BigInt::from(den);
        (to_f64(&ratio), to_f64(&lim_rad.sqrt()))
    }

    /// Sup of `|F - limit|` over `rho/sqrt(2j) = i/(grid-1)`, `i = 0..grid`.
    pub fn sup_deviation(&self, grid: u64) -> f64 {
        let m = grid - 1;
        (0..grid)
            .map(|i| {
                let (f, lim) = self.eval(i * i * self.two_j, m * m);
                (f - lim).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Sup deviations for j = 10, 100, 1000 on 1001 points, frozen from a
/// 40-digit direct summation and reproduced by [`SeriesOracle::sup_deviation`].
pub const PINNED_SUP_DEVIATION: [(u64, f64); 3] = [
    (20, 0.194_086_972_407_698_88),
    (200, 0.109_576_776_997_860_98),
    (2000, 0.061_550_729_867_349_86),
];

/// Minimum of the thermodynamic energy per atom as a function of the excited
/// fraction `y = rho_b^2/2j`, with the photon amplitude already optimized:
/// `e(y) = -4 g^2 y (1-y) + w y - w/2`. Returns `(e, photons, y)`.
pub fn grid_minimum(omega_a: f64, gamma: f64, points: usize) -> (f64, f64, f64) {
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..points {
        let y = i as f64 / (points - 1) as f64;
        let e = -4.0 * gamma * gamma * y * (1.0 - y) + omega_a * y - omega_a / 2.0;
        if e < best.0 {
            best = (e, 4.0 * gamma * gamma * y * (1.0 - y), y);
        }
    }
    best
}

/// Second-order energy of `|0, -1/2>` for a single atom: only the
/// counter-rotating term reaches `|1, +1/2>`, with matrix element `gamma`.
pub fn spin_half_perturbative(omega_a: f64, gamma: f64) -> f64 {
    -omega_a / 2.0 - gamma * gamma / (1.0 + omega_a)
}
