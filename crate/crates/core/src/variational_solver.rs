//! Mean-field ground state: closed-form thermodynamic minima, the critical
//! coupling, and a numerical minimizer for the finite-`j` surface.

use std::fmt;

use crate::brent;
use crate::energy_surface::{energy_finite_j, energy_thermo, ModelParams, VariationalPoint};
use crate::error::{Error, Result};
use crate::hp_series;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Normal,
    Superradiant,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Normal => "Normal",
            Phase::Superradiant => "Superradiant",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    AnalyticThermo,
    NumericFiniteJ,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::AnalyticThermo => "AnalyticThermo",
            Method::NumericFiniteJ => "NumericFiniteJ",
        })
    }
}

/// Intensive observables, per atom (`N = 2j`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables<T> {
    pub energy_per_atom: T,
    pub photons_per_atom: T,
    pub excited_fraction: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanFieldSolution<T> {
    pub point: VariationalPoint<T>,
    pub energy: T,
    pub phase: Phase,
    pub energy_per_atom: T,
    pub photons_per_atom: T,
    pub excited_fraction: T,
    pub method: Method,
}

impl<T: Scalar> MeanFieldSolution<T> {
    fn assemble(
        params: &ModelParams<T>,
        point: VariationalPoint<T>,
        energy: T,
        phase: Phase,
        method: Method,
    ) -> Self {
        let n = params.n_atoms();
        MeanFieldSolution {
            point,
            energy,
            phase,
            energy_per_atom: energy / n,
            photons_per_atom: point.rho_a * point.rho_a / n,
            excited_fraction: point.rho_b * point.rho_b / n,
            method,
        }
    }

    pub fn observables(&self) -> Observables<T> {
        Observables {
            energy_per_atom: self.energy_per_atom,
            photons_per_atom: self.photons_per_atom,
            excited_fraction: self.excited_fraction,
        }
    }
}

/// Options for [`numeric_minimum`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizerOptions<T> {
    /// Points of the coarse scan over `rho_b in [0, sqrt(2j)]`.
    pub grid_points: usize,
    /// Relative tolerance of the bracketed refinement in `rho_b`.
    pub rel_tol: T,
    pub max_iter: usize,
}

impl<T: Scalar> Default for MinimizerOptions<T> {
    fn default() -> Self {
        MinimizerOptions {
            grid_points: 512,
            rel_tol: T::lit(1e-10),
            max_iter: 200,
        }
    }
}

impl<T: Scalar> MinimizerOptions<T> {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 3 {
            return Err(Error::invalid("grid_points", "need at least 3 scan points"));
        }
        if !(self.rel_tol > T::zero()) {
            return Err(Error::invalid("rel_tol", "must be > 0"));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter", "must be >= 1"));
        }
        Ok(())
    }
}

/// `gamma_c = sqrt(omega_a) / 2`.
pub fn critical_coupling<T: Scalar>(omega_a: T) -> Result<T> {
    if !(omega_a >= T::zero()) {
        return Err(Error::invalid("omega_a", format!("must be >= 0, got {omega_a}")));
    }
    Ok(omega_a.sqrt() / T::lit(2.0))
}

/// Closed-form minimum of the thermodynamic surface.
///
/// Below `gamma_c` both amplitudes vanish and the phases are set to zero.
/// From `gamma_c` on (inclusive) the superradiant branch is returned with
/// phases `(0, pi)`. A vanishing coupling always yields the normal solution.
pub fn analytic_minimum<T: Scalar>(params: &ModelParams<T>) -> Result<MeanFieldSolution<T>> {
    params.validate()?;
    let gamma_c = critical_coupling(params.omega_a)?;
    let gamma = params.gamma;
    if gamma < gamma_c || gamma == T::zero() {
        let point = VariationalPoint::origin();
        let energy = energy_thermo(params, &point)?;
        return Ok(MeanFieldSolution::assemble(
            params,
            point,
            energy,
            Phase::Normal,
            Method::AnalyticThermo,
        ));
    }
    let ratio2 = (gamma_c / gamma).powi(2);
    let rho_a = gamma * params.n_atoms().sqrt() * (T::one() - ratio2 * ratio2).sqrt();
    let rho_b = params.j_value().sqrt() * (T::one() - ratio2).sqrt();
    let point = VariationalPoint {
        rho_a,
        phi_a: T::zero(),
        rho_b,
        phi_b: T::PI(),
    };
    let energy = energy_thermo(params, &point)?;
    Ok(MeanFieldSolution::assemble(
        params,
        point,
        energy,
        Phase::Superradiant,
        Method::AnalyticThermo,
    ))
}

/// Finite-`j` energy with the photon amplitude at its optimum
/// `rho_a = 2 gamma rho_b F(rho_b, j)` and phases with `cos cos = -1`:
/// `-4 gamma^2 rho_b^2 F^2 + omega_a rho_b^2 - j omega_a`.
pub fn reduced_profile<T: Scalar>(params: &ModelParams<T>, rho_b: T) -> Result<T> {
    let f = hp_series::eval_f(rho_b, params.j)?;
    let r2 = rho_b * rho_b;
    let g = params.gamma;
    Ok(-T::lit(4.0) * g * g * r2 * f * f + params.omega_a * (r2 - params.j_value()))
}

/// Global minimum of the finite-`j` surface.
///
/// Scans the reduced profile on `opts.grid_points` points of
/// `[0, sqrt(2j) (1 - 1e-12)]`, then refines around the best scan point with
/// Brent's method. The origin wins ties, so sub-threshold couplings return an
/// exact normal solution.
pub fn numeric_minimum<T: Scalar>(
    params: &ModelParams<T>,
    opts: &MinimizerOptions<T>,
) -> Result<MeanFieldSolution<T>> {
    params.validate()?;
    opts.validate()?;
    let sqrt_two_j = params.n_atoms().sqrt();
    let upper = sqrt_two_j * (T::one() - T::lit(1e-12));
    let last = opts.grid_points - 1;
    let node = |i: usize| upper * T::from_count(i as u64) / T::from_count(last as u64);

    let mut best_i = 0;
    let mut best = reduced_profile(params, T::zero())?;
    for i in 1..opts.grid_points {
        let e = reduced_profile(params, node(i))?;
        if e < best {
            best = e;
            best_i = i;
        }
    }

    let mut rho_b = node(best_i);
    if best_i > 0 {
        let refined = brent::minimize(
            |x| reduced_profile(params, x),
            node(best_i - 1),
            node((best_i + 1).min(last)),
            rho_b,
            opts.rel_tol,
            opts.max_iter,
        )?;
        if refined.fx <= best {
            rho_b = refined.x;
            best = refined.fx;
        }
    }
    if reduced_profile(params, T::zero())? <= best {
        rho_b = T::zero();
        best = reduced_profile(params, T::zero())?;
    }

    let at_edge = reduced_profile(params, sqrt_two_j)?;
    if at_edge < best {
        return Err(Error::NonConvergence {
            what: "finite-j minimization (profile still decreasing at rho_b = sqrt(2j))",
            iterations: opts.max_iter,
            residual: (best - at_edge).to_f64_lossy(),
        });
    }

    let (point, phase) = if rho_b == T::zero() {
        (VariationalPoint::origin(), Phase::Normal)
    } else {
        let f = hp_series::eval_f(rho_b, params.j)?;
        let point = VariationalPoint {
            rho_a: T::lit(2.0) * params.gamma * rho_b * f,
            phi_a: T::zero(),
            rho_b,
            phi_b: T::PI(),
        };
        (point, Phase::Superradiant)
    };
    let energy = energy_finite_j(params, &point)?;
    Ok(MeanFieldSolution::assemble(
        params,
        point,
        energy,
        phase,
        Method::NumericFiniteJ,
    ))
}

/// `(E / 2j, rho_a^2 / 2j, rho_b^2 / 2j)` recomputed from the solution point.
pub fn observables<T: Scalar>(sol: &MeanFieldSolution<T>, params: &ModelParams<T>) -> Observables<T> {
    let n = params.n_atoms();
    Observables {
        energy_per_atom: sol.energy / n,
        photons_per_atom: sol.point.rho_a * sol.point.rho_a / n,
        excited_fraction: sol.point.rho_b * sol.point.rho_b / n,
    }
}
