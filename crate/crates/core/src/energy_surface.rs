//! Variational energy surface of the Dicke Hamiltonian in a product of photon
//! and Holstein-Primakoff boson coherent states.
//!
//! Energies are in units of the field quantum; the finite-`j` surface is
//!
//! ```text
//! E = rho_a^2 + (rho_b^2 - j) w_A + 4 g rho_a rho_b cos(phi_a) cos(phi_b) F(rho_b, j)
//! ```
//!
//! and the thermodynamic surface replaces `F` by `sqrt(1 - rho_b^2 / 2j)`.

use crate::error::{Error, Result};
use crate::hp_series;
use crate::scalar::Scalar;
use crate::spin::Spin;

/// Hamiltonian parameters: atomic splitting and coupling (both in units of the
/// field frequency) and the collective spin `j = N/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    pub omega_a: T,
    pub gamma: T,
    pub j: Spin,
}

impl<T: Scalar> ModelParams<T> {
    pub fn new(omega_a: T, gamma: T, j: Spin) -> Result<Self> {
        let params = ModelParams { omega_a, gamma, j };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_a >= T::zero()) || !self.omega_a.is_finite() {
            return Err(Error::invalid("omega_a", format!("must be finite and >= 0, got {}", self.omega_a)));
        }
        if !(self.gamma >= T::zero()) || !self.gamma.is_finite() {
            return Err(Error::invalid("gamma", format!("must be finite and >= 0, got {}", self.gamma)));
        }
        Ok(())
    }

    pub fn j_value(&self) -> T {
        self.j.value()
    }

    pub fn n_atoms(&self) -> T {
        self.j.n_atoms()
    }
}

/// Coherent amplitudes `alpha = rho_a e^{i phi_a}` (photons) and
/// `beta = rho_b e^{i phi_b}` (atomic bosons).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationalPoint<T> {
    pub rho_a: T,
    pub phi_a: T,
    pub rho_b: T,
    pub phi_b: T,
}

impl<T: Scalar> VariationalPoint<T> {
    /// Builds a point with the phases reduced to `[0, 2 pi)`.
    pub fn new(rho_a: T, phi_a: T, rho_b: T, phi_b: T) -> Result<Self> {
        if !(rho_a >= T::zero()) || !rho_a.is_finite() {
            return Err(Error::invalid("rho_a", format!("must be finite and >= 0, got {rho_a}")));
        }
        if !(rho_b >= T::zero()) || !rho_b.is_finite() {
            return Err(Error::invalid("rho_b", format!("must be finite and >= 0, got {rho_b}")));
        }
        if !phi_a.is_finite() || !phi_b.is_finite() {
            return Err(Error::invalid("phi", "phases must be finite"));
        }
        Ok(VariationalPoint {
            rho_a,
            phi_a: reduce_phase(phi_a),
            rho_b,
            phi_b: reduce_phase(phi_b),
        })
    }

    pub fn origin() -> Self {
        VariationalPoint {
            rho_a: T::zero(),
            phi_a: T::zero(),
            rho_b: T::zero(),
            phi_b: T::zero(),
        }
    }

    fn phase_factor(&self) -> T {
        self.phi_a.cos() * self.phi_b.cos()
    }
}

/// Reduces an angle to `[0, 2 pi)`.
pub fn reduce_phase<T: Scalar>(phi: T) -> T {
    let r = phi % T::TAU();
    let r = if r < T::zero() { r + T::TAU() } else { r };
    if r >= T::TAU() {
        T::zero()
    } else {
        r
    }
}

/// Partial derivatives of the thermodynamic surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientVector<T> {
    pub d_rho_a: T,
    pub d_phi_a: T,
    pub d_rho_b: T,
    pub d_phi_b: T,
}

impl<T: Scalar> GradientVector<T> {
    pub fn components(&self) -> [T; 4] {
        [self.d_rho_a, self.d_phi_a, self.d_rho_b, self.d_phi_b]
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> T {
        self.components()
            .iter()
            .fold(T::zero(), |acc, c| acc.max(c.abs()))
    }
}

fn diagonal_part<T: Scalar>(params: &ModelParams<T>, pt: &VariationalPoint<T>) -> T {
    pt.rho_a * pt.rho_a + (pt.rho_b * pt.rho_b - params.j_value()) * params.omega_a
}

/// Finite-`j` energy surface, using the truncated series `F(rho_b, j)`.
pub fn energy_finite_j<T: Scalar>(params: &ModelParams<T>, pt: &VariationalPoint<T>) -> Result<T> {
    let f = hp_series::eval_f(pt.rho_b, params.j)?;
    Ok(diagonal_part(params, pt)
        + T::lit(4.0) * params.gamma * pt.rho_a * pt.rho_b * pt.phase_factor() * f)
}

/// Thermodynamic-limit energy surface. Requires `rho_b^2 <= 2j`.
pub fn energy_thermo<T: Scalar>(params: &ModelParams<T>, pt: &VariationalPoint<T>) -> Result<T> {
    let root = hp_series::eval_f_limit(pt.rho_b, params.j)?;
    Ok(diagonal_part(params, pt)
        + T::lit(4.0) * params.gamma * pt.rho_a * pt.rho_b * root * pt.phase_factor())
}

/// Exact gradient of [`energy_thermo`]. Requires `rho_b^2 < 2j` strictly.
pub fn gradient_thermo<T: Scalar>(
    params: &ModelParams<T>,
    pt: &VariationalPoint<T>,
) -> Result<GradientVector<T>> {
    let two_j = params.n_atoms();
    let rb2 = pt.rho_b * pt.rho_b;
    let radicand = T::one() - rb2 / two_j;
    if !(radicand > T::zero()) {
        return Err(Error::Domain(format!(
            "gradient needs rho_b^2 < 2j, got rho_b^2 = {rb2}, 2j = {two_j}"
        )));
    }
    let root = radicand.sqrt();
    let four_g = T::lit(4.0) * params.gamma;
    let (sa, ca) = pt.phi_a.sin_cos();
    let (sb, cb) = pt.phi_b.sin_cos();
    let two = T::lit(2.0);
    Ok(GradientVector {
        d_rho_a: two * pt.rho_a + four_g * pt.rho_b * root * ca * cb,
        d_phi_a: -four_g * pt.rho_a * pt.rho_b * root * sa * cb,
        d_rho_b: two * pt.rho_b * params.omega_a
            + four_g * pt.rho_a * ca * cb * (T::one() - two * rb2 / two_j) / root,
        d_phi_b: -four_g * pt.rho_a * pt.rho_b * root * ca * sb,
    })
}
