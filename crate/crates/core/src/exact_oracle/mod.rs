//! Exact diagonalization of the Dicke Hamiltonian
//!
//! ```text
//! H = a^dag a + w_A J_z + (g / sqrt(2j)) (a^dag + a)(J_+ + J_-)
//! ```
//!
//! in the symmetric `j = N/2` sector, truncated at `n_max` photons. Basis
//! states `|n, m>` are ordered n-major with `m` ascending:
//! `index = n (2j + 1) + (m + j)`.
//!
//! The coupling changes `n` and `m` by one each, so the parity of `n + m + j`
//! is conserved. The ground state lives in the even sector that contains
//! `|0, -j>`, and the solver diagonalizes only that block.

mod eigen;
mod sparse;

use std::io::Write;

pub use eigen::{default_seed, ground_state, ground_state_from, EigenOptions, Eigenpair};
pub use sparse::SparseSymmetric;

use crate::energy_surface::ModelParams;
use crate::error::{Error, Result};
use crate::spin::Spin;

/// Default cap on stored Hamiltonian nonzeros.
pub const DEFAULT_NNZ_CAP: usize = 2_000_000;

/// Truncated product basis: photon number `0..=n_max` times `m = -j..=j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisSpec {
    pub j: Spin,
    pub n_max: usize,
}

impl BasisSpec {
    pub fn new(j: Spin, n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::invalid("n_max", "photon cutoff must be >= 1"));
        }
        Ok(BasisSpec { j, n_max })
    }

    fn spin_states(&self) -> usize {
        self.j.twice() as usize + 1
    }

    pub fn dimension(&self) -> usize {
        (self.n_max + 1) * self.spin_states()
    }

    /// Index of `|n, m>` with `m = k - j`, `k in 0..=2j`.
    pub fn index(&self, n: usize, k: usize) -> usize {
        n * self.spin_states() + k
    }

    /// `(n, k)` with `k = m + j`.
    pub fn label(&self, index: usize) -> (usize, usize) {
        (index / self.spin_states(), index % self.spin_states())
    }

    /// `m` of a basis state, as a real number.
    pub fn m_value(&self, index: usize) -> f64 {
        let (_, k) = self.label(index);
        k as f64 - self.j.value::<f64>()
    }

    /// Parity of `n + m + j`: 0 for the sector holding `|0, -j>`.
    pub fn parity(&self, index: usize) -> usize {
        let (n, k) = self.label(index);
        (n + k) % 2
    }

    /// Indices of the given parity sector, ascending.
    pub fn sector(&self, parity: usize) -> Vec<usize> {
        (0..self.dimension())
            .filter(|&i| self.parity(i) == parity)
            .collect()
    }

    fn coupling_nonzeros(&self) -> usize {
        2 * self.n_max * 2 * self.j.twice() as usize
    }
}

/// Sparse Hamiltonian on `basis`. Fails when the stored nonzero count would
/// exceed `nnz_cap`.
pub fn build_hamiltonian(
    params: &ModelParams<f64>,
    basis: &BasisSpec,
    nnz_cap: usize,
) -> Result<SparseSymmetric> {
    params.validate()?;
    let coupled = params.gamma != 0.0;
    let nonzeros = basis.dimension() + if coupled { basis.coupling_nonzeros() } else { 0 };
    if nonzeros > nnz_cap {
        return Err(Error::DimensionCap {
            nonzeros,
            cap: nnz_cap,
        });
    }
    let twice = basis.j.twice() as usize;
    let j = basis.j.value::<f64>();
    let g = params.gamma / (twice as f64).sqrt();
    // J_+ |k> and J_- |k> amplitudes.
    let raise = |k: usize| ((twice - k) as f64 * (k + 1) as f64).sqrt();
    let lower = |k: usize| (k as f64 * (twice - k + 1) as f64).sqrt();

    let rows = (0..basis.dimension())
        .map(|idx| {
            let (n, k) = basis.label(idx);
            let mut row = Vec::with_capacity(5);
            let diag = n as f64 + params.omega_a * (k as f64 - j);
            if coupled && n > 0 {
                let a = g * (n as f64).sqrt();
                if k > 0 {
                    row.push((basis.index(n - 1, k - 1), a * lower(k)));
                }
                if k < twice {
                    row.push((basis.index(n - 1, k + 1), a * raise(k)));
                }
            }
            row.push((idx, diag));
            if coupled && n < basis.n_max {
                let a = g * ((n + 1) as f64).sqrt();
                if k > 0 {
                    row.push((basis.index(n + 1, k - 1), a * lower(k)));
                }
                if k < twice {
                    row.push((basis.index(n + 1, k + 1), a * raise(k)));
                }
            }
            row
        })
        .collect();
    Ok(SparseSymmetric::from_rows(rows))
}

/// `(<a^dag a> / 2j, <J_z> / j)` of a normalized state.
pub fn exact_observables(vector: &[f64], basis: &BasisSpec) -> (f64, f64) {
    let mut photons = 0.0;
    let mut jz = 0.0;
    for (idx, amp) in vector.iter().enumerate() {
        let w = amp * amp;
        let (n, _) = basis.label(idx);
        photons += w * n as f64;
        jz += w * basis.m_value(idx);
    }
    let j = basis.j.value::<f64>();
    (photons / (2.0 * j), jz / j)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    /// Give up once the next doubling would pass this cutoff.
    pub n_max_ceiling: usize,
    pub nnz_cap: usize,
    pub eigen: EigenOptions,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            n_max_ceiling: 4096,
            nnz_cap: DEFAULT_NNZ_CAP,
            eigen: EigenOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution {
    pub ground_energy: f64,
    pub photons_per_atom: f64,
    pub jz_per_j: f64,
    pub n_max_used: usize,
    /// `|E(n_max_used) - E(n_max_used / 2)|`.
    pub cutoff_gap: f64,
    pub basis: BasisSpec,
    /// Ground vector over the full basis, in basis order.
    pub vector: Vec<f64>,
    pub residual: f64,
}

impl ExactSolution {
    pub fn energy_per_atom(&self) -> f64 {
        self.ground_energy / self.basis.j.twice() as f64
    }

    /// `<J_z + j> / 2j`, the exact counterpart of the mean-field excited fraction.
    pub fn excited_fraction(&self) -> f64 {
        (self.jz_per_j + 1.0) / 2.0
    }
}

/// Ground state at a fixed photon cutoff, restricted to the even parity
/// sector and embedded back into the full basis.
pub fn solve_at_cutoff(
    params: &ModelParams<f64>,
    n_max: usize,
    opts: &ExactOptions,
) -> Result<(Eigenpair, BasisSpec)> {
    let basis = BasisSpec::new(params.j, n_max)?;
    let h = build_hamiltonian(params, &basis, opts.nnz_cap)?;
    let sector = basis.sector(0);
    let block = h.restrict(&sector);
    let pair = ground_state(&block, &opts.eigen)?;
    let mut full = vec![0.0; basis.dimension()];
    for (&idx, &amp) in sector.iter().zip(&pair.vector) {
        full[idx] = amp;
    }
    Ok((
        Eigenpair {
            vector: full,
            ..pair
        },
        basis,
    ))
}

/// First photon cutoff tried by [`converge_cutoff`]: `max(8, ceil(4 g^2 2j))`.
pub fn initial_cutoff(params: &ModelParams<f64>) -> usize {
    let guess = (4.0 * params.gamma * params.gamma * params.j.twice() as f64).ceil();
    (guess as usize).max(8)
}

/// Doubles `n_max` until consecutive ground energies differ by less than `tol`.
pub fn converge_cutoff(params: &ModelParams<f64>, tol: f64, opts: &ExactOptions) -> Result<ExactSolution> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tol", "must be > 0"));
    }
    let mut n_max = initial_cutoff(params);
    if n_max > opts.n_max_ceiling {
        return Err(Error::CutoffCeiling {
            n_max,
            gap: f64::INFINITY,
            tol,
        });
    }
    let (mut previous, _) = solve_at_cutoff(params, n_max, opts)?;
    loop {
        let next_cutoff = 2 * n_max;
        if next_cutoff > opts.n_max_ceiling {
            return Err(Error::CutoffCeiling {
                n_max,
                gap: f64::INFINITY,
                tol,
            });
        }
        let (current, basis) = solve_at_cutoff(params, next_cutoff, opts)?;
        let gap = (previous.energy - current.energy).abs();
        if gap < tol {
            let (photons_per_atom, jz_per_j) = exact_observables(&current.vector, &basis);
            return Ok(ExactSolution {
                ground_energy: current.energy,
                photons_per_atom,
                jz_per_j,
                n_max_used: next_cutoff,
                cutoff_gap: gap,
                basis,
                vector: current.vector,
                residual: current.residual,
            });
        }
        if 2 * next_cutoff > opts.n_max_ceiling {
            return Err(Error::CutoffCeiling {
                n_max: next_cutoff,
                gap,
                tol,
            });
        }
        previous = current;
        n_max = next_cutoff;
    }
}

/// JSON dump of a ground state: basis header followed by the amplitudes in
/// basis order.
pub fn write_ground_state_json<W: Write>(
    sol: &ExactSolution,
    params: &ModelParams<f64>,
    mut out: W,
) -> Result<()> {
    let basis = &sol.basis;
    let amplitudes: Vec<String> = sol.vector.iter().map(|a| format!("{a:.16e}")).collect();
    writeln!(out, "{{")?;
    writeln!(
        out,
        "  \"basis\": {{\"j\": \"{}\", \"two_j\": {}, \"n_max\": {}, \"dimension\": {}, \"ordering\": \"n-major, m ascending; index = n*(2j+1) + (m+j)\"}},",
        basis.j,
        basis.j.twice(),
        basis.n_max,
        basis.dimension()
    )?;
    writeln!(
        out,
        "  \"omega_a\": {:.16e},\n  \"gamma\": {:.16e},",
        params.omega_a, params.gamma
    )?;
    writeln!(
        out,
        "  \"ground_energy\": {:.16e},\n  \"cutoff_gap\": {:.16e},",
        sol.ground_energy, sol.cutoff_gap
    )?;
    writeln!(out, "  \"amplitudes\": [{}]", amplitudes.join(", "))?;
    writeln!(out, "}}")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(omega_a: f64, gamma: f64, twice: u64) -> ModelParams<f64> {
        ModelParams::new(omega_a, gamma, Spin::from_twice(twice).unwrap()).unwrap()
    }

    #[test]
    fn basis_layout() {
        let b = BasisSpec::new(Spin::from_twice(3).unwrap(), 2).unwrap();
        assert_eq!(b.dimension(), 12);
        assert_eq!(b.index(1, 2), 6);
        assert_eq!(b.label(6), (1, 2));
        assert_eq!(b.m_value(6), 0.5);
        assert_eq!(b.m_value(0), -1.5);
        assert!(BasisSpec::new(Spin::from_twice(3).unwrap(), 0).is_err());
    }

    #[test]
    fn spin_half_single_photon_matrix() {
        let gamma = 0.37;
        let basis = BasisSpec::new(Spin::from_twice(1).unwrap(), 1).unwrap();
        let h = build_hamiltonian(&params(1.0, gamma, 1), &basis, DEFAULT_NNZ_CAP).unwrap();
        assert_eq!(h.dim(), 4);
        let (lo, up) = (basis.index(0, 0), basis.index(1, 1));
        assert!((h.get(lo, up) - gamma).abs() < 1e-15);
        assert_eq!(h.get(lo, lo), -0.5);
        assert_eq!(h.get(up, up), 1.5);
        // |0,+1/2> <-> |1,-1/2>
        assert!((h.get(basis.index(0, 1), basis.index(1, 0)) - gamma).abs() < 1e-15);
        assert_eq!(h.asymmetry(), 0.0);
    }

    #[test]
    fn decoupled_matrix_is_diagonal() {
        let p = params(1.3, 0.0, 6);
        let basis = BasisSpec::new(p.j, 5).unwrap();
        let h = build_hamiltonian(&p, &basis, DEFAULT_NNZ_CAP).unwrap();
        assert!(h.is_diagonal());
        let g = ground_state(&h, &EigenOptions::default()).unwrap();
        assert!((g.energy + 3.0 * 1.3).abs() < 1e-14);
        assert_eq!(g.vector[basis.index(0, 0)], 1.0);
        assert_eq!(exact_observables(&g.vector, &basis), (0.0, -1.0));
    }

    #[test]
    fn nonzero_cap_enforced() {
        let p = params(1.0, 1.0, 40);
        let basis = BasisSpec::new(p.j, 1000).unwrap();
        assert!(matches!(
            build_hamiltonian(&p, &basis, 10_000),
            Err(Error::DimensionCap { .. })
        ));
    }

    #[test]
    fn stored_nonzeros_match_estimate() {
        let p = params(1.0, 0.8, 5);
        let basis = BasisSpec::new(p.j, 7).unwrap();
        let h = build_hamiltonian(&p, &basis, DEFAULT_NNZ_CAP).unwrap();
        assert_eq!(h.nnz(), basis.dimension() + basis.coupling_nonzeros());
    }

    #[test]
    fn decoupled_cutoff_converges_immediately() {
        let sol = converge_cutoff(&params(1.0, 0.0, 10), 1e-8, &ExactOptions::default()).unwrap();
        assert_eq!(sol.ground_energy, -5.0);
        assert_eq!(sol.n_max_used, 16);
        assert_eq!(sol.cutoff_gap, 0.0);
    }

    #[test]
    fn ceiling_reported() {
        let opts = ExactOptions {
            n_max_ceiling: 10,
            ..ExactOptions::default()
        };
        let err = converge_cutoff(&params(1.0, 1.0, 10), 1e-8, &opts).unwrap_err();
        assert!(matches!(err, Error::CutoffCeiling { .. }));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn dump_has_header_and_amplitudes() {
        let p = params(1.0, 0.3, 2);
        let sol = converge_cutoff(&p, 1e-10, &ExactOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_ground_state_json(&sol, &p, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["basis"]["dimension"], sol.basis.dimension());
        assert_eq!(v["amplitudes"].as_array().unwrap().len(), sol.basis.dimension());
    }
}
