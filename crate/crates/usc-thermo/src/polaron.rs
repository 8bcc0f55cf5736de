//! Polaron-frame sector Hamiltonians on a truncated Fock space.
//!
//! The unitary `U = exp((g/omega_c) S_x (a' - a))` removes the linear
//! dipole-field coupling; in this frame
//!
//! ```text
//! H~ = omega_c a'a + (J/N) S_x^2 + omega0 U S_z U',
//! ```
//!
//! so the interaction is proportional to `omega0` and the photon cutoff
//! stays moderate even for large `g` (the transformation absorbs all mean
//! displacements). Because `S_z` only connects neighboring `m_x`, the
//! transformed operator involves just the two displacement blocks
//! `D(+-g/omega_c)`, computed once and shared by every sector.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::math::ln_factorials;
use crate::spin::{sectors, spin_matrices, SpinSector};

/// Physical parameters in natural units `hbar = k_B = 1`; frequencies in
/// units of `omega_c` when `omega_c = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub n_dipoles: u32,
    /// Dipole level splitting `omega0`.
    pub omega0: f64,
    /// Cavity frequency; the natural unit of every other scale.
    pub omega_c: f64,
    /// Single-dipole coupling `g`.
    pub g: f64,
    /// Collective dipole-dipole coupling `J` (enters as `J/N`).
    pub j_coupling: f64,
    /// `k_B T`.
    pub temperature: f64,
}

impl ModelParams {
    pub fn new(
        n_dipoles: u32,
        omega0: f64,
        omega_c: f64,
        g: f64,
        j_coupling: f64,
        temperature: f64,
    ) -> Result<Self> {
        let p = Self {
            n_dipoles,
            omega0,
            omega_c,
            g,
            j_coupling,
            temperature,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_dipoles == 0 {
            return Err(Error::InvalidParams("N must be >= 1".into()));
        }
        if !(self.omega_c > 0.0) {
            return Err(Error::InvalidParams(format!(
                "omega_c must be > 0, got {}",
                self.omega_c
            )));
        }
        if !(self.temperature >= 0.0) {
            return Err(Error::BadTemperature {
                requirement: ">= 0",
                value: self.temperature,
            });
        }
        for (name, v) in [
            ("omega0", self.omega0),
            ("g", self.g),
            ("J", self.j_coupling),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(())
    }

    /// Collective coupling `G = g sqrt(N)`.
    pub fn collective_coupling(&self) -> f64 {
        self.g * (self.n_dipoles as f64).sqrt()
    }

    /// Inverse temperature; `+inf` at `T = 0`.
    pub fn beta(&self) -> f64 {
        if self.temperature == 0.0 {
            f64::INFINITY
        } else {
            1.0 / self.temperature
        }
    }

    /// Thermal occupation of the bare cavity mode.
    pub fn n_th(&self) -> f64 {
        crate::math::bose_occupation(self.omega_c, self.beta())
    }

    pub fn sectors(&self) -> Vec<SpinSector> {
        sectors(self.n_dipoles)
    }
}

/// Photon cutoff: Fock states `0..=n_ph`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockTruncation {
    pub n_ph: usize,
}

impl FockTruncation {
    pub fn new(n_ph: usize) -> Result<Self> {
        if n_ph < 1 {
            return Err(Error::InvalidParams("photon cutoff must be >= 1".into()));
        }
        Ok(Self { n_ph })
    }

    pub fn dim(&self) -> usize {
        self.n_ph + 1
    }
}

/// Cutoff heuristic `N_ph = max(40, 20 ceil(k_B T_max / omega_c))`; accurate
/// for the parameter regimes treated here, and cheap to override.
pub fn default_cutoff(t_max: f64, omega_c: f64) -> FockTruncation {
    let scaled = (t_max / omega_c).ceil().max(0.0) as usize;
    FockTruncation {
        n_ph: (20 * scaled).max(40),
    }
}

/// Matrix elements `<n'| e^{alpha (a' - a)} |n>` of the displacement operator
/// on Fock states `0..=n_ph` (real `alpha`).
///
/// Evaluated along diagonals `k = n' - n` by a three-term recurrence that is
/// the associated-Laguerre closed form with the prefactor folded in, so every
/// intermediate stays bounded by one. Logarithmic factorials seed each
/// diagonal. `alpha = 0` returns the exact identity.
pub fn displacement_block(alpha: f64, n_ph: usize) -> DMatrix<f64> {
    let dim = n_ph + 1;
    if alpha == 0.0 {
        return DMatrix::identity(dim, dim);
    }
    let x = alpha * alpha;
    let ln_fact = ln_factorials(n_ph);
    let mut block = DMatrix::zeros(dim, dim);
    for k in 0..=n_ph {
        // d_n = <n+k| D(alpha) |n>, starting from the vacuum column
        let sign = if alpha < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        let d0 = sign * (k as f64 * alpha.abs().ln() - 0.5 * x - 0.5 * ln_fact[k]).exp();
        let mirror = if k % 2 == 1 { -1.0 } else { 1.0 };
        block[(k, 0)] = d0;
        block[(0, k)] = mirror * d0;
        let mut d_prev = 0.0;
        let mut d = d0;
        for n in 0..n_ph - k {
            let nf = n as f64;
            let kf = k as f64;
            let next = ((2.0 * nf + kf + 1.0 - x) * d - (nf * (nf + kf)).sqrt() * d_prev)
                / (((nf + 1.0) * (nf + 1.0 + kf)).sqrt());
            block[(n + 1 + k, n + 1)] = next;
            block[(n + 1, n + 1 + k)] = mirror * next;
            d_prev = d;
            d = next;
        }
    }
    block
}

/// Frame tag carried by assembled Hamiltonians.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Frame {
    Polaron,
}

/// Dense real-symmetric Hamiltonian of one spin sector, basis
/// `|m_x> (x) |n>` with the photon index fastest.
#[derive(Clone, Debug)]
pub struct SectorHamiltonian {
    pub sector: SpinSector,
    pub matrix: DMatrix<f64>,
    pub params: ModelParams,
    pub trunc: FockTruncation,
    pub frame: Frame,
}

/// Precomputes the displacement blocks once per `(params, trunc)` pair and
/// assembles any requested sector; immutable after construction, so it can be
/// shared across worker threads.
pub struct HamiltonianBuilder {
    params: ModelParams,
    trunc: FockTruncation,
    /// `D(+g/omega_c)`; the `-` block is its transpose.
    d_plus: DMatrix<f64>,
}

impl HamiltonianBuilder {
    pub fn new(params: ModelParams, trunc: FockTruncation) -> Result<Self> {
        params.validate()?;
        let d_plus = displacement_block(params.g / params.omega_c, trunc.n_ph);
        Ok(Self {
            params,
            trunc,
            d_plus,
        })
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn trunc(&self) -> FockTruncation {
        self.trunc
    }

    /// `H~ = omega_c n + (J/N) m^2 + omega0 T` with
    /// `T[(m', n'), (m, n)] = <m'|S_z|m> <n'|D((g/omega_c)(m' - m))|n>`.
    pub fn assemble(&self, sector: SpinSector) -> SectorHamiltonian {
        let p = self.params;
        let nf = self.trunc.dim();
        let dim = sector.dim() * nf;
        let mut h = DMatrix::zeros(dim, dim);
        let j_over_n = p.j_coupling / p.n_dipoles as f64;
        for (k, m) in sector.m_values().enumerate() {
            for n in 0..nf {
                h[(k * nf + n, k * nf + n)] = p.omega_c * n as f64 + j_over_n * m * m;
            }
        }
        if p.omega0 != 0.0 {
            let s = sector.s();
            for (k, m) in sector.m_values().enumerate().take(sector.dim() - 1) {
                let coupling = 0.5 * p.omega0 * crate::spin::ladder_element(s, m);
                for np in 0..nf {
                    for n in 0..nf {
                        // upper block (m+1, m) carries D(+g/omega_c); the
                        // mirror block is its transpose, so H stays symmetric
                        let v = coupling * self.d_plus[(np, n)];
                        h[((k + 1) * nf + np, k * nf + n)] = v;
                        h[(k * nf + n, (k + 1) * nf + np)] = v;
                    }
                }
            }
        }
        SectorHamiltonian {
            sector,
            matrix: h,
            params: p,
            trunc: self.trunc,
            frame: Frame::Polaron,
        }
    }

    /// Polaron-frame image of the physical `S_z`
    /// (`U S_z U' = cos(theta) S_z - sin(theta) S_y`): the `T` matrix above.
    pub fn polaron_sz(&self, sector: SpinSector) -> DMatrix<f64> {
        let nf = self.trunc.dim();
        let dim = sector.dim() * nf;
        let mut t = DMatrix::zeros(dim, dim);
        let s = sector.s();
        for (k, m) in sector.m_values().enumerate().take(sector.dim() - 1) {
            let coupling = 0.5 * crate::spin::ladder_element(s, m);
            for np in 0..nf {
                for n in 0..nf {
                    let v = coupling * self.d_plus[(np, n)];
                    t[((k + 1) * nf + np, k * nf + n)] = v;
                    t[(k * nf + n, (k + 1) * nf + np)] = v;
                }
            }
        }
        t
    }
}

/// One-call sector assembly.
pub fn assemble_sector(
    params: ModelParams,
    sector: SpinSector,
    trunc: FockTruncation,
) -> Result<SectorHamiltonian> {
    Ok(HamiltonianBuilder::new(params, trunc)?.assemble(sector))
}

const BRUTE_FORCE_MAX_N: u32 = 6;

/// Lab-frame Hamiltonian on the full `2^N (N_ph + 1)` product space, with no
/// symmetry reduction:
///
/// ```text
/// H = omega_c a'a + g (a + a') S_x + (g^2/omega_c) S_x^2
///     + omega0 S_z + (J/N) S_x^2.
/// ```
///
/// Test oracle only; refuses `N > 6`.
pub fn brute_force_lab_hamiltonian(
    params: ModelParams,
    trunc: FockTruncation,
) -> Result<DMatrix<f64>> {
    params.validate()?;
    let n = params.n_dipoles;
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::OracleTooLarge {
            n,
            max: BRUTE_FORCE_MAX_N,
        });
    }
    // per-site operators in the sigma_x eigenbasis (same phase convention as
    // the sector matrices: sigma_x diagonal, sigma_z real off-diagonal)
    let sigma_x = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
    let sigma_z = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let id2 = DMatrix::<f64>::identity(2, 2);
    let spin_dim = 1usize << n;
    let mut sx_total = DMatrix::<f64>::zeros(spin_dim, spin_dim);
    let mut sz_total = DMatrix::<f64>::zeros(spin_dim, spin_dim);
    for site in 0..n {
        let mut op_x = DMatrix::<f64>::identity(1, 1);
        let mut op_z = DMatrix::<f64>::identity(1, 1);
        for k in 0..n {
            op_x = op_x.kronecker(if k == site { &sigma_x } else { &id2 });
            op_z = op_z.kronecker(if k == site { &sigma_z } else { &id2 });
        }
        sx_total += 0.5 * op_x;
        sz_total += 0.5 * op_z;
    }
    let nf = trunc.dim();
    let mut number = DMatrix::<f64>::zeros(nf, nf);
    let mut a_plus_adag = DMatrix::<f64>::zeros(nf, nf);
    for k in 0..nf {
        number[(k, k)] = k as f64;
        if k + 1 < nf {
            let c = ((k + 1) as f64).sqrt();
            a_plus_adag[(k, k + 1)] = c;
            a_plus_adag[(k + 1, k)] = c;
        }
    }
    let id_spin = DMatrix::<f64>::identity(spin_dim, spin_dim);
    let id_ph = DMatrix::<f64>::identity(nf, nf);
    let sx2 = &sx_total * &sx_total;
    let quad = params.g * params.g / params.omega_c + params.j_coupling / params.n_dipoles as f64;
    let h = id_spin.kronecker(&(params.omega_c * &number))
        + (params.g * &sx_total).kronecker(&a_plus_adag)
        + (quad * &sx2).kronecker(&id_ph)
        + (params.omega0 * &sz_total).kronecker(&id_ph);
    Ok(h)
}

/// Spin-only sector Hamiltonian `omega0 S_z + (J/N) S_x^2` (the bare dipole
/// part), used for decoupled reference quantities and the approximation
/// schemes.
pub fn dipole_sector_hamiltonian(params: &ModelParams, sector: SpinSector) -> DMatrix<f64> {
    let m = spin_matrices(sector);
    let j_over_n = params.j_coupling / params.n_dipoles as f64;
    params.omega0 * &m.sz + j_over_n * &m.sx2
}
