//! Exact thermodynamics from sector-resolved diagonalization.
//!
//! The partition function splits over total-spin sectors,
//! `Z = sum_s zeta(s, N) Z_s`, with every Boltzmann sum accumulated by
//! log-sum-exp around the global ground energy (`beta E` spans hundreds at
//! low temperature). The coupling part of the free energy is reported
//! relative to the decoupled references
//!
//! ```text
//! F = F_c0 + F_dip0 + F_g,    F_c0 = T ln(1 - e^{-beta omega_c}),
//! ```
//!
//! with `F_dip0` from the spin-only problem. Heat capacity comes from the
//! energy-variance identity rather than finite differences; the zero-field
//! susceptibility exploits that `F` is even in `omega0`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::math::{ln_two_cosh, log_sum_exp};
use crate::polaron::{
    dipole_sector_hamiltonian, FockTruncation, HamiltonianBuilder, ModelParams, SectorHamiltonian,
};
use crate::spin::{spin_matrices, SpinSector};

/// Eigendecomposition of one spin sector.
#[derive(Clone, Debug)]
pub struct SectorSpectrum {
    pub sector: SpinSector,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal columns matching `eigenvalues`; retained on demand.
    pub eigenvectors: Option<DMatrix<f64>>,
    /// Relative residual of the ground pair, when vectors were computed.
    pub ground_residual: Option<f64>,
}

/// Full symmetric eigendecomposition of a sector Hamiltonian.
pub fn diagonalize(h: &SectorHamiltonian, want_vectors: bool) -> Result<SectorSpectrum> {
    if want_vectors {
        let (vals, vecs) = linalg::eigh(h.matrix.clone(), h.sector.twice_s())?;
        let residual = linalg::ground_pair_residual(&h.matrix, &vals, &vecs);
        Ok(SectorSpectrum {
            sector: h.sector,
            eigenvalues: vals,
            eigenvectors: Some(vecs),
            ground_residual: Some(residual),
        })
    } else {
        Ok(SectorSpectrum {
            sector: h.sector,
            eigenvalues: linalg::eigh_values(&h.matrix),
            eigenvectors: None,
            ground_residual: None,
        })
    }
}

/// Sector-resolved thermal state of the coupled system.
#[derive(Clone, Debug)]
pub struct ThermalEnsemble {
    params: ModelParams,
    trunc: FockTruncation,
    spectra: Vec<SectorSpectrum>,
    ground_energy: f64,
    /// `ln Z` including multiplicities; `+inf` at `T = 0`.
    log_z: f64,
}

impl ThermalEnsemble {
    /// Diagonalizes every sector (in parallel; sector order is fixed, so the
    /// result is deterministic regardless of worker count).
    pub fn build(params: ModelParams, trunc: FockTruncation, want_vectors: bool) -> Result<Self> {
        params.validate()?;
        let builder = HamiltonianBuilder::new(params, trunc)?;
        let sectors = params.sectors();
        let spectra: Result<Vec<SectorSpectrum>> = sectors
            .par_iter()
            .map(|&sec| diagonalize(&builder.assemble(sec), want_vectors))
            .collect();
        let spectra = spectra?;
        let ground_energy = spectra
            .iter()
            .map(|sp| sp.eigenvalues[0])
            .fold(f64::INFINITY, f64::min);
        let log_z = log_z_from_spectra(&spectra, params.beta(), ground_energy);
        Ok(Self {
            params,
            trunc,
            spectra,
            ground_energy,
            log_z,
        })
    }

    pub fn params(&self) -> ModelParams {
        self.params
    }

    pub fn trunc(&self) -> FockTruncation {
        self.trunc
    }

    pub fn spectra(&self) -> &[SectorSpectrum] {
        &self.spectra
    }

    pub fn has_vectors(&self) -> bool {
        self.spectra.iter().all(|sp| sp.eigenvectors.is_some())
    }

    /// Global ground energy; the log-sum-exp shift.
    pub fn ground_energy(&self) -> f64 {
        self.ground_energy
    }

    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    /// Worst ground-pair residual across sectors, when vectors are present.
    pub fn max_ground_residual(&self) -> Option<f64> {
        self.spectra
            .iter()
            .map(|sp| sp.ground_residual)
            .collect::<Option<Vec<f64>>>()
            .map(|r| r.into_iter().fold(0.0, f64::max))
    }

    /// Normalized level weights `zeta e^{-beta eps} / Z` per (sector, level).
    fn level_weights(&self) -> Result<Vec<Vec<f64>>> {
        let beta = self.params.beta();
        if beta.is_infinite() {
            return Err(Error::BadTemperature {
                requirement: "> 0",
                value: self.params.temperature,
            });
        }
        Ok(self
            .spectra
            .iter()
            .map(|sp| {
                let ln_zeta = sp.sector.ln_multiplicity();
                sp.eigenvalues
                    .iter()
                    .map(|&e| (ln_zeta - beta * e - self.log_z).exp())
                    .collect()
            })
            .collect())
    }

    /// `F = F_c0 + F_dip0 + F_g`; at `T = 0` the fields hold ground energies.
    pub fn free_energy(&self) -> FreeEnergyReport {
        let p = self.params;
        let f_cavity0 = cavity_free_energy(&p);
        let f_dip0 = dipole_free_energy(&p);
        let f_total = if p.temperature == 0.0 {
            self.ground_energy
        } else {
            -p.temperature * self.log_z
        };
        FreeEnergyReport {
            f_total,
            f_cavity0,
            f_dip0,
            f_g: f_total - f_cavity0 - f_dip0,
        }
    }

    /// Thermal expectation value of a tagged observable.
    ///
    /// Operator observables need eigenvectors. `Sz` is evaluated through the
    /// polaron-transformed operator; `AdagA` is the bare `a'a` in this frame
    /// (the physical `A = a + (g/omega_c) S_x` maps to `a`).
    pub fn expectation(&self, observable: Observable) -> Result<f64> {
        let weights = self.level_weights()?;
        match observable {
            Observable::H => Ok(self.weighted_eigenvalue_moment(&weights, 1)),
            Observable::H2 => Ok(self.weighted_eigenvalue_moment(&weights, 2)),
            Observable::Sx => self.diagonal_expectation(&weights, DiagonalKind::Mx),
            Observable::Sx2 => self.diagonal_expectation(&weights, DiagonalKind::Mx2),
            Observable::AdagA => self.diagonal_expectation(&weights, DiagonalKind::Photon),
            Observable::Hem => Ok(self.params.omega_c
                * self.diagonal_expectation(&weights, DiagonalKind::Photon)?),
            Observable::Sz => self.polaron_sz_expectation(&weights),
        }
    }

    fn weighted_eigenvalue_moment(&self, weights: &[Vec<f64>], power: i32) -> f64 {
        self.spectra
            .iter()
            .zip(weights)
            .map(|(sp, w)| {
                sp.eigenvalues
                    .iter()
                    .zip(w)
                    .map(|(&e, &w)| w * e.powi(power))
                    .sum::<f64>()
            })
            .sum()
    }

    fn diagonal_expectation(&self, weights: &[Vec<f64>], kind: DiagonalKind) -> Result<f64> {
        let nf = self.trunc.dim();
        let mut total = 0.0;
        for (sp, w) in self.spectra.iter().zip(weights) {
            let vecs = sp.eigenvectors.as_ref().ok_or(Error::MissingEigenvectors)?;
            let m_values: Vec<f64> = sp.sector.m_values().collect();
            for (i, &wi) in w.iter().enumerate() {
                if wi == 0.0 {
                    continue;
                }
                let col = vecs.column(i);
                let mut acc = 0.0;
                for (k, &m) in m_values.iter().enumerate() {
                    for n in 0..nf {
                        let amp = col[k * nf + n];
                        let diag = match kind {
                            DiagonalKind::Mx => m,
                            DiagonalKind::Mx2 => m * m,
                            DiagonalKind::Photon => n as f64,
                        };
                        acc += amp * amp * diag;
                    }
                }
                total += wi * acc;
            }
        }
        Ok(total)
    }

    fn polaron_sz_expectation(&self, weights: &[Vec<f64>]) -> Result<f64> {
        let builder = HamiltonianBuilder::new(self.params, self.trunc)?;
        let mut total = 0.0;
        for (sp, w) in self.spectra.iter().zip(weights) {
            let vecs = sp.eigenvectors.as_ref().ok_or(Error::MissingEigenvectors)?;
            let t = builder.polaron_sz(sp.sector);
            let tv = &t * vecs;
            for (i, &wi) in w.iter().enumerate() {
                if wi == 0.0 {
                    continue;
                }
                total += wi * vecs.column(i).dot(&tv.column(i));
            }
        }
        Ok(total)
    }

    /// `C = beta^2 (<H^2> - <H>^2)` split into cavity, dipole and coupling
    /// parts. Exact given the spectrum; no finite differences.
    pub fn heat_capacity(&self) -> Result<HeatCapacities> {
        let p = self.params;
        if p.temperature == 0.0 {
            return Err(Error::BadTemperature {
                requirement: "> 0",
                value: 0.0,
            });
        }
        let weights = self.level_weights()?;
        let beta = p.beta();
        let mean = self.weighted_eigenvalue_moment(&weights, 1);
        let variance: f64 = self
            .spectra
            .iter()
            .zip(&weights)
            .map(|(sp, w)| {
                sp.eigenvalues
                    .iter()
                    .zip(w)
                    .map(|(&e, &w)| w * (e - mean) * (e - mean))
                    .sum::<f64>()
            })
            .sum();
        let total = beta * beta * variance;
        let cavity0 = cavity_heat_capacity(&p);
        let dipole0 = dipole_heat_capacity(&p)?;
        Ok(HeatCapacities {
            total,
            cavity0,
            dipole0,
            coupling: total - cavity0 - dipole0,
        })
    }

    /// Probability distribution of the `S_x` projection,
    /// `p(m_x) = Tr(P_mx rho)`, over `m_x = -N/2 .. N/2` ascending.
    ///
    /// The projector commutes with the polaron transformation (`U` is
    /// diagonal in `m_x`), so the polaron-frame amplitudes can be summed
    /// directly.
    pub fn mx_distribution(&self) -> Result<Vec<f64>> {
        let weights = self.level_weights()?;
        let n = self.params.n_dipoles;
        let nf = self.trunc.dim();
        let mut p = vec![0.0; n as usize + 1];
        for (sp, w) in self.spectra.iter().zip(&weights) {
            let vecs = sp.eigenvectors.as_ref().ok_or(Error::MissingEigenvectors)?;
            // global index of m = -s + k is k + (N - 2s)/2
            let offset = ((n - sp.sector.twice_s()) / 2) as usize;
            for (i, &wi) in w.iter().enumerate() {
                if wi == 0.0 {
                    continue;
                }
                let col = vecs.column(i);
                for k in 0..sp.sector.dim() {
                    let mut amp2 = 0.0;
                    for nn in 0..nf {
                        let a = col[k * nf + nn];
                        amp2 += a * a;
                    }
                    p[offset + k] += wi * amp2;
                }
            }
        }
        Ok(p)
    }
}

enum DiagonalKind {
    Mx,
    Mx2,
    Photon,
}

/// Observables with dedicated thermal-average paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observable {
    Sx,
    Sx2,
    Sz,
    /// Physical photon number `<A'A>`.
    AdagA,
    /// `omega_c <A'A>` (add `omega_c/2` separately for the offset convention).
    Hem,
    H,
    H2,
}

#[derive(Clone, Copy, Debug)]
pub struct FreeEnergyReport {
    pub f_total: f64,
    pub f_cavity0: f64,
    pub f_dip0: f64,
    pub f_g: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct HeatCapacities {
    pub total: f64,
    pub cavity0: f64,
    pub dipole0: f64,
    pub coupling: f64,
}

fn log_z_from_spectra(spectra: &[SectorSpectrum], beta: f64, ground: f64) -> f64 {
    if beta.is_infinite() {
        return f64::INFINITY;
    }
    let terms: Vec<f64> = spectra
        .iter()
        .flat_map(|sp| {
            let ln_zeta = sp.sector.ln_multiplicity();
            sp.eigenvalues
                .iter()
                .map(move |&e| ln_zeta - beta * (e - ground))
                .collect::<Vec<f64>>()
        })
        .collect();
    -beta * ground + log_sum_exp(&terms)
}

/// Free energy of the bare cavity, `T ln(1 - e^{-beta omega_c})`.
pub fn cavity_free_energy(params: &ModelParams) -> f64 {
    if params.temperature == 0.0 {
        return 0.0;
    }
    params.temperature * (-(-params.beta() * params.omega_c).exp()).ln_1p()
}

/// Heat capacity of the bare cavity, `(beta omega_c)^2 N_th (N_th + 1)`.
pub fn cavity_heat_capacity(params: &ModelParams) -> f64 {
    let x = params.beta() * params.omega_c;
    let n_th = params.n_th();
    x * x * n_th * (n_th + 1.0)
}

/// Spin-only thermal state of `H_dip = omega0 S_z + (J/N) S_x^2`, sector
/// resolved with eigenvectors retained (the sectors are at most `N+1`
/// dimensional). Feeds the decoupled references and every approximation
/// scheme that needs spin correlators.
#[derive(Clone, Debug)]
pub struct DipoleEnsemble {
    params: ModelParams,
    sectors: Vec<DipoleSectorSpectrum>,
    ground_energy: f64,
    log_z: f64,
}

#[derive(Clone, Debug)]
pub struct DipoleSectorSpectrum {
    pub sector: SpinSector,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl DipoleEnsemble {
    pub fn build(params: ModelParams) -> Result<Self> {
        params.validate()?;
        let mut sectors = Vec::new();
        for sector in params.sectors() {
            let h = dipole_sector_hamiltonian(&params, sector);
            let (vals, vecs) = linalg::eigh(h, sector.twice_s())?;
            sectors.push(DipoleSectorSpectrum {
                sector,
                eigenvalues: vals,
                eigenvectors: vecs,
            });
        }
        let ground = sectors
            .iter()
            .map(|s| s.eigenvalues[0])
            .fold(f64::INFINITY, f64::min);
        let beta = params.beta();
        let log_z = if beta.is_infinite() {
            f64::INFINITY
        } else {
            let terms: Vec<f64> = sectors
                .iter()
                .flat_map(|sp| {
                    let ln_zeta = sp.sector.ln_multiplicity();
                    sp.eigenvalues
                        .iter()
                        .map(move |&e| ln_zeta - beta * (e - ground))
                        .collect::<Vec<f64>>()
                })
                .collect();
            -beta * ground + log_sum_exp(&terms)
        };
        Ok(Self {
            params,
            sectors,
            ground_energy: ground,
            log_z,
        })
    }

    pub fn sectors(&self) -> &[DipoleSectorSpectrum] {
        &self.sectors
    }

    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    pub fn ground_energy(&self) -> f64 {
        self.ground_energy
    }

    pub fn free_energy(&self) -> f64 {
        if self.params.temperature == 0.0 {
            self.ground_energy
        } else {
            -self.params.temperature * self.log_z
        }
    }

    /// Normalized weights `zeta e^{-beta E} / Z` per (sector, level).
    pub fn level_weights(&self) -> Result<Vec<Vec<f64>>> {
        let beta = self.params.beta();
        if beta.is_infinite() {
            return Err(Error::BadTemperature {
                requirement: "> 0",
                value: self.params.temperature,
            });
        }
        Ok(self
            .sectors
            .iter()
            .map(|sp| {
                let ln_zeta = sp.sector.ln_multiplicity();
                sp.eigenvalues
                    .iter()
                    .map(|&e| (ln_zeta - beta * e - self.log_z).exp())
                    .collect()
            })
            .collect())
    }

    /// `ln(zeta) - beta E - ln Z` per (sector, level), for overflow-safe
    /// spectral sums.
    pub fn level_log_weights(&self) -> Result<Vec<Vec<f64>>> {
        let beta = self.params.beta();
        if beta.is_infinite() {
            return Err(Error::BadTemperature {
                requirement: "> 0",
                value: self.params.temperature,
            });
        }
        Ok(self
            .sectors
            .iter()
            .map(|sp| {
                let ln_zeta = sp.sector.ln_multiplicity();
                sp.eigenvalues
                    .iter()
                    .map(|&e| ln_zeta - beta * e - self.log_z)
                    .collect()
            })
            .collect())
    }

    pub fn heat_capacity(&self) -> Result<f64> {
        let weights = self.level_weights()?;
        let beta = self.params.beta();
        let mean: f64 = self
            .sectors
            .iter()
            .zip(&weights)
            .map(|(sp, w)| {
                sp.eigenvalues
                    .iter()
                    .zip(w)
                    .map(|(&e, &w)| w * e)
                    .sum::<f64>()
            })
            .sum();
        let var: f64 = self
            .sectors
            .iter()
            .zip(&weights)
            .map(|(sp, w)| {
                sp.eigenvalues
                    .iter()
                    .zip(w)
                    .map(|(&e, &w)| w * (e - mean) * (e - mean))
                    .sum::<f64>()
            })
            .sum();
        Ok(beta * beta * var)
    }

    /// `(<S_x>, <S_x^2>)` under the spin-only thermal state.
    pub fn sx_moments(&self) -> Result<(f64, f64)> {
        let weights = self.level_weights()?;
        let mut mean = 0.0;
        let mut second = 0.0;
        for (sp, w) in self.sectors.iter().zip(&weights) {
            let m_values: Vec<f64> = sp.sector.m_values().collect();
            for (i, &wi) in w.iter().enumerate() {
                if wi == 0.0 {
                    continue;
                }
                let col = sp.eigenvectors.column(i);
                for (k, &m) in m_values.iter().enumerate() {
                    let a2 = col[k] * col[k];
                    mean += wi * a2 * m;
                    second += wi * a2 * m * m;
                }
            }
        }
        Ok((mean, second))
    }

    pub fn sz_mean(&self) -> Result<f64> {
        let weights = self.level_weights()?;
        let mut mean = 0.0;
        for (sp, w) in self.sectors.iter().zip(&weights) {
            let sz = &spin_matrices(sp.sector).sz;
            let szv = sz * &sp.eigenvectors;
            for (i, &wi) in w.iter().enumerate() {
                if wi == 0.0 {
                    continue;
                }
                mean += wi * sp.eigenvectors.column(i).dot(&szv.column(i));
            }
        }
        Ok(mean)
    }
}

/// `F_dip0`; analytic `-N T ln(2 cosh(beta omega0 / 2))` for `J = 0`,
/// spin-only diagonalization otherwise.
pub fn dipole_free_energy(params: &ModelParams) -> f64 {
    let n = params.n_dipoles as f64;
    if params.j_coupling == 0.0 {
        if params.temperature == 0.0 {
            return -n * params.omega0.abs() / 2.0;
        }
        return -n * params.temperature * ln_two_cosh(params.beta() * params.omega0 / 2.0);
    }
    DipoleEnsemble::build(*params)
        .expect("spin-only diagonalization")
        .free_energy()
}

/// `C_dip0`; two-level Schottky form for `J = 0`.
pub fn dipole_heat_capacity(params: &ModelParams) -> Result<f64> {
    if params.temperature == 0.0 {
        return Err(Error::BadTemperature {
            requirement: "> 0",
            value: 0.0,
        });
    }
    if params.j_coupling == 0.0 {
        let x = params.beta() * params.omega0 / 2.0;
        let sech = 1.0 / x.cosh();
        return Ok(params.n_dipoles as f64 * x * x * sech * sech);
    }
    DipoleEnsemble::build(*params)?.heat_capacity()
}

/// Zero-field susceptibility `chi_z = -(1/N) d^2F/d omega0^2` at
/// `omega0 = 0`, via the evenness of `F` in `omega0`:
/// `chi_z = -(2/N) (F(h) - F(0)) / h^2`.
pub fn zero_field_susceptibility(
    params: ModelParams,
    trunc: FockTruncation,
    step: f64,
) -> Result<f64> {
    if !(step > 0.0) {
        return Err(Error::InvalidParams(format!("FD step must be > 0, got {step}")));
    }
    let mut at_h = params;
    at_h.omega0 = step;
    let mut at_zero = params;
    at_zero.omega0 = 0.0;
    let f_h = ThermalEnsemble::build(at_h, trunc, false)?.free_energy().f_total;
    let f_0 = ThermalEnsemble::build(at_zero, trunc, false)?
        .free_energy()
        .f_total;
    Ok(-(2.0 / params.n_dipoles as f64) * (f_h - f_0) / (step * step))
}

/// Default finite-difference step for [`zero_field_susceptibility`].
pub const DEFAULT_CHI_STEP: f64 = 1e-3;

/// One Richardson refinement of the susceptibility finite difference.
pub fn zero_field_susceptibility_richardson(
    params: ModelParams,
    trunc: FockTruncation,
    step: f64,
) -> Result<f64> {
    let coarse = zero_field_susceptibility(params, trunc, step)?;
    let fine = zero_field_susceptibility(params, trunc, step / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Curie coefficient extracted from a low-temperature window: least-squares
/// fit of `chi_z(T) = alpha/T + b` over sample points, which removes any
/// temperature-independent plateau offset.
pub fn curie_constant(
    params: ModelParams,
    trunc: FockTruncation,
    t_window: (f64, f64),
) -> Result<f64> {
    let (t_lo, t_hi) = t_window;
    if !(t_lo > 0.0 && t_hi > t_lo) {
        return Err(Error::InvalidParams(format!(
            "bad fit window [{t_lo}, {t_hi}]"
        )));
    }
    const SAMPLES: usize = 4;
    let mut xs = Vec::with_capacity(SAMPLES);
    let mut ys = Vec::with_capacity(SAMPLES);
    for i in 0..SAMPLES {
        let t = t_lo * (t_hi / t_lo).powf(i as f64 / (SAMPLES - 1) as f64);
        let mut p = params;
        p.temperature = t;
        xs.push(1.0 / t);
        ys.push(zero_field_susceptibility(p, trunc, DEFAULT_CHI_STEP)?);
    }
    let n = SAMPLES as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

/// Closed-form Curie coefficient `alpha_C(g) = (1/4) e^{-g^2/omega_c^2 (1 + 2 N_th)}`
/// from the variational frequency renormalization.
pub fn curie_constant_analytic(params: &ModelParams) -> f64 {
    let r = params.g / params.omega_c;
    0.25 * (-r * r * (1.0 + 2.0 * params.n_th())).exp()
}

/// Shape classification of the `p(m_x)` distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Unimodal,
    Bimodal,
}

/// Bimodal iff the maximum of the (symmetric) distribution over `m_x >= 0`
/// sits strictly away from the center; ties at machine precision count as
/// unimodal.
pub fn classify_phase(p: &[f64]) -> Phase {
    let n = p.len() - 1; // = N
    let center = n.div_ceil(2); // smallest non-negative m_x
    let mut argmax = center;
    let mut max = p[center];
    for (idx, &v) in p.iter().enumerate().skip(center + 1) {
        if v > max {
            max = v;
            argmax = idx;
        }
    }
    let scale = max.abs().max(f64::MIN_POSITIVE);
    if argmax > center && (max - p[center]) > 1e-12 * scale {
        Phase::Bimodal
    } else {
        Phase::Unimodal
    }
}

/// Bisection on temperature against the bimodality classifier, to relative
/// bracket width `1e-3`. Expects exactly one classification change inside
/// `[t_lo, t_hi]` (bimodal at the low end).
pub fn critical_temperature(
    params: ModelParams,
    trunc: FockTruncation,
    t_bracket: (f64, f64),
) -> Result<f64> {
    let (mut lo, mut hi) = t_bracket;
    let classify = |t: f64| -> Result<Phase> {
        let mut p = params;
        p.temperature = t;
        let ens = ThermalEnsemble::build(p, trunc, true)?;
        Ok(classify_phase(&ens.mx_distribution()?))
    };
    let lo_phase = classify(lo)?;
    let hi_phase = classify(hi)?;
    if lo_phase != Phase::Bimodal || hi_phase != Phase::Unimodal {
        return Err(Error::NoSignChange { lo, hi });
    }
    while (hi - lo) > 1e-3 * hi {
        let mid = 0.5 * (lo + hi);
        if classify(mid)? == Phase::Bimodal {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
