//! Equilibrium thermodynamics and black-body emission of the extended Dicke
//! model: `N` two-level dipoles coupled with strength `g` to a single cavity
//! mode of frequency `omega_c`, including the quadratic polarization term,
//!
//! ```text
//! H = omega_c a'a + g (a + a') S_x + (g^2/omega_c) S_x^2
//!     + omega0 S_z + (J/N) S_x^2
//! ```
//!
//! in natural units `hbar = k_B = 1`. All frequencies, energies and
//! temperatures are measured in units of `omega_c` unless noted otherwise.
//!
//! The crate is organized around the permutation symmetry of the all-to-all
//! model: the Hamiltonian conserves total spin, so thermodynamics is computed
//! sector by sector in a polaron frame where the photon cutoff stays small
//! even deep in the ferroelectric phase.
//!
//! * [`spin`] — total-spin sectors, multiplicities and collective spin
//!   matrices in the `S_x` eigenbasis.
//! * [`polaron`] — model parameters, displacement operator blocks, sector
//!   Hamiltonians and a brute-force lab-frame oracle for small `N`.
//! * [`thermo`] — exact diagonalization thermodynamics: free energy,
//!   observables, susceptibility, heat capacity and the ferroelectric
//!   bimodality criterion.
//! * [`approximations`] — mean-field, perturbative, low-frequency and
//!   variational treatments of the coupling-induced free energy.
//! * [`radiation`] — thermal emission line lists, spectra, radiated power and
//!   the Holstein-Primakoff polariton comparison.

pub mod approximations;
pub mod error;
pub mod linalg;
pub mod math;
pub mod polaron;
pub mod radiation;
pub mod spin;
pub mod thermo;

pub use error::{Error, Result};
pub use polaron::{FockTruncation, ModelParams, SectorHamiltonian};
pub use spin::{SpinMatrices, SpinSector};
pub use thermo::{FreeEnergyReport, Observable, Phase, SectorSpectrum, ThermalEnsemble};
