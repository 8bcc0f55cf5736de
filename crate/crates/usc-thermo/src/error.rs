//! Error type shared by all modules.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    /// Sector parity mismatch: `n - 2s` must be even and `0 <= 2s <= n`.
    #[error("invalid spin sector: 2s = {twice_s}, N = {n_dipoles}")]
    InvalidSector { twice_s: u32, n_dipoles: u32 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The brute-force lab-frame oracle is restricted to small `N`.
    #[error("brute-force oracle restricted to N <= {max}, got N = {n}")]
    OracleTooLarge { n: u32, max: u32 },

    #[error("eigensolver failed to converge on sector 2s = {twice_s} (dim {dim})")]
    EigenFailure { twice_s: u32, dim: usize },

    /// Operation needs eigenvectors but the ensemble was built without them.
    #[error("operation requires eigenvectors; rebuild the ensemble with `want_vectors`")]
    MissingEigenvectors,

    #[error("temperature must be {requirement}, got T = {value}")]
    BadTemperature { requirement: &'static str, value: f64 },

    /// Bisection bracket does not contain exactly one classification change.
    #[error("no phase change inside bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("series did not converge within r + q <= {max_shell} (last relative shell {last_rel:.3e})")]
    SeriesDivergence { max_shell: usize, last_rel: f64 },

    /// Linearized (Holstein-Primakoff) model has an imaginary normal mode.
    #[error("polariton instability: squared normal-mode frequency {omega_sq} < 0")]
    Instability { omega_sq: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
