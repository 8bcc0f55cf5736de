//! Total-spin sectors of `N` spin-1/2 dipoles and the collective spin
//! matrices in the `S_x` eigenbasis.
//!
//! The all-to-all model conserves total spin, so the `2^N` dipole Hilbert
//! space splits into multiplets of spin `s` appearing with a permutation
//! multiplicity `zeta(s, N)`. All matrices here are expressed in the basis
//! where `S_x` is diagonal (`m_x` ascending), with phases chosen so that
//! `S_z` is real symmetric and `S_y` purely imaginary; every sector
//! Hamiltonian assembled downstream is then real symmetric.

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

/// One total-spin sector: spin `s` (stored as `2s`), its dimension `2s + 1`
/// and its permutation multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpinSector {
    twice_s: u32,
    n_dipoles: u32,
}

impl SpinSector {
    /// Requires `0 <= 2s <= N` with `N - 2s` even.
    pub fn new(twice_s: u32, n_dipoles: u32) -> Result<Self> {
        if n_dipoles == 0 || twice_s > n_dipoles || (n_dipoles - twice_s) % 2 != 0 {
            return Err(Error::InvalidSector { twice_s, n_dipoles });
        }
        Ok(Self { twice_s, n_dipoles })
    }

    pub fn twice_s(&self) -> u32 {
        self.twice_s
    }

    pub fn s(&self) -> f64 {
        self.twice_s as f64 / 2.0
    }

    pub fn n_dipoles(&self) -> u32 {
        self.n_dipoles
    }

    /// Sector dimension `2s + 1`.
    pub fn dim(&self) -> usize {
        self.twice_s as usize + 1
    }

    /// Projection eigenvalues `m = -s..s` ascending.
    pub fn m_values(&self) -> impl Iterator<Item = f64> + '_ {
        let s = self.s();
        (0..self.dim()).map(move |k| -s + k as f64)
    }

    /// Exact multiplet multiplicity
    /// `zeta(s, N) = N! (2s + 1) / ((N/2 - s)! (N/2 + s + 1)!)`,
    /// evaluated in integer arithmetic (the factorials overflow `u64` near
    /// `N = 21`).
    pub fn multiplicity(&self) -> BigUint {
        let n = self.n_dipoles;
        let k_minus = (n - self.twice_s) / 2; // N/2 - s
        let k_plus = (n + self.twice_s) / 2 + 1; // N/2 + s + 1
        let numer = factorial(n) * BigUint::from(self.twice_s + 1);
        let denom = factorial(k_minus) * factorial(k_plus);
        &numer / &denom
    }

    /// `ln zeta(s, N)` for Boltzmann-sum accumulation.
    pub fn ln_multiplicity(&self) -> f64 {
        self.multiplicity()
            .to_f64()
            .expect("multiplicity exceeds f64 range")
            .ln()
    }
}

fn factorial(n: u32) -> BigUint {
    (1..=u64::from(n)).map(BigUint::from).product()
}

/// All spin sectors of `N` dipoles, largest spin first
/// (`s = N/2, N/2 - 1, ..`, down to `0` or `1/2`).
pub fn sectors(n_dipoles: u32) -> Vec<SpinSector> {
    let mut out = Vec::with_capacity(n_dipoles as usize / 2 + 1);
    let mut twice_s = n_dipoles as i64;
    while twice_s >= 0 {
        out.push(SpinSector {
            twice_s: twice_s as u32,
            n_dipoles,
        });
        twice_s -= 2;
    }
    out
}

/// Tags the basis convention carried by [`SpinMatrices`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisLabel {
    /// Eigenbasis of `S_x`, `m_x` ascending.
    XBasis,
}

/// Collective spin matrices of one sector in the `S_x` eigenbasis.
///
/// `S_y` is purely imaginary with this phase convention; it is stored through
/// its real part `sy_im` with `S_y = i * sy_im` (`sy_im` antisymmetric).
#[derive(Clone, Debug)]
pub struct SpinMatrices {
    pub sector: SpinSector,
    /// Diagonal `m_x`.
    pub sx: DMatrix<f64>,
    /// Real symmetric ladder form, `<m+1|S_z|m> = sqrt(s(s+1) - m(m+1)) / 2`.
    pub sz: DMatrix<f64>,
    /// `S_y = i * sy_im`; real antisymmetric.
    pub sy_im: DMatrix<f64>,
    /// Diagonal `m_x^2`.
    pub sx2: DMatrix<f64>,
    pub basis: BasisLabel,
}

/// Builds the sector spin matrices by relabeling the standard
/// angular-momentum ladder construction so that `S_x` is diagonal.
pub fn spin_matrices(sector: SpinSector) -> SpinMatrices {
    let dim = sector.dim();
    let s = sector.s();
    let mut sx = DMatrix::zeros(dim, dim);
    let mut sz = DMatrix::zeros(dim, dim);
    let mut sy_im = DMatrix::zeros(dim, dim);
    let mut sx2 = DMatrix::zeros(dim, dim);
    for (k, m) in sector.m_values().enumerate() {
        sx[(k, k)] = m;
        sx2[(k, k)] = m * m;
        if k + 1 < dim {
            let c = ladder_element(s, m);
            sz[(k + 1, k)] = 0.5 * c;
            sz[(k, k + 1)] = 0.5 * c;
            sy_im[(k + 1, k)] = 0.5 * c;
            sy_im[(k, k + 1)] = -0.5 * c;
        }
    }
    SpinMatrices {
        sector,
        sx,
        sz,
        sy_im,
        sx2,
        basis: BasisLabel::XBasis,
    }
}

/// `sqrt(s(s+1) - m(m+1))`, the raising matrix element from `m` to `m + 1`.
pub fn ladder_element(s: f64, m: f64) -> f64 {
    (s * (s + 1.0) - m * (m + 1.0)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigh_values;
    use approx::assert_relative_eq;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    #[test]
    fn fully_symmetric_multiplet_is_unique() {
        for n in 1..=16 {
            let top = SpinSector::new(n, n).unwrap();
            assert_eq!(top.multiplicity(), BigUint::from(1u32), "N = {n}");
        }
    }

    #[test]
    fn singlet_multiplicity_of_four_dipoles() {
        // 4! * 1 / (2! * 3!) = 2
        let sector = SpinSector::new(0, 4).unwrap();
        assert_eq!(sector.multiplicity(), BigUint::from(2u32));
    }

    #[test]
    fn two_dipole_sector_sum_counts_hilbert_space() {
        let dims: u64 = sectors(2)
            .iter()
            .map(|sec| sec.multiplicity().to_u64().unwrap() * sec.dim() as u64)
            .sum();
        assert_eq!(dims, 4);
    }

    #[test]
    fn sector_dimensions_sum_to_power_of_two() {
        for n in 1..=16u32 {
            let total: BigUint = sectors(n)
                .iter()
                .map(|sec| sec.multiplicity() * BigUint::from(sec.dim() as u64))
                .sum();
            assert_eq!(total, BigUint::from(2u32).pow(n), "N = {n}");
        }
    }

    #[test]
    fn multiplicity_survives_big_n() {
        // near N = 64 the factorials are ~1e89; the ratio must stay exact
        let total: BigUint = sectors(64)
            .iter()
            .map(|sec| sec.multiplicity() * BigUint::from(sec.dim() as u64))
            .sum();
        assert_eq!(total, BigUint::from(2u32).pow(64));
    }

    #[test]
    fn parity_mismatch_is_rejected() {
        assert!(matches!(
            SpinSector::new(1, 4),
            Err(crate::Error::InvalidSector { .. })
        ));
        assert!(SpinSector::new(5, 4).is_err());
    }

    #[test]
    fn spin_half_matrices() {
        let m = spin_matrices(SpinSector::new(1, 1).unwrap());
        assert_eq!(m.sx[(0, 0)], -0.5);
        assert_eq!(m.sx[(1, 1)], 0.5);
        assert_relative_eq!(m.sz[(0, 1)], 0.5, epsilon = 1e-15);
        assert_relative_eq!(m.sz[(1, 0)], 0.5, epsilon = 1e-15);
        assert_eq!(m.sz[(0, 0)], 0.0);
    }

    #[test]
    fn spin_one_sz_squared_trace() {
        let m = spin_matrices(SpinSector::new(2, 2).unwrap());
        let tr = (&m.sz * &m.sz).trace();
        assert_relative_eq!(tr, 2.0, epsilon = 1e-12);
    }

    fn check_algebra(sector: SpinSector) {
        let m = spin_matrices(sector);
        let s = sector.s();
        let dim = sector.dim();
        // with S_y = i Y: [S_x, S_y] = i S_z  <=>  [S_x, Y] = S_z, and cyclic
        let comm_xy = &m.sx * &m.sy_im - &m.sy_im * &m.sx;
        assert!((&comm_xy - &m.sz).abs().max() < 1e-12, "xy commutator");
        let comm_yz = &m.sy_im * &m.sz - &m.sz * &m.sy_im;
        assert!((&comm_yz - &m.sx).abs().max() < 1e-12, "yz commutator");
        let comm_zx = &m.sz * &m.sx - &m.sx * &m.sz;
        assert!((&comm_zx + &m.sy_im).abs().max() < 1e-12, "zx commutator");
        // Casimir: S_x^2 + S_y^2 + S_z^2 = s(s+1) with S_y^2 = -Y^2
        let casimir = &m.sx * &m.sx - &m.sy_im * &m.sy_im + &m.sz * &m.sz;
        let expected = DMatrix::<f64>::identity(dim, dim) * (s * (s + 1.0));
        assert!((casimir - expected).abs().max() < 1e-10, "casimir");
        // sz spectrum equals sx spectrum (axis relabeling is unitary)
        let vals = eigh_values(&m.sz);
        for (k, (v, m_x)) in vals.iter().zip(sector.m_values()).enumerate() {
            assert_relative_eq!(*v, m_x, epsilon = 1e-10, max_relative = 1e-10);
            let _ = k;
        }
    }

    #[test]
    fn algebra_closes_in_every_sector_up_to_n_12() {
        for n in 1..=12 {
            for sector in sectors(n) {
                check_algebra(sector);
            }
        }
    }

    proptest! {
        #[test]
        fn prop_sector_sum_and_algebra(n in 1u32..=12) {
            let total: BigUint = sectors(n)
                .iter()
                .map(|sec| sec.multiplicity() * BigUint::from(sec.dim() as u64))
                .sum();
            prop_assert_eq!(total, BigUint::from(2u32).pow(n));
        }
    }
}
