//! Thermal emission of the cavity through a weak line coupling: the
//! black-body spectrum
//!
//! ```text
//! S_bb(w) = (kappa gamma / 2 pi omega_c) sum_{n>m} (e^{-beta E_n}/Z)
//!           w_nm^2 |<E_n| A + A' |E_m>|^2 / ((w - w_nm)^2 + gamma^2/4),
//! ```
//!
//! the total radiated power (its frequency integral) and the linearized
//! Holstein-Primakoff polariton picture used for comparison at moderate
//! coupling. In the polaron frame the physical operator `A + A'` is the bare
//! `a + a'`, which commutes with total spin, so lines never cross sectors.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::math::bose_occupation;
use crate::polaron::ModelParams;
use crate::thermo::ThermalEnsemble;

/// One emission resonance: positive transition frequency and its weight
/// `(e^{-beta E_n}/Z) zeta_s w_nm^2 |<n| a + a' |m>|^2`.
#[derive(Clone, Copy, Debug)]
pub struct EmissionLine {
    pub omega: f64,
    pub weight: f64,
}

#[derive(Clone, Debug)]
pub struct EmissionLineList {
    /// Sorted by frequency; degenerate lines merged, negligible ones pruned.
    pub lines: Vec<EmissionLine>,
    /// Cavity decay rate into the line (overall scale only).
    pub kappa: f64,
    /// Phenomenological Lorentzian width.
    pub gamma: f64,
    pub params: ModelParams,
    /// Scale-separation diagnostics (`kappa << gamma << level spacing`).
    pub warnings: Vec<String>,
}

/// Lines closer than this (in units of `omega_c`) are merged.
const MERGE_TOL: f64 = 1e-12;
/// Relative weight below which lines are dropped.
const PRUNE_TOL: f64 = 1e-14;

/// Builds the emission line list from an ensemble with eigenvectors.
pub fn emission_lines(
    ensemble: &ThermalEnsemble,
    kappa: f64,
    gamma: f64,
) -> Result<EmissionLineList> {
    let params = ensemble.params();
    let beta = params.beta();
    if beta.is_infinite() {
        return Err(Error::BadTemperature {
            requirement: "> 0",
            value: params.temperature,
        });
    }
    if !(kappa > 0.0 && gamma > 0.0) {
        return Err(Error::InvalidParams(format!(
            "rates must be positive: kappa = {kappa}, gamma = {gamma}"
        )));
    }
    let nf = ensemble.trunc().dim();
    let log_z = ensemble.log_z();
    let mut lines: Vec<EmissionLine> = Vec::new();
    let mut min_spacing = f64::INFINITY;
    for sp in ensemble.spectra() {
        let vecs = sp.eigenvectors.as_ref().ok_or(Error::MissingEigenvectors)?;
        let ln_zeta = sp.sector.ln_multiplicity();
        let dim = sp.eigenvalues.len();
        // X = V^T (1 (x) (a + a')) V via a banded apply on the photon index
        let mut bv = DMatrix::<f64>::zeros(dim, dim);
        for col in 0..dim {
            let v = vecs.column(col);
            let mut out = bv.column_mut(col);
            for row in 0..dim {
                let n = row % nf;
                let mut acc = 0.0;
                if n >= 1 {
                    acc += (n as f64).sqrt() * v[row - 1];
                }
                if n + 1 < nf {
                    acc += ((n + 1) as f64).sqrt() * v[row + 1];
                }
                out[row] = acc;
            }
        }
        let x = vecs.transpose() * bv;
        for upper in 1..dim {
            let ln_w = ln_zeta - beta * sp.eigenvalues[upper] - log_z;
            for lower in 0..upper {
                let omega = sp.eigenvalues[upper] - sp.eigenvalues[lower];
                if omega <= MERGE_TOL * params.omega_c {
                    continue; // degenerate pair: w_nm^2 kills it anyway
                }
                let elem = x[(lower, upper)];
                if elem == 0.0 {
                    continue;
                }
                let weight = ln_w.exp() * omega * omega * elem * elem;
                if weight > 0.0 {
                    lines.push(EmissionLine { omega, weight });
                }
            }
        }
        for k in 1..dim {
            let gap = sp.eigenvalues[k] - sp.eigenvalues[k - 1];
            if gap > 1e-9 {
                min_spacing = min_spacing.min(gap);
            }
        }
    }
    lines.sort_by(|a, b| a.omega.partial_cmp(&b.omega).unwrap());
    let merged = merge_lines(lines, MERGE_TOL * params.omega_c);
    let max_weight = merged.iter().map(|l| l.weight).fold(0.0, f64::max);
    let pruned: Vec<EmissionLine> = merged
        .into_iter()
        .filter(|l| l.weight > PRUNE_TOL * max_weight)
        .collect();

    let mut warnings = Vec::new();
    if kappa > 0.1 * gamma {
        warnings.push(format!(
            "kappa = {kappa} is not small against gamma = {gamma}; the weak-link expansion degrades"
        ));
    }
    if gamma > min_spacing {
        warnings.push(format!(
            "gamma = {gamma} exceeds the smallest level spacing {min_spacing:.3e}; lines overlap"
        ));
    }
    Ok(EmissionLineList {
        lines: pruned,
        kappa,
        gamma,
        params,
        warnings,
    })
}

fn merge_lines(sorted: Vec<EmissionLine>, tol: f64) -> Vec<EmissionLine> {
    let mut out: Vec<EmissionLine> = Vec::with_capacity(sorted.len());
    for line in sorted {
        match out.last_mut() {
            Some(prev) if (line.omega - prev.omega) < tol => {
                // weight-average the position to keep the merge symmetric
                let total = prev.weight + line.weight;
                prev.omega = (prev.omega * prev.weight + line.omega * line.weight) / total;
                prev.weight = total;
            }
            _ => out.push(line),
        }
    }
    out
}

/// Samples the Lorentzian-broadened spectrum on a frequency grid.
pub fn sampled_spectrum(list: &EmissionLineList, omega_grid: &[f64]) -> Vec<f64> {
    let prefactor =
        list.kappa * list.gamma / (2.0 * std::f64::consts::PI * list.params.omega_c);
    let half_width_sq = list.gamma * list.gamma / 4.0;
    omega_grid
        .iter()
        .map(|&w| {
            prefactor
                * list
                    .lines
                    .iter()
                    .map(|l| l.weight / ((w - l.omega) * (w - l.omega) + half_width_sq))
                    .sum::<f64>()
        })
        .collect()
}

#[derive(Clone, Copy, Debug)]
pub struct RadiatedPower {
    /// `P_rad = (kappa / omega_c) sum weights`.
    pub p_rad: f64,
    /// Empty-cavity reference `omega_c kappa N_th`.
    pub p_rad0: f64,
    /// `P_rad / P_rad0`; `None` when `N_th = 0`.
    pub ratio: Option<f64>,
}

/// Total radiated power from the line list.
pub fn radiated_power(list: &EmissionLineList) -> RadiatedPower {
    let p = &list.params;
    let p_rad = list.kappa / p.omega_c * list.lines.iter().map(|l| l.weight).sum::<f64>();
    let n_th = p.n_th();
    let p_rad0 = p.omega_c * list.kappa * n_th;
    RadiatedPower {
        p_rad,
        p_rad0,
        ratio: (p_rad0 > 0.0).then_some(p_rad / p_rad0),
    }
}

/// Exact EM energy `omega_c <A'A>` (plus `omega_c/2` under the offset
/// convention used for plotting).
pub fn em_energy(ensemble: &ThermalEnsemble, include_offset: bool) -> Result<f64> {
    let base = ensemble.expectation(crate::thermo::Observable::Hem)?;
    Ok(if include_offset {
        base + ensemble.params().omega_c / 2.0
    } else {
        base
    })
}

/// Bright-polariton decomposition of the linearized (Holstein-Primakoff)
/// model at `J = 0`: mode frequencies and the matrix elements of
/// `A + A'` and `A' - A` on the two bright modes.
#[derive(Clone, Copy, Debug)]
pub struct HpPolaritons {
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub v_plus: f64,
    pub v_minus: f64,
    pub phi_plus: f64,
    pub phi_minus: f64,
    pub params: ModelParams,
}

/// Diagonalizes the two-mode quadratic Hamiltonian
///
/// ```text
/// omega_c a'a + omega0 b'b + (G/2)(a + a')(b + b') + (G^2/4 omega_c)(b + b')^2
/// ```
///
/// by a symplectic transformation: the normal-mode frequencies are the square
/// roots of the eigenvalues of
/// `[[omega_c^2, G sqrt(omega_c omega0)], [G sqrt(omega_c omega0), omega0^2 + G^2 omega0/omega_c]]`.
pub fn hp_polaritons(params: &ModelParams) -> Result<HpPolaritons> {
    params.validate()?;
    if params.j_coupling != 0.0 {
        return Err(Error::InvalidParams(
            "the Holstein-Primakoff comparison is restricted to J = 0".into(),
        ));
    }
    if !(params.omega0 > 0.0) {
        return Err(Error::InvalidParams(
            "polariton decomposition needs omega0 > 0".into(),
        ));
    }
    let wc = params.omega_c;
    let w0 = params.omega0;
    let big_g = params.collective_coupling();
    let k11 = wc * wc;
    let k22 = w0 * w0 + big_g * big_g * w0 / wc;
    let k12 = big_g * (wc * w0).sqrt();
    let mean = 0.5 * (k11 + k22);
    let radius = (0.25 * (k11 - k22) * (k11 - k22) + k12 * k12).sqrt();
    let (lam_minus, lam_plus) = (mean - radius, mean + radius);
    if lam_minus <= 0.0 {
        return Err(Error::Instability { omega_sq: lam_minus });
    }
    let omega_plus = lam_plus.sqrt();
    let omega_minus = lam_minus.sqrt();
    // orthonormal eigenvectors of the 2x2 stiffness matrix, cavity component
    // chosen non-negative
    let e_plus = normalized_eigenvector(k11, k22, k12, lam_plus);
    let e_minus = [-e_plus[1], e_plus[0]];
    let e_minus = if e_minus[0] < 0.0 {
        [-e_minus[0], -e_minus[1]]
    } else {
        e_minus
    };
    let v_of = |e: [f64; 2], w: f64| {
        (wc / w).sqrt() * e[0] + big_g / wc * (w0 / w).sqrt() * e[1]
    };
    let phi_of = |e: [f64; 2], w: f64| (w / wc).sqrt() * e[0];
    Ok(HpPolaritons {
        omega_plus,
        omega_minus,
        v_plus: v_of(e_plus, omega_plus),
        v_minus: v_of(e_minus, omega_minus),
        phi_plus: phi_of(e_plus, omega_plus),
        phi_minus: phi_of(e_minus, omega_minus),
        params: *params,
    })
}

fn normalized_eigenvector(k11: f64, k22: f64, k12: f64, lambda: f64) -> [f64; 2] {
    // pick the better-conditioned row
    let cand = if (lambda - k11).abs() >= (lambda - k22).abs() {
        [k12, lambda - k11]
    } else {
        [lambda - k22, k12]
    };
    let norm = (cand[0] * cand[0] + cand[1] * cand[1]).sqrt();
    let mut e = [cand[0] / norm, cand[1] / norm];
    if e[0] < 0.0 {
        e = [-e[0], -e[1]];
    }
    e
}

#[derive(Clone, Copy, Debug)]
pub struct HpThermal {
    /// `P_rad / P_rad0` within the bright-polariton picture.
    pub power_ratio: f64,
    /// `<H_em>` from the polariton decomposition (offset optional).
    pub em_energy: f64,
}

/// Thermal emission and EM energy in the Holstein-Primakoff picture:
///
/// ```text
/// P/P0 = V_+^2 (w_+^2/w_c^2) N_th(w_+)/N_th(w_c) + (- branch),
/// <H_em>/w_c = (V_+^2 + Phi_+^2)/2 N_th(w_+) + (- branch)
///              + (V_+^2 + Phi_+^2 + V_-^2 + Phi_-^2)/4 - 1/2.
/// ```
pub fn hp_power_and_energy(
    hp: &HpPolaritons,
    temperature: f64,
    include_offset: bool,
) -> Result<HpThermal> {
    if !(temperature > 0.0) {
        return Err(Error::BadTemperature {
            requirement: "> 0",
            value: temperature,
        });
    }
    let beta = 1.0 / temperature;
    let p = &hp.params;
    let nth_c = bose_occupation(p.omega_c, beta);
    let nth_p = bose_occupation(hp.omega_plus, beta);
    let nth_m = bose_occupation(hp.omega_minus, beta);
    let wc2 = p.omega_c * p.omega_c;
    let power_ratio = hp.v_plus * hp.v_plus * (hp.omega_plus * hp.omega_plus / wc2) * nth_p / nth_c
        + hp.v_minus * hp.v_minus * (hp.omega_minus * hp.omega_minus / wc2) * nth_m / nth_c;
    let sum_plus = hp.v_plus * hp.v_plus + hp.phi_plus * hp.phi_plus;
    let sum_minus = hp.v_minus * hp.v_minus + hp.phi_minus * hp.phi_minus;
    let mut em = p.omega_c
        * (0.5 * sum_plus * nth_p + 0.5 * sum_minus * nth_m + 0.25 * (sum_plus + sum_minus) - 0.5);
    if include_offset {
        em += p.omega_c / 2.0;
    }
    Ok(HpThermal {
        power_ratio,
        em_energy: em,
    })
}
