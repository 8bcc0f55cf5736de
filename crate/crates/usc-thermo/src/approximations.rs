//! Approximate treatments of the coupling-induced free energy: mean-field
//! decouplings, second-order perturbation theory in `g`, the low-frequency
//! (`omega0`) series in the polaron frame, the Bogoliubov variational bound
//! and the effective strong-coupling spin Hamiltonian.
//!
//! All imaginary-time double integrals reduce to the closed form
//! [`crate::math::exp_double_integral`]; spectral sums fold Boltzmann weights
//! into the exponent so nothing overflows at low temperature.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::math::{
    bose_occupation, ln_two_cosh, log_sum_exp, scan_then_golden, weighted_exp_double_integral,
};
use crate::polaron::ModelParams;
use crate::spin::{spin_matrices, SpinSector};
use crate::thermo::{cavity_free_energy, dipole_free_energy, DipoleEnsemble};

/// Self-consistent cavity mean-field solution.
#[derive(Clone, Copy, Debug)]
pub struct MeanFieldSolution {
    /// Order parameter `Sigma_x = <S_x>`.
    pub sigma_x: f64,
    /// Cavity displacement `alpha = -(g/omega_c) Sigma_x`.
    pub alpha: f64,
    /// Total mean-field free energy.
    pub f_mf: f64,
    /// Coupling part `F_MF - F_c0 - F_dip0`.
    pub f_g_mf: f64,
    pub converged: bool,
}

/// Mean-field solution of the bare dipole (LMG) model.
#[derive(Clone, Copy, Debug)]
pub struct LmgMeanField {
    pub free_energy: f64,
    pub sigma_x: f64,
    pub sigma_z: f64,
    pub ferroelectric: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PerturbationMethod {
    /// Closed form for non-interacting dipoles.
    AnalyticJ0,
    /// Spectral representation over the spin-only eigenbasis, any `J`.
    SpectralJ,
}

/// Second-order coupling correction `F_g2 = N (g^2 / 4 omega_c) f_g`.
#[derive(Clone, Copy, Debug)]
pub struct PerturbationResult {
    pub f_g2: f64,
    pub fg_dimensionless: f64,
    pub method: PerturbationMethod,
    /// Displaced-frame bound `4 (Delta S_x)^2_0 / N` on `f_g`.
    pub bound: f64,
}

/// Variational upper bound on the free energy.
#[derive(Clone, Copy, Debug)]
pub struct VariationalResult {
    /// Renormalized dipole frequency `omega0~(g)`.
    pub omega0_tilde: f64,
    /// `F_V = F_c0 + F_dip0(omega0~)`.
    pub f_v: f64,
    /// `F_V - F_c0 - F_dip0(omega0)`.
    pub f_g_v: f64,
    /// `<S_z>` in the trial state (at `omega0~`).
    pub sigma_z: f64,
}

const SCAN_POINTS: usize = 256;
const GOLDEN_TOL: f64 = 1e-10;

/// Mean-field treatment of the bare LMG model: free energy
///
/// ```text
/// F(Sigma_x) = -N T ln(2 cosh(Omega / 2T)) - (J/N) Sigma_x^2,
/// Omega = sqrt(omega0^2 + 4 J^2 Sigma_x^2 / N^2),
/// ```
///
/// minimized over the self-consistent branch. Only the attractive sign
/// `J < 0` admits a symmetry-broken stationary point (`<S_x>` anti-aligns
/// with the exchange field for `J > 0`), so the bracketed scan applies to
/// `J < 0` and the repulsive case sits at `Sigma_x = 0`.
pub fn lmg_mean_field(params: &ModelParams) -> LmgMeanField {
    let n = params.n_dipoles as f64;
    let f = |sigma_x: f64| lmg_mf_free_energy(params, sigma_x);
    let (sigma_x, free_energy) = if params.j_coupling < 0.0 {
        let (x, fx) = scan_then_golden(f, 0.0, n / 2.0, SCAN_POINTS, GOLDEN_TOL);
        snap_to_symmetric(f(0.0), x, fx)
    } else {
        (0.0, f(0.0))
    };
    let omega = effective_lmg_gap(params, sigma_x);
    let tanh = if params.temperature == 0.0 {
        1.0
    } else {
        (params.beta() * omega / 2.0).tanh()
    };
    let sigma_z = if omega == 0.0 {
        0.0
    } else {
        -(n * params.omega0 / (2.0 * omega)) * tanh
    };
    LmgMeanField {
        free_energy,
        sigma_x,
        sigma_z,
        ferroelectric: sigma_x > 1e-6,
    }
}

/// Collapses a shallow broken minimum onto `Sigma_x = 0` when it is not
/// resolvable above floating-point noise in the free energy.
fn snap_to_symmetric(f0: f64, x: f64, fx: f64) -> (f64, f64) {
    if f0 <= fx + 1e-12 * f0.abs() {
        (0.0, f0)
    } else {
        (x, fx)
    }
}

fn effective_lmg_gap(params: &ModelParams, sigma_x: f64) -> f64 {
    let n = params.n_dipoles as f64;
    let j = params.j_coupling;
    (params.omega0 * params.omega0 + 4.0 * j * j * sigma_x * sigma_x / (n * n)).sqrt()
}

fn lmg_mf_free_energy(params: &ModelParams, sigma_x: f64) -> f64 {
    let n = params.n_dipoles as f64;
    let omega = effective_lmg_gap(params, sigma_x);
    let spin = if params.temperature == 0.0 {
        -n * omega / 2.0
    } else {
        -n * params.temperature * ln_two_cosh(params.beta() * omega / 2.0)
    };
    spin - params.j_coupling / n * sigma_x * sigma_x
}

/// Mean-field critical temperature from
/// `tanh(omega0 / 2 T_c) = -omega0 / J_c`; `None` when no finite-temperature
/// transition exists (`J >= -omega0`).
pub fn lmg_tc_mean_field(omega0: f64, j: f64) -> Option<f64> {
    if j >= 0.0 {
        return None;
    }
    if omega0 == 0.0 {
        return Some(-j / 2.0); // classical Ising limit
    }
    let ratio = omega0 / -j;
    if ratio >= 1.0 {
        None
    } else {
        Some(omega0 / (2.0 * ratio.atanh()))
    }
}

/// Mean-field boundary with `omega0` replaced by the renormalized
/// `omega0~(g, T)`; solved by bisection because the renormalization is
/// itself temperature dependent through `N_th`.
pub fn lmg_tc_mean_field_modified(params: &ModelParams, t_max: f64) -> Option<f64> {
    let j = params.j_coupling;
    if j >= 0.0 {
        return None;
    }
    let omega_tilde = |t: f64| {
        let n_th = bose_occupation(params.omega_c, 1.0 / t);
        let r = params.g / params.omega_c;
        params.omega0 * (-0.5 * r * r * (1.0 + 2.0 * n_th)).exp()
    };
    // positive below the boundary, negative above
    let criterion = |t: f64| {
        let w = omega_tilde(t);
        (w / (2.0 * t)).tanh() - w / -j
    };
    let (mut lo, mut hi) = (1e-9, t_max);
    if criterion(lo) <= 0.0 || criterion(hi) >= 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if criterion(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) < 1e-12 * hi {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Cavity mean-field: decouples the dipole-field term but keeps the dipole
/// fluctuations exact,
///
/// ```text
/// Z_MF(Sigma_x) = Z_c0 * Tr exp(-beta [H_dip + (g^2/omega_c)(S_x - Sigma_x)^2]),
/// ```
///
/// minimized over `Sigma_x` (coarse scan then golden section).
pub fn cavity_mean_field_fg(params: &ModelParams) -> Result<MeanFieldSolution> {
    params.validate()?;
    let n = params.n_dipoles as f64;
    let f = |sigma_x: f64| cavity_mf_free_energy(params, sigma_x);
    let (x, fx) = scan_then_golden(&f, 0.0, n / 2.0, SCAN_POINTS, GOLDEN_TOL);
    let (sigma_x, f_mf) = snap_to_symmetric(f(0.0), x, fx);
    let f_g_mf = f_mf - cavity_free_energy(params) - dipole_free_energy(params);
    Ok(MeanFieldSolution {
        sigma_x,
        alpha: -(params.g / params.omega_c) * sigma_x,
        f_mf,
        f_g_mf,
        converged: true,
    })
}

fn cavity_mf_free_energy(params: &ModelParams, sigma_x: f64) -> f64 {
    cavity_free_energy(params) + constrained_dipole_free_energy(params, sigma_x)
}

/// `-T ln Tr exp(-beta [H_dip + (g^2/omega_c)(S_x - Sigma_x)^2])`, sector
/// resolved. The quadratic term is diagonal in the `S_x` basis.
fn constrained_dipole_free_energy(params: &ModelParams, sigma_x: f64) -> f64 {
    let chi = params.g * params.g / params.omega_c;
    let j_over_n = params.j_coupling / params.n_dipoles as f64;
    let beta = params.beta();
    let mut ground = f64::INFINITY;
    let mut sector_values: Vec<(f64, Vec<f64>)> = Vec::new();
    for sector in params.sectors() {
        let mats = spin_matrices(sector);
        let mut h = params.omega0 * &mats.sz;
        for (k, m) in sector.m_values().enumerate() {
            h[(k, k)] += j_over_n * m * m + chi * (m - sigma_x) * (m - sigma_x);
        }
        let vals = linalg::eigh_values(&h);
        ground = ground.min(vals[0]);
        sector_values.push((sector.ln_multiplicity(), vals));
    }
    if beta.is_infinite() {
        return ground;
    }
    let terms: Vec<f64> = sector_values
        .iter()
        .flat_map(|(ln_zeta, vals)| vals.iter().map(move |&e| ln_zeta - beta * (e - ground)))
        .collect();
    ground - params.temperature * log_sum_exp(&terms)
}

/// `<S_x>` in the constrained dipole state; self-consistency diagnostic for
/// the cavity mean field.
pub fn constrained_sx_mean(params: &ModelParams, sigma_x: f64) -> Result<f64> {
    let chi = params.g * params.g / params.omega_c;
    let j_over_n = params.j_coupling / params.n_dipoles as f64;
    let beta = params.beta();
    if beta.is_infinite() {
        return Err(Error::BadTemperature {
            requirement: "> 0",
            value: params.temperature,
        });
    }
    let mut states: Vec<(f64, f64)> = Vec::new(); // (ln zeta - beta E, <S_x>)
    for sector in params.sectors() {
        let mats = spin_matrices(sector);
        let mut h = params.omega0 * &mats.sz;
        for (k, m) in sector.m_values().enumerate() {
            h[(k, k)] += j_over_n * m * m + chi * (m - sigma_x) * (m - sigma_x);
        }
        let (vals, vecs) = linalg::eigh(h, sector.twice_s())?;
        let ln_zeta = sector.ln_multiplicity();
        let m_values: Vec<f64> = sector.m_values().collect();
        for (i, &e) in vals.iter().enumerate() {
            let col = vecs.column(i);
            let sx: f64 = m_values
                .iter()
                .enumerate()
                .map(|(k, &m)| col[k] * col[k] * m)
                .sum();
            states.push((ln_zeta - beta * e, sx));
        }
    }
    let ln_z = log_sum_exp(&states.iter().map(|s| s.0).collect::<Vec<f64>>());
    Ok(states.iter().map(|(lw, sx)| (lw - ln_z).exp() * sx).sum())
}

/// Full double mean-field: the residual quadratic term is decoupled a second
/// time, `(S_x - Sigma_x)^2 -> 2 sigma (S_x - Sigma_x) - sigma^2` with
/// `sigma = <S_x - Sigma_x>`. The joint self-consistency
/// `Sigma_x = <S_x>`, `sigma = <S_x> - Sigma_x` pins `sigma = 0`, so the
/// dipoles see the bare `H_dip` plus a linear field `2 chi sigma = 0`: the
/// cavity drops out entirely. Evaluates the free energy at that fixed point
/// through the same machinery as the single decoupling.
pub fn double_mean_field_fg(params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let chi = params.g * params.g / params.omega_c;
    let aux = 0.0;
    let sigma_x = linear_field_sx_mean(params, 2.0 * chi * aux)?;
    let f_spin = linear_field_free_energy(params, 2.0 * chi * aux)?
        - chi * (2.0 * aux * sigma_x + aux * aux);
    Ok(cavity_free_energy(params) + f_spin
        - cavity_free_energy(params)
        - dipole_free_energy(params))
}

fn linear_field_spectrum(params: &ModelParams, field: f64) -> Vec<(f64, Vec<f64>, DMatrix<f64>)> {
    let j_over_n = params.j_coupling / params.n_dipoles as f64;
    params
        .sectors()
        .into_iter()
        .map(|sector| {
            let mats = spin_matrices(sector);
            let mut h = params.omega0 * &mats.sz;
            for (k, m) in sector.m_values().enumerate() {
                h[(k, k)] += j_over_n * m * m + field * m;
            }
            let (vals, vecs) = linalg::eigh(h, sector.twice_s()).expect("small sector eigh");
            (sector.ln_multiplicity(), vals, vecs)
        })
        .collect()
}

fn linear_field_free_energy(params: &ModelParams, field: f64) -> Result<f64> {
    let beta = params.beta();
    let spectra = linear_field_spectrum(params, field);
    let ground = spectra
        .iter()
        .map(|(_, v, _)| v[0])
        .fold(f64::INFINITY, f64::min);
    if beta.is_infinite() {
        return Ok(ground);
    }
    let terms: Vec<f64> = spectra
        .iter()
        .flat_map(|(lz, vals, _)| vals.iter().map(move |&e| lz - beta * (e - ground)))
        .collect();
    Ok(ground - params.temperature * log_sum_exp(&terms))
}

fn linear_field_sx_mean(params: &ModelParams, field: f64) -> Result<f64> {
    let beta = params.beta();
    if beta.is_infinite() {
        return Err(Error::BadTemperature {
            requirement: "> 0",
            value: params.temperature,
        });
    }
    let spectra = linear_field_spectrum(params, field);
    let mut weights: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for (lz, vals, vecs) in &spectra {
        let dim = vals.len();
        let m_values: Vec<f64> = (0..dim).map(|k| -((dim - 1) as f64) / 2.0 + k as f64).collect();
        for (i, &e) in vals.iter().enumerate() {
            let col = vecs.column(i);
            let sx: f64 = m_values
                .iter()
                .enumerate()
                .map(|(k, &m)| col[k] * col[k] * m)
                .sum();
            weights.push(lz - beta * e);
            values.push(sx);
        }
    }
    let ln_z = log_sum_exp(&weights);
    Ok(weights
        .iter()
        .zip(&values)
        .map(|(lw, sx)| (lw - ln_z).exp() * sx)
        .sum())
}

/// Closed-form `f_g` for non-interacting dipoles,
///
/// ```text
/// f_g = (omega0^2 - omega0 omega_c tanh(beta omega0/2) coth(beta omega_c/2))
///       / (omega0^2 - omega_c^2),
/// ```
///
/// with the resonant `0/0` point `omega0 -> omega_c` handled by a
/// second-order series expansion (switch radius `1e-6 omega_c`) and the
/// `T -> 0` limit `omega0 / (omega0 + omega_c)` taken exactly.
pub fn fg_analytic_j0(omega0: f64, omega_c: f64, temperature: f64) -> f64 {
    let w0 = omega0.abs();
    if temperature == 0.0 {
        return w0 / (w0 + omega_c);
    }
    let beta = 1.0 / temperature;
    if (w0 - omega_c).abs() < 1e-6 * omega_c {
        return fg_resonant_series(w0 - omega_c, omega_c, beta);
    }
    let th = (beta * w0 / 2.0).tanh();
    let coth = 1.0 / (beta * omega_c / 2.0).tanh();
    (w0 * w0 - w0 * omega_c * th * coth) / (w0 * w0 - omega_c * omega_c)
}

/// Series expansion of the `0/0` form around resonance: with
/// `u(w) = w^2 - w omega_c coth(x_c) tanh(beta w / 2)` and `v = w^2 - omega_c^2`,
/// both vanish at `w = omega_c`, so `f = u/v` is expanded to second order in
/// `eps = omega0 - omega_c`.
fn fg_resonant_series(eps: f64, omega_c: f64, beta: f64) -> f64 {
    let x = beta * omega_c / 2.0;
    let coth = 1.0 / x.tanh();
    let t0 = x.tanh();
    let sech2 = {
        let c = x.cosh();
        1.0 / (c * c)
    };
    let t1 = beta / 2.0 * sech2;
    let t2 = -(beta * beta / 2.0) * sech2 * t0;
    let t3 = beta * beta * beta / 2.0 * sech2 * (t0 * t0 - sech2 / 2.0);
    let u1 = 2.0 * omega_c - omega_c * coth * (t0 + omega_c * t1);
    let u2 = 2.0 - omega_c * coth * (2.0 * t1 + omega_c * t2);
    let u3 = -omega_c * coth * (3.0 * t2 + omega_c * t3);
    (u1 + u2 * eps / 2.0 + u3 * eps * eps / 6.0) / (2.0 * omega_c + eps)
}

/// Second-order perturbative coupling correction.
///
/// The spectral route evaluates, over the spin-only eigenbasis,
///
/// ```text
/// F_g2 = (g^2/omega_c) [ <S_x^2>_0
///        - sum_{n,m} w_n |<n|S_x|m>|^2 ((N_th + 1) I(E_nm - omega_c)
///                                        + N_th I(E_nm + omega_c)) ],
/// ```
///
/// which reduces to the closed form at `J = 0`. Bose factors are folded into
/// the exponents so the low-temperature sums stay finite.
pub fn perturbative_fg(params: &ModelParams, method: PerturbationMethod) -> Result<PerturbationResult> {
    params.validate()?;
    let n = params.n_dipoles as f64;
    let (fg, bound) = match method {
        PerturbationMethod::AnalyticJ0 => {
            if params.j_coupling != 0.0 {
                return Err(Error::InvalidParams(
                    "analytic perturbative path requires J = 0".into(),
                ));
            }
            let fg = fg_analytic_j0(params.omega0, params.omega_c, params.temperature);
            // free spins: (Delta S_x)^2 = N/4, so the bound is exactly 1
            (fg, 1.0)
        }
        PerturbationMethod::SpectralJ => spectral_fg(params)?,
    };
    let f_g2 = n * params.g * params.g / (4.0 * params.omega_c) * fg;
    Ok(PerturbationResult {
        f_g2,
        fg_dimensionless: fg,
        method,
        bound,
    })
}

/// Picks the analytic route at `J = 0`, the spectral route otherwise.
pub fn perturbative_fg_auto(params: &ModelParams) -> Result<PerturbationResult> {
    if params.j_coupling == 0.0 {
        perturbative_fg(params, PerturbationMethod::AnalyticJ0)
    } else {
        perturbative_fg(params, PerturbationMethod::SpectralJ)
    }
}

fn spectral_fg(params: &ModelParams) -> Result<(f64, f64)> {
    if params.temperature == 0.0 {
        return Err(Error::BadTemperature {
            requirement: "> 0 (use the analytic path for ground-state values)",
            value: 0.0,
        });
    }
    let ens = DipoleEnsemble::build(*params)?;
    let beta = params.beta();
    let omega_c = params.omega_c;
    let n_th = params.n_th();
    let ln_nth_plus = n_th.ln_1p(); // ln(1 + N_th)
    let ln_nth = ln_bose(beta * omega_c); // ln N_th, stable at low T
    let log_weights = ens.level_log_weights()?;
    let (sx_mean, sx2_mean) = ens.sx_moments()?;

    let mut second_order = 0.0;
    for (sp, lw) in ens.sectors().iter().zip(&log_weights) {
        let dim = sp.eigenvalues.len();
        // S_x in the eigenbasis: V^T diag(m) V
        let mut mx = sp.eigenvectors.clone();
        for (k, m) in sp.sector.m_values().enumerate() {
            for j in 0..dim {
                mx[(k, j)] *= m;
            }
        }
        let sx_eig = sp.eigenvectors.transpose() * mx;
        for i in 0..dim {
            for j in 0..dim {
                let elem2 = sx_eig[(i, j)] * sx_eig[(i, j)];
                if elem2 == 0.0 {
                    continue;
                }
                let e_nm = sp.eigenvalues[i] - sp.eigenvalues[j];
                let term = weighted_exp_double_integral(
                    lw[i] + ln_nth_plus,
                    beta,
                    e_nm - omega_c,
                    omega_c,
                ) + weighted_exp_double_integral(lw[i] + ln_nth, beta, e_nm + omega_c, omega_c);
                second_order += elem2 * term;
            }
        }
    }
    let n = params.n_dipoles as f64;
    let fg = 4.0 / n * (sx2_mean - second_order);
    let variance = sx2_mean - sx_mean * sx_mean;
    Ok((fg, 4.0 * variance / n))
}

/// `ln(1/(e^x - 1))` for `x > 0` without overflow.
fn ln_bose(x: f64) -> f64 {
    -x - (-(-x).exp()).ln_1p()
}

/// Displaced-frame bound `4 (Delta S_x)^2_0 / N` on `f_g`.
pub fn fg_bound(params: &ModelParams) -> Result<f64> {
    let ens = DipoleEnsemble::build(*params)?;
    let (mean, second) = ens.sx_moments()?;
    Ok(4.0 * (second - mean * mean) / params.n_dipoles as f64)
}

/// Low-frequency expansion of the free energy in the polaron frame: the
/// second-order correction in `omega0`,
///
/// ```text
/// F2 = -(omega0~^2 / omega_c) sum_{r,q} sum_pairs
///          [K_rq |<Sz>|^2 + Q_rq |<Sy>|^2] I((q - r) omega_c + E_n - E_m),
/// ```
///
/// where the unperturbed spin state is diagonal in the `sigma_x` basis. The
/// `(r, q)` double series counts emitted/absorbed photons; it is truncated by
/// shells of constant `r + q` once a shell contributes less than `series_tol`
/// in relative terms.
pub fn low_frequency_fg(params: &ModelParams, series_tol: f64) -> Result<f64> {
    params.validate()?;
    if params.temperature == 0.0 {
        return Err(Error::BadTemperature {
            requirement: "> 0",
            value: 0.0,
        });
    }
    const MAX_SHELL: usize = 200;
    let beta = params.beta();
    let omega_c = params.omega_c;
    let n_th = params.n_th();
    let x = (params.g / params.omega_c).powi(2);
    let ln_x = if params.g == 0.0 { f64::NEG_INFINITY } else { x.ln() };
    let ln_nth_plus = n_th.ln_1p();
    let ln_nth = if n_th == 0.0 {
        f64::NEG_INFINITY
    } else {
        ln_bose(beta * omega_c)
    };
    // common prefactor of both photon correlators
    let ln_prefactor = -x * (1.0 + 2.0 * n_th);

    // unperturbed spin state: E_m = (J/N) m^2, transitions m -> m +- 1 with
    // |<Sz>|^2 = |<Sy>|^2 = c^2/4
    let j_over_n = params.j_coupling / params.n_dipoles as f64;
    struct Pair {
        ln_w: f64, // ln(zeta e^{-beta E_n} / Z0)
        delta_spin: f64,
        elem2: f64,
    }
    let mut ln_terms: Vec<f64> = Vec::new();
    let mut sector_data: Vec<(SpinSector, Vec<f64>)> = Vec::new();
    for sector in params.sectors() {
        let energies: Vec<f64> = sector.m_values().map(|m| j_over_n * m * m).collect();
        let ln_zeta = sector.ln_multiplicity();
        for &e in &energies {
            ln_terms.push(ln_zeta - beta * e);
        }
        sector_data.push((sector, energies));
    }
    let ln_z0 = log_sum_exp(&ln_terms);
    let mut pairs: Vec<Pair> = Vec::new();
    for (sector, energies) in &sector_data {
        let s = sector.s();
        let ln_zeta = sector.ln_multiplicity();
        for (k, m) in sector.m_values().enumerate().take(sector.dim() - 1) {
            let c = crate::spin::ladder_element(s, m);
            let elem2 = c * c / 4.0;
            // both orderings of the (m, m+1) pair
            pairs.push(Pair {
                ln_w: ln_zeta - beta * energies[k] - ln_z0,
                delta_spin: energies[k] - energies[k + 1],
                elem2,
            });
            pairs.push(Pair {
                ln_w: ln_zeta - beta * energies[k + 1] - ln_z0,
                delta_spin: energies[k + 1] - energies[k],
                elem2,
            });
        }
    }

    let ln_factorials = crate::math::ln_factorials(MAX_SHELL);
    let mut total = 0.0;
    let mut converged = false;
    let mut last_rel = f64::INFINITY;
    for shell in 0..=MAX_SHELL {
        if params.g == 0.0 && shell > 0 {
            converged = true;
            break;
        }
        let mut shell_sum = 0.0;
        for r in 0..=shell {
            let q = shell - r;
            // K_rq and Q_rq share this magnitude; parity picks Sz vs Sy,
            // whose spin matrix elements coincide in the x basis
            let mut ln_coeff = ln_prefactor - ln_factorials[r] - ln_factorials[q];
            if shell > 0 {
                ln_coeff += shell as f64 * ln_x;
            }
            if r > 0 {
                ln_coeff += r as f64 * ln_nth_plus;
            }
            if q > 0 {
                if ln_nth == f64::NEG_INFINITY {
                    continue;
                }
                ln_coeff += q as f64 * ln_nth;
            }
            let delta_ph = (q as f64 - r as f64) * omega_c;
            for p in &pairs {
                shell_sum += p.elem2
                    * weighted_exp_double_integral(
                        p.ln_w + ln_coeff,
                        beta,
                        delta_ph + p.delta_spin,
                        omega_c,
                    );
            }
        }
        total += shell_sum;
        last_rel = shell_sum.abs() / total.abs().max(f64::MIN_POSITIVE);
        if shell >= 1 && last_rel < series_tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SeriesDivergence {
            max_shell: MAX_SHELL,
            last_rel,
        });
    }
    Ok(-(params.omega0 * params.omega0 / omega_c) * total)
}

/// Default relative shell tolerance for the low-frequency series.
pub const DEFAULT_SERIES_TOL: f64 = 1e-12;

/// Zero-field susceptibility from the low-frequency series,
/// `chi_z = -(2/N) F2 / omega0^2` (exact in the `omega0 -> 0` limit).
pub fn chi_z_series(params: &ModelParams, series_tol: f64) -> Result<f64> {
    let mut p = *params;
    p.omega0 = 1.0;
    let f2 = low_frequency_fg(&p, series_tol)?;
    Ok(-2.0 * f2 / p.n_dipoles as f64)
}

/// Bogoliubov variational bound with the decoupled trial Hamiltonian at a
/// renormalized dipole frequency: the minimizer is the closed form
/// `omega0~ = omega0 exp(-g^2 (1 + 2 N_th) / (2 omega_c^2))` (independent of
/// the dipole-dipole couplings), at which point
/// `F_V = F_c0 + F_dip0(omega0~)`.
pub fn variational(params: &ModelParams) -> Result<VariationalResult> {
    params.validate()?;
    let omega0_tilde = variational_omega0(params);
    let mut trial = *params;
    trial.omega0 = omega0_tilde;
    let f_v = cavity_free_energy(params) + dipole_free_energy(&trial);
    let f_g_v = f_v - cavity_free_energy(params) - dipole_free_energy(params);
    let sigma_z = if params.temperature == 0.0 {
        ground_state_sz(&trial)?
    } else {
        DipoleEnsemble::build(trial)?.sz_mean()?
    };
    Ok(VariationalResult {
        omega0_tilde,
        f_v,
        f_g_v,
        sigma_z,
    })
}

/// `omega0~(g) = omega0 exp(-g^2 (1 + 2 N_th) / (2 omega_c^2))`.
pub fn variational_omega0(params: &ModelParams) -> f64 {
    let r = params.g / params.omega_c;
    params.omega0 * (-0.5 * r * r * (1.0 + 2.0 * params.n_th())).exp()
}

fn ground_state_sz(params: &ModelParams) -> Result<f64> {
    let ens = DipoleEnsemble::build(*params)?;
    let mut best = (f64::INFINITY, 0.0);
    for sp in ens.sectors() {
        if sp.eigenvalues[0] < best.0 {
            let sz = &spin_matrices(sp.sector).sz;
            let v0 = sp.eigenvectors.column(0);
            best = (sp.eigenvalues[0], v0.dot(&(sz * v0)));
        }
    }
    Ok(best.1)
}

/// Spectrum of the effective strong-coupling spin Hamiltonian
///
/// ```text
/// H_eff = omega0 (e^{-g^2/2 omega_c^2} - 1) S_z
///         + (omega0^2 omega_c / 2 g^2)(S_x^2 - S^2)
/// ```
///
/// in one sector (validity `g/omega_c >~ 2`, `omega0 << omega_c`).
pub fn effective_hamiltonian_spectrum(params: &ModelParams, sector: SpinSector) -> Result<Vec<f64>> {
    let h = effective_hamiltonian(params, sector)?;
    Ok(linalg::eigh_values(&h))
}

fn effective_hamiltonian(params: &ModelParams, sector: SpinSector) -> Result<DMatrix<f64>> {
    if params.g == 0.0 {
        return Err(Error::InvalidParams(
            "effective spin Hamiltonian needs g > 0".into(),
        ));
    }
    let mats = spin_matrices(sector);
    let r = params.g / params.omega_c;
    let kappa = (-0.5 * r * r).exp() - 1.0;
    let s = sector.s();
    let quad = params.omega0 * params.omega0 * params.omega_c / (2.0 * params.g * params.g);
    let dim = sector.dim();
    let casimir = DMatrix::<f64>::identity(dim, dim) * (s * (s + 1.0));
    Ok(params.omega0 * kappa * &mats.sz + quad * (&mats.sx2 - casimir))
}

/// `d^2 E_n / d omega0^2` at `omega0 = 0` for every level of the sector:
/// `E_n = omega0 lambda_n + omega0^2 W_nn + O(omega0^3)` with `W` sandwiched
/// in the `S_z` eigenbasis.
pub fn effective_level_curvatures(params: &ModelParams, sector: SpinSector) -> Result<Vec<f64>> {
    if params.g == 0.0 {
        return Err(Error::InvalidParams(
            "effective spin Hamiltonian needs g > 0".into(),
        ));
    }
    let mats = spin_matrices(sector);
    let (_, vecs) = linalg::eigh(mats.sz.clone(), sector.twice_s())?;
    let s = sector.s();
    let dim = sector.dim();
    let casimir = DMatrix::<f64>::identity(dim, dim) * (s * (s + 1.0));
    let w = params.omega_c / (2.0 * params.g * params.g) * (&mats.sx2 - casimir);
    let sandwich = vecs.transpose() * w * vecs;
    Ok((0..dim).map(|k| 2.0 * sandwich[(k, k)]).collect())
}

/// Plateau estimate `-(1/N) sum_n p_n d^2 E_n / d omega0^2` with equal
/// populations `p_n = 2^{-N}`; evaluates to `omega_c / 2 g^2`.
pub fn plateau_estimate(params: &ModelParams) -> Result<f64> {
    let n = params.n_dipoles;
    let mut acc = 0.0;
    for sector in params.sectors() {
        let curvatures = effective_level_curvatures(params, sector)?;
        let zeta = sector.ln_multiplicity().exp();
        acc += zeta * curvatures.iter().sum::<f64>();
    }
    Ok(-acc / (n as f64 * 2f64.powi(n as i32)))
}

/// Dimensionless specific-heat correction `c_g = -T^2 d^2 f_g / dT^2`
/// (non-interacting path), by central differences on the closed-form `f_g`.
pub fn c_g_dimensionless(omega0: f64, omega_c: f64, temperatures: &[f64]) -> Vec<f64> {
    temperatures
        .iter()
        .map(|&t| {
            let dt = 1e-3 * t;
            let f = |tt: f64| fg_analytic_j0(omega0, omega_c, tt);
            let second = (f(t + dt) - 2.0 * f(t) + f(t - dt)) / (dt * dt);
            -t * t * second
        })
        .collect()
}
