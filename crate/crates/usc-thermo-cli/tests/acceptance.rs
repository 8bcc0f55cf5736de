//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line (visible with `--nocapture`). Tolerances are pinned here;
//! run with
//!
//! ```text
//! cargo test -p usc-thermo-cli --test acceptance -- --nocapture
//! ```

use std::time::Instant;

use usc_thermo::approximations::{
    self, fg_bound, lmg_tc_mean_field, perturbative_fg, variational, PerturbationMethod,
};
use usc_thermo::linalg::eigh_values;
use usc_thermo::math::log_sum_exp;
use usc_thermo::polaron::{brute_force_lab_hamiltonian, FockTruncation};
use usc_thermo::radiation::{
    emission_lines, hp_polaritons, hp_power_and_energy, radiated_power, sampled_spectrum,
};
use usc_thermo::thermo::{
    critical_temperature, curie_constant, curie_constant_analytic, zero_field_susceptibility,
};
use usc_thermo::{ModelParams, ThermalEnsemble};
use usc_thermo_cli::grid::parse_grid;
use usc_thermo_cli::sweep::{Method, SweepCommand, SweepSpec};
use usc_thermo_cli::sweep_csv_bytes;

fn params(n: u32, omega0: f64, g: f64, j: f64, t: f64) -> ModelParams {
    ModelParams {
        n_dipoles: n,
        omega0,
        omega_c: 1.0,
        g,
        j_coupling: j,
        temperature: t,
    }
}

fn exact_f_g(p: ModelParams, n_ph: usize) -> f64 {
    ThermalEnsemble::build(p, FockTruncation { n_ph }, false)
        .unwrap()
        .free_energy()
        .f_g
}

fn pass(criterion: &str, detail: String) {
    println!("acceptance {criterion}: pass ({detail})");
}

/// Sector-decomposed partition function vs brute-force full-space
/// diagonalization at the same cutoff, N in {2,3,4}, five (g, J, T) points
/// including g = 2; 1e-9 relative, under a minute.
#[test]
fn criterion_01_sector_oracle_equivalence() {
    let start = Instant::now();
    let trunc = FockTruncation { n_ph: 80 };
    let points = [
        (0.3, 0.0, 0.2),
        (1.0, 0.0, 0.5),
        (2.0, 0.0, 0.3),
        (1.0, -1.5, 0.4),
        (0.5, 1.0, 0.25),
    ];
    let mut worst = 0.0f64;
    for n in [2u32, 3, 4] {
        for &(g, j, t) in &points {
            let p = params(n, 1.0, g, j, t);
            let sector = ThermalEnsemble::build(p, trunc, false).unwrap().log_z();
            let h = brute_force_lab_hamiltonian(p, trunc).unwrap();
            let vals = eigh_values(&h);
            let beta = p.beta();
            let terms: Vec<f64> = vals.iter().map(|&e| -beta * (e - vals[0])).collect();
            let lab = -beta * vals[0] + log_sum_exp(&terms);
            // |Z_sector/Z_lab - 1|
            let rel = (sector - lab).exp_m1().abs();
            worst = worst.max(rel);
            assert!(
                rel < 1e-9,
                "N={n}, g={g}, J={j}, T={t}: relative Z deviation {rel:.3e}"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}, budget 1 min");
    pass(
        "01 sector-oracle-equivalence",
        format!("worst relative Z deviation {worst:.2e} in {elapsed:.1?}"),
    );
}

/// Perturbative regime at N = 20, omega0 = omega_c, J = 0: the exact
/// coupling free energy tracks the second-order result within 2% for
/// G <= 0.3, the correction is non-negative, and the T -> 0 limit matches
/// the closed-form ground-state shift to 1e-10.
#[test]
fn criterion_02_perturbative_regime() {
    let start = Instant::now();
    let n = 20u32;
    let mut worst = 0.0f64;
    for &t in &[0.1, 1.0] {
        for &big_g in &[0.1, 0.2, 0.3] {
            let g = big_g / (n as f64).sqrt();
            let p = params(n, 1.0, g, 0.0, t);
            let exact = exact_f_g(p, 40);
            let pt = perturbative_fg(&p, PerturbationMethod::AnalyticJ0).unwrap();
            assert!(pt.f_g2 >= 0.0, "F_g2 = {} < 0", pt.f_g2);
            let rel = ((exact - pt.f_g2) / pt.f_g2).abs();
            worst = worst.max(rel);
            assert!(
                rel <= 0.02,
                "T={t}, G={big_g}: |F_g - F_g2|/F_g2 = {rel:.4}"
            );
        }
    }
    // ground-state limit against N g^2 omega0 / (4 omega_c (omega0 + omega_c))
    for &(omega0, g) in &[(1.0, 0.05), (0.7, 0.02)] {
        let p = params(n, omega0, g, 0.0, 0.0);
        let pt = perturbative_fg(&p, PerturbationMethod::AnalyticJ0).unwrap();
        let closed = n as f64 * g * g * omega0 / (4.0 * (omega0 + 1.0));
        assert!(
            ((pt.f_g2 - closed) / closed).abs() < 1e-10,
            "T=0: {} vs {closed}",
            pt.f_g2
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 600, "took {elapsed:?}, budget 10 min");
    pass(
        "02 perturbative-regime",
        format!("worst |F_g - F_g2|/F_g2 = {worst:.4} in {elapsed:.1?}"),
    );
}

/// Electrostatic limit: at omega0 = 0 the dynamical mode decouples exactly
/// in the polaron frame, so F_g vanishes for every g and J.
#[test]
fn criterion_03_electrostatic_null() {
    let mut worst = 0.0f64;
    for &g in &[0.5, 1.0, 2.0, 3.0] {
        for &j in &[0.0, -1.5, 1.0] {
            let f_g = exact_f_g(params(6, 0.0, g, j, 0.4), 40);
            worst = worst.max(f_g.abs());
            assert!(f_g.abs() < 1e-9, "g={g}, J={j}: F_g = {f_g:.3e}");
        }
    }
    pass(
        "03 electrostatic-null",
        format!("worst |F_g| = {worst:.2e}"),
    );
}

/// Curie law, its coupling-induced renormalization, the strong-coupling
/// plateau, and the low-frequency series route to chi_z.
#[test]
fn criterion_04_curie_law_and_plateau() {
    let n = 20u32;
    let trunc = FockTruncation { n_ph: 40 };
    // (a) bare Curie law chi_z T = 1/4 within 0.5%
    let mut worst_a = 0.0f64;
    for &t in &[0.05, 0.2, 0.7, 2.0] {
        let chi = zero_field_susceptibility(params(n, 1.0, 0.0, 0.0, t), trunc, 1e-3).unwrap();
        let dev = (chi * t / 0.25 - 1.0).abs();
        worst_a = worst_a.max(dev);
        assert!(dev < 5e-3, "T={t}: chi T = {}", chi * t);
    }
    // (b) Curie coefficient alpha_C(g) vs (1/4) e^{-g^2} within 5% at low T
    let mut worst_b = 0.0f64;
    for &g in &[0.5, 1.0, 2.0] {
        let extracted = curie_constant(params(n, 1.0, g, 0.0, 0.02), trunc, (0.01, 0.04)).unwrap();
        let analytic = 0.25 * (-g * g).exp();
        let dev = ((extracted - analytic) / analytic).abs();
        worst_b = worst_b.max(dev);
        assert!(dev < 0.05, "g={g}: alpha_C = {extracted} vs {analytic}");
    }
    // (c) plateau at g = 2: chi_z minus the Curie term within 20% of 1/(2g^2)
    let t_plateau = 0.2;
    let p = params(n, 1.0, 2.0, 0.0, t_plateau);
    let chi = zero_field_susceptibility(p, trunc, 1e-3).unwrap();
    let plateau = chi - curie_constant_analytic(&p) / t_plateau;
    let dev_c = (plateau / 0.125 - 1.0).abs();
    assert!(dev_c < 0.20, "plateau {plateau} vs 0.125");
    // (d) low-frequency series chi_z vs finite differences within 1%
    let mut worst_d = 0.0f64;
    for &g in &[0.5, 2.0] {
        for &t in &[0.1, 1.0] {
            let p = params(n, 1.0, g, 0.0, t);
            let series = approximations::chi_z_series(&p, 1e-12).unwrap();
            let fd = zero_field_susceptibility(p, trunc, 1e-3).unwrap();
            let dev = ((series - fd) / fd).abs();
            worst_d = worst_d.max(dev);
            assert!(dev < 0.01, "g={g}, T={t}: series {series} vs FD {fd}");
        }
    }
    pass(
        "04 curie-law-and-plateau",
        format!(
            "Curie dev {worst_a:.2e}, alpha_C dev {worst_b:.3}, plateau dev {dev_c:.3}, series dev {worst_d:.2e}"
        ),
    );
}

/// Bogoliubov sandwich: F <= F_V on a 5x5x3 (g, T, J) grid at N = 12; the
/// renormalized frequency formula is exact at machine precision.
#[test]
fn criterion_05_variational_sandwich() {
    let n = 12u32;
    let mut min_gap = f64::INFINITY;
    for &g in &[0.2, 0.6, 1.0, 1.5, 2.0] {
        for &t in &[0.1, 0.3, 0.6, 1.0, 1.5] {
            for &j in &[-1.5, 0.0, 1.0] {
                let p = params(n, 1.0, g, j, t);
                let exact = ThermalEnsemble::build(p, FockTruncation { n_ph: 40 }, false)
                    .unwrap()
                    .free_energy()
                    .f_total;
                let bound = variational(&p).unwrap().f_v;
                min_gap = min_gap.min(bound - exact);
                assert!(
                    exact <= bound + 1e-9 * exact.abs(),
                    "g={g}, T={t}, J={j}: F = {exact} > F_V = {bound}"
                );
            }
        }
    }
    // omega0~ closed form at machine precision
    let p = params(n, 0.8, 1.0, -0.5, 0.5);
    let expected = 0.8 * (-0.5 * (1.0 + 2.0 * p.n_th())).exp();
    let got = approximations::variational_omega0(&p);
    assert!(
        (got - expected).abs() <= f64::EPSILON * expected,
        "{got} vs {expected}"
    );
    pass(
        "05 variational-sandwich",
        format!("75/75 points bounded, smallest F_V - F gap {min_gap:.2e}"),
    );
}

/// Ferroelectric boundary: the bimodality criterion tracks the mean-field
/// relation within 5% at N = 20; the omega0 -> 0 limit recovers the
/// classical Ising temperature; T_c grows monotonically with g.
#[test]
fn criterion_06_phase_boundary() {
    // photons decouple at g = 0: p(m_x) is exact at any cutoff
    let tiny = FockTruncation { n_ph: 2 };
    // (a) against tanh(omega0/2T_c) = -omega0/J_c for J in [-3, -1.2]
    let mut worst_a = 0.0f64;
    for &j in &[-3.0, -2.55, -2.1, -1.65, -1.2] {
        let t_mf = lmg_tc_mean_field(1.0, j).unwrap();
        let p = params(20, 1.0, 0.0, j, 0.5);
        let tc = critical_temperature(p, tiny, (0.55 * t_mf, 1.6 * t_mf)).unwrap();
        let dev = ((tc - t_mf) / t_mf).abs();
        worst_a = worst_a.max(dev);
        assert!(dev < 0.05, "J={j}: T_c {tc} vs mean-field {t_mf}");
    }
    // (b) omega0 -> 0: T_c -> -J/2. The bimodality estimator carries a
    // finite-size bias T_c(N) = -J / (N ln(1 + 2/N)); at N = 20 that is a
    // provable +4.9%, so the 2% check runs at N = 64 where the bias has
    // decayed. The N = 20 value must match the closed-form bias instead.
    let j = -1.5f64;
    let tc_20 = critical_temperature(params(20, 1e-3, 0.0, j, 0.5), tiny, (0.5, 1.1)).unwrap();
    let bias_20 = -j / (20.0 * (1.0 + 2.0 / 20.0_f64).ln());
    assert!(
        ((tc_20 - bias_20) / bias_20).abs() < 5e-3,
        "N=20 Ising-limit T_c {tc_20} vs finite-size form {bias_20}"
    );
    let tc_64 = critical_temperature(params(64, 1e-3, 0.0, j, 0.5), tiny, (0.5, 1.1)).unwrap();
    let dev_b = ((tc_64 - 0.75) / 0.75).abs();
    assert!(dev_b < 0.02, "N=64 Ising-limit T_c {tc_64} vs 0.75");
    // (c) T_c(g) monotonically increasing for g in [1, 2] at J = -1.5
    let trunc = FockTruncation { n_ph: 40 };
    let mut previous = 0.0;
    let mut tcs = Vec::new();
    for &g in &[1.0, 1.5, 2.0] {
        let tc = critical_temperature(params(20, 1.0, g, j, 0.5), trunc, (0.4, 1.2)).unwrap();
        assert!(tc > previous, "T_c(g={g}) = {tc} did not increase");
        previous = tc;
        tcs.push(tc);
    }
    pass(
        "06 phase-boundary",
        format!(
            "mean-field dev <= {worst_a:.3}; Ising limit dev {dev_b:.3} at N=64; T_c(g) = {tcs:.3?}"
        ),
    );
}

/// Heat capacity: the variance identity agrees with -T d^2F/dT^2, the
/// coupling part vanishes at g = 0, and its maximum over g stays of order
/// unity per dipole at N_ph = 100.
#[test]
fn criterion_07_heat_capacity() {
    // (a) variance formula vs temperature finite differences
    let p = params(6, 1.0, 1.0, 0.0, 0.5);
    let trunc = FockTruncation { n_ph: 60 };
    let c_var = ThermalEnsemble::build(p, trunc, false)
        .unwrap()
        .heat_capacity()
        .unwrap()
        .total;
    let f_at = |t: f64| {
        let mut q = p;
        q.temperature = t;
        ThermalEnsemble::build(q, trunc, false)
            .unwrap()
            .free_energy()
            .f_total
    };
    let dt = 3e-3 * p.temperature;
    let c_fd = -p.temperature
        * (f_at(p.temperature + dt) - 2.0 * f_at(p.temperature) + f_at(p.temperature - dt))
        / (dt * dt);
    let dev_a = ((c_var - c_fd) / c_fd).abs();
    assert!(dev_a < 1e-5, "variance {c_var} vs FD {c_fd} (dev {dev_a:.2e})");
    // (b) C_g = 0 at g = 0
    let hc0 = ThermalEnsemble::build(params(8, 0.5, 0.0, 0.0, 0.5), trunc, false)
        .unwrap()
        .heat_capacity()
        .unwrap();
    assert!(hc0.coupling.abs() < 1e-9, "C_g(g=0) = {}", hc0.coupling);
    // (c) max_g |C_g|/N within [0.05, 2] for N in {10, 20}, omega0 = 0.5
    let trunc_big = FockTruncation { n_ph: 100 };
    let mut maxima = Vec::new();
    for &n in &[10u32, 20] {
        let mut max_abs = 0.0f64;
        for &g in &[0.5, 1.0, 1.5, 2.0] {
            let hc = ThermalEnsemble::build(params(n, 0.5, g, 0.0, 0.5), trunc_big, false)
                .unwrap()
                .heat_capacity()
                .unwrap();
            max_abs = max_abs.max((hc.coupling / n as f64).abs());
        }
        assert!(
            (0.05..=2.0).contains(&max_abs),
            "N={n}: max |C_g|/N = {max_abs}"
        );
        maxima.push(max_abs);
    }
    pass(
        "07 heat-capacity",
        format!("FD dev {dev_a:.2e}; max |C_g|/N = {maxima:.3?}"),
    );
}

/// Emission spectra at N = 6, J = 0, gamma = 0.04: polariton doublet,
/// spectral collapse, exact bare-cavity power, the Holstein-Primakoff power
/// ratio and the spectrum/power integral identity.
#[test]
fn criterion_08_spectrum() {
    let start = Instant::now();
    let n = 6u32;
    let gamma = 0.04;
    // (a) small-G doublet within gamma/2 of the polariton frequencies
    let big_g = 0.2;
    let p = params(n, 1.0, big_g / (n as f64).sqrt(), 0.0, 0.2);
    let ens = ThermalEnsemble::build(p, FockTruncation { n_ph: 40 }, true).unwrap();
    let lines = emission_lines(&ens, 1.0, gamma).unwrap();
    let grid: Vec<f64> = (0..=600).map(|k| 0.7 + k as f64 * 0.001).collect();
    let values = sampled_spectrum(&lines, &grid);
    let peaks: Vec<f64> = (1..grid.len() - 1)
        .filter(|&k| values[k] > values[k - 1] && values[k] > values[k + 1])
        .map(|k| grid[k])
        .collect();
    let hp = hp_polaritons(&p).unwrap();
    assert!(peaks.len() >= 2, "expected a doublet, found peaks at {peaks:?}");
    let near = |target: f64| peaks.iter().any(|&w| (w - target).abs() < gamma / 2.0);
    assert!(near(hp.omega_minus) && near(hp.omega_plus), "peaks {peaks:?}");
    // (b) spectral collapse at g = 3: >= 80% of the integrated weight within
    // 3 gamma of omega_c
    let p_collapse = params(n, 1.0, 3.0, 0.0, 0.5);
    let ens_collapse = ThermalEnsemble::build(p_collapse, FockTruncation { n_ph: 60 }, true).unwrap();
    let lines_collapse = emission_lines(&ens_collapse, 1.0, gamma).unwrap();
    let collapse_fraction = {
        let max_omega = lines_collapse.lines.last().unwrap().omega + 80.0 * gamma;
        let step = gamma / 20.0;
        let count = (max_omega / step).ceil() as usize;
        let grid: Vec<f64> = (0..=count).map(|k| k as f64 * step).collect();
        let s = sampled_spectrum(&lines_collapse, &grid);
        let integral = |lo: f64, hi: f64| -> f64 {
            grid.iter()
                .zip(&s)
                .filter(|(&w, _)| w >= lo && w <= hi)
                .map(|(_, &v)| v)
                .sum::<f64>()
                * step
        };
        integral(1.0 - 3.0 * gamma, 1.0 + 3.0 * gamma) / integral(0.0, max_omega)
    };
    assert!(collapse_fraction >= 0.80, "collapse fraction {collapse_fraction}");
    // (c) bare-cavity power P_rad = omega_c kappa N_th to 1e-10
    let p0 = params(n, 1.0, 0.0, 0.0, 0.5);
    let ens0 = ThermalEnsemble::build(p0, FockTruncation { n_ph: 60 }, true).unwrap();
    let power0 = radiated_power(&emission_lines(&ens0, 1.0, gamma).unwrap());
    let dev_c = ((power0.p_rad - p0.n_th()) / p0.n_th()).abs();
    assert!(dev_c < 1e-10, "P_rad(g=0) dev {dev_c:.2e}");
    // (d) Holstein-Primakoff power ratio within 10% for G <= 0.5 at T = 0.5
    let mut worst_d = 0.0f64;
    for &big_g in &[0.1, 0.2, 0.3, 0.4, 0.5] {
        let p = params(n, 1.0, big_g / (n as f64).sqrt(), 0.0, 0.5);
        let hp = hp_polaritons(&p).unwrap();
        let hp_ratio = hp_power_and_energy(&hp, 0.5, false).unwrap().power_ratio;
        let ens = ThermalEnsemble::build(p, FockTruncation { n_ph: 40 }, true).unwrap();
        let exact = radiated_power(&emission_lines(&ens, 1.0, gamma).unwrap())
            .ratio
            .unwrap();
        let dev = ((hp_ratio - exact) / exact).abs();
        worst_d = worst_d.max(dev);
        assert!(dev < 0.10, "G={big_g}: HP {hp_ratio} vs exact {exact}");
    }
    // (e) grid-integrated spectrum equals P_rad within 1%
    let p_e = params(n, 1.0, 0.4 / (n as f64).sqrt(), 0.0, 0.5);
    let ens_e = ThermalEnsemble::build(p_e, FockTruncation { n_ph: 40 }, true).unwrap();
    let lines_e = emission_lines(&ens_e, 1.0, gamma).unwrap();
    let power_e = radiated_power(&lines_e).p_rad;
    let lo = (lines_e.lines.first().unwrap().omega - 80.0 * gamma).max(0.0);
    let hi = lines_e.lines.last().unwrap().omega + 80.0 * gamma;
    let steps = ((hi - lo) / (gamma / 20.0)).ceil() as usize;
    let grid_e: Vec<f64> = (0..=steps)
        .map(|k| lo + (hi - lo) * k as f64 / steps as f64)
        .collect();
    let s_e = sampled_spectrum(&lines_e, &grid_e);
    let h = (hi - lo) / steps as f64;
    let integral: f64 = s_e
        .iter()
        .enumerate()
        .map(|(k, &v)| if k == 0 || k == steps { 0.5 * v } else { v })
        .sum::<f64>()
        * h;
    let dev_e = ((integral - power_e) / power_e).abs();
    assert!(dev_e < 0.01, "integral {integral} vs P_rad {power_e}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 900, "took {elapsed:?}, budget 15 min");
    pass(
        "08 spectrum",
        format!(
            "doublet ok, collapse fraction {collapse_fraction:.3}, P_rad dev {dev_c:.1e}, HP dev {worst_d:.3}, integral dev {dev_e:.4} in {elapsed:.1?}"
        ),
    );
}

/// Bounds and scaling: f_g below its displaced-frame bound everywhere,
/// f_g < 1 in the symmetric ferroelectric case, and the exact 1/N scaling of
/// the perturbative correction per dipole at fixed collective coupling.
#[test]
fn criterion_09_bounds_and_scaling() {
    // (a) f_g < 4 (Delta S_x)^2_0 / N on the variational acceptance grid
    let mut checked = 0;
    for &g in &[0.2, 0.6, 1.0, 1.5, 2.0] {
        for &t in &[0.1, 0.3, 0.6, 1.0, 1.5] {
            for &j in &[-1.5, 0.0, 1.0] {
                let p = params(12, 1.0, g, j, t);
                let f_g = exact_f_g(p, 40);
                let fg_dim = 4.0 * f_g / (12.0 * g * g);
                let bound = fg_bound(&p).unwrap();
                assert!(
                    fg_dim >= -1e-9 && fg_dim < bound,
                    "g={g}, T={t}, J={j}: f_g = {fg_dim} vs bound {bound}"
                );
                checked += 1;
            }
        }
    }
    // (b) f_g < 1 in the symmetric LMG ferroelectric case
    let mut worst_b = 0.0f64;
    for &g in &[0.5, 1.0, 2.0] {
        for &t in &[0.2, 0.6, 1.0] {
            let p = params(20, 1.0, g, -1.5, t);
            let fg_dim = 4.0 * exact_f_g(p, 40) / (20.0 * g * g);
            worst_b = worst_b.max(fg_dim);
            assert!(fg_dim < 1.0, "g={g}, T={t}: f_g = {fg_dim}");
        }
    }
    // (c) F_g2/N halves when N doubles at fixed G (exact 1/N on the
    // analytic path)
    let big_g = 0.5;
    for &t in &[0.2, 1.0] {
        let f = |n: u32| {
            let g = big_g / (n as f64).sqrt();
            perturbative_fg(&params(n, 1.0, g, 0.0, t), PerturbationMethod::AnalyticJ0)
                .unwrap()
                .f_g2
                / n as f64
        };
        let ratio = f(10) / f(20);
        assert!((ratio - 2.0).abs() < 1e-12, "T={t}: per-dipole ratio {ratio}");
    }
    pass(
        "09 bounds-and-scaling",
        format!("{checked} grid points bounded; ferroelectric max f_g = {worst_b:.3}"),
    );
}

/// Two runs of the perturbative-regime sweep with 1 and 8 workers produce
/// bitwise-identical CSV output.
#[test]
fn criterion_10_determinism() {
    let spec = SweepSpec {
        command: SweepCommand::FreeEnergy,
        n: vec![20],
        omega0: vec![1.0],
        j: vec![0.0],
        t: vec![0.1],
        g: parse_grid("0:0.02:1").unwrap(),
        g_is_collective: false,
        omega_c: 1.0,
        n_ph: None,
        methods: vec![
            Method::Exact,
            Method::Perturbative,
            Method::MeanField,
            Method::Variational,
        ],
        kappa: 1.0,
        gamma: 0.04,
        chi_step: 1e-3,
        series_tol: 1e-12,
        t_bracket: (0.05, 2.0),
        omega_grid: None,
        include_offset: false,
    };
    let (serial, failed_serial) = sweep_csv_bytes(&spec, 1).unwrap();
    let (parallel, failed_parallel) = sweep_csv_bytes(&spec, 8).unwrap();
    assert_eq!(failed_serial, 0);
    assert_eq!(failed_parallel, 0);
    assert_eq!(serial, parallel, "CSV bytes differ between 1 and 8 workers");
    pass(
        "10 determinism",
        format!("{} identical bytes across worker counts", serial.len()),
    );
}
