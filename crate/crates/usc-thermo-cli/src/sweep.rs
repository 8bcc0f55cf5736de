//! The sweep engine: evaluates a grid of model parameters in parallel and
//! assembles rows in lexicographic grid order, independent of scheduling, so
//! output files are bitwise reproducible for any worker count.

use anyhow::{bail, Result};
use rayon::prelude::*;

use usc_thermo::approximations::{self, cavity_mean_field_fg, chi_z_series};
use usc_thermo::polaron::{default_cutoff, FockTruncation};
use usc_thermo::radiation::{
    em_energy, emission_lines, hp_polaritons, hp_power_and_energy, radiated_power,
    sampled_spectrum,
};
use usc_thermo::thermo::{
    classify_phase, critical_temperature, curie_constant_analytic, zero_field_susceptibility,
    Observable, Phase,
};
use usc_thermo::{ModelParams, ThermalEnsemble};

use crate::rows::{Cell, Row};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepCommand {
    FreeEnergy,
    Susceptibility,
    HeatCapacity,
    PhaseDiagram,
    CriticalTemperature,
    Spectrum,
    Power,
    HpCompare,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    MeanField,
    Perturbative,
    Variational,
    LowFrequency,
    Effective,
}

impl Method {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "exact" => Method::Exact,
            "mean-field" => Method::MeanField,
            "perturbative" => Method::Perturbative,
            "variational" => Method::Variational,
            "low-frequency" => Method::LowFrequency,
            "effective" => Method::Effective,
            other => bail!("unknown method {other:?}"),
        })
    }
}

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub command: SweepCommand,
    pub n: Vec<u32>,
    pub omega0: Vec<f64>,
    pub j: Vec<f64>,
    pub t: Vec<f64>,
    pub g: Vec<f64>,
    /// When set, `g` holds collective couplings `G` and the per-point
    /// single-dipole coupling is `G / sqrt(N)`.
    pub g_is_collective: bool,
    pub omega_c: f64,
    /// `None` applies the cutoff heuristic at the largest grid temperature.
    pub n_ph: Option<usize>,
    pub methods: Vec<Method>,
    pub kappa: f64,
    pub gamma: f64,
    pub chi_step: f64,
    pub series_tol: f64,
    pub t_bracket: (f64, f64),
    pub omega_grid: Option<Vec<f64>>,
    pub include_offset: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, grid) in [("omega0", &self.omega0), ("J", &self.j), ("T", &self.t), ("g", &self.g)]
        {
            if grid.is_empty() {
                bail!("empty {name} grid");
            }
        }
        if self.n.is_empty() {
            bail!("empty N grid");
        }
        if self.methods.is_empty() {
            bail!("methods must be non-empty");
        }
        let allowed: &[Method] = match self.command {
            SweepCommand::FreeEnergy => &[
                Method::Exact,
                Method::MeanField,
                Method::Perturbative,
                Method::Variational,
                Method::LowFrequency,
            ],
            SweepCommand::Susceptibility => &[
                Method::Exact,
                Method::LowFrequency,
                Method::Variational,
                Method::Effective,
            ],
            SweepCommand::HeatCapacity => &[Method::Exact, Method::Perturbative],
            SweepCommand::PhaseDiagram | SweepCommand::CriticalTemperature => {
                &[Method::Exact, Method::MeanField]
            }
            SweepCommand::Spectrum | SweepCommand::Power | SweepCommand::HpCompare => {
                &[Method::Exact]
            }
        };
        for m in &self.methods {
            if !allowed.contains(m) {
                bail!("method {m:?} is not available for {:?}", self.command);
            }
        }
        Ok(())
    }

    fn truncation(&self) -> FockTruncation {
        match self.n_ph {
            Some(n_ph) => FockTruncation { n_ph },
            None => {
                let t_max = self.t.iter().cloned().fold(0.0, f64::max);
                default_cutoff(t_max, self.omega_c)
            }
        }
    }

    fn has(&self, m: Method) -> bool {
        self.methods.contains(&m)
    }
}

pub struct SweepOutcome {
    pub rows: Vec<Row>,
    pub meta: String,
    pub failed_points: usize,
}

/// Evaluates the whole grid. Points are independent; the iteration order
/// (n, omega0, J, T, g) is the row order regardless of how rayon schedules
/// the work.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutcome> {
    spec.validate()?;
    let trunc = spec.truncation();
    let mut points = Vec::new();
    for &n in &spec.n {
        for &omega0 in &spec.omega0 {
            for &j in &spec.j {
                for &t in &spec.t {
                    for &g in &spec.g {
                        let g_single = if spec.g_is_collective {
                            g / (n as f64).sqrt()
                        } else {
                            g
                        };
                        points.push(ModelParams {
                            n_dipoles: n,
                            omega0,
                            omega_c: spec.omega_c,
                            g: g_single,
                            j_coupling: j,
                            temperature: t,
                        });
                    }
                }
            }
        }
    }
    let results: Vec<Vec<Row>> = points
        .par_iter()
        .map(|&p| evaluate_point(spec, p, trunc))
        .collect();
    let mut rows = Vec::new();
    let mut failed = 0;
    for point_rows in results {
        for row in point_rows {
            if !matches!(row.get("error"), Some(Cell::Empty)) {
                failed += 1;
            }
            rows.push(row);
        }
    }
    let meta = format!(
        "usc-thermo {:?}; units: hbar = k_B = 1, frequencies/energies/temperatures in units of omega_c = {}; n_ph = {}",
        spec.command, spec.omega_c, trunc.n_ph
    );
    Ok(SweepOutcome {
        rows,
        meta,
        failed_points: failed,
    })
}

struct RowBuilder {
    cells: Vec<(&'static str, Cell)>,
    errors: Vec<String>,
}

impl RowBuilder {
    fn new(p: ModelParams) -> Self {
        Self {
            cells: vec![
                ("n", Cell::Int(p.n_dipoles as i64)),
                ("omega0", Cell::Float(p.omega0)),
                ("omega_c", Cell::Float(p.omega_c)),
                ("j", Cell::Float(p.j_coupling)),
                ("t", Cell::Float(p.temperature)),
                ("g", Cell::Float(p.g)),
                ("big_g", Cell::Float(p.collective_coupling())),
            ],
            errors: Vec::new(),
        }
    }

    /// NaN never reaches a committed row; it becomes an error entry instead.
    fn push(&mut self, column: &'static str, value: std::result::Result<f64, String>) {
        match value {
            Ok(v) if v.is_nan() => {
                self.errors.push(format!("{column}: NaN"));
                self.cells.push((column, Cell::Empty));
            }
            Ok(v) => self.cells.push((column, Cell::Float(v))),
            Err(e) => {
                self.errors.push(format!("{column}: {e}"));
                self.cells.push((column, Cell::Empty));
            }
        }
    }

    fn push_text(&mut self, column: &'static str, value: std::result::Result<String, String>) {
        match value {
            Ok(v) => self.cells.push((column, Cell::Text(v))),
            Err(e) => {
                self.errors.push(format!("{column}: {e}"));
                self.cells.push((column, Cell::Empty));
            }
        }
    }

    fn finish(mut self, n_ph: usize, residual: Option<f64>) -> Row {
        self.cells.push(("n_ph", Cell::Int(n_ph as i64)));
        self.cells.push((
            "residual",
            residual.map_or(Cell::Empty, Cell::Float),
        ));
        self.cells.push((
            "error",
            if self.errors.is_empty() {
                Cell::Empty
            } else {
                Cell::Text(self.errors.join("; "))
            },
        ));
        Row { cells: self.cells }
    }
}

fn err_str<T>(r: usc_thermo::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn evaluate_point(spec: &SweepSpec, p: ModelParams, trunc: FockTruncation) -> Vec<Row> {
    match spec.command {
        SweepCommand::FreeEnergy => vec![free_energy_row(spec, p, trunc)],
        SweepCommand::Susceptibility => vec![susceptibility_row(spec, p, trunc)],
        SweepCommand::HeatCapacity => vec![heat_capacity_row(spec, p, trunc)],
        SweepCommand::PhaseDiagram => vec![phase_diagram_row(spec, p, trunc)],
        SweepCommand::CriticalTemperature => vec![critical_temperature_row(spec, p, trunc)],
        SweepCommand::Spectrum => spectrum_rows(spec, p, trunc),
        SweepCommand::Power => vec![power_row(spec, p, trunc)],
        SweepCommand::HpCompare => vec![hp_compare_row(spec, p, trunc)],
    }
}

fn free_energy_row(spec: &SweepSpec, p: ModelParams, trunc: FockTruncation) -> Row {
    let mut row = RowBuilder::new(p);
    if spec.has(Method::Exact) {
        match err_str(ThermalEnsemble::build(p, trunc, false)) {
            Ok(ens) => {
                let report = ens.free_energy();
                row.push("f_exact", Ok(report.f_total));
                row.push("f_g_exact", Ok(report.f_g));
            }
            Err(e) => {
                row.push("f_exact", Err(e.clone()));
                row.push("f_g_exact", Err(e));
            }
        }
    }
    if spec.has(Method::Perturbative) {
        row.push(
            "f_g_2",
            err_str(approximations::perturbative_fg_auto(&p)).map(|r| r.f_g2),
        );
    }
    if spec.has(Method::MeanField) {
        row.push("f_g_mf", err_str(cavity_mean_field_fg(&p)).map(|s| s.f_g_mf));
    }
    if spec.has(Method::Variational) {
        row.push(
            "f_g_v",
            err_str(approximations::variational(&p)).map(|v| v.f_g_v),
        );
    }
    if spec.has(Method::LowFrequency) {
        row.push(
            "f_g_lowfreq",
            err_str(approximations::low_frequency_fg(&p, spec.series_tol)),
        );
    }
    row.finish(trunc.n_ph, None)
}

fn susceptibility_row(spec: &SweepSpec, p: ModelParams, trunc: FockTruncation) -> Row {
    let mut row = RowBuilder::new(p);
    if spec.has(Method::Exact) {
        row.push(
            "chi_z",
            err_str(zero_field_susceptibility(p, trunc, spec.chi_step)),
        );
    }
    if spec.has(Method::LowFrequency) {
        row.push("chi_series", err_str(chi_z_series(&p, spec.series_tol)));
    }
    if spec.has(Method::Variational) {
        let alpha = curie_constant_analytic(&p);
        row.push("chi_curie", Ok(alpha / p.temperature));
    }
    if spec.has(Method::Effective) {
        let value = err_str(approximations::plateau_estimate(&p))
            .map(|plateau| curie_constant_analytic(&p) / p.temperature + plateau);
        row.push("chi_plateau", value);
    }
    row.finish(trunc.n_ph, None)
}

fn heat_capacity_row(spec: &SweepSpec, p: ModelParams, trunc: FockTruncation) -> Row {
    let mut row = RowBuilder::new(p);
    if spec.has(Method::Exact) {
        match err_str(ThermalEnsemble::build(p, trunc, false)).and_then(|e| err_str(e.heat_capacity()))
        {
            Ok(hc) => {
                row.push("c_total", Ok(hc.total));
                row.push("c_cavity0", Ok(hc.cavity0));
                row.push("c_dip0", Ok(hc.dipole0));
                row.push("c_g", Ok(hc.coupling));
            }
            Err(e) => {
                for col in ["c_total", "c_cavity0", "c_dip0", "c_g"] {
                    row.push(col, Err(e.clone()));
                }
            }
        }
    }
    if spec.has(Method::Perturbative) {
        let value = if p.j_coupling == 0.0 {
            let cg = approximations::c_g_dimensionless(p.omega0, p.omega_c, &[p.temperature])[0];
            Ok(p.n_dipoles as f64 * p.g * p.g / (4.0 * p.omega_c * p.temperature) * cg)
        } else {
            Err("perturbative heat capacity requires J = 0".to_string())
        };
        row.push("c_g_2", value);
    }
    row.finish(trunc.n_ph, None)
}

fn phase_diagram_row(spec: &SweepSpec, p: ModelParams, trunc: FockTruncation) -> Row {
    let mut row = RowBuilder::new(p);
    let mut residual = None;
    if spec.has(Method::Exact) {
        match err_str(ThermalEnsemble::build(p, trunc, true)) {
            Ok(ens) => {
                residual = ens.max_ground_residual();
                row.push(
                    "m_bar",
                    err_str(ens.expectation(Observable::Sx2)).map(f64::sqrt),
                );
                let phase = err_str(ens.mx_distribution()).map(|dist| {
                    match classify_phase(&dist) {
                        Phase::Bimodal => "bimodal".to_string(),
                        Phase::Unimodal => "unimodal".to_string(),
                    }
                });
                row.push_text("phase", phase);
            }
            Err(e) => {
                row.push("m_bar", Err(e.clone()));
                row.push_text("phase", Err(e));
            }
        }
    }
    if spec.has(Method::MeanField) {
        let tc = approximations::lmg_tc_mean_field_modified(&p, 10.0 * p.omega_c);
        row.push(
            "t_c_mf",
            tc.ok_or_else(|| "no mean-field transition".to_string()),
        );
    }
    row.finish(trunc.n_ph, residual)
}

fn critical_temperature_row(spec: &SweepSpec, p: ModelParams, trunc: FockTruncation) -> Row {
    let mut row = RowBuilder::new(p);
    if spec.has(Method::Exact) {
        row.push(
            "t_c",
            err_str(critical_temperature(p, trunc, spec.t_bracket)),
        );
    }
    if spec.has(Method::MeanField) {
        let tc = approximations::lmg_tc_mean_field_modified(&p, 10.0 * p.omega_c);
        row.push(
            "t_c_mf",
            tc.ok_or_else(|| "no mean-field transition".to_string()),
        );
    }
    row.finish(trunc.n_ph, None)
}

fn spectrum_rows(spec: &SweepSpec, p: ModelParams, trunc: FockTruncation) -> Vec<Row> {
    let grid: Vec<f64> = spec.omega_grid.clone().unwrap_or_else(|| {
        let step = spec.gamma / 4.0;
        let max = 3.0 * p.omega_c;
        let count = (max / step).ceil() as usize;
        (0..=count).map(|k| k as f64 * step).collect()
    });
    let built = err_str(ThermalEnsemble::build(p, trunc, true)).and_then(|ens| {
        let residual = ens.max_ground_residual();
        err_str(emission_lines(&ens, spec.kappa, spec.gamma)).map(|l| (l, residual))
    });
    match built {
        Ok((lines, residual)) => {
            let values = sampled_spectrum(&lines, &grid);
            grid.iter()
                .zip(values)
                .map(|(&omega, s)| {
                    let mut row = RowBuilder::new(p);
                    row.push("omega", Ok(omega));
                    row.push("s_bb_over_kappa", Ok(s / spec.kappa));
                    row.finish(trunc.n_ph, residual)
                })
                .collect()
        }
        Err(e) => {
            let mut row = RowBuilder::new(p);
            row.push("omega", Err(e.clone()));
            row.push("s_bb_over_kappa", Err(e));
            vec![row.finish(trunc.n_ph, None)]
        }
    }
}

fn power_row(spec: &SweepSpec, p: ModelParams, trunc: FockTruncation) -> Row {
    let mut row = RowBuilder::new(p);
    let mut residual = None;
    match err_str(ThermalEnsemble::build(p, trunc, true)) {
        Ok(ens) => {
            residual = ens.max_ground_residual();
            match err_str(emission_lines(&ens, spec.kappa, spec.gamma)) {
                Ok(lines) => {
                    let power = radiated_power(&lines);
                    row.push("p_rad", Ok(power.p_rad));
                    row.push(
                        "p_ratio",
                        power.ratio.ok_or_else(|| "N_th = 0; ratio undefined".to_string()),
                    );
                }
                Err(e) => {
                    row.push("p_rad", Err(e.clone()));
                    row.push("p_ratio", Err(e));
                }
            }
            row.push(
                "em_energy",
                err_str(em_energy(&ens, spec.include_offset)),
            );
        }
        Err(e) => {
            for col in ["p_rad", "p_ratio", "em_energy"] {
                row.push(col, Err(e.clone()));
            }
        }
    }
    row.finish(trunc.n_ph, residual)
}

fn hp_compare_row(spec: &SweepSpec, p: ModelParams, trunc: FockTruncation) -> Row {
    let mut row = RowBuilder::new(p);
    match err_str(hp_polaritons(&p)) {
        Ok(hp) => {
            row.push("omega_plus", Ok(hp.omega_plus));
            row.push("omega_minus", Ok(hp.omega_minus));
            row.push("v_plus", Ok(hp.v_plus));
            row.push("v_minus", Ok(hp.v_minus));
            row.push("phi_plus", Ok(hp.phi_plus));
            row.push("phi_minus", Ok(hp.phi_minus));
            match err_str(hp_power_and_energy(&hp, p.temperature, spec.include_offset)) {
                Ok(thermal) => {
                    row.push("hp_power_ratio", Ok(thermal.power_ratio));
                    row.push("hp_em_energy", Ok(thermal.em_energy));
                }
                Err(e) => {
                    row.push("hp_power_ratio", Err(e.clone()));
                    row.push("hp_em_energy", Err(e));
                }
            }
        }
        Err(e) => {
            for col in [
                "omega_plus",
                "omega_minus",
                "v_plus",
                "v_minus",
                "phi_plus",
                "phi_minus",
                "hp_power_ratio",
                "hp_em_energy",
            ] {
                row.push(col, Err(e.clone()));
            }
        }
    }
    // exact references on the same row
    match err_str(ThermalEnsemble::build(p, trunc, true)) {
        Ok(ens) => {
            let exact_ratio = err_str(emission_lines(&ens, spec.kappa, spec.gamma))
                .and_then(|lines| {
                    radiated_power(&lines)
                        .ratio
                        .ok_or_else(|| "N_th = 0; ratio undefined".to_string())
                });
            row.push("exact_power_ratio", exact_ratio);
            row.push(
                "exact_em_energy",
                err_str(em_energy(&ens, spec.include_offset)),
            );
        }
        Err(e) => {
            row.push("exact_power_ratio", Err(e.clone()));
            row.push("exact_em_energy", Err(e));
        }
    }
    row.finish(trunc.n_ph, None)
}
