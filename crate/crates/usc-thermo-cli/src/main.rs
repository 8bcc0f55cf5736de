use std::collections::HashMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use usc_thermo_cli::grid::{parse_grid, parse_grid_u32, parse_pair};
use usc_thermo_cli::rows::{write_csv, write_jsonl};
use usc_thermo_cli::sweep::{Method, SweepCommand, SweepSpec};
use usc_thermo_cli::{config, effective_threads, run_sweep_with_threads, validate};

/// Equilibrium thermodynamics and thermal emission of two-level dipoles
/// ultrastrongly coupled to a cavity mode. Natural units: hbar = k_B = 1,
/// frequencies and temperatures in units of omega_c.
#[derive(Parser)]
#[command(name = "usc-thermo", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Free energy and its coupling-induced part, per method.
    FreeEnergy(SweepArgs),
    /// Zero-field susceptibility chi_z (exact finite differences plus
    /// approximation columns).
    Susceptibility(SweepArgs),
    /// Heat capacity split into cavity, dipole and coupling parts.
    HeatCapacity(SweepArgs),
    /// m_bar and the bimodality classification over a (J, T) grid.
    PhaseDiagram(SweepArgs),
    /// Ferroelectric critical temperature by bisection on the bimodality
    /// criterion.
    CriticalTemperature(SweepArgs),
    /// Black-body emission spectrum sampled on a frequency grid.
    Spectrum(SweepArgs),
    /// Total radiated power, power ratio and EM energy.
    Power(SweepArgs),
    /// Holstein-Primakoff polaritons against exact emission quantities.
    HpCompare(SweepArgs),
    /// Run the oracle/invariant self-check suite.
    Validate(ValidateArgs),
}

#[derive(Args, Clone)]
struct SweepArgs {
    /// Configuration file (key = value); flags override file entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of dipoles (grid: single, list or start:step:stop).
    #[arg(long = "N", visible_alias = "n-dipoles")]
    n: Option<String>,
    /// Dipole splitting omega0 (grid).
    #[arg(long, allow_hyphen_values = true)]
    omega0: Option<String>,
    /// Cavity frequency (the unit).
    #[arg(long = "omega-c")]
    omega_c: Option<f64>,
    /// Single-dipole coupling g (grid).
    #[arg(long, allow_hyphen_values = true)]
    g: Option<String>,
    /// Collective coupling G = g sqrt(N) (grid); mutually exclusive with --g.
    #[arg(long = "G", conflicts_with = "g", allow_hyphen_values = true)]
    big_g: Option<String>,
    /// Dipole-dipole coupling J (grid).
    #[arg(long = "J", allow_hyphen_values = true)]
    j: Option<String>,
    /// Temperature k_B T (grid).
    #[arg(long = "T", allow_hyphen_values = true)]
    t: Option<String>,
    /// Photon cutoff ("auto" = max(40, 20 ceil(T_max)) heuristic).
    #[arg(long = "n-ph")]
    n_ph: Option<String>,
    /// Comma-separated subset of
    /// exact,mean-field,perturbative,variational,low-frequency,effective.
    #[arg(long)]
    methods: Option<String>,
    /// Cavity decay rate into the measurement line (overall scale).
    #[arg(long)]
    kappa: Option<f64>,
    /// Phenomenological line width.
    #[arg(long)]
    gamma: Option<f64>,
    /// Finite-difference step for chi_z.
    #[arg(long = "chi-step")]
    chi_step: Option<f64>,
    /// Relative shell tolerance of the low-frequency series.
    #[arg(long = "series-tol")]
    series_tol: Option<f64>,
    /// Bisection bracket lo:hi for critical-temperature.
    #[arg(long = "t-bracket", allow_hyphen_values = true)]
    t_bracket: Option<String>,
    /// Frequency grid for spectrum sampling (start:step:stop).
    #[arg(long = "omega-grid", allow_hyphen_values = true)]
    omega_grid: Option<String>,
    /// Include the omega_c/2 offset in EM energy columns.
    #[arg(long)]
    offset: bool,
    /// Output path (stdout when omitted).
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
    /// csv, jsonl or both (both requires --output).
    #[arg(long)]
    format: Option<String>,
    /// Worker threads (capped by USC_THERMO_THREADS).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Photon cutoff for the convergence diagnostic (default: heuristic).
    #[arg(long = "n-ph")]
    n_ph: Option<usize>,
    /// Temperature scale for the convergence diagnostic.
    #[arg(long = "t-max", default_value_t = 0.5)]
    t_max: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate(args) => run_validate(&args),
        other => match run_sweep_command(other) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(2)
            }
        },
    }
}

fn run_validate(args: &ValidateArgs) -> ExitCode {
    let results = validate::run_validation(args.n_ph, args.t_max);
    let mut all_passed = true;
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("{status}  {:<32} {}", r.name, r.detail);
        all_passed &= r.passed;
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn run_sweep_command(command: Command) -> Result<ExitCode> {
    let (sweep_command, args) = match command {
        Command::FreeEnergy(a) => (SweepCommand::FreeEnergy, a),
        Command::Susceptibility(a) => (SweepCommand::Susceptibility, a),
        Command::HeatCapacity(a) => (SweepCommand::HeatCapacity, a),
        Command::PhaseDiagram(a) => (SweepCommand::PhaseDiagram, a),
        Command::CriticalTemperature(a) => (SweepCommand::CriticalTemperature, a),
        Command::Spectrum(a) => (SweepCommand::Spectrum, a),
        Command::Power(a) => (SweepCommand::Power, a),
        Command::HpCompare(a) => (SweepCommand::HpCompare, a),
        Command::Validate(_) => unreachable!("handled by caller"),
    };
    let file = match &args.config {
        Some(path) => config::load(path)?,
        None => HashMap::new(),
    };
    let spec = build_spec(sweep_command, &args, &file)?;
    let threads = effective_threads(
        args.threads
            .or_else(|| file.get("threads").and_then(|v| v.parse().ok())),
    );
    let outcome = run_sweep_with_threads(&spec, threads)?;

    let format = args
        .format
        .clone()
        .or_else(|| file.get("format").cloned())
        .unwrap_or_else(|| "csv".to_string());
    let output = args
        .output
        .clone()
        .or_else(|| file.get("output").map(PathBuf::from));
    match (format.as_str(), &output) {
        ("csv", None) => {
            let stdout = std::io::stdout();
            write_csv(stdout.lock(), &outcome.meta, &outcome.rows)?;
        }
        ("jsonl", None) => {
            let stdout = std::io::stdout();
            write_jsonl(stdout.lock(), &outcome.meta, &outcome.rows)?;
        }
        ("csv", Some(path)) => {
            write_csv(create(path)?, &outcome.meta, &outcome.rows)?;
        }
        ("jsonl", Some(path)) => {
            write_jsonl(create(path)?, &outcome.meta, &outcome.rows)?;
        }
        ("both", Some(path)) => {
            write_csv(
                create(&path.with_extension("csv"))?,
                &outcome.meta,
                &outcome.rows,
            )?;
            write_jsonl(
                create(&path.with_extension("jsonl"))?,
                &outcome.meta,
                &outcome.rows,
            )?;
        }
        ("both", None) => bail!("--format both requires --output"),
        (other, _) => bail!("unknown format {other:?}"),
    }
    if outcome.failed_points > 0 {
        eprintln!(
            "warning: {} point(s) recorded errors (see the error column)",
            outcome.failed_points
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn create(path: &PathBuf) -> Result<impl Write> {
    std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))
}

fn pick<'a>(cli: &'a Option<String>, file: &'a HashMap<String, String>, key: &str) -> Option<&'a str> {
    cli.as_deref().or_else(|| file.get(key).map(|s| s.as_str()))
}

fn build_spec(
    command: SweepCommand,
    args: &SweepArgs,
    file: &HashMap<String, String>,
) -> Result<SweepSpec> {
    let n_text = pick(&args.n, file, "N").context("--N is required")?;
    let t_text = pick(&args.t, file, "T").context("--T is required")?;
    let omega0 = match pick(&args.omega0, file, "omega0") {
        Some(text) => parse_grid(text)?,
        None => vec![1.0],
    };
    let j = match pick(&args.j, file, "J") {
        Some(text) => parse_grid(text)?,
        None => vec![0.0],
    };
    let (g, g_is_collective) = match (&args.big_g, pick(&args.g, file, "g")) {
        (Some(big_g), _) => (parse_grid(big_g)?, true),
        (None, Some(text)) => (parse_grid(text)?, false),
        (None, None) => match file.get("G") {
            Some(text) => (parse_grid(text)?, true),
            None => (vec![0.0], false),
        },
    };
    let n_ph = match pick(&args.n_ph, file, "n-ph") {
        None => None,
        Some("auto") => None,
        Some(text) => Some(
            text.parse::<usize>()
                .with_context(|| format!("bad --n-ph {text:?}"))?,
        ),
    };
    let methods = match pick(&args.methods, file, "methods") {
        Some(list) => list
            .split(',')
            .map(|m| Method::parse(m.trim()))
            .collect::<Result<Vec<_>>>()?,
        None => vec![Method::Exact],
    };
    let t_bracket = match pick(&args.t_bracket, file, "t-bracket") {
        Some(text) => parse_pair(text)?,
        None => (0.05, 2.0),
    };
    let omega_grid = match pick(&args.omega_grid, file, "omega-grid") {
        Some(text) => Some(parse_grid(text)?),
        None => None,
    };
    let float = |cli: Option<f64>, key: &str, default: f64| -> Result<f64> {
        match cli {
            Some(v) => Ok(v),
            None => match file.get(key) {
                Some(text) => text
                    .parse::<f64>()
                    .with_context(|| format!("bad {key} in config")),
                None => Ok(default),
            },
        }
    };
    let spec = SweepSpec {
        command,
        n: parse_grid_u32(n_text)?,
        omega0,
        j,
        t: parse_grid(t_text)?,
        g,
        g_is_collective,
        omega_c: float(args.omega_c, "omega-c", 1.0)?,
        n_ph,
        methods,
        kappa: float(args.kappa, "kappa", 1.0)?,
        gamma: float(args.gamma, "gamma", 0.04)?,
        chi_step: float(args.chi_step, "chi-step", 1e-3)?,
        series_tol: float(args.series_tol, "series-tol", 1e-12)?,
        t_bracket,
        omega_grid,
        include_offset: args.offset || file.get("offset").is_some_and(|v| v == "true"),
    };
    spec.validate()?;
    Ok(spec)
}
