//! `gpsne`: characteristic scales, confined spectra, and self-gravitating
//! ground states for a single massive particle, with and without the
//! velocity-dependent kinetic correction.
//!
//! Every command writes either CSV (with a `#` preamble) or a JSON envelope;
//! both carry the same numbers, formatted by one shared routine. Exit codes:
//! 0 success, 2 argument or input-validation failure, 3 numerical failure
//! (non-convergence, scale collapse). No environment variables are read.

mod output;
mod refcsv;
mod svg;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gpsne_core::box_model::{self, WidthSpectrum};
use gpsne_core::estimates::{self, ScanSpacing};
use gpsne_core::gamma::gamma_localization;
use gpsne_core::sne::{self, SneConfig, SneSolution};
use gpsne_core::units::{self, PhysicalConstants};
use gpsne_core::Error;
use output::{fmt_float, json_num, Cell, Envelope, OutputFormat, Payload};
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gpsne",
    version,
    color = clap::ColorChoice::Never,
    about = "Gravitational self-localization of a quantum particle, \
             with a velocity-dependent correction to the kinetic term",
    long_about = "Computes characteristic length scales, confined spectra, and \
                  self-gravitating ground states for a single massive particle. \
                  The corrected model rescales the kinetic term by 2/(1+gamma), \
                  where gamma tracks how relativistic the state is.\n\n\
                  All commands support --format csv|json and --output <path|stdout>. \
                  CSV output starts with a `#` preamble carrying the same metadata \
                  as the JSON envelope; column order is fixed and documented per \
                  command. Runs are deterministic: the same invocation produces \
                  byte-identical output."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Characteristic lengths for one mass
    Scales(ScalesArgs),
    /// Energy levels of a particle confined to a box
    #[command(name = "box")]
    BoxCmd(BoxArgs),
    /// Localization gamma as a function of confinement width
    GammaScan(GammaScanArgs),
    /// Self-consistent self-gravitating ground state
    Sne(SneArgs),
    /// Characteristic lengths swept over a mass range
    DiosiScan(DiosiScanArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UnitsArg {
    /// SI (kg, m, J)
    Si,
    /// hbar = G = c = 1; masses in Planck masses, lengths in Planck lengths
    Planck,
    /// hbar = G = c = 1, tagged as natural units
    Natural,
    /// hbar = G = m = 1 (sne only); lengths in hbar^2/(G m^3)
    Solver,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpacingArg {
    Linear,
    Log,
}

#[derive(Args)]
struct OutArgs {
    /// Output format for the data stream
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Destination path, or `stdout`
    #[arg(long, default_value = "stdout")]
    output: String,
}

#[derive(Args)]
#[command(allow_negative_numbers = true, after_long_help = "CSV columns, in order: mass, mass_over_planck, planck_mass, \
    planck_length, compton_reduced, diosi, diosi_rel. diosi_rel is empty (JSON: null) at and \
    above the Planck mass, with a warning.")]
struct ScalesArgs {
    /// Particle mass in the active unit system
    #[arg(long)]
    mass: f64,
    #[arg(long, value_enum, default_value = "planck")]
    units: UnitsArg,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
#[command(allow_negative_numbers = true, after_long_help = "CSV columns, in order: width, level, energy_nr, energy_gp, \
    energy_expansion, gamma, energy_gp_over_mc2. With --reference, four more columns follow: \
    energy_ref, abs_dev, rel_dev, above_two_mc2; computed levels without a reference partner \
    leave the deviation cells empty, and reference rows matching no computed level produce a \
    warning (exit stays 0).\n\nWithout --width the spectrum is computed at widths of 1, 2, 5, \
    and 10 reduced Compton wavelengths.\n\nThe reference file must start with the exact header \
    `width,level,energy_ref,source`; width and energy_ref are positive decimals in the active \
    unit system, level is a positive integer, source is free text. Malformed files are rejected \
    with the offending line number (exit 2).")]
struct BoxArgs {
    /// Particle mass in the active unit system
    #[arg(long)]
    mass: f64,
    /// Box width; repeat for several widths (default: 1, 2, 5, 10 Compton)
    #[arg(long)]
    width: Vec<f64>,
    /// Highest level to compute, counting from 1
    #[arg(long, default_value_t = 10)]
    nmax: u32,
    #[arg(long, value_enum, default_value = "planck")]
    units: UnitsArg,
    /// Reference spectrum CSV to compare against
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Write an SVG of E vs n (does not change the data stream)
    #[arg(long)]
    plot: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
#[command(after_long_help = "CSV columns, in order: l_over_lambda, gamma. Points are \
    log-spaced over [lo, hi] with exact endpoints. Both columns are dimensionless.")]
struct GammaScanArgs {
    /// Width range as lo:hi:n, in units of the reduced Compton wavelength
    #[arg(long, value_name = "LO:HI:N")]
    l_over_lambda: String,
    /// Write an SVG of gamma vs width (log abscissa)
    #[arg(long)]
    plot: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
#[command(allow_negative_numbers = true, after_long_help = "CSV columns, in order: mass, relativistic, eigenvalue, \
    total_energy, kinetic, potential, kinetic_schrodinger, gamma, gamma_residual, r_mean, \
    r_peak, r_rms, wavefunction_delta, scf_iterations, gamma_iterations, converged.\n\n\
    The envelope carries a status field: `ok`, `unconverged` (exit 3, result still emitted), \
    or `scale-collapse` (exit 3, no bound state above the Planck mass in the corrected \
    model).\n\nDefaults: 4000 grid points, r_max of 20 gravitational Bohr radii \
    hbar^2/(G m^3), mixing 0.5, energy tolerance 1e-10 (relative), gamma tolerance 1e-10, \
    500 density iterations, 50 gamma iterations, gamma damping 1.\n\nSolver units fix the \
    particle mass to 1 and leave c undetermined, so they require --mass 1 and \
    --relativistic off.")]
struct SneArgs {
    /// Particle mass in the active unit system
    #[arg(long)]
    mass: f64,
    #[arg(long, value_enum, default_value = "planck")]
    units: UnitsArg,
    /// `on` solves the corrected model, `off` the uncorrected one
    #[arg(long, value_enum, default_value = "off")]
    relativistic: OnOff,
    /// Grid extent in the active length unit (default: 20 hbar^2/(G m^3))
    #[arg(long)]
    rmax: Option<f64>,
    /// Number of interior grid points (default: 4000)
    #[arg(long)]
    npoints: Option<usize>,
    /// Potential mixing fraction per iteration (default: 0.5)
    #[arg(long)]
    mixing: Option<f64>,
    /// Relative energy convergence tolerance (default: 1e-10)
    #[arg(long)]
    tol: Option<f64>,
    /// Absolute gamma convergence tolerance (default: 1e-10)
    #[arg(long)]
    tol_gamma: Option<f64>,
    /// Cap on density iterations per gamma value (default: 500)
    #[arg(long)]
    max_scf_iter: Option<usize>,
    /// Cap on gamma updates (default: 50)
    #[arg(long)]
    max_gamma_iter: Option<usize>,
    /// Damping for the gamma update (default: 1)
    #[arg(long)]
    damping: Option<f64>,
    /// Width of the Gaussian starting state, in the active length unit
    #[arg(long)]
    initial_width: Option<f64>,
    /// Write the radial profile u(r) as two-column CSV `r,u`
    #[arg(long)]
    dump_psi: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
#[command(after_long_help = "CSV columns, in order: mass, l_diosi, lambda_compton, l_planck, \
    l_diosi_rel, l_star_numeric, and with --with-solver a final solver_r_mean column. \
    l_diosi_rel and l_star_numeric are empty (JSON: null) at and above the Planck mass, where \
    the corrected model has no positive localization scale.\n\n--with-solver runs the full \
    corrected ground-state solve at every mass. This is the slow path: expect seconds per \
    mass. Rows stay ordered by mass regardless of evaluation order; masses where the solve \
    fails leave the cell empty and add a warning.")]
struct DiosiScanArgs {
    /// Mass range as lo:hi:n in the active unit system
    #[arg(long, value_name = "LO:HI:N")]
    mass_range: String,
    #[arg(long, value_enum, default_value = "log")]
    spacing: SpacingArg,
    #[arg(long, value_enum, default_value = "planck")]
    units: UnitsArg,
    /// Also solve the corrected ground state at each mass (slow)
    #[arg(long)]
    with_solver: bool,
    /// Grid points for the --with-solver solves (default: 4000)
    #[arg(long)]
    solver_npoints: Option<usize>,
    /// Write a log-log SVG of the length scales vs mass
    #[arg(long)]
    plot: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

/// Argument-shaped library errors become exit 2, numerical ones exit 3.
fn map_core(e: Error) -> Failure {
    match e {
        Error::NonPositive { .. }
        | Error::InvalidInput(_)
        | Error::TooFewGridPoints { .. }
        | Error::BracketWithoutMinimum { .. } => Failure::Usage(e.to_string()),
        other => Failure::Runtime(other.to_string()),
    }
}

fn consts_for(units: UnitsArg, allow_solver: bool) -> Result<PhysicalConstants, Failure> {
    match units {
        UnitsArg::Si => Ok(PhysicalConstants::si()),
        UnitsArg::Planck => Ok(PhysicalConstants::planck()),
        UnitsArg::Natural => Ok(PhysicalConstants::natural()),
        UnitsArg::Solver if allow_solver => Ok(PhysicalConstants::solver()),
        UnitsArg::Solver => Err(Failure::Usage(
            "solver units fix hbar = G = m = 1 and are only meaningful for `sne`".into(),
        )),
    }
}

fn unit_labels(units: UnitsArg) -> Vec<(&'static str, &'static str)> {
    match units {
        UnitsArg::Si => vec![("mass", "kg"), ("length", "m"), ("energy", "J")],
        UnitsArg::Planck | UnitsArg::Natural => {
            vec![("mass", "m_P"), ("length", "l_P"), ("energy", "E_P")]
        }
        UnitsArg::Solver => vec![
            ("mass", "m"),
            ("length", "hbar^2/(G m^3)"),
            ("energy", "G^2 m^5/hbar^2"),
        ],
    }
}

fn units_label(units: UnitsArg) -> &'static str {
    match units {
        UnitsArg::Si => "si",
        UnitsArg::Planck => "planck",
        UnitsArg::Natural => "natural",
        UnitsArg::Solver => "solver",
    }
}

fn parse_range(flag: &str, text: &str) -> Result<(f64, f64, usize), Failure> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(Failure::Usage(format!("{flag} must look like lo:hi:n, got `{text}`")));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| Failure::Usage(format!("{flag}: `{}` is not a number", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| Failure::Usage(format!("{flag}: `{}` is not a number", parts[1])))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| Failure::Usage(format!("{flag}: `{}` is not a point count", parts[2])))?;
    if !lo.is_finite() || lo <= 0.0 {
        return Err(Failure::Usage(format!("{flag}: lower end must be positive, got {lo}")));
    }
    if !hi.is_finite() || hi <= lo {
        return Err(Failure::Usage(format!("{flag}: upper end must exceed {lo}, got {hi}")));
    }
    if n < 2 {
        return Err(Failure::Usage(format!("{flag}: need at least 2 points, got {n}")));
    }
    Ok((lo, hi, n))
}

fn emit(envelope: &Envelope, out: &OutArgs) -> Result<(), Failure> {
    let format = match out.format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };
    output::write_output(&out.output, &envelope.render(format)).map_err(Failure::Runtime)
}

fn write_plot(path: &Path, figure: &svg::Figure) -> Result<(), Failure> {
    output::write_file(path, &figure.render()).map_err(Failure::Runtime)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Scales(a) => cmd_scales(a),
        Command::BoxCmd(a) => cmd_box(a),
        Command::GammaScan(a) => cmd_gamma_scan(a),
        Command::Sne(a) => cmd_sne(a),
        Command::DiosiScan(a) => cmd_diosi_scan(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn cmd_scales(a: ScalesArgs) -> Result<(), Failure> {
    let consts = consts_for(a.units, false)?;
    let scales = units::scales_for_mass(a.mass, &consts).map_err(map_core)?;

    let mut warnings = Vec::new();
    if scales.diosi_rel.is_none() {
        warnings.push(
            "mass exceeds the Planck mass: the corrected localization length is undefined"
                .to_string(),
        );
    }

    let envelope = Envelope {
        command: "scales",
        parameters: vec![
            ("mass", json_num(a.mass)),
            ("units", Value::String(units_label(a.units).into())),
        ],
        unit_system: units_label(a.units),
        units: unit_labels(a.units),
        status: None,
        warnings,
        payload: Payload::Record(vec![
            ("mass", Cell::Float(scales.mass)),
            ("mass_over_planck", Cell::Float(scales.mass_over_planck)),
            ("planck_mass", Cell::Float(scales.planck_mass)),
            ("planck_length", Cell::Float(scales.planck_length)),
            ("compton_reduced", Cell::Float(scales.compton_reduced)),
            ("diosi", Cell::Float(scales.diosi)),
            ("diosi_rel", Cell::OptFloat(scales.diosi_rel)),
        ]),
    };
    emit(&envelope, &a.out)
}

fn cmd_box(a: BoxArgs) -> Result<(), Failure> {
    let consts = consts_for(a.units, false)?;
    if a.nmax == 0 {
        return Err(Failure::Usage("nmax must be at least 1".into()));
    }
    let widths = if a.width.is_empty() {
        let lambda = units::compton_reduced(a.mass, &consts).map_err(map_core)?;
        vec![lambda, 2.0 * lambda, 5.0 * lambda, 10.0 * lambda]
    } else {
        a.width.clone()
    };
    let spectra: Vec<WidthSpectrum> =
        box_model::spectra_for_widths(a.mass, &widths, a.nmax, &consts).map_err(map_core)?;
    let mc2 = a.mass * consts.c * consts.c;

    let mut parameters = vec![
        ("mass", json_num(a.mass)),
        ("widths", Value::Array(widths.iter().map(|&w| json_num(w)).collect())),
        ("nmax", Value::from(u64::from(a.nmax))),
        ("units", Value::String(units_label(a.units).into())),
    ];

    let mut warnings = Vec::new();
    let mut header =
        vec!["width", "level", "energy_nr", "energy_gp", "energy_expansion", "gamma",
             "energy_gp_over_mc2"];
    let mut rows: Vec<Vec<Cell>> = Vec::new();
    let mut reference_points: Vec<(f64, f64)> = Vec::new();

    for ws in &spectra {
        for lv in &ws.levels {
            rows.push(vec![
                Cell::Float(ws.width),
                Cell::Int(u64::from(lv.level)),
                Cell::Float(lv.energy_nr),
                Cell::Float(lv.energy_gp),
                Cell::Float(lv.energy_expansion),
                Cell::Float(lv.gamma),
                Cell::Float(lv.energy_gp / mc2),
            ]);
        }
    }

    if let Some(ref_path) = &a.reference {
        parameters.push(("reference", Value::String(ref_path.display().to_string())));
        let table = refcsv::parse_reference(ref_path).map_err(Failure::Usage)?;
        let report =
            box_model::compare_reference(&spectra, &table, a.mass, &consts).map_err(map_core)?;
        header.extend(["energy_ref", "abs_dev", "rel_dev", "above_two_mc2"]);
        // comparison rows come back in the same (width, level) order the
        // spectra were flattened in above
        debug_assert_eq!(report.rows.len(), rows.len());
        for (row, cmp) in rows.iter_mut().zip(&report.rows) {
            row.push(Cell::OptFloat(cmp.energy_ref));
            row.push(Cell::OptFloat(cmp.abs_dev));
            row.push(Cell::OptFloat(cmp.rel_dev));
            row.push(Cell::Bool(cmp.above_two_mc2));
            if let Some(e) = cmp.energy_ref {
                reference_points.push((f64::from(cmp.level), e));
            }
        }
        // report.warnings already names every unmatched reference row
        warnings.extend(report.warnings);
    }

    let envelope = Envelope {
        command: "box",
        parameters,
        unit_system: units_label(a.units),
        units: unit_labels(a.units),
        status: None,
        warnings,
        payload: Payload::Rows { header, rows },
    };
    emit(&envelope, &a.out)?;

    if let Some(plot_path) = &a.plot {
        let energy_label = unit_labels(a.units)
            .into_iter()
            .find(|(q, _)| *q == "energy")
            .map(|(_, u)| u)
            .unwrap_or("");
        let mut series = Vec::new();
        for ws in &spectra {
            let n_pts: Vec<(f64, f64)> =
                ws.levels.iter().map(|lv| (f64::from(lv.level), lv.energy_nr)).collect();
            let g_pts: Vec<(f64, f64)> =
                ws.levels.iter().map(|lv| (f64::from(lv.level), lv.energy_gp)).collect();
            series.push(svg::Series {
                label: format!("NR, L={:.3e}", ws.width),
                mark: svg::Mark::Line,
                points: n_pts,
            });
            series.push(svg::Series {
                label: format!("GP, L={:.3e}", ws.width),
                mark: svg::Mark::Line,
                points: g_pts,
            });
        }
        if !reference_points.is_empty() {
            series.push(svg::Series {
                label: "reference".into(),
                mark: svg::Mark::Dots,
                points: reference_points,
            });
        }
        let figure = svg::Figure {
            x: svg::Axis { label: "n".into(), log: false },
            y: svg::Axis { label: format!("E [{energy_label}]"), log: false },
            series,
        };
        write_plot(plot_path, &figure)?;
    }
    Ok(())
}

fn cmd_gamma_scan(a: GammaScanArgs) -> Result<(), Failure> {
    let (lo, hi, n) = parse_range("--l-over-lambda", &a.l_over_lambda)?;
    let mut rows: Vec<Vec<Cell>> = Vec::with_capacity(n);
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(n);
    for i in 0..n {
        let ratio = if i == n - 1 {
            hi
        } else {
            lo * ((hi / lo).ln() * i as f64 / (n - 1) as f64).exp()
        };
        let gamma = gamma_localization(ratio, 1.0).map_err(map_core)?;
        points.push((ratio, gamma));
        rows.push(vec![Cell::Float(ratio), Cell::Float(gamma)]);
    }

    let envelope = Envelope {
        command: "gamma-scan",
        parameters: vec![
            ("l_over_lambda", Value::String(a.l_over_lambda.clone())),
            ("lo", json_num(lo)),
            ("hi", json_num(hi)),
            ("n", Value::from(n as u64)),
        ],
        unit_system: "dimensionless",
        units: Vec::new(),
        status: None,
        warnings: Vec::new(),
        payload: Payload::Rows { header: vec!["l_over_lambda", "gamma"], rows },
    };
    emit(&envelope, &a.out)?;

    if let Some(plot_path) = &a.plot {
        let figure = svg::Figure {
            x: svg::Axis { label: "l / lambda_C".into(), log: true },
            y: svg::Axis { label: "gamma".into(), log: false },
            series: vec![svg::Series {
                label: "gamma(l)".into(),
                mark: svg::Mark::Line,
                points,
            }],
        };
        write_plot(plot_path, &figure)?;
    }
    Ok(())
}

fn sne_config(a: &SneArgs) -> SneConfig {
    let mut cfg = SneConfig::default();
    if let Some(n) = a.npoints {
        cfg.n_points = n;
    }
    cfg.r_max = a.rmax;
    cfg.initial_width = a.initial_width;
    if let Some(m) = a.mixing {
        cfg.mixing = m;
    }
    if let Some(t) = a.tol {
        cfg.tol_energy = t;
    }
    if let Some(t) = a.tol_gamma {
        cfg.tol_gamma = t;
    }
    if let Some(k) = a.max_scf_iter {
        cfg.max_scf_iter = k;
    }
    if let Some(k) = a.max_gamma_iter {
        cfg.max_gamma_iter = k;
    }
    if let Some(d) = a.damping {
        cfg.gamma_damping = d;
    }
    cfg
}

fn sne_parameters(a: &SneArgs, cfg: &SneConfig, relativistic: bool) -> Vec<(&'static str, Value)> {
    vec![
        ("mass", json_num(a.mass)),
        ("units", Value::String(units_label(a.units).into())),
        (
            "relativistic",
            Value::String(if relativistic { "on" } else { "off" }.into()),
        ),
        ("n_points", Value::from(cfg.n_points as u64)),
        ("r_max", cfg.r_max.map(json_num).unwrap_or(Value::Null)),
        ("initial_width", cfg.initial_width.map(json_num).unwrap_or(Value::Null)),
        ("mixing", json_num(cfg.mixing)),
        ("tol_energy", json_num(cfg.tol_energy)),
        ("tol_gamma", json_num(cfg.tol_gamma)),
        ("max_scf_iter", Value::from(cfg.max_scf_iter as u64)),
        ("max_gamma_iter", Value::from(cfg.max_gamma_iter as u64)),
        ("gamma_damping", json_num(cfg.gamma_damping)),
    ]
}

fn solution_record(sol: &SneSolution) -> Vec<(&'static str, Cell)> {
    vec![
        ("mass", Cell::Float(sol.mass)),
        ("relativistic", Cell::Bool(sol.relativistic)),
        ("eigenvalue", Cell::Float(sol.eigenvalue)),
        ("total_energy", Cell::Float(sol.total_energy)),
        ("kinetic", Cell::Float(sol.kinetic)),
        ("potential", Cell::Float(sol.potential)),
        ("kinetic_schrodinger", Cell::Float(sol.kinetic_schrodinger)),
        ("gamma", Cell::Float(sol.gamma)),
        ("gamma_residual", Cell::Float(sol.gamma_residual)),
        ("r_mean", Cell::Float(sol.r_mean)),
        ("r_peak", Cell::Float(sol.r_peak)),
        ("r_rms", Cell::Float(sol.r_rms)),
        ("wavefunction_delta", Cell::Float(sol.wavefunction_delta)),
        ("scf_iterations", Cell::Int(sol.scf_iterations as u64)),
        ("gamma_iterations", Cell::Int(sol.gamma_iterations as u64)),
        ("converged", Cell::Bool(sol.converged)),
    ]
}

fn dump_psi(path: &Path, sol: &SneSolution) -> Result<(), Failure> {
    let mut text = String::from("r,u\n");
    let nodes = sol.wavefunction.grid().nodes();
    for (r, u) in nodes.iter().zip(sol.wavefunction.values()) {
        text.push_str(&fmt_float(*r));
        text.push(',');
        text.push_str(&fmt_float(*u));
        text.push('\n');
    }
    output::write_file(path, &text).map_err(Failure::Runtime)
}

fn cmd_sne(a: SneArgs) -> Result<(), Failure> {
    let consts = consts_for(a.units, true)?;
    let relativistic = matches!(a.relativistic, OnOff::On);
    let cfg = sne_config(&a);
    let parameters = sne_parameters(&a, &cfg, relativistic);
    let unit_system = units_label(a.units);

    let solved = if relativistic {
        sne::solve_gp(a.mass, &consts, &cfg)
    } else {
        sne::solve_nr(a.mass, &consts, &cfg)
    };

    match solved {
        Ok(sol) => {
            let status = if sol.converged { "ok" } else { "unconverged" };
            let envelope = Envelope {
                command: "sne",
                parameters,
                unit_system,
                units: unit_labels(a.units),
                status: Some(status),
                warnings: sol.warnings.clone(),
                payload: Payload::Record(solution_record(&sol)),
            };
            emit(&envelope, &a.out)?;
            if let Some(psi_path) = &a.dump_psi {
                dump_psi(psi_path, &sol)?;
            }
            if sol.converged {
                Ok(())
            } else {
                Err(Failure::Runtime(format!(
                    "solver stopped unconverged after {} density iterations",
                    sol.scf_iterations
                )))
            }
        }
        Err(Error::ScaleCollapse { detail }) => {
            let envelope = Envelope {
                command: "sne",
                parameters,
                unit_system,
                units: unit_labels(a.units),
                status: Some("scale-collapse"),
                warnings: vec![detail.clone()],
                payload: Payload::Empty,
            };
            emit(&envelope, &a.out)?;
            Err(Failure::Runtime(format!("scale collapse: {detail}")))
        }
        Err(e) => Err(map_core(e)),
    }
}

fn cmd_diosi_scan(a: DiosiScanArgs) -> Result<(), Failure> {
    let (lo, hi, n) = parse_range("--mass-range", &a.mass_range)?;
    let consts = consts_for(a.units, false)?;
    let spacing = match a.spacing {
        SpacingArg::Linear => ScanSpacing::Linear,
        SpacingArg::Log => ScanSpacing::Log,
    };

    #[cfg(feature = "parallel")]
    let scan = estimates::par_mass_scan(lo, hi, n, spacing, &consts).map_err(map_core)?;
    #[cfg(not(feature = "parallel"))]
    let scan = estimates::mass_scan(lo, hi, n, spacing, &consts).map_err(map_core)?;

    let mut parameters = vec![
        ("mass_range", Value::String(a.mass_range.clone())),
        ("lo", json_num(lo)),
        ("hi", json_num(hi)),
        ("n", Value::from(n as u64)),
        (
            "spacing",
            Value::String(
                match a.spacing {
                    SpacingArg::Linear => "linear",
                    SpacingArg::Log => "log",
                }
                .into(),
            ),
        ),
        ("units", Value::String(units_label(a.units).into())),
        ("with_solver", Value::Bool(a.with_solver)),
    ];

    let mut warnings = Vec::new();
    let mut solver_r_mean: Vec<Option<f64>> = Vec::new();
    if a.with_solver {
        let mut cfg = SneConfig::default();
        if let Some(np) = a.solver_npoints {
            cfg.n_points = np;
        }
        parameters.push(("solver_npoints", Value::from(cfg.n_points as u64)));
        let masses: Vec<f64> = scan.iter().map(|row| row.mass).collect();
        #[cfg(feature = "parallel")]
        let solved = sne::par_solve_many(&masses, &consts, &cfg, true);
        #[cfg(not(feature = "parallel"))]
        let solved = sne::solve_many(&masses, &consts, &cfg, true);
        for (mass, outcome) in masses.iter().zip(solved) {
            match outcome {
                Ok(sol) => {
                    if !sol.converged {
                        warnings.push(format!(
                            "mass={}: solver unconverged; r_mean taken from the last iterate",
                            fmt_float(*mass)
                        ));
                    }
                    solver_r_mean.push(Some(sol.r_mean));
                }
                Err(e) => {
                    warnings.push(format!("mass={}: {e}", fmt_float(*mass)));
                    solver_r_mean.push(None);
                }
            }
        }
    }

    let mut header =
        vec!["mass", "l_diosi", "lambda_compton", "l_planck", "l_diosi_rel", "l_star_numeric"];
    if a.with_solver {
        header.push("solver_r_mean");
    }
    let mut rows: Vec<Vec<Cell>> = Vec::with_capacity(scan.len());
    for (i, row) in scan.iter().enumerate() {
        let mut cells = vec![
            Cell::Float(row.mass),
            Cell::Float(row.l_diosi),
            Cell::Float(row.lambda_compton),
            Cell::Float(row.l_planck),
            Cell::OptFloat(row.l_diosi_rel),
            Cell::OptFloat(row.l_star_numeric),
        ];
        if a.with_solver {
            cells.push(Cell::OptFloat(solver_r_mean[i]));
        }
        rows.push(cells);
    }

    let envelope = Envelope {
        command: "diosi-scan",
        parameters,
        unit_system: units_label(a.units),
        units: unit_labels(a.units),
        status: None,
        warnings,
        payload: Payload::Rows { header, rows },
    };
    emit(&envelope, &a.out)?;

    if let Some(plot_path) = &a.plot {
        let length_label = unit_labels(a.units)
            .into_iter()
            .find(|(q, _)| *q == "length")
            .map(|(_, u)| u)
            .unwrap_or("");
        let mass_label = unit_labels(a.units)
            .into_iter()
            .find(|(q, _)| *q == "mass")
            .map(|(_, u)| u)
            .unwrap_or("");
        let line = |label: &str, f: &dyn Fn(&estimates::ScanRow) -> Option<f64>| svg::Series {
            label: label.to_string(),
            mark: svg::Mark::Line,
            points: scan
                .iter()
                .filter_map(|row| f(row).map(|v| (row.mass, v)))
                .collect(),
        };
        let mut series = vec![
            line("l_diosi", &|r| Some(r.l_diosi)),
            line("lambda_compton", &|r| Some(r.lambda_compton)),
            line("l_planck", &|r| Some(r.l_planck)),
            line("l_diosi_rel", &|r| r.l_diosi_rel),
        ];
        if a.with_solver {
            series.push(svg::Series {
                label: "solver r_mean".into(),
                mark: svg::Mark::Dots,
                points: scan
                    .iter()
                    .zip(&solver_r_mean)
                    .filter_map(|(row, v)| v.map(|v| (row.mass, v)))
                    .collect(),
            });
        }
        let figure = svg::Figure {
            x: svg::Axis { label: format!("m [{mass_label}]"), log: true },
            y: svg::Axis { label: format!("length [{length_label}]"), log: true },
            series,
        };
        write_plot(plot_path, &figure)?;
    }
    Ok(())
}
