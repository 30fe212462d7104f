//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 a reproduced
//! table cell is outside tolerance, 3 a model or extraction failed.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::compact_models::{evaluate, ModelError, ModelId, ModelOptions, ModelResult};
use crate::comparison::{builtin_device, reproduce, ComparisonError, ReproducedTable, TableId};
use crate::config::{dump_device, load_device, load_gas, ConfigError, Device};
use crate::flow_regime::{regime_report, GasProperties, RegimeReport};
use crate::frf::{
    extract, resonance_grid, synth_frf, CrossingSource, ExtractOptions, FrfCurve, FrfError,
    Resonator,
};
use crate::geometry::{GeometryError, PlateDimensions, PlateGeometry};
use crate::units::{parse_quantity, Dimension, UnitError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "perfdamp",
    version,
    about = "Squeeze-film damping of perforated MEMS plates"
)]
pub struct Cli {
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Gas property overrides (JSON: P_A_Pa, rho_kg_per_m3, mu_Pa_s, lambda_nm).
    #[arg(long, global = true)]
    pub gas: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParameter {
    S0,
    S1,
    H,
    #[value(name = "h_c", alias = "hc")]
    HC,
    Lambda,
    Freq,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Characteristic numbers of the gas flow.
    Regime {
        #[arg(long)]
        device: PathBuf,
        /// Frequency, kHz unless suffixed.
        #[arg(long)]
        freq: String,
    },
    /// Damping coefficient of a device.
    Damp {
        #[arg(long)]
        device: PathBuf,
        /// m1..m6, beams or all.
        #[arg(long, default_value = "all")]
        model: String,
        #[arg(long)]
        breakdown: bool,
        /// Slip-correct the continuum models M1/M2.
        #[arg(long)]
        slip_correct: bool,
    },
    /// Reproduce the model-vs-measurement tables for the reference devices.
    Compare {
        /// 3, 4, 5 or all.
        #[arg(long, default_value = "all")]
        table: String,
    },
    /// Damping over a range of one parameter.
    Sweep {
        #[arg(long)]
        device: PathBuf,
        #[arg(long, value_enum)]
        parameter: SweepParameter,
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long, allow_hyphen_values = true)]
        stop: String,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_delimiter = ',', default_value = "m1,m2,m3,m4,m5,m6")]
        models: Vec<String>,
    },
    /// Frequency-response curves.
    Frf {
        #[command(subcommand)]
        command: FrfCommand,
    },
    /// Print a device file in canonical form.
    DumpConfig {
        #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
        device: Option<PathBuf>,
        /// Reference device A–F.
        #[arg(long)]
        builtin: Option<char>,
    },
}

#[derive(Debug, Subcommand)]
pub enum FrfCommand {
    /// Write the response of a driven resonator as CSV.
    Synth {
        /// Effective mass (kg).
        #[arg(long)]
        meff: f64,
        /// Damping coefficient (Ns/m).
        #[arg(long)]
        damping: f64,
        /// Undamped natural frequency, kHz unless suffixed.
        #[arg(long)]
        f0: String,
        /// Drive force (N).
        #[arg(long, default_value_t = 1e-9)]
        force: f64,
        /// Half span of the grid in bandwidths.
        #[arg(long, default_value_t = 5.0)]
        span: f64,
        #[arg(long, default_value_t = 801)]
        points: usize,
    },
    /// Extract f0, Q and optionally damping from a CSV curve.
    Extract {
        #[arg(long)]
        input: PathBuf,
        /// Effective mass (kg); adds c_Ns_per_m to the output.
        #[arg(long)]
        meff: Option<f64>,
        /// Polynomial fit window (samples).
        #[arg(long)]
        window: Option<usize>,
        /// Read half-power crossings from the raw samples only.
        #[arg(long)]
        raw_crossings: bool,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Unit(#[from] UnitError),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Comparison(#[from] ComparisonError),
    #[error(transparent)]
    Frf(#[from] FrfError),
    #[error("{0} reproduced cells are outside tolerance")]
    Tolerance(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Unit(_) | CliError::Io(_) => 1,
            CliError::Tolerance(_) => 2,
            CliError::Model(_) | CliError::Comparison(_) | CliError::Frf(_) => 3,
        }
    }
}

/// Output of a command plus an optional failure that still lets it be written.
struct Output {
    text: String,
    failure: Option<CliError>,
}

impl From<String> for Output {
    fn from(text: String) -> Self {
        Self {
            text,
            failure: None,
        }
    }
}

/// Parses `argv` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = execute(&cli).and_then(|out| {
        emit(cli.out.as_deref(), &out.text, stdout)?;
        out.failure.map_or(Ok(()), Err)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn execute(cli: &Cli) -> Result<Output, CliError> {
    let gas = match &cli.gas {
        Some(path) => load_gas(path)?,
        None => GasProperties::default(),
    };
    let format = |default: Format, allowed: &[Format]| -> Result<Format, CliError> {
        let f = cli.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(CliError::Usage(format!(
                "format {f:?} is not supported by this command"
            )))
        }
    };
    use Format::*;
    match &cli.command {
        Command::Regime { device, freq } => {
            let device = load_device(device)?;
            let freq = parse_quantity(freq, Dimension::Frequency, Some("kHz"))?;
            if !(freq > 0.0) {
                return Err(CliError::Usage("--freq must be positive".into()));
            }
            let report = regime_report(&device.geom, &gas, freq);
            Ok(render_regime(&report, format(Text, &[Text, Csv, Json])?).into())
        }
        Command::Damp {
            device,
            model,
            breakdown,
            slip_correct,
        } => {
            let device = load_device(device)?;
            let models = parse_models(model, &device)?;
            let opts = ModelOptions {
                slip_correct: *slip_correct,
            };
            let results = models
                .iter()
                .map(|&m| evaluate(m, &device.geom, &gas, opts))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(render_damp(
                &device.name,
                &results,
                *breakdown,
                format(Csv, &[Csv, Text, Json])?,
            )
            .into())
        }
        Command::Compare { table } => {
            let ids = parse_tables(table)?;
            let tables = ids
                .iter()
                .map(|&id| reproduce(id, &gas))
                .collect::<Result<Vec<_>, _>>()?;
            let text = render_compare(&tables, format(Text, &[Text, Csv])?);
            let breaches: usize = tables.iter().map(|t| t.breaches().len()).sum();
            Ok(Output {
                text,
                failure: (breaches > 0).then_some(CliError::Tolerance(breaches)),
            })
        }
        Command::Sweep {
            device,
            parameter,
            start,
            stop,
            steps,
            models,
        } => {
            let device = load_device(device)?;
            let models = models
                .iter()
                .map(|m| m.parse::<ModelId>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::Usage(e.to_string()))?;
            format(Csv, &[Csv])?;
            sweep(&device, &gas, *parameter, start, stop, *steps, &models)
        }
        Command::Frf { command } => match command {
            FrfCommand::Synth {
                meff,
                damping,
                f0,
                force,
                span,
                points,
            } => {
                format(Csv, &[Csv])?;
                let f0 = parse_quantity(f0, Dimension::Frequency, Some("kHz"))?;
                let res = Resonator::tuned(*meff, *damping, f0, *force);
                if *points < 8 || !(*span > 0.0) || !(*damping > 0.0) {
                    return Err(CliError::Usage(
                        "--points must be ≥ 8 and --span, --damping positive".into(),
                    ));
                }
                let grid = resonance_grid(f0, res.quality_factor(), *span, *points);
                if grid[0] < 0.0 {
                    return Err(CliError::Usage(
                        "grid reaches negative frequencies; reduce --span".into(),
                    ));
                }
                let curve = synth_frf(&res, &grid)?;
                Ok(render_curve(&curve).into())
            }
            FrfCommand::Extract {
                input,
                meff,
                window,
                raw_crossings,
            } => {
                format(Json, &[Json])?;
                let curve = read_curve(input)?;
                let opts = ExtractOptions {
                    window: *window,
                    crossings: if *raw_crossings {
                        CrossingSource::Raw
                    } else {
                        CrossingSource::Polynomial
                    },
                };
                let mut result = extract(&curve, opts)?;
                if let Some(m) = meff {
                    if !(*m > 0.0) {
                        return Err(CliError::Usage("--meff must be positive".into()));
                    }
                    result = result.with_mass(*m);
                }
                Ok(json(&result).into())
            }
        },
        Command::DumpConfig { device, builtin } => {
            format(Json, &[Json])?;
            let device = match (device, builtin) {
                (Some(path), _) => load_device(path)?,
                (None, Some(id)) => builtin_device(*id)
                    .map(|r| Device::from(&r))
                    .ok_or_else(|| CliError::Usage(format!("no reference device `{id}`")))?,
                (None, None) => {
                    return Err(CliError::Usage("--device or --builtin required".into()))
                }
            };
            Ok(dump_device(&device).into())
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable output");
    text.push('\n');
    text
}

fn parse_models(arg: &str, device: &Device) -> Result<Vec<ModelId>, CliError> {
    if arg.eq_ignore_ascii_case("all") {
        let mut models = ModelId::PLATE_MODELS.to_vec();
        if device.geom.beams().is_some() {
            models.push(ModelId::Beams);
        }
        return Ok(models);
    }
    arg.split(',')
        .map(|m| m.trim().parse::<ModelId>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn parse_tables(arg: &str) -> Result<Vec<TableId>, CliError> {
    if arg.eq_ignore_ascii_case("all") {
        return Ok(TableId::ALL.to_vec());
    }
    arg.parse::<u8>()
        .ok()
        .and_then(TableId::from_number)
        .map(|t| vec![t])
        .ok_or_else(|| CliError::Usage(format!("unknown table `{arg}` (expected 3, 4, 5 or all)")))
}

fn render_regime(report: &RegimeReport, format: Format) -> String {
    let rows: [(&str, String); 9] = [
        ("K_ch", format!("{:.6}", report.gap_knudsen)),
        ("K_hole", format!("{:.6}", report.hole_knudsen)),
        ("sigma_plate", format!("{:.6}", report.sigma_plate)),
        ("sigma_cell", format!("{:.6}", report.sigma_cell)),
        ("Re", format!("{:.6}", report.reynolds)),
        (
            "rarefaction_gap_pct",
            format!("{:.4}", report.rarefaction_gap_pct),
        ),
        (
            "rarefaction_hole_pct",
            format!("{:.4}", report.rarefaction_hole_pct),
        ),
        ("compressible", report.compressible.to_string()),
        ("inertial", report.inertial.to_string()),
    ];
    match format {
        Format::Json => json(report),
        Format::Csv => {
            let mut s = String::from("key,value\n");
            for (k, v) in rows {
                let _ = writeln!(s, "{k},{v}");
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (k, v) in rows {
                let _ = writeln!(s, "{k:<22}{v:>14}");
            }
            s
        }
    }
}

#[derive(Serialize)]
struct DampRecord<'a> {
    device: &'a str,
    model: &'a str,
    #[serde(rename = "c_Ns_per_m")]
    c_ns_per_m: f64,
    series_terms: usize,
    converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    breakdown: Option<&'a crate::compact_models::CellResistanceBreakdown>,
}

fn render_damp(device: &str, results: &[ModelResult], breakdown: bool, format: Format) -> String {
    let mut s = String::new();
    match format {
        Format::Json => {
            let records: Vec<DampRecord> = results
                .iter()
                .map(|r| DampRecord {
                    device,
                    model: r.model.label(),
                    c_ns_per_m: r.c,
                    series_terms: r.series_terms,
                    converged: r.converged,
                    breakdown: if breakdown {
                        r.breakdown.as_ref()
                    } else {
                        None
                    },
                })
                .collect();
            return json(&records);
        }
        Format::Csv => {
            s.push_str("device,model,c_Ns_per_m,series_terms,converged");
            if breakdown {
                s.push_str(",R_S,R_IS,R_IB,R_IC,R_C,R_E,scale,R_p");
            }
            s.push('\n');
            for r in results {
                let _ = write!(
                    s,
                    "{device},{},{:.6e},{},{}",
                    r.model, r.c, r.series_terms, r.converged
                );
                if breakdown {
                    match &r.breakdown {
                        Some(b) => {
                            for v in [b.r_s, b.r_is, b.r_ib, b.r_ic, b.r_c, b.r_e, b.scale, b.r_p] {
                                let _ = write!(s, ",{v:.6e}");
                            }
                        }
                        None => s.push_str(",,,,,,,,"),
                    }
                }
                s.push('\n');
            }
        }
        Format::Text => {
            let _ = writeln!(
                s,
                "{:<8}{:<7}{:>16}{:>10}{:>11}",
                "device", "model", "c [Ns/m]", "terms", "converged"
            );
            for r in results {
                let _ = writeln!(
                    s,
                    "{device:<8}{:<7}{:>16.6e}{:>10}{:>11}",
                    r.model.label(),
                    r.c,
                    r.series_terms,
                    r.converged
                );
                if let (true, Some(b)) = (breakdown, &r.breakdown) {
                    for ((label, value), pct) in
                        crate::compact_models::CellResistanceBreakdown::LABELS
                            .iter()
                            .zip(b.contributions())
                            .zip(b.percentages())
                    {
                        let _ = writeln!(s, "{:>15}{:<6}{:>16.6e}{:>9.2} %", "", label, value, pct);
                    }
                    let _ = writeln!(s, "{:>15}{:<6}{:>16.6e}", "", "R_p", b.r_p);
                }
            }
        }
    }
    s
}

fn render_compare(tables: &[ReproducedTable], format: Format) -> String {
    let mut s = String::new();
    match format {
        Format::Csv => {
            s.push_str("table,device,column,reproduced_pct,published_pct,diff_pp,pass\n");
            for t in tables {
                for c in &t.cells {
                    let _ = writeln!(
                        s,
                        "{},{},{},{:.4},{:.2},{:.4},{}",
                        t.id.number(),
                        c.device,
                        c.column,
                        c.reproduced,
                        c.published,
                        c.diff_pp(),
                        t.passes(c)
                    );
                }
            }
        }
        _ => {
            for t in tables {
                let title = match t.id {
                    TableId::Errors => "relative errors of the full models [%]",
                    TableId::CellErrors => "relative errors of the perforation-cell models [%]",
                    TableId::Contributions => "M5 flow-resistance contributions [%]",
                };
                let _ = writeln!(
                    s,
                    "Table {}: {title}, reproduced (published)",
                    t.id.number()
                );
                let _ = write!(s, "{:<8}", "device");
                for col in &t.columns {
                    let _ = write!(s, "{col:>18}");
                }
                s.push('\n');
                for device in ['A', 'B', 'C', 'D', 'E', 'F'] {
                    let _ = write!(s, "{device:<8}");
                    for c in t.cells.iter().filter(|c| c.device == device) {
                        let mark = if t.passes(c) { ' ' } else { '!' };
                        let _ = write!(s, "{:>8.2} ({:>6.2}){mark}", c.reproduced, c.published);
                    }
                    s.push('\n');
                }
                let breaches = t.breaches().len();
                let _ = writeln!(
                    s,
                    "max |diff| {:.2} pp, tolerance {:.1} pp: {}\n",
                    t.max_abs_diff_pp(),
                    t.id.tolerance_pp(),
                    if breaches == 0 {
                        "PASS".to_string()
                    } else {
                        format!("FAIL ({breaches} cells)")
                    }
                );
            }
        }
    }
    s
}

fn sweep_value(parameter: SweepParameter, text: &str) -> Result<f64, CliError> {
    let (dim, default) = match parameter {
        SweepParameter::Lambda => (Dimension::Length, "nm"),
        SweepParameter::Freq => (Dimension::Frequency, "kHz"),
        _ => (Dimension::Length, "um"),
    };
    Ok(parse_quantity(text, dim, Some(default))?)
}

fn swept_geometry(
    geom: &PlateGeometry,
    parameter: SweepParameter,
    value: f64,
) -> Result<PlateGeometry, GeometryError> {
    let d = *geom.dims();
    let dims = match parameter {
        SweepParameter::S0 => PlateDimensions {
            hole_side: value,
            ..d
        },
        SweepParameter::S1 => PlateDimensions { wall: value, ..d },
        SweepParameter::H => PlateDimensions { gap: value, ..d },
        SweepParameter::HC => PlateDimensions {
            thickness: value,
            ..d
        },
        SweepParameter::Lambda | SweepParameter::Freq => d,
    };
    PlateGeometry::new(dims)
}

fn sweep(
    device: &Device,
    gas: &GasProperties,
    parameter: SweepParameter,
    start: &str,
    stop: &str,
    steps: usize,
    models: &[ModelId],
) -> Result<Output, CliError> {
    let start = sweep_value(parameter, start)?;
    let stop = sweep_value(parameter, stop)?;
    if steps < 2 {
        return Err(CliError::Usage("--steps must be at least 2".into()));
    }
    if !(start < stop) {
        return Err(CliError::Usage("--start must be below --stop".into()));
    }
    let values: Vec<f64> = (0..steps)
        .map(|i| start + (stop - start) * i as f64 / (steps - 1) as f64)
        .collect();
    // validate every step before evaluating any model
    let mut points = Vec::with_capacity(steps);
    for &v in &values {
        let geom = swept_geometry(&device.geom, parameter, v).map_err(|e| {
            CliError::Usage(format!("sweep value {v:.6e} gives an invalid device: {e}"))
        })?;
        let gas = if parameter == SweepParameter::Lambda {
            if v < 0.0 {
                return Err(CliError::Usage(
                    "mean free path must be non-negative".into(),
                ));
            }
            gas.with_mean_free_path(v)
        } else {
            *gas
        };
        points.push((v, geom, gas));
    }
    let mut s = String::from("param_value,model,c_Ns_per_m\n");
    for (v, geom, gas) in &points {
        for &m in models {
            let r = evaluate(m, geom, gas, ModelOptions::default())?;
            let _ = writeln!(s, "{v:.6e},{m},{:.6e}", r.c);
        }
    }
    Ok(s.into())
}

fn render_curve(curve: &FrfCurve) -> String {
    let mut s = String::from("freq_hz,amp_m\n");
    for (f, a) in curve.freqs().iter().zip(curve.amps()) {
        let _ = writeln!(s, "{f:e},{a:e}");
    }
    s
}

fn read_curve(path: &Path) -> Result<FrfCurve, CliError> {
    let bad = |msg: String| CliError::Io(format!("{}: {msg}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.iter().map(str::trim).collect::<Vec<_>>() != ["freq_hz", "amp_m"] {
        return Err(bad(format!(
            "expected header `freq_hz,amp_m`, got `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut freqs = Vec::new();
    let mut amps = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| -> Result<f64, CliError> {
            record
                .get(i)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| {
                    bad(format!(
                        "row {}: column {} is not a number",
                        line + 2,
                        i + 1
                    ))
                })
        };
        freqs.push(field(0)?);
        amps.push(field(1)?);
    }
    Ok(FrfCurve::new(freqs, amps)?)
}
