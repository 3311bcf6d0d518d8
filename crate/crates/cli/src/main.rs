use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use vibronic_core::density::{self, DEFAULT_PROMINENCE};
use vibronic_core::diabatization::{diabatic_ladder, fit_theta, rotated_diabats, DEFAULT_FIT_LEVELS};
use vibronic_core::hamiltonian::{auto_solve, solve, DEFAULT_TOL};
use vibronic_core::perturbation::{self, ThresholdVariant};
use vibronic_core::point::PointOptions;
use vibronic_core::hamiltonian::ConvergenceOptions;
use vibronic_core::{BasisSpec, DimensionlessPoint, ModelParams};
use vibronic_cli::presets::{self, Coordinates, PresetCatalog};
use vibronic_cli::surfaces::parse_grid;
use vibronic_cli::sweep::parse_axis;
use vibronic_cli::{output, report, sample_surfaces, sweep, AppError, SweepSpec};

#[derive(Parser)]
#[command(name = "vibronic", version, about = "Electron-vibration entanglement in two-state one-mode vibronic models")]
struct Cli {
    /// Extra presets (JSON array); entries replace built-ins of the same name.
    #[arg(long, global = true)]
    preset_file: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Converged solve of one parameter set.
    Solve(SolveArgs),
    /// Grid sweep over 2|J|/lambda, hw/dE and E0/hw.
    Sweep(SweepArgs),
    /// Vibrational density of one vibronic state.
    Density(DensityArgs),
    /// Diabatic and adiabatic curves with the ground-state density.
    Surfaces(SurfacesArgs),
    /// Best electronic rotation angle against the exact lowest levels.
    ThetaFit(ThetaArgs),
    /// Built-in and file presets.
    #[command(subcommand)]
    Preset(PresetCommand),
    /// Closed-form perturbative reference values.
    Perturb(PerturbArgs),
}

#[derive(Subcommand)]
enum PresetCommand {
    List,
    Show { name: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum CoordsArg {
    Tabulated,
    Raw,
}

#[derive(Clone, Copy, ValueEnum)]
enum ThresholdForm {
    /// `2|J| exp(-lambda / (2 hw))`
    Overlap,
    /// `2|J| exp(+lambda / (2 hw))`
    Positive,
}

impl From<ThresholdForm> for ThresholdVariant {
    fn from(v: ThresholdForm) -> Self {
        match v {
            ThresholdForm::Positive => ThresholdVariant::PositiveExponent,
            ThresholdForm::Overlap => ThresholdVariant::OverlapScaled,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// A parameter set: a preset, a dimensionless point, or explicit energies.
#[derive(Args)]
struct ParamArgs {
    #[arg(long, conflicts_with_all = ["e0", "homega", "j", "lambda", "delta", "r1", "r2", "r3"])]
    preset: Option<String>,
    /// Preset parameters to use: the quoted dimensionless point or the energy columns.
    #[arg(long, value_enum, default_value = "tabulated", requires = "preset")]
    coords: CoordsArg,
    #[arg(long, allow_hyphen_values = true)]
    e0: Option<f64>,
    #[arg(long)]
    homega: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    j: Option<f64>,
    #[arg(long, conflicts_with = "delta")]
    lambda: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value = "")]
    unit: String,
    /// 2|J|/lambda; with --r2 and --r3 this replaces the energy flags (hw from --homega, default 1).
    #[arg(long, conflicts_with_all = ["e0", "j", "lambda", "delta"])]
    r1: Option<f64>,
    /// hw/dE
    #[arg(long, requires = "r1")]
    r2: Option<f64>,
    /// E0/hw
    #[arg(long, requires = "r1")]
    r3: Option<f64>,
}

impl ParamArgs {
    fn resolve(&self, catalog: &PresetCatalog) -> Result<ModelParams, AppError> {
        if let Some(name) = &self.preset {
            let coords = match self.coords {
                CoordsArg::Tabulated => Coordinates::Tabulated,
                CoordsArg::Raw => Coordinates::Raw,
            };
            return catalog.get(name)?.params(coords);
        }
        let hw = self.homega;
        if let Some(r1) = self.r1 {
            let r2 = self.r2.ok_or_else(|| usage("--r1 needs --r2"))?;
            let point = DimensionlessPoint::new(r1, r2, self.r3.unwrap_or(0.0));
            return Ok(ModelParams::from_dimensionless(point, hw.unwrap_or(1.0))?.with_unit_label(self.unit.clone()));
        }
        let hw = hw.ok_or_else(|| usage("need --preset, --r1/--r2, or --homega with --j and --lambda|--delta"))?;
        let j = self.j.ok_or_else(|| usage("--j is required"))?;
        let e0 = self.e0.unwrap_or(0.0);
        let p = match (self.lambda, self.delta) {
            (Some(l), _) => ModelParams::from_lambda(e0, hw, j, l, self.unit.clone())?,
            (None, Some(d)) => ModelParams::new(e0, hw, j, d, self.unit.clone())?,
            (None, None) => return Err(usage("one of --lambda or --delta is required")),
        };
        Ok(p)
    }
}

fn usage(msg: &str) -> AppError {
    AppError::Usage(msg.to_string())
}

#[derive(Args)]
struct OutArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutArgs {
    fn open(&self) -> Result<Box<dyn Write>, AppError> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn io_err(path: &std::path::Path, source: io::Error) -> AppError {
    AppError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = 2)]
    states: usize,
    #[arg(long, default_value_t = DEFAULT_FIT_LEVELS)]
    fit_levels: usize,
    #[arg(long, value_enum, default_value = "overlap")]
    threshold_form: ThresholdForm,
    /// Exit with status 3 if the basis size did not converge.
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON sweep specification; overrides the axis flags.
    #[arg(long, conflicts_with_all = ["r1", "r2", "r3"])]
    spec: Option<PathBuf>,
    /// a:b:n log range or comma list.
    #[arg(long)]
    r1: Option<String>,
    #[arg(long)]
    r2: Option<String>,
    #[arg(long)]
    r3: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    states: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Worker count; machine parallelism when omitted.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// lo:hi:npts; defaults to 2001 points on [-(delta+6), delta+6].
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, default_value_t = 0)]
    state: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_PROMINENCE)]
    prominence: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SurfacesArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct ThetaArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = DEFAULT_FIT_LEVELS)]
    levels: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct PerturbArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_enum, default_value = "overlap")]
    threshold_form: ThresholdForm,
    #[command(flatten)]
    out: OutArgs,
}

enum Outcome {
    Done,
    NotConverged,
}

fn write_json<T: Serialize>(out: &OutArgs, value: &T) -> Result<(), AppError> {
    let mut w = out.open()?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| AppError::Format(e.to_string()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| io_err(std::path::Path::new("<output>"), e))
}

fn grid_for(text: &Option<String>, params: &ModelParams) -> Result<Vec<f64>, AppError> {
    match text {
        Some(t) => parse_grid(t),
        None => Ok(density::default_grid(params)),
    }
}

fn run(cli: Cli) -> Result<Outcome, AppError> {
    let catalog = match &cli.preset_file {
        Some(path) => PresetCatalog::with_file(path)?,
        None => PresetCatalog::builtin(),
    };
    match cli.command {
        Command::Solve(a) => {
            let options = PointOptions {
                convergence: ConvergenceOptions::with_tol(a.tol),
                states: a.states,
                fit_levels: a.fit_levels,
            };
            let variant = a.threshold_form.into();
            let converged = if let Some(name) = &a.params.preset {
                let coords = match a.params.coords {
                    CoordsArg::Tabulated => Coordinates::Tabulated,
                    CoordsArg::Raw => Coordinates::Raw,
                };
                let r = report::solve_preset(catalog.get(name)?, coords, &options, variant)?;
                write_json(&a.out, &r)?;
                r.report.converged
            } else {
                let params = a.params.resolve(&catalog)?;
                let r = report::solve_params(&params, &options, variant)?;
                write_json(&a.out, &r)?;
                r.converged
            };
            Ok(if a.strict && !converged { Outcome::NotConverged } else { Outcome::Done })
        }
        Command::Sweep(a) => {
            let mut spec = match &a.spec {
                Some(path) => SweepSpec::from_file(path)?,
                None => SweepSpec::default(),
            };
            if let Some(t) = &a.r1 {
                spec.r1_values = parse_axis(t)?;
            }
            if let Some(t) = &a.r2 {
                spec.r2_values = parse_axis(t)?;
            }
            if let Some(t) = &a.r3 {
                spec.r3_values = parse_axis(t)?;
            }
            if let Some(t) = a.tol {
                spec.tol = t;
            }
            if let Some(s) = a.states {
                spec.states = s;
            }
            let rows = sweep::run_sweep(&spec, a.threads)?;
            let mut w = a.out.open()?;
            match a.format {
                Format::Csv => output::write_sweep_csv(&mut w, &spec, &rows)?,
                Format::Json => {
                    serde_json::to_writer_pretty(&mut w, &output::sweep_json(&spec, &rows))
                        .map_err(|e| AppError::Format(e.to_string()))?;
                    writeln!(w).map_err(|e| io_err(std::path::Path::new("<output>"), e))?;
                }
            }
            w.flush().map_err(|e| io_err(std::path::Path::new("<output>"), e))?;
            let failed = rows.iter().filter(|r| !r.converged).count();
            if failed > 0 {
                eprintln!("{failed} of {} points did not converge", rows.len());
            }
            Ok(if a.strict && failed > 0 { Outcome::NotConverged } else { Outcome::Done })
        }
        Command::Density(a) => {
            let params = a.params.resolve(&catalog)?;
            let sol = auto_solve(&params, a.state + 1, a.tol)?;
            let grid = grid_for(&a.grid, &params)?;
            let prof = density::profile_with(sol.state(a.state), sol.n_used, &grid, a.prominence)?;
            eprintln!(
                "state {}: {} (integral {:.9}, n_used {}{})",
                a.state,
                prof.modality.as_str(),
                prof.integral(),
                sol.n_used,
                if prof.grid_too_narrow { ", grid too narrow" } else { "" }
            );
            output::write_density_csv(a.out.open()?, &prof.q_grid, &prof.values)?;
            Ok(Outcome::Done)
        }
        Command::Surfaces(a) => {
            let params = a.params.resolve(&catalog)?;
            let grid = grid_for(&a.grid, &params)?;
            let samples = sample_surfaces(&params, &grid, a.tol)?;
            output::write_surfaces_csv(a.out.open()?, &samples)?;
            Ok(Outcome::Done)
        }
        Command::ThetaFit(a) => {
            let params = a.params.resolve(&catalog)?;
            let n = auto_solve(&params, 2, a.tol)?.n_used;
            let exact = solve(&params, BasisSpec::new(n)?, a.levels)?;
            let fit = fit_theta(&params, &exact, a.levels)?;
            let ladder = diabatic_ladder(&rotated_diabats(&params, fit.theta_opt)?, a.levels);
            write_json(
                &a.out,
                &json!({
                    "theta_opt_deg": fit.theta_opt,
                    "rms": fit.rms,
                    "levels_compared": fit.levels_compared,
                    "n_used": n,
                    "exact_levels": exact.energies,
                    "diabatic_levels": ladder,
                }),
            )?;
            Ok(Outcome::Done)
        }
        Command::Preset(PresetCommand::List) => {
            let mut w = io::stdout().lock();
            let line = |w: &mut dyn Write, s: String| writeln!(w, "{s}").map_err(|e| io_err(std::path::Path::new("<stdout>"), e));
            line(&mut w, format!("{:<16}{:>10}{:>10}{:>10}{:>10}{:>7}{:>7}{:>7}{:>7}{:>7}", "name", "E0", "hw", "J", "lambda", "r1", "r2", "r3", "S0", "S1"))?;
            let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x}"));
            for p in catalog.presets() {
                let pt = p.point()?;
                line(
                    &mut w,
                    format!(
                        "{:<16}{:>10}{:>10}{:>10}{:>10}{:>7}{:>7}{:>7}{:>7}{:>7}",
                        p.name, p.e0, p.hbar_omega, p.j, p.lambda, pt.r1, pt.r2, pt.r3,
                        opt(p.reference_s0), opt(p.reference_s1)
                    ),
                )?;
            }
            Ok(Outcome::Done)
        }
        Command::Preset(PresetCommand::Show { name }) => {
            let p = catalog.get(&name)?;
            let out = OutArgs { out: None };
            write_json(&out, &json!({
                "preset": p,
                "unit": presets::UNIT_LABEL,
                "point": p.point()?,
            }))?;
            Ok(Outcome::Done)
        }
        Command::Perturb(a) => {
            let params = a.params.resolve(&catalog)?;
            let e = perturbation::estimates(&params, a.threshold_form.into());
            write_json(&a.out, &json!({ "reference_estimates": e, "unit": params.unit_label() }))?;
            Ok(Outcome::Done)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::NotConverged) => {
            eprintln!("error: basis size did not converge");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
