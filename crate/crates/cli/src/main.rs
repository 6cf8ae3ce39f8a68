//! Command-line interface to the liquidation-game solvers: bundled presets
//! and TOML experiment configurations in, deterministic CSV/JSON artifacts
//! out.
//!
//! ```text
//! liqgame <COMMAND> (--preset NAME | --config PATH) [--grid-h H] [--out DIR]
//! ```
//!
//! Exit codes: `0` success; `1` artifacts could not be written; `2`
//! configuration error (syntax, schema, or domain); `3` solver failure;
//! `4` reference-check mismatch in `reproduce --check`.

mod check;
mod config;
mod emit;
mod pipeline;

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{Artifact, ConfigError, Experiment};

/// Process-level failure classes and their exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Configuration could not be resolved (exit 2).
    Config(ConfigError),
    /// A solver or evaluation step failed (exit 3).
    Solver(liqgame_core::Error),
    /// Artifacts could not be written (exit 1).
    Io(std::io::Error),
    /// `reproduce --check` found mismatches against the reference values
    /// (exit 4).
    Check(Vec<String>),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            Self::Io(_) => 1,
            Self::Config(_) => 2,
            Self::Solver(_) => 3,
            Self::Check(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Config(e) => write!(f, "error: {e}"),
            Self::Solver(e) => write!(f, "solver error: {e}"),
            Self::Io(e) => write!(f, "io error: {e}"),
            Self::Check(lines) => {
                writeln!(f, "reference check failed ({} mismatch(es)):", lines.len())?;
                for line in lines {
                    writeln!(f, "  {line}")?;
                }
                Ok(())
            }
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

impl From<liqgame_core::Error> for CliError {
    fn from(e: liqgame_core::Error) -> Self {
        Self::Solver(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

/// Open-loop Nash equilibria of a major–minor liquidation game: solvers,
/// decompositions, cost tables, and spectra.
#[derive(Parser)]
#[command(name = "liqgame", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the sufficient well-posedness condition and report a witness.
    Validate(CommonArgs),
    /// Solve the equilibrium and the interaction-free benchmark; write
    /// trajectory CSVs.
    Solve(CommonArgs),
    /// Split the equilibrium into ramp, periodic, and trend components.
    Decompose(CommonArgs),
    /// Evaluate both traders' cost breakdowns, with and without interactions.
    Costs(CommonArgs),
    /// Peak-to-midline amplitudes of the periodic components.
    Amplitudes(CommonArgs),
    /// Fourier mode magnitudes of the aggregate rate and of the price path.
    Spectrum(CommonArgs),
    /// Best-response gaps of the finite-population game against their bounds.
    Nplayer(NplayerArgs),
    /// Run an experiment end to end and write every requested artifact plus a
    /// summary; optionally compare presets against frozen reference values.
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Bundled preset: cos, twap, or vwap.
    #[arg(long, value_name = "NAME", conflicts_with = "config")]
    preset: Option<String>,
    /// Path to a TOML experiment configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override the grid step h.
    #[arg(long, value_name = "H")]
    grid_h: Option<f64>,
    /// Output directory, created if missing (overrides the configuration's
    /// output_dir; default ".").
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NplayerArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Minor-population sizes (overrides the configuration).
    #[arg(long, value_name = "N1,N2,...", value_delimiter = ',')]
    n: Option<Vec<usize>>,
}

#[derive(Args)]
struct ReproduceArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Compare the computed tables (and spectra) against the frozen
    /// reference values; mismatches exit nonzero.
    #[arg(long)]
    check: bool,
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprint!("{err}");
        eprintln!();
        std::process::exit(err.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate(args) => cmd_validate(&resolve(&args)?),
        Command::Solve(args) => cmd_solve(&resolve(&args)?),
        Command::Decompose(args) => cmd_decompose(&resolve(&args)?),
        Command::Costs(args) => cmd_costs(&resolve(&args)?),
        Command::Amplitudes(args) => cmd_amplitudes(&resolve(&args)?),
        Command::Spectrum(args) => cmd_spectrum(&resolve(&args)?),
        Command::Nplayer(args) => {
            let mut exp = resolve(&args.common)?;
            if let Some(sizes) = args.n {
                if sizes.is_empty() {
                    return Err(
                        ConfigError::Schema("--n must list at least one size".into()).into()
                    );
                }
                exp.nplayer_sizes = sizes;
            }
            cmd_nplayer(&exp)
        }
        Command::Reproduce(args) => cmd_reproduce(&resolve(&args.common)?, args.check),
    }
}

/// Builds the experiment from exactly one of `--preset` / `--config`.
fn resolve(args: &CommonArgs) -> Result<Experiment, CliError> {
    match (&args.preset, &args.config) {
        (Some(name), None) => Ok(Experiment::from_preset(name, args.grid_h, args.out.clone())?),
        (None, Some(path)) => Ok(Experiment::from_file(path, args.grid_h, args.out.clone())?),
        (None, None) => {
            Err(ConfigError::Schema("either --preset or --config is required".into()).into())
        }
        (Some(_), Some(_)) => unreachable!("clap rejects --preset together with --config"),
    }
}

fn cmd_validate(exp: &Experiment) -> Result<(), CliError> {
    let report = liqgame_core::validate_params(&exp.params);
    println!("feasible: {}", report.feasible);
    if let Some((t1, t2, t3)) = report.witness {
        println!("witness: theta1 = {t1:.6}, theta2 = {t2:.6}, theta3 = {t3:.6}");
    }
    if let Some(m) = report.margins {
        println!("margins: {:.3e}, {:.3e}, {:.3e}, {:.3e}", m[0], m[1], m[2], m[3]);
    }
    Ok(())
}

fn cmd_solve(exp: &Experiment) -> Result<(), CliError> {
    emit::ensure_dir(&exp.output_dir)?;
    let (sol, benchmark) = pipeline::solve_pair(exp)?;
    write_trajectories(exp, &sol, &benchmark)?;
    Ok(())
}

fn cmd_decompose(exp: &Experiment) -> Result<(), CliError> {
    emit::ensure_dir(&exp.output_dir)?;
    let bundle = pipeline::periodic_bundle(exp)?;
    write_decomposition(exp, &bundle)?;
    Ok(())
}

fn cmd_costs(exp: &Experiment) -> Result<(), CliError> {
    emit::ensure_dir(&exp.output_dir)?;
    let (sol, benchmark) = pipeline::solve_pair(exp)?;
    let costs = pipeline::cost_table(exp, &sol, &benchmark)?;
    note(emit::write_json(&exp.output_dir, "costs.json", &costs)?);
    Ok(())
}

fn cmd_amplitudes(exp: &Experiment) -> Result<(), CliError> {
    emit::ensure_dir(&exp.output_dir)?;
    let bundle = pipeline::periodic_bundle(exp)?;
    let amplitudes = pipeline::amplitudes(exp, &bundle);
    note(emit::write_json(&exp.output_dir, "amplitudes.json", &amplitudes)?);
    Ok(())
}

fn cmd_spectrum(exp: &Experiment) -> Result<(), CliError> {
    emit::ensure_dir(&exp.output_dir)?;
    let (sol, benchmark) = pipeline::solve_pair(exp)?;
    let (rate, price) = pipeline::spectra(exp, &sol, &benchmark)?;
    write_spectra(exp, &rate, &price)?;
    Ok(())
}

fn cmd_nplayer(exp: &Experiment) -> Result<(), CliError> {
    emit::ensure_dir(&exp.output_dir)?;
    let sol = liqgame_core::solve_equilibrium(&exp.params, &exp.inv, &exp.target, &exp.grid)?;
    let rows = pipeline::gap_rows(exp, &sol)?;
    note(emit::write_json(&exp.output_dir, "gap_report.json", &rows)?);
    Ok(())
}

fn cmd_reproduce(exp: &Experiment, check: bool) -> Result<(), CliError> {
    emit::ensure_dir(&exp.output_dir)?;
    let wants = |a: Artifact| exp.artifacts.contains(&a);

    let (sol, benchmark) = pipeline::solve_pair(exp)?;
    let costs = pipeline::cost_table(exp, &sol, &benchmark)?;
    let bundle = if wants(Artifact::Decomposition) || wants(Artifact::Amplitudes) {
        Some(pipeline::periodic_bundle(exp)?)
    } else {
        None
    };
    let amplitudes = bundle.as_ref().map(|b| pipeline::amplitudes(exp, b));
    let spectra = if wants(Artifact::Spectrum) {
        Some(pipeline::spectra(exp, &sol, &benchmark)?)
    } else {
        None
    };

    if wants(Artifact::Trajectories) {
        write_trajectories(exp, &sol, &benchmark)?;
    }
    if let Some(bundle) = bundle.as_ref().filter(|_| wants(Artifact::Decomposition)) {
        write_decomposition(exp, bundle)?;
    }
    if wants(Artifact::Costs) {
        note(emit::write_json(&exp.output_dir, "costs.json", &costs)?);
    }
    if let Some(amplitudes) = amplitudes.as_ref().filter(|_| wants(Artifact::Amplitudes)) {
        note(emit::write_json(&exp.output_dir, "amplitudes.json", amplitudes)?);
    }
    if let Some((rate, price)) = spectra.as_ref() {
        write_spectra(exp, rate, price)?;
    }
    if wants(Artifact::Nplayer) {
        let rows = pipeline::gap_rows(exp, &sol)?;
        note(emit::write_json(&exp.output_dir, "gap_report.json", &rows)?);
    }

    let amplitude_table = amplitudes
        .as_ref()
        .map(|a| a.as_table(pipeline::price_convention_is_inventory(&exp.target)));
    let summary = pipeline::Summary::new(exp, &costs, amplitude_table);
    note(emit::write_json(&exp.output_dir, "summary.json", &summary)?);

    if check {
        let preset = exp.preset.as_deref().ok_or_else(|| {
            ConfigError::Schema(
                "--check requires --preset: reference values exist only for bundled presets".into(),
            )
        })?;
        let failures = check::check_preset(
            preset,
            &costs,
            amplitude_table.as_ref(),
            spectra.as_ref().map(|(rate, price)| (rate, price)),
        );
        if !failures.is_empty() {
            return Err(CliError::Check(failures));
        }
        println!("check: all comparisons within tolerance");
    }
    Ok(())
}

fn write_trajectories(
    exp: &Experiment,
    sol: &liqgame_core::EquilibriumSolution,
    benchmark: &liqgame_core::EquilibriumSolution,
) -> Result<(), CliError> {
    note(emit::write_csv(
        &exp.output_dir,
        "trajectories.csv",
        pipeline::TRAJECTORY_HEADER,
        &pipeline::trajectory_rows(sol, &exp.params),
    )?);
    note(emit::write_csv(
        &exp.output_dir,
        "trajectories_no_interaction.csv",
        pipeline::TRAJECTORY_HEADER,
        &pipeline::trajectory_rows(benchmark, &exp.params),
    )?);
    Ok(())
}

fn write_decomposition(
    exp: &Experiment,
    bundle: &pipeline::PeriodicBundle,
) -> Result<(), CliError> {
    note(emit::write_csv(
        &exp.output_dir,
        "decomposition.csv",
        pipeline::DECOMPOSITION_HEADER,
        &pipeline::decomposition_rows(&bundle.decomposition),
    )?);
    Ok(())
}

fn write_spectra(
    exp: &Experiment,
    rate: &pipeline::SpectrumRows,
    price: &pipeline::SpectrumRows,
) -> Result<(), CliError> {
    note(emit::write_spectrum_csv(&exp.output_dir, "spectrum.csv", rate)?);
    note(emit::write_spectrum_csv(&exp.output_dir, "spectrum_price.csv", price)?);
    Ok(())
}

/// Reports one written artifact on stdout.
fn note(path: PathBuf) {
    println!("wrote {}", path.display());
}
