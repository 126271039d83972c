//! Command-line front end: argument grammar, exit codes and output files.

pub mod plot;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use dephaser::coupling::{Cutoff, SpectralDensity, TabulatedDensity};
use dephaser::harmonic::{decoherence_curve, HarmonicConfig};
use dephaser::lindblad::{trajectory, write_trajectory_csv, DensityMatrix2, LindbladParams};
use dephaser::rate::{rate_double_integral, rate_eq8, rate_monte_carlo, rate_validate, Method, MonteCarloConfig, MIN_SAMPLES};
use dephaser::sweep::{run_sweep, sweep_records, write_sweep_csv, Spacing, SweepAxis, SweepRecord, SweepSpec};
use dephaser::{DotGeometry, Error, MaterialParams, ThermalEnv};

const THREADS_VAR: &str = "DEPHASER_THREADS";

#[derive(Parser)]
#[command(name = "dephaser", version, about = "Phonon dephasing rates of double quantum dots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dephasing rate at one parameter point, as a one-row CSV.
    Rate(RateArgs),
    /// Rate over a temperature or separation grid.
    Sweep(SweepArgs),
    /// Cross-check the three rate routes against each other.
    Validate(ValidateArgs),
    /// Coherence decay of the linearly coupled harmonic model.
    Curve(CurveArgs),
    /// Markovian pure-dephasing evolution of a qubit density matrix.
    Evolve(EvolveArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Eq8,
    Double,
    Mc,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Eq8 => Method::Eq8,
            MethodArg::Double => Method::DoubleIntegral,
            MethodArg::Mc => Method::MonteCarlo,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Material file (`key = value`); GaAs defaults otherwise.
    #[arg(long)]
    material: Option<PathBuf>,
    /// Output file; stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct McArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000_000)]
    samples: u64,
}

impl McArgs {
    fn config(&self) -> Result<MonteCarloConfig, Fail> {
        if self.samples < MIN_SAMPLES {
            return Err(Fail::Usage(format!("--samples: need at least {MIN_SAMPLES}, got {}", self.samples)));
        }
        Ok(MonteCarloConfig {
            samples: self.samples,
            seed: self.seed,
        })
    }
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct RateArgs {
    /// Temperature, K.
    #[arg(long = "T")]
    t: f64,
    /// Dot size, m.
    #[arg(long = "L")]
    l: f64,
    /// Dot separation, m.
    #[arg(long = "D")]
    d: f64,
    #[arg(long, value_enum, default_value = "eq8")]
    method: MethodArg,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    #[value(name = "T")]
    T,
    #[value(name = "D")]
    D,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct SweepArgs {
    #[arg(long, value_enum)]
    axis: AxisArg,
    #[arg(long)]
    min: f64,
    #[arg(long)]
    max: f64,
    #[arg(long)]
    points: usize,
    /// Logarithmic grid.
    #[arg(long, conflicts_with = "linear")]
    log: bool,
    /// Linear grid (the default).
    #[arg(long)]
    linear: bool,
    /// Dot size, m.
    #[arg(long = "L")]
    l: f64,
    /// Temperature, K (required for a separation sweep).
    #[arg(long = "T")]
    t: Option<f64>,
    /// Dot separation, m (required for a temperature sweep).
    #[arg(long = "D")]
    d: Option<f64>,
    #[arg(long, value_enum, default_value = "eq8")]
    method: MethodArg,
    #[command(flatten)]
    mc: McArgs,
    /// Also write a log-log SVG chart of the rate.
    #[arg(long)]
    plot: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct ValidateArgs {
    #[arg(long = "T")]
    t: f64,
    #[arg(long = "L")]
    l: f64,
    #[arg(long = "D")]
    d: f64,
    #[command(flatten)]
    mc: McArgs,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpectralArg {
    /// A·ωⁿ·exp(−(ω/ω_c)²)
    Gaussian,
    /// A·ωⁿ·exp(−ω/ω_c)
    Exponential,
    /// Piecewise-linear table from --table.
    Table,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct CurveArgs {
    #[arg(long, value_enum)]
    spectral: SpectralArg,
    /// Amplitude A of J(ω) = A·ωⁿ·cutoff, J²·s^(1+n).
    #[arg(long = "A")]
    a: Option<f64>,
    #[arg(long)]
    n: Option<f64>,
    /// Cutoff frequency, rad/s.
    #[arg(long)]
    omega_c: Option<f64>,
    /// Two-column CSV `omega_rad_per_s,J` for --spectral table.
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long = "T")]
    t: f64,
    /// Time horizon, s.
    #[arg(long)]
    tmax: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Temperature scale in the coth argument, ħω/(θ·k_BT).
    #[arg(long, default_value_t = dephaser::harmonic::DEFAULT_COTH_THETA)]
    theta: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct EvolveArgs {
    /// Dephasing rate, 1/s.
    #[arg(long)]
    gamma: f64,
    /// Level splitting, J.
    #[arg(long = "E", default_value_t = 0.0)]
    e: f64,
    #[arg(long, default_value_t = 0.5)]
    rho00: f64,
    /// Initial coherence as `re,im`.
    #[arg(long)]
    rho01: String,
    /// Time horizon, s.
    #[arg(long)]
    tmax: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Fail {
    Usage(String),
    Numerical(String),
    Config(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Usage(_) => 1,
            Fail::Numerical(_) => 2,
            Fail::Config(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Fail::Usage(m) | Fail::Numerical(m) | Fail::Config(m) => m,
        }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { name, reason } => Fail::Usage(format!("--{}: {reason}", name.replace('_', "-"))),
            Error::InsufficientSamples { .. } => Fail::Usage(format!("--samples: {e}")),
            Error::InsufficientPoints { .. } => Fail::Usage(e.to_string()),
            Error::Quadrature { .. } | Error::ValidationFailed(_) => Fail::Numerical(e.to_string()),
            Error::Parse { .. } | Error::Io(_) => Fail::Config(e.to_string()),
        }
    }
}

fn on_flag(flag: &'static str) -> impl Fn(Error) -> Fail {
    move |e| match e {
        Error::InvalidParameter { reason, .. } => Fail::Usage(format!("--{flag}: {reason}")),
        other => other.into(),
    }
}

fn load_material(path: Option<&Path>) -> Result<MaterialParams, Fail> {
    match path {
        None => Ok(MaterialParams::gaas()),
        Some(p) => MaterialParams::from_file(p).map_err(|e| Fail::Config(format!("material file {}: {e}", p.display()))),
    }
}

fn geometry(l: f64, d: f64) -> Result<DotGeometry, Fail> {
    DotGeometry::new(l, 0.0).map_err(on_flag("L"))?;
    DotGeometry::new(l, d).map_err(on_flag("D"))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), Fail> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| Fail::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| Fail::Config(format!("cannot write stdout: {e}")))
        }
    }
}

fn csv_bytes(records: &[SweepRecord]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_sweep_csv(records, &mut buf).expect("writing to memory");
    buf
}

fn configure_threads() -> Result<(), Fail> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Fail::Usage(format!("{THREADS_VAR}: expected a non-negative integer, got `{raw}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Fail::Usage(format!("{THREADS_VAR}: {e}")))?;
    }
    Ok(())
}

fn cmd_rate(a: RateArgs) -> Result<(), Fail> {
    let m = load_material(a.common.material.as_deref())?;
    let g = geometry(a.l, a.d)?;
    let env = ThermalEnv::new(a.t).map_err(on_flag("T"))?;
    let method = Method::from(a.method);
    let r = match method {
        Method::Eq8 => rate_eq8(&m, &g, &env)?,
        Method::DoubleIntegral => rate_double_integral(&m, &g, &env)?,
        Method::MonteCarlo => {
            let mc = a.mc.config()?;
            rate_monte_carlo(&m, &g, &env, mc.samples, mc.seed)?
        }
    };
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    let record = SweepRecord {
        axis: SweepAxis::Temperature,
        axis_value: a.t,
        gamma: r.gamma,
        t2: r.t2,
        method: r.method,
        error_estimate: r.error_estimate,
    };
    emit(a.common.out.as_deref(), &csv_bytes(&[record]))
}

fn cmd_sweep(a: SweepArgs) -> Result<(), Fail> {
    let m = load_material(a.common.material.as_deref())?;
    let (axis, g, env) = match a.axis {
        AxisArg::T => {
            let d = a.d.ok_or_else(|| Fail::Usage("--D: required for a temperature sweep".into()))?;
            (SweepAxis::Temperature, geometry(a.l, d)?, ThermalEnv { temperature: 0.0 })
        }
        AxisArg::D => {
            let t = a.t.ok_or_else(|| Fail::Usage("--T: required for a distance sweep".into()))?;
            (SweepAxis::Distance, geometry(a.l, 0.0)?, ThermalEnv::new(t).map_err(on_flag("T"))?)
        }
    };
    let method = Method::from(a.method);
    let mc = if method == Method::MonteCarlo {
        a.mc.config()?
    } else {
        MonteCarloConfig::default()
    };
    let spec = SweepSpec {
        axis,
        min: a.min,
        max: a.max,
        points: a.points,
        spacing: if a.log { Spacing::Logarithmic } else { Spacing::Linear },
        material: m,
        geometry: g,
        env,
        method,
        mc,
    };
    let rows = run_sweep(&spec)?;
    let mut failure = None;
    for row in &rows {
        match &row.result {
            Ok(r) => {
                for w in &r.warnings {
                    eprintln!("warning: {} = {}: {w}", axis, row.axis_value);
                }
            }
            Err(e) => {
                eprintln!("error: {} = {}: {e}", axis, row.axis_value);
                failure.get_or_insert_with(|| Fail::from(e.clone()));
            }
        }
    }
    let records = sweep_records(&spec, &rows);
    emit(a.common.out.as_deref(), &csv_bytes(&records))?;
    if let Some(path) = &a.plot {
        let (x_label, unit) = match axis {
            SweepAxis::Temperature => ("T (K)", "temperature"),
            SweepAxis::Distance => ("D (m)", "distance"),
        };
        let series = plot::Series {
            label: unit,
            points: records.iter().map(|r| (r.axis_value, r.gamma)).collect(),
        };
        let svg = plot::log_log_svg(&[series], x_label, "gamma (1/s)");
        fs::write(path, svg).map_err(|e| Fail::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    match failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn cmd_validate(a: ValidateArgs) -> Result<(), Fail> {
    let m = load_material(a.common.material.as_deref())?;
    let g = geometry(a.l, a.d)?;
    let env = ThermalEnv::new(a.t).map_err(on_flag("T"))?;
    let mc = a.mc.config()?;
    match rate_validate(&m, &g, &env, mc) {
        Ok(report) => emit(a.common.out.as_deref(), report.to_string().as_bytes()),
        Err(Error::ValidationFailed(report)) => {
            emit(a.common.out.as_deref(), report.to_string().as_bytes())?;
            Err(Fail::Numerical("route cross-validation failed".into()))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_curve(a: CurveArgs) -> Result<(), Fail> {
    let env = ThermalEnv::new(a.t).map_err(on_flag("T"))?;
    let sd = match a.spectral {
        SpectralArg::Table => {
            let path = a.table.as_deref().ok_or_else(|| Fail::Usage("--table: required for --spectral table".into()))?;
            let table = TabulatedDensity::from_csv_file(path).map_err(|e| Fail::Config(format!("table {}: {e}", path.display())))?;
            SpectralDensity::Tabulated(table)
        }
        form => {
            let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| Fail::Usage(format!("--{flag}: required for a power-law density")));
            let cutoff = if matches!(form, SpectralArg::Gaussian) { Cutoff::Gaussian } else { Cutoff::Exponential };
            SpectralDensity::power_law(need(a.a, "A")?, need(a.n, "n")?, need(a.omega_c, "omega-c")?, cutoff)?
        }
    };
    let cfg = HarmonicConfig {
        coth_theta: a.theta,
        ..HarmonicConfig::default()
    };
    let curve = decoherence_curve(&sd, &env, a.tmax, a.points, &cfg)?;
    match curve.plateau {
        Some(p) => eprintln!("plateau: {}", dephaser::format::float(p)),
        None => eprintln!("plateau: divergent"),
    }
    let mut buf = Vec::new();
    curve.write_csv(&mut buf).expect("writing to memory");
    emit(a.out.as_deref(), &buf)
}

fn parse_complex(s: &str) -> Option<Complex64> {
    let (re, im) = s.split_once(',')?;
    Some(Complex64::new(re.trim().parse().ok()?, im.trim().parse().ok()?))
}

fn cmd_evolve(a: EvolveArgs) -> Result<(), Fail> {
    let rho01 = parse_complex(&a.rho01).ok_or_else(|| Fail::Usage(format!("--rho01: expected `re,im`, got `{}`", a.rho01)))?;
    let rho = DensityMatrix2::with_population(a.rho00, rho01).map_err(|e| Fail::Usage(format!("--rho01/--rho00: {e}")))?;
    let p = LindbladParams::new(a.gamma, a.e).map_err(|e| match e {
        Error::InvalidParameter { name: "gamma", reason } => Fail::Usage(format!("--gamma: {reason}")),
        other => on_flag("E")(other),
    })?;
    if p.markov_warning() {
        eprintln!(
            "warning: T2 = {:e} s is below {:e} s; Markov limit is questionable",
            1.0 / p.gamma,
            dephaser::lindblad::MARKOV_MIN_T2
        );
    }
    let rows = trajectory(&rho, &p, a.tmax, a.points)?;
    let mut buf = Vec::new();
    write_trajectory_csv(&rows, &mut buf).expect("writing to memory");
    emit(a.out.as_deref(), &buf)
}

/// Parses the process arguments, runs the subcommand and maps failures to
/// exit codes 1 (usage), 2 (numerical) and 3 (configuration).
pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let run = configure_threads().and_then(|_| match cli.command {
        Command::Rate(a) => cmd_rate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Curve(a) => cmd_curve(a),
        Command::Evolve(a) => cmd_evolve(a),
    });
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
