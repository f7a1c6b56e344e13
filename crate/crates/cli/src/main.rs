//! Command-line front end: configures runs, executes the pipeline and writes
//! deterministic CSV files reproducing the decoherent-walk figures.
//!
//! Exit codes: 0 success, 2 invalid arguments, 3 numerical failure,
//! 4 I/O failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use nmqw::{
    correlation_trajectory, evolve, first_moment_exact, kappa_volterra, longtime_variance,
    position_distribution, sample_closed_form, schedule, second_moment_exact, variance,
    BlochVector, C64, CoinDensity, CoinOperator, CorrelationOpts, DecoherenceFunction,
    KernelParams, PositionDistribution, QuadratureSettings, ScheduleMode, StepSchedule,
    WalkConfig,
};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "nmqw",
    about = "Quantum walk on a line with a non-Markovian dephasing coin",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decoherence function and rates: t, re_kappa, im_kappa, gamma, epsilon, singular
    Kappa(KappaArgs),
    /// Walk evolution: summary (t, mean, var) and per-step distributions (t, x, p)
    Simulate(SimulateArgs),
    /// Correlation trajectory: t, mutual_info, mid, qd, qd_theta, qd_phi, degenerate_flag
    Correlations(CorrelationsArgs),
    /// Analytic variance columns only: t, var_exact, var_longtime
    Analytic(AnalyticArgs),
    /// Simulated vs analytic variance: t, var_sim, var_exact, var_longtime, rel errors
    Compare(AnalyticArgs),
}

#[derive(Args, Clone)]
struct KernelArgs {
    /// Coupling strength between coin and environment
    #[arg(long, default_value_t = 1.0)]
    g0: f64,
    /// Spectral width of the reservoir
    #[arg(long, default_value_t = 0.01)]
    eta: f64,
}

#[derive(Args)]
struct KappaArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    /// Volterra solver grid spacing
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Largest sampled time
    #[arg(long = "t-max", default_value_t = 100.0)]
    t_max: f64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq)]
enum Mode {
    Absolute,
    Incremental,
    Frozen,
}

#[derive(Args, Clone)]
struct RunArgs {
    #[command(flatten)]
    kernel: KernelArgs,
    /// Number of walk steps
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Per-step coherence schedule
    #[arg(long, value_enum, default_value_t = Mode::Absolute)]
    mode: Mode,
    /// Constant coherence factor for --mode frozen
    #[arg(long)]
    kappa: Option<f64>,
    /// Initial coin: symmetric | right | left | plus | "a_re,a_im,b_re,b_im"
    #[arg(long, default_value = "symmetric")]
    coin: String,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Append classical-RW and ideal-QW variance baseline columns
    #[arg(long)]
    baselines: bool,
    /// Summary output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-step distribution output file (skipped when omitted)
    #[arg(long = "dist-out")]
    dist_out: Option<PathBuf>,
    /// Steps whose distributions are exported (default: all)
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<usize>>,
}

#[derive(Args)]
struct CorrelationsArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Coarse discord grid resolution in theta
    #[arg(long = "qd-grid-theta", default_value_t = 32)]
    qd_grid_theta: usize,
    /// Coarse discord grid resolution in phi
    #[arg(long = "qd-grid-phi", default_value_t = 64)]
    qd_grid_phi: usize,
    /// Extra random refinement starts for the discord optimizer
    #[arg(long = "qd-restarts", default_value_t = 0)]
    qd_restarts: usize,
    /// RNG seed for randomized refinement starts
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyticArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Quadrature points for the momentum integrals
    #[arg(long = "quad-n", default_value_t = 1024)]
    quad_n: usize,
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Args(String),
    Numerical(String),
    Io(std::io::Error),
}

impl From<nmqw::Error> for CliError {
    fn from(e: nmqw::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Kappa(args) => run_kappa(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Correlations(args) => run_correlations(args),
        Command::Analytic(args) => run_analytic(args, false),
        Command::Compare(args) => run_analytic(args, true),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Args(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
        // a closed pipe on stdout (e.g. `nmqw kappa | head`) is not a failure
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(CliError::Io(e)) => {
            eprintln!("i/o failure: {e}");
            ExitCode::from(4)
        }
    }
}

fn kernel_params(args: &KernelArgs) -> Result<KernelParams, CliError> {
    KernelParams::new(args.g0, args.eta).map_err(|e| CliError::Args(e.to_string()))
}

fn parse_coin(spec: &str) -> Result<CoinDensity, CliError> {
    let coin = match spec {
        "symmetric" => CoinDensity::symmetric(),
        "right" => CoinDensity::from_pure(C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap(),
        "left" => CoinDensity::from_pure(C64::new(0.0, 0.0), C64::new(1.0, 0.0)).unwrap(),
        "plus" => CoinDensity::from_pure(C64::new(1.0, 0.0), C64::new(1.0, 0.0)).unwrap(),
        other => {
            let parts: Vec<f64> = other
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::Args(format!("cannot parse coin spec '{other}'")))?;
            if parts.len() != 4 {
                return Err(CliError::Args(
                    "coin spec needs 4 comma-separated floats (a_re,a_im,b_re,b_im)".into(),
                ));
            }
            CoinDensity::from_pure(C64::new(parts[0], parts[1]), C64::new(parts[2], parts[3]))
                .map_err(|e| CliError::Args(e.to_string()))?
        }
    };
    Ok(coin)
}

/// Schedule for a run; absolute/incremental modes sample the closed-form
/// kappa so schedules carry no solver error.
fn build_schedule(run: &RunArgs) -> Result<(StepSchedule, Option<DecoherenceFunction>), CliError> {
    if run.steps < 1 {
        return Err(CliError::Args("--steps must be at least 1".into()));
    }
    match run.mode {
        Mode::Frozen => {
            let kappa = run
                .kappa
                .ok_or_else(|| CliError::Args("--mode frozen requires --kappa".into()))?;
            if kappa.abs() > 1.0 {
                return Err(CliError::Args(format!(
                    "--kappa must satisfy |kappa| <= 1, got {kappa}"
                )));
            }
            Ok((StepSchedule::frozen(C64::new(kappa, 0.0), run.steps)?, None))
        }
        mode => {
            let params = kernel_params(&run.kernel)?;
            let df = sample_closed_form(&params, 1.0, run.steps as f64)?;
            let mode = match mode {
                Mode::Absolute => ScheduleMode::Absolute,
                Mode::Incremental => ScheduleMode::Incremental,
                Mode::Frozen => unreachable!(),
            };
            Ok((schedule(&df, run.steps, mode)?, Some(df)))
        }
    }
}

fn writer(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match out {
        Some(path) => Ok(Box::new(BufWriter::new(File::create(path)?))),
        None => Ok(Box::new(BufWriter::new(std::io::stdout()))),
    }
}

fn run_kappa(args: KappaArgs) -> Result<(), CliError> {
    let params = kernel_params(&args.kernel)?;
    if args.dt <= 0.0 {
        return Err(CliError::Args("--dt must be positive".into()));
    }
    if args.t_max < args.dt {
        return Err(CliError::Args("--t-max must be at least --dt".into()));
    }
    let df = kappa_volterra(&params, args.dt, args.t_max)?;
    let mut out = writer(&args.out)?;
    nmqw::csv::write_kappa(&mut out, &df)?;
    out.flush()?;
    Ok(())
}

fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let coin = parse_coin(&args.run.coin)?;
    let (sched, _) = build_schedule(&args.run)?;
    let config = WalkConfig::with_coin(args.run.steps, coin, CoinOperator::hadamard(), sched)?;

    let mut rows = Vec::with_capacity(args.run.steps + 1);
    let mut dists: Vec<PositionDistribution> = Vec::new();
    let wanted: Option<&[usize]> = args.snapshots.as_deref();
    for state in evolve(&config) {
        let state = state?;
        let dist = position_distribution(&state);
        let mean: f64 = dist.points().map(|(x, p)| x as f64 * p).sum();
        rows.push((state.t(), mean, variance(&dist)));
        if args.dist_out.is_some() && wanted.map_or(true, |w| w.contains(&state.t())) {
            dists.push(dist);
        }
    }

    let baselines = if args.baselines {
        let ideal_config = WalkConfig::with_coin(
            args.run.steps,
            coin,
            CoinOperator::hadamard(),
            StepSchedule::ideal(args.run.steps),
        )?;
        let ideal_vars: Vec<f64> = evolve(&ideal_config)
            .map(|s| s.map(|s| variance(&position_distribution(&s))))
            .collect::<Result<_, _>>()?;
        // classical RW variance is exactly t
        Some(
            rows.iter()
                .zip(ideal_vars)
                .map(|(&(t, _, _), vi)| (t as f64, vi))
                .collect::<Vec<_>>(),
        )
    } else {
        None
    };

    let mut out = writer(&args.out)?;
    nmqw::csv::write_summary(&mut out, &rows, baselines.as_deref())?;
    out.flush()?;
    if let Some(path) = &args.dist_out {
        let mut dist_out = writer(&Some(path.clone()))?;
        nmqw::csv::write_distributions(&mut dist_out, &dists)?;
        dist_out.flush()?;
    }
    Ok(())
}

fn run_correlations(args: CorrelationsArgs) -> Result<(), CliError> {
    let coin = parse_coin(&args.run.coin)?;
    let (sched, _) = build_schedule(&args.run)?;
    let config = WalkConfig::with_coin(args.run.steps, coin, CoinOperator::hadamard(), sched)?;
    let opts = CorrelationOpts {
        grid_theta: args.qd_grid_theta,
        grid_phi: args.qd_grid_phi,
        random_restarts: args.qd_restarts,
        rng_seed: args.seed,
        ..CorrelationOpts::default()
    };
    let records = correlation_trajectory(evolve(&config), &opts)?;
    let mut out = writer(&args.out)?;
    nmqw::csv::write_correlations(&mut out, &records)?;
    out.flush()?;
    Ok(())
}

/// Coherence factor entering the analytic columns at step t: the closed-form
/// kappa(t) substitution, or the frozen constant.
fn analytic_kappa(run: &RunArgs, params: Option<&KernelParams>, t: usize) -> Result<C64, CliError> {
    match run.mode {
        Mode::Frozen => Ok(C64::new(run.kappa.expect("checked by caller"), 0.0)),
        _ => {
            let params = params.expect("kernel params exist for non-frozen modes");
            Ok(nmqw::kappa_closed_form(params, t as f64)?)
        }
    }
}

fn run_analytic(args: AnalyticArgs, with_simulation: bool) -> Result<(), CliError> {
    let quad = QuadratureSettings::new(args.quad_n).map_err(|e| CliError::Args(e.to_string()))?;
    let coin = parse_coin(&args.run.coin)?;
    let bloch = BlochVector::from_coin(&coin);
    let params = match args.run.mode {
        Mode::Frozen => {
            if args.run.kappa.is_none() {
                return Err(CliError::Args("--mode frozen requires --kappa".into()));
            }
            None
        }
        _ => Some(kernel_params(&args.run.kernel)?),
    };

    let var_sim: Vec<f64> = if with_simulation {
        let (sched, _) = build_schedule(&args.run)?;
        let config = WalkConfig::with_coin(args.run.steps, coin, CoinOperator::hadamard(), sched)?;
        evolve(&config)
            .map(|s| s.map(|s| variance(&position_distribution(&s))))
            .collect::<Result<_, _>>()?
    } else {
        Vec::new()
    };

    let mut rows = Vec::with_capacity(args.run.steps);
    for t in 1..=args.run.steps {
        let kappa = analytic_kappa(&args.run, params.as_ref(), t)?;
        let m1 = first_moment_exact(t, kappa, &bloch, &quad)?;
        let m2 = second_moment_exact(t, kappa, &bloch, &quad)?;
        let var_exact = m2 - m1 * m1;
        let var_lt = longtime_variance(t, kappa, &bloch)?;
        let sim = if with_simulation { var_sim[t] } else { f64::NAN };
        rows.push((t, sim, var_exact, var_lt));
    }

    let mut out = writer(&args.out)?;
    nmqw::csv::write_compare(&mut out, &rows)?;
    out.flush()?;
    Ok(())
}
