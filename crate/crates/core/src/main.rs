use clap::{Parser, Subcommand, ValueEnum};
use gaussest::config::{parse_config, ConfigOverrides};
use gaussest::emit::{emit_rows, parse_csv, write_plot_data, OutputFormat};
use gaussest::error::Error;
use gaussest::experiment::{run_sweep, summarize, DEFAULT_MASTER_SEED};
use gaussest::gaussian::{GaussianState, StateParams};
use gaussest::measurement::Meter;
use gaussest::protocol::{
    distances, estimate_from_readings, run_projective_baseline, run_weak_protocol,
    EstimatorOptions,
};
use gaussest::rng::{stream_tag, substream};
use gaussest::selfcheck::validate_selfcheck;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;
const EXIT_SELFCHECK: u8 = 4;

/// Optional worker-thread override; affects speed only, never output
/// bytes.
const THREADS_ENV: &str = "GAUSSEST_THREADS";

#[derive(Parser)]
#[command(name = "gaussest", version, about = "Gaussian state estimation with recycled weak measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one weak-then-projective trial and print readings, estimate,
    /// and distances as JSON.
    Single(SingleArgs),
    /// Run one projective-only trial (no meter).
    Baseline(BaselineArgs),
    /// Monte Carlo sweep over measurement weakness; writes one row per
    /// (kappa, ensemble size, grid point, scheme).
    Sweep(Box<SweepArgs>),
    /// Expand an emitted CSV into per-(kappa, ensemble size) plot files.
    PlotData(PlotDataArgs),
    /// Run the fast analytic self-checks.
    Validate,
}

#[derive(clap::Args)]
struct StateArgs {
    /// Temperature parameter in (0, 1].
    #[arg(long)]
    kappa: f64,
    /// Squeezing parameter.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    u: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    q0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    p0: f64,
    /// Ensemble size (even).
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SingleArgs {
    #[command(flatten)]
    state: StateArgs,
    /// Measurement weakness 1/dqm; defaults to the noise-disturbance
    /// optimum sqrt(2).
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    inv_dqm: f64,
    /// Keep the meter noise inside the spread estimates.
    #[arg(long)]
    no_deconvolve: bool,
    /// Inverse-variance weighting of the channel means.
    #[arg(long)]
    weighting: bool,
}

#[derive(clap::Args)]
struct BaselineArgs {
    #[command(flatten)]
    state: StateArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct SweepArgs {
    /// JSON config file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,

    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    n_states: Option<usize>,
    #[arg(long)]
    n_runs: Option<usize>,
    /// Comma-separated even sizes, e.g. 20,10,8,6.
    #[arg(long, value_delimiter = ',')]
    ensemble_sizes: Option<Vec<usize>>,
    /// Comma-separated increasing 1/dqm values.
    #[arg(long, value_delimiter = ',')]
    inv_dqm_grid: Option<Vec<f64>>,
    /// Squeezing range as lo,hi.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    u_range: Option<Vec<f64>>,
    /// Center range as lo,hi.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    center_range: Option<Vec<f64>>,
    #[arg(long)]
    master_seed: Option<u64>,
    #[arg(long)]
    deconvolve: Option<bool>,
    #[arg(long)]
    weighting: Option<bool>,
    #[arg(long)]
    average_estimates_first: Option<bool>,
    #[arg(long)]
    d2_printed_form: Option<bool>,
}

#[derive(clap::Args)]
struct PlotDataArgs {
    /// CSV produced by `sweep --format csv`.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_thread_pool();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn init_thread_pool() {
    if let Ok(value) = std::env::var(THREADS_ENV) {
        match value.parse::<usize>() {
            Ok(threads) if threads > 0 => {
                // ignore failure if a pool is already installed
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
            _ => eprintln!("warning: ignoring {THREADS_ENV}={value}"),
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidParameter { .. }
        | Error::InsufficientEnsemble { .. }
        | Error::InsufficientData { .. }
        | Error::ConfigParse(_)
        | Error::ConfigInvalid { .. } => EXIT_CONFIG,
        Error::Format(_) | Error::Io(_) => EXIT_RUNTIME,
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Single(args) => single(args),
        Command::Baseline(args) => baseline(args),
        Command::Sweep(args) => sweep(*args),
        Command::PlotData(args) => plot_data(args),
        Command::Validate => validate(),
    }
}

fn state_json(state: &GaussianState, params: &StateParams) -> serde_json::Value {
    json!({
        "u": params.u,
        "kappa": params.kappa,
        "q0": state.q0(),
        "p0": state.p0(),
        "dq": state.dq(),
        "dp": state.dp(),
    })
}

fn write_report(out: Option<PathBuf>, report: &serde_json::Value) -> Result<(), Error> {
    let text = format!("{}\n", serde_json::to_string_pretty(report).expect("serializable"));
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn single(args: SingleArgs) -> Result<ExitCode, Error> {
    let params = StateParams::new(args.state.u, args.state.kappa, args.state.q0, args.state.p0);
    let state = GaussianState::from_params(&params)?;
    let meter = if args.inv_dqm.is_finite() && args.inv_dqm > 0.0 {
        Meter::new(1.0 / args.inv_dqm)?
    } else {
        return Err(Error::InvalidParameter {
            name: "inv_dqm",
            reason: "must be finite and positive".into(),
        });
    };
    let opts = EstimatorOptions {
        deconvolve: !args.no_deconvolve,
        inverse_variance_weighting: args.weighting,
    };
    let mut rng = substream(args.state.seed, &[stream_tag::SINGLE]);
    let readings = run_weak_protocol(&state, args.state.n, &meter, &mut rng)?;
    let est = estimate_from_readings(&readings, &meter, &opts)?;
    let d = distances(&state, &est);
    let report = json!({
        "scheme": est.scheme.as_str(),
        "seed": args.state.seed,
        "n": args.state.n,
        "state": state_json(&state, &params),
        "meter": { "dqm": meter.dqm(), "dpm": meter.dpm() },
        "readings": {
            "weak_q": readings.weak_q,
            "strong_p": readings.strong_p,
            "weak_p": readings.weak_p,
            "strong_q": readings.strong_q,
        },
        "estimate": {
            "q0_est": est.q0_est,
            "p0_est": est.p0_est,
            "dq_est": est.dq_est,
            "dp_est": est.dp_est,
            "n_q": est.n_q,
            "n_p": est.n_p,
        },
        "distances": { "d1": d.d1, "d2": d.d2 },
    });
    write_report(args.state.out, &report)?;
    Ok(ExitCode::SUCCESS)
}

fn baseline(args: BaselineArgs) -> Result<ExitCode, Error> {
    let params = StateParams::new(args.state.u, args.state.kappa, args.state.q0, args.state.p0);
    let state = GaussianState::from_params(&params)?;
    let mut rng = substream(args.state.seed, &[stream_tag::BASELINE]);
    let est = run_projective_baseline(&state, args.state.n, &mut rng)?;
    let d = distances(&state, &est);
    let report = json!({
        "scheme": est.scheme.as_str(),
        "seed": args.state.seed,
        "n": args.state.n,
        "state": state_json(&state, &params),
        "estimate": {
            "q0_est": est.q0_est,
            "p0_est": est.p0_est,
            "dq_est": est.dq_est,
            "dp_est": est.dp_est,
            "n_q": est.n_q,
            "n_p": est.n_p,
        },
        "distances": { "d1": d.d1, "d2": d.d2 },
    });
    write_report(args.state.out, &report)?;
    Ok(ExitCode::SUCCESS)
}

fn sweep(args: SweepArgs) -> Result<ExitCode, Error> {
    let bytes = match &args.config {
        Some(path) => std::fs::read(path)?,
        None => Vec::new(),
    };
    let range_pair = |field: &'static str, v: Option<Vec<f64>>| match v {
        None => Ok(None),
        Some(v) if v.len() == 2 => Ok(Some((v[0], v[1]))),
        Some(v) => Err(Error::ConfigInvalid {
            field,
            reason: format!("expected lo,hi but got {} value(s)", v.len()),
        }),
    };
    let overrides = ConfigOverrides {
        kappa: args.kappa,
        n_states: args.n_states,
        n_runs: args.n_runs,
        ensemble_sizes: args.ensemble_sizes,
        inv_dqm_grid: args.inv_dqm_grid,
        u_range: range_pair("u_range", args.u_range)?,
        center_range: range_pair("center_range", args.center_range)?,
        master_seed: args.master_seed,
        deconvolve: args.deconvolve,
        weighting: args.weighting,
        average_estimates_first: args.average_estimates_first,
        d2_printed_form: args.d2_printed_form,
    };
    let config = parse_config(&bytes, &overrides)?;
    let result = run_sweep(&config)?;
    let format = match args.format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };
    emit_rows(&result, format, &args.out)?;
    let rows = 2 * result.sizes.len() * config.inv_dqm_grid.len();
    eprintln!("wrote {rows} rows to {}", args.out.display());
    print!("{}", summarize(&result)?);
    Ok(ExitCode::SUCCESS)
}

fn plot_data(args: PlotDataArgs) -> Result<ExitCode, Error> {
    let text = std::fs::read_to_string(&args.input)?;
    let rows = parse_csv(&text)?;
    let paths = write_plot_data(&rows, &args.out_dir)?;
    for path in &paths {
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn validate() -> Result<ExitCode, Error> {
    let report = validate_selfcheck();
    for check in &report.checks {
        let mark = if check.passed { " ok " } else { "FAIL" };
        println!("[{mark}] {:<24} {}", check.name, check.detail);
    }
    if report.all_passed() {
        println!("all self-checks passed");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("self-check FAILED");
        Ok(ExitCode::from(EXIT_SELFCHECK))
    }
}
