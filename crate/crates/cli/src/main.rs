use clap::{Args, Parser, Subcommand};
use pulseflow_cli::error::EXIT_CONFIG;
use pulseflow_cli::output::write_json;
use pulseflow_cli::pipeline::{run_circle, run_oracle_check, run_stationary, run_sweep};
use pulseflow_cli::{run_pipeline, CliError, RunConfig, SolveOptions, Timings, WaveformSpec};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "pulseflow", version, about = "Pulsatile flow in elliptical and annular sections from a prescribed flow rate")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(short, long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    nu: Option<f64>,
    /// Number of Fourier modes of the fit.
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    max_mode: Option<usize>,
    #[arg(long)]
    mu_threshold: Option<f64>,
    #[arg(long)]
    s_threshold: Option<f64>,
    /// Grid intervals in eta.
    #[arg(long)]
    intervals: Option<usize>,
    /// Worker threads for the cut-off search.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form steady flow for a constant flow rate.
    Stationary {
        #[command(flatten)]
        common: Common,
        /// Flow rate [cm^3/s] (overrides the config).
        #[arg(long)]
        flux: Option<f64>,
    },
    /// Exact pulsatile flow in a circular pipe.
    CircleInverse {
        #[command(flatten)]
        common: Common,
    },
    /// Full inverse pipeline.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Also write the full mu/s tables over (m, N).
        #[arg(long)]
        emit_contours: bool,
    },
    /// Solve, then check against the direct time-stepping solver.
    OracleCheck {
        #[command(flatten)]
        common: Common,
        /// Oracle grid size in both directions.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        steps: Option<usize>,
        /// Cap on the number of periods.
        #[arg(long)]
        periods: Option<usize>,
    },
    /// Several waveforms against one cached basis.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Waveform CSV files; repeat for each.
        #[arg(long = "waveform", required = true)]
        waveforms: Vec<PathBuf>,
        /// Period of the waveforms [s].
        #[arg(long)]
        period: Option<f64>,
        #[arg(long)]
        emit_contours: bool,
    },
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(o) = &common.output {
        cfg.output = o.clone();
    }
    if let Some(v) = common.nu {
        cfg.nu = v;
    }
    if let Some(v) = common.modes {
        cfg.modes = Some(v);
    }
    if let Some(v) = common.max_mode {
        cfg.max_mode = v;
    }
    if let Some(v) = common.mu_threshold {
        cfg.mu_threshold = v;
    }
    if let Some(v) = common.s_threshold {
        cfg.s_threshold = v;
    }
    if let Some(v) = common.intervals {
        cfg.intervals = v;
    }
    if let Some(j) = common.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Config(format!("--jobs: {e}")))?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut timings = Timings::default();
    let cfg = match cli.command {
        Command::Stationary { common, flux } => {
            let mut cfg = load(&common)?;
            if flux.is_some() {
                cfg.flux = flux;
                cfg.waveform = None;
            }
            cfg.validate()?;
            let f = cfg.flux.ok_or_else(|| CliError::Config("stationary needs a flux".into()))?;
            run_stationary(&cfg, f, &cfg.output, &mut timings)?;
            cfg
        }
        Command::CircleInverse { common } => {
            let cfg = load(&common)?;
            cfg.validate()?;
            run_circle(&cfg, &cfg.output, &mut timings)?;
            cfg
        }
        Command::Solve { common, emit_contours } => {
            let cfg = load(&common)?;
            cfg.validate()?;
            let run = run_pipeline(&cfg, &cfg.output, &SolveOptions { emit_contours }, &mut timings)?;
            if let Some(t) = &run.summary.truncation {
                println!("N* = {} (mu: {}, s: {})", t.nstar, t.nstar_mu, t.nstar_s);
            }
            if let Some(r) = run.summary.flux_roundtrip {
                println!("flux round-trip error {r:e}");
            }
            cfg
        }
        Command::OracleCheck { common, grid, steps, periods } => {
            let mut cfg = load(&common)?;
            let mut o = cfg.oracle_settings();
            if let Some(n) = grid {
                o.eta_intervals = n;
                o.theta_points = n;
            }
            if let Some(s) = steps {
                o.steps_per_period = s;
            }
            if let Some(p) = periods {
                o.max_periods = p;
            }
            cfg.oracle = Some(o);
            cfg.validate()?;
            let report = run_oracle_check(&cfg, &cfg.output, &mut timings)?;
            println!(
                "oracle: {} periods, flux RMS {:e}, max profile deviation {:e} of peak ({})",
                report.periods,
                report.flux_rms,
                report.max_deviation,
                if report.within_budget { "within 1%" } else { "OUTSIDE 1%" }
            );
            cfg
        }
        Command::Sweep { common, waveforms, period, emit_contours } => {
            let mut cfg = load(&common)?;
            cfg.flux = None;
            cfg.validate()?;
            let specs: Vec<WaveformSpec> = waveforms.into_iter().map(|path| WaveformSpec { path, period }).collect();
            for (name, summary, t) in run_sweep(&cfg, &specs, &SolveOptions { emit_contours })? {
                let n = summary.truncation.map(|t| t.nstar).unwrap_or(0);
                let s2 = match t.seconds(pulseflow_cli::pipeline::S2) {
                    Some(s) => format!("{s:.3} s"),
                    None => "skipped".to_string(),
                };
                println!("{name}: N* = {n}, S2 {s2}");
            }
            return Ok(());
        }
    };
    write_json(&cfg.output, "timings.json", &timings)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
