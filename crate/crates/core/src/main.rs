use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nmzi::config::{parse_config, Mode, RunConfig};
use nmzi::output::{gnuplot_script, write_file};
use nmzi::run::{execute, output_dir_from_env, output_path, RunOutcome};
use nmzi::verify::VerifyOptions;
use nmzi::ElementConventions;

#[derive(Parser)]
#[command(name = "nmzi", version, about = "Correlations between two noninterfering Mach-Zehnder interferometers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form intensities and correlations over a sweep.
    Analytic(RunArgs),
    /// Photon-counting simulation over a sweep, alongside the analytic values.
    Montecarlo(RunArgs),
    /// Check the model's invariants and print one line per check.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file with `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Figure preset: fig2, fig3 or fig4.
    #[arg(long)]
    preset: Option<String>,
    /// Swept parameter, `name=start:stop:step` (phi, psi, xi, theta, rho, zeta).
    #[arg(long, value_name = "PARAM=START:STOP:STEP")]
    sweep: Vec<String>,
    /// Fixed parameter, `name=value`.
    #[arg(long, value_name = "PARAM=VALUE")]
    fix: Vec<String>,
    /// Total input intensity.
    #[arg(long)]
    i0: Option<String>,
    /// Mean photon number per time bin.
    #[arg(long)]
    mu: Option<String>,
    /// Time bins per sweep point.
    #[arg(long)]
    bins: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Independent RNG streams per sweep point.
    #[arg(long)]
    streams: Option<String>,
    /// one-per-station or binomial.
    #[arg(long)]
    routing: Option<String>,
    /// analytic or measured marginals.
    #[arg(long)]
    normalization: Option<String>,
    /// Output CSV path; defaults to $NMZI_OUT_DIR/<name>.csv, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Read all angles in degrees.
    #[arg(long)]
    degrees: bool,
    /// Also write a gnuplot script next to the CSV.
    #[arg(long)]
    gnuplot: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Random draws for each algebraic check.
    #[arg(long, default_value_t = 1000)]
    draws: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Time bins per Monte Carlo point.
    #[arg(long)]
    bins: Option<u64>,
    #[arg(long)]
    mu: Option<f64>,
    /// Skip the Monte Carlo checks.
    #[arg(long)]
    no_montecarlo: bool,
    /// Test hook: use a PBS reflection of +1, which the composed station
    /// check must reject.
    #[arg(long, hide = true)]
    corrupt_conventions: bool,
}

impl RunArgs {
    fn entries(&self) -> Result<Vec<(String, String)>, String> {
        let mut e = Vec::new();
        let mut push = |k: &str, v: &Option<String>| {
            if let Some(v) = v {
                e.push((k.to_string(), v.clone()));
            }
        };
        push("preset", &self.preset);
        push("i0", &self.i0);
        push("mu", &self.mu);
        push("bins", &self.bins);
        push("seed", &self.seed);
        push("streams", &self.streams);
        push("routing", &self.routing);
        push("normalization", &self.normalization);
        for (prefix, list) in [("sweep", &self.sweep), ("fix", &self.fix)] {
            for item in list {
                let (k, v) = item
                    .split_once('=')
                    .ok_or_else(|| format!("--{prefix} {item}: expected PARAM=VALUE"))?;
                e.push((format!("{prefix}.{}", k.trim()), v.trim().to_string()));
            }
        }
        if let Some(out) = &self.out {
            e.push(("out".into(), out.display().to_string()));
        }
        if self.degrees {
            e.push(("degrees".into(), "true".into()));
        }
        if self.gnuplot {
            e.push(("gnuplot".into(), "true".into()));
        }
        Ok(e)
    }
}

fn run_sweep(args: RunArgs, mode: Mode) -> ExitCode {
    let file_text = match &args.config {
        Some(p) => match fs::read_to_string(p) {
            Ok(t) => Some(t),
            Err(e) => {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(1);
            }
        },
        None => None,
    };
    let cfg = match args.entries().map_err(|e| e.to_string()).and_then(|f| {
        parse_config(file_text.as_deref(), &f, Some(mode)).map_err(|e| e.to_string())
    }) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let csv = match execute(&cfg, None) {
        Ok(RunOutcome::Csv(s)) => s,
        Ok(RunOutcome::Verify(_)) => unreachable!("sweep modes produce CSV"),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match output_path(&cfg, output_dir_from_env().as_deref()) {
        Some(path) => {
            if let Err(e) = write_file(&path, &csv) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            log::info!("wrote {}", path.display());
            if cfg.gnuplot {
                let axes: Vec<_> = cfg.axes().into_iter().map(|(p, _)| p).collect();
                let script = gnuplot_script(&path, &axes, mode == Mode::MonteCarlo);
                let gp = path.with_extension("gp");
                if let Err(e) = write_file(&gp, &script) {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
                log::info!("wrote {}", gp.display());
            }
        }
        None => {
            if cfg.gnuplot {
                log::warn!("--gnuplot needs a CSV file; pass --out or set the output directory");
            }
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(csv.as_bytes()).is_err() {
                return ExitCode::from(1);
            }
        }
    }
    ExitCode::SUCCESS
}

fn run_verify(args: VerifyArgs) -> ExitCode {
    let mut opts = VerifyOptions {
        draws: args.draws,
        seed: args.seed,
        ..Default::default()
    };
    if args.corrupt_conventions {
        opts.conventions = ElementConventions {
            pbs_reflection: num_complex::Complex::new(1.0, 0.0),
            ..ElementConventions::standard()
        };
    }
    if args.no_montecarlo {
        opts.source = None;
    } else if let Some(src) = opts.source.as_mut() {
        if let Some(b) = args.bins {
            src.time_bins = b;
        }
        if let Some(m) = args.mu {
            src.mean_photon_number = m;
        }
        src.seed = args.seed;
        if let Err(e) = src.validate() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match execute(&RunConfig::new(Mode::Verify), Some(opts)) {
        Ok(RunOutcome::Verify(report)) => {
            println!("{report}");
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Ok(RunOutcome::Csv(_)) => unreachable!("verify mode produces a report"),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with 2 on usage errors; 2 is reserved for failed verification.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Analytic(a) => run_sweep(a, Mode::Analytic),
        Command::Montecarlo(a) => run_sweep(a, Mode::MonteCarlo),
        Command::Verify(v) => run_verify(v),
    }
}
