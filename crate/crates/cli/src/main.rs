use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lunarlink::harness::oracle;
use lunarlink::harness::output::{emit_outputs, summarize, OutputFormat};
use lunarlink::harness::{load_config, run_timeline};
use lunarlink::Error;

/// Cislunar relay outage simulator.
#[derive(Parser)]
#[command(name = "lunarlink", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the timeline sweep and write result files.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Brightness temperatures to sweep, in kelvin.
        #[arg(long, value_delimiter = ',')]
        tb: Option<Vec<f64>>,
        #[arg(long = "gamma-th-db", allow_negative_numbers = true)]
        gamma_th_db: Option<f64>,
        /// Number of timeline steps (records per brightness value).
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Check a configuration file and print the resolved values.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Compare closed forms against independent numerical oracles.
    Oracle {
        #[arg(value_enum)]
        which: OracleKind,
        /// Monte-Carlo sample count per row (rician only).
        #[arg(long, default_value_t = 10_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Marcum,
    Rician,
    Outage,
}

const EXIT_IO: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    if e.is_config() {
        EXIT_CONFIG
    } else if e.is_io() {
        EXIT_IO
    } else {
        EXIT_NUMERIC
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            tb,
            gamma_th_db,
            steps,
            format,
            threads,
        } => run(config, out, tb, gamma_th_db, steps, format, threads),
        Command::Validate { config } => validate(config),
        Command::Oracle { which, samples, seed } => run_oracle(which, samples, seed),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(
    config: PathBuf,
    out: PathBuf,
    tb: Option<Vec<f64>>,
    gamma_th_db: Option<f64>,
    steps: Option<usize>,
    format: Format,
    threads: Option<usize>,
) -> Result<u8, Error> {
    if threads == Some(0) {
        return Err(Error::Config {
            path: "--threads".into(),
            msg: "must be at least 1".into(),
        });
    }
    let loaded = load_config(&config)?;
    let mut cfg = loaded.config.clone();
    cfg.apply_overrides(tb.as_deref(), gamma_th_db, steps)?;
    let policy = cfg.twin.policy()?;
    let timeline = run_timeline(&cfg, threads)?;
    let format = match format {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    };
    let paths = emit_outputs(&timeline, &policy, format, &out)?;
    let echo = out.join("config_echo.txt");
    std::fs::write(&echo, loaded.echo_text()).map_err(|source| Error::Io { path: echo, source })?;

    println!("wrote {}", paths.timeline.display());
    for b in summarize(&timeline).per_brightness {
        let hist: Vec<String> = b.chosen_histogram.iter().map(|(k, v)| format!("s{k}={v}")).collect();
        println!(
            "T_B = {:>5} K: {} records, High {:.3}, chosen {}",
            b.tb_k,
            b.records,
            b.high_fraction,
            hist.join(" ")
        );
    }
    Ok(0)
}

fn validate(config: PathBuf) -> Result<u8, Error> {
    let loaded = load_config(&config)?;
    // a closed pipe (e.g. `| head`) is not an error here
    let mut out = std::io::stdout().lock();
    let _ = write!(out, "{}", loaded.echo_text())
        .and_then(|_| writeln!(out, "# ok: {} steps per brightness value", loaded.config.step_count()));
    Ok(0)
}

fn run_oracle(which: OracleKind, samples: u64, seed: u64) -> Result<u8, Error> {
    let pass = match which {
        OracleKind::Marcum => {
            let rows = oracle::marcum_grid(20, 0.5)?;
            println!("{:>6} {:>6} {:>22} {:>22} {:>10}", "a", "b", "series", "quadrature", "abs_diff");
            for r in &rows {
                println!("{:>6.2} {:>6.2} {:>22.15e} {:>22.15e} {:>10.2e}", r.a, r.b, r.series, r.quadrature, r.abs_diff);
            }
            let worst = rows.iter().map(|r| r.abs_diff).fold(0.0, f64::max);
            let rayleigh = oracle::rayleigh_limit_check()?;
            println!("max |series - quadrature| = {worst:.3e} (tolerance 1e-9)");
            println!("max |F(K=0) - (1 - exp(-g/gbar))| = {rayleigh:.3e} (tolerance 1e-9)");
            worst <= 1e-9 && rayleigh <= 1e-9
        }
        OracleKind::Rician => {
            if samples == 0 {
                return Err(Error::Config {
                    path: "--samples".into(),
                    msg: "must be at least 1".into(),
                });
            }
            let rows = oracle::rician_monte_carlo_table(samples, seed)?;
            println!(
                "{:>5} {:>7} {:>6} {:>14} {:>14} {:>11} {:>7}",
                "K_dB", "snr_dB", "th_dB", "analytic", "empirical", "std_err", "z"
            );
            for r in &rows {
                println!(
                    "{:>5} {:>7} {:>6} {:>14.6e} {:>14.6e} {:>11.3e} {:>7.2}",
                    r.k_db, r.mean_snr_db, r.threshold_db, r.analytic, r.empirical, r.std_error, r.z
                );
            }
            rows.iter().all(|r| r.within(3.0))
        }
        OracleKind::Outage => {
            let c = oracle::outage_expansion_check(10_000, seed)?;
            println!("{} tuples, max |serial - expanded| = {:.3e} (tolerance 1e-12)", c.tuples, c.max_abs_diff);
            c.max_abs_diff <= 1e-12
        }
    };
    println!("{}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { 0 } else { EXIT_NUMERIC })
}
