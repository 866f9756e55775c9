use std::fs;
use std::io::{ErrorKind, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use inflation_spectra::output::{
    cmd_classify, cmd_eigen, cmd_figure1, cmd_fixed_point, cmd_lyapunov, cmd_mahler, cmd_paircorr,
    cmd_report, cmd_table1, figure1_svg, mahler_root_note, CsvTable, MRange, OutputFormat,
    RunConfig,
};
use inflation_spectra::paircorr::ReportConfig;
use inflation_spectra::{configure_threads_from_env, Error};

/// Spectral analysis of the inflation family ρ_m : 0 ↦ 01^m, 1 ↦ 0.
#[derive(Debug, Parser)]
#[command(name = "inflation-spectra", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Value of m (alternative to the positional argument).
    #[arg(long = "m", global = true)]
    m_flag: Option<u64>,

    /// Range of m, e.g. 1..30.
    #[arg(long, global = true)]
    range: Option<MRange>,

    /// Cocycle length, or number of letters for fixed-point.
    #[arg(long, global = true)]
    n: Option<usize>,

    /// Grid points per axis.
    #[arg(long, global = true)]
    resolution: Option<usize>,

    /// Patch radius R.
    #[arg(long, global = true)]
    radius: Option<f64>,

    /// Seed for sampling k.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Number of sampled k.
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Tie and refinement tolerance for table1.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// csv, svg or text.
    #[arg(long, global = true)]
    format: Option<OutputFormat>,

    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Spectral class and inflation multiplier.
    Classify { m: Option<u64> },
    /// Eigenvalues, frequencies and tile lengths.
    Eigen { m: Option<u64> },
    /// Central letters of the ρ²-fixed point.
    FixedPoint { m: Option<u64> },
    /// Minimal N with log λ above the mean log-norm (default m = 1..20).
    Table1,
    /// log λ against m(q_m) (default m = 1..30).
    Figure1,
    /// Mahler measures of q_m and r_m with the bound margins.
    Mahler { m: Option<u64> },
    /// Sampled Lyapunov exponents of the Fourier cocycle.
    Lyapunov { m: Option<u64> },
    /// Pair-correlation coefficients and the renormalisation residual.
    Paircorr { m: Option<u64> },
    /// Spectral summary for weights u₀, u₁ (complex, e.g. 1 or 0.5+2i).
    Report {
        m: Option<u64>,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        u0: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        u1: String,
    },
}

enum Failure {
    Usage(String),
    Numeric(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonConvergence(_) | Error::SingularOrbit { .. } => {
                Failure::Numeric(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn config(cli: &Cli, default_range: MRange, positional: Option<u64>) -> Result<RunConfig, Failure> {
    let range = match (positional.or(cli.m_flag), cli.range) {
        (Some(_), Some(_)) => {
            return Err(Failure::Usage("give either m or --range, not both".into()));
        }
        (Some(m), None) => MRange::single(m)?,
        (None, Some(r)) => r,
        (None, None) => default_range,
    };
    let d = RunConfig::default();
    let cfg = RunConfig {
        range,
        n: cli.n.unwrap_or(d.n),
        resolution: cli.resolution.unwrap_or(d.resolution),
        radius: cli.radius.unwrap_or(d.radius),
        seed: cli.seed.unwrap_or(d.seed),
        samples: cli.samples.unwrap_or(d.samples),
        tol: cli.tol,
        format: cli.format.unwrap_or(d.format),
        out: cli.out.clone(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn single_m(cfg: &RunConfig) -> Result<u64, Failure> {
    if cfg.range.from != cfg.range.to {
        return Err(Failure::Usage("this command takes a single m".into()));
    }
    Ok(cfg.range.from)
}

fn table_output(
    table: &CsvTable,
    cfg: &RunConfig,
    summary: Option<String>,
) -> Result<String, Failure> {
    match cfg.format {
        OutputFormat::Csv => {
            if let Some(s) = summary {
                eprintln!("{s}");
            }
            Ok(table.emit())
        }
        OutputFormat::Text => {
            let mut s = table.to_text();
            if let Some(line) = summary {
                s.push_str(&line);
                s.push('\n');
            }
            Ok(s)
        }
        OutputFormat::Svg => Err(Failure::Usage("svg output exists only for figure1".into())),
    }
}

fn text_only(text: String, cfg: &RunConfig) -> Result<String, Failure> {
    match cfg.format {
        OutputFormat::Text => Ok(text + "\n"),
        _ => Err(Failure::Usage("this command only produces text".into())),
    }
}

fn parse_weight(s: &str) -> Result<Complex64, Failure> {
    s.parse::<Complex64>()
        .map_err(|_| Failure::Usage(format!("cannot read weight {s:?} as a complex number")))
}

fn run(cli: &Cli) -> Result<String, Failure> {
    let one = MRange { from: 1, to: 1 };
    match &cli.command {
        Command::Classify { m } => {
            let cfg = config(cli, one, *m)?;
            require_m(*m, cli)?;
            text_only(cmd_classify(single_m(&cfg)?)?, &cfg)
        }
        Command::Eigen { m } => {
            let cfg = config(cli, one, *m)?;
            require_m(*m, cli)?;
            text_only(cmd_eigen(single_m(&cfg)?)?, &cfg)
        }
        Command::FixedPoint { m } => {
            let cfg = config(cli, one, *m)?;
            require_m(*m, cli)?;
            let letters = cli.n.unwrap_or(60);
            text_only(cmd_fixed_point(single_m(&cfg)?, letters)?, &cfg)
        }
        Command::Table1 => {
            let cfg = config(cli, MRange { from: 1, to: 20 }, None)?;
            table_output(&cmd_table1(cfg.range, cfg.resolution, cfg.tol)?, &cfg, None)
        }
        Command::Figure1 => {
            let cfg = config(cli, MRange { from: 1, to: 30 }, None)?;
            let (table, rows) = cmd_figure1(cfg.range)?;
            match cfg.format {
                OutputFormat::Svg => Ok(figure1_svg(&rows)),
                _ => table_output(&table, &cfg, None),
            }
        }
        Command::Mahler { m } => {
            let cfg = config(cli, MRange { from: 1, to: 30 }, *m)?;
            let notes: Vec<String> = (cfg.range.from..=cfg.range.to)
                .filter_map(mahler_root_note)
                .collect();
            let summary = (!notes.is_empty()).then(|| notes.join("\n"));
            table_output(&cmd_mahler(cfg.range)?, &cfg, summary)
        }
        Command::Lyapunov { m } => {
            let cfg = config(cli, one, *m)?;
            let run = cmd_lyapunov(cfg.range, cfg.n, cfg.samples, cfg.seed)?;
            table_output(&run.table, &cfg, Some(run.summary()))
        }
        Command::Paircorr { m } => {
            let cfg = config(cli, MRange { from: 2, to: 2 }, *m)?;
            let run = cmd_paircorr(single_m(&cfg)?, cfg.radius)?;
            table_output(&run.table, &cfg, Some(run.summary()))
        }
        Command::Report { m, u0, u1 } => {
            let cfg = config(cli, one, *m)?;
            require_m(*m, cli)?;
            let report_cfg = ReportConfig {
                n: cli.n.unwrap_or(ReportConfig::default().n),
                samples: cfg.samples,
                seed: cfg.seed,
                resolution: cli.resolution.unwrap_or(ReportConfig::default().resolution),
            };
            let report = cmd_report(
                single_m(&cfg)?,
                parse_weight(u0)?,
                parse_weight(u1)?,
                &report_cfg,
            )?;
            text_only(report.to_string(), &cfg)
        }
    }
}

fn require_m(positional: Option<u64>, cli: &Cli) -> Result<(), Failure> {
    if positional.is_none() && cli.m_flag.is_none() && cli.range.is_none() {
        return Err(Failure::Usage("missing m".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    configure_threads_from_env();
    let result = run(&cli).and_then(|text| match &cli.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => match std::io::stdout().lock().write_all(text.as_bytes()) {
            Err(e) if e.kind() != ErrorKind::BrokenPipe => {
                Err(Failure::Io(format!("cannot write to stdout: {e}")))
            }
            _ => Ok(()),
        },
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
