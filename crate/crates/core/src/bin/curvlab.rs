use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use curvlab::harness::{execute, Command, Overrides, Status};
use curvlab::Error;

#[derive(Parser)]
#[command(name = "curvlab", version, about = "Curvature identities for low-regularity immersions, checked numerically")]
struct Cli {
    /// JSON configuration; defaults are used when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV tables, JSON reports and result.json.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cells per unit length, replacing the configured resolutions.
    #[arg(long, global = true)]
    resolution: Option<usize>,
    /// Worker threads (all cores by default).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Orthonormal frames of the fixture metric.
    Frames,
    /// Pfaffian against the pulled-back sphere volume.
    Pfaffian,
    /// Transgression form and its calibration.
    Chern,
    /// Brouwer degree of the Gauss map over the chart.
    Degree,
    /// Whitney decomposition of a planar region.
    Whitney,
    /// Box dimension of level sets of a rough field.
    Boxdim,
    /// Integral over a domain with fractal boundary.
    Fractint,
    /// Metric defect of mollified corrugations.
    MollifyScan,
    /// Change-of-variables checks of a scenario.
    CovCheck,
    /// Every audit of a scenario.
    Audit,
}

impl Sub {
    fn command(self) -> Command {
        match self {
            Sub::Frames => Command::Frames,
            Sub::Pfaffian => Command::Pfaffian,
            Sub::Chern => Command::Chern,
            Sub::Degree => Command::Degree,
            Sub::Whitney => Command::Whitney,
            Sub::Boxdim => Command::Boxdim,
            Sub::Fractint => Command::Fractint,
            Sub::MollifyScan => Command::MollifyScan,
            Sub::CovCheck => Command::CovCheck,
            Sub::Audit => Command::Audit,
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(m) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(m).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let text = match &cli.config {
        None => None,
        Some(p) => match fs::read_to_string(p) {
            Ok(t) => Some(t),
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", p.display());
                return ExitCode::from(2);
            }
        },
    };
    let ov = Overrides { seed: cli.seed, resolution: cli.resolution };
    match execute(cli.command.command(), text.as_deref(), ov, cli.out.as_deref()) {
        Ok((summary, _)) => {
            for (name, a) in &summary.audits {
                println!("{name}: {}", a.status.as_str());
            }
            println!("{}: {}", summary.name, summary.status.as_str());
            if summary.status == Status::Fail {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
