use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use systole_cli::{run, ConfigFile, Mode};

#[derive(Parser)]
#[command(name = "systole", version, about = "Reproducible experiments on Hermitian metrics of CP^n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write `<out>/<experiment>.csv` plus a JSON sidecar.
    Run {
        #[arg(long)]
        experiment: Option<String>,
        /// JSON config; flags given on the command line take precedence.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        degree: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long, value_delimiter = ',')]
        t_values: Option<Vec<f64>>,
        #[arg(long)]
        sigma_samples: Option<usize>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        fixture: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let Command::Run { experiment, config, n, degree, seed, mode, t_values, sigma_samples, count, fixture, out } =
        Cli::parse().command;
    let flags = ConfigFile { experiment, n, degree, seed, mode, t_values, sigma_samples, count, fixture, out };
    let result = config
        .as_deref()
        .map(ConfigFile::from_path)
        .unwrap_or_else(|| Ok(ConfigFile::default()))
        .and_then(|file| file.merge(flags).resolve())
        .and_then(|cfg| run(&cfg));
    match result {
        Ok(a) => {
            println!("{}", a.csv.display());
            println!("{}", a.sidecar.display());
            if a.pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("threshold violated");
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
