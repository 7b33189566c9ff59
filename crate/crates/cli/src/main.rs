use std::process::ExitCode;

use clap::Parser;
use polinflux_cli::{run, Cli};

/// Caps the worker pool at `POLINFLUX_THREADS` when set.
fn configure_threads() {
    let Ok(value) = std::env::var("POLINFLUX_THREADS") else {
        return;
    };
    match value.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
            {
                eprintln!("warning: could not size thread pool: {e}");
            }
        }
        _ => {
            eprintln!("warning: ignoring POLINFLUX_THREADS={value:?}; expected a positive integer")
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
