mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use commands::Failure;

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    match std::env::var("WAVEQED_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| Failure::config(anyhow::anyhow!("WAVEQED_THREADS must be a positive integer, got {v:?}"))),
        _ => Ok(flag),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count(cli.threads)? {
        if n == 0 {
            return Err(Failure::config(anyhow::anyhow!("thread count must be positive")));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Failure::config(e.into()))?;
    pool.install(|| commands::dispatch(cli.command))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
