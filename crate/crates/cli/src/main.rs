use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use logthh_cli::{execute, exit_code, Cli, CliError, EXIT_USAGE, THREADS_ENV};

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| CliError::usage(format!("{THREADS_ENV}={v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::internal(e.to_string()))
}

fn run() -> Result<u8, CliError> {
    init_threads()?;
    let cli = Cli::try_parse().map_err(|e| {
        let _ = e.print();
        let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
        CliError { code, message: String::new() }
    })?;
    let (report, cfg) = execute(&cli)?;
    let text = report.render(cfg.format)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| CliError { code: 3, message: format!("cannot write {}: {e}", path.display()) })?,
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::internal(e.to_string()))?,
    }
    Ok(exit_code(&report))
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if !e.message.is_empty() {
                eprintln!("error: {}", e.message);
            }
            ExitCode::from(e.code)
        }
    }
}
