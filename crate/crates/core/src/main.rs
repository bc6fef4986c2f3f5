use std::process::ExitCode;

use clap::Parser;
use maxai::cli::{init_thread_pool, Cli};

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match maxai::cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
