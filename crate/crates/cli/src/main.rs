use std::io;
use std::process::ExitCode;

use clap::Parser;
use digame_cli::{execute, Cli, EXIT_OK, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let filter = cli
        .log_level
        .parse::<log::LevelFilter>()
        .unwrap_or_else(|_| {
            eprintln!("error: invalid --log-level {:?}", cli.log_level);
            std::process::exit(EXIT_USAGE);
        });
    env_logger::Builder::new().filter_level(filter).init();
    let code = match execute(&cli, &mut io::stdout().lock()) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
