use std::io::IsTerminal;

use clap::Parser;
use tracing_subscriber::EnvFilter;

use ixpunion_cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    let filter = EnvFilter::try_new(&cli.log_level).unwrap_or_else(|_| EnvFilter::new("info"));
    tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .with_ansi(std::io::stderr().is_terminal())
        .init();
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .expect("tokio runtime");
    if let Err(e) = runtime.block_on(execute(cli)) {
        eprintln!("error: {e}");
        std::process::exit(e.kind.exit_code());
    }
}
