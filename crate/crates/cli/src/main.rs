use clap::Parser;
use pnpcns_cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    let level = if cli.global.quiet { log::LevelFilter::Warn } else { log::LevelFilter::Info };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).parse_default_env().init();
    if let Err(e) = execute(&cli) {
        eprintln!("error[{}]: {e}", e.category());
        std::process::exit(e.exit_code());
    }
}
