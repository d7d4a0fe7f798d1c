use clap::Parser;

use bridging_heat_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    if let Err(e) = bridging_heat_cli::run(&cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
