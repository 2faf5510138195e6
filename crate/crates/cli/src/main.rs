use clap::Parser;

fn main() {
    let cli = hetssd_cli::Cli::parse();
    if let Err(e) = hetssd_cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
