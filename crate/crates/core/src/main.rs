use clap::Parser;

fn main() {
    let cli = kbp::cli::Cli::parse();
    if let Err(e) = kbp::cli::run(cli) {
        eprintln!("error: {e}");
        std::process::exit(kbp::cli::exit_code(&e));
    }
}
