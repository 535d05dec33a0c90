use clap::Parser;

fn main() {
    let cli = arena_elo::cli::Cli::parse();
    if let Err(err) = arena_elo::cli::run(cli) {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}
