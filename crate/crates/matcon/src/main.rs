use clap::Parser;

fn main() {
    let cli = matcon::cli::Cli::parse();
    std::process::exit(matcon::cli::run(cli));
}
