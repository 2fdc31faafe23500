use clap::Parser;

fn main() {
    let cli = fluidrad::cli::Cli::parse();
    std::process::exit(fluidrad::cli::execute(cli));
}
