use clap::Parser;

fn main() {
    std::process::exit(ergm_experiments::run(ergm_experiments::Cli::parse()));
}
