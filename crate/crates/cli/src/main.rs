use clap::Parser;
use projdyn_cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
