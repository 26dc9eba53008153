use clap::Parser;

use conifold_lab::cli::{run, Cli};

fn main() {
    std::process::exit(run(&Cli::parse()));
}
