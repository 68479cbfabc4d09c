use clap::Parser;
use flowlab_cli::Cli;

fn main() {
    let cli = Cli::parse();
    std::process::exit(flowlab_cli::run(&cli));
}
