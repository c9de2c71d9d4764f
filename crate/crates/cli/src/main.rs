use clap::Parser;
use lame_cli::Cli;

fn main() {
    let cli = Cli::parse();
    std::process::exit(lame_cli::execute(&cli));
}
