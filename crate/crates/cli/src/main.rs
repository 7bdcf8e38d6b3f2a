use clap::Parser;

fn main() {
    let cli = tfloc_cli::Cli::parse();
    std::process::exit(tfloc_cli::run(&cli));
}
