use clap::Parser;
use podles_cli::config::OutputMode;
use podles_cli::run::{run, Cli};

fn main() {
    let cli = Cli::parse();
    let out = run(&cli);
    match out.mode {
        OutputMode::Json => println!("{}", serde_json::to_string_pretty(&out.json).unwrap()),
        OutputMode::Text => println!("{}", out.text),
    }
    std::process::exit(out.exit);
}
