use clap::Parser;

use fohybrid::cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("fohybrid {}: {e}", cli.command.name());
            std::process::exit(e.exit_code());
        }
    }
}
