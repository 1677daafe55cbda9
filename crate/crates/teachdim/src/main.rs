use clap::Parser;
use teachdim::cli::{render_error, run, Cli};

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("{}", render_error(&e));
            std::process::exit(2);
        }
    }
}
