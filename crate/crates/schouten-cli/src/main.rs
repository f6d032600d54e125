use clap::Parser;

use schouten_cli::run::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    let (code, value) = execute(&cli);
    let rendered = serde_json::to_string_pretty(&value).expect("serializable report");
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered + "\n") {
                eprintln!("cannot write {}: {e}", path.display());
                std::process::exit(2);
            }
        }
        None => println!("{rendered}"),
    }
    std::process::exit(code);
}
