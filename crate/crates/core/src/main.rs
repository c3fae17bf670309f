use std::process::ExitCode;

use clap::Parser;
use thetarep::cli::{run, Cli, EXIT_CONFIG};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = run(&cli);
    if cli.json {
        println!("{}", out.envelope.to_json());
    } else {
        for line in &out.text {
            println!("{line}");
        }
    }
    let mut code = out.code;
    let writes = [(&cli.out, Some(out.envelope.to_json())), (&cli.dot, out.dot.clone())];
    for (path, contents) in writes {
        if let (Some(path), Some(contents)) = (path, contents) {
            if let Err(e) = std::fs::write(path, contents) {
                eprintln!("error: cannot write {}: {e}", path.display());
                code = EXIT_CONFIG;
            }
        }
    }
    ExitCode::from(code as u8)
}
