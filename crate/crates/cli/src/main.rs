use clap::Parser;
use mdist_cli::{execute, exit_code, Cli, Outcome};

fn main() {
    let cli = Cli::parse();
    let result = execute(&cli);
    match &result {
        Ok(Outcome::Success) => println!("ok: artifacts in {}", cli.out.display()),
        Ok(Outcome::Failure) => println!("failed: see {}", cli.out.join("report.txt").display()),
        Err(e) => eprintln!("error: {e}"),
    }
    std::process::exit(exit_code(&result));
}
