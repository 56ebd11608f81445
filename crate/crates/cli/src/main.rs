use std::process;

use clap::error::ErrorKind;
use clap::Parser;
use scssim_cli::args::Cli;
use scssim_cli::{commands, ExitCode};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::Ok,
                _ => ExitCode::BadFlags,
            };
            process::exit(code as i32);
        }
    };
    let mut stdout = std::io::stdout().lock();
    if let Err(failure) = commands::run(cli, &mut stdout) {
        eprintln!("error: {failure}");
        process::exit(failure.code as i32);
    }
}
