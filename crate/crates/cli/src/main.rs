use std::process::ExitCode;

fn main() -> ExitCode {
    dirac_cli::run(std::env::args().skip(1))
}
