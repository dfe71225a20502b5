use std::process::ExitCode;

fn main() -> ExitCode {
    supercoherent_cli::run(std::env::args_os())
}
