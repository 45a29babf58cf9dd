use std::process::ExitCode;

fn main() -> ExitCode {
    betakde::harness::cli::main_with_args(std::env::args_os())
}
