use std::process::ExitCode;

fn main() -> ExitCode {
    acycle::cli::main_with(std::env::args_os())
}
