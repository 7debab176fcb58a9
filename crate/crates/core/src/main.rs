use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(genhilbert::cli::run(std::env::args_os()))
}
