use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(boxtherm_cli::args::run(std::env::args_os()))
}
