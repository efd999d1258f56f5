use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(ccbf::run_with_args(std::env::args_os()))
}
