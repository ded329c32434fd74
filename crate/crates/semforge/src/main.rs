use std::process::ExitCode;

fn main() -> ExitCode {
    semforge::cli::run()
}
