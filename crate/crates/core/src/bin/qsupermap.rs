use std::process::ExitCode;

fn main() -> ExitCode {
    qsupermap::cli::run(std::env::args_os()).into()
}
