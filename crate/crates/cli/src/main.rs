use std::process::ExitCode;

fn main() -> ExitCode {
    match cubedisc_cli::run(std::env::args().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
