use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let mut stdin = io::stdin().lock();
    let mut stdout = io::stdout().lock();
    match pda_caching::cli::run(std::env::args_os(), &mut stdin, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err((err, format)) => {
            eprint!("{}", err.render(format));
            ExitCode::FAILURE
        }
    }
}
