use std::io;
use std::process::ExitCode;

use aloco::cli;

fn main() -> ExitCode {
    let status = cli::main_with_args(
        std::env::args_os(),
        io::stdin().lock(),
        io::stdout().lock(),
        io::stderr().lock(),
    );
    ExitCode::from(status)
}
