use std::io::{self, Write};
use std::process::ExitCode;

fn main() -> ExitCode {
    let out = zeldist_cli::run_args(std::env::args_os(), &mut io::stdin().lock());
    io::stdout().write_all(&out.stdout).ok();
    io::stderr().write_all(&out.stderr).ok();
    ExitCode::from(out.code as u8)
}
