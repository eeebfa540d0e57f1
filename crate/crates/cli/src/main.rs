use std::process::ExitCode;

fn main() -> ExitCode {
    let (stdout, code) = tablecount_cli::execute(std::env::args().skip(1));
    print!("{stdout}");
    ExitCode::from(code as u8)
}
