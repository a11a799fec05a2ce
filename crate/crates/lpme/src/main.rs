use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use lpme::cli::{run, Cli};
use lpme::format::to_json;
use lpme::report::ErrorView;
use lpme::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.to_string().trim_end().to_string());
            print!("{}", to_json(&ErrorView::from(&err)));
            return ExitCode::from(2);
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(code) => {
            let _ = lock.flush();
            ExitCode::from(code)
        }
        Err(err) => {
            let _ = writeln!(io::stderr(), "lpme: {err}");
            let _ = write!(lock, "{}", to_json(&ErrorView::from(&err)));
            ExitCode::from(err.exit_code())
        }
    }
}
