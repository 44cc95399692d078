use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use hyperheat_cli::{run, Cli, CliError, RunManifest, Status};

fn execute(manifest: &RunManifest) -> Result<Status, CliError> {
    match &manifest.out {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            let status = run(manifest, &mut file)?;
            file.flush()?;
            Ok(status)
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            run(manifest, &mut lock)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let manifest = RunManifest::from(Cli::parse());
    let code = match execute(&manifest) {
        Ok(Status::Pass) => 0,
        Ok(Status::Fail(msg)) => {
            eprintln!("validation failed: {msg}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
