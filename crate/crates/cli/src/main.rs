use std::process::ExitCode;

use clap::Parser;
use iqa_cli::{run, BenchConfig, Cli, ExitKind};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(ExitKind::Config.code() as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = BenchConfig::resolve(cli.options).and_then(|cfg| run(cli.command, &cfg));
    match result {
        Ok(runs) => {
            for r in runs.iter().filter(|r| r.skipped) {
                log::info!("{}: {} skipped (up to date)", r.dataset, r.stage);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.kind.code() as u8)
        }
    }
}
