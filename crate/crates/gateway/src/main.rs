use std::process::ExitCode;

use clap::Parser;
use epiplan_gateway::cli::{self, Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(args) => cli::run_simulate(args),
        Command::Branch(args) => cli::run_branch(args),
        Command::Summary(args) => cli::run_summary(args),
        Command::Serve(args) => tokio::runtime::Builder::new_multi_thread()
            .enable_all()
            .build()
            .map_err(|source| epiplan::Error::Io {
                context: "starting runtime".into(),
                source,
            })
            .and_then(|rt| rt.block_on(cli::run_serve(args))),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            cli::report(&err);
            ExitCode::FAILURE
        }
    }
}
