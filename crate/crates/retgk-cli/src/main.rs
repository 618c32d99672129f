mod args;
mod commands;
mod meta;

use clap::Parser;

use args::{Cli, Command};
use commands::CliError;

/// Exit codes: 0 success, 2 usage, 3 data problem, 4 numeric failure.
fn error_exit_code(err: &CliError) -> i32 {
    use retgk::Error as E;
    match err {
        CliError::Usage(_) => 2,
        CliError::Io(_) => 3,
        CliError::Lib(lib) => match lib {
            E::MissingFile(_)
            | E::MalformedLine { .. }
            | E::InconsistentIndicator(_)
            | E::RaggedAttributes { .. }
            | E::InvalidGraph(_)
            | E::UnknownSymbol(..)
            | E::InvalidPermutation(_)
            | E::DimensionMismatch(_)
            | E::MissingAttribute(_)
            | E::FoldTooSmall { .. }
            | E::Io(_) => 3,
            E::ZeroDegreeNode(_)
            | E::EigenFailure(_)
            | E::DegenerateDistances
            | E::NegativeRadicand(_)
            | E::NotConverged(_)
            | E::EmbeddingTooLarge(..) => 4,
        },
    }
}

fn describe(err: &CliError) -> String {
    match err {
        CliError::Usage(msg) => msg.clone(),
        CliError::Io(e) => format!("i/o failure: {e}"),
        CliError::Lib(e) => e.to_string(),
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let (threads, run_args) = match &cli.command {
        Command::Rpf(a) | Command::Gram(a) | Command::Classify(a) => (a.threads, a),
        Command::Sweep(s) => (s.run.threads, &s.run),
    };
    commands::validate(run_args)?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("could not configure --threads: {e}")))?;
    }
    match &cli.command {
        Command::Rpf(a) => commands::cmd_rpf(a),
        Command::Gram(a) => commands::cmd_gram(a),
        Command::Classify(a) => commands::cmd_classify(a),
        Command::Sweep(s) => commands::cmd_sweep(s),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(&cli) {
        eprintln!("error: {}", describe(&err));
        std::process::exit(error_exit_code(&err));
    }
}
