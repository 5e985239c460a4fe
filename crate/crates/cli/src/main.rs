mod commands;
mod config;

use std::fmt;
use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command, DiscoverArgs, FileConfig, LabelArgs, Merge, SweepArgs};

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or config values (exit 2).
    Usage(String),
    /// Unreadable or malformed input data (exit 3).
    Input(String),
    /// Broken internal invariant (exit 4).
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Input(_) => 3,
            Failure::Internal(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "configuration error: {m}"),
            Failure::Input(m) => write!(f, "input error: {m}"),
            Failure::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<testinj::Error> for Failure {
    fn from(e: testinj::Error) -> Self {
        use testinj::Error as E;
        match e {
            E::UnknownNode(_) | E::Constraint(_) => Failure::Usage(e.to_string()),
            E::Json(_) => Failure::Internal(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let jobs = cli.jobs.or(file.jobs);
    if let Some(j) = jobs {
        if j == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Failure::Internal(e.to_string()))?;
    }
    let out = cli.out.or(file.out).unwrap_or_else(|| "out".into());
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    let ctx = commands::Context { out, seed };
    match cli.command {
        Command::ExpandLexicon(a) => commands::expand_lexicon(&ctx, a.merge(file.expand_lexicon)),
        Command::Label(a) => commands::label(&ctx, LabelArgs::merged(a, file.label)),
        Command::Discover(a) => {
            commands::discover(&ctx, a.merge(DiscoverArgs { search: file.search, ..file.discover }))
        }
        Command::Sweep(a) => commands::sweep(&ctx, a.merge(SweepArgs { search: file.search, ..file.sweep })),
        Command::Synth(a) => commands::synth(&ctx, a.merge(file.synth)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("testinj: {f}");
            ExitCode::from(f.code())
        }
    }
}
