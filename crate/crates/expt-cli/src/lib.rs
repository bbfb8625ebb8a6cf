//! Configuration-driven runner for the photon shaping experiments.
//!
//! Each subcommand reads one [`ExperimentConfig`], writes CSV and JSON files
//! into the output directory and finishes with a `manifest.json` listing
//! every file with its SHA-256.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

pub mod commands;
pub mod config;
mod error;
pub mod output;
pub mod units;

pub use commands::{Command, CommandRegistry, Context};
pub use config::ExperimentConfig;
pub use error::CliError;
pub use output::{OutputSet, RunManifest};

pub type Result<T, E = CliError> = std::result::Result<T, E>;

fn cli(registry: &CommandRegistry) -> clap::Command {
    let global = [
        clap::Arg::new("config").long("config").value_name("FILE").global(true).help("Experiment configuration (TOML)"),
        clap::Arg::new("out").long("out").value_name("DIR").global(true).help("Output directory"),
        clap::Arg::new("seed").long("seed").value_name("U64").global(true).value_parser(clap::value_parser!(u64)).help("Random seed"),
        clap::Arg::new("threads")
            .long("threads")
            .value_name("N")
            .global(true)
            .value_parser(clap::value_parser!(usize))
            .help("Worker threads"),
    ];
    let mut app = clap::Command::new("cqed-expt")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Single-photon shaping experiments in cavity QED")
        .subcommand_required(true)
        .args(global);
    for c in registry.iter() {
        app = app.subcommand(clap::Command::new(c.name()).about(c.about()).args(c.args()));
    }
    app
}

/// Parses `args` (including the program name), runs the subcommand and
/// writes its manifest. Returns the output directory.
pub fn run_cli<I, T>(args: I) -> Result<PathBuf>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let registry = CommandRegistry::with_builtins();
    let matches = cli(&registry).try_get_matches_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            let _ = e.print();
            std::process::exit(0);
        }
        _ => CliError::Config(e.to_string().trim().to_string()),
    })?;
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let command = registry.get(name)?;

    let mut config = match matches.get_one::<String>("config") {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(&seed) = matches.get_one::<u64>("seed") {
        config.homodyne.seed = seed;
    }
    config.validate()?;
    let out_dir = matches
        .get_one::<String>("out")
        .map(PathBuf::from)
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(name));

    let run = || -> Result<()> {
        let started = Instant::now();
        let mut out = OutputSet::create(&out_dir)?;
        command.run(&mut Context { config: &config, args: sub, out: &mut out })?;
        let seed = command.seeded().then_some(config.homodyne.seed);
        RunManifest::new(name, config.to_toml(), seed, started, &out).write(&out_dir)
    };
    match matches.get_one::<usize>("threads") {
        Some(&n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
            pool.install(run)?;
        }
        None => run()?,
    }
    Ok(out_dir)
}
