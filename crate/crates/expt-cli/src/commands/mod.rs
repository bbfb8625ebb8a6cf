//! Subcommands, registered by name as trait objects.

use std::collections::BTreeMap;

use crate::config::ExperimentConfig;
use crate::output::OutputSet;
use crate::{CliError, Result};

pub mod budget;
pub mod convert;
pub mod emit;
pub mod homodyne;
pub mod select;
pub mod shape;
pub mod sweep;

pub struct Context<'a> {
    pub config: &'a ExperimentConfig,
    pub args: &'a clap::ArgMatches,
    pub out: &'a mut OutputSet,
}

pub trait Command: Send + Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    /// Extra command-line arguments of this subcommand.
    fn args(&self) -> Vec<clap::Arg> {
        Vec::new()
    }
    /// Whether the output depends on the random seed.
    fn seeded(&self) -> bool {
        false
    }
    fn run(&self, ctx: &mut Context<'_>) -> Result<()>;
}

#[derive(Default)]
pub struct CommandRegistry {
    commands: BTreeMap<&'static str, Box<dyn Command>>,
}

impl CommandRegistry {
    pub fn with_builtins() -> Self {
        let mut r = Self::default();
        r.register(Box::new(sweep::SweepEfficiency));
        r.register(Box::new(shape::Shape));
        r.register(Box::new(emit::Emit));
        r.register(Box::new(select::Select));
        r.register(Box::new(convert::Convert));
        r.register(Box::new(homodyne::Homodyne));
        r.register(Box::new(budget::Budget));
        r
    }

    pub fn register(&mut self, command: Box<dyn Command>) {
        self.commands.insert(command.name(), command);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Command> {
        self.commands.get(name).map(|c| c.as_ref()).ok_or_else(|| CliError::UnknownCommand(name.into()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Command> {
        self.commands.values().map(|c| c.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.commands.keys().copied().collect()
    }
}

/// CSV with a header row; values use the shortest exact representation.
pub(crate) fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
