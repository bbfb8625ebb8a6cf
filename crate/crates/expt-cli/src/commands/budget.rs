use homodyne_modes::{loss_budget, source_brightness, LossBudget};
use serde::Serialize;

use super::{Command, Context};
use crate::config::ExperimentConfig;
use crate::Result;

#[derive(Debug, Clone, Serialize)]
pub struct BudgetReport {
    pub budget: LossBudget,
    /// p₁ at the source, when a detected p₁ is configured.
    pub brightness: Option<f64>,
}

pub fn run_budget(cfg: &ExperimentConfig) -> Result<BudgetReport> {
    let budget = loss_budget(&cfg.budget.stages)?;
    let brightness = match &cfg.budget.brightness {
        Some(b) => Some(source_brightness(b.p1, b.detection, b.preparation)?),
        None => None,
    };
    Ok(BudgetReport { budget, brightness })
}

pub struct Budget;

impl Command for Budget {
    fn name(&self) -> &'static str {
        "budget"
    }

    fn about(&self) -> &'static str {
        "Product of a chain of stage efficiencies with propagated uncertainty"
    }

    fn run(&self, ctx: &mut Context<'_>) -> Result<()> {
        let r = run_budget(ctx.config)?;
        let mut table = String::from("stage,efficiency,uncertainty,cumulative\n");
        for (s, c) in r.budget.stages.iter().zip(&r.budget.cumulative) {
            table.push_str(&format!("\"{}\",{},{},{}\n", s.name.replace('"', "\"\""), s.efficiency, s.uncertainty, c));
        }
        ctx.out.write("budget.csv", table)?;
        ctx.out.write_json("budget.json", &r)
    }
}
