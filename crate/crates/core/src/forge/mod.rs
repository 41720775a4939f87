//! Generate-execute-critique loop over a toy asset grammar. Accepted
//! programs are committed to a [`Manual`] that later runs can retrieve from.

pub mod critic;
pub mod grammar;
pub mod manual;

use serde::{Deserialize, Serialize};

pub use critic::{rule_critic, CritiqueReport, Direction, Failure, Predicate, Suggestion, Task};
pub use grammar::{toy_execute, AssetDescriptor, Category, Part, Program};
pub use manual::{Manual, ManualRecord};

use crate::error::{Error, Result};

/// One finished iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Attempt {
    pub program: Program,
    pub report: CritiqueReport,
}

/// What a generator sees when proposing.
pub struct Context<'a> {
    pub task: &'a Task,
    pub history: &'a [Attempt],
    /// Manual hits for the task text, best first.
    pub retrieved: &'a [ManualRecord],
}

pub trait Generator {
    fn propose(&mut self, ctx: &Context<'_>) -> Result<Program>;
}

pub trait Critic {
    fn critique(&mut self, task: &Task, asset: &AssetDescriptor, program: &Program) -> Result<CritiqueReport>;
}

/// [`rule_critic`] as a [`Critic`].
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleCritic;

impl Critic for RuleCritic {
    fn critique(&mut self, task: &Task, asset: &AssetDescriptor, program: &Program) -> Result<CritiqueReport> {
        Ok(rule_critic(task, asset, program))
    }
}

/// Cycles through `values` for one parameter of a base program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnumeratingGenerator {
    pub base: Program,
    pub param: String,
    pub values: Vec<f64>,
    #[serde(skip)]
    next: usize,
}

impl EnumeratingGenerator {
    pub fn new(base: Program, param: impl Into<String>, values: Vec<f64>) -> Self {
        EnumeratingGenerator {
            base,
            param: param.into(),
            values,
            next: 0,
        }
    }
}

impl Generator for EnumeratingGenerator {
    fn propose(&mut self, _ctx: &Context<'_>) -> Result<Program> {
        if self.values.is_empty() {
            return Err(Error::Agent("enumerating generator has no values".into()));
        }
        let v = self.values[self.next % self.values.len()];
        self.next += 1;
        let mut p = self.base.clone();
        if !p.set(&self.param, v) {
            return Err(Error::Agent(format!("base program lacks `{}`", self.param)));
        }
        Ok(p)
    }
}

/// Starts from the best same-category manual hit (or `start`), then moves
/// every flagged parameter halfway toward its suggested target, clamped to
/// the schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuggestionGenerator {
    pub start: Program,
}

impl Generator for SuggestionGenerator {
    fn propose(&mut self, ctx: &Context<'_>) -> Result<Program> {
        let Some(last) = ctx.history.last() else {
            let seed = ctx
                .retrieved
                .iter()
                .find(|r| r.category == self.start.category)
                .map_or_else(|| self.start.clone(), ManualRecord::program);
            return Ok(seed);
        };
        let mut p = last.program.clone();
        for s in &last.report.suggestions {
            let Some(cur) = p.get(&s.param) else { continue };
            let next = match s.direction {
                Direction::Set => s.target,
                Direction::Increase | Direction::Decrease => cur + 0.5 * (s.target - cur),
            };
            let next = p.category.param(&s.param).map_or(next, |spec| spec.clamp(next));
            p.set(&s.param, next);
        }
        Ok(p)
    }
}

/// Generator choice in task files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Enumerate {
        base: Program,
        param: String,
        values: Vec<f64>,
    },
    Suggest {
        start: Program,
    },
}

impl GeneratorSpec {
    pub fn build(&self) -> Box<dyn Generator> {
        match self {
            GeneratorSpec::Enumerate { base, param, values } => {
                Box::new(EnumeratingGenerator::new(base.clone(), param.clone(), values.clone()))
            }
            GeneratorSpec::Suggest { start } => Box::new(SuggestionGenerator { start: start.clone() }),
        }
    }
}

/// Task file contents: the task plus the generator to run it with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskFile {
    pub task: Task,
    pub generator: GeneratorSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoopOutcome {
    Success {
        record: ManualRecord,
        attempts: u32,
        /// False when the same (task, program) was already in the manual.
        committed: bool,
    },
    Failure {
        attempts: u32,
        last_report: Option<CritiqueReport>,
        /// Set when a generator or critic fault ended the loop.
        diagnostic: Option<String>,
    },
}

impl LoopOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, LoopOutcome::Success { .. })
    }

    pub fn attempts(&self) -> u32 {
        match self {
            LoopOutcome::Success { attempts, .. } | LoopOutcome::Failure { attempts, .. } => *attempts,
        }
    }
}

/// Runs at most `max_iters` generate-execute-critique rounds. Programs that
/// fail to execute count as rejected attempts. Only acceptance touches the
/// manual.
pub fn run_loop(
    task: &Task,
    generator: &mut dyn Generator,
    critic: &mut dyn Critic,
    max_iters: u32,
    manual: &mut Manual,
) -> Result<LoopOutcome> {
    if max_iters == 0 {
        return Err(Error::InvalidConfig("max_iters must be >= 1".into()));
    }
    let retrieved: Vec<ManualRecord> = manual
        .lookup(&task.text, manual::DEFAULT_TOP_K, manual::DEFAULT_MIN_SCORE)
        .into_iter()
        .map(|(_, r)| r.clone())
        .collect();
    let mut history: Vec<Attempt> = Vec::new();
    for attempt in 1..=max_iters {
        let ctx = Context {
            task,
            history: &history,
            retrieved: &retrieved,
        };
        let program = match generator.propose(&ctx) {
            Ok(p) => p,
            Err(e) => {
                return Ok(LoopOutcome::Failure {
                    attempts: attempt,
                    last_report: history.last().map(|a| a.report.clone()),
                    diagnostic: Some(format!("generator: {e}")),
                })
            }
        };
        let report = match toy_execute(&program) {
            Ok(asset) => match critic.critique(task, &asset, &program) {
                Ok(r) => r,
                Err(e) => {
                    return Ok(LoopOutcome::Failure {
                        attempts: attempt,
                        last_report: history.last().map(|a| a.report.clone()),
                        diagnostic: Some(format!("critic: {e}")),
                    })
                }
            },
            Err(e) => CritiqueReport::rejected(e.to_string()),
        };
        if report.accepted {
            let c = manual.commit(&task.text, &program, attempt);
            return Ok(LoopOutcome::Success {
                record: manual.records()[c.index].clone(),
                attempts: attempt,
                committed: !c.already_present,
            });
        }
        history.push(Attempt { program, report });
    }
    Ok(LoopOutcome::Failure {
        attempts: max_iters,
        last_report: history.last().map(|a| a.report.clone()),
        diagnostic: None,
    })
}

/// Re-executes a stored program and critiques it against `task`.
pub fn replay(record: &ManualRecord, task: &Task) -> Result<CritiqueReport> {
    let program = record.program();
    let asset = toy_execute(&program)?;
    Ok(rule_critic(task, &asset, &program))
}
