//! Tasks as predicate lists, and the deterministic rule critic.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::grammar::{AssetDescriptor, Category, Program};

fn default_tol() -> f64 {
    1e-9
}

/// A requirement over program parameters or derived asset quantities
/// (`extent_dx`, `extent_dy`, `extent_dz`, `part_count`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum Predicate {
    Category {
        equals: Category,
    },
    Range {
        param: String,
        min: f64,
        max: f64,
    },
    Equals {
        param: String,
        value: f64,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    /// A named validity flag of the asset must hold.
    Flag {
        name: String,
    },
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Category { equals } => write!(f, "category == {equals}"),
            Predicate::Range { param, min, max } => write!(f, "{param} in [{min}, {max}]"),
            Predicate::Equals { param, value, .. } => write!(f, "{param} == {value}"),
            Predicate::Flag { name } => write!(f, "flag {name}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Task {
    pub text: String,
    pub spec: Vec<Predicate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Increase,
    Decrease,
    Set,
}

/// Directional hint. `target` is the value to aim for: the range midpoint
/// for range failures, the required value for equality failures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suggestion {
    pub param: String,
    pub direction: Direction,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub predicate: String,
    /// `None` when the quantity could not be observed.
    pub observed: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CritiqueReport {
    pub accepted: bool,
    pub failures: Vec<Failure>,
    pub suggestions: Vec<Suggestion>,
}

impl CritiqueReport {
    pub fn from_failures(failures: Vec<Failure>, suggestions: Vec<Suggestion>) -> CritiqueReport {
        CritiqueReport {
            accepted: failures.is_empty(),
            failures,
            suggestions,
        }
    }

    /// Rejection for a program that could not be executed.
    pub fn rejected(reason: impl Into<String>) -> CritiqueReport {
        CritiqueReport::from_failures(
            vec![Failure {
                predicate: reason.into(),
                observed: None,
            }],
            Vec::new(),
        )
    }
}

fn observe(name: &str, asset: &AssetDescriptor, program: &Program) -> Option<f64> {
    program.get(name).or_else(|| asset.derived(name))
}

/// Checks every predicate, then every validity flag of the asset.
/// Suggestions are issued only for program parameters.
pub fn rule_critic(task: &Task, asset: &AssetDescriptor, program: &Program) -> CritiqueReport {
    let mut failures = Vec::new();
    let mut suggestions = Vec::new();
    let mut fail = |p: &Predicate, observed: Option<f64>| {
        failures.push(Failure {
            predicate: p.to_string(),
            observed,
        })
    };
    for p in &task.spec {
        match p {
            Predicate::Category { equals } => {
                if asset.category != *equals {
                    fail(p, None);
                }
            }
            Predicate::Range { param, min, max } => match observe(param, asset, program) {
                Some(v) if v >= *min && v <= *max => {}
                Some(v) => {
                    fail(p, Some(v));
                    if program.get(param).is_some() {
                        suggestions.push(Suggestion {
                            param: param.clone(),
                            direction: if v < *min { Direction::Increase } else { Direction::Decrease },
                            target: 0.5 * (min + max),
                        });
                    }
                }
                None => fail(p, None),
            },
            Predicate::Equals { param, value, tol } => match observe(param, asset, program) {
                Some(v) if (v - value).abs() <= *tol => {}
                Some(v) => {
                    fail(p, Some(v));
                    if program.get(param).is_some() {
                        suggestions.push(Suggestion {
                            param: param.clone(),
                            direction: Direction::Set,
                            target: *value,
                        });
                    }
                }
                None => fail(p, None),
            },
            Predicate::Flag { name } => {
                if asset.flag(name) != Some(true) {
                    fail(p, None);
                }
            }
        }
    }
    for (name, ok) in &asset.flags {
        if !ok {
            failures.push(Failure {
                predicate: format!("valid {name}"),
                observed: None,
            });
        }
    }
    CritiqueReport::from_failures(failures, suggestions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forge::grammar::toy_execute;

    fn table(legs: f64, height: f64) -> Program {
        Program::new(
            Category::Table,
            &[
                ("top_dx", 1.2),
                ("top_dy", 0.6),
                ("top_dz", 0.05),
                ("leg_count", legs),
                ("leg_radius", 0.03),
                ("height", height),
            ],
        )
    }

    fn task(spec: Vec<Predicate>) -> Task {
        Task {
            text: "a table".into(),
            spec,
        }
    }

    #[test]
    fn equality_accepts() {
        let t = task(vec![Predicate::Equals {
            param: "leg_count".into(),
            value: 4.0,
            tol: 1e-9,
        }]);
        let p = table(4.0, 0.75);
        let r = rule_critic(&t, &toy_execute(&p).unwrap(), &p);
        assert!(r.accepted);
        assert!(r.failures.is_empty());
    }

    #[test]
    fn range_failure_suggests_increase() {
        let t = task(vec![Predicate::Range {
            param: "height".into(),
            min: 0.7,
            max: 0.8,
        }]);
        let p = table(4.0, 0.5);
        let r = rule_critic(&t, &toy_execute(&p).unwrap(), &p);
        assert!(!r.accepted);
        assert_eq!(r.failures[0].observed, Some(0.5));
        assert_eq!(r.suggestions[0].param, "height");
        assert_eq!(r.suggestions[0].direction, Direction::Increase);
    }

    #[test]
    fn derived_and_category_predicates() {
        let t = task(vec![
            Predicate::Category {
                equals: Category::Shelf,
            },
            Predicate::Range {
                param: "extent_dx".into(),
                min: 1.0,
                max: 2.0,
            },
        ]);
        let p = table(4.0, 0.75);
        let r = rule_critic(&t, &toy_execute(&p).unwrap(), &p);
        assert_eq!(r.failures.len(), 1);
        assert!(r.failures[0].predicate.starts_with("category"));
        assert!(r.suggestions.is_empty());
        assert_eq!(r.accepted, r.failures.is_empty());
    }
}
