//! Append-only store of accepted (task, program) pairs with token retrieval.
//!
//! File format: one JSON object per line with fields in this order:
//! `task`, `category`, `params` (`[[name, value], ...]`), `attempts`, `seq`.
//! `seq` is the commit sequence number and serves as the commit timestamp.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::grammar::{Category, Program};
use crate::error::{Error, Result};

pub const DEFAULT_TOP_K: usize = 3;
pub const DEFAULT_MIN_SCORE: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManualRecord {
    pub task: String,
    pub category: Category,
    pub params: Vec<(String, f64)>,
    pub attempts: u32,
    pub seq: u64,
}

impl ManualRecord {
    pub fn program(&self) -> Program {
        Program {
            category: self.category,
            params: self.params.clone(),
        }
    }
}

/// Outcome of [`Manual::commit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Commit {
    /// Position of the (new or existing) record.
    pub index: usize,
    pub already_present: bool,
}

/// Lowercase alphanumeric word tokens.
pub fn tokens(text: &str) -> BTreeSet<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Jaccard similarity of two token sets; 0 when both are empty.
pub fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 0.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

fn pair_key(task: &str, program: &Program) -> String {
    // bit patterns keep -0.0 and 0.0 apart, matching the stored text
    let mut key = format!("{task}\u{0}{}", program.category);
    for (k, v) in &program.params {
        key.push('\u{0}');
        key.push_str(k);
        key.push('=');
        key.push_str(&v.to_bits().to_string());
    }
    key
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manual {
    records: Vec<ManualRecord>,
    /// token -> record positions
    index: BTreeMap<String, Vec<usize>>,
    keys: HashSet<String>,
}

impl Manual {
    pub fn new() -> Manual {
        Manual::default()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[ManualRecord] {
        &self.records
    }

    fn insert(&mut self, record: ManualRecord) {
        let i = self.records.len();
        for t in tokens(&record.task) {
            self.index.entry(t).or_default().push(i);
        }
        self.keys.insert(pair_key(&record.task, &record.program()));
        self.records.push(record);
    }

    /// Appends a record unless the exact (task, program) pair is stored.
    pub fn commit(&mut self, task: &str, program: &Program, attempts: u32) -> Commit {
        let key = pair_key(task, program);
        if self.keys.contains(&key) {
            let index = self
                .records
                .iter()
                .position(|r| r.task == task && r.program() == *program)
                .unwrap_or(0);
            return Commit {
                index,
                already_present: true,
            };
        }
        let seq = self.records.last().map_or(0, |r| r.seq + 1);
        self.insert(ManualRecord {
            task: task.to_string(),
            category: program.category,
            params: program.params.clone(),
            attempts,
            seq,
        });
        Commit {
            index: self.records.len() - 1,
            already_present: false,
        }
    }

    /// Up to `top_k` records with score ≥ `min_score`, ordered by score
    /// descending then commit order.
    pub fn lookup(&self, query: &str, top_k: usize, min_score: f64) -> Vec<(f64, &ManualRecord)> {
        let q = tokens(query);
        let mut candidates: BTreeSet<usize> = BTreeSet::new();
        for t in &q {
            if let Some(ids) = self.index.get(t) {
                candidates.extend(ids);
            }
        }
        let mut hits: Vec<(f64, usize)> = candidates
            .into_iter()
            .map(|i| (jaccard(&q, &tokens(&self.records[i].task)), i))
            .filter(|(s, _)| *s >= min_score)
            .collect();
        hits.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        hits.truncate(top_k);
        hits.into_iter().map(|(s, i)| (s, &self.records[i])).collect()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    /// Parses the line format, rebuilding the index. Sequence numbers must
    /// increase and pairs must be unique.
    pub fn from_jsonl(text: &str) -> Result<Manual> {
        let mut m = Manual::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let spec_err = |message: String| Error::Spec {
                location: format!("manual line {}", n + 1),
                message,
            };
            let r: ManualRecord = serde_json::from_str(line).map_err(|e| spec_err(e.to_string()))?;
            if m.records.last().is_some_and(|last| r.seq <= last.seq) {
                return Err(spec_err("sequence numbers must increase".into()));
            }
            if m.keys.contains(&pair_key(&r.task, &r.program())) {
                return Err(spec_err("duplicate (task, program) record".into()));
            }
            m.insert(r);
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Manual> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Manual::from_jsonl(&text)
    }

    /// Loads `path`, or starts empty if it does not exist.
    pub fn load_or_new(path: &Path) -> Result<Manual> {
        if path.exists() {
            Manual::load(path)
        } else {
            Ok(Manual::new())
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_jsonl()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prog(legs: f64) -> Program {
        Program::new(Category::Table, &[("leg_count", legs), ("height", 0.75)])
    }

    #[test]
    fn commit_and_dedupe() {
        let mut m = Manual::new();
        let c = m.commit("a table", &prog(4.0), 2);
        assert!(!c.already_present);
        assert_eq!(m.len(), 1);
        let c = m.commit("a table", &prog(4.0), 5);
        assert!(c.already_present);
        assert_eq!(m.len(), 1);
        m.commit("a table", &prog(3.0), 1);
        assert_eq!(m.len(), 2);
        assert_eq!(m.records()[1].seq, 1);
    }

    #[test]
    fn lookup_scores() {
        let mut m = Manual::new();
        m.commit("table four legs", &prog(4.0), 1);
        m.commit("tall bookshelf", &prog(3.0), 1);
        let hits = m.lookup("table four legs", 3, 0.2);
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].0, 1.0);
        let hits = m.lookup("wooden table four legs", 3, 0.2);
        assert_eq!(hits[0].0, 0.75);
        assert!(m.lookup("red lamp", 3, 0.2).is_empty());
    }

    #[test]
    fn lookup_orders_ties_by_commit() {
        let mut m = Manual::new();
        m.commit("round table", &prog(4.0), 1);
        m.commit("square table", &prog(4.0), 1);
        m.commit("Table", &prog(3.0), 1);
        let hits = m.lookup("table", 2, 0.0);
        assert_eq!(hits.len(), 2);
        assert_eq!(hits[0].1.task, "Table");
        assert_eq!(hits[1].1.task, "round table");
    }

    #[test]
    fn jsonl_round_trip() {
        let mut m = Manual::new();
        m.commit("table \"quoted\"", &prog(4.0), 3);
        m.commit("second", &Program::new(Category::Lamp, &[("pole_height", 0.1 + 0.2)]), 1);
        let text = m.to_jsonl();
        assert!(text.starts_with("{\"task\":\"table \\\"quoted\\\"\",\"category\":\"table\",\"params\":[[\"leg_count\",4.0]"));
        let back = Manual::from_jsonl(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_jsonl(), text);
        let dup = format!("{}{}", text, text.lines().next().unwrap());
        assert!(Manual::from_jsonl(&dup).is_err());
    }
}
