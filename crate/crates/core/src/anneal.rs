//! Simulated annealing over object poses with Metropolis acceptance, and the
//! top-down driver that solves an object tree one level at a time.
//!
//! Hard constraints enter the annealed objective as a penalty:
//! `L̂ = L + W · total_violation`. `W` starts at `penalty_w0 · max(1, Σλ)` and
//! grows tenfold after every restart that ends infeasible.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::oracle;
use crate::problem::{self, Breakdown, LayoutProblem, ProblemConfig};
use crate::relation::{self, Placed, RelationTerm};
use crate::rng::{self, Purpose, Rng};
use crate::scene::{Domain, Layout, ObjectNode, Pose};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoKeyword {
    Auto,
}

/// A tunable that is either derived from the problem or given explicitly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Setting {
    Auto(AutoKeyword),
    Fixed(f64),
}

impl Setting {
    pub const AUTO: Setting = Setting::Auto(AutoKeyword::Auto);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveProbs {
    pub translate: f64,
    pub rotate_jitter: f64,
    pub rotate_snap: f64,
    pub swap: f64,
}

impl Default for MoveProbs {
    fn default() -> Self {
        MoveProbs {
            translate: 0.5,
            rotate_jitter: 0.2,
            rotate_snap: 0.1,
            swap: 0.2,
        }
    }
}

/// Discrete pose grid: cell centers spaced `xy_step` apart and a yaw set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapGrid {
    pub xy_step: f64,
    #[serde(default = "default_yaw_set")]
    pub yaw_set: Vec<f64>,
}

pub fn default_yaw_set() -> Vec<f64> {
    vec![0.0, FRAC_PI_2, std::f64::consts::PI, 3.0 * FRAC_PI_2]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnealConfig {
    pub seed: u64,
    pub t0: Setting,
    pub alpha: f64,
    /// Proposals per temperature step; `None` means `100 · n`.
    pub iters_per_temp: Option<u64>,
    pub t_min_ratio: f64,
    /// Proposal budget per restart.
    pub max_evals: u64,
    pub move_probs: MoveProbs,
    pub sigma_xy: Setting,
    pub sigma_yaw: f64,
    pub penalty_w0: f64,
    pub restarts: u32,
    /// Restrict positions and yaws to a grid (the oracle's search space).
    pub snap: Option<SnapGrid>,
    pub feasibility_tol: f64,
    /// Keep one trace record per accepted move.
    pub record_trace: bool,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            seed: 0,
            t0: Setting::AUTO,
            alpha: 0.95,
            iters_per_temp: None,
            t_min_ratio: 1e-4,
            max_evals: 200_000,
            move_probs: MoveProbs::default(),
            sigma_xy: Setting::AUTO,
            sigma_yaw: 0.25,
            penalty_w0: 1e3,
            restarts: 3,
            snap: None,
            feasibility_tol: problem::DEFAULT_FEASIBILITY_TOL,
            record_trace: false,
        }
    }
}

impl AnnealConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        let p = self.move_probs;
        let probs = [p.translate, p.rotate_jitter, p.rotate_snap, p.swap];
        if probs.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return bad("move probabilities must be >= 0");
        }
        if (probs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad("move probabilities must sum to 1");
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad("alpha must lie in (0, 1)");
        }
        if self.max_evals == 0 || self.restarts == 0 || self.iters_per_temp == Some(0) {
            return bad("budgets must be positive");
        }
        if !(self.t_min_ratio > 0.0 && self.t_min_ratio.is_finite()) {
            return bad("t_min_ratio must be positive");
        }
        if let Setting::Fixed(t) = self.t0 {
            if !(t > 0.0 && t.is_finite()) {
                return bad("t0 must be positive");
            }
        }
        if let Setting::Fixed(s) = self.sigma_xy {
            if !(s >= 0.0 && s.is_finite()) {
                return bad("sigma_xy must be >= 0");
            }
        }
        if !(self.sigma_yaw >= 0.0 && self.sigma_yaw.is_finite()) {
            return bad("sigma_yaw must be >= 0");
        }
        if !(self.penalty_w0 > 0.0 && self.penalty_w0.is_finite()) {
            return bad("penalty_w0 must be positive");
        }
        if self.feasibility_tol.is_nan() || self.feasibility_tol < 0.0 {
            return bad("feasibility_tol must be >= 0");
        }
        if let Some(g) = &self.snap {
            if !(g.xy_step > 0.0 && g.xy_step.is_finite()) || g.yaw_set.is_empty() {
                return bad("snap grid needs xy_step > 0 and a non-empty yaw set");
            }
        }
        Ok(())
    }
}

/// One accepted move.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub restart: u32,
    pub eval: u64,
    pub temperature: f64,
    /// L̂ of the accepted state.
    pub current: f64,
    /// Lowest L̂ seen so far in this restart.
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub layout: Layout,
    pub breakdown: Breakdown,
    pub feasible: bool,
    pub evals_used: u64,
    pub restart_index: u32,
    pub trace: Vec<TraceRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Translate,
    RotateJitter,
    RotateSnap,
    Swap,
}

/// `delta ≤ 0` always passes; otherwise accept when `u < exp(-delta / T)`.
pub fn metropolis_accept(delta: f64, temperature: f64, u: f64) -> bool {
    delta <= 0.0 || u < (-delta / temperature).exp()
}

/// Grid of snap positions for a domain, with nearest-cell lookup.
#[derive(Debug, Clone)]
struct SnapSpace {
    origin: Vec2,
    step: f64,
    nx: usize,
    ny: usize,
    yaws: Vec<f64>,
}

impl SnapSpace {
    fn new(domain: &Domain, grid: &SnapGrid) -> SnapSpace {
        let (lo, _) = domain.bounds();
        let (nx, ny) = oracle::cell_counts(domain, grid.xy_step);
        SnapSpace {
            origin: lo,
            step: grid.xy_step,
            nx: nx.max(1),
            ny: ny.max(1),
            yaws: grid.yaw_set.clone(),
        }
    }

    fn center(&self, i: usize, j: usize) -> Vec2 {
        Vec2::new(
            self.origin.x + (i as f64 + 0.5) * self.step,
            self.origin.y + (j as f64 + 0.5) * self.step,
        )
    }

    fn nearest(&self, p: Vec2) -> Vec2 {
        let idx = |v: f64, o: f64, n: usize| {
            let k = ((v - o) / self.step - 0.5).round();
            k.clamp(0.0, (n - 1) as f64) as usize
        };
        self.center(idx(p.x, self.origin.x, self.nx), idx(p.y, self.origin.y, self.ny))
    }

    fn nearest_yaw_index(&self, yaw: f64) -> usize {
        (0..self.yaws.len())
            .min_by(|&a, &b| {
                let da = crate::scene::wrap_diff(self.yaws[a] - yaw).abs();
                let db = crate::scene::wrap_diff(self.yaws[b] - yaw).abs();
                da.total_cmp(&db)
            })
            .unwrap_or(0)
    }
}

/// Per-run constants shared by the move kernel.
struct Kernel<'a> {
    problem: &'a LayoutProblem,
    movable: Vec<usize>,
    probs: MoveProbs,
    sigma_xy: f64,
    sigma_yaw: f64,
    snap: Option<SnapSpace>,
}

impl<'a> Kernel<'a> {
    fn new(problem: &'a LayoutProblem, config: &AnnealConfig) -> Kernel<'a> {
        let sigma_xy = match config.sigma_xy {
            Setting::Fixed(s) => s,
            Setting::Auto(_) => 0.05 * problem.domain().diameter(),
        };
        Kernel {
            problem,
            movable: problem.movable_indices(),
            probs: config.move_probs,
            sigma_xy,
            sigma_yaw: config.sigma_yaw,
            snap: config
                .snap
                .as_ref()
                .map(|g| SnapSpace::new(problem.domain(), g)),
        }
    }

    fn draw_move(&self, rng: &mut Rng) -> Move {
        let u: f64 = rng.random();
        let p = self.probs;
        if u < p.translate {
            Move::Translate
        } else if u < p.translate + p.rotate_jitter {
            Move::RotateJitter
        } else if u < p.translate + p.rotate_jitter + p.rotate_snap {
            Move::RotateSnap
        } else {
            Move::Swap
        }
    }

    fn propose(&self, layout: &Layout, rng: &mut Rng) -> (Layout, Vec<usize>) {
        let mv = self.draw_move(rng);
        self.apply(mv, layout, rng)
    }

    fn apply(&self, mv: Move, layout: &Layout, rng: &mut Rng) -> (Layout, Vec<usize>) {
        let mut next = layout.clone();
        let n = self.movable.len();
        let i = self.movable[rng.random_range(0..n)];
        let pose = *layout.pose(i);
        let full = self.problem.full_6dof();
        let normal = |rng: &mut Rng| -> f64 { StandardNormal.sample(rng) };
        match mv {
            Move::Translate => {
                let dx = self.sigma_xy * normal(rng);
                let dy = self.sigma_xy * normal(rng);
                let mut p = Vec2::new(pose.x() + dx, pose.y() + dy);
                if let Some(s) = &self.snap {
                    p = s.nearest(p);
                }
                let z = if full {
                    pose.z() + self.sigma_xy * normal(rng)
                } else {
                    pose.z()
                };
                next.set(i, pose.with_position(p.x, p.y, z));
                (next, vec![i])
            }
            Move::RotateJitter => {
                let new = if let Some(s) = &self.snap {
                    let k = s.nearest_yaw_index(pose.yaw());
                    let m = s.yaws.len();
                    let step = if rng.random::<bool>() { 1 } else { m - 1 };
                    pose.with_yaw(s.yaws[(k + step) % m])
                } else if full {
                    pose.with_angles(
                        pose.yaw() + self.sigma_yaw * normal(rng),
                        pose.pitch() + self.sigma_yaw * normal(rng),
                        pose.roll() + self.sigma_yaw * normal(rng),
                    )
                } else {
                    pose.with_yaw(pose.yaw() + self.sigma_yaw * normal(rng))
                };
                next.set(i, new);
                (next, vec![i])
            }
            Move::RotateSnap => {
                let yaw = match &self.snap {
                    Some(s) => s.yaws[rng.random_range(0..s.yaws.len())],
                    None => FRAC_PI_2 * rng.random_range(0..4u32) as f64,
                };
                next.set(i, pose.with_yaw(yaw));
                (next, vec![i])
            }
            Move::Swap => {
                if n < 2 {
                    return (next, Vec::new());
                }
                let mut k = rng.random_range(0..n - 1);
                if self.movable[k] == i {
                    k = n - 1;
                }
                let j = self.movable[k];
                let (a, b) = (*layout.pose(i), *layout.pose(j));
                if full {
                    next.set(i, b);
                    next.set(j, a);
                } else {
                    // each object keeps its own support height
                    next.set(i, Pose::upright(b.x(), b.y(), a.z(), b.yaw()));
                    next.set(j, Pose::upright(a.x(), a.y(), b.z(), a.yaw()));
                }
                (next, vec![i, j])
            }
        }
    }
}

/// Random starting layout: positions rejection-sampled so the footprint lies
/// in the domain (falling back to the centroid), yaw a random quarter turn.
pub fn init_layout(problem: &LayoutProblem, config: &AnnealConfig, rng: &mut Rng) -> Layout {
    let domain = problem.domain();
    let snap = config.snap.as_ref().map(|g| SnapSpace::new(domain, g));
    let (lo, hi) = domain.bounds();
    let poses = problem
        .objects()
        .iter()
        .enumerate()
        .map(|(i, o)| {
            if !o.movable {
                return o.pose;
            }
            let z = problem.support_z(i);
            let yaw = match &snap {
                Some(s) => s.yaws[rng.random_range(0..s.yaws.len())],
                None => FRAC_PI_2 * rng.random_range(0..4u32) as f64,
            };
            for _ in 0..100 {
                let mut p = Vec2::new(rng.random_range(lo.x..=hi.x), rng.random_range(lo.y..=hi.y));
                if let Some(s) = &snap {
                    p = s.nearest(p);
                }
                let pose = Pose::upright(p.x, p.y, z, yaw);
                let placed = Placed {
                    pose: &pose,
                    extent: &o.extent,
                    category: &o.category,
                };
                if relation::measure_containment(&placed, domain).is_ok_and(|m| m == 0.0) {
                    return pose;
                }
            }
            let c = domain.centroid();
            let c = snap.as_ref().map_or(c, |s| s.nearest(c));
            Pose::upright(c.x, c.y, z, yaw)
        })
        .collect();
    problem.layout_from(poses)
}

/// One proposal from `layout` under `config`'s move mix.
pub fn propose_move(
    layout: &Layout,
    problem: &LayoutProblem,
    rng: &mut Rng,
    config: &AnnealConfig,
) -> (Layout, Vec<usize>) {
    Kernel::new(problem, config).propose(layout, rng)
}

/// Applies a specific move type (used to exercise each move in isolation).
pub fn apply_move(
    mv: Move,
    layout: &Layout,
    problem: &LayoutProblem,
    rng: &mut Rng,
    config: &AnnealConfig,
) -> (Layout, Vec<usize>) {
    Kernel::new(problem, config).apply(mv, layout, rng)
}

struct RestartResult {
    layout: Layout,
    objective: f64,
    violation: f64,
    feasible: bool,
    evals: u64,
    trace: Vec<TraceRecord>,
}

fn run_restart(
    problem: &LayoutProblem,
    config: &AnnealConfig,
    kernel: &Kernel,
    level: u64,
    restart: u32,
    weight: f64,
) -> Result<RestartResult> {
    let r = u64::from(restart);
    let mut init_rng = rng::stream(config.seed, level, r, Purpose::Init);
    let mut move_rng = rng::stream(config.seed, level, r, Purpose::Moves);
    let mut accept_rng = rng::stream(config.seed, level, r, Purpose::Accept);
    let tol = config.feasibility_tol;

    let mut current = init_layout(problem, config, &mut init_rng);
    let (l0, v0) = problem.objective_and_violation(current.poses())?;
    let mut current_aug = l0 + weight * v0;
    let mut evals: u64 = 1;

    let t0 = match config.t0 {
        Setting::Fixed(t) => t,
        Setting::Auto(_) => {
            let mut probe_rng = rng::stream(config.seed, level, r, Purpose::Temperature);
            let mut samples = Vec::with_capacity(100);
            for _ in 0..100 {
                let (cand, _) = kernel.propose(&current, &mut probe_rng);
                evals += 1;
                if let Ok((l, v)) = problem.objective_and_violation(cand.poses()) {
                    samples.push(l + weight * v);
                }
            }
            std_dev(&samples).max(1e-6)
        }
    };
    let t_min = config.t_min_ratio * t0;
    let per_temp = config
        .iters_per_temp
        .unwrap_or(100 * kernel.movable.len() as u64);

    let mut best = (current.clone(), l0, v0, current_aug);
    let mut best_seen = current_aug;
    let mut trace = Vec::new();
    let mut temperature = t0;
    'outer: while temperature >= t_min && evals < config.max_evals {
        for _ in 0..per_temp {
            if evals >= config.max_evals {
                break 'outer;
            }
            let (cand, _) = kernel.propose(&current, &mut move_rng);
            evals += 1;
            let u: f64 = accept_rng.random();
            let Ok((l, v)) = problem.objective_and_violation(cand.poses()) else {
                continue;
            };
            let aug = l + weight * v;
            if !metropolis_accept(aug - current_aug, temperature, u) {
                continue;
            }
            current = cand;
            current_aug = aug;
            let improves = match (v <= tol, best.2 <= tol) {
                (true, false) => true,
                (false, true) => false,
                _ => aug < best.3,
            };
            if improves {
                best = (current.clone(), l, v, aug);
            }
            best_seen = best_seen.min(aug);
            if config.record_trace {
                trace.push(TraceRecord {
                    restart,
                    eval: evals,
                    temperature,
                    current: aug,
                    best: best_seen,
                });
            }
        }
        temperature *= config.alpha;
    }
    let (layout, objective, violation, _) = best;
    Ok(RestartResult {
        layout,
        objective,
        violation,
        feasible: violation <= tol,
        evals,
        trace,
    })
}

fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Anneals one problem with restarts and returns the best solution found.
/// Infeasible outcomes are returned with `feasible = false`, not as errors.
pub fn anneal(problem: &LayoutProblem, config: &AnnealConfig) -> Result<Solution> {
    anneal_level(problem, config, 0)
}

/// As [`anneal`], with `level` mixed into every random stream key.
pub fn anneal_level(problem: &LayoutProblem, config: &AnnealConfig, level: u64) -> Result<Solution> {
    config.validate()?;
    if problem.movable_count() == 0 {
        return Err(Error::NoMovable(problem.level().to_string()));
    }
    let kernel = Kernel::new(problem, config);
    let mut weight = config.penalty_w0 * problem.total_weight().max(1.0);
    let mut best: Option<(u32, RestartResult)> = None;
    let mut total_evals = 0;
    let mut trace = Vec::new();
    for restart in 0..config.restarts {
        let run = run_restart(problem, config, &kernel, level, restart, weight)?;
        total_evals += run.evals;
        trace.extend_from_slice(&run.trace);
        if !run.feasible {
            weight *= 10.0;
        }
        let better = match &best {
            None => true,
            Some((_, b)) => match (run.feasible, b.feasible) {
                (true, false) => true,
                (false, true) => false,
                (true, true) => run.objective < b.objective,
                (false, false) => {
                    (run.violation, run.objective) < (b.violation, b.objective)
                }
            },
        };
        if better {
            best = Some((restart, run));
        }
    }
    let (restart_index, run) = best.expect("at least one restart");
    let breakdown = problem.evaluate(&run.layout)?;
    Ok(Solution {
        feasible: problem::is_feasible(&breakdown, config.feasibility_tol),
        layout: run.layout,
        breakdown,
        evals_used: total_evals,
        restart_index,
        trace,
    })
}

/// Result of solving one level of the tree.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub level: String,
    /// `None` when the level had nothing to optimize.
    pub solution: Option<Solution>,
}

impl LevelReport {
    pub fn feasible(&self) -> bool {
        self.solution.as_ref().is_none_or(|s| s.feasible)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolvedTree {
    pub tree: ObjectNode,
    pub levels: Vec<LevelReport>,
}

impl SolvedTree {
    pub fn feasible(&self) -> bool {
        self.levels.iter().all(LevelReport::feasible)
    }

    pub fn level(&self, id: &str) -> Option<&LevelReport> {
        self.levels.iter().find(|l| l.level == id)
    }
}

/// Solves the tree top-down with annealing at every level.
pub fn solve_hierarchical(
    root: &ObjectNode,
    room: &Domain,
    terms: &BTreeMap<String, Vec<RelationTerm>>,
    problem_config: &ProblemConfig,
    config: &AnnealConfig,
) -> Result<SolvedTree> {
    solve_hierarchical_with(root, room, terms, problem_config, |p, level| {
        anneal_level(p, config, level)
    })
}

/// Top-down driver with a pluggable per-level solver. Levels are visited
/// depth-first; each parent is solved before its children, in the parent's
/// local frame, and `level` counts solved levels in visiting order.
pub fn solve_hierarchical_with(
    root: &ObjectNode,
    room: &Domain,
    terms: &BTreeMap<String, Vec<RelationTerm>>,
    problem_config: &ProblemConfig,
    mut solve: impl FnMut(&LayoutProblem, u64) -> Result<Solution>,
) -> Result<SolvedTree> {
    let mut tree = root.clone();
    let mut levels = Vec::new();
    let mut counter = 0u64;
    solve_node(
        &mut tree,
        room,
        true,
        terms,
        problem_config,
        &mut solve,
        &mut counter,
        &mut levels,
    )?;
    Ok(SolvedTree { tree, levels })
}

#[allow(clippy::too_many_arguments)]
fn solve_node(
    node: &mut ObjectNode,
    room: &Domain,
    is_root: bool,
    terms: &BTreeMap<String, Vec<RelationTerm>>,
    problem_config: &ProblemConfig,
    solve: &mut impl FnMut(&LayoutProblem, u64) -> Result<Solution>,
    counter: &mut u64,
    levels: &mut Vec<LevelReport>,
) -> Result<()> {
    if node.children.is_empty() {
        return Ok(());
    }
    let level_terms = terms.get(&node.id).map(Vec::as_slice).unwrap_or(&[]);
    match problem::assemble(node, room, is_root, level_terms, problem_config) {
        Ok(p) => {
            let solution = solve(&p, *counter)?;
            *counter += 1;
            for (child, pose) in node.children.iter_mut().zip(solution.layout.poses()) {
                child.local_pose = *pose;
            }
            levels.push(LevelReport {
                level: node.id.clone(),
                solution: Some(solution),
            });
        }
        Err(Error::NoMovable(_)) => {
            let domain = problem::level_domain(node, room, is_root, problem_config.child_clearance)?;
            for child in &mut node.children {
                child.local_pose = child.local_pose.with_z(domain.support_z(&child.extent));
            }
            levels.push(LevelReport {
                level: node.id.clone(),
                solution: None,
            });
        }
        Err(e) => return Err(e),
    }
    for child in &mut node.children {
        solve_node(child, room, false, terms, problem_config, solve, counter, levels)?;
    }
    Ok(())
}
