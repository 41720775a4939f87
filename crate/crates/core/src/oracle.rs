//! Exhaustive reference solver over a discretized pose grid, and a
//! Monte-Carlo estimator for polygon intersection area.

use std::f64::consts::FRAC_PI_2;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::anneal::Solution;
use crate::error::{Error, Result};
use crate::geom::{self, Vec2};
use crate::problem::{self, LayoutProblem};
use crate::relation::{self, Placed, RelationKind, TermValue};
use crate::rng;
use crate::scene::{Domain, Pose};

/// Upper bound on enumerated joint assignments.
pub const MAX_COMBINATIONS: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub xy_step: f64,
    pub yaw_set: Vec<f64>,
    pub max_objects: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            xy_step: 0.25,
            yaw_set: vec![0.0, FRAC_PI_2, std::f64::consts::PI, 3.0 * FRAC_PI_2],
            max_objects: 3,
        }
    }
}

impl GridSpec {
    pub fn with_step(xy_step: f64) -> GridSpec {
        GridSpec {
            xy_step,
            ..GridSpec::default()
        }
    }
}

/// Cells per axis when tiling the domain's bounding box with `step`.
pub fn cell_counts(domain: &Domain, step: f64) -> (usize, usize) {
    let (lo, hi) = domain.bounds();
    let n = |w: f64| (w / step + 1e-9).floor().max(0.0) as usize;
    (n(hi.x - lo.x), n(hi.y - lo.y))
}

/// Cell centers lying inside the domain, ordered by (x, y).
pub fn grid_positions(domain: &Domain, step: f64) -> Vec<Vec2> {
    let (lo, _) = domain.bounds();
    let (nx, ny) = cell_counts(domain, step);
    let mut out = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            let p = Vec2::new(lo.x + (i as f64 + 0.5) * step, lo.y + (j as f64 + 0.5) * step);
            if domain.contains(p) {
                out.push(p);
            }
        }
    }
    out
}

fn better_margin(best: f64) -> f64 {
    1e-12 * best.abs().max(1.0)
}

struct Search<'a> {
    problem: &'a LayoutProblem,
    tol: f64,
    movable: Vec<usize>,
    candidates: Vec<Vec<Pose>>,
    /// Terms that become fully assigned at each depth.
    terms_at: Vec<Vec<usize>>,
    poses: Vec<Pose>,
    best: Option<(bool, f64, f64, Vec<Pose>)>,
    leaves: u64,
}

impl Search<'_> {
    /// Adds `terms` to the running sums. Returns false as soon as the
    /// partial sums alone rule out beating the incumbent; every term value is
    /// nonnegative, so partial sums are lower bounds.
    fn accumulate(&self, terms: &[usize], soft: &mut f64, hard: &mut f64) -> Result<bool> {
        for &t in terms {
            match self.problem.term_value(t, &self.poses)? {
                TermValue::Soft(v) => *soft += v,
                TermValue::Hard(v) => *hard += v,
            }
            if self.prunable(*soft, *hard) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// True when no completion of a partial assignment with these lower
    /// bounds could replace the incumbent.
    fn prunable(&self, soft: f64, hard: f64) -> bool {
        match &self.best {
            None => false,
            Some((true, l, _, _)) => hard > self.tol || soft >= l - better_margin(*l),
            Some((false, _, v, _)) => hard > v + better_margin(*v),
        }
    }

    fn offer(&mut self, soft: f64, hard: f64) {
        let feasible = hard <= self.tol;
        let replace = match &self.best {
            None => true,
            Some((bf, bl, bv, _)) => match (feasible, *bf) {
                (true, false) => true,
                (false, true) => false,
                (true, true) => soft < bl - better_margin(*bl),
                (false, false) => {
                    hard < bv - better_margin(*bv)
                        || (hard <= bv + better_margin(*bv) && soft < bl - better_margin(*bl))
                }
            },
        };
        if replace {
            self.best = Some((feasible, soft, hard, self.poses.clone()));
        }
    }

    fn descend(&mut self, depth: usize, soft: f64, hard: f64) -> Result<()> {
        if depth == self.movable.len() {
            self.leaves += 1;
            self.offer(soft, hard);
            return Ok(());
        }
        let obj = self.movable[depth];
        for c in 0..self.candidates[depth].len() {
            self.poses[obj] = self.candidates[depth][c];
            let (mut s, mut h) = (soft, hard);
            let terms = std::mem::take(&mut self.terms_at[depth + 1]);
            let r = self.accumulate(&terms, &mut s, &mut h);
            self.terms_at[depth + 1] = terms;
            if r? {
                self.descend(depth + 1, s, h)?;
            }
        }
        Ok(())
    }
}

/// Enumerates every joint assignment of movable objects to grid cells and
/// yaws. Returns the feasible assignment with minimal `L`, ties going to the
/// lexicographically smallest pose tuple; with no feasible assignment, the
/// one minimizing `(total_violation, L)`.
pub fn oracle_solve(problem: &LayoutProblem, grid: &GridSpec) -> Result<Solution> {
    if !(grid.xy_step > 0.0 && grid.xy_step.is_finite()) || grid.yaw_set.is_empty() {
        return Err(Error::InvalidConfig(
            "grid needs xy_step > 0 and a non-empty yaw set".into(),
        ));
    }
    let movable = problem.movable_indices();
    if movable.len() > grid.max_objects {
        return Err(Error::OracleTooLarge(format!(
            "{} movable objects exceed max_objects = {}",
            movable.len(),
            grid.max_objects
        )));
    }
    let domain = problem.domain();
    let positions = grid_positions(domain, grid.xy_step);
    let mut combos: u128 = 1;
    let mut candidates = Vec::with_capacity(movable.len());
    let mut contained = vec![false; problem.objects().len()];
    for &i in &movable {
        let o = &problem.objects()[i];
        let z = problem.support_z(i);
        let mut all = Vec::with_capacity(positions.len() * grid.yaw_set.len());
        for p in &positions {
            for &yaw in &grid.yaw_set {
                all.push(Pose::upright(p.x, p.y, z, yaw));
            }
        }
        all.sort_by(|a, b| {
            (a.x(), a.y(), a.yaw())
                .partial_cmp(&(b.x(), b.y(), b.yaw()))
                .expect("finite poses")
        });
        all.dedup();
        let inside: Vec<Pose> = all
            .iter()
            .copied()
            .filter(|pose| {
                let placed = Placed {
                    pose,
                    extent: &o.extent,
                    category: &o.category,
                };
                relation::measure_containment(&placed, domain).is_ok_and(|m| m == 0.0)
            })
            .collect();
        let list = if inside.is_empty() {
            all
        } else {
            contained[i] = true;
            inside
        };
        combos = combos.saturating_mul(list.len() as u128);
        candidates.push(list);
    }
    if combos > MAX_COMBINATIONS {
        return Err(Error::OracleTooLarge(format!(
            "{combos} combinations exceed {MAX_COMBINATIONS}"
        )));
    }
    if candidates.iter().any(Vec::is_empty) {
        return Err(Error::OracleTooLarge(
            "grid has no cell centers inside the domain".into(),
        ));
    }

    // depth 0 holds terms over fixed objects only; depth k+1 those completed by movable k
    let mut depth_of = vec![0usize; problem.objects().len()];
    for (d, &i) in movable.iter().enumerate() {
        depth_of[i] = d + 1;
    }
    let mut terms_at = vec![Vec::new(); movable.len() + 1];
    for t in 0..problem.terms().len() {
        let parts = problem.term_participants(t);
        let known_zero = t >= problem.user_term_count()
            && problem.terms()[t].kind() == RelationKind::Containment
            && parts.len() == 1
            && contained[parts[0]];
        if known_zero {
            continue;
        }
        let d = parts.iter().map(|&i| depth_of[i]).max().unwrap_or(0);
        terms_at[d].push(t);
    }
    // polygon clipping is the expensive part; let cheaper terms prune first
    for bucket in &mut terms_at {
        bucket.sort_by_key(|&t| {
            matches!(
                problem.terms()[t].kind(),
                RelationKind::Collision | RelationKind::Containment
            )
        });
    }

    let mut search = Search {
        problem,
        tol: problem::DEFAULT_FEASIBILITY_TOL,
        movable,
        candidates,
        poses: problem.initial_layout().poses().to_vec(),
        terms_at,
        best: None,
        leaves: 0,
    };
    let (mut soft, mut hard) = (0.0, 0.0);
    let base = std::mem::take(&mut search.terms_at[0]);
    search.accumulate(&base, &mut soft, &mut hard)?;
    search.descend(0, soft, hard)?;

    let (_, _, _, poses) = search.best.expect("non-empty candidate lists");
    let layout = problem.layout_from(poses);
    let breakdown = problem.evaluate(&layout)?;
    Ok(Solution {
        feasible: problem::is_feasible(&breakdown, problem::DEFAULT_FEASIBILITY_TOL),
        layout,
        breakdown,
        evals_used: search.leaves,
        restart_index: 0,
        trace: Vec::new(),
    })
}

/// Monte-Carlo estimate of the intersection area of two convex polygons,
/// sampling uniformly over `a`'s bounding box. Returns `(estimate, std_error)`.
pub fn mc_polygon_area(a: &[Vec2], b: &[Vec2], samples: u64, seed: u64) -> (f64, f64) {
    let (lo, hi) = a.iter().fold(
        (Vec2::new(f64::INFINITY, f64::INFINITY), Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY)),
        |(lo, hi), p| (Vec2::new(lo.x.min(p.x), lo.y.min(p.y)), Vec2::new(hi.x.max(p.x), hi.y.max(p.y))),
    );
    let box_area = (hi.x - lo.x) * (hi.y - lo.y);
    if samples == 0 || box_area <= 0.0 {
        return (0.0, 0.0);
    }
    let mut r = rng::seeded(seed);
    let mut hits = 0u64;
    for _ in 0..samples {
        let p = Vec2::new(r.random_range(lo.x..hi.x), r.random_range(lo.y..hi.y));
        if geom::point_in_convex(a, p) && geom::point_in_convex(b, p) {
            hits += 1;
        }
    }
    let n = samples as f64;
    let frac = hits as f64 / n;
    (box_area * frac, box_area * (frac * (1.0 - frac) / n).sqrt())
}
