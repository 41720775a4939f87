//! One level of the object tree as an optimization problem.
//!
//! The objective is `L = Σ λ_j L_j` over the soft terms; hard terms contribute
//! violations that must vanish at a feasible layout. Sibling collision and
//! per-object containment are injected as hard constraints unless disabled.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::relation::{
    self, Comparator, ObjectLookup, Placed, RelationParams, RelationTerm, TermMode, TermValue,
};
use crate::scene::{Domain, Extent, Layout, ObjectNode, Pose};

/// Default feasibility tolerance (meters, or m² for area-valued violations).
pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemConfig {
    /// Inject pairwise `collision <= 0` among siblings.
    pub auto_collision: bool,
    /// Inject per-object `containment <= 0`.
    pub auto_containment: bool,
    /// Sibling pairs exempt from the collision rule.
    pub allow_overlap: Vec<(String, String)>,
    /// Optimize z, pitch and roll as well as x, y, yaw.
    pub full_6dof: bool,
    /// Height of the region above a parent's top face available to its children.
    pub child_clearance: f64,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        ProblemConfig {
            auto_collision: true,
            auto_containment: true,
            allow_overlap: Vec::new(),
            full_6dof: false,
            child_clearance: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemObject {
    pub id: String,
    pub category: String,
    pub extent: Extent,
    pub movable: bool,
    /// Fixed pose, or the starting pose for movable objects.
    pub pose: Pose,
}

#[derive(Debug, Clone)]
struct Compiled {
    participants: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct LayoutProblem {
    level: String,
    domain: Domain,
    objects: Vec<ProblemObject>,
    ids: Arc<[String]>,
    terms: Vec<RelationTerm>,
    compiled: Vec<Compiled>,
    user_terms: usize,
    full_6dof: bool,
}

/// Objective and constraint values of one layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Breakdown {
    pub objective: f64,
    /// Weighted soft scores in soft-term order.
    pub soft_scores: Vec<f64>,
    /// Hard violations in hard-term order.
    pub violations: Vec<f64>,
    pub total_violation: f64,
}

pub fn is_feasible(breakdown: &Breakdown, tol: f64) -> bool {
    breakdown.total_violation <= tol
}

impl LayoutProblem {
    /// Builds a problem from a flat object list. User terms come first in the
    /// term list, followed by the injected collision and containment rules.
    pub fn new(
        level: impl Into<String>,
        domain: Domain,
        objects: Vec<ProblemObject>,
        user_terms: Vec<RelationTerm>,
        config: &ProblemConfig,
    ) -> Result<LayoutProblem> {
        let level = level.into();
        if !objects.iter().any(|o| o.movable) {
            return Err(Error::NoMovable(level));
        }
        let mut index = HashMap::new();
        for (i, o) in objects.iter().enumerate() {
            if !o.extent.is_valid() {
                return Err(Error::InvalidExtent(format!("{}: {:?}", o.id, o.extent)));
            }
            if index.insert(o.id.as_str(), i).is_some() {
                return Err(Error::InvalidTerm(format!("duplicate object id `{}`", o.id)));
            }
        }
        let user_count = user_terms.len();
        let mut terms = user_terms;
        for (i, t) in terms.iter().enumerate() {
            t.validate(i)?;
            for p in &t.participants {
                if !index.contains_key(p.as_str()) {
                    return Err(Error::CrossLevelTerm {
                        index: i,
                        id: p.clone(),
                        level: level.clone(),
                    });
                }
            }
        }
        if config.auto_collision {
            let exempt: BTreeSet<(&str, &str)> = config
                .allow_overlap
                .iter()
                .flat_map(|(a, b)| [(a.as_str(), b.as_str()), (b.as_str(), a.as_str())])
                .collect();
            for i in 0..objects.len() {
                for j in i + 1..objects.len() {
                    let (a, b) = (objects[i].id.as_str(), objects[j].id.as_str());
                    if !exempt.contains(&(a, b)) {
                        terms.push(RelationTerm::hard(
                            RelationParams::Collision,
                            &[a, b],
                            Comparator::LessEq,
                            0.0,
                        ));
                    }
                }
            }
        }
        if config.auto_containment {
            for o in &objects {
                terms.push(RelationTerm::hard(
                    RelationParams::Containment,
                    &[o.id.as_str()],
                    Comparator::LessEq,
                    0.0,
                ));
            }
        }
        let compiled = terms
            .iter()
            .map(|t| Compiled {
                participants: t.participants.iter().map(|p| index[p.as_str()]).collect(),
            })
            .collect();
        let ids: Arc<[String]> = objects.iter().map(|o| o.id.clone()).collect();
        Ok(LayoutProblem {
            level,
            domain,
            objects,
            ids,
            terms,
            compiled,
            user_terms: user_count,
            full_6dof: config.full_6dof,
        })
    }

    pub fn level(&self) -> &str {
        &self.level
    }
    pub fn domain(&self) -> &Domain {
        &self.domain
    }
    pub fn objects(&self) -> &[ProblemObject] {
        &self.objects
    }
    pub fn ids(&self) -> &Arc<[String]> {
        &self.ids
    }
    pub fn terms(&self) -> &[RelationTerm] {
        &self.terms
    }
    pub fn user_term_count(&self) -> usize {
        self.user_terms
    }
    pub fn full_6dof(&self) -> bool {
        self.full_6dof
    }

    pub fn movable_indices(&self) -> Vec<usize> {
        (0..self.objects.len())
            .filter(|&i| self.objects[i].movable)
            .collect()
    }

    /// n: number of movable objects.
    pub fn movable_count(&self) -> usize {
        self.objects.iter().filter(|o| o.movable).count()
    }

    /// m: number of soft terms.
    pub fn soft_count(&self) -> usize {
        self.terms.iter().filter(|t| t.mode.is_soft()).count()
    }

    /// k: number of hard terms.
    pub fn hard_count(&self) -> usize {
        self.terms.len() - self.soft_count()
    }

    /// Σ λ_j over soft terms.
    pub fn total_weight(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| match t.mode {
                TermMode::Soft { weight } => weight,
                TermMode::Hard { .. } => 0.0,
            })
            .sum()
    }

    /// The layout given by the objects' stored poses.
    pub fn initial_layout(&self) -> Layout {
        self.layout_from(self.objects.iter().map(|o| o.pose).collect())
    }

    pub fn layout_from(&self, poses: Vec<Pose>) -> Layout {
        Layout::new(self.ids.clone(), poses)
    }

    /// Support height of an object on this level's floor.
    pub fn support_z(&self, index: usize) -> f64 {
        self.domain.support_z(&self.objects[index].extent)
    }

    fn placed<'a>(&'a self, poses: &'a [Pose], i: usize) -> Placed<'a> {
        let o = &self.objects[i];
        Placed {
            pose: &poses[i],
            extent: &o.extent,
            category: &o.category,
        }
    }

    pub(crate) fn term_value(&self, t: usize, poses: &[Pose]) -> Result<TermValue> {
        let term = &self.terms[t];
        let idx = &self.compiled[t].participants;
        let m = if idx.len() == 2 {
            let pair = [self.placed(poses, idx[0]), self.placed(poses, idx[1])];
            relation::measure(&term.params, &pair, &self.domain)?
        } else {
            let placed: Vec<Placed> = idx.iter().map(|&i| self.placed(poses, i)).collect();
            relation::measure(&term.params, &placed, &self.domain)?
        };
        Ok(relation::score(&term.params, &term.mode, m))
    }

    fn check_layout(&self, layout: &Layout) -> Result<()> {
        if layout.ids() != &*self.ids {
            let missing = self
                .ids
                .iter()
                .find(|id| layout.get(id).is_none())
                .cloned()
                .unwrap_or_else(|| "<order mismatch>".into());
            return Err(Error::UnknownObject(missing));
        }
        Ok(())
    }

    /// Full objective and constraint report for a layout.
    pub fn evaluate(&self, layout: &Layout) -> Result<Breakdown> {
        self.check_layout(layout)?;
        let poses = layout.poses();
        let mut soft_scores = Vec::new();
        let mut violations = Vec::new();
        for t in 0..self.terms.len() {
            match self.term_value(t, poses)? {
                TermValue::Soft(v) => soft_scores.push(v),
                TermValue::Hard(v) => violations.push(v),
            }
        }
        Ok(Breakdown {
            // fold from +0.0: an empty f64 sum is -0.0
            objective: soft_scores.iter().fold(0.0, |a, b| a + b),
            total_violation: violations.iter().fold(0.0, |a, b| a + b),
            soft_scores,
            violations,
        })
    }

    /// `(L, total_violation)` without building a [`Breakdown`]; sums in the
    /// same order as [`LayoutProblem::evaluate`] so results agree bit for bit.
    pub fn objective_and_violation(&self, poses: &[Pose]) -> Result<(f64, f64)> {
        let mut soft = 0.0;
        let mut hard = 0.0;
        for t in 0..self.terms.len() {
            match self.term_value(t, poses)? {
                TermValue::Soft(v) => soft += v,
                TermValue::Hard(v) => hard += v,
            }
        }
        Ok((soft, hard))
    }

    /// Object indices of term `t`'s participants.
    pub(crate) fn term_participants(&self, t: usize) -> &[usize] {
        &self.compiled[t].participants
    }

    /// Lookup view of a layout for [`relation::evaluate_term`].
    pub fn view<'a>(&'a self, layout: &'a Layout) -> ProblemView<'a> {
        ProblemView {
            problem: self,
            layout,
        }
    }

    /// Same problem with every soft weight multiplied by `s`.
    pub fn scaled_weights(&self, s: f64) -> LayoutProblem {
        let mut out = self.clone();
        for t in &mut out.terms {
            if let TermMode::Soft { weight } = &mut t.mode {
                *weight *= s;
            }
        }
        out
    }

    /// The problem reflected across `x = 0`: domain, object poses and
    /// plane-parameterized terms. A layout maps over with [`Pose::mirrored_x`].
    pub fn mirrored_x(&self) -> LayoutProblem {
        let mut out = self.clone();
        out.domain = self.domain.mirrored_x();
        for o in &mut out.objects {
            o.pose = o.pose.mirrored_x();
        }
        for t in &mut out.terms {
            t.params = t.params.mirrored_x();
        }
        out
    }

    /// Same problem without the soft term at `term_index`.
    pub fn without_term(&self, term_index: usize) -> LayoutProblem {
        let mut out = self.clone();
        out.terms.remove(term_index);
        out.compiled.remove(term_index);
        if term_index < out.user_terms {
            out.user_terms -= 1;
        }
        out
    }
}

pub struct ProblemView<'a> {
    problem: &'a LayoutProblem,
    layout: &'a Layout,
}

impl ObjectLookup for ProblemView<'_> {
    fn placed(&self, id: &str) -> Option<Placed<'_>> {
        let i = self.layout.index_of(id)?;
        let o = self.problem.objects.iter().find(|o| o.id == id)?;
        Some(Placed {
            pose: self.layout.pose(i),
            extent: &o.extent,
            category: &o.category,
        })
    }
}

/// Domain for the children of `node`: the room for the root, otherwise the
/// node's top-face rectangle in its own frame.
pub fn level_domain(node: &ObjectNode, room: &Domain, is_root: bool, clearance: f64) -> Result<Domain> {
    if is_root {
        return Ok(room.clone());
    }
    let (hx, hy) = (0.5 * node.extent.dx, 0.5 * node.extent.dy);
    Domain::with_floor(
        vec![
            Vec2::new(-hx, -hy),
            Vec2::new(hx, -hy),
            Vec2::new(hx, hy),
            Vec2::new(-hx, hy),
        ],
        clearance,
        0.5 * node.extent.dz,
    )
}

/// Subproblem over `node`'s children in `node`'s local frame.
pub fn assemble(
    node: &ObjectNode,
    room: &Domain,
    is_root: bool,
    user_terms: &[RelationTerm],
    config: &ProblemConfig,
) -> Result<LayoutProblem> {
    let domain = level_domain(node, room, is_root, config.child_clearance)?;
    let objects = node
        .children
        .iter()
        .map(|c| ProblemObject {
            id: c.id.clone(),
            category: c.category.clone(),
            extent: c.extent,
            movable: !c.fixed,
            pose: c.local_pose.with_z(domain.support_z(&c.extent)),
        })
        .collect();
    LayoutProblem::new(node.id.clone(), domain, objects, user_terms.to_vec(), config)
}
