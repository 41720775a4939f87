//! Spatial relation primitives.
//!
//! Each relation produces a raw non-negative measure. A [`RelationTerm`]
//! turns that measure into either a weighted soft score or a hard-constraint
//! violation. Distance, relative orientation, alignment, proximity, overlap
//! and symmetry are the user-facing relations; containment and collision are
//! plumbing injected by the problem assembler.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{self, Vec2, Vec3};
use crate::scene::{self, wrap_diff, Domain, Extent, Pose};

/// Default adjacency tolerance for proximity constraints, meters.
pub const DEFAULT_PROXIMITY_EPS: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    Distance,
    RelativeOrientation,
    Alignment,
    Proximity,
    Overlap,
    Symmetry,
    Containment,
    Collision,
}

impl RelationKind {
    pub fn name(self) -> &'static str {
        match self {
            RelationKind::Distance => "distance",
            RelationKind::RelativeOrientation => "relative_orientation",
            RelationKind::Alignment => "alignment",
            RelationKind::Proximity => "proximity",
            RelationKind::Overlap => "overlap",
            RelationKind::Symmetry => "symmetry",
            RelationKind::Containment => "containment",
            RelationKind::Collision => "collision",
        }
    }

    /// Containment and collision are injected by the assembler rather than
    /// written by users.
    pub fn is_plumbing(self) -> bool {
        matches!(self, RelationKind::Containment | RelationKind::Collision)
    }

    fn arity_ok(self, n: usize) -> (bool, &'static str) {
        match self {
            RelationKind::Distance
            | RelationKind::RelativeOrientation
            | RelationKind::Proximity
            | RelationKind::Overlap
            | RelationKind::Collision => (n == 2, "2"),
            RelationKind::Alignment | RelationKind::Symmetry => (n >= 2, ">= 2"),
            RelationKind::Containment => (n == 1, "1"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanarAxis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Symmetry {
    /// Mirror across the vertical plane through `point` with horizontal unit `normal`.
    Reflection { point: Vec2, normal: Vec2 },
    /// `order`-fold rotation about the vertical axis through `center`.
    Rotational { center: Vec2, order: u32 },
}

impl Symmetry {
    fn apply(&self, c: Vec3) -> Vec3 {
        match self {
            Symmetry::Reflection { point, normal } => {
                let d = (c.xy() - *point).dot(*normal);
                Vec3::new(c.x - 2.0 * d * normal.x, c.y - 2.0 * d * normal.y, c.z)
            }
            Symmetry::Rotational { center, order } => {
                let angle = std::f64::consts::TAU / f64::from(*order);
                let r = (c.xy() - *center).rotate(angle) + *center;
                Vec3::new(r.x, r.y, c.z)
            }
        }
    }
}

/// How symmetry participants are matched. Explicit pairs index into the
/// participant list; for rotations a pair `(i, j)` means `rotate(i)` should
/// land on `j`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    #[default]
    Auto,
    Explicit(Vec<(usize, usize)>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RelationParams {
    Distance {
        #[serde(default)]
        target: f64,
    },
    RelativeOrientation {
        #[serde(default)]
        target: f64,
    },
    Alignment {
        axis: PlanarAxis,
    },
    Proximity {
        #[serde(default = "default_eps")]
        epsilon: f64,
    },
    Overlap {
        axis: Axis,
        #[serde(default)]
        target: f64,
    },
    Symmetry {
        symmetry: Symmetry,
        #[serde(default)]
        pairs: Pairing,
    },
    Containment,
    Collision,
}

fn default_eps() -> f64 {
    DEFAULT_PROXIMITY_EPS
}

impl RelationParams {
    pub fn kind(&self) -> RelationKind {
        match self {
            RelationParams::Distance { .. } => RelationKind::Distance,
            RelationParams::RelativeOrientation { .. } => RelationKind::RelativeOrientation,
            RelationParams::Alignment { .. } => RelationKind::Alignment,
            RelationParams::Proximity { .. } => RelationKind::Proximity,
            RelationParams::Overlap { .. } => RelationKind::Overlap,
            RelationParams::Symmetry { .. } => RelationKind::Symmetry,
            RelationParams::Containment => RelationKind::Containment,
            RelationParams::Collision => RelationKind::Collision,
        }
    }

    /// Parameters describing the same relation after reflecting the scene
    /// across `x = 0`. Rotational symmetry keeps its sense of rotation, so it
    /// is mirror-exact only for order 2 or perfectly symmetric arrangements.
    pub fn mirrored_x(&self) -> RelationParams {
        let flip = |v: Vec2| Vec2::new(-v.x, v.y);
        match self {
            RelationParams::RelativeOrientation { target } => RelationParams::RelativeOrientation { target: -target },
            RelationParams::Symmetry { symmetry, pairs } => RelationParams::Symmetry {
                symmetry: match symmetry {
                    Symmetry::Reflection { point, normal } => Symmetry::Reflection {
                        point: flip(*point),
                        normal: flip(*normal),
                    },
                    Symmetry::Rotational { center, order } => Symmetry::Rotational {
                        center: flip(*center),
                        order: *order,
                    },
                },
                pairs: pairs.clone(),
            },
            other => other.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    LessEq,
    GreaterEq,
    WithinTol,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TermMode {
    Soft {
        weight: f64,
    },
    Hard {
        comparator: Comparator,
        threshold: f64,
        #[serde(default)]
        tolerance: f64,
    },
}

impl TermMode {
    pub fn is_soft(&self) -> bool {
        matches!(self, TermMode::Soft { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationTerm {
    pub participants: Vec<String>,
    pub params: RelationParams,
    pub mode: TermMode,
}

impl RelationTerm {
    pub fn soft(params: RelationParams, participants: &[&str], weight: f64) -> RelationTerm {
        RelationTerm {
            participants: participants.iter().map(|s| s.to_string()).collect(),
            params,
            mode: TermMode::Soft { weight },
        }
    }

    pub fn hard(
        params: RelationParams,
        participants: &[&str],
        comparator: Comparator,
        threshold: f64,
    ) -> RelationTerm {
        RelationTerm {
            participants: participants.iter().map(|s| s.to_string()).collect(),
            params,
            mode: TermMode::Hard {
                comparator,
                threshold,
                tolerance: 0.0,
            },
        }
    }

    /// Hard adjacency: gap ≤ `epsilon`.
    pub fn adjacent(a: &str, b: &str, epsilon: f64) -> RelationTerm {
        RelationTerm::hard(
            RelationParams::Proximity { epsilon },
            &[a, b],
            Comparator::LessEq,
            epsilon,
        )
    }

    pub fn kind(&self) -> RelationKind {
        self.params.kind()
    }

    /// Checks arity, weights and per-kind parameters. `index` only labels errors.
    pub fn validate(&self, index: usize) -> Result<()> {
        let kind = self.kind();
        let (ok, expected) = kind.arity_ok(self.participants.len());
        if !ok {
            return Err(Error::Arity {
                index,
                kind: kind.name(),
                expected,
                got: self.participants.len(),
            });
        }
        let bad = |msg: String| Err(Error::InvalidTerm(format!("term {index}: {msg}")));
        match self.mode {
            TermMode::Soft { weight } if !(weight.is_finite() && weight >= 0.0) => {
                return bad(format!("soft weight must be finite and >= 0, got {weight}"));
            }
            TermMode::Hard {
                threshold,
                tolerance,
                ..
            } if !(threshold.is_finite() && tolerance.is_finite() && tolerance >= 0.0) => {
                return bad(format!(
                    "hard threshold/tolerance invalid ({threshold}, {tolerance})"
                ));
            }
            _ => {}
        }
        match &self.params {
            RelationParams::Distance { target }
            | RelationParams::RelativeOrientation { target }
            | RelationParams::Overlap { target, .. }
                if !target.is_finite() =>
            {
                bad(format!("non-finite target {target}"))
            }
            RelationParams::Proximity { epsilon } if !(epsilon.is_finite() && *epsilon >= 0.0) => {
                bad(format!("proximity epsilon must be >= 0, got {epsilon}"))
            }
            RelationParams::Symmetry { symmetry, pairs } => {
                match symmetry {
                    Symmetry::Reflection { normal, .. } if (normal.norm() - 1.0).abs() > 1e-9 => {
                        return bad("reflection normal must be a unit vector".into());
                    }
                    Symmetry::Rotational { order, .. } if *order < 2 => {
                        return bad("rotational order must be >= 2".into());
                    }
                    _ => {}
                }
                if let Pairing::Explicit(list) = pairs {
                    check_explicit_pairs(symmetry, list, self.participants.len())
                        .map_err(|m| Error::InvalidTerm(format!("term {index}: {m}")))?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

fn check_explicit_pairs(
    symmetry: &Symmetry,
    pairs: &[(usize, usize)],
    n: usize,
) -> std::result::Result<(), String> {
    if pairs.iter().any(|&(i, j)| i >= n || j >= n) {
        return Err("pair index out of range".into());
    }
    match symmetry {
        Symmetry::Reflection { .. } => {
            let mut seen = vec![false; n];
            for &(i, j) in pairs {
                for k in if i == j { vec![i] } else { vec![i, j] } {
                    if std::mem::replace(&mut seen[k], true) {
                        return Err(format!("participant {k} paired twice"));
                    }
                }
            }
            if seen.iter().all(|s| *s) {
                Ok(())
            } else {
                Err("pairs must cover every participant".into())
            }
        }
        Symmetry::Rotational { .. } => {
            let mut src = vec![false; n];
            let mut dst = vec![false; n];
            for &(i, j) in pairs {
                if std::mem::replace(&mut src[i], true) || std::mem::replace(&mut dst[j], true) {
                    return Err("rotational pairing must be a permutation".into());
                }
            }
            if src.iter().all(|s| *s) {
                Ok(())
            } else {
                Err("pairs must cover every participant".into())
            }
        }
    }
}

/// An object placed in the subproblem frame.
#[derive(Debug, Clone, Copy)]
pub struct Placed<'a> {
    pub pose: &'a Pose,
    pub extent: &'a Extent,
    pub category: &'a str,
}

impl Placed<'_> {
    fn center(&self) -> Vec3 {
        self.pose.position()
    }

    fn footprint(&self) -> Result<[Vec2; 4]> {
        scene::world_footprint(self.pose, self.extent)
    }

    fn interval(&self) -> (f64, f64) {
        scene::vertical_interval(self.pose, self.extent)
    }
}

/// Gap between two upright boxes.
pub fn measure_distance(a: &Placed, b: &Placed) -> Result<f64> {
    let fa = a.footprint()?;
    let fb = b.footprint()?;
    let d_xy = geom::polygon_distance(&fa, &fb);
    let (alo, ahi) = a.interval();
    let (blo, bhi) = b.interval();
    let g_z = (blo - ahi).max(alo - bhi).max(0.0);
    Ok(if g_z == 0.0 { d_xy } else { d_xy.hypot(g_z) })
}

/// Yaw mismatch `|wrap(yaw_b - yaw_a - target)|` in `[0, π]`.
pub fn measure_rel_orientation(a: &Placed, b: &Placed, target: f64) -> f64 {
    wrap_diff(b.pose.yaw() - a.pose.yaw() - target).abs()
}

/// Spread of centers across the alignment line: for objects lined up along
/// x this is `Σ (y_i - ȳ)²`.
pub fn measure_alignment(objects: &[Placed], axis: PlanarAxis) -> f64 {
    let coord = |p: &Placed| match axis {
        PlanarAxis::X => p.pose.y(),
        PlanarAxis::Y => p.pose.x(),
    };
    let n = objects.len() as f64;
    let mean = objects.iter().map(coord).sum::<f64>() / n;
    objects.iter().map(|p| (coord(p) - mean).powi(2)).sum()
}

/// Same gap as [`measure_distance`]; proximity differs only in how it is scored.
pub fn measure_proximity(a: &Placed, b: &Placed) -> Result<f64> {
    measure_distance(a, b)
}

fn projection(p: &Placed, axis: Axis) -> (f64, f64) {
    if p.pose.is_upright() {
        if axis == Axis::Z {
            return p.interval();
        }
        let f = scene::footprint_unchecked(p.pose.x(), p.pose.y(), p.pose.yaw(), p.extent);
        let dir = if axis == Axis::X {
            Vec2::new(1.0, 0.0)
        } else {
            Vec2::new(0.0, 1.0)
        };
        return geom::project(&f, dir);
    }
    scene::box_corners(p.pose, p.extent)
        .iter()
        .map(|c| match axis {
            Axis::X => c.x,
            Axis::Y => c.y,
            Axis::Z => c.z,
        })
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}

/// Length of the overlap of the two boxes' projections on a world axis.
pub fn measure_overlap(a: &Placed, b: &Placed, axis: Axis) -> f64 {
    let (alo, ahi) = projection(a, axis);
    let (blo, bhi) = projection(b, axis);
    (ahi.min(bhi) - alo.max(blo)).max(0.0)
}

/// Resolves the symmetry pairing, greedily matching transformed centers to
/// the nearest unmatched participant of the same category.
pub fn symmetry_pairs(
    objects: &[Placed],
    symmetry: &Symmetry,
    pairing: &Pairing,
    max_match: f64,
) -> Result<Vec<(usize, usize)>> {
    if let Pairing::Explicit(list) = pairing {
        check_explicit_pairs(symmetry, list, objects.len()).map_err(Error::UnpairableSet)?;
        return Ok(list.clone());
    }
    let n = objects.len();
    let images: Vec<Vec3> = objects.iter().map(|o| symmetry.apply(o.center())).collect();
    let mut pairs = Vec::with_capacity(n);
    match symmetry {
        Symmetry::Reflection { .. } => {
            let mut used = vec![false; n];
            for i in 0..n {
                if used[i] {
                    continue;
                }
                let best = (0..n)
                    .filter(|&j| j != i && !used[j] && objects[j].category == objects[i].category)
                    .map(|j| (j, (images[i] - objects[j].center()).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1));
                match best {
                    Some((j, d)) if d <= max_match => {
                        used[i] = true;
                        used[j] = true;
                        pairs.push((i, j));
                    }
                    Some((j, d)) => {
                        return Err(Error::UnpairableSet(format!(
                            "match {i}->{j} at {d} exceeds {max_match}"
                        )))
                    }
                    None => {
                        return Err(Error::UnpairableSet(format!(
                            "no partner of category `{}` for participant {i}",
                            objects[i].category
                        )))
                    }
                }
            }
        }
        Symmetry::Rotational { .. } => {
            let mut taken = vec![false; n];
            for i in 0..n {
                let best = (0..n)
                    .filter(|&j| !taken[j] && objects[j].category == objects[i].category)
                    .map(|j| (j, (images[i] - objects[j].center()).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1));
                match best {
                    Some((j, d)) if d <= max_match => {
                        taken[j] = true;
                        pairs.push((i, j));
                    }
                    _ => {
                        return Err(Error::UnpairableSet(format!(
                            "no rotational image for participant {i}"
                        )))
                    }
                }
            }
        }
    }
    Ok(pairs)
}

/// Total mismatch between transformed centers and their partners; 0 is a
/// perfectly symmetric arrangement.
pub fn measure_symmetry(
    objects: &[Placed],
    symmetry: &Symmetry,
    pairing: &Pairing,
    max_match: f64,
) -> Result<f64> {
    let pairs = symmetry_pairs(objects, symmetry, pairing, max_match)?;
    Ok(pairs
        .iter()
        .map(|&(i, j)| (symmetry.apply(objects[i].center()) - objects[j].center()).norm())
        .sum())
}

/// Sum of footprint-corner distances outside the domain plus vertical excess
/// outside `[floor, floor + height]`.
pub fn measure_containment(a: &Placed, domain: &Domain) -> Result<f64> {
    let f = a.footprint()?;
    let outside: f64 = f
        .iter()
        .map(|c| geom::point_polygon_distance(domain.boundary(), *c))
        .sum();
    let (lo, hi) = a.interval();
    let floor = domain.floor_z();
    let vertical = (hi - (floor + domain.height())).max(0.0) + (floor - lo).max(0.0);
    Ok(outside + vertical)
}

/// Footprint intersection area when the vertical intervals overlap with
/// positive length, else 0.
pub fn measure_collision(a: &Placed, b: &Placed) -> Result<f64> {
    let fa = a.footprint()?;
    let fb = b.footprint()?;
    let (alo, ahi) = a.interval();
    let (blo, bhi) = b.interval();
    if ahi.min(bhi) - alo.max(blo) <= 0.0 {
        return Ok(0.0);
    }
    Ok(geom::intersection_area(&fa, &fb))
}

/// Raw measure of a relation over its resolved participants.
pub fn measure(params: &RelationParams, objects: &[Placed], domain: &Domain) -> Result<f64> {
    match params {
        RelationParams::Distance { .. } => measure_distance(&objects[0], &objects[1]),
        RelationParams::RelativeOrientation { target } => {
            Ok(measure_rel_orientation(&objects[0], &objects[1], *target))
        }
        RelationParams::Alignment { axis } => Ok(measure_alignment(objects, *axis)),
        RelationParams::Proximity { .. } => measure_proximity(&objects[0], &objects[1]),
        RelationParams::Overlap { axis, .. } => Ok(measure_overlap(&objects[0], &objects[1], *axis)),
        RelationParams::Symmetry { symmetry, pairs } => {
            measure_symmetry(objects, symmetry, pairs, domain.diagonal())
        }
        RelationParams::Containment => measure_containment(&objects[0], domain),
        RelationParams::Collision => measure_collision(&objects[0], &objects[1]),
    }
}

/// Soft-score shaping of a raw measure (before the weight).
pub fn soft_shape(params: &RelationParams, m: f64) -> f64 {
    match params {
        RelationParams::Distance { target } | RelationParams::Overlap { target, .. } => {
            (m - target).powi(2)
        }
        RelationParams::Proximity { .. } => m * m,
        _ => m,
    }
}

pub fn hard_violation(comparator: Comparator, threshold: f64, tolerance: f64, m: f64) -> f64 {
    match comparator {
        Comparator::LessEq => (m - threshold).max(0.0),
        Comparator::GreaterEq => (threshold - m).max(0.0),
        Comparator::WithinTol => ((m - threshold).abs() - tolerance).max(0.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TermValue {
    Soft(f64),
    Hard(f64),
}

impl TermValue {
    pub fn value(self) -> f64 {
        match self {
            TermValue::Soft(v) | TermValue::Hard(v) => v,
        }
    }
}

/// Scores one term from an already-computed raw measure.
pub fn score(params: &RelationParams, mode: &TermMode, m: f64) -> TermValue {
    match *mode {
        TermMode::Soft { weight } => TermValue::Soft(weight * soft_shape(params, m)),
        TermMode::Hard {
            comparator,
            threshold,
            tolerance,
        } => TermValue::Hard(hard_violation(comparator, threshold, tolerance, m)),
    }
}

/// Resolves object ids to placed boxes.
pub trait ObjectLookup {
    fn placed(&self, id: &str) -> Option<Placed<'_>>;
}

pub fn evaluate_term(
    term: &RelationTerm,
    objects: &impl ObjectLookup,
    domain: &Domain,
) -> Result<TermValue> {
    let placed = term
        .participants
        .iter()
        .map(|id| {
            objects
                .placed(id)
                .ok_or_else(|| Error::UnknownObject(id.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    let m = measure(&term.params, &placed, domain)?;
    Ok(score(&term.params, &term.mode, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;
    use std::f64::consts::{FRAC_PI_4, PI, TAU};

    fn unit() -> Extent {
        Extent::new(1.0, 1.0, 1.0).unwrap()
    }

    fn at(pose: &Pose, extent: &Extent) -> Placed<'static> {
        let pose: &'static Pose = Box::leak(Box::new(*pose));
        let extent: &'static Extent = Box::leak(Box::new(*extent));
        Placed {
            pose,
            extent,
            category: "thing",
        }
    }

    fn cube(x: f64, y: f64, yaw: f64) -> Placed<'static> {
        at(&Pose::upright(x, y, 0.5, yaw), &unit())
    }

    #[test]
    fn distance_examples() {
        assert!((measure_distance(&cube(0.0, 0.0, 0.0), &cube(3.0, 0.0, 0.0)).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(measure_distance(&cube(0.0, 0.0, 0.0), &cube(0.5, 0.0, 0.0)).unwrap(), 0.0);
        // stacked with a vertical gap
        let high = at(&Pose::upright(3.0, 0.0, 2.5, 0.0), &unit());
        let d = measure_distance(&cube(0.0, 0.0, 0.0), &high).unwrap();
        assert!((d - (4.0f64 + 1.0).sqrt()).abs() < 1e-12);
        let tilted = at(&Pose::new(0.0, 0.0, 0.5, 0.0, 0.2, 0.0), &unit());
        assert_eq!(measure_distance(&tilted, &cube(1.0, 1.0, 0.0)), Err(Error::TiltedFootprint));
    }

    #[test]
    fn rotated_distance_matches_closed_form() {
        // nearest feature: edge x + y = 4 - √2/2 of the rotated cube vs corner (0.5, 0.5)
        let d = measure_distance(&cube(0.0, 0.0, 0.0), &cube(2.0, 2.0, FRAC_PI_4)).unwrap();
        let expected = (4.0 - 0.5 * 2f64.sqrt() - 1.0) / 2f64.sqrt();
        assert!((d - expected).abs() < 1e-12, "{d} vs {expected}");
    }

    #[test]
    fn orientation_examples() {
        let a = cube(0.0, 0.0, 0.3);
        let b = cube(0.0, 0.0, 0.1);
        assert!((measure_rel_orientation(&a, &b, 0.0) - 0.2).abs() < 1e-12);
        let a = cube(0.0, 0.0, 0.1);
        let b = cube(0.0, 0.0, TAU - 0.1);
        assert!((measure_rel_orientation(&a, &b, 0.0) - 0.2).abs() < 1e-12);
        let a = cube(0.0, 0.0, 0.0);
        let b = cube(0.0, 0.0, PI);
        assert!(measure_rel_orientation(&a, &b, PI).abs() < 1e-12);
    }

    #[test]
    fn alignment_examples() {
        let row = |ys: [f64; 3]| ys.map(|y| cube(0.0, y, 0.0));
        assert_eq!(measure_alignment(&row([1.0, 1.0, 1.0]), PlanarAxis::X), 0.0);
        assert!((measure_alignment(&row([0.0, 1.0, 2.0]), PlanarAxis::X) - 2.0).abs() < 1e-12);
        assert!((measure_alignment(&row([0.0, 0.0, 3.0]), PlanarAxis::X) - 6.0).abs() < 1e-12);
        // along y looks at x spread
        assert_eq!(measure_alignment(&row([0.0, 1.0, 2.0]), PlanarAxis::Y), 0.0);
    }

    #[test]
    fn proximity_examples() {
        let touching = measure_proximity(&cube(0.0, 0.0, 0.0), &cube(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(touching, 0.0);
        let v = |gap: f64| hard_violation(Comparator::LessEq, 0.01, 0.0, gap);
        assert_eq!(v(0.005), 0.0);
        assert!((v(0.5) - 0.49).abs() < 1e-12);
        let close = measure_proximity(&cube(0.0, 0.0, 0.0), &cube(1.005, 0.0, 0.0)).unwrap();
        assert!((close - 0.005).abs() < 1e-12);
    }

    #[test]
    fn overlap_examples() {
        let bx = |x0: f64, x1: f64| {
            at(
                &Pose::upright(0.5 * (x0 + x1), 0.0, 0.5, 0.0),
                &Extent::new(x1 - x0, 1.0, 1.0).unwrap(),
            )
        };
        assert!((measure_overlap(&bx(0.0, 2.0), &bx(1.0, 3.0), Axis::X) - 1.0).abs() < 1e-12);
        assert_eq!(measure_overlap(&bx(0.0, 1.0), &bx(2.0, 3.0), Axis::X), 0.0);
        // corner-projection oracle: rotated half-width √2/2
        let m = measure_overlap(&cube(0.0, 0.0, FRAC_PI_4), &cube(1.0, 0.0, 0.0), Axis::X);
        let expected = 0.5 * 2f64.sqrt() + 0.5 - 1.0;
        assert!((m - expected).abs() < 1e-12);
        assert!((m - 0.2071).abs() < 1e-4);
        assert!((measure_overlap(&cube(0.0, 0.0, 0.0), &cube(5.0, 0.0, 0.0), Axis::Z) - 1.0).abs() < 1e-12);
    }

    fn chair(x: f64, y: f64) -> Placed<'static> {
        Placed {
            category: "chair",
            ..cube(x, y, 0.0)
        }
    }

    #[test]
    fn symmetry_examples() {
        let plane = Symmetry::Reflection {
            point: Vec2::new(0.0, 0.0),
            normal: Vec2::new(1.0, 0.0),
        };
        let s = measure_symmetry(&[chair(1.0, 0.0), chair(-1.0, 0.0)], &plane, &Pairing::Auto, 10.0);
        assert!(s.unwrap().abs() < 1e-12);
        let s = measure_symmetry(&[chair(1.0, 0.0), chair(-1.1, 0.0)], &plane, &Pairing::Auto, 10.0);
        assert!((s.unwrap() - 0.1).abs() < 1e-12);
        let explicit = Pairing::Explicit(vec![(0, 1)]);
        let s = measure_symmetry(&[chair(1.0, 0.0), chair(-1.1, 0.0)], &plane, &explicit, 10.0);
        assert!((s.unwrap() - 0.1).abs() < 1e-12);

        let stools: Vec<_> = [(2.0, 0.0), (0.0, 2.0), (-2.0, 0.0), (0.0, -2.0)]
            .iter()
            .map(|&(x, y)| chair(x, y))
            .collect();
        let rot = Symmetry::Rotational {
            center: Vec2::new(0.0, 0.0),
            order: 4,
        };
        assert!(measure_symmetry(&stools, &rot, &Pairing::Auto, 10.0).unwrap() < 1e-12);
    }

    #[test]
    fn symmetry_pairing_failures() {
        let plane = Symmetry::Reflection {
            point: Vec2::new(0.0, 0.0),
            normal: Vec2::new(1.0, 0.0),
        };
        let odd = [chair(1.0, 0.0), chair(-1.0, 0.0), chair(0.0, 3.0)];
        assert!(matches!(
            measure_symmetry(&odd, &plane, &Pairing::Auto, 10.0),
            Err(Error::UnpairableSet(_))
        ));
        let mixed = [chair(1.0, 0.0), cube(-1.0, 0.0, 0.0)];
        assert!(measure_symmetry(&mixed, &plane, &Pairing::Auto, 10.0).is_err());
        let far = [chair(1.0, 0.0), chair(30.0, 0.0)];
        assert!(measure_symmetry(&far, &plane, &Pairing::Auto, 10.0).is_err());
        // explicit self-pair for an object on the plane
        let pairs = Pairing::Explicit(vec![(0, 1), (2, 2)]);
        let on_plane = [chair(1.0, 0.0), chair(-1.0, 0.0), chair(0.0, 3.0)];
        assert!(measure_symmetry(&on_plane, &plane, &pairs, 10.0).unwrap() < 1e-12);
    }

    /// Point-in-polygon + point-segment distance, written independently.
    fn corner_outside_oracle(corners: &[(f64, f64)], room: (f64, f64, f64, f64)) -> f64 {
        let (x0, y0, x1, y1) = room;
        corners
            .iter()
            .map(|&(x, y)| {
                let dx = (x0 - x).max(0.0).max(x - x1);
                let dy = (y0 - y).max(0.0).max(y - y1);
                (dx * dx + dy * dy).sqrt()
            })
            .sum()
    }

    #[test]
    fn containment_examples() {
        let room = Domain::rect(0.0, 0.0, 10.0, 10.0, 3.0).unwrap();
        assert_eq!(measure_containment(&cube(5.0, 5.0, 0.0), &room).unwrap(), 0.0);
        // two corners 0.3 past the x = 10 wall
        let c = cube(9.8, 5.0, 0.0);
        let m = measure_containment(&c, &room).unwrap();
        let oracle = corner_outside_oracle(&[(9.3, 4.5), (10.3, 4.5), (10.3, 5.5), (9.3, 5.5)], (0.0, 0.0, 10.0, 10.0));
        assert!((m - 0.6).abs() < 1e-12 && (m - oracle).abs() < 1e-12);
        // one corner out: rotated so a single corner pokes 0.3 m through the wall
        let h = 0.5 * 2f64.sqrt();
        let c = cube(10.0 - h + 0.3, 5.0, FRAC_PI_4);
        let m = measure_containment(&c, &room).unwrap();
        assert!((m - 0.3).abs() < 1e-12, "{m}");
        let tall = at(&Pose::upright(5.0, 5.0, 1.6, 0.0), &Extent::new(1.0, 1.0, 3.2).unwrap());
        assert!(measure_containment(&tall, &room).unwrap() >= 0.2 - 1e-12);
    }

    #[test]
    fn collision_examples() {
        assert!((measure_collision(&cube(0.0, 0.0, 0.0), &cube(0.0, 0.0, 0.0)).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(measure_collision(&cube(0.0, 0.0, 0.0), &cube(3.0, 0.0, 0.0)).unwrap(), 0.0);
        assert!((measure_collision(&cube(0.0, 0.0, 0.0), &cube(0.5, 0.5, 0.0)).unwrap() - 0.25).abs() < 1e-12);
        // stacked boxes touching vertically do not collide
        let above = at(&Pose::upright(0.0, 0.0, 1.5, 0.0), &unit());
        assert_eq!(measure_collision(&cube(0.0, 0.0, 0.0), &above).unwrap(), 0.0);
    }

    struct Lookup(HashMap<String, (Pose, Extent, String)>);

    impl ObjectLookup for Lookup {
        fn placed(&self, id: &str) -> Option<Placed<'_>> {
            self.0.get(id).map(|(p, e, c)| Placed {
                pose: p,
                extent: e,
                category: c,
            })
        }
    }

    #[test]
    fn evaluate_term_examples() {
        let room = Domain::rect(-10.0, -10.0, 10.0, 10.0, 3.0).unwrap();
        let mut map = HashMap::new();
        map.insert("a".to_string(), (Pose::upright(0.0, 0.0, 0.5, 0.0), unit(), "c".to_string()));
        map.insert("b".to_string(), (Pose::upright(4.0, 0.0, 0.5, 0.0), unit(), "c".to_string()));
        map.insert("c".to_string(), (Pose::upright(0.5, 0.5, 0.5, 0.0), unit(), "c".to_string()));
        let objs = Lookup(map);

        let t = RelationTerm::soft(RelationParams::Distance { target: 1.0 }, &["a", "b"], 2.0);
        assert_eq!(evaluate_term(&t, &objs, &room).unwrap(), TermValue::Soft(8.0));

        let t = RelationTerm::hard(
            RelationParams::Overlap { axis: Axis::X, target: 0.0 },
            &["a", "c"],
            Comparator::GreaterEq,
            0.5,
        );
        // overlap on x is 0.5 here; a measure of 0.7 is checked through hard_violation
        assert_eq!(evaluate_term(&t, &objs, &room).unwrap(), TermValue::Hard(0.0));
        assert_eq!(hard_violation(Comparator::GreaterEq, 0.5, 0.0, 0.7), 0.0);

        let t = RelationTerm::hard(RelationParams::Collision, &["a", "c"], Comparator::LessEq, 0.0);
        assert_eq!(evaluate_term(&t, &objs, &room).unwrap(), TermValue::Hard(0.25));

        let t = RelationTerm::soft(RelationParams::Distance { target: 0.0 }, &["a", "ghost"], 1.0);
        assert_eq!(
            evaluate_term(&t, &objs, &room),
            Err(Error::UnknownObject("ghost".into()))
        );
    }

    #[test]
    fn within_tol_and_shapes() {
        assert_eq!(hard_violation(Comparator::WithinTol, 2.0, 0.1, 2.05), 0.0);
        assert!((hard_violation(Comparator::WithinTol, 2.0, 0.1, 2.5) - 0.4).abs() < 1e-12);
        assert_eq!(soft_shape(&RelationParams::Proximity { epsilon: 0.01 }, 0.5), 0.25);
        assert_eq!(soft_shape(&RelationParams::Collision, 0.5), 0.5);
        assert_eq!(
            soft_shape(&RelationParams::Alignment { axis: PlanarAxis::X }, 0.5),
            0.5
        );
    }

    #[test]
    fn term_validation() {
        let t = RelationTerm::soft(RelationParams::Distance { target: 0.0 }, &["a"], 1.0);
        assert!(matches!(t.validate(3), Err(Error::Arity { index: 3, .. })));
        let t = RelationTerm::soft(RelationParams::Distance { target: 0.0 }, &["a", "b"], -1.0);
        assert!(t.validate(0).is_err());
        let t = RelationTerm::soft(
            RelationParams::Symmetry {
                symmetry: Symmetry::Rotational { center: Vec2::new(0.0, 0.0), order: 3 },
                pairs: Pairing::Explicit(vec![(0, 1), (1, 1)]),
            },
            &["a", "b"],
            1.0,
        );
        assert!(t.validate(0).is_err());
        let t = RelationTerm::adjacent("a", "b", 0.01);
        assert!(t.validate(0).is_ok());
    }
}
