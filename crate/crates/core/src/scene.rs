//! Geometric data model: poses, boxes, object trees and frame composition.
//!
//! Euler convention throughout the crate is intrinsic yaw (about z), then
//! pitch (about y), then roll (about x), i.e. `R = Rz(yaw) * Ry(pitch) * Rx(roll)`.
//! Stored angles live in `[0, 2π)`; angle differences are wrapped to `(-π, π]`.

use std::collections::{BTreeMap, HashSet};
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{self, Vec2, Vec3};

/// Tilt below this is treated as upright.
pub const UPRIGHT_EPS: f64 = 1e-12;

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Wraps an angle difference into `(-π, π]`.
pub fn wrap_diff(d: f64) -> f64 {
    let r = d.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PoseRepr", into = "PoseRepr")]
pub struct Pose {
    x: f64,
    y: f64,
    z: f64,
    yaw: f64,
    pitch: f64,
    roll: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoseRepr {
    x: f64,
    y: f64,
    z: f64,
    #[serde(default)]
    yaw: f64,
    #[serde(default)]
    pitch: f64,
    #[serde(default)]
    roll: f64,
}

impl TryFrom<PoseRepr> for Pose {
    type Error = Error;
    fn try_from(r: PoseRepr) -> Result<Pose> {
        Pose::try_new(r.x, r.y, r.z, r.yaw, r.pitch, r.roll)
    }
}

impl From<Pose> for PoseRepr {
    fn from(p: Pose) -> PoseRepr {
        PoseRepr {
            x: p.x,
            y: p.y,
            z: p.z,
            yaw: p.yaw,
            pitch: p.pitch,
            roll: p.roll,
        }
    }
}

impl Default for Pose {
    fn default() -> Self {
        Pose::IDENTITY
    }
}

impl Pose {
    pub const IDENTITY: Pose = Pose {
        x: 0.0,
        y: 0.0,
        z: 0.0,
        yaw: 0.0,
        pitch: 0.0,
        roll: 0.0,
    };

    /// Builds a pose, wrapping the angles into `[0, 2π)`.
    ///
    /// Panics on non-finite input; use [`Pose::try_new`] at trust boundaries.
    pub fn new(x: f64, y: f64, z: f64, yaw: f64, pitch: f64, roll: f64) -> Pose {
        Pose::try_new(x, y, z, yaw, pitch, roll).expect("pose fields must be finite")
    }

    pub fn try_new(x: f64, y: f64, z: f64, yaw: f64, pitch: f64, roll: f64) -> Result<Pose> {
        if ![x, y, z, yaw, pitch, roll].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidPose(format!(
                "non-finite field in ({x}, {y}, {z}, {yaw}, {pitch}, {roll})"
            )));
        }
        Ok(Pose {
            x,
            y,
            z,
            yaw: wrap_angle(yaw),
            pitch: wrap_angle(pitch),
            roll: wrap_angle(roll),
        })
    }

    /// Upright pose (pitch = roll = 0).
    pub fn upright(x: f64, y: f64, z: f64, yaw: f64) -> Pose {
        Pose::new(x, y, z, yaw, 0.0, 0.0)
    }

    pub fn x(&self) -> f64 {
        self.x
    }
    pub fn y(&self) -> f64 {
        self.y
    }
    pub fn z(&self) -> f64 {
        self.z
    }
    pub fn yaw(&self) -> f64 {
        self.yaw
    }
    pub fn pitch(&self) -> f64 {
        self.pitch
    }
    pub fn roll(&self) -> f64 {
        self.roll
    }

    pub fn position(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn with_position(self, x: f64, y: f64, z: f64) -> Pose {
        Pose::new(x, y, z, self.yaw, self.pitch, self.roll)
    }

    pub fn with_xy(self, x: f64, y: f64) -> Pose {
        Pose::new(x, y, self.z, self.yaw, self.pitch, self.roll)
    }

    pub fn with_z(self, z: f64) -> Pose {
        Pose::new(self.x, self.y, z, self.yaw, self.pitch, self.roll)
    }

    pub fn with_yaw(self, yaw: f64) -> Pose {
        Pose::new(self.x, self.y, self.z, yaw, self.pitch, self.roll)
    }

    pub fn with_angles(self, yaw: f64, pitch: f64, roll: f64) -> Pose {
        Pose::new(self.x, self.y, self.z, yaw, pitch, roll)
    }

    /// Reflection across the plane `x = 0`. The mirrored box coincides with
    /// the reflected box because boxes are symmetric about their own axes.
    pub fn mirrored_x(&self) -> Pose {
        Pose::new(-self.x, self.y, self.z, -self.yaw, -self.pitch, self.roll)
    }

    pub fn is_upright(&self) -> bool {
        wrap_diff(self.pitch).abs() <= UPRIGHT_EPS && wrap_diff(self.roll).abs() <= UPRIGHT_EPS
    }

    /// Row-major rotation matrix `Rz(yaw) Ry(pitch) Rx(roll)`.
    pub fn rotation(&self) -> [[f64; 3]; 3] {
        rotation_matrix(self.yaw, self.pitch, self.roll)
    }

    /// Maps a point from this pose's local frame into the parent frame.
    pub fn transform_point(&self, p: Vec3) -> Vec3 {
        let r = self.rotation();
        Vec3::new(
            self.x + r[0][0] * p.x + r[0][1] * p.y + r[0][2] * p.z,
            self.y + r[1][0] * p.x + r[1][1] * p.y + r[1][2] * p.z,
            self.z + r[2][0] * p.x + r[2][1] * p.y + r[2][2] * p.z,
        )
    }
}

pub fn rotation_matrix(yaw: f64, pitch: f64, roll: f64) -> [[f64; 3]; 3] {
    let (sy, cy) = yaw.sin_cos();
    let (sp, cp) = pitch.sin_cos();
    let (sr, cr) = roll.sin_cos();
    [
        [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
        [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
        [-sp, cp * sr, cp * cr],
    ]
}

fn matmul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Recovers (yaw, pitch, roll) from a rotation matrix.
pub fn euler_from_matrix(r: &[[f64; 3]; 3]) -> (f64, f64, f64) {
    let cp = r[0][0].hypot(r[1][0]);
    let pitch = (-r[2][0]).atan2(cp);
    if cp > 1e-12 {
        (r[1][0].atan2(r[0][0]), pitch, r[2][1].atan2(r[2][2]))
    } else {
        // gimbal lock: fold roll into yaw
        ((-r[0][1]).atan2(r[1][1]), pitch, 0.0)
    }
}

/// World pose of `child_local` expressed in the frame described by `parent`.
pub fn compose_pose(parent: &Pose, child_local: &Pose) -> Pose {
    if parent.is_upright() && child_local.is_upright() {
        let offset = Vec2::new(child_local.x, child_local.y).rotate(parent.yaw);
        return Pose::new(
            parent.x + offset.x,
            parent.y + offset.y,
            parent.z + child_local.z,
            parent.yaw + child_local.yaw,
            0.0,
            0.0,
        );
    }
    let p = parent.transform_point(child_local.position());
    let r = matmul(&parent.rotation(), &child_local.rotation());
    let (yaw, pitch, roll) = euler_from_matrix(&r);
    Pose::new(p.x, p.y, p.z, yaw, pitch, roll)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extent {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

impl Extent {
    pub fn new(dx: f64, dy: f64, dz: f64) -> Result<Extent> {
        let e = Extent { dx, dy, dz };
        if e.is_valid() {
            Ok(e)
        } else {
            Err(Error::InvalidExtent(format!("({dx}, {dy}, {dz})")))
        }
    }

    pub fn is_valid(&self) -> bool {
        [self.dx, self.dy, self.dz]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0)
    }

    pub fn footprint_area(&self) -> f64 {
        self.dx * self.dy
    }
}

/// Footprint corners (counterclockwise) of an upright box.
pub fn world_footprint(pose: &Pose, extent: &Extent) -> Result<[Vec2; 4]> {
    if !pose.is_upright() {
        return Err(Error::TiltedFootprint);
    }
    Ok(footprint_unchecked(pose.x, pose.y, pose.yaw, extent))
}

pub(crate) fn footprint_unchecked(x: f64, y: f64, yaw: f64, extent: &Extent) -> [Vec2; 4] {
    let (s, c) = yaw.sin_cos();
    let (hx, hy) = (0.5 * extent.dx, 0.5 * extent.dy);
    [(-hx, -hy), (hx, -hy), (hx, hy), (-hx, hy)]
        .map(|(lx, ly)| Vec2::new(x + c * lx - s * ly, y + s * lx + c * ly))
}

pub fn vertical_interval(pose: &Pose, extent: &Extent) -> (f64, f64) {
    (pose.z - 0.5 * extent.dz, pose.z + 0.5 * extent.dz)
}

/// The eight corners of a (possibly tilted) box.
pub fn box_corners(pose: &Pose, extent: &Extent) -> [Vec3; 8] {
    let (hx, hy, hz) = (0.5 * extent.dx, 0.5 * extent.dy, 0.5 * extent.dz);
    let mut out = [Vec3::default(); 8];
    for (i, c) in out.iter_mut().enumerate() {
        let sx = if i & 1 == 0 { -hx } else { hx };
        let sy = if i & 2 == 0 { -hy } else { hy };
        let sz = if i & 4 == 0 { -hz } else { hz };
        *c = pose.transform_point(Vec3::new(sx, sy, sz));
    }
    out
}

/// Convex ground-plane region objects must stay inside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    boundary: Vec<Vec2>,
    height: f64,
    /// z of the support surface in the domain's frame (0 for a room floor).
    #[serde(default)]
    floor_z: f64,
}

impl Domain {
    pub fn new(boundary: Vec<Vec2>, height: f64) -> Result<Domain> {
        Domain::with_floor(boundary, height, 0.0)
    }

    pub fn with_floor(boundary: Vec<Vec2>, height: f64, floor_z: f64) -> Result<Domain> {
        if boundary.len() < 3 {
            return Err(Error::InvalidDomain(format!(
                "boundary needs at least 3 vertices, got {}",
                boundary.len()
            )));
        }
        if boundary.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::InvalidDomain("non-finite vertex".into()));
        }
        if !geom::is_convex_ccw(&boundary) {
            return Err(Error::InvalidDomain(
                "boundary must be convex and counterclockwise".into(),
            ));
        }
        if !(height.is_finite() && height > 0.0) || !floor_z.is_finite() {
            return Err(Error::InvalidDomain(format!("bad height {height}")));
        }
        Ok(Domain {
            boundary,
            height,
            floor_z,
        })
    }

    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
    pub fn rect(x0: f64, y0: f64, x1: f64, y1: f64, height: f64) -> Result<Domain> {
        Domain::new(
            vec![
                Vec2::new(x0, y0),
                Vec2::new(x1, y0),
                Vec2::new(x1, y1),
                Vec2::new(x0, y1),
            ],
            height,
        )
    }

    pub fn boundary(&self) -> &[Vec2] {
        &self.boundary
    }
    pub fn height(&self) -> f64 {
        self.height
    }
    pub fn floor_z(&self) -> f64 {
        self.floor_z
    }

    pub fn area(&self) -> f64 {
        geom::signed_area(&self.boundary)
    }

    pub fn centroid(&self) -> Vec2 {
        let n = self.boundary.len();
        let a = self.area();
        let (mut cx, mut cy) = (0.0, 0.0);
        for i in 0..n {
            let p = self.boundary[i];
            let q = self.boundary[(i + 1) % n];
            let w = p.cross(q);
            cx += (p.x + q.x) * w;
            cy += (p.y + q.y) * w;
        }
        Vec2::new(cx / (6.0 * a), cy / (6.0 * a))
    }

    /// (min, max) corners of the bounding box.
    pub fn bounds(&self) -> (Vec2, Vec2) {
        self.boundary.iter().fold(
            (
                Vec2::new(f64::INFINITY, f64::INFINITY),
                Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
            ),
            |(lo, hi), p| {
                (
                    Vec2::new(lo.x.min(p.x), lo.y.min(p.y)),
                    Vec2::new(hi.x.max(p.x), hi.y.max(p.y)),
                )
            },
        )
    }

    /// Largest vertex-to-vertex distance.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.boundary {
            for b in &self.boundary {
                d = d.max((*a - *b).norm());
            }
        }
        d
    }

    /// Bounding-box diagonal.
    pub fn diagonal(&self) -> f64 {
        let (lo, hi) = self.bounds();
        (hi - lo).norm()
    }

    /// Reflection across `x = 0`, vertex order reversed to stay counterclockwise.
    pub fn mirrored_x(&self) -> Domain {
        let boundary = self.boundary.iter().rev().map(|p| Vec2::new(-p.x, p.y)).collect();
        Domain::with_floor(boundary, self.height, self.floor_z).expect("reflection keeps a valid domain")
    }

    pub fn contains(&self, p: Vec2) -> bool {
        geom::point_in_convex(&self.boundary, p)
    }

    /// Support height of an object's center resting on the domain floor.
    pub fn support_z(&self, extent: &Extent) -> f64 {
        self.floor_z + 0.5 * extent.dz
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectNode {
    pub id: String,
    pub category: String,
    pub extent: Extent,
    pub local_pose: Pose,
    pub fixed: bool,
    pub children: Vec<ObjectNode>,
}

pub const ROOM_ID: &str = "room";

impl ObjectNode {
    pub fn new(id: impl Into<String>, category: impl Into<String>, extent: Extent) -> ObjectNode {
        ObjectNode {
            id: id.into(),
            category: category.into(),
            extent,
            local_pose: Pose::IDENTITY,
            fixed: false,
            children: Vec::new(),
        }
    }

    /// Root node standing for the room itself; its frame is the world frame.
    pub fn room(domain: &Domain) -> ObjectNode {
        let (lo, hi) = domain.bounds();
        ObjectNode {
            id: ROOM_ID.to_string(),
            category: ROOM_ID.to_string(),
            extent: Extent {
                dx: hi.x - lo.x,
                dy: hi.y - lo.y,
                dz: domain.height(),
            },
            local_pose: Pose::IDENTITY,
            fixed: true,
            children: Vec::new(),
        }
    }

    pub fn with_child(mut self, child: ObjectNode) -> ObjectNode {
        self.children.push(child);
        self
    }

    pub fn fixed_at(mut self, pose: Pose) -> ObjectNode {
        self.local_pose = pose;
        self.fixed = true;
        self
    }

    pub fn find(&self, id: &str) -> Option<&ObjectNode> {
        if self.id == id {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.find(id))
    }

    pub fn find_mut(&mut self, id: &str) -> Option<&mut ObjectNode> {
        if self.id == id {
            return Some(self);
        }
        self.children.iter_mut().find_map(|c| c.find_mut(id))
    }

    /// Depth-first pre-order visit with each node's parent id.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a ObjectNode, Option<&'a str>)) {
        fn go<'a>(
            n: &'a ObjectNode,
            parent: Option<&'a str>,
            f: &mut impl FnMut(&'a ObjectNode, Option<&'a str>),
        ) {
            f(n, parent);
            for c in &n.children {
                go(c, Some(&n.id), f);
            }
        }
        go(self, None, f)
    }

    /// World pose of every node, composing local poses from the root down.
    pub fn world_poses(&self) -> BTreeMap<String, Pose> {
        fn go(n: &ObjectNode, parent: &Pose, out: &mut BTreeMap<String, Pose>) {
            let world = compose_pose(parent, &n.local_pose);
            out.insert(n.id.clone(), world);
            for c in &n.children {
                go(c, &world, out);
            }
        }
        let mut out = BTreeMap::new();
        go(self, &Pose::IDENTITY, &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DiagnosticKind {
    DuplicateId,
    NonPositiveExtent(Extent),
    /// Child footprint area exceeds the parent's top surface.
    ChildLargerThanParent { child_area: f64, parent_area: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub node_id: String,
    pub kind: DiagnosticKind,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

/// A tree with support heights assigned, plus anything found wrong with it.
#[derive(Debug, Clone)]
pub struct ValidatedTree {
    pub tree: ObjectNode,
    pub report: ValidationReport,
}

/// Checks a tree rooted at the room node and places every child's bottom face
/// on its parent's top face (room children rest on the floor at z = 0).
pub fn validate_tree(root: &ObjectNode, domain: &Domain) -> ValidatedTree {
    let mut report = ValidationReport::default();
    let mut seen = HashSet::new();
    root.walk(&mut |n, _| {
        if !seen.insert(n.id.clone()) {
            report.diagnostics.push(Diagnostic {
                node_id: n.id.clone(),
                kind: DiagnosticKind::DuplicateId,
            });
        }
        if !n.extent.is_valid() {
            report.diagnostics.push(Diagnostic {
                node_id: n.id.clone(),
                kind: DiagnosticKind::NonPositiveExtent(n.extent),
            });
        }
    });

    fn place(n: &mut ObjectNode, report: &mut ValidationReport) {
        let top_z = 0.5 * n.extent.dz;
        let area = n.extent.footprint_area();
        for c in &mut n.children {
            let child_area = c.extent.footprint_area();
            if child_area > area {
                report.diagnostics.push(Diagnostic {
                    node_id: c.id.clone(),
                    kind: DiagnosticKind::ChildLargerThanParent {
                        child_area,
                        parent_area: area,
                    },
                });
            }
            c.local_pose = c.local_pose.with_z(top_z + 0.5 * c.extent.dz);
            place(c, report);
        }
    }

    let mut tree = root.clone();
    let room_area = domain.area();
    for c in &mut tree.children {
        let child_area = c.extent.footprint_area();
        if child_area > room_area {
            report.diagnostics.push(Diagnostic {
                node_id: c.id.clone(),
                kind: DiagnosticKind::ChildLargerThanParent {
                    child_area,
                    parent_area: room_area,
                },
            });
        }
        c.local_pose = c.local_pose.with_z(domain.support_z(&c.extent));
        place(c, &mut report);
    }
    ValidatedTree { tree, report }
}

/// Pose assignment for the objects of one subproblem, in a fixed id order.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    ids: Arc<[String]>,
    poses: Vec<Pose>,
}

impl Layout {
    pub fn new(ids: Arc<[String]>, poses: Vec<Pose>) -> Layout {
        assert_eq!(ids.len(), poses.len(), "one pose per id");
        Layout { ids, poses }
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn poses(&self) -> &[Pose] {
        &self.poses
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|i| i == id)
    }

    pub fn get(&self, id: &str) -> Option<&Pose> {
        self.index_of(id).map(|i| &self.poses[i])
    }

    pub fn pose(&self, index: usize) -> &Pose {
        &self.poses[index]
    }

    pub fn set(&mut self, index: usize, pose: Pose) {
        self.poses[index] = pose;
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Pose)> {
        self.ids.iter().map(String::as_str).zip(self.poses.iter())
    }

    pub fn to_map(&self) -> BTreeMap<String, Pose> {
        self.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }
}
