//! Camera and object trajectories from structured commands.
//!
//! A template (pan, orbit, ...) is placed through an anchor frame derived
//! from one object's bounding box. Object front is local `+y`; with up `+z`,
//! `right = cross(facing, up)`.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::anneal::Setting;
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::scene::{wrap_angle, Extent, Pose};

const UP: Vec3 = Vec3::new(0.0, 0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorRelation {
    InFrontOf,
    Behind,
    LeftOf,
    RightOf,
    Above,
    CenteredOn,
    Around,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Anchor {
    pub object: String,
    pub relation: AnchorRelation,
    #[serde(default = "auto")]
    pub distance: Setting,
}

fn auto() -> Setting {
    Setting::AUTO
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Template {
    Pan {
        span: f64,
    },
    Orbit {
        /// Defaults to the anchor distance.
        #[serde(default)]
        radius: Option<f64>,
        arc: f64,
    },
    Dolly {
        travel: f64,
    },
    Crane {
        rise: f64,
    },
    Static,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Subject {
    Camera,
    Object { id: String },
}

impl Subject {
    pub fn label(&self) -> &str {
        match self {
            Subject::Camera => "camera",
            Subject::Object { id } => id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryCommand {
    pub template: Template,
    pub frames: usize,
    pub anchor: Anchor,
    pub subject: Subject,
    /// Object subjects keep their original yaw instead of facing the motion.
    #[serde(default)]
    pub yaw_hold: bool,
}

impl TrajectoryCommand {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidCommand(m));
        let min_frames = if matches!(self.template, Template::Static) { 1 } else { 2 };
        if self.frames < min_frames {
            return bad(format!("frames must be >= {min_frames}"));
        }
        let positive = |v: f64| v > 0.0 && v.is_finite();
        let ok = match &self.template {
            Template::Pan { span } => positive(*span),
            Template::Orbit { radius, arc } => positive(*arc) && radius.is_none_or(positive),
            Template::Dolly { travel } => positive(*travel),
            Template::Crane { rise } => positive(*rise),
            Template::Static => true,
        };
        if !ok {
            return bad("template parameters must be positive".into());
        }
        if self.anchor.relation == AnchorRelation::Around && !matches!(self.template, Template::Orbit { .. }) {
            return bad("anchor relation `around` requires the orbit template".into());
        }
        if let Setting::Fixed(d) = self.anchor.distance {
            if !(d >= 0.0 && d.is_finite()) {
                return bad("anchor distance must be >= 0".into());
            }
        }
        Ok(())
    }
}

/// Point and facing direction placed relative to an anchor object.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnchorFrame {
    pub origin: Vec3,
    /// Unit vector.
    pub facing: Vec3,
    /// Anchor object center.
    pub center: Vec3,
    /// Anchor object front (unit, horizontal).
    pub front: Vec3,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aim {
    LookAt(Vec3),
    Yaw(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Keyframe {
    pub t: f64,
    pub position: Vec3,
    pub aim: Aim,
}

/// World-frame front of an upright pose: local `+y` rotated by yaw.
pub fn front_of(yaw: f64) -> Vec3 {
    Vec3::new(-yaw.sin(), yaw.cos(), 0.0)
}

fn unit(v: Vec3) -> Vec3 {
    v * (1.0 / v.norm())
}

pub fn auto_distance(extent: &Extent) -> f64 {
    1.5 * extent.dx.max(extent.dy)
}

pub fn anchor_frame(pose: &Pose, extent: &Extent, relation: AnchorRelation, distance: Setting) -> Result<AnchorFrame> {
    if !pose.is_upright() {
        return Err(Error::TiltedFootprint);
    }
    let d = match distance {
        Setting::Fixed(d) => d,
        Setting::Auto(_) => auto_distance(extent),
    };
    let center = pose.position();
    let front = front_of(pose.yaw());
    let right = front.cross(UP);
    let (origin, facing) = match relation {
        AnchorRelation::InFrontOf => (center + front * d, -front),
        AnchorRelation::Behind => (center - front * d, front),
        AnchorRelation::LeftOf => (center - right * d, right),
        AnchorRelation::RightOf => (center + right * d, -right),
        AnchorRelation::Above => (center + UP * d, -UP),
        AnchorRelation::CenteredOn | AnchorRelation::Around => (center, front),
    };
    Ok(AnchorFrame {
        origin,
        facing,
        center,
        front,
        distance: d,
    })
}

/// Normalized times `k / (n - 1)`; a single frame sits at `t = 0`.
fn times(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 })
}

pub fn build_trajectory(command: &TrajectoryCommand, frame: &AnchorFrame) -> Result<Vec<Keyframe>> {
    command.validate()?;
    let n = command.frames;
    let target = if frame.origin == frame.center {
        frame.origin + frame.facing
    } else {
        frame.center
    };
    let aim = Aim::LookAt(target);
    let keyframe = |t: f64, position: Vec3| Keyframe {
        t,
        position,
        aim,
    };
    let frames = match &command.template {
        Template::Pan { span } => {
            let mut right = frame.facing.cross(UP);
            if right.norm() < 1e-12 {
                // facing straight down: pan along the object's own right
                right = frame.front.cross(UP);
            }
            let right = unit(right);
            times(n)
                .map(|t| keyframe(t, frame.origin + right * (span * (t - 0.5))))
                .collect()
        }
        Template::Orbit { radius, arc } => {
            let r = radius.unwrap_or(frame.distance);
            let offset = Vec3::new(frame.origin.x - frame.center.x, frame.origin.y - frame.center.y, 0.0);
            let start = if offset.norm() > 1e-12 { unit(offset) } else { frame.front };
            let start_angle = start.y.atan2(start.x);
            let steps = if *arc >= TAU - 1e-12 { n } else { n - 1 };
            times(n)
                .enumerate()
                .map(|(k, t)| {
                    let a = start_angle + arc * k as f64 / steps as f64;
                    let p = Vec3::new(frame.center.x + r * a.cos(), frame.center.y + r * a.sin(), frame.origin.z);
                    Keyframe {
                        t,
                        position: p,
                        aim: Aim::LookAt(frame.center),
                    }
                })
                .collect()
        }
        Template::Dolly { travel } => times(n)
            .map(|t| keyframe(t, frame.origin - frame.facing * (travel * (1.0 - t))))
            .collect(),
        Template::Crane { rise } => times(n).map(|t| keyframe(t, frame.origin + UP * (rise * t))).collect(),
        Template::Static => times(n).map(|t| keyframe(t, frame.origin)).collect(),
    };
    Ok(frames)
}

/// Heading yaw that turns local `+y` onto the horizontal velocity `(vx, vy)`.
pub fn heading_yaw(vx: f64, vy: f64) -> f64 {
    wrap_angle(vy.atan2(vx) - FRAC_PI_2)
}

/// Object track following the keyframe positions. Yaw faces the forward
/// difference to the next keyframe; the last frame and stationary steps hold
/// the previous heading. `yaw_hold`, or fewer than two keyframes, keeps
/// `original_yaw` throughout.
pub fn apply_to_object(keyframes: &[Keyframe], original_yaw: f64, yaw_hold: bool) -> Vec<Keyframe> {
    let hold = yaw_hold || keyframes.len() < 2;
    let mut yaw = wrap_angle(original_yaw);
    keyframes
        .iter()
        .enumerate()
        .map(|(k, kf)| {
            if !hold {
                if let Some(next) = keyframes.get(k + 1) {
                    let (vx, vy) = (next.position.x - kf.position.x, next.position.y - kf.position.y);
                    if vx != 0.0 || vy != 0.0 {
                        yaw = heading_yaw(vx, vy);
                    }
                }
            }
            Keyframe {
                t: kf.t,
                position: kf.position,
                aim: Aim::Yaw(yaw),
            }
        })
        .collect()
}

/// A track resolved against the scene.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub subject: Subject,
    pub keyframes: Vec<Keyframe>,
}

/// Resolves the anchor and subject through `lookup` (world pose and extent
/// by id) and builds the track.
pub fn plan(command: &TrajectoryCommand, lookup: impl Fn(&str) -> Option<(Pose, Extent)>) -> Result<Track> {
    command.validate()?;
    let (pose, extent) = lookup(&command.anchor.object)
        .ok_or_else(|| Error::UnknownObject(command.anchor.object.clone()))?;
    let frame = anchor_frame(&pose, &extent, command.anchor.relation, command.anchor.distance)?;
    let keyframes = build_trajectory(command, &frame)?;
    let keyframes = match &command.subject {
        Subject::Camera => keyframes,
        Subject::Object { id } => {
            let (own, _) = lookup(id).ok_or_else(|| Error::UnknownObject(id.clone()))?;
            apply_to_object(&keyframes, own.yaw(), command.yaw_hold)
        }
    };
    Ok(Track {
        subject: command.subject.clone(),
        keyframes,
    })
}

fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Keyframe file text. Header `# subject=<label> fps=<fps> frames=<n>`, then
/// one line per keyframe: `frame x y z lx ly lz` for look-at aims or
/// `frame x y z yaw`, where `frame = round(t · (n - 1))` and the frame's
/// time in seconds is `frame / fps`.
pub fn format_track(keyframes: &[Keyframe], subject: &str, fps: f64) -> Result<String> {
    if keyframes.is_empty() {
        return Err(Error::EmptyTrack);
    }
    if !(fps > 0.0 && fps.is_finite()) {
        return Err(Error::InvalidConfig("fps must be positive".into()));
    }
    let n = keyframes.len();
    let mut out = format!("# subject={subject} fps={fps} frames={n}\n");
    for kf in keyframes {
        let frame = (kf.t * (n - 1) as f64).round() as u64;
        let p = kf.position;
        let _ = write!(out, "{frame} {} {} {}", num(p.x), num(p.y), num(p.z));
        match kf.aim {
            Aim::LookAt(l) => {
                let _ = writeln!(out, " {} {} {}", num(l.x), num(l.y), num(l.z));
            }
            Aim::Yaw(y) => {
                let _ = writeln!(out, " {}", num(y));
            }
        }
    }
    Ok(out)
}

pub fn export_track(keyframes: &[Keyframe], subject: &str, fps: f64, path: &Path) -> Result<()> {
    let text = format_track(keyframes, subject, fps)?;
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
