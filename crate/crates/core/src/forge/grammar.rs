//! Toy parametric asset grammar: four furniture categories, each a fixed
//! parameter schema that derives a list of box parts.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::scene::Extent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Table,
    Shelf,
    Sofa,
    Lamp,
}

impl Category {
    pub fn name(self) -> &'static str {
        match self {
            Category::Table => "table",
            Category::Shelf => "shelf",
            Category::Sofa => "sofa",
            Category::Lamp => "lamp",
        }
    }

    pub fn schema(self) -> &'static [ParamSpec] {
        match self {
            Category::Table => TABLE,
            Category::Shelf => SHELF,
            Category::Sofa => SOFA,
            Category::Lamp => LAMP,
        }
    }

    pub fn param(self, name: &str) -> Option<&'static ParamSpec> {
        self.schema().iter().find(|p| p.name == name)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Real,
    Integer,
}

/// One schema entry; values must lie in `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: ParamKind,
    pub min: f64,
    pub max: f64,
}

impl ParamSpec {
    /// Nearest admissible value.
    pub fn clamp(&self, v: f64) -> f64 {
        let v = v.clamp(self.min, self.max);
        match self.kind {
            ParamKind::Real => v,
            ParamKind::Integer => v.round(),
        }
    }
}

const fn real(name: &'static str, min: f64, max: f64) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Real,
        min,
        max,
    }
}

const fn int(name: &'static str, min: f64, max: f64) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Integer,
        min,
        max,
    }
}

const TABLE: &[ParamSpec] = &[
    real("top_dx", 0.3, 3.0),
    real("top_dy", 0.3, 2.0),
    real("top_dz", 0.01, 0.2),
    int("leg_count", 3.0, 6.0),
    real("leg_radius", 0.005, 0.2),
    real("height", 0.3, 1.5),
];

const SHELF: &[ParamSpec] = &[
    real("width", 0.3, 3.0),
    real("depth", 0.1, 1.0),
    real("height", 0.3, 3.0),
    int("shelf_count", 1.0, 12.0),
    real("board_thickness", 0.005, 0.1),
];

const SOFA: &[ParamSpec] = &[
    real("width", 0.8, 4.0),
    real("depth", 0.5, 1.5),
    real("seat_height", 0.2, 0.7),
    real("back_height", 0.4, 1.5),
    real("back_depth", 0.05, 0.4),
    real("arm_width", 0.05, 0.4),
];

const LAMP: &[ParamSpec] = &[
    real("base_radius", 0.05, 0.5),
    real("base_height", 0.01, 0.2),
    real("pole_radius", 0.005, 0.1),
    real("pole_height", 0.1, 2.0),
    real("shade_radius", 0.05, 0.6),
    real("shade_height", 0.05, 0.6),
];

/// A category plus named parameter values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Program {
    pub category: Category,
    pub params: Vec<(String, f64)>,
}

impl Program {
    pub fn new(category: Category, params: &[(&str, f64)]) -> Program {
        Program {
            category,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    /// Replaces an existing parameter value; returns false if absent.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        match self.params.iter_mut().find(|(k, _)| k == name) {
            Some(slot) => {
                slot.1 = value;
                true
            }
            None => false,
        }
    }

    /// Checks names, finiteness, ranges and integrality; returns the values
    /// in schema order.
    pub fn validate(&self) -> Result<Vec<f64>> {
        let bad = |m: String| Err(Error::InvalidProgram(m));
        let schema = self.category.schema();
        for (i, (k, _)) in self.params.iter().enumerate() {
            if self.category.param(k).is_none() {
                return bad(format!("unknown {} parameter `{k}`", self.category));
            }
            if self.params[..i].iter().any(|(j, _)| j == k) {
                return bad(format!("duplicate parameter `{k}`"));
            }
        }
        let mut values = Vec::with_capacity(schema.len());
        for spec in schema {
            let Some(v) = self.get(spec.name) else {
                return bad(format!("missing {} parameter `{}`", self.category, spec.name));
            };
            if !v.is_finite() {
                return bad(format!("`{}` is not finite", spec.name));
            }
            if v < spec.min || v > spec.max {
                return bad(format!("`{}` = {v} outside [{}, {}]", spec.name, spec.min, spec.max));
            }
            if spec.kind == ParamKind::Integer && v.fract() != 0.0 {
                return bad(format!("`{}` = {v} must be an integer", spec.name));
            }
            values.push(v);
        }
        Ok(values)
    }
}

/// One box of an asset; `offset` is the part center relative to the asset's
/// bottom-face center (front is `+y`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Part {
    pub name: String,
    pub extent: Extent,
    pub offset: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetDescriptor {
    pub category: Category,
    /// Axis-aligned bound of all parts.
    pub extent: Extent,
    pub parts: Vec<Part>,
    /// Named validity checks, e.g. `legs_fit`.
    pub flags: Vec<(String, bool)>,
}

impl AssetDescriptor {
    pub fn flag(&self, name: &str) -> Option<bool> {
        self.flags.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    /// Derived quantity by name: `extent_dx`, `extent_dy`, `extent_dz`, `part_count`.
    pub fn derived(&self, name: &str) -> Option<f64> {
        match name {
            "extent_dx" => Some(self.extent.dx),
            "extent_dy" => Some(self.extent.dy),
            "extent_dz" => Some(self.extent.dz),
            "part_count" => Some(self.parts.len() as f64),
            _ => None,
        }
    }
}

fn part(name: impl Into<String>, size: (f64, f64, f64), offset: (f64, f64, f64)) -> Result<Part> {
    Ok(Part {
        name: name.into(),
        extent: Extent::new(size.0, size.1, size.2)
            .map_err(|_| Error::InvalidProgram("derived part has non-positive extent".into()))?,
        offset: Vec3::new(offset.0, offset.1, offset.2),
    })
}

/// Leg centers for `n` legs inside the inset rectangle `±hx × ±hy`: four
/// corners, with a back-center leg for 3 and extra legs along the long sides
/// or the center for 5 and 6.
fn leg_positions(n: usize, hx: f64, hy: f64) -> Vec<(f64, f64)> {
    let corners = [(-hx, -hy), (hx, -hy), (hx, hy), (-hx, hy)];
    match n {
        3 => vec![(-hx, hy), (hx, hy), (0.0, -hy)],
        4 => corners.to_vec(),
        5 => {
            let mut v = corners.to_vec();
            v.push((0.0, 0.0));
            v
        }
        _ => {
            let mut v = corners.to_vec();
            if hx >= hy {
                v.extend([(0.0, -hy), (0.0, hy)]);
            } else {
                v.extend([(-hx, 0.0), (hx, 0.0)]);
            }
            v
        }
    }
}

/// Derives parts, overall extent and validity flags from a program.
pub fn toy_execute(program: &Program) -> Result<AssetDescriptor> {
    let v = program.validate()?;
    let mut flags = Vec::new();
    let parts = match program.category {
        Category::Table => {
            let (dx, dy, dz, legs, r, h) = (v[0], v[1], v[2], v[3] as usize, v[4], v[5]);
            flags.push(("legs_fit".to_string(), 4.0 * r <= dx.min(dy)));
            flags.push(("top_below_height".to_string(), dz < h));
            let leg_h = h - dz;
            if leg_h <= 0.0 {
                return Err(Error::InvalidProgram("top_dz must be below height".into()));
            }
            let mut parts = vec![part("top", (dx, dy, dz), (0.0, 0.0, h - 0.5 * dz))?];
            let (hx, hy) = ((0.5 * dx - r).max(0.0), (0.5 * dy - r).max(0.0));
            for (i, (x, y)) in leg_positions(legs, hx, hy).into_iter().enumerate() {
                parts.push(part(format!("leg{i}"), (2.0 * r, 2.0 * r, leg_h), (x, y, 0.5 * leg_h))?);
            }
            parts
        }
        Category::Shelf => {
            let (w, d, h, n, t) = (v[0], v[1], v[2], v[3] as usize, v[4]);
            flags.push(("boards_fit".to_string(), n as f64 * t <= h && 2.0 * t < w));
            if 2.0 * t >= w {
                return Err(Error::InvalidProgram("side panels leave no room for boards".into()));
            }
            let mut parts = Vec::new();
            for k in 0..n {
                let z = if n == 1 {
                    0.5 * t
                } else {
                    0.5 * t + k as f64 * (h - t) / (n - 1) as f64
                };
                parts.push(part(format!("board{k}"), (w - 2.0 * t, d, t), (0.0, 0.0, z))?);
            }
            for (name, x) in [("side_left", -0.5 * (w - t)), ("side_right", 0.5 * (w - t))] {
                parts.push(part(name, (t, d, h), (x, 0.0, 0.5 * h))?);
            }
            parts
        }
        Category::Sofa => {
            let (w, d, seat, back, bd, arm) = (v[0], v[1], v[2], v[3], v[4], v[5]);
            flags.push(("back_above_seat".to_string(), back > seat));
            if 2.0 * arm >= w || bd >= d {
                return Err(Error::InvalidProgram("arms or back leave no seat".into()));
            }
            let seat_d = d - bd;
            let arm_h = 0.5 * (seat + back);
            let y_seat = 0.5 * bd;
            vec![
                part("seat", (w - 2.0 * arm, seat_d, seat), (0.0, y_seat, 0.5 * seat))?,
                part("back", (w, bd, back), (0.0, -0.5 * d + 0.5 * bd, 0.5 * back))?,
                part("arm_left", (arm, seat_d, arm_h), (-0.5 * (w - arm), y_seat, 0.5 * arm_h))?,
                part("arm_right", (arm, seat_d, arm_h), (0.5 * (w - arm), y_seat, 0.5 * arm_h))?,
            ]
        }
        Category::Lamp => {
            let (br, bh, pr, ph, sr, sh) = (v[0], v[1], v[2], v[3], v[4], v[5]);
            flags.push(("pole_on_base".to_string(), pr < br));
            flags.push(("shade_wider_than_pole".to_string(), sr > pr));
            vec![
                part("base", (2.0 * br, 2.0 * br, bh), (0.0, 0.0, 0.5 * bh))?,
                part("pole", (2.0 * pr, 2.0 * pr, ph), (0.0, 0.0, bh + 0.5 * ph))?,
                part("shade", (2.0 * sr, 2.0 * sr, sh), (0.0, 0.0, bh + ph + 0.5 * sh))?,
            ]
        }
    };
    let extent = bounds(&parts)?;
    Ok(AssetDescriptor {
        category: program.category,
        extent,
        parts,
        flags,
    })
}

fn bounds(parts: &[Part]) -> Result<Extent> {
    let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut hi = Vec3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in parts {
        let h = Vec3::new(0.5 * p.extent.dx, 0.5 * p.extent.dy, 0.5 * p.extent.dz);
        let (a, b) = (p.offset - h, p.offset + h);
        lo = Vec3::new(lo.x.min(a.x), lo.y.min(a.y), lo.z.min(a.z));
        hi = Vec3::new(hi.x.max(b.x), hi.y.max(b.y), hi.z.max(b.z));
    }
    Extent::new(hi.x - lo.x, hi.y - lo.y, hi.z - lo.z)
}
