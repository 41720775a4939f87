//! Small vector types and convex-polygon routines used by the relation measures.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn xy(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Signed area; positive for counterclockwise vertex order.
pub fn signed_area(poly: &[Vec2]) -> f64 {
    let n = poly.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += poly[i].cross(poly[(i + 1) % n]);
    }
    0.5 * acc
}

/// True when the polygon is strictly convex-or-degenerate-free and counterclockwise.
pub fn is_convex_ccw(poly: &[Vec2]) -> bool {
    let n = poly.len();
    if n < 3 || signed_area(poly) <= 0.0 {
        return false;
    }
    (0..n).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = poly[(i + 2) % n];
        (b - a).cross(c - b) >= 0.0
    })
}

/// Point-in-convex-polygon test (boundary counts as inside). Polygon must be CCW.
pub fn point_in_convex(poly: &[Vec2], p: Vec2) -> bool {
    let n = poly.len();
    (0..n).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        (b - a).cross(p - a) >= 0.0
    })
}

pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = (b - a).cross(c - a);
    let d2 = (b - a).cross(d - a);
    let d3 = (d - c).cross(a - c);
    let d4 = (d - c).cross(b - c);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |p: Vec2, q: Vec2, r: Vec2, o: f64| {
        o == 0.0
            && r.x >= p.x.min(q.x)
            && r.x <= p.x.max(q.x)
            && r.y >= p.y.min(q.y)
            && r.y <= p.y.max(q.y)
    };
    on(a, b, c, d1) || on(a, b, d, d2) || on(c, d, a, d3) || on(c, d, b, d4)
}

pub fn segment_segment_distance(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// Separating-axis overlap test for two CCW convex polygons. Touching counts as overlap.
pub fn convex_overlap(pa: &[Vec2], pb: &[Vec2]) -> bool {
    for poly in [pa, pb] {
        let n = poly.len();
        for i in 0..n {
            let edge = poly[(i + 1) % n] - poly[i];
            let axis = Vec2::new(-edge.y, edge.x);
            let (amin, amax) = project(pa, axis);
            let (bmin, bmax) = project(pb, axis);
            if amax < bmin || bmax < amin {
                return false;
            }
        }
    }
    true
}

pub fn project(poly: &[Vec2], axis: Vec2) -> (f64, f64) {
    poly.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let d = p.dot(axis);
        (lo.min(d), hi.max(d))
    })
}

fn point_segment_distance_sq(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    let t = if len2 == 0.0 {
        0.0
    } else {
        ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
    };
    let d = p - (a + ab * t);
    d.dot(d)
}

/// Minimum distance between two convex polygons; 0 when they intersect or touch.
pub fn polygon_distance(pa: &[Vec2], pb: &[Vec2]) -> f64 {
    if convex_overlap(pa, pb) {
        return 0.0;
    }
    // disjoint convex polygons: a closest pair always includes a vertex
    let mut best = f64::INFINITY;
    for (verts, edges) in [(pa, pb), (pb, pa)] {
        let n = edges.len();
        for &v in verts {
            for j in 0..n {
                best = best.min(point_segment_distance_sq(v, edges[j], edges[(j + 1) % n]));
            }
        }
    }
    best.sqrt()
}

/// Distance from a point to a CCW convex polygon; 0 inside or on the boundary.
pub fn point_polygon_distance(poly: &[Vec2], p: Vec2) -> f64 {
    if point_in_convex(poly, p) {
        return 0.0;
    }
    let n = poly.len();
    (0..n)
        .map(|i| point_segment_distance(p, poly[i], poly[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Sutherland–Hodgman clip of `subject` by the convex CCW polygon `clip`.
pub fn clip_convex(subject: &[Vec2], clip: &[Vec2]) -> Vec<Vec2> {
    let mut output: Vec<Vec2> = subject.to_vec();
    let m = clip.len();
    for i in 0..m {
        if output.is_empty() {
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % m];
        let edge = b - a;
        let input = std::mem::take(&mut output);
        let n = input.len();
        for k in 0..n {
            let s = input[k];
            let e = input[(k + 1) % n];
            let sd = edge.cross(s - a);
            let ed = edge.cross(e - a);
            let s_in = sd >= 0.0;
            let e_in = ed >= 0.0;
            if e_in {
                if !s_in {
                    output.push(s + (e - s) * (sd / (sd - ed)));
                }
                output.push(e);
            } else if s_in {
                output.push(s + (e - s) * (sd / (sd - ed)));
            }
        }
    }
    output
}

/// Area of the intersection of two convex CCW polygons.
pub fn intersection_area(pa: &[Vec2], pb: &[Vec2]) -> f64 {
    if !convex_overlap(pa, pb) {
        return 0.0;
    }
    let clipped = clip_convex(pa, pb);
    if clipped.len() < 3 {
        return 0.0;
    }
    signed_area(&clipped).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(cx: f64, cy: f64, h: f64) -> Vec<Vec2> {
        vec![
            Vec2::new(cx - h, cy - h),
            Vec2::new(cx + h, cy - h),
            Vec2::new(cx + h, cy + h),
            Vec2::new(cx - h, cy + h),
        ]
    }

    #[test]
    fn clipping_offset_squares() {
        let a = square(0.0, 0.0, 0.5);
        let b = square(0.5, 0.5, 0.5);
        assert!((intersection_area(&a, &b) - 0.25).abs() < 1e-12);
        assert!((intersection_area(&a, &a) - 1.0).abs() < 1e-12);
        assert_eq!(intersection_area(&a, &square(3.0, 0.0, 0.5)), 0.0);
    }

    #[test]
    fn polygon_distance_cases() {
        let a = square(0.0, 0.0, 0.5);
        assert!((polygon_distance(&a, &square(3.0, 0.0, 0.5)) - 2.0).abs() < 1e-12);
        assert_eq!(polygon_distance(&a, &square(1.0, 0.0, 0.5)), 0.0);
        // corner to corner
        let d = polygon_distance(&a, &square(2.0, 2.0, 0.5));
        assert!((d - 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn convexity() {
        let a = square(0.0, 0.0, 1.0);
        assert!(is_convex_ccw(&a));
        let mut cw = a.clone();
        cw.reverse();
        assert!(!is_convex_ccw(&cw));
        let dart = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(0.5, 0.5),
            Vec2::new(0.0, 2.0),
        ];
        assert!(!is_convex_ccw(&dart));
    }

    #[test]
    fn point_distance_outside() {
        let a = square(0.0, 0.0, 0.5);
        assert_eq!(point_polygon_distance(&a, Vec2::new(0.2, 0.5)), 0.0);
        assert!((point_polygon_distance(&a, Vec2::new(0.8, 0.0)) - 0.3).abs() < 1e-12);
    }
}
