//! Planar vectors, validated polygons, poses and the ray/segment predicates
//! the tracer is built on.
//!
//! All predicates are tolerance based. [`EPS_HIT`] is the one length scale
//! that decides "on the boundary" versus "off it" everywhere in the crate.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Minimum advance along a ray before a boundary counts as hit, and the
/// distance under which a point is considered to lie on an edge.
pub const EPS_HIT: f64 = 1e-9;

/// Inputs with a norm at or below this are refused by [`normalize`].
pub const MIN_NORM: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("vector is too short to normalize")]
    DegenerateVector,
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon vertex {0} is not finite")]
    NonFinite(usize),
    #[error("polygon edges {0} and {1} intersect")]
    SelfIntersecting(usize, usize),
    #[error("polygon is wound clockwise; counter-clockwise order is required")]
    Clockwise,
    #[error("polygon has zero area")]
    ZeroArea,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn length(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).length()
    }

    /// Counter-clockwise rotation about the origin.
    pub fn rotated(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A direction: a vector of unit length.
///
/// The only ways to obtain one are [`normalize`] and the constructors below,
/// all of which establish `x² + y² = 1` to within a few ulps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct UnitVec2(Vec2);

/// How far from unit length a stored direction may be and still be taken
/// as written. Twelve significant digits leave up to about 1e-12.
const STORED_UNIT_SLACK: f64 = 1e-11;

impl TryFrom<[f64; 2]> for UnitVec2 {
    type Error = GeometryError;
    /// Keeps the components as written when they are unit length to within
    /// the rounding of a stored document, so a read-write cycle does not
    /// change them.
    fn try_from([x, y]: [f64; 2]) -> Result<Self, Self::Error> {
        let v = Vec2::new(x, y);
        if v.is_finite() && (v.length() - 1.0).abs() <= STORED_UNIT_SLACK {
            Ok(UnitVec2(v))
        } else {
            normalize(v)
        }
    }
}

impl From<UnitVec2> for [f64; 2] {
    fn from(u: UnitVec2) -> Self {
        [u.0.x, u.0.y]
    }
}

impl UnitVec2 {
    pub const X: UnitVec2 = UnitVec2(Vec2::new(1.0, 0.0));
    pub const Y: UnitVec2 = UnitVec2(Vec2::new(0.0, 1.0));

    /// Direction at `angle` radians counter-clockwise from +x.
    pub fn from_angle(angle: f64) -> UnitVec2 {
        let (s, c) = angle.sin_cos();
        UnitVec2(Vec2::new(c, s))
    }

    pub fn x(self) -> f64 {
        self.0.x
    }

    pub fn y(self) -> f64 {
        self.0.y
    }

    pub fn as_vec(self) -> Vec2 {
        self.0
    }

    /// Angle in (-π, π] measured from +x.
    pub fn angle(self) -> f64 {
        self.0.y.atan2(self.0.x)
    }

    pub fn dot(self, other: UnitVec2) -> f64 {
        self.0.dot(other.0)
    }

    pub fn cross(self, other: UnitVec2) -> f64 {
        self.0.cross(other.0)
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> UnitVec2 {
        UnitVec2(Vec2::new(-self.0.y, self.0.x))
    }

    pub fn rotated(self, angle: f64) -> UnitVec2 {
        // Re-normalizing keeps repeated rotations from drifting.
        normalize(self.0.rotated(angle)).unwrap_or(self)
    }
}

impl Neg for UnitVec2 {
    type Output = UnitVec2;
    fn neg(self) -> UnitVec2 {
        UnitVec2(-self.0)
    }
}

impl From<UnitVec2> for Vec2 {
    fn from(u: UnitVec2) -> Vec2 {
        u.0
    }
}

/// Scales `v` to unit length.
///
/// Vectors already unit length to within rounding are returned unchanged,
/// which makes the operation exactly idempotent.
pub fn normalize(v: Vec2) -> Result<UnitVec2, GeometryError> {
    if !v.is_finite() {
        return Err(GeometryError::DegenerateVector);
    }
    let len = v.length();
    if len <= MIN_NORM {
        return Err(GeometryError::DegenerateVector);
    }
    if (len - 1.0).abs() <= 4.0 * f64::EPSILON {
        return Ok(UnitVec2(v));
    }
    Ok(UnitVec2(Vec2::new(v.x / len, v.y / len)))
}

/// Position plus rotation. The rotation is kept in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "PoseRepr", into = "PoseRepr")]
pub struct Pose {
    pub position: Vec2,
    rotation: f64,
}

impl Pose {
    pub const IDENTITY: Pose = Pose {
        position: Vec2::ZERO,
        rotation: 0.0,
    };

    pub fn new(position: Vec2, rotation: f64) -> Pose {
        Pose {
            position,
            rotation: normalize_angle(rotation),
        }
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    pub fn heading(&self) -> UnitVec2 {
        UnitVec2::from_angle(self.rotation)
    }

    pub fn transform_point(&self, p: Vec2) -> Vec2 {
        p.rotated(self.rotation) + self.position
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PoseRepr {
    x: f64,
    y: f64,
    rot_rad: f64,
}

impl From<PoseRepr> for Pose {
    fn from(r: PoseRepr) -> Pose {
        Pose::new(Vec2::new(r.x, r.y), r.rot_rad)
    }
}

impl From<Pose> for PoseRepr {
    fn from(p: Pose) -> PoseRepr {
        PoseRepr {
            x: p.position.x,
            y: p.position.y,
            rot_rad: p.rotation,
        }
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn normalize_angle(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs.
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// A simple, counter-clockwise polygon with non-zero area.
///
/// Serialized as a list of `[x, y]` pairs; deserialization re-runs the
/// validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct Polygon {
    vertices: Vec<Vec2>,
}

impl Polygon {
    pub fn new(vertices: Vec<Vec2>) -> Result<Polygon, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite(i));
        }
        let area = signed_area(&vertices);
        let scale = bounding_extent(&vertices);
        if area.abs() <= 1e-12 * scale * scale {
            return Err(GeometryError::ZeroArea);
        }
        if let Some((i, j)) = first_self_intersection(&vertices) {
            return Err(GeometryError::SelfIntersecting(i, j));
        }
        if area < 0.0 {
            return Err(GeometryError::Clockwise);
        }
        Ok(Polygon { vertices })
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1` (wrapping).
    pub fn edge(&self, i: usize) -> (Vec2, Vec2) {
        let n = self.vertices.len();
        (self.vertices[i % n], self.vertices[(i + 1) % n])
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        (0..self.vertices.len()).map(move |i| self.edge(i))
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn centroid(&self) -> Vec2 {
        let a = self.area();
        let mut c = Vec2::ZERO;
        for (p, q) in self.edges() {
            let w = p.cross(q);
            c = c + (p + q) * w;
        }
        c * (1.0 / (6.0 * a))
    }

    /// Outward unit normal of edge `i`.
    pub fn outward_normal(&self, i: usize) -> UnitVec2 {
        let (a, b) = self.edge(i);
        let d = b - a;
        normalize(Vec2::new(d.y, -d.x)).expect("validated polygons have no zero-length edges")
    }
}

impl TryFrom<Vec<[f64; 2]>> for Polygon {
    type Error = GeometryError;
    fn try_from(raw: Vec<[f64; 2]>) -> Result<Self, Self::Error> {
        Polygon::new(raw.into_iter().map(|[x, y]| Vec2::new(x, y)).collect())
    }
}

impl From<Polygon> for Vec<[f64; 2]> {
    fn from(p: Polygon) -> Self {
        p.vertices.into_iter().map(|v| [v.x, v.y]).collect()
    }
}

fn signed_area(vertices: &[Vec2]) -> f64 {
    let n = vertices.len();
    0.5 * (0..n)
        .map(|i| vertices[i].cross(vertices[(i + 1) % n]))
        .sum::<f64>()
}

fn bounding_extent(vertices: &[Vec2]) -> f64 {
    let (mut lo, mut hi) = (vertices[0], vertices[0]);
    for v in vertices {
        lo = Vec2::new(lo.x.min(v.x), lo.y.min(v.y));
        hi = Vec2::new(hi.x.max(v.x), hi.y.max(v.y));
    }
    (hi - lo).length().max(f64::MIN_POSITIVE)
}

fn first_self_intersection(vertices: &[Vec2]) -> Option<(usize, usize)> {
    let n = vertices.len();
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        if a.distance(b) <= EPS_HIT {
            return Some((i, i));
        }
        for j in (i + 1)..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            let (c, d) = (vertices[j], vertices[(j + 1) % n]);
            if adjacent {
                // Adjacent edges may only share their common vertex: reject
                // a fold-back where they overlap collinearly.
                let (shared, p, q) = if j == i + 1 { (b, a, d) } else { (a, b, c) };
                let (u, w) = (p - shared, q - shared);
                if u.cross(w).abs() <= 1e-12 * u.length() * w.length() && u.dot(w) > 0.0 {
                    return Some((i, j));
                }
            } else if segments_touch(a, b, c, d) {
                return Some((i, j));
            }
        }
    }
    None
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(p: Vec2, a: Vec2, b: Vec2) -> bool {
    point_segment_distance(p, a, b) <= EPS_HIT
}

/// True when closed segments `ab` and `cd` share at least one point.
pub(crate) fn segments_touch(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    on_segment(c, a, b) || on_segment(d, a, b) || on_segment(a, c, d) || on_segment(b, c, d)
}

pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Rotates every vertex by the pose rotation about the local origin, then
/// translates by the pose position. Rigid motions keep the winding.
pub fn apply_pose(pose: &Pose, poly: &Polygon) -> Polygon {
    Polygon {
        vertices: poly
            .vertices
            .iter()
            .map(|&v| pose.transform_point(v))
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    /// Distance along the ray.
    pub t: f64,
    pub point: Vec2,
    /// Position along the segment, 0 at `a` and 1 at `b`.
    pub along: f64,
}

/// First crossing of the ray `origin + t·dir` with segment `[a, b]` for
/// `t > EPS_HIT`. Parallel rays (including collinear ones) never hit.
pub fn intersect_ray_segment(origin: Vec2, dir: UnitVec2, a: Vec2, b: Vec2) -> Option<Hit> {
    let d = dir.as_vec();
    let e = b - a;
    let denom = d.cross(e);
    if denom.abs() <= 1e-15 * e.length() {
        return None;
    }
    let w = a - origin;
    let t = w.cross(e) / denom;
    let along = w.cross(d) / denom;
    if t <= EPS_HIT || !(0.0..=1.0).contains(&along) {
        return None;
    }
    Some(Hit {
        t,
        point: origin + d * t,
        along,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Outside,
    OnBoundary,
}

/// Classifies `p` against `poly`. Points within [`EPS_HIT`] of an edge are
/// [`Containment::OnBoundary`]; otherwise an even-odd crossing count decides.
pub fn point_in_polygon(p: Vec2, poly: &Polygon) -> Containment {
    if poly
        .edges()
        .any(|(a, b)| point_segment_distance(p, a, b) <= EPS_HIT)
    {
        return Containment::OnBoundary;
    }
    let mut inside = false;
    for (a, b) in poly.edges() {
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    if inside {
        Containment::Inside
    } else {
        Containment::Outside
    }
}
