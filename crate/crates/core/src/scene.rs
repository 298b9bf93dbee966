//! Scene documents: the media table, posed polygonal elements, light
//! sources and world bounds.
//!
//! Documents are plain values. Editing goes through [`set_pose`], which
//! returns a new document and leaves the input untouched.
//!
//! Elements may be disjoint or strictly nested but never partially
//! overlapping. The medium at a point is the one of the innermost
//! (smallest-area) element containing it, or the background medium.

use std::collections::HashSet;
use std::f64::consts::FRAC_PI_4;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    apply_pose, point_in_polygon, point_segment_distance, Containment, Polygon, Pose, UnitVec2,
    Vec2, EPS_HIT,
};
use crate::optics::{white_light, Medium, Wavelength};

/// Offset used to sample the media on either side of a boundary.
pub const EPS_SIDE: f64 = 10.0 * EPS_HIT;

/// Parallel edges closer than this, but not exactly coincident, are flagged.
pub const NEAR_COINCIDENT_GAP: f64 = 1e-6;

pub const MAX_FAN_RAYS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Element {
    pub id: String,
    pub medium: String,
    pub pose: Pose,
    /// Shape in local coordinates.
    #[serde(rename = "vertices")]
    pub shape: Polygon,
}

impl Element {
    pub fn world_polygon(&self) -> Polygon {
        apply_pose(&self.pose, &self.shape)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Beam {
    Single,
    /// `count` rays spread evenly over `spread_rad` centred on the heading.
    Fan {
        count: u32,
        #[serde(rename = "spread_rad")]
        spread: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Spectrum {
    Mono {
        #[serde(rename = "lambda_nm")]
        wavelength: Wavelength,
    },
    White,
}

/// A flashlight. The pose position is the emitter, the rotation its heading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Source {
    pub id: String,
    pub pose: Pose,
    pub beam: Beam,
    pub spectrum: Spectrum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Bounds {
    pub fn new(min: Vec2, max: Vec2) -> Bounds {
        Bounds {
            min_x: min.x,
            min_y: min.y,
            max_x: max.x,
            max_y: max.y,
        }
    }

    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min_x && p.x <= self.max_x && p.y >= self.min_y && p.y <= self.max_y
    }

    /// Inside and farther than [`EPS_HIT`] from every side.
    pub fn contains_strictly(&self, p: Vec2) -> bool {
        p.x > self.min_x + EPS_HIT
            && p.x < self.max_x - EPS_HIT
            && p.y > self.min_y + EPS_HIT
            && p.y < self.max_y - EPS_HIT
    }

    /// Distance along the ray to the side it leaves through, with the
    /// side's inward normal.
    pub fn exit(&self, origin: Vec2, dir: UnitVec2) -> (f64, UnitVec2) {
        let mut best = (f64::INFINITY, UnitVec2::X);
        let candidates = [
            (dir.x() > 0.0, (self.max_x - origin.x) / dir.x(), -UnitVec2::X),
            (dir.x() < 0.0, (self.min_x - origin.x) / dir.x(), UnitVec2::X),
            (dir.y() > 0.0, (self.max_y - origin.y) / dir.y(), -UnitVec2::Y),
            (dir.y() < 0.0, (self.min_y - origin.y) / dir.y(), UnitVec2::Y),
        ];
        for (valid, t, n) in candidates {
            if valid && t < best.0 {
                best = (t, n);
            }
        }
        best
    }

    fn is_valid(&self) -> bool {
        [self.min_x, self.min_y, self.max_x, self.max_y]
            .iter()
            .all(|v| v.is_finite())
            && self.max_x > self.min_x
            && self.max_y > self.min_y
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDoc {
    pub background: String,
    pub media: Vec<Medium>,
    pub elements: Vec<Element>,
    pub sources: Vec<Source>,
    pub bounds: Bounds,
}

/// One broken scene invariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateMedium { medium: String },
    InvalidMedium { medium: String, reason: String },
    UnknownBackground { medium: String },
    DuplicateId { id: String },
    UnknownMedium { element: String, medium: String },
    InvalidBounds,
    ElementOutOfBounds { element: String },
    SourceOutOfBounds { source: String },
    InvalidSource { source: String, reason: String },
    PartialOverlap { first: String, second: String },
    NearCoincidentEdges { first: String, second: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateMedium { medium } => write!(f, "medium {medium:?} defined twice"),
            Violation::InvalidMedium { medium, reason } => {
                write!(f, "medium {medium:?} is invalid: {reason}")
            }
            Violation::UnknownBackground { medium } => {
                write!(f, "background medium {medium:?} is not in the media table")
            }
            Violation::DuplicateId { id } => write!(f, "id {id:?} is used more than once"),
            Violation::UnknownMedium { element, medium } => {
                write!(f, "element {element:?} uses unknown medium {medium:?}")
            }
            Violation::InvalidBounds => write!(f, "bounds must be a finite, non-empty rectangle"),
            Violation::ElementOutOfBounds { element } => {
                write!(f, "element {element:?} extends outside the bounds")
            }
            Violation::SourceOutOfBounds { source } => {
                write!(f, "source {source:?} is not strictly inside the bounds")
            }
            Violation::InvalidSource { source, reason } => {
                write!(f, "source {source:?} is invalid: {reason}")
            }
            Violation::PartialOverlap { first, second } => {
                write!(f, "elements {first:?} and {second:?} partially overlap")
            }
            Violation::NearCoincidentEdges { first, second } => write!(
                f,
                "elements {first:?} and {second:?} have nearly but not exactly coincident edges"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("no element or source with id {0:?}")]
    UnknownId(String),
    #[error("pose rejected: {}", join_violations(.0))]
    PoseRejected(Vec<Violation>),
    #[error("point {0} lies on an element boundary")]
    OnBoundary(Vec2),
}

pub(crate) fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

impl SceneDoc {
    pub fn medium(&self, name: &str) -> Option<&Medium> {
        self.media.iter().find(|m| m.name == name)
    }

    pub fn element(&self, id: &str) -> Option<&Element> {
        self.elements.iter().find(|e| e.id == id)
    }

    pub fn source(&self, id: &str) -> Option<&Source> {
        self.sources.iter().find(|s| s.id == id)
    }

    /// `Ok` when every invariant holds, otherwise the full list of violations.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let v = validate(self);
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }

    pub fn resolve_medium(&self, p: Vec2) -> Result<&str, SceneError> {
        World::new(self).medium_at(p)
    }
}

/// Lists every violated invariant. An empty list means the scene is valid.
pub fn validate(scene: &SceneDoc) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut names = HashSet::new();
    for m in &scene.media {
        if !names.insert(m.name.as_str()) {
            out.push(Violation::DuplicateMedium {
                medium: m.name.clone(),
            });
        }
        if let Err(reason) = m.model.check() {
            out.push(Violation::InvalidMedium {
                medium: m.name.clone(),
                reason,
            });
        }
    }
    if !names.contains(scene.background.as_str()) {
        out.push(Violation::UnknownBackground {
            medium: scene.background.clone(),
        });
    }

    let mut ids = HashSet::new();
    let all_ids = scene
        .elements
        .iter()
        .map(|e| &e.id)
        .chain(scene.sources.iter().map(|s| &s.id));
    for id in all_ids {
        if !ids.insert(id.as_str()) {
            out.push(Violation::DuplicateId { id: id.clone() });
        }
    }

    for e in &scene.elements {
        if !names.contains(e.medium.as_str()) {
            out.push(Violation::UnknownMedium {
                element: e.id.clone(),
                medium: e.medium.clone(),
            });
        }
    }

    let bounds_ok = scene.bounds.is_valid();
    if !bounds_ok {
        out.push(Violation::InvalidBounds);
    }

    let world: Vec<Polygon> = scene.elements.iter().map(Element::world_polygon).collect();
    if bounds_ok {
        let grown = Bounds {
            min_x: scene.bounds.min_x - EPS_HIT,
            min_y: scene.bounds.min_y - EPS_HIT,
            max_x: scene.bounds.max_x + EPS_HIT,
            max_y: scene.bounds.max_y + EPS_HIT,
        };
        for (e, poly) in scene.elements.iter().zip(&world) {
            if !poly.vertices().iter().all(|&v| grown.contains(v)) {
                out.push(Violation::ElementOutOfBounds {
                    element: e.id.clone(),
                });
            }
        }
    }

    for s in &scene.sources {
        if let Err(reason) = check_source(s) {
            out.push(Violation::InvalidSource {
                source: s.id.clone(),
                reason,
            });
        }
        if bounds_ok && !scene.bounds.contains_strictly(s.pose.position) {
            out.push(Violation::SourceOutOfBounds {
                source: s.id.clone(),
            });
        }
    }

    for i in 0..world.len() {
        for j in (i + 1)..world.len() {
            let (first, second) = (scene.elements[i].id.clone(), scene.elements[j].id.clone());
            let rel = relate(&world[i], &world[j]);
            if rel.near_coincident {
                out.push(Violation::NearCoincidentEdges {
                    first: first.clone(),
                    second: second.clone(),
                });
            }
            if rel.overlap == Overlap::Partial {
                out.push(Violation::PartialOverlap { first, second });
            }
        }
    }
    out
}

fn check_source(s: &Source) -> Result<(), String> {
    if !s.pose.position.is_finite() || !s.pose.rotation().is_finite() {
        return Err("pose is not finite".into());
    }
    if let Beam::Fan { count, spread } = s.beam {
        if !(2..=MAX_FAN_RAYS).contains(&count) {
            return Err(format!("fan count {count} must be in 2..={MAX_FAN_RAYS}"));
        }
        if !(spread > 0.0 && spread <= FRAC_PI_4) {
            return Err(format!("fan spread {spread} rad must be in (0, π/4]"));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Overlap {
    Disjoint,
    FirstInSecond,
    SecondInFirst,
    Partial,
}

struct Relation {
    overlap: Overlap,
    near_coincident: bool,
}

/// Classifies how two world polygons sit relative to each other.
fn relate(p: &Polygon, q: &Polygon) -> Relation {
    let mut near_coincident = false;
    for (a, b) in p.edges() {
        for (c, d) in q.edges() {
            match edge_relation(a, b, c, d) {
                EdgeRelation::Crossing => {
                    return Relation {
                        overlap: Overlap::Partial,
                        near_coincident,
                    }
                }
                EdgeRelation::NearCoincident => near_coincident = true,
                EdgeRelation::Unrelated => {}
            }
        }
    }

    let (p_in, p_out) = sample_against(p, q);
    let (q_in, q_out) = sample_against(q, p);
    let overlap = if (p_in && p_out) || (q_in && q_out) {
        Overlap::Partial
    } else if !p_in && !q_in {
        if !p_out && !q_out {
            // Every sample on the other boundary: the shapes coincide.
            Overlap::Partial
        } else {
            Overlap::Disjoint
        }
    } else if p_in && !q_in {
        Overlap::FirstInSecond
    } else if q_in && !p_in {
        Overlap::SecondInFirst
    } else {
        Overlap::Partial
    };
    Relation {
        overlap,
        near_coincident,
    }
}

/// Whether any vertex or edge midpoint of `p` is strictly inside / strictly
/// outside `q`.
fn sample_against(p: &Polygon, q: &Polygon) -> (bool, bool) {
    let (mut inside, mut outside) = (false, false);
    let samples = p
        .vertices()
        .iter()
        .copied()
        .chain(p.edges().map(|(a, b)| (a + b) * 0.5));
    for s in samples {
        match point_in_polygon(s, q) {
            Containment::Inside => inside = true,
            Containment::Outside => outside = true,
            Containment::OnBoundary => {}
        }
    }
    (inside, outside)
}

enum EdgeRelation {
    Unrelated,
    Crossing,
    NearCoincident,
}

fn edge_relation(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> EdgeRelation {
    let (e, f) = (b - a, d - c);
    let (le, lf) = (e.length(), f.length());
    let sin = e.cross(f) / (le * lf);
    if sin.abs() < 1e-6 {
        // Nearly parallel: look at the gap between the lines and whether
        // the projections overlap.
        let gap = ((c - a).cross(e) / le).abs().max(((d - a).cross(e) / le).abs());
        let (s0, s1) = ((c - a).dot(e) / le, (d - a).dot(e) / le);
        let overlap = s0.max(s1).min(le) - s0.min(s1).max(0.0);
        if overlap > EPS_HIT && gap > EPS_HIT && gap <= NEAR_COINCIDENT_GAP {
            return EdgeRelation::NearCoincident;
        }
        return EdgeRelation::Unrelated;
    }
    let w = c - a;
    let s = w.cross(f) / e.cross(f);
    let u = w.cross(e) / e.cross(f);
    let (ts, tu) = (EPS_HIT / le, EPS_HIT / lf);
    if s > ts && s < 1.0 - ts && u > tu && u < 1.0 - tu {
        // Transversal crossing, unless the contact is only a touch at an
        // endpoint lying within tolerance of the other segment.
        let touches = [a, b]
            .iter()
            .any(|&v| point_segment_distance(v, c, d) <= EPS_HIT)
            || [c, d]
                .iter()
                .any(|&v| point_segment_distance(v, a, b) <= EPS_HIT);
        if !touches {
            return EdgeRelation::Crossing;
        }
    }
    EdgeRelation::Unrelated
}

/// World-space view of a scene for point queries.
#[derive(Debug, Clone)]
pub struct World<'a> {
    pub scene: &'a SceneDoc,
    pub polygons: Vec<Polygon>,
    areas: Vec<f64>,
}

impl<'a> World<'a> {
    pub fn new(scene: &'a SceneDoc) -> World<'a> {
        let polygons: Vec<Polygon> = scene.elements.iter().map(Element::world_polygon).collect();
        let areas = polygons.iter().map(Polygon::area).collect();
        World {
            scene,
            polygons,
            areas,
        }
    }

    /// Index of the innermost element containing `p`, `None` for background.
    pub fn element_at(&self, p: Vec2) -> Result<Option<usize>, SceneError> {
        let mut best: Option<usize> = None;
        for (i, poly) in self.polygons.iter().enumerate() {
            match point_in_polygon(p, poly) {
                Containment::OnBoundary => return Err(SceneError::OnBoundary(p)),
                Containment::Inside => {
                    if best.is_none_or(|b| self.areas[i] < self.areas[b]) {
                        best = Some(i);
                    }
                }
                Containment::Outside => {}
            }
        }
        Ok(best)
    }

    pub fn medium_at(&self, p: Vec2) -> Result<&'a str, SceneError> {
        Ok(match self.element_at(p)? {
            Some(i) => self.scene.elements[i].medium.as_str(),
            None => self.scene.background.as_str(),
        })
    }
}

/// Medium name at `p`: the innermost containing element's, else background.
pub fn resolve_medium(scene: &SceneDoc, p: Vec2) -> Result<&str, SceneError> {
    scene.resolve_medium(p)
}

/// Returns a copy of `scene` with the element or source `id` moved to
/// `pose`. The copy must still validate.
pub fn set_pose(scene: &SceneDoc, id: &str, pose: Pose) -> Result<SceneDoc, SceneError> {
    let mut next = scene.clone();
    if let Some(e) = next.elements.iter_mut().find(|e| e.id == id) {
        e.pose = pose;
    } else if let Some(s) = next.sources.iter_mut().find(|s| s.id == id) {
        s.pose = pose;
    } else {
        return Err(SceneError::UnknownId(id.to_string()));
    }
    next.validate().map_err(SceneError::PoseRejected)?;
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmittedRay {
    pub origin: Vec2,
    pub dir: UnitVec2,
    pub wavelength: Wavelength,
}

/// Expands a source into individual monochromatic rays, direction-major.
/// White light uses `white_table` in the given order.
pub fn emit_rays(source: &Source, white_table: &[Wavelength]) -> Vec<EmittedRay> {
    let heading = source.pose.rotation();
    let headings: Vec<f64> = match source.beam {
        Beam::Single => vec![heading],
        Beam::Fan { count, spread } => {
            let step = spread / f64::from(count - 1);
            (0..count)
                .map(|i| heading - spread / 2.0 + step * f64::from(i))
                .collect()
        }
    };
    let wavelengths: Vec<Wavelength> = match source.spectrum {
        Spectrum::Mono { wavelength } => vec![wavelength],
        Spectrum::White => white_table.to_vec(),
    };
    headings
        .iter()
        .flat_map(|&h| {
            wavelengths.iter().map(move |&wavelength| EmittedRay {
                origin: source.pose.position,
                dir: UnitVec2::from_angle(h),
                wavelength,
            })
        })
        .collect()
}

/// [`emit_rays`] with the standard seven-line white spectrum.
pub fn emit_source(source: &Source) -> Vec<EmittedRay> {
    emit_rays(source, &white_light())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::Material;

    fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Polygon {
        Polygon::new(vec![
            Vec2::new(x0, y0),
            Vec2::new(x1, y0),
            Vec2::new(x1, y1),
            Vec2::new(x0, y1),
        ])
        .unwrap()
    }

    fn element(id: &str, medium: &str, shape: Polygon) -> Element {
        Element {
            id: id.into(),
            medium: medium.into(),
            pose: Pose::IDENTITY,
            shape,
        }
    }

    fn tank() -> SceneDoc {
        SceneDoc {
            background: "air".into(),
            media: vec![
                Material::Air.medium(),
                Material::WindowGlass.medium(),
                Material::Water.medium(),
            ],
            elements: vec![
                element("wall", "glass", rect(0.0, 0.0, 0.1, 3.0)),
                element("tank", "air", rect(0.1, 0.0, 6.1, 3.0)),
                element("water", "water", rect(0.1, 0.0, 6.1, 1.5)),
            ],
            sources: vec![Source {
                id: "lamp".into(),
                pose: Pose::new(Vec2::new(-1.0, 2.0), -0.5),
                beam: Beam::Single,
                spectrum: Spectrum::Mono {
                    wavelength: Wavelength::new(550.0).unwrap(),
                },
            }],
            bounds: Bounds::new(Vec2::new(-3.0, 0.0), Vec2::new(6.1, 4.0)),
        }
    }

    #[test]
    fn valid_tank() {
        assert_eq!(validate(&tank()), vec![]);
    }

    #[test]
    fn partial_overlap_detected() {
        let mut s = tank();
        s.elements = vec![
            element("a", "glass", rect(0.0, 0.0, 1.0, 1.0)),
            element("b", "glass", rect(0.5, 0.5, 1.5, 1.5)),
        ];
        assert_eq!(
            validate(&s),
            vec![Violation::PartialOverlap {
                first: "a".into(),
                second: "b".into()
            }]
        );
    }

    #[test]
    fn overlap_without_edge_crossings() {
        // Same outline twice, and a cross shape whose edges only meet at
        // shared lines.
        let mut s = tank();
        s.elements = vec![
            element("a", "glass", rect(0.0, 0.0, 1.0, 1.0)),
            element("b", "water", rect(0.0, 0.0, 1.0, 1.0)),
        ];
        assert!(matches!(validate(&s)[..], [Violation::PartialOverlap { .. }]));

        s.elements = vec![
            element("a", "glass", rect(0.0, 0.0, 2.0, 1.0)),
            element("b", "water", rect(1.0, 0.0, 3.0, 1.0)),
        ];
        assert!(matches!(validate(&s)[..], [Violation::PartialOverlap { .. }]));
    }

    #[test]
    fn touching_and_nested_are_fine() {
        let mut s = tank();
        s.elements = vec![
            element("a", "glass", rect(0.0, 0.0, 1.0, 1.0)),
            element("b", "water", rect(1.0, 0.25, 2.0, 0.75)),
            element("c", "water", rect(0.25, 0.25, 0.75, 0.75)),
            element("d", "glass", rect(-1.0, 1.0, 0.0, 2.0)),
        ];
        assert_eq!(validate(&s), vec![]);
    }

    #[test]
    fn near_coincident_edges_flagged() {
        let mut s = tank();
        s.elements = vec![
            element("a", "glass", rect(0.0, 0.0, 1.0, 1.0)),
            element("b", "water", rect(1.0 + 1e-7, 0.0, 2.0, 1.0)),
        ];
        assert_eq!(
            validate(&s),
            vec![Violation::NearCoincidentEdges {
                first: "a".into(),
                second: "b".into()
            }]
        );
    }

    #[test]
    fn unknown_media_and_ids() {
        let mut s = tank();
        s.elements[0].medium = "oil".into();
        s.background = "vacuum".into();
        s.sources[0].id = "wall".into();
        s.media.push(Medium::constant("glass", 0.5));
        let v = validate(&s);
        assert!(v.contains(&Violation::UnknownMedium {
            element: "wall".into(),
            medium: "oil".into()
        }));
        assert!(v.contains(&Violation::UnknownBackground {
            medium: "vacuum".into()
        }));
        assert!(v.contains(&Violation::DuplicateId { id: "wall".into() }));
        assert!(v.contains(&Violation::DuplicateMedium {
            medium: "glass".into()
        }));
        assert!(v.iter().any(|v| matches!(v, Violation::InvalidMedium { .. })));
    }

    #[test]
    fn bounds_and_sources_checked() {
        let mut s = tank();
        s.sources[0].pose = Pose::new(Vec2::new(-3.0, 1.0), 0.0);
        s.sources[0].beam = Beam::Fan {
            count: 65,
            spread: 0.1,
        };
        s.elements[1].pose = Pose::new(Vec2::new(0.5, 0.0), 0.0);
        let v = validate(&s);
        assert!(v.contains(&Violation::SourceOutOfBounds {
            source: "lamp".into()
        }));
        assert!(v.iter().any(|v| matches!(v, Violation::InvalidSource { .. })));
        assert!(v.contains(&Violation::ElementOutOfBounds {
            element: "tank".into()
        }));

        s.bounds.max_x = s.bounds.min_x;
        assert!(validate(&s).contains(&Violation::InvalidBounds));
    }

    #[test]
    fn resolve_medium_examples() {
        let s = tank();
        assert_eq!(s.resolve_medium(Vec2::new(-1.0, 1.0)).unwrap(), "air");
        assert_eq!(s.resolve_medium(Vec2::new(3.0, 1.0)).unwrap(), "water");
        assert_eq!(s.resolve_medium(Vec2::new(3.0, 2.0)).unwrap(), "air");
        assert_eq!(s.resolve_medium(Vec2::new(0.05, 2.9)).unwrap(), "glass");
        assert_eq!(
            s.resolve_medium(Vec2::new(0.1, 1.0)),
            Err(SceneError::OnBoundary(Vec2::new(0.1, 1.0)))
        );
    }

    #[test]
    fn set_pose_examples() {
        let s = tank();
        let before = serde_json::to_string(&s).unwrap();

        let turned = Pose::new(Vec2::new(-1.0, 2.0), -0.5 + 5f64.to_radians());
        let next = set_pose(&s, "lamp", turned).unwrap();
        assert_eq!(next.sources[0].pose, turned);
        assert_eq!(next.elements, s.elements);
        assert_eq!(serde_json::to_string(&s).unwrap(), before);

        let same = set_pose(&s, "lamp", s.sources[0].pose).unwrap();
        assert_eq!(same, s);

        let moved = set_pose(&s, "water", Pose::new(Vec2::new(-0.05, 1.0), 0.0));
        match moved {
            Err(SceneError::PoseRejected(v)) => {
                assert!(v.iter().any(|v| matches!(v, Violation::PartialOverlap { .. })))
            }
            other => panic!("expected rejection, got {other:?}"),
        }

        assert_eq!(
            set_pose(&s, "nope", Pose::IDENTITY),
            Err(SceneError::UnknownId("nope".into()))
        );
    }

    #[test]
    fn emit_examples() {
        let mut src = tank().sources[0].clone();
        src.pose = Pose::new(Vec2::ZERO, 0.0);
        let rays = emit_source(&src);
        assert_eq!(rays.len(), 1);
        assert_eq!(rays[0].dir, UnitVec2::X);

        src.spectrum = Spectrum::White;
        let rays = emit_source(&src);
        let nm: Vec<f64> = rays.iter().map(|r| r.wavelength.nm()).collect();
        assert_eq!(nm, vec![650.0, 610.0, 580.0, 550.0, 470.0, 440.0, 410.0]);
        assert!(rays.iter().all(|r| r.dir == UnitVec2::X));

        src.spectrum = Spectrum::Mono {
            wavelength: Wavelength::new(500.0).unwrap(),
        };
        src.beam = Beam::Fan {
            count: 3,
            spread: 10f64.to_radians(),
        };
        let rays = emit_source(&src);
        let deg: Vec<f64> = rays.iter().map(|r| r.dir.angle().to_degrees()).collect();
        for (got, want) in deg.iter().zip([-5.0, 0.0, 5.0]) {
            assert!((got - want).abs() < 1e-12, "{deg:?}");
        }
    }
}
