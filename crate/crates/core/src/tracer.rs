//! Ray propagation through a validated scene.
//!
//! A ray advances from boundary to boundary. At each element edge the media
//! on both sides are sampled a short distance off the surface, and the
//! optics kernel decides between refraction and total internal reflection.
//! The trace ends when the ray leaves the bounds, grazes a surface or hits a
//! corner, or runs out of its event budget.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{intersect_ray_segment, normalize, UnitVec2, Vec2, EPS_HIT};
use crate::optics::{refract_or_reflect, Medium, RefractionOutcome, Wavelength};
use crate::scene::{emit_source, join_violations, SceneDoc, SceneError, Violation, World, EPS_SIDE};

pub const DEFAULT_MAX_EVENTS: usize = 64;

/// Boundary hits that produce no event (both sides are the same medium)
/// are bounded separately so a pathological scene cannot spin forever.
const MAX_PASS_THROUGH: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TraceError {
    #[error("scene is invalid: {}", join_violations(.0))]
    SceneInvalid(Vec<Violation>),
    #[error("ray origin {0} lies on an element boundary")]
    OnBoundary(Vec2),
    #[error("ray origin {0} is not strictly inside the scene bounds")]
    OriginOutOfBounds(Vec2),
    #[error("no source with id {0:?}")]
    UnknownId(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathEvent {
    Refracted,
    TotalInternalReflection,
    Grazing,
    ExitedBounds,
    MaxEventsReached,
}

impl PathEvent {
    pub fn is_terminal(self) -> bool {
        matches!(
            self,
            PathEvent::Grazing | PathEvent::ExitedBounds | PathEvent::MaxEventsReached
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "SegmentRepr", into = "SegmentRepr")]
pub struct Segment {
    pub start: Vec2,
    pub end: Vec2,
    pub medium: String,
}

impl Segment {
    pub fn length(&self) -> f64 {
        self.start.distance(self.end)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentRepr {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
    medium: String,
}

impl From<SegmentRepr> for Segment {
    fn from(r: SegmentRepr) -> Segment {
        Segment {
            start: Vec2::new(r.x0, r.y0),
            end: Vec2::new(r.x1, r.y1),
            medium: r.medium,
        }
    }
}

impl From<Segment> for SegmentRepr {
    fn from(s: Segment) -> SegmentRepr {
        SegmentRepr {
            x0: s.start.x,
            y0: s.start.y,
            x1: s.end.x,
            y1: s.end.y,
            medium: s.medium,
        }
    }
}

/// The route of one monochromatic ray.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayPath {
    #[serde(rename = "lambda_nm")]
    pub wavelength: Wavelength,
    pub segments: Vec<Segment>,
    /// One entry per internal vertex, i.e. per pair of consecutive segments.
    pub events: Vec<PathEvent>,
    pub terminal: PathEvent,
    /// Direction after the last event; for grazing, the surface tangent.
    pub final_dir: UnitVec2,
}

impl RayPath {
    /// Segment start points followed by the end of the last segment.
    pub fn vertices(&self) -> Vec<Vec2> {
        let mut v: Vec<Vec2> = self.segments.iter().map(|s| s.start).collect();
        if let Some(last) = self.segments.last() {
            v.push(last.end);
        }
        v
    }

    /// The points where events happened.
    pub fn internal_vertices(&self) -> Vec<Vec2> {
        self.segments.iter().skip(1).map(|s| s.start).collect()
    }

    pub fn end(&self) -> Vec2 {
        self.segments.last().map(|s| s.end).unwrap_or_default()
    }

    pub fn final_medium(&self) -> &str {
        self.segments.last().map(|s| s.medium.as_str()).unwrap_or("")
    }

    /// `(event, medium before, medium after)` for every internal vertex.
    pub fn transitions(&self) -> impl Iterator<Item = (PathEvent, &str, &str)> + '_ {
        self.events
            .iter()
            .zip(self.segments.windows(2))
            .map(|(&e, w)| (e, w[0].medium.as_str(), w[1].medium.as_str()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HitTarget {
    Element { index: usize, edge: usize },
    Bounds,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryHit<'a> {
    pub t: f64,
    pub point: Vec2,
    /// Oriented against the ray, into the incident medium.
    pub normal: UnitVec2,
    pub target: HitTarget,
    /// The hit is within tolerance of a vertex, or the media around it
    /// could not be told apart. The normal is not meaningful.
    pub degenerate: bool,
    pub medium_before: &'a str,
    pub medium_after: &'a str,
    pub n_before: f64,
    pub n_after: f64,
}

/// What happened at one internal vertex, with the quantities the kernel saw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interaction {
    pub point: Vec2,
    pub normal: UnitVec2,
    pub incoming: UnitVec2,
    pub outgoing: UnitVec2,
    pub n_before: f64,
    pub n_after: f64,
    pub event: PathEvent,
}

/// A validated scene prepared for repeated tracing.
#[derive(Debug, Clone)]
pub struct Tracer<'a> {
    world: World<'a>,
    media: HashMap<&'a str, &'a Medium>,
}

impl<'a> Tracer<'a> {
    pub fn new(scene: &'a SceneDoc) -> Result<Tracer<'a>, TraceError> {
        scene.validate().map_err(TraceError::SceneInvalid)?;
        let media = scene.media.iter().map(|m| (m.name.as_str(), m)).collect();
        Ok(Tracer {
            world: World::new(scene),
            media,
        })
    }

    pub fn scene(&self) -> &'a SceneDoc {
        self.world.scene
    }

    fn index(&self, medium: &str, wavelength: Wavelength) -> f64 {
        self.media[medium].index_at(wavelength)
    }

    /// The closest boundary along the ray beyond [`EPS_HIT`]: an element
    /// edge, or the side of the bounds when no edge comes first.
    pub fn nearest_boundary_hit(
        &self,
        origin: Vec2,
        dir: UnitVec2,
        wavelength: Wavelength,
    ) -> Option<BoundaryHit<'a>> {
        let scene = self.world.scene;
        let mut best: Option<(f64, usize, usize, Vec2)> = None;
        let mut hits = Vec::new();
        for (index, poly) in self.world.polygons.iter().enumerate() {
            for edge in 0..poly.len() {
                let (a, b) = poly.edge(edge);
                if let Some(hit) = intersect_ray_segment(origin, dir, a, b) {
                    let len = a.distance(b);
                    let at_corner = hit.along * len <= EPS_HIT || (1.0 - hit.along) * len <= EPS_HIT;
                    hits.push((hit.t, at_corner));
                    if best.is_none_or(|(t, ..)| hit.t < t) {
                        best = Some((hit.t, index, edge, hit.point));
                    }
                }
            }
        }

        let (t_bounds, bounds_normal) = scene.bounds.exit(origin, dir);
        let t_bounds = t_bounds.max(0.0);
        let element_first = best.filter(|&(t, ..)| t < t_bounds - EPS_HIT);

        let Some((t, index, edge, point)) = element_first else {
            let point = origin + dir.as_vec() * t_bounds;
            let before = self
                .world
                .medium_at(point + bounds_normal.as_vec() * EPS_SIDE)
                .unwrap_or(scene.background.as_str());
            return Some(BoundaryHit {
                t: t_bounds,
                point,
                normal: bounds_normal,
                target: HitTarget::Bounds,
                degenerate: false,
                medium_before: before,
                medium_after: scene.background.as_str(),
                n_before: self.index(before, wavelength),
                n_after: self.index(&scene.background, wavelength),
            });
        };

        let corner = hits
            .iter()
            .any(|&(ht, at_corner)| at_corner && (ht - t).abs() <= EPS_HIT);
        let mut normal = self.world.polygons[index].outward_normal(edge);
        if normal.dot(dir) > 0.0 {
            normal = -normal;
        }
        let before = self.world.medium_at(point + normal.as_vec() * EPS_SIDE);
        let after = self.world.medium_at(point - normal.as_vec() * EPS_SIDE);
        let (degenerate, before, after) = match (before, after) {
            (Ok(b), Ok(a)) => (corner, b, a),
            _ => {
                let bg = scene.background.as_str();
                (true, bg, bg)
            }
        };
        Some(BoundaryHit {
            t,
            point,
            normal,
            target: HitTarget::Element { index, edge },
            degenerate,
            medium_before: before,
            medium_after: after,
            n_before: self.index(before, wavelength),
            n_after: self.index(after, wavelength),
        })
    }

    pub fn trace_ray(
        &self,
        origin: Vec2,
        dir: UnitVec2,
        wavelength: Wavelength,
        max_events: usize,
    ) -> Result<RayPath, TraceError> {
        self.trace_ray_detailed(origin, dir, wavelength, max_events)
            .map(|(path, _)| path)
    }

    /// Like [`Tracer::trace_ray`], also returning what the kernel saw at
    /// each internal vertex.
    pub fn trace_ray_detailed(
        &self,
        origin: Vec2,
        dir: UnitVec2,
        wavelength: Wavelength,
        max_events: usize,
    ) -> Result<(RayPath, Vec<Interaction>), TraceError> {
        let scene = self.world.scene;
        if !scene.bounds.contains_strictly(origin) {
            return Err(TraceError::OriginOutOfBounds(origin));
        }
        let mut medium = self.world.medium_at(origin).map_err(|e| match e {
            SceneError::OnBoundary(p) => TraceError::OnBoundary(p),
            _ => TraceError::OnBoundary(origin),
        })?;

        let mut segments = Vec::new();
        let mut events = Vec::new();
        let mut interactions = Vec::new();
        let mut seg_start = origin;
        let mut pos = origin;
        let mut dir = dir;
        let mut pass_through = 0;

        let terminal = loop {
            let Some(hit) = self.nearest_boundary_hit(pos, dir, wavelength) else {
                segments.push(segment(seg_start, pos, medium));
                break PathEvent::ExitedBounds;
            };
            if hit.target == HitTarget::Bounds {
                segments.push(segment(seg_start, hit.point, medium));
                break PathEvent::ExitedBounds;
            }
            if hit.degenerate {
                segments.push(segment(seg_start, hit.point, medium));
                break PathEvent::Grazing;
            }
            if hit.medium_before == hit.medium_after {
                pass_through += 1;
                if pass_through > MAX_PASS_THROUGH {
                    segments.push(segment(seg_start, hit.point, medium));
                    break PathEvent::MaxEventsReached;
                }
                pos = hit.point + dir.as_vec() * EPS_HIT;
                continue;
            }
            segments.push(segment(seg_start, hit.point, medium));
            if events.len() >= max_events {
                break PathEvent::MaxEventsReached;
            }
            let outcome = refract_or_reflect(dir, hit.normal, hit.n_before, hit.n_after)
                .expect("tracer orients normals and scene media are validated");
            let event = match outcome {
                RefractionOutcome::Refracted { .. } => {
                    medium = hit.medium_after;
                    PathEvent::Refracted
                }
                RefractionOutcome::TotalInternal { .. } => {
                    medium = hit.medium_before;
                    PathEvent::TotalInternalReflection
                }
                RefractionOutcome::Grazing { dir: tangent } => {
                    dir = tangent;
                    break PathEvent::Grazing;
                }
            };
            interactions.push(Interaction {
                point: hit.point,
                normal: hit.normal,
                incoming: dir,
                outgoing: outcome.dir(),
                n_before: hit.n_before,
                n_after: hit.n_after,
                event,
            });
            events.push(event);
            dir = outcome.dir();
            seg_start = hit.point;
            pos = hit.point + dir.as_vec() * EPS_HIT;
        };

        let path = RayPath {
            wavelength,
            segments,
            events,
            terminal,
            final_dir: dir,
        };
        Ok((path, interactions))
    }

    /// Traces every ray a source emits: direction-major, then the white
    /// table order (longest wavelength first).
    pub fn trace_source(&self, source_id: &str, max_events: usize) -> Result<Vec<RayPath>, TraceError> {
        let source = self
            .world
            .scene
            .source(source_id)
            .ok_or_else(|| TraceError::UnknownId(source_id.to_string()))?;
        emit_source(source)
            .into_iter()
            .map(|r| self.trace_ray(r.origin, r.dir, r.wavelength, max_events))
            .collect()
    }

    /// Every source in document order.
    pub fn trace_all(&self, max_events: usize) -> Result<Vec<RayPath>, TraceError> {
        let mut out = Vec::new();
        for s in &self.world.scene.sources {
            out.extend(self.trace_source(&s.id, max_events)?);
        }
        Ok(out)
    }
}

fn segment(start: Vec2, end: Vec2, medium: &str) -> Segment {
    Segment {
        start,
        end,
        medium: medium.to_string(),
    }
}

pub fn nearest_boundary_hit(
    scene: &SceneDoc,
    origin: Vec2,
    dir: UnitVec2,
    wavelength: Wavelength,
) -> Result<Option<BoundaryHitOwned>, TraceError> {
    let tracer = Tracer::new(scene)?;
    Ok(tracer
        .nearest_boundary_hit(origin, dir, wavelength)
        .map(|h| BoundaryHitOwned {
            t: h.t,
            point: h.point,
            normal: h.normal,
            target: h.target,
            degenerate: h.degenerate,
            n_before: h.n_before,
            n_after: h.n_after,
        }))
}

/// [`BoundaryHit`] without borrowed medium names.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryHitOwned {
    pub t: f64,
    pub point: Vec2,
    pub normal: UnitVec2,
    pub target: HitTarget,
    pub degenerate: bool,
    pub n_before: f64,
    pub n_after: f64,
}

pub fn trace_ray(
    scene: &SceneDoc,
    origin: Vec2,
    dir: UnitVec2,
    wavelength: Wavelength,
    max_events: usize,
) -> Result<RayPath, TraceError> {
    Tracer::new(scene)?.trace_ray(origin, dir, wavelength, max_events)
}

pub fn trace_source(scene: &SceneDoc, source_id: &str, max_events: usize) -> Result<Vec<RayPath>, TraceError> {
    Tracer::new(scene)?.trace_source(source_id, max_events)
}

/// Direction from `from` towards `to`.
pub fn aim(from: Vec2, to: Vec2) -> UnitVec2 {
    normalize(to - from).expect("distinct points")
}
