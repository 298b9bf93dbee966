//! Builders for the canonical scenes and the analyses run on them.
//!
//! * [`oceanarium`]: a glass wall with water on one side, filled part way.
//! * [`glass_plate`]: a parallel-sided plate in air.
//! * [`regular_prism`]: a regular k-gon prism, the triangle by default.
//! * [`pendant`]: a regular k-gon (k ≥ 4) crystal lit by a horizontal ray.
//!
//! Builders are deterministic and quantize every number to the precision of
//! the JSON format, so a built scene and its parsed file are equal.

use std::f64::consts::{FRAC_PI_2, TAU};

use thiserror::Error;

use crate::format::{quantize, quantize_scene};
use crate::geometry::{apply_pose, Polygon, Pose, UnitVec2, Vec2};
use crate::optics::{incident_direction, IndexModel, Material, Medium, Wavelength};
use crate::scene::{join_violations, Beam, Bounds, Element, SceneDoc, Source, Spectrum, Violation};

pub mod registry;
mod sweeps;

pub use sweeps::*;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },
    #[error("built scene is invalid: {}", join_violations(.0))]
    InvalidScene(Vec<Violation>),
    #[error("no ray is transmitted: n·sin(A/2) = {0} exceeds 1")]
    NoTransmission(f64),
    #[error("eye point {0} is not inside the water")]
    BadEyePoint(Vec2),
    #[error("scene has no element {0:?}")]
    MissingElement(&'static str),
}

fn require(ok: bool, name: &'static str, message: &str) -> Result<(), ScenarioError> {
    if ok {
        Ok(())
    } else {
        Err(ScenarioError::InvalidParameter {
            name,
            message: message.to_string(),
        })
    }
}

fn positive(value: f64, name: &'static str) -> Result<(), ScenarioError> {
    require(value.is_finite() && value > 0.0, name, "must be positive")
}

fn finish(scene: SceneDoc) -> Result<SceneDoc, ScenarioError> {
    let scene = quantize_scene(&scene);
    scene.validate().map_err(ScenarioError::InvalidScene)?;
    Ok(scene)
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Polygon {
    Polygon::new(vec![
        Vec2::new(x0, y0),
        Vec2::new(x1, y0),
        Vec2::new(x1, y1),
        Vec2::new(x0, y1),
    ])
    .expect("positive-size rectangle")
}

fn mono(nm: f64) -> Spectrum {
    Spectrum::Mono {
        wavelength: Wavelength::new(nm).expect("visible wavelength"),
    }
}

/// The flashlight spectrum used when none is given.
pub fn default_mono() -> Spectrum {
    mono(550.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OceanariumParams {
    pub wall_thickness: f64,
    pub tank_width: f64,
    pub tank_height: f64,
    /// Fraction of the tank height filled with water, in (0, 1].
    pub water_level: f64,
    pub glass: IndexModel,
    pub water: IndexModel,
    pub flashlight: Pose,
    pub spectrum: Spectrum,
}

impl Default for OceanariumParams {
    fn default() -> Self {
        OceanariumParams {
            wall_thickness: 0.1,
            tank_width: 6.0,
            tank_height: 3.0,
            water_level: 0.5,
            glass: Material::WindowGlass.model(),
            water: Material::Water.model(),
            flashlight: Pose::new(Vec2::new(-1.0, 2.0), (-45f64).to_radians()),
            spectrum: default_mono(),
        }
    }
}

/// Glass wall standing on the floor at `x ∈ [0, wall]`, visitors in air to
/// the left, and the tank to the right: an air-filled interior `"tank"`
/// containing the nested `"water"` body up to the water level.
///
/// The floor and the far side of the tank coincide with the world bounds.
/// A full tank has no `"tank"` element, since it would coincide with the
/// water.
pub fn oceanarium(p: &OceanariumParams) -> Result<SceneDoc, ScenarioError> {
    positive(p.wall_thickness, "wall_thickness")?;
    positive(p.tank_width, "tank_width")?;
    positive(p.tank_height, "tank_height")?;
    require(
        p.water_level > 0.0 && p.water_level <= 1.0,
        "water_level",
        "must be in (0, 1]",
    )?;
    let (t, w, h) = (p.wall_thickness, p.tank_width, p.tank_height);
    let level = p.water_level * h;
    let element = |id: &str, medium: &str, shape| Element {
        id: id.into(),
        medium: medium.into(),
        pose: Pose::IDENTITY,
        shape,
    };
    finish(SceneDoc {
        background: "air".into(),
        media: vec![
            Material::Air.medium(),
            Medium::new("glass", p.glass),
            Medium::new("water", p.water),
        ],
        elements: [
            Some(element("wall", "glass", rect(0.0, 0.0, t, h))),
            (level < h).then(|| element("tank", "air", rect(t, 0.0, t + w, h))),
            Some(element("water", "water", rect(t, 0.0, t + w, level))),
        ]
        .into_iter()
        .flatten()
        .collect(),
        sources: vec![Source {
            id: "flashlight".into(),
            pose: p.flashlight,
            beam: Beam::Single,
            spectrum: p.spectrum,
        }],
        bounds: Bounds::new(Vec2::new(-w / 2.0, 0.0), Vec2::new(t + w, h + 1.0)),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlassPlateParams {
    pub thickness: f64,
    pub n: f64,
    /// Angle of the flashlight ray from the plate normal, radians.
    pub incidence: f64,
    pub spectrum: Spectrum,
}

impl Default for GlassPlateParams {
    fn default() -> Self {
        GlassPlateParams {
            thickness: 1.0,
            n: 1.5,
            incidence: 30f64.to_radians(),
            spectrum: default_mono(),
        }
    }
}

/// Smallest plate height. Steep rays through thick plates get a taller
/// one, so the ray always leaves through the far face.
pub const PLATE_HEIGHT: f64 = 10.0;

/// A vertical plate `x ∈ [0, thickness]` in air. The flashlight sits one
/// unit in front of the plate's centre and points at it.
pub fn glass_plate(p: &GlassPlateParams) -> Result<SceneDoc, ScenarioError> {
    positive(p.thickness, "thickness")?;
    require(p.n.is_finite() && p.n >= 1.0, "n", "must be at least 1")?;
    require(
        p.incidence.abs() < FRAC_PI_2,
        "incidence",
        "must be strictly between -90° and 90°",
    )?;
    let inside = (p.incidence.sin() / p.n).asin();
    let half = (PLATE_HEIGHT / 2.0).max((p.thickness * inside.tan().abs() + 1.0).ceil());
    let dir = UnitVec2::from_angle(p.incidence);
    finish(SceneDoc {
        background: "air".into(),
        media: vec![Material::Air.medium(), Medium::constant("glass", p.n)],
        elements: vec![Element {
            id: "plate".into(),
            medium: "glass".into(),
            pose: Pose::IDENTITY,
            shape: rect(0.0, -half, p.thickness, half),
        }],
        sources: vec![Source {
            id: "flashlight".into(),
            pose: Pose::new(-dir.as_vec(), p.incidence),
            beam: Beam::Single,
            spectrum: p.spectrum,
        }],
        bounds: Bounds::new(
            Vec2::new(-half, -half - 1.0),
            Vec2::new(p.thickness + half, half + 1.0),
        ),
    })
}

/// Vertices of a regular k-gon with circumradius `radius`, vertex 0 at the
/// top, counter-clockwise.
pub fn regular_polygon(sides: usize, radius: f64) -> Polygon {
    let vertices = (0..sides)
        .map(|i| {
            let a = FRAC_PI_2 + TAU * i as f64 / sides as f64;
            Vec2::new(quantize(radius * a.cos()), quantize(radius * a.sin()))
        })
        .collect();
    Polygon::new(vertices).expect("regular polygon is simple and counter-clockwise")
}

/// Start point and direction of a ray that reaches the midpoint of `face`
/// at angle `incidence` from the inward normal, travelling `distance` first.
///
/// Positive incidence tilts the ray towards the face's first vertex, which
/// for [`regular_polygon`] face 0 is the apex.
pub fn face_entry_ray(poly: &Polygon, face: usize, incidence: f64, distance: f64) -> (Vec2, UnitVec2) {
    let (a, b) = poly.edge(face);
    let mid = (a + b) * 0.5;
    let dir = incident_direction(poly.outward_normal(face), incidence, a - b);
    (mid - dir.as_vec() * distance, dir)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegularPrismParams {
    pub sides: usize,
    pub radius: f64,
    pub material: Medium,
    /// Rotation of the prism about its centre, radians.
    pub orientation: f64,
    /// Angle of the light at the entry face (face 0), radians.
    pub incidence: f64,
    pub spectrum: Spectrum,
}

impl Default for RegularPrismParams {
    fn default() -> Self {
        RegularPrismParams {
            sides: 3,
            radius: 1.0,
            material: Material::CrownGlass.medium(),
            orientation: 0.0,
            incidence: 50f64.to_radians(),
            spectrum: Spectrum::White,
        }
    }
}

/// Bounds half-size in units of the circumradius.
const PRISM_WORLD: f64 = 4.0;

/// A regular k-gon element `"prism"` centred at the origin, in air, with a
/// sun ray aimed at face 0.
pub fn regular_prism(p: &RegularPrismParams) -> Result<SceneDoc, ScenarioError> {
    require(p.sides >= 3, "sides", "a prism needs at least 3 sides")?;
    positive(p.radius, "radius")?;
    require(
        p.incidence.abs() < FRAC_PI_2,
        "incidence",
        "must be strictly between -90° and 90°",
    )?;
    let shape = regular_polygon(p.sides, p.radius);
    let pose = Pose::new(Vec2::ZERO, p.orientation);
    let (origin, dir) = face_entry_ray(&apply_pose(&pose, &shape), 0, p.incidence, 2.0 * p.radius);
    prism_scene(p.radius, &p.material, shape, pose, origin, dir.angle(), p.spectrum)
}

fn prism_scene(
    radius: f64,
    material: &Medium,
    shape: Polygon,
    pose: Pose,
    sun: Vec2,
    heading: f64,
    spectrum: Spectrum,
) -> Result<SceneDoc, ScenarioError> {
    let mut media = vec![Material::Air.medium()];
    if material.name != "air" {
        media.push(material.clone());
    }
    let r = PRISM_WORLD * radius;
    finish(SceneDoc {
        background: "air".into(),
        media,
        elements: vec![Element {
            id: "prism".into(),
            medium: material.name.clone(),
            pose,
            shape,
        }],
        sources: vec![Source {
            id: "sun".into(),
            pose: Pose::new(sun, heading),
            beam: Beam::Single,
            spectrum,
        }],
        bounds: Bounds::new(Vec2::new(-r, -r), Vec2::new(r, r)),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PendantParams {
    pub sides: usize,
    pub radius: f64,
    pub material: Medium,
    pub orientation: f64,
    /// Height of the horizontal sun ray above the centre, in circumradii.
    pub offset: f64,
    pub spectrum: Spectrum,
}

impl Default for PendantParams {
    fn default() -> Self {
        PendantParams {
            sides: 6,
            radius: 1.0,
            material: Material::FlintGlass.medium(),
            orientation: DEFAULT_PENDANT_ORIENTATION_DEG.to_radians(),
            offset: DEFAULT_PENDANT_OFFSET,
            spectrum: Spectrum::White,
        }
    }
}

pub const DEFAULT_PENDANT_OFFSET: f64 = 0.5;

/// An orientation of the default hexagon at which the colours leave through
/// different faces (found by [`pendant_scatter`]).
pub const DEFAULT_PENDANT_ORIENTATION_DEG: f64 = 20.0;

/// A regular k-gon crystal (k ≥ 4) lit by a horizontal sun ray from the
/// left at height `offset · radius`.
pub fn pendant(p: &PendantParams) -> Result<SceneDoc, ScenarioError> {
    require(p.sides >= 4, "sides", "a pendant needs at least 4 sides")?;
    positive(p.radius, "radius")?;
    require(p.offset.abs() < 1.0, "offset", "must be in (-1, 1)")?;
    let shape = regular_polygon(p.sides, p.radius);
    let pose = Pose::new(Vec2::ZERO, p.orientation);
    let sun = Vec2::new(-(PRISM_WORLD - 1.0) * p.radius, p.offset * p.radius);
    prism_scene(p.radius, &p.material, shape, pose, sun, 0.0, p.spectrum)
}
