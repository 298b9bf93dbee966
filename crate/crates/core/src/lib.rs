//! Deterministic 2D geometric optics.
//!
//! Scenes are made of polygonal optical elements (glass, water, ...) with
//! movable poses, and flashlights emitting single rays or fans of mono or
//! white light. The tracer follows each ray through the scene, refracting
//! by Snell's law, reflecting totally past the critical angle, and splitting
//! white light by wavelength-dependent index.
//!
//! ```
//! use optics2d::scenarios::{glass_plate, GlassPlateParams};
//! use optics2d::tracer::{Tracer, PathEvent, DEFAULT_MAX_EVENTS};
//!
//! let scene = glass_plate(&GlassPlateParams::default()).unwrap();
//! let paths = Tracer::new(&scene).unwrap().trace_all(DEFAULT_MAX_EVENTS).unwrap();
//! assert_eq!(paths[0].segments.len(), 3);
//! assert_eq!(paths[0].terminal, PathEvent::ExitedBounds);
//! ```

pub mod export;
pub mod format;
pub mod geometry;
pub mod optics;
pub mod scenarios;
pub mod scene;
pub mod tracer;

pub use geometry::{normalize, Polygon, Pose, UnitVec2, Vec2};
pub use optics::{Material, Medium, Wavelength};
pub use scene::SceneDoc;
pub use tracer::{PathEvent, RayPath, Tracer};

/// The guide's chapters, compiled so their Rust snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/geometry.md")]
    struct Geometry;
    #[doc = include_str!("../../../book/src/refraction.md")]
    struct Refraction;
    #[doc = include_str!("../../../book/src/scenes.md")]
    struct Scenes;
    #[doc = include_str!("../../../book/src/tracing.md")]
    struct Tracing;
    #[doc = include_str!("../../../book/src/scenarios.md")]
    struct Scenarios;
    #[doc = include_str!("../../../book/src/files.md")]
    struct Files;
}
