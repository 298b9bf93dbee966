//! Analyses that trace many rays through a builder's scene.

use std::f64::consts::FRAC_PI_2;

use crate::geometry::{point_in_polygon, point_segment_distance, Containment, Polygon, UnitVec2, Vec2};
use crate::optics::{white_light, Wavelength};
use crate::scene::SceneDoc;
use crate::tracer::{PathEvent, RayPath, Tracer, DEFAULT_MAX_EVENTS};

use super::{face_entry_ray, pendant, regular_prism, PendantParams, RegularPrismParams, ScenarioError};

/// Bisection stops once the bracket is this narrow (radians).
pub const CUTOFF_TOLERANCE: f64 = 1e-6;

/// Bisection tolerance for the underwater visibility limit (radians).
pub const VISIBILITY_TOLERANCE: f64 = 1e-4;

/// Angle of minimum deviation for a prism with apex angle `apex` and
/// index `n`, both in radians.
pub fn min_deviation_angle(apex: f64, n: f64) -> Result<f64, ScenarioError> {
    let s = n * (apex / 2.0).sin();
    if s > 1.0 {
        return Err(ScenarioError::NoTransmission(s));
    }
    Ok(2.0 * s.asin() - apex)
}

fn angle_between(a: UnitVec2, b: UnitVec2) -> f64 {
    a.cross(b).abs().atan2(a.dot(b))
}

/// One incidence angle of a prism sweep. Angles in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub incidence: f64,
    /// Deviation of each white-table colour that leaves through a second
    /// face right after entering, `None` when it does not.
    pub exits: [Option<f64>; 7],
}

impl SweepRow {
    /// Number of colours that leave the prism.
    pub fn cones(&self) -> usize {
        self.exits.iter().flatten().count()
    }

    /// Largest minus smallest deviation among the leaving colours, when at
    /// least two leave.
    pub fn spread(&self) -> Option<f64> {
        if self.cones() < 2 {
            return None;
        }
        let mut it = self.exits.iter().flatten();
        let first = *it.next()?;
        let (lo, hi) = it.fold((first, first), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        Some(hi - lo)
    }

    pub fn mean_deviation(&self) -> Option<f64> {
        let n = self.cones();
        (n > 0).then(|| self.exits.iter().flatten().sum::<f64>() / n as f64)
    }
}

/// Where one colour stops leaving the prism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub wavelength: Wavelength,
    /// Last incidence at which the colour still leaves.
    pub exiting: f64,
    /// First incidence at which it no longer does.
    pub blocked: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpreadSweep {
    /// Sorted by incidence; includes the rows added around each cutoff.
    pub rows: Vec<SweepRow>,
    pub cutoffs: Vec<Cutoff>,
}

impl SpreadSweep {
    pub fn max_spread(&self) -> Option<f64> {
        self.rows.iter().filter_map(SweepRow::spread).reduce(f64::max)
    }
}

struct PrismProbe<'a> {
    tracer: Tracer<'a>,
    shape: Polygon,
    radius: f64,
}

impl PrismProbe<'_> {
    fn deviation(&self, wavelength: Wavelength, incidence: f64) -> Option<f64> {
        let (origin, dir) = face_entry_ray(&self.shape, 0, incidence, 2.0 * self.radius);
        let (path, interactions) = self
            .tracer
            .trace_ray_detailed(origin, dir, wavelength, DEFAULT_MAX_EVENTS)
            .ok()?;
        match path.events.as_slice() {
            [PathEvent::Refracted, PathEvent::Refracted, ..] => Some(angle_between(dir, interactions[1].outgoing)),
            _ => None,
        }
    }

    fn row(&self, incidence: f64) -> SweepRow {
        let table = white_light();
        SweepRow {
            incidence,
            exits: std::array::from_fn(|i| self.deviation(table[i], incidence)),
        }
    }
}

/// Traces the white table through face 0 of a prism at incidences from
/// `from` to `to` (radians, inclusive) in steps of `step`.
///
/// Wherever a colour starts or stops leaving between two rows, the change
/// is bisected to [`CUTOFF_TOLERANCE`] and both bracketing rows are added.
pub fn spread_sweep(prism: &RegularPrismParams, from: f64, to: f64, step: f64) -> Result<SpreadSweep, ScenarioError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(ScenarioError::InvalidParameter {
            name: "step",
            message: "must be positive".into(),
        });
    }
    if !(from.abs() < FRAC_PI_2 && to.abs() < FRAC_PI_2 && from <= to) {
        return Err(ScenarioError::InvalidParameter {
            name: "range",
            message: "incidences must satisfy -90° < from <= to < 90°".into(),
        });
    }
    let scene = regular_prism(prism)?;
    let probe = PrismProbe {
        tracer: Tracer::new(&scene).map_err(|_| ScenarioError::MissingElement("prism"))?,
        shape: scene.elements[0].world_polygon(),
        radius: prism.radius,
    };

    let count = ((to - from) / step + 1e-9).floor() as usize;
    let mut rows: Vec<SweepRow> = (0..=count).map(|i| probe.row(from + step * i as f64)).collect();
    if rows.last().is_some_and(|r| r.incidence < to - 1e-12) {
        rows.push(probe.row(to));
    }

    let table = white_light();
    let mut cutoffs = Vec::new();
    let mut extra = Vec::new();
    for pair in rows.windows(2) {
        for (k, &wavelength) in table.iter().enumerate() {
            let lo_exits = pair[0].exits[k].is_some();
            if lo_exits == pair[1].exits[k].is_some() {
                continue;
            }
            let (mut lo, mut hi) = (pair[0].incidence, pair[1].incidence);
            while hi - lo > CUTOFF_TOLERANCE {
                let mid = 0.5 * (lo + hi);
                if probe.deviation(wavelength, mid).is_some() == lo_exits {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let (exiting, blocked) = if lo_exits { (lo, hi) } else { (hi, lo) };
            cutoffs.push(Cutoff {
                wavelength,
                exiting,
                blocked,
            });
            extra.push(probe.row(lo));
            extra.push(probe.row(hi));
        }
    }
    rows.extend(extra);
    rows.sort_by(|a, b| a.incidence.total_cmp(&b.incidence));
    rows.dedup_by(|a, b| a.incidence == b.incidence);
    cutoffs.sort_by(|a, b| a.exiting.total_cmp(&b.exiting));
    Ok(SpreadSweep { rows, cutoffs })
}

/// Incidence below which a colour of index `n` cannot leave a prism of
/// apex angle `apex` through the second face. `None` if it always leaves
/// for incidences up to grazing.
pub fn exit_cutoff_incidence(apex: f64, n: f64) -> Option<f64> {
    let s = n * (apex - (1.0 / n).asin()).sin();
    (s.abs() <= 1.0).then(|| s.asin())
}

fn element_polygon(scene: &SceneDoc, id: &'static str) -> Result<Polygon, ScenarioError> {
    scene
        .element(id)
        .map(|e| e.world_polygon())
        .ok_or(ScenarioError::MissingElement(id))
}

fn x_extent(poly: &Polygon) -> (f64, f64) {
    poly.vertices()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v.x), hi.max(v.x)))
}

/// Wavelength used for single rays in the oceanarium analyses.
fn probe_wavelength() -> Wavelength {
    Wavelength::new(550.0).expect("visible")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Look {
    /// Crosses the wall and leaves into the visitor side.
    Exits,
    /// Reflected totally at the wall.
    Blocked,
    /// Misses the wall's water-side face, or is stopped by something
    /// other than reflection.
    Elsewhere,
}

struct Oceanarium<'a> {
    tracer: Tracer<'a>,
    wall: Polygon,
    face_x: f64,
    outside_x: f64,
}

impl<'a> Oceanarium<'a> {
    fn new(scene: &'a SceneDoc, eye: Vec2) -> Result<Self, ScenarioError> {
        let wall = element_polygon(scene, "wall")?;
        let water = scene.element("water").ok_or(ScenarioError::MissingElement("water"))?;
        let tracer = Tracer::new(scene).map_err(|_| ScenarioError::MissingElement("water"))?;
        let inside = point_in_polygon(eye, &water.world_polygon()) == Containment::Inside
            && scene.resolve_medium(eye).ok() == Some(water.medium.as_str())
            && scene.bounds.contains_strictly(eye);
        if !inside {
            return Err(ScenarioError::BadEyePoint(eye));
        }
        let (outside_x, face_x) = x_extent(&wall);
        Ok(Oceanarium {
            tracer,
            wall,
            face_x,
            outside_x,
        })
    }

    fn trace(&self, eye: Vec2, dir: UnitVec2) -> RayPath {
        self.tracer
            .trace_ray(eye, dir, probe_wavelength(), DEFAULT_MAX_EVENTS)
            .expect("eye was checked to be inside the water")
    }

    fn hits_wall_face_first(&self, path: &RayPath) -> bool {
        path.internal_vertices().first().is_some_and(|p| {
            (p.x - self.face_x).abs() <= 1e-7
                && self
                    .wall
                    .edges()
                    .any(|(a, b)| a.x == self.face_x && b.x == self.face_x && point_segment_distance(*p, a, b) <= 1e-7)
        })
    }

    fn look(&self, eye: Vec2, theta: f64) -> Look {
        let path = self.trace(eye, UnitVec2::from_angle(std::f64::consts::PI + theta));
        if !self.hits_wall_face_first(&path) {
            Look::Elsewhere
        } else if path.terminal == PathEvent::ExitedBounds
            && path.final_medium() == self.tracer.scene().background
            && path.end().x < self.outside_x
        {
            Look::Exits
        } else if path.events.contains(&PathEvent::TotalInternalReflection) {
            Look::Blocked
        } else {
            Look::Elsewhere
        }
    }
}

/// The steepest downward look angle (radians below horizontal, towards the
/// wall) at which an eye in the water still sees out through the wall.
///
/// Angles are scanned upward from 0 in 0.1° steps and the first change
/// from seeing out to not seeing out is bisected to
/// [`VISIBILITY_TOLERANCE`]. `None` when no such change exists, for
/// example when the tank holds no water that bends the light.
pub fn visibility_cutoff(scene: &SceneDoc, eye: Vec2) -> Result<Option<f64>, ScenarioError> {
    let tank = Oceanarium::new(scene, eye)?;
    let step = 0.1f64.to_radians();
    let mut last_exit = None;
    for i in 0..900 {
        let theta = step * i as f64;
        match tank.look(eye, theta) {
            Look::Exits => last_exit = Some(theta),
            Look::Elsewhere => return Ok(None),
            Look::Blocked => {
                let Some(mut lo) = last_exit else {
                    return Ok(None);
                };
                let mut hi = theta;
                while hi - lo > VISIBILITY_TOLERANCE {
                    let mid = 0.5 * (lo + hi);
                    if tank.look(eye, mid) == Look::Exits {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Ok(Some(0.5 * (lo + hi)));
            }
        }
    }
    Ok(None)
}

/// Eye position used by [`visibility_cutoff`] callers that have no
/// preference: just inside the water, next to the wall, below the surface.
pub fn default_eye(scene: &SceneDoc) -> Result<Vec2, ScenarioError> {
    let (_, face_x) = x_extent(&element_polygon(scene, "wall")?);
    let water = element_polygon(scene, "water")?;
    let top = water.vertices().iter().fold(f64::NEG_INFINITY, |m, v| m.max(v.y));
    Ok(Vec2::new(face_x + 0.05, top - 0.1))
}

/// How a ray from an eye in the water towards the wall continues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    /// Water into the glass, glass out into the air outside.
    ExitToAir,
    /// Water into the glass, reflected totally, back into the water, and on
    /// to the world bounds.
    TirReturn,
    /// Reflected totally in the glass, followed by at least two more
    /// events.
    TirThenMore,
    Other,
}

/// Classifies a path from [`underwater_route`].
pub fn classify_route(path: &RayPath, background: &str) -> Route {
    let t: Vec<_> = path.transitions().collect();
    let Some(&(PathEvent::Refracted, "water", glass)) = t.first() else {
        return Route::Other;
    };
    match t.iter().position(|e| e.0 == PathEvent::TotalInternalReflection) {
        None => {
            let out = t.len() == 2 && t[1] == (PathEvent::Refracted, glass, background);
            if out && path.terminal == PathEvent::ExitedBounds && path.final_medium() == background {
                Route::ExitToAir
            } else {
                Route::Other
            }
        }
        Some(i) => match t.len() - i - 1 {
            0 => Route::Other,
            1 if t[i + 1] == (PathEvent::Refracted, glass, "water")
                && path.terminal == PathEvent::ExitedBounds =>
            {
                Route::TirReturn
            }
            1 => Route::Other,
            _ => Route::TirThenMore,
        },
    }
}

/// Traces from `eye` towards the wall at `look` radians above horizontal
/// (negative looks down).
pub fn underwater_route(scene: &SceneDoc, eye: Vec2, look: f64) -> Result<(RayPath, Route), ScenarioError> {
    let tank = Oceanarium::new(scene, eye)?;
    let path = tank.trace(eye, UnitVec2::from_angle(std::f64::consts::PI - look));
    let route = classify_route(&path, &scene.background);
    Ok((path, route))
}

/// Where one colour leaves a pendant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceExit {
    /// Index of the face in the pendant's vertex order.
    pub face: usize,
    pub dir: UnitVec2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterRow {
    /// Pendant rotation, radians.
    pub orientation: f64,
    pub exits: [Option<FaceExit>; 7],
    /// Largest angle between two colours that leave through different
    /// faces, if any do.
    pub separation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterSweep {
    pub rows: Vec<ScatterRow>,
    /// Index into `rows` of the largest separation above
    /// [`SCATTER_THRESHOLD`].
    pub best: Option<usize>,
}

impl ScatterSweep {
    pub fn best_row(&self) -> Option<&ScatterRow> {
        self.best.map(|i| &self.rows[i])
    }
}

/// Separation, radians, a pendant must reach to count as scattering the
/// colours apart.
pub const SCATTER_THRESHOLD: f64 = 30.0 * std::f64::consts::PI / 180.0;

fn face_exit(path: &RayPath, shape: &Polygon, crystal: &str, background: &str) -> Option<FaceExit> {
    if path.terminal != PathEvent::ExitedBounds || path.final_medium() != background {
        return None;
    }
    let (i, _) = path
        .transitions()
        .enumerate()
        .filter(|(_, (e, before, after))| *e == PathEvent::Refracted && *before == crystal && *after == background)
        .last()?;
    let point = path.segments[i + 1].start;
    let face = (0..shape.len())
        .min_by(|&a, &b| {
            let (a0, a1) = shape.edge(a);
            let (b0, b1) = shape.edge(b);
            point_segment_distance(point, a0, a1).total_cmp(&point_segment_distance(point, b0, b1))
        })
        .expect("polygon has faces");
    Some(FaceExit {
        face,
        dir: path.final_dir,
    })
}

/// Rotates a pendant from `from` to `to` (radians, inclusive) in steps of
/// `step` and records the exit face and direction of each white-table
/// colour.
pub fn pendant_scatter(params: &PendantParams, from: f64, to: f64, step: f64) -> Result<ScatterSweep, ScenarioError> {
    if !(step.is_finite() && step > 0.0 && from <= to) {
        return Err(ScenarioError::InvalidParameter {
            name: "step",
            message: "must be positive with from <= to".into(),
        });
    }
    let count = ((to - from) / step + 1e-9).floor() as usize;
    let mut rows = Vec::with_capacity(count + 1);
    for i in 0..=count {
        let orientation = from + step * i as f64;
        let scene = pendant(&PendantParams {
            orientation,
            ..params.clone()
        })?;
        let tracer = Tracer::new(&scene).map_err(|e| match e {
            crate::tracer::TraceError::SceneInvalid(v) => ScenarioError::InvalidScene(v),
            _ => ScenarioError::MissingElement("prism"),
        })?;
        let element = &scene.elements[0];
        let shape = element.world_polygon();
        let paths = tracer
            .trace_all(DEFAULT_MAX_EVENTS)
            .expect("builder places the sun inside the bounds");
        let exits: [Option<FaceExit>; 7] = std::array::from_fn(|k| {
            paths
                .get(k)
                .and_then(|p| face_exit(p, &shape, &element.medium, &scene.background))
        });
        let mut separation: Option<f64> = None;
        for (a, ea) in exits.iter().enumerate() {
            for eb in &exits[a + 1..] {
                if let (Some(x), Some(y)) = (ea, eb) {
                    if x.face != y.face {
                        let s = angle_between(x.dir, y.dir);
                        separation = Some(separation.map_or(s, |m| m.max(s)));
                    }
                }
            }
        }
        rows.push(ScatterRow {
            orientation,
            exits,
            separation,
        });
    }
    let best = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.separation.is_some_and(|s| s > SCATTER_THRESHOLD))
        .max_by(|a, b| a.1.separation.unwrap().total_cmp(&b.1.separation.unwrap()))
        .map(|(i, _)| i);
    Ok(ScatterSweep { rows, best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{IndexModel, Material, Medium};
    use crate::scenarios::{oceanarium, OceanariumParams};

    fn deg(x: f64) -> f64 {
        x.to_radians()
    }

    #[test]
    fn min_deviation_closed_form() {
        let d = min_deviation_angle(deg(60.0), 1.5).unwrap();
        assert!((d.to_degrees() - 37.180_756).abs() < 1e-5);
        assert_eq!(min_deviation_angle(deg(60.0), 1.0).unwrap(), 0.0);
        let thin = min_deviation_angle(deg(10.0), 1.5).unwrap().to_degrees();
        assert!((thin - 5.025).abs() < 2e-3 && (thin - 5.0).abs() < 0.03);
        assert!(matches!(
            min_deviation_angle(deg(90.0), 1.5),
            Err(ScenarioError::NoTransmission(_))
        ));
    }

    #[test]
    fn sweep_finds_minimum_deviation() {
        let prism = RegularPrismParams {
            material: Medium::constant("glass", 1.5),
            ..Default::default()
        };
        let sweep = spread_sweep(&prism, deg(30.0), deg(70.0), deg(0.05)).unwrap();
        let best = sweep
            .rows
            .iter()
            .filter_map(SweepRow::mean_deviation)
            .reduce(f64::min)
            .unwrap();
        let expected = min_deviation_angle(deg(60.0), 1.5).unwrap();
        assert!((best - expected).abs() < 1e-3);
        // A constant index gives no spread.
        assert!(sweep.max_spread().unwrap() < 1e-12);
    }

    #[test]
    fn crown_cutoffs_match_closed_form() {
        let sweep = spread_sweep(&RegularPrismParams::default(), deg(20.0), deg(60.0), deg(1.0)).unwrap();
        assert_eq!(sweep.cutoffs.len(), 7);
        for c in &sweep.cutoffs {
            let n = Material::CrownGlass.model().index_at(c.wavelength);
            let expected = exit_cutoff_incidence(deg(60.0), n).unwrap();
            assert!((c.exiting - c.blocked).abs() <= CUTOFF_TOLERANCE);
            assert!((c.exiting - expected).abs() <= 2.0 * CUTOFF_TOLERANCE, "{c:?} vs {expected}");
        }
        // Near the cutoffs fewer than seven colours leave, and fewer still
        // as the incidence drops.
        assert!(sweep.rows.iter().any(|r| r.cones() > 0 && r.cones() < 7));
        assert_eq!(sweep.rows.last().unwrap().cones(), 7);
        for w in sweep.rows.windows(2) {
            assert!(w[0].cones() <= w[1].cones());
            assert_eq!(w[0].spread().is_some(), w[0].cones() >= 2);
        }
    }

    #[test]
    fn flint_spread_near_ten_degrees() {
        let prism = RegularPrismParams {
            material: Material::FlintGlass.medium(),
            ..Default::default()
        };
        let sweep = spread_sweep(&prism, deg(30.0), deg(85.0), deg(0.5)).unwrap();
        let violet = sweep.cutoffs.iter().find(|c| c.wavelength.nm() == 410.0).unwrap();
        let found = sweep.rows.iter().any(|r| {
            r.incidence < violet.blocked && r.spread().is_some_and(|s| (deg(8.0)..=deg(12.0)).contains(&s))
        });
        assert!(found);
    }

    #[test]
    fn pendant_scatters_colours() {
        let sweep = pendant_scatter(&PendantParams::default(), 0.0, deg(60.0), deg(1.0)).unwrap();
        let best = sweep.best_row().unwrap();
        assert!(best.separation.unwrap() > SCATTER_THRESHOLD);
        let faces: std::collections::BTreeSet<usize> = best.exits.iter().flatten().map(|e| e.face).collect();
        assert!(faces.len() >= 2);

        // The default orientation is one of the scattering ones.
        let d = PendantParams::default().orientation;
        let here = pendant_scatter(&PendantParams::default(), d, d, 1.0).unwrap();
        assert!(here.best.is_some());

        let plain = PendantParams {
            material: Medium::constant("glass", 1.6),
            ..Default::default()
        };
        let sweep = pendant_scatter(&plain, 0.0, deg(60.0), deg(2.0)).unwrap();
        assert!(sweep.best.is_none());
        for row in &sweep.rows {
            let exits: Vec<_> = row.exits.iter().flatten().collect();
            for e in &exits {
                assert_eq!(e.face, exits[0].face);
                assert!(angle_between(e.dir, exits[0].dir) < 1e-9);
            }
        }
    }

    #[test]
    fn oceanarium_visibility() {
        let scene = oceanarium(&OceanariumParams::default()).unwrap();
        let eye = default_eye(&scene).unwrap();
        let cutoff = visibility_cutoff(&scene, eye).unwrap().unwrap();
        let expected = (1.0f64 / 1.33).asin();
        assert!((cutoff - expected).abs() < deg(0.01), "{}", cutoff.to_degrees());

        let dry = OceanariumParams {
            water: IndexModel::Constant { n: 1.0 },
            ..Default::default()
        };
        let scene = oceanarium(&dry).unwrap();
        assert_eq!(visibility_cutoff(&scene, eye).unwrap(), None);

        for n in [1.4, 1.6, 1.7] {
            let p = OceanariumParams {
                glass: IndexModel::Constant { n },
                ..Default::default()
            };
            let scene = oceanarium(&p).unwrap();
            let c = visibility_cutoff(&scene, eye).unwrap().unwrap();
            assert!((c - expected).abs() < deg(0.01));
        }

        assert!(matches!(
            visibility_cutoff(&scene, Vec2::new(3.0, 2.5)),
            Err(ScenarioError::BadEyePoint(_))
        ));
    }

    #[test]
    fn underwater_routes() {
        let scene = oceanarium(&OceanariumParams::default()).unwrap();
        let route = |x: f64, y: f64, a: f64| underwater_route(&scene, Vec2::new(x, y), deg(a)).unwrap().1;
        assert_eq!(route(0.6, 0.75, 20.0), Route::ExitToAir);
        assert_eq!(route(0.6, 0.75, -20.0), Route::ExitToAir);
        // Beyond the critical angle the outer glass face reflects. Looking
        // down, the ray comes back into the water and runs to the floor;
        // looking up, it comes back and then leaves through the surface.
        assert_eq!(route(0.6, 1.2, -52.0), Route::TirReturn);
        assert_eq!(route(0.6, 0.5, 52.0), Route::TirThenMore);
    }
}
