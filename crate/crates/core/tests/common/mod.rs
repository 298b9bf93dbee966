#![allow(dead_code)]

use std::f64::consts::TAU;

use optics2d::format::quantize_scene;
use optics2d::geometry::{Polygon, Pose, Vec2};
use optics2d::optics::{Material, Medium, Wavelength};
use optics2d::scene::{Beam, Bounds, Element, SceneDoc, Source, Spectrum};
use rand::Rng;

/// Winding number of `poly` around `p`, by summing the signed angles each
/// edge subtends.
pub fn winding_number(p: Vec2, poly: &Polygon) -> i32 {
    let total: f64 = poly
        .edges()
        .map(|(a, b)| {
            let (u, v) = (a - p, b - p);
            u.cross(v).atan2(u.dot(v))
        })
        .sum();
    (total / TAU).round() as i32
}

pub fn distance_to_boundary(p: Vec2, poly: &Polygon) -> f64 {
    poly.edges()
        .map(|(a, b)| optics2d::geometry::point_segment_distance(p, a, b))
        .fold(f64::INFINITY, f64::min)
}

/// Star-shaped polygon around the origin: sorted random angles, random
/// radii. Simple and counter-clockwise by construction.
pub fn random_star<R: Rng>(rng: &mut R, max_vertices: usize) -> Option<Polygon> {
    let k = rng.gen_range(3..=max_vertices);
    let mut angles: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..TAU)).collect();
    angles.sort_by(f64::total_cmp);
    let vertices = angles
        .iter()
        .map(|&a| {
            let r = rng.gen_range(0.2..1.0);
            Vec2::new(r * a.cos(), r * a.sin())
        })
        .collect();
    Polygon::new(vertices).ok()
}

pub fn regular(k: usize, radius: f64) -> Polygon {
    Polygon::new(
        (0..k)
            .map(|i| {
                let a = TAU * i as f64 / k as f64;
                Vec2::new(radius * a.cos(), radius * a.sin())
            })
            .collect(),
    )
    .unwrap()
}

const CELL: f64 = 4.0;
const GRID: usize = 3;

fn random_medium<R: Rng>(rng: &mut R, media: &[Medium]) -> String {
    media[rng.gen_range(0..media.len())].name.clone()
}

/// A valid, quantized scene: up to nine regular polygons on a grid, some
/// with a smaller one nested inside, plus one to three sources.
pub fn random_scene<R: Rng>(rng: &mut R) -> SceneDoc {
    loop {
        let mut media: Vec<Medium> = Material::ALL.iter().map(|m| m.medium()).collect();
        media.push(Medium::constant("oil", rng.gen_range(1.3..1.7)));
        let background = if rng.gen_bool(0.8) { "air" } else { "water" }.to_string();
        let mut elements = Vec::new();
        for cx in 0..GRID {
            for cy in 0..GRID {
                if !rng.gen_bool(0.7) {
                    continue;
                }
                let k = rng.gen_range(3..=8);
                let r = rng.gen_range(0.8..1.8);
                let slack = CELL / 2.0 - r - 0.1;
                let centre = Vec2::new(
                    CELL * (cx as f64 + 0.5) + rng.gen_range(-slack..=slack),
                    CELL * (cy as f64 + 0.5) + rng.gen_range(-slack..=slack),
                );
                let rot = rng.gen_range(0.0..TAU);
                elements.push(Element {
                    id: format!("e{cx}{cy}"),
                    medium: random_medium(rng, &media),
                    pose: Pose::new(centre, rot),
                    shape: regular(k, r),
                });
                if rng.gen_bool(0.4) {
                    let jitter = Vec2::new(rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05)) * r;
                    elements.push(Element {
                        id: format!("n{cx}{cy}"),
                        medium: random_medium(rng, &media),
                        pose: Pose::new(centre + jitter, rng.gen_range(0.0..TAU)),
                        shape: regular(rng.gen_range(3..=8), 0.4 * r),
                    });
                }
            }
        }
        let extent = CELL * GRID as f64;
        let sources = (0..rng.gen_range(1..=3))
            .map(|i| Source {
                id: format!("s{i}"),
                pose: Pose::new(
                    Vec2::new(rng.gen_range(0.1..extent - 0.1), rng.gen_range(0.1..extent - 0.1)),
                    rng.gen_range(0.0..TAU),
                ),
                beam: if rng.gen_bool(0.5) {
                    Beam::Single
                } else {
                    Beam::Fan {
                        count: rng.gen_range(2..=8),
                        spread: rng.gen_range(0.01..0.7),
                    }
                },
                spectrum: if rng.gen_bool(0.5) {
                    Spectrum::White
                } else {
                    Spectrum::Mono {
                        wavelength: Wavelength::new(rng.gen_range(380.0..=780.0)).unwrap(),
                    }
                },
            })
            .collect();
        let scene = quantize_scene(&SceneDoc {
            background,
            media,
            elements,
            sources,
            bounds: Bounds::new(Vec2::ZERO, Vec2::new(extent, extent)),
        });
        if scene.validate().is_ok() {
            return scene;
        }
    }
}

/// Medium at `p` found by checking every element with the winding-number
/// oracle and keeping the smallest container.
pub fn brute_force_medium(scene: &SceneDoc, p: Vec2) -> String {
    scene
        .elements
        .iter()
        .map(|e| (e, e.world_polygon()))
        .filter(|(_, poly)| winding_number(p, poly) != 0)
        .min_by(|a, b| a.1.area().total_cmp(&b.1.area()))
        .map_or_else(|| scene.background.clone(), |(e, _)| e.medium.clone())
}
