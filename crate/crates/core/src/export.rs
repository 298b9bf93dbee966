//! SVG figures and CSV tables.
//!
//! Output is a pure function of the input: the same scene, paths and style
//! always give the same bytes. Scene coordinates are y-up; SVG is y-down,
//! so every y is written negated and the view box spans `[-max_y, -min_y]`.

use std::fmt::Write as _;

use crate::format::format_number;
use crate::optics::{Wavelength, COLOR_NAMES, WHITE_LIGHT_NM};
use crate::scenarios::{ScatterSweep, SpreadSweep};
use crate::scene::SceneDoc;
use crate::tracer::RayPath;

/// Colours and stroke widths for figures.
#[derive(Debug, Clone, PartialEq)]
pub struct StyleMap {
    /// One colour per entry of the white-light table, same order.
    pub ray_colors: [&'static str; 7],
    pub ray_width: f64,
    pub outline_width: f64,
    pub outline: &'static str,
    pub background: &'static str,
    /// Fill per medium name; others use `default_fill`.
    pub fills: Vec<(&'static str, &'static str)>,
    pub default_fill: &'static str,
}

impl Default for StyleMap {
    fn default() -> Self {
        StyleMap {
            ray_colors: ["#e41a1c", "#ff7f00", "#e6c200", "#2ca02c", "#1f4fff", "#4b0082", "#8f00ff"],
            ray_width: 0.02,
            outline_width: 0.01,
            outline: "#555555",
            background: "#ffffff",
            fills: vec![
                ("air", "#f2f6fa"),
                ("water", "#9ecae1"),
                ("glass", "#c7e9e4"),
                ("crown_glass", "#c7e9e4"),
                ("flint_glass", "#a9cfd8"),
            ],
            default_fill: "#dddddd",
        }
    }
}

impl StyleMap {
    /// Colour of the white-table entry nearest to `wavelength`.
    pub fn ray_color(&self, wavelength: Wavelength) -> &'static str {
        self.ray_colors[nearest_entry(wavelength.nm())]
    }

    pub fn fill(&self, medium: &str) -> &'static str {
        self.fills
            .iter()
            .find(|(m, _)| *m == medium)
            .map_or(self.default_fill, |(_, f)| f)
    }
}

fn nearest_entry(nm: f64) -> usize {
    (0..WHITE_LIGHT_NM.len())
        .min_by(|&a, &b| (WHITE_LIGHT_NM[a] - nm).abs().total_cmp(&(WHITE_LIGHT_NM[b] - nm).abs()))
        .expect("table is not empty")
}

/// Colour name of the white-table entry nearest to `wavelength`.
pub fn color_name(wavelength: Wavelength) -> &'static str {
    COLOR_NAMES[nearest_entry(wavelength.nm())]
}

fn n(x: f64) -> String {
    format_number(x)
}

fn points<I: IntoIterator<Item = (f64, f64)>>(pts: I) -> String {
    pts.into_iter()
        .map(|(x, y)| format!("{},{}", n(x), n(y)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn open_svg(out: &mut String, x: f64, y: f64, w: f64, h: f64) {
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{} {} {} {}\">",
        n(x),
        n(y),
        n(w),
        n(h)
    );
}

/// Scene figure: the bounds as a background rectangle, one filled polygon
/// per element (larger ones first, so nested elements stay visible), and
/// one polyline per path in its wavelength's colour.
pub fn to_svg(scene: &SceneDoc, paths: &[RayPath], style: &StyleMap) -> String {
    let b = &scene.bounds;
    let mut out = String::new();
    open_svg(&mut out, b.min_x, -b.max_y, b.width(), b.height());
    let _ = writeln!(
        out,
        "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"none\"/>",
        n(b.min_x),
        n(-b.max_y),
        n(b.width()),
        n(b.height()),
        style.background
    );
    let mut elements: Vec<_> = scene.elements.iter().map(|e| (e, e.world_polygon())).collect();
    elements.sort_by(|a, b| b.1.area().total_cmp(&a.1.area()));
    for (e, poly) in elements {
        let _ = writeln!(
            out,
            "  <polygon points=\"{}\" fill=\"{}\" stroke=\"{}\" stroke-width=\"{}\"/>",
            points(poly.vertices().iter().map(|v| (v.x, -v.y))),
            style.fill(&e.medium),
            style.outline,
            n(style.outline_width)
        );
    }
    for path in paths {
        let _ = writeln!(
            out,
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"/>",
            points(path.vertices().iter().map(|v| (v.x, -v.y))),
            style.ray_color(path.wavelength),
            n(style.ray_width)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn opt_deg(x: Option<f64>) -> String {
    x.map(|v| n(v.to_degrees())).unwrap_or_default()
}

/// Prism sweep table, angles in degrees, one row per incidence. Exit
/// columns hold the deviation of each colour and are empty when it does
/// not leave.
pub fn sweep_csv(sweep: &SpreadSweep) -> String {
    let mut out = String::from("incidence_deg");
    for nm in WHITE_LIGHT_NM {
        let _ = write!(out, ",exit_{nm}");
    }
    out.push_str(",spread_deg,cones\n");
    for row in &sweep.rows {
        out.push_str(&n(row.incidence.to_degrees()));
        for e in row.exits {
            out.push(',');
            out.push_str(&opt_deg(e));
        }
        let _ = writeln!(out, ",{},{}", opt_deg(row.spread()), row.cones());
    }
    out
}

/// Pendant orientation table: per colour the exit face and the exit
/// direction (degrees from +x), then the largest separation.
pub fn scatter_csv(sweep: &ScatterSweep) -> String {
    let mut out = String::from("orientation_deg");
    for nm in WHITE_LIGHT_NM {
        let _ = write!(out, ",face_{nm},exit_{nm}");
    }
    out.push_str(",separation_deg\n");
    for row in &sweep.rows {
        out.push_str(&n(row.orientation.to_degrees()));
        for e in &row.exits {
            match e {
                Some(e) => {
                    let _ = write!(out, ",{},{}", e.face, n(e.dir.angle().to_degrees()));
                }
                None => out.push_str(",,"),
            }
        }
        let _ = writeln!(out, ",{}", opt_deg(row.separation));
    }
    out
}

/// Underwater visibility limit for each wall index.
pub fn visibility_csv(rows: &[(f64, Option<f64>)]) -> String {
    let mut out = String::from("glass_n,cutoff_deg\n");
    for (glass_n, cutoff) in rows {
        let _ = writeln!(out, "{},{}", n(*glass_n), opt_deg(*cutoff));
    }
    out
}

const PLOT_W: f64 = 600.0;
const PLOT_H: f64 = 400.0;
const MARGIN: f64 = 40.0;

/// Chart of a prism sweep: the red-to-violet spread in black and each
/// colour's deviation in its own colour, against incidence. All curves
/// share one vertical axis in degrees.
pub fn sweep_svg(sweep: &SpreadSweep, style: &StyleMap) -> String {
    let xs: Vec<f64> = sweep.rows.iter().map(|r| r.incidence.to_degrees()).collect();
    let ys: Vec<f64> = sweep
        .rows
        .iter()
        .flat_map(|r| r.exits.iter().flatten().copied().chain(r.spread()))
        .map(f64::to_degrees)
        .collect();
    let range = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo.is_finite() && hi > lo {
            (lo, hi)
        } else if lo.is_finite() {
            (lo - 1.0, lo + 1.0)
        } else {
            (0.0, 1.0)
        }
    };
    let (x0, x1) = range(&xs);
    let (y0, y1) = range(&ys);
    let (y0, y1) = (y0.min(0.0), y1);
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (PLOT_W - 2.0 * MARGIN);
    let sy = |y: f64| PLOT_H - MARGIN - (y - y0) / (y1 - y0) * (PLOT_H - 2.0 * MARGIN);

    let mut out = String::new();
    open_svg(&mut out, 0.0, 0.0, PLOT_W, PLOT_H);
    let _ = writeln!(
        out,
        "  <rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"none\"/>",
        n(PLOT_W),
        n(PLOT_H),
        style.background
    );
    let (l, r, t, btm) = (MARGIN, PLOT_W - MARGIN, MARGIN, PLOT_H - MARGIN);
    let _ = writeln!(
        out,
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1\"/>",
        points([(l, t), (l, btm), (r, btm)]),
        style.outline
    );

    // Runs of consecutive rows where the value exists become one polyline.
    let mut curve = |value: &dyn Fn(usize) -> Option<f64>, color: &str, width: f64| {
        let mut run: Vec<(f64, f64)> = Vec::new();
        let mut flush = |run: &mut Vec<(f64, f64)>| {
            if run.len() >= 2 {
                let _ = writeln!(
                    out,
                    "  <polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"/>",
                    points(run.iter().copied()),
                    color,
                    n(width)
                );
            }
            run.clear();
        };
        for (i, &x) in xs.iter().enumerate() {
            match value(i) {
                Some(y) => run.push((sx(x), sy(y.to_degrees()))),
                None => flush(&mut run),
            }
        }
        flush(&mut run);
    };
    for k in 0..WHITE_LIGHT_NM.len() {
        curve(&|i| sweep.rows[i].exits[k], style.ray_colors[k], 1.0);
    }
    curve(&|i| sweep.rows[i].spread(), "#000000", 2.0);
    out.push_str("</svg>\n");
    out
}
