//! Versioned JSON documents for scenes and traced paths.
//!
//! Every float is written with at most 12 significant digits so files are
//! byte-stable across platforms. [`quantize`] applies the same rounding to
//! in-memory values; a document built from quantized values serializes and
//! parses back to an equal value.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};
use thiserror::Error;

use crate::optics::Medium;
use crate::scene::{Bounds, Element, SceneDoc, Source};
use crate::tracer::RayPath;

pub const SCENE_VERSION: u64 = 1;
pub const TRACE_VERSION: u64 = 1;

pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported document version {0}")]
    UnsupportedVersion(u64),
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits. Negative zero
/// becomes zero.
pub fn quantize(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let q: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses");
    if q == 0.0 {
        0.0
    } else {
        q
    }
}

/// Shortest decimal text for `quantize(x)`.
pub fn format_number(x: f64) -> String {
    let q = quantize(x);
    if q.fract() == 0.0 && q.abs() < 1e15 {
        format!("{}", q as i64)
    } else {
        format!("{q}")
    }
}

fn canonicalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = quantize(n.as_f64().expect("f64 number"));
            Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(canonicalize).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, canonicalize(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("document types serialize");
    let mut s = serde_json::to_string_pretty(&canonicalize(v)).expect("values serialize");
    s.push('\n');
    s
}

#[derive(Deserialize)]
struct VersionProbe {
    version: u64,
}

fn parse_versioned<T: DeserializeOwned>(text: &str, supported: u64) -> Result<T, FormatError> {
    let probe: VersionProbe = serde_json::from_str(text)?;
    if probe.version != supported {
        return Err(FormatError::UnsupportedVersion(probe.version));
    }
    Ok(serde_json::from_str(text)?)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    version: u64,
    background: String,
    media: Vec<Medium>,
    elements: Vec<Element>,
    sources: Vec<Source>,
    bounds: Bounds,
}

pub fn scene_to_json(scene: &SceneDoc) -> String {
    to_canonical_json(&SceneFile {
        version: SCENE_VERSION,
        background: scene.background.clone(),
        media: scene.media.clone(),
        elements: scene.elements.clone(),
        sources: scene.sources.clone(),
        bounds: scene.bounds,
    })
}

/// Parses a scene document. Structural checks only; call
/// [`SceneDoc::validate`] for the scene invariants.
pub fn scene_from_json(text: &str) -> Result<SceneDoc, FormatError> {
    let f: SceneFile = parse_versioned(text, SCENE_VERSION)?;
    Ok(SceneDoc {
        background: f.background,
        media: f.media,
        elements: f.elements,
        sources: f.sources,
        bounds: f.bounds,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TraceFile {
    version: u64,
    paths: Vec<RayPath>,
}

pub fn trace_to_value(paths: &[RayPath]) -> Value {
    let v = serde_json::to_value(TraceFile {
        version: TRACE_VERSION,
        paths: paths.to_vec(),
    })
    .expect("paths serialize");
    canonicalize(v)
}

pub fn paths_to_json(paths: &[RayPath]) -> String {
    let mut s = serde_json::to_string_pretty(&trace_to_value(paths)).expect("values serialize");
    s.push('\n');
    s
}

pub fn paths_from_json(text: &str) -> Result<Vec<RayPath>, FormatError> {
    let f: TraceFile = parse_versioned(text, TRACE_VERSION)?;
    Ok(f.paths)
}

/// Rounds every coordinate, index and angle in a scene so it survives a
/// trip through its JSON form unchanged.
pub fn quantize_scene(scene: &SceneDoc) -> SceneDoc {
    let text = scene_to_json(scene);
    scene_from_json(&text).expect("canonical output parses")
}

/// Object with keys in insertion order, for small hand-built documents.
pub fn object<I, K>(entries: I) -> Value
where
    I: IntoIterator<Item = (K, Value)>,
    K: Into<String>,
{
    Value::Object(entries.into_iter().map(|(k, v)| (k.into(), v)).collect::<Map<_, _>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Polygon, Pose, Vec2};
    use crate::optics::{Material, Wavelength};
    use crate::scene::{Beam, Spectrum};

    fn sample() -> SceneDoc {
        SceneDoc {
            background: "air".into(),
            media: vec![Material::Air.medium(), Material::CrownGlass.medium()],
            elements: vec![Element {
                id: "prism".into(),
                medium: "crown_glass".into(),
                pose: Pose::new(Vec2::new(0.5, 0.25), 0.1),
                shape: Polygon::new(vec![
                    Vec2::new(0.0, 1.0),
                    Vec2::new(-0.866025403784, -0.5),
                    Vec2::new(0.866025403784, -0.5),
                ])
                .unwrap(),
            }],
            sources: vec![Source {
                id: "lamp".into(),
                pose: Pose::new(Vec2::new(-2.0, 0.0), 0.2),
                beam: Beam::Fan {
                    count: 3,
                    spread: 0.1,
                },
                spectrum: Spectrum::Mono {
                    wavelength: Wavelength::new(550.0).unwrap(),
                },
            }],
            bounds: Bounds::new(Vec2::new(-4.0, -4.0), Vec2::new(4.0, 4.0)),
        }
    }

    #[test]
    fn quantize_rounds_to_twelve_digits() {
        assert_eq!(format_number(std::f64::consts::PI), "3.14159265359");
        assert_eq!(quantize(-0.0), 0.0);
        assert_eq!(quantize(1e-20 / 3.0), 3.33333333333e-21);
        assert_eq!(format_number(2.0), "2");
        assert_eq!(format_number(-0.5), "-0.5");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
    }

    #[test]
    fn scene_field_names() {
        let text = scene_to_json(&sample());
        let v: Value = serde_json::from_str(&text).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["version", "background", "media", "elements", "sources", "bounds"]);
        assert_eq!(v["media"][1]["model"]["kind"], "cauchy");
        assert_eq!(v["media"][1]["model"]["b_nm2"], 4200.0);
        assert_eq!(v["elements"][0]["pose"]["rot_rad"], 0.1);
        assert_eq!(v["sources"][0]["beam"]["kind"], "fan");
        assert_eq!(v["sources"][0]["beam"]["spread_rad"], 0.1);
        assert_eq!(v["sources"][0]["spectrum"]["lambda_nm"], 550.0);
        assert_eq!(v["elements"][0]["vertices"][0], serde_json::json!([0.0, 1.0]));
    }

    #[test]
    fn scene_round_trip() {
        let s = sample();
        let text = scene_to_json(&s);
        assert_eq!(scene_from_json(&text).unwrap(), s);
        assert_eq!(scene_to_json(&scene_from_json(&text).unwrap()), text);
    }

    #[test]
    fn parse_errors() {
        let text = scene_to_json(&sample());
        let truncated = &text[..text.len() / 2];
        assert!(matches!(
            scene_from_json(truncated),
            Err(FormatError::Parse { line, .. }) if line > 1
        ));
        let future = text.replacen("\"version\": 1", "\"version\": 999", 1);
        assert_eq!(scene_from_json(&future), Err(FormatError::UnsupportedVersion(999)));

        let extra = text.replacen("\"background\"", "\"colour\": 1,\n  \"background\"", 1);
        assert!(matches!(scene_from_json(&extra), Err(FormatError::Parse { .. })));

        let bad_beam = text.replacen("\"fan\"", "\"laser\"", 1);
        assert!(matches!(scene_from_json(&bad_beam), Err(FormatError::Parse { .. })));

        let mut v: Value = serde_json::from_str(&text).unwrap();
        v["elements"][0]["vertices"]
            .as_array_mut()
            .unwrap()
            .reverse();
        let cw = serde_json::to_string(&v).unwrap();
        assert!(matches!(scene_from_json(&cw), Err(FormatError::Parse { .. })));

        let bad_wavelength = text.replacen("\"lambda_nm\": 550.0", "\"lambda_nm\": 900.0", 1);
        assert!(matches!(scene_from_json(&bad_wavelength), Err(FormatError::Parse { .. })));
    }

    #[test]
    fn unknown_nested_fields_rejected() {
        let text = scene_to_json(&sample());
        let extra = text.replacen("\"rot_rad\"", "\"scale\": 2, \"rot_rad\"", 1);
        assert!(scene_from_json(&extra).is_err());
        let extra = text.replacen("\"b_nm2\"", "\"c\": 2, \"b_nm2\"", 1);
        assert!(scene_from_json(&extra).is_err());
        let extra = text.replacen("\"kind\": \"fan\"", "\"kind\": \"fan\", \"width\": 1", 1);
        assert!(scene_from_json(&extra).is_err());
    }
}
