//! Named scenarios with typed, range-checked parameters.
//!
//! The CLI and the HTTP service both build scenes through [`instantiate`],
//! so the same name and parameters give byte-identical scene files. Angles
//! are given in degrees here; the builders take radians.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::geometry::{Pose, Vec2};
use crate::optics::{IndexModel, Material, Wavelength};
use crate::scene::{SceneDoc, Spectrum};

use super::{
    glass_plate, oceanarium, pendant, regular_prism, GlassPlateParams, OceanariumParams, PendantParams,
    RegularPrismParams, ScenarioError,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamKind {
    Number,
    Integer,
    Choice,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamDescriptor {
    pub name: &'static str,
    pub kind: ParamKind,
    pub default: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    /// Whether `min` itself is excluded.
    pub exclusive_min: bool,
    /// Whether `max` itself is excluded.
    pub exclusive_max: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub options: Vec<&'static str>,
    pub description: &'static str,
}

impl ParamDescriptor {
    fn number(name: &'static str, default: f64, description: &'static str) -> Self {
        ParamDescriptor {
            name,
            kind: ParamKind::Number,
            default: Value::from(default),
            min: None,
            max: None,
            exclusive_min: false,
            exclusive_max: false,
            options: Vec::new(),
            description,
        }
    }

    fn integer(name: &'static str, default: u64, min: u64, max: u64, description: &'static str) -> Self {
        ParamDescriptor {
            kind: ParamKind::Integer,
            default: Value::from(default),
            min: Some(min as f64),
            max: Some(max as f64),
            ..Self::number(name, 0.0, description)
        }
    }

    fn choice(name: &'static str, default: &'static str, options: Vec<&'static str>, description: &'static str) -> Self {
        ParamDescriptor {
            kind: ParamKind::Choice,
            default: Value::from(default),
            options,
            ..Self::number(name, 0.0, description)
        }
    }

    fn min(mut self, min: f64, exclusive: bool) -> Self {
        self.min = Some(min);
        self.exclusive_min = exclusive;
        self
    }

    fn max(mut self, max: f64, exclusive: bool) -> Self {
        self.max = Some(max);
        self.exclusive_max = exclusive;
        self
    }

    fn check(&self, value: &Value) -> Result<(), String> {
        match self.kind {
            ParamKind::Choice => {
                let s = value.as_str().ok_or("expected a string")?;
                if !self.options.contains(&s) {
                    return Err(format!("expected one of {}", self.options.join(", ")));
                }
                return Ok(());
            }
            ParamKind::Integer => {
                if value.as_u64().is_none() && value.as_f64().is_none_or(|x| x.fract() != 0.0 || x < 0.0) {
                    return Err("expected a non-negative integer".into());
                }
            }
            ParamKind::Number => {}
        }
        let x = value.as_f64().ok_or("expected a number")?;
        if !x.is_finite() {
            return Err("expected a finite number".into());
        }
        if let Some(min) = self.min {
            if x < min || (self.exclusive_min && x == min) {
                let op = if self.exclusive_min { ">" } else { ">=" };
                return Err(format!("must be {op} {min}"));
            }
        }
        if let Some(max) = self.max {
            if x > max || (self.exclusive_max && x == max) {
                let op = if self.exclusive_max { "<" } else { "<=" };
                return Err(format!("must be {op} {max}"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioDescriptor {
    pub name: &'static str,
    pub description: &'static str,
    pub parameters: Vec<ParamDescriptor>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstantiateError {
    #[error("unknown scenario {0:?}")]
    UnknownScenario(String),
    #[error("invalid parameters: {}", describe(.0))]
    InvalidParameters(BTreeMap<String, String>),
}

fn describe(errors: &BTreeMap<String, String>) -> String {
    errors
        .iter()
        .map(|(k, v)| format!("{k}: {v}"))
        .collect::<Vec<_>>()
        .join("; ")
}

pub const SCENARIO_NAMES: [&str; 4] = ["oceanarium", "glass_plate", "regular_prism", "pendant"];

fn spectrum_params(default: &'static str) -> [ParamDescriptor; 2] {
    [
        ParamDescriptor::choice("spectrum", default, vec!["mono", "white"], "single wavelength or the white table"),
        ParamDescriptor::number("wavelength_nm", 550.0, "wavelength when spectrum is mono")
            .min(380.0, false)
            .max(780.0, false),
    ]
}

fn material_keys() -> Vec<&'static str> {
    Material::ALL.iter().map(|m| m.key()).collect()
}

fn angle(name: &'static str, default: f64, description: &'static str) -> ParamDescriptor {
    ParamDescriptor::number(name, default, description)
        .min(-90.0, true)
        .max(90.0, true)
}

pub fn describe_scenario(name: &str) -> Option<ScenarioDescriptor> {
    let (name, description, parameters) = match name {
        "oceanarium" => (
            "oceanarium",
            "glass wall of a partly filled water tank, seen from the air outside",
            [
                vec![
                    ParamDescriptor::number("wall_thickness", 0.1, "thickness of the glass wall").min(0.0, true),
                    ParamDescriptor::number("tank_width", 6.0, "inner width of the tank").min(0.0, true),
                    ParamDescriptor::number("tank_height", 3.0, "height of wall and tank").min(0.0, true),
                    ParamDescriptor::number("water_level", 0.5, "filled fraction of the tank height")
                        .min(0.0, true)
                        .max(1.0, false),
                    ParamDescriptor::number("glass_n", 1.5, "refractive index of the wall").min(1.0, false),
                    ParamDescriptor::number("water_n", 1.33, "refractive index of the water").min(1.0, false),
                    ParamDescriptor::number("flashlight_x", -1.0, "flashlight position, x"),
                    ParamDescriptor::number("flashlight_y", 2.0, "flashlight position, y"),
                    ParamDescriptor::number("heading_deg", -45.0, "flashlight heading from +x"),
                ],
                spectrum_params("mono").to_vec(),
            ]
            .concat(),
        ),
        "glass_plate" => (
            "glass_plate",
            "parallel-sided plate in air",
            [
                vec![
                    ParamDescriptor::number("thickness", 1.0, "plate thickness").min(0.0, true),
                    ParamDescriptor::number("n", 1.5, "refractive index").min(1.0, false),
                    angle("incidence_deg", 30.0, "angle of the ray from the plate normal"),
                ],
                spectrum_params("mono").to_vec(),
            ]
            .concat(),
        ),
        "regular_prism" => (
            "regular_prism",
            "regular k-gon prism lit at its first face",
            [
                vec![
                    ParamDescriptor::integer("k", 3, 3, 360, "number of sides"),
                    ParamDescriptor::number("radius", 1.0, "circumradius").min(0.0, true),
                    ParamDescriptor::choice("material", "crown", material_keys(), "prism material"),
                    ParamDescriptor::number("orientation_deg", 0.0, "rotation about the centre"),
                    angle("incidence_deg", 50.0, "angle of the ray at the first face"),
                ],
                spectrum_params("white").to_vec(),
            ]
            .concat(),
        ),
        "pendant" => (
            "pendant",
            "regular k-gon crystal lit by a horizontal ray",
            [
                vec![
                    ParamDescriptor::integer("k", 6, 4, 360, "number of sides"),
                    ParamDescriptor::number("radius", 1.0, "circumradius").min(0.0, true),
                    ParamDescriptor::choice("material", "flint", material_keys(), "crystal material"),
                    ParamDescriptor::number(
                        "orientation_deg",
                        super::DEFAULT_PENDANT_ORIENTATION_DEG,
                        "rotation about the centre",
                    ),
                    ParamDescriptor::number("offset", super::DEFAULT_PENDANT_OFFSET, "ray height in circumradii")
                        .min(-1.0, true)
                        .max(1.0, true),
                ],
                spectrum_params("white").to_vec(),
            ]
            .concat(),
        ),
        _ => return None,
    };
    Some(ScenarioDescriptor {
        name,
        description,
        parameters,
    })
}

pub fn scenarios() -> Vec<ScenarioDescriptor> {
    SCENARIO_NAMES
        .iter()
        .map(|n| describe_scenario(n).expect("registered"))
        .collect()
}

/// Checked parameter values with defaults filled in.
struct Values(Map<String, Value>);

impl Values {
    fn f(&self, name: &str) -> f64 {
        self.0[name].as_f64().expect("checked number")
    }

    fn u(&self, name: &str) -> usize {
        self.f(name) as usize
    }

    fn s(&self, name: &str) -> &str {
        self.0[name].as_str().expect("checked string")
    }

    fn material(&self) -> Material {
        Material::from_key(self.s("material")).expect("checked choice")
    }

    fn spectrum(&self) -> Spectrum {
        match self.s("spectrum") {
            "white" => Spectrum::White,
            _ => Spectrum::Mono {
                wavelength: Wavelength::new(self.f("wavelength_nm")).expect("checked range"),
            },
        }
    }
}

/// Builds the named scenario. Missing parameters take their defaults;
/// unknown or out-of-range ones are reported per field.
pub fn instantiate(name: &str, params: &Map<String, Value>) -> Result<SceneDoc, InstantiateError> {
    let desc = describe_scenario(name).ok_or_else(|| InstantiateError::UnknownScenario(name.to_string()))?;
    let mut errors = BTreeMap::new();
    for key in params.keys() {
        if !desc.parameters.iter().any(|p| p.name == key) {
            errors.insert(key.clone(), "unknown parameter".to_string());
        }
    }
    let mut values = Map::new();
    for p in &desc.parameters {
        let v = params.get(p.name).unwrap_or(&p.default);
        match p.check(v) {
            Ok(()) => {
                values.insert(p.name.to_string(), v.clone());
            }
            Err(e) => {
                errors.insert(p.name.to_string(), e);
            }
        }
    }
    if !errors.is_empty() {
        return Err(InstantiateError::InvalidParameters(errors));
    }
    let v = Values(values);
    let built = match desc.name {
        "oceanarium" => oceanarium(&OceanariumParams {
            wall_thickness: v.f("wall_thickness"),
            tank_width: v.f("tank_width"),
            tank_height: v.f("tank_height"),
            water_level: v.f("water_level"),
            glass: IndexModel::Constant { n: v.f("glass_n") },
            water: IndexModel::Constant { n: v.f("water_n") },
            flashlight: Pose::new(
                Vec2::new(v.f("flashlight_x"), v.f("flashlight_y")),
                v.f("heading_deg").to_radians(),
            ),
            spectrum: v.spectrum(),
        }),
        "glass_plate" => glass_plate(&GlassPlateParams {
            thickness: v.f("thickness"),
            n: v.f("n"),
            incidence: v.f("incidence_deg").to_radians(),
            spectrum: v.spectrum(),
        }),
        "regular_prism" => regular_prism(&RegularPrismParams {
            sides: v.u("k"),
            radius: v.f("radius"),
            material: v.material().medium(),
            orientation: v.f("orientation_deg").to_radians(),
            incidence: v.f("incidence_deg").to_radians(),
            spectrum: v.spectrum(),
        }),
        _ => pendant(&PendantParams {
            sides: v.u("k"),
            radius: v.f("radius"),
            material: v.material().medium(),
            orientation: v.f("orientation_deg").to_radians(),
            offset: v.f("offset"),
            spectrum: v.spectrum(),
        }),
    };
    built.map_err(|e| {
        let field = match &e {
            ScenarioError::InvalidParameter { name, .. } => name.to_string(),
            _ => "scene".to_string(),
        };
        InstantiateError::InvalidParameters(BTreeMap::from([(field, e.to_string())]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::scene_to_json;
    use crate::scenarios::{GlassPlateParams, OceanariumParams, PendantParams, RegularPrismParams};
    use serde_json::json;

    fn params(v: Value) -> Map<String, Value> {
        v.as_object().unwrap().clone()
    }

    #[test]
    fn defaults_match_builders() {
        let empty = Map::new();
        assert_eq!(
            instantiate("oceanarium", &empty).unwrap(),
            oceanarium(&OceanariumParams::default()).unwrap()
        );
        assert_eq!(
            instantiate("glass_plate", &empty).unwrap(),
            glass_plate(&GlassPlateParams::default()).unwrap()
        );
        assert_eq!(
            instantiate("regular_prism", &empty).unwrap(),
            regular_prism(&RegularPrismParams::default()).unwrap()
        );
        assert_eq!(
            instantiate("pendant", &empty).unwrap(),
            pendant(&PendantParams::default()).unwrap()
        );
    }

    #[test]
    fn parameters_apply() {
        let s = instantiate("regular_prism", &params(json!({"k": 5, "material": "flint"}))).unwrap();
        assert_eq!(s.elements[0].shape.len(), 5);
        assert_eq!(s.elements[0].medium, "flint_glass");
        let a = scene_to_json(&instantiate("glass_plate", &params(json!({"thickness": 2}))).unwrap());
        let b = scene_to_json(&instantiate("glass_plate", &params(json!({"thickness": 2.0}))).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn errors_are_per_field() {
        assert_eq!(
            instantiate("rainbow", &Map::new()),
            Err(InstantiateError::UnknownScenario("rainbow".into()))
        );
        let err = instantiate(
            "regular_prism",
            &params(json!({"k": 2, "material": "diamond", "colour": 1, "radius": "big"})),
        )
        .unwrap_err();
        let InstantiateError::InvalidParameters(fields) = err else {
            panic!("{err:?}")
        };
        let keys: Vec<&str> = fields.keys().map(String::as_str).collect();
        assert_eq!(keys, ["colour", "k", "material", "radius"]);
        assert_eq!(fields["k"], "must be >= 3");

        let err = instantiate("glass_plate", &params(json!({"thickness": 0}))).unwrap_err();
        assert!(err.to_string().contains("thickness"));
        let err = instantiate("regular_prism", &params(json!({"k": 3.5}))).unwrap_err();
        assert!(err.to_string().contains("integer"));
    }

    #[test]
    fn builder_rejections_surface_as_fields() {
        // Passes the range checks but puts the flashlight outside the world.
        let err = instantiate("oceanarium", &params(json!({"flashlight_x": -50}))).unwrap_err();
        let InstantiateError::InvalidParameters(fields) = err else {
            panic!()
        };
        assert!(fields.contains_key("scene"));
    }

    #[test]
    fn descriptors_serialize() {
        let v = serde_json::to_value(scenarios()).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 4);
        assert_eq!(v[2]["name"], "regular_prism");
        assert_eq!(v[2]["parameters"][0]["name"], "k");
        assert_eq!(v[2]["parameters"][0]["kind"], "integer");
        assert_eq!(v[2]["parameters"][0]["min"], 3.0);
        assert_eq!(v[2]["parameters"][2]["options"], json!(["air", "water", "window", "crown", "flint"]));
    }
}
