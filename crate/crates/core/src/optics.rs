//! Refractive-index models and the boundary kernel: Snell refraction,
//! total internal reflection and the grazing case between them.
//!
//! # Normal convention
//!
//! Every kernel function takes the boundary normal pointing *into the
//! incident medium*, i.e. against the travelling direction (`d · n < 0`).
//! The tracer is responsible for orienting it; violations are reported as
//! [`OpticsError::BadNormalOrientation`] instead of being silently flipped.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{normalize, UnitVec2, Vec2};

/// Band around `sin²θ₂ = 1` that is classified as grazing.
pub const EPS_GRAZE: f64 = 1e-12;

pub const MIN_WAVELENGTH_NM: f64 = 380.0;
pub const MAX_WAVELENGTH_NM: f64 = 780.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpticsError {
    #[error("normal must point against the incident direction (d·n = {0})")]
    BadNormalOrientation(f64),
    #[error("refractive index {0} is not a finite value >= 1")]
    BadIndex(f64),
    #[error("wavelength {0} nm is outside [380, 780] nm")]
    WavelengthOutOfRange(f64),
}

/// A visible wavelength in nanometres.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Wavelength(f64);

impl Wavelength {
    pub fn new(nm: f64) -> Result<Wavelength, OpticsError> {
        if (MIN_WAVELENGTH_NM..=MAX_WAVELENGTH_NM).contains(&nm) {
            Ok(Wavelength(nm))
        } else {
            Err(OpticsError::WavelengthOutOfRange(nm))
        }
    }

    pub fn nm(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Wavelength {
    type Error = OpticsError;
    fn try_from(nm: f64) -> Result<Self, Self::Error> {
        Wavelength::new(nm)
    }
}

impl From<Wavelength> for f64 {
    fn from(w: Wavelength) -> f64 {
        w.0
    }
}

impl fmt::Display for Wavelength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} nm", self.0)
    }
}

/// The seven spectral lines standing in for white light, red to violet.
pub const WHITE_LIGHT_NM: [f64; 7] = [650.0, 610.0, 580.0, 550.0, 470.0, 440.0, 410.0];

pub const COLOR_NAMES: [&str; 7] = ["red", "orange", "yellow", "green", "blue", "indigo", "violet"];

pub fn white_light() -> [Wavelength; 7] {
    WHITE_LIGHT_NM.map(Wavelength)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum IndexModel {
    Constant { n: f64 },
    /// `n(λ) = a + b / λ²` with `b` in nm².
    Cauchy { a: f64, b_nm2: f64 },
}

impl IndexModel {
    pub fn index_at(&self, wavelength: Wavelength) -> f64 {
        match *self {
            IndexModel::Constant { n } => n,
            IndexModel::Cauchy { a, b_nm2 } => a + b_nm2 / (wavelength.nm() * wavelength.nm()),
        }
    }

    pub fn is_dispersive(&self) -> bool {
        matches!(*self, IndexModel::Cauchy { b_nm2, .. } if b_nm2 > 0.0)
    }

    /// Describes why the model is unphysical, if it is.
    pub fn check(&self) -> Result<(), String> {
        match *self {
            IndexModel::Constant { n } if !(n.is_finite() && n >= 1.0) => {
                Err(format!("constant index {n} must be >= 1"))
            }
            IndexModel::Cauchy { a, .. } if !(a.is_finite() && a >= 1.0) => {
                Err(format!("cauchy coefficient a = {a} must be >= 1"))
            }
            IndexModel::Cauchy { b_nm2, .. } if !(b_nm2.is_finite() && b_nm2 >= 0.0) => {
                Err(format!("cauchy coefficient b = {b_nm2} nm² must be >= 0"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Medium {
    pub name: String,
    pub model: IndexModel,
}

impl Medium {
    pub fn new(name: impl Into<String>, model: IndexModel) -> Medium {
        Medium {
            name: name.into(),
            model,
        }
    }

    pub fn constant(name: impl Into<String>, n: f64) -> Medium {
        Medium::new(name, IndexModel::Constant { n })
    }

    pub fn cauchy(name: impl Into<String>, a: f64, b_nm2: f64) -> Medium {
        Medium::new(name, IndexModel::Cauchy { a, b_nm2 })
    }

    pub fn index_at(&self, wavelength: Wavelength) -> f64 {
        self.model.index_at(wavelength)
    }
}

/// Refractive index of `medium` at `wavelength`.
pub fn index_at(medium: &Medium, wavelength: Wavelength) -> f64 {
    medium.index_at(wavelength)
}

/// The stock materials. Indices are ordinary textbook values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Material {
    Air,
    Water,
    WindowGlass,
    CrownGlass,
    FlintGlass,
}

impl Material {
    pub const ALL: [Material; 5] = [
        Material::Air,
        Material::Water,
        Material::WindowGlass,
        Material::CrownGlass,
        Material::FlintGlass,
    ];

    /// Short name used on the command line and in scenario parameters.
    pub fn key(self) -> &'static str {
        match self {
            Material::Air => "air",
            Material::Water => "water",
            Material::WindowGlass => "window",
            Material::CrownGlass => "crown",
            Material::FlintGlass => "flint",
        }
    }

    pub fn from_key(key: &str) -> Option<Material> {
        Material::ALL.into_iter().find(|m| m.key() == key)
    }

    /// Name of the medium entry in a scene's media table.
    pub fn medium_name(self) -> &'static str {
        match self {
            Material::Air => "air",
            Material::Water => "water",
            Material::WindowGlass => "glass",
            Material::CrownGlass => "crown_glass",
            Material::FlintGlass => "flint_glass",
        }
    }

    pub fn model(self) -> IndexModel {
        match self {
            Material::Air => IndexModel::Constant { n: 1.0 },
            Material::Water => IndexModel::Constant { n: 1.33 },
            Material::WindowGlass => IndexModel::Constant { n: 1.5 },
            Material::CrownGlass => IndexModel::Cauchy {
                a: 1.5046,
                b_nm2: 4200.0,
            },
            Material::FlintGlass => IndexModel::Cauchy {
                a: 1.62,
                b_nm2: 10400.0,
            },
        }
    }

    pub fn medium(self) -> Medium {
        Medium::new(self.medium_name(), self.model())
    }
}

/// What happens to a ray meeting a boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefractionOutcome {
    Refracted { dir: UnitVec2 },
    TotalInternal { dir: UnitVec2 },
    /// Exactly at the critical angle: the transmitted ray would run along
    /// the surface. `dir` is that tangent.
    Grazing { dir: UnitVec2 },
}

impl RefractionOutcome {
    pub fn dir(&self) -> UnitVec2 {
        match *self {
            RefractionOutcome::Refracted { dir }
            | RefractionOutcome::TotalInternal { dir }
            | RefractionOutcome::Grazing { dir } => dir,
        }
    }
}

fn check_orientation(d: UnitVec2, n: UnitVec2) -> Result<f64, OpticsError> {
    let dn = d.dot(n);
    if dn < 0.0 {
        Ok(dn)
    } else {
        Err(OpticsError::BadNormalOrientation(dn))
    }
}

fn check_index(n: f64) -> Result<(), OpticsError> {
    if n.is_finite() && n >= 1.0 {
        Ok(())
    } else {
        Err(OpticsError::BadIndex(n))
    }
}

/// Mirror reflection `d − 2(d·n)n`.
pub fn reflect(d: UnitVec2, n: UnitVec2) -> Result<UnitVec2, OpticsError> {
    let dn = check_orientation(d, n)?;
    let r = d.as_vec() - n.as_vec() * (2.0 * dn);
    Ok(normalize(r).expect("reflection of a unit vector is a unit vector"))
}

/// Applies Snell's law at a boundary between indices `n1` (incident side)
/// and `n2`, falling back to total internal reflection past the critical
/// angle.
pub fn refract_or_reflect(
    d: UnitVec2,
    n: UnitVec2,
    n1: f64,
    n2: f64,
) -> Result<RefractionOutcome, OpticsError> {
    check_index(n1)?;
    check_index(n2)?;
    let dn = check_orientation(d, n)?;
    let cos1 = -dn;
    let eta = n1 / n2;
    let sin2_sq = eta * eta * (1.0 - cos1 * cos1).max(0.0);

    if sin2_sq > 1.0 + EPS_GRAZE {
        return Ok(RefractionOutcome::TotalInternal {
            dir: reflect(d, n)?,
        });
    }
    if (sin2_sq - 1.0).abs() <= EPS_GRAZE {
        let tangent = d.as_vec() - n.as_vec() * dn;
        // At the critical angle the tangential part is never zero.
        let dir = normalize(tangent).map_err(|_| OpticsError::BadNormalOrientation(dn))?;
        return Ok(RefractionOutcome::Grazing { dir });
    }
    let cos2 = (1.0 - sin2_sq).sqrt();
    let t = d.as_vec() * eta + n.as_vec() * (eta * cos1 - cos2);
    Ok(RefractionOutcome::Refracted {
        dir: normalize(t).expect("refracted direction is unit length"),
    })
}

/// Onset angle of total internal reflection going from `n1` into `n2`.
/// `None` when the target is at least as dense, where TIR cannot occur.
pub fn critical_angle(n1: f64, n2: f64) -> Option<f64> {
    if n1 <= n2 {
        None
    } else {
        Some((n2 / n1).asin())
    }
}

/// Angle between a direction and the normal line, in `[0, π/2]`.
pub fn angle_from_normal(d: UnitVec2, n: UnitVec2) -> f64 {
    d.cross(n).abs().atan2(d.dot(n).abs())
}

/// Direction making angle `theta` with `-n` (i.e. pointing across the
/// boundary), rotated towards `tangent_side`.
pub fn incident_direction(n: UnitVec2, theta: f64, tangent_side: Vec2) -> UnitVec2 {
    let inward = -n;
    let mut perp = inward.perp();
    if perp.as_vec().dot(tangent_side) < 0.0 {
        perp = -perp;
    }
    let v = inward.as_vec() * theta.cos() + perp.as_vec() * theta.sin();
    normalize(v).expect("unit combination")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const UP: UnitVec2 = UnitVec2::Y;

    fn dir_at(theta_deg: f64) -> UnitVec2 {
        // Travelling downward onto a horizontal surface whose normal is +y.
        incident_direction(UP, theta_deg.to_radians(), Vec2::new(1.0, 0.0))
    }

    fn sin_from_normal(d: UnitVec2, n: UnitVec2) -> f64 {
        d.cross(n).abs()
    }

    #[test]
    fn index_examples() {
        let w = |nm| Wavelength::new(nm).unwrap();
        assert_eq!(Medium::constant("g", 1.5).index_at(w(500.0)), 1.5);
        let crown = Medium::cauchy("crown", 1.5046, 4200.0);
        // 1.5046 + 4200 / 650² and 1.5046 + 4200 / 410², by hand.
        assert!((crown.index_at(w(650.0)) - 1.514541).abs() < 5e-7);
        assert!((crown.index_at(w(410.0)) - 1.529585).abs() < 5e-7);
    }

    #[test]
    fn wavelength_range() {
        assert!(Wavelength::new(379.9).is_err());
        assert!(Wavelength::new(780.0).is_ok());
        assert!(Wavelength::new(f64::NAN).is_err());
    }

    #[test]
    fn model_checks() {
        assert!(IndexModel::Constant { n: 0.9 }.check().is_err());
        assert!(IndexModel::Cauchy { a: 1.5, b_nm2: -1.0 }.check().is_err());
        for m in Material::ALL {
            assert!(m.model().check().is_ok());
            assert_eq!(Material::from_key(m.key()), Some(m));
        }
    }

    #[test]
    fn reflect_examples() {
        let d = normalize(Vec2::new(0.0, -1.0)).unwrap();
        assert_eq!(reflect(d, UP).unwrap(), UP);

        let d = normalize(Vec2::new(1.0, -1.0)).unwrap();
        let r = reflect(d, UP).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.x() - s).abs() < 1e-15 && (r.y() - s).abs() < 1e-15);

        assert!(matches!(
            reflect(UnitVec2::X, UP),
            Err(OpticsError::BadNormalOrientation(_))
        ));
    }

    #[test]
    fn refraction_examples() {
        let down = -UP;
        for (n1, n2) in [(1.0, 1.5), (1.5, 1.0), (1.33, 1.33)] {
            let out = refract_or_reflect(down, UP, n1, n2).unwrap();
            assert_eq!(out, RefractionOutcome::Refracted { dir: down });
        }

        let out = refract_or_reflect(dir_at(30.0), UP, 1.0, 1.5).unwrap();
        let RefractionOutcome::Refracted { dir } = out else {
            panic!("expected refraction, got {out:?}");
        };
        // asin(sin 30° / 1.5)
        let expected = (0.5f64 / 1.5).asin();
        assert!((angle_from_normal(dir, UP) - expected).abs() < 1e-12);
        assert!((expected.to_degrees() - 19.4712).abs() < 5e-5);
        assert!(dir.x() > 0.0, "tangential component keeps its sign");

        let out = refract_or_reflect(dir_at(60.0), UP, 1.33, 1.0).unwrap();
        assert!(matches!(out, RefractionOutcome::TotalInternal { .. }));
        assert!((1.33 * 60f64.to_radians().sin() - 1.152).abs() < 1e-3);

        let critical = (1.0f64 / 1.5).asin();
        assert!((critical.to_degrees() - 41.810).abs() < 5e-4);
        let d = incident_direction(UP, critical, Vec2::new(1.0, 0.0));
        let out = refract_or_reflect(d, UP, 1.5, 1.0).unwrap();
        let RefractionOutcome::Grazing { dir } = out else {
            panic!("expected grazing, got {out:?}");
        };
        assert!(dir.y().abs() < 1e-15 && dir.x() > 0.0);
    }

    #[test]
    fn refraction_rejects_bad_inputs() {
        assert!(matches!(
            refract_or_reflect(UP, UP, 1.0, 1.5),
            Err(OpticsError::BadNormalOrientation(_))
        ));
        assert_eq!(
            refract_or_reflect(-UP, UP, 0.5, 1.5),
            Err(OpticsError::BadIndex(0.5))
        );
        assert_eq!(
            refract_or_reflect(-UP, UP, 1.0, f64::INFINITY),
            Err(OpticsError::BadIndex(f64::INFINITY))
        );
    }

    #[test]
    fn critical_angle_examples() {
        assert_eq!(critical_angle(1.0, 1.5), None);
        assert_eq!(critical_angle(1.33, 1.33), None);
        let deg = |a: Option<f64>| a.unwrap().to_degrees();
        assert!((deg(critical_angle(1.5, 1.0)) - 41.810).abs() < 5e-4);
        // asin(1/1.33) = 48.7535°
        assert!((deg(critical_angle(1.33, 1.0)) - 48.754).abs() < 1e-3);
        assert!((deg(critical_angle(1.5, 1.33)) - 62.46).abs() < 5e-3);
    }

    #[test]
    fn cauchy_normal_dispersion() {
        let flint = Material::FlintGlass.medium();
        let indices: Vec<f64> = white_light().iter().map(|&w| flint.index_at(w)).collect();
        assert!(indices.windows(2).all(|p| p[0] < p[1]));
    }

    use std::f64::consts::{FRAC_PI_2, TAU};

    fn index() -> impl Strategy<Value = f64> {
        1.0f64..2.5
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn snell_holds(n1 in index(), n2 in index(), theta in 0.0f64..FRAC_PI_2 - 1e-4, normal_angle in 0.0f64..TAU) {
            let n = UnitVec2::from_angle(normal_angle);
            let d = incident_direction(n, theta, n.perp().as_vec());
            if let RefractionOutcome::Refracted { dir } = refract_or_reflect(d, n, n1, n2).unwrap() {
                let lhs = n1 * sin_from_normal(d, n);
                let rhs = n2 * sin_from_normal(dir, n);
                prop_assert!((lhs - rhs).abs() < 1e-9);
                // Same side of the normal, across the boundary.
                prop_assert!(d.cross(n) * dir.cross(n) >= 0.0);
                prop_assert!(dir.dot(n) < 0.0);
            }
        }

        #[test]
        fn tir_matches_critical_angle(n1 in index(), n2 in index(), theta in 0.0f64..FRAC_PI_2 - 1e-4) {
            let d = incident_direction(UP, theta, Vec2::new(1.0, 0.0));
            let out = refract_or_reflect(d, UP, n1, n2).unwrap();
            let tir = matches!(out, RefractionOutcome::TotalInternal { .. });
            let refracted = matches!(out, RefractionOutcome::Refracted { .. });
            match critical_angle(n1, n2) {
                Some(c) if theta > c + 1e-9 => prop_assert!(tir, "{:?}", out),
                Some(c) if theta < c - 1e-9 => prop_assert!(refracted, "{:?}", out),
                None => prop_assert!(refracted, "{:?}", out),
                _ => {}
            }
            if let RefractionOutcome::TotalInternal { dir } = out {
                let back = angle_from_normal(dir, UP);
                prop_assert!((back - theta).abs() < 1e-9);
            }
        }

        #[test]
        fn refraction_reverses(n1 in index(), n2 in index(), theta in 0.0f64..1.55) {
            let d = incident_direction(UP, theta, Vec2::new(-1.0, 0.0));
            if let RefractionOutcome::Refracted { dir } = refract_or_reflect(d, UP, n1, n2).unwrap() {
                let back = refract_or_reflect(-dir, -UP, n2, n1).unwrap();
                let RefractionOutcome::Refracted { dir: b } = back else {
                    return Err(TestCaseError::fail(format!("reverse was {back:?}")));
                };
                prop_assert!((b.x() + d.x()).abs() < 1e-9 && (b.y() + d.y()).abs() < 1e-9);
            }
        }

        #[test]
        fn reflect_is_involution(a in 0.0f64..TAU, theta in 0.0f64..1.57) {
            let n = UnitVec2::from_angle(a);
            let d = incident_direction(n, theta, n.perp().as_vec());
            let r = reflect(d, n).unwrap();
            // The reflected ray leaves the surface, so reflect it against -n.
            let rr = reflect(-r, n).unwrap();
            prop_assert!((rr.x() + d.x()).abs() < 1e-12 && (rr.y() + d.y()).abs() < 1e-12);
            let r2 = d.as_vec() - n.as_vec() * (2.0 * d.dot(n));
            let back = r2 - n.as_vec() * (2.0 * r2.dot(n.as_vec()));
            prop_assert!(back.distance(d.as_vec()) < 1e-12);
        }

        #[test]
        fn cauchy_decreases_with_wavelength(a in 1.0f64..2.0, b in 1.0f64..20000.0, l1 in 380.0f64..779.0, dl in 0.5f64..100.0) {
            let m = IndexModel::Cauchy { a, b_nm2: b };
            let l2 = (l1 + dl).min(780.0);
            let (w1, w2) = (Wavelength::new(l1).unwrap(), Wavelength::new(l2).unwrap());
            prop_assert!(m.index_at(w1) > m.index_at(w2));
        }
    }
}
