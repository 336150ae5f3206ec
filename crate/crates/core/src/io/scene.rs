//! Scene configuration: a versioned TOML document describing the scatterers,
//! array geometry, frequency sweep, fan beam, and optional noise draw of a
//! simulation run.
//!
//! ```toml
//! version = 1
//!
//! [sweep]
//! f_start_ghz = 24.0
//! f_stop_ghz = 30.0
//! f_step_mhz = 64.0
//!
//! [geometry]
//! array_length_mm = 960.0
//! element_pitch_mm = 5.2
//! x_count = 21
//! x_step_mm = 5.2
//! tx_rx_offset_mm = 0.0
//!
//! [beam]
//! waist_mm = 8.51
//! wavelength_mm = 11.1
//! focal_distance_mm = 1200.0
//!
//! [[scatterers]]
//! x_mm = 0.0
//! y_mm = 2.6
//! z_mm = 1200.0
//! reflectivity_re = 1.0
//!
//! [[rods]]
//! z_mm = 1200.0
//! y_span_mm = 960.0
//! pitch_mm = 2.5
//! ```
//!
//! Unknown keys are rejected, and parse failures carry the offending line
//! and column from the TOML parser.

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::SceneConfigError;
use crate::forward::{ArrayGeometry, FanBeam, FrequencySweep, Scatterer, Scene};

pub const SCENE_CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub f_start_ghz: f64,
    pub f_stop_ghz: f64,
    pub f_step_mhz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub array_length_mm: f64,
    pub element_pitch_mm: f64,
    pub x_count: usize,
    pub x_step_mm: f64,
    #[serde(default)]
    pub tx_rx_offset_mm: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamConfig {
    pub waist_mm: f64,
    pub wavelength_mm: f64,
    pub focal_distance_mm: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScattererConfig {
    pub x_mm: f64,
    pub y_mm: f64,
    pub z_mm: f64,
    #[serde(default = "one")]
    pub reflectivity_re: f64,
    #[serde(default)]
    pub reflectivity_im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RodConfig {
    pub z_mm: f64,
    pub y_span_mm: f64,
    pub pitch_mm: f64,
    #[serde(default = "one")]
    pub reflectivity_re: f64,
    #[serde(default)]
    pub reflectivity_im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub snr_db: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructionConfig {
    /// Reference depth override; defaults to 100 mm inside the nearest
    /// target when absent.
    pub z0_mm: Option<f64>,
}

fn one() -> f64 {
    1.0
}

/// Parsed scene configuration document.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub version: u32,
    pub sweep: SweepConfig,
    pub geometry: GeometryConfig,
    pub beam: BeamConfig,
    #[serde(default)]
    pub scatterers: Vec<ScattererConfig>,
    #[serde(default)]
    pub rods: Vec<RodConfig>,
    #[serde(default)]
    pub noise: Option<NoiseConfig>,
    #[serde(default)]
    pub reconstruction: Option<ReconstructionConfig>,
}

impl SceneConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, SceneConfigError> {
        let config: SceneConfig = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self, SceneConfigError> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<(), SceneConfigError> {
        if self.version != SCENE_CONFIG_VERSION {
            return Err(SceneConfigError::VersionUnsupported {
                found: self.version,
                supported: SCENE_CONFIG_VERSION,
            });
        }
        if self.scatterers.is_empty() && self.rods.is_empty() {
            return Err(SceneConfigError::Invalid(
                "scene has no scatterers and no rods".into(),
            ));
        }
        for (i, s) in self.scatterers.iter().enumerate() {
            if s.z_mm <= 0.0 {
                return Err(SceneConfigError::Invalid(format!(
                    "scatterers[{i}]: z_mm must be positive (got {})",
                    s.z_mm
                )));
            }
        }
        for (i, r) in self.rods.iter().enumerate() {
            if r.z_mm <= 0.0 || r.pitch_mm <= 0.0 || r.y_span_mm < 0.0 {
                return Err(SceneConfigError::Invalid(format!(
                    "rods[{i}]: need z_mm > 0, pitch_mm > 0, y_span_mm >= 0"
                )));
            }
        }
        if self.geometry.x_count == 0 {
            return Err(SceneConfigError::Invalid("x_count must be >= 1".into()));
        }
        Ok(())
    }

    /// Expand scatterers and rods into a scene.
    pub fn scene(&self) -> Scene<f64> {
        let mut scene = Scene::new(
            self.scatterers
                .iter()
                .map(|s| Scatterer {
                    x: s.x_mm,
                    y: s.y_mm,
                    z: s.z_mm,
                    reflectivity: Complex::new(s.reflectivity_re, s.reflectivity_im),
                })
                .collect(),
        );
        for rod in &self.rods {
            scene.add_rod(
                rod.z_mm,
                rod.y_span_mm,
                rod.pitch_mm,
                Complex::new(rod.reflectivity_re, rod.reflectivity_im),
            );
        }
        scene
    }

    pub fn array_geometry(&self) -> ArrayGeometry<f64> {
        ArrayGeometry::centered(
            self.geometry.array_length_mm,
            self.geometry.element_pitch_mm,
            self.geometry.x_count,
            self.geometry.x_step_mm,
        )
        .with_tx_rx_offset(self.geometry.tx_rx_offset_mm)
    }

    pub fn frequency_sweep(&self) -> FrequencySweep<f64> {
        FrequencySweep::new(
            self.sweep.f_start_ghz,
            self.sweep.f_stop_ghz,
            self.sweep.f_step_mhz / 1000.0,
        )
    }

    pub fn fan_beam(&self) -> FanBeam<f64> {
        FanBeam::new(
            self.beam.waist_mm,
            self.beam.wavelength_mm,
            self.beam.focal_distance_mm,
        )
    }

    /// Reference depth: explicit override, else 100 mm inside the nearest
    /// target.
    pub fn z0(&self) -> f64 {
        if let Some(rc) = &self.reconstruction {
            if let Some(z0) = rc.z0_mm {
                return z0;
            }
        }
        crate::recon::default_z0(self.scene().min_z())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
version = 1

[sweep]
f_start_ghz = 24.0
f_stop_ghz = 30.0
f_step_mhz = 64.0

[geometry]
array_length_mm = 960.0
element_pitch_mm = 5.2
x_count = 21
x_step_mm = 5.2
tx_rx_offset_mm = 20.0

[beam]
waist_mm = 8.51
wavelength_mm = 11.1
focal_distance_mm = 1200.0

[noise]
snr_db = 30.0
seed = 42

[[scatterers]]
x_mm = 0.0
y_mm = 2.6
z_mm = 1200.0

[[rods]]
z_mm = 1250.0
y_span_mm = 960.0
pitch_mm = 2.5
reflectivity_re = 0.5
"#;

    #[test]
    fn parses_and_expands() {
        let config = SceneConfig::from_toml_str(SAMPLE).unwrap();
        let scene = config.scene();
        assert_eq!(scene.scatterers.len(), 1 + 385);
        assert_eq!(scene.scatterers[0].reflectivity.re, 1.0);
        assert_eq!(scene.scatterers[1].reflectivity.re, 0.5);

        let geometry = config.array_geometry();
        assert_eq!(geometry.n_y, 185);
        assert_eq!(geometry.n_x, 21);
        assert_eq!(geometry.tx_rx_offset, 20.0);

        let sweep = config.frequency_sweep();
        assert_eq!(sweep.count(), 94);

        assert_eq!(config.z0(), 1100.0);
        assert_eq!(config.noise.as_ref().unwrap().seed, 42);
    }

    #[test]
    fn parse_error_is_line_anchored() {
        let broken = SAMPLE.replace("waist_mm = 8.51", "waist_mm = \"oops\"");
        let err = SceneConfig::from_toml_str(&broken).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line"), "error should carry a line: {msg}");
    }

    #[test]
    fn unknown_key_rejected() {
        let broken = SAMPLE.replace("waist_mm", "waist_radius_mm");
        assert!(SceneConfig::from_toml_str(&broken).is_err());
    }

    #[test]
    fn wrong_version_rejected() {
        let broken = SAMPLE.replace("version = 1", "version = 99");
        assert!(matches!(
            SceneConfig::from_toml_str(&broken),
            Err(SceneConfigError::VersionUnsupported { found: 99, .. })
        ));
    }

    #[test]
    fn empty_scene_rejected() {
        let empty = r#"
version = 1
[sweep]
f_start_ghz = 24.0
f_stop_ghz = 30.0
f_step_mhz = 64.0
[geometry]
array_length_mm = 960.0
element_pitch_mm = 5.2
x_count = 1
x_step_mm = 5.2
[beam]
waist_mm = 8.51
wavelength_mm = 11.1
focal_distance_mm = 1200.0
"#;
        assert!(matches!(
            SceneConfig::from_toml_str(empty),
            Err(SceneConfigError::Invalid(_))
        ));
    }

    #[test]
    fn negative_depth_rejected_with_index() {
        let broken = SAMPLE.replace("z_mm = 1200.0", "z_mm = -5.0");
        let err = SceneConfig::from_toml_str(&broken).unwrap_err();
        assert!(err.to_string().contains("scatterers[0]"));
    }
}
