//! Device and gas configuration files (JSON).
//!
//! Field names carry their unit: `L_um`, `lambda_nm`, `f0_kHz`. Values are
//! converted to SI on load and back on dump.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::comparison::MeasuredRecord;
use crate::flow_regime::GasProperties;
use crate::geometry::{BeamGeometry, GeometryError, PlateDimensions, PlateGeometry};
use crate::units::{KILO, MICRO, NANO};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: field `{field}`: {message}", path.display())]
    Parse {
        path: PathBuf,
        field: String,
        message: String,
    },
    #[error("{}: field `{field}`: {reason}", path.display())]
    Invalid {
        path: PathBuf,
        field: String,
        reason: String,
    },
}

impl ConfigError {
    pub fn field(&self) -> Option<&str> {
        match self {
            ConfigError::Io { .. } => None,
            ConfigError::Parse { field, .. } | ConfigError::Invalid { field, .. } => Some(field),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamsFile {
    #[serde(rename = "Lb_um")]
    pub lb_um: f64,
    #[serde(rename = "Wb_um")]
    pub wb_um: f64,
    #[serde(default = "default_beam_count")]
    pub count: u32,
}

fn default_beam_count() -> u32 {
    BeamGeometry::DEFAULT_COUNT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasuredFile {
    #[serde(rename = "c_Ns_per_m")]
    pub c_ns_per_m: f64,
    #[serde(rename = "f0_kHz")]
    pub f0_khz: f64,
    pub mass_ratio: f64,
}

/// On-disk device description, lengths in micrometres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct DeviceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub L_um: f64,
    pub W_um: f64,
    pub M: u32,
    pub N: u32,
    pub s0_um: f64,
    pub s1_um: f64,
    pub h_um: f64,
    pub hc_um: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beams: Option<BeamsFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured: Option<MeasuredFile>,
}

/// Measured data attached to a device file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Measurement {
    /// Damping coefficient (Ns/m).
    pub c_m: f64,
    /// Resonant frequency (Hz).
    pub f0: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Device {
    pub name: String,
    pub geom: PlateGeometry,
    pub measured: Option<Measurement>,
}

fn geometry_field(field: &str) -> &'static str {
    match field {
        "L" => "L_um",
        "W" => "W_um",
        "M" => "M",
        "N" => "N",
        "s0" => "s0_um",
        "s1" => "s1_um",
        "h" => "h_um",
        "hc" => "hc_um",
        "Lb" => "beams.Lb_um",
        "Wb" => "beams.Wb_um",
        _ => "?",
    }
}

/// Value in units of `scale` whose conversion back to SI reproduces `si` exactly.
fn from_si(si: f64, scale: f64) -> f64 {
    let direct = si / scale;
    let rounded: f64 = format!("{direct:.10e}").parse().unwrap_or(direct);
    [rounded, direct, direct.next_up(), direct.next_down()]
        .into_iter()
        .find(|v| v * scale == si)
        .unwrap_or(direct)
}

fn to_um(metres: f64) -> f64 {
    from_si(metres, MICRO)
}

impl DeviceFile {
    pub fn to_device(&self, path: &Path) -> Result<Device, ConfigError> {
        let beams = self.beams.as_ref().map(|b| BeamGeometry {
            length: b.lb_um * MICRO,
            width: b.wb_um * MICRO,
            count: b.count,
        });
        let geom = PlateGeometry::new(PlateDimensions {
            length: self.L_um * MICRO,
            width: self.W_um * MICRO,
            holes_along_length: self.M,
            holes_along_width: self.N,
            hole_side: self.s0_um * MICRO,
            wall: self.s1_um * MICRO,
            gap: self.h_um * MICRO,
            thickness: self.hc_um * MICRO,
            beams,
        })
        .map_err(|GeometryError { field, reason }| ConfigError::Invalid {
            path: path.to_path_buf(),
            field: geometry_field(field).to_string(),
            reason,
        })?;
        let measured = match &self.measured {
            None => None,
            Some(m) => {
                let invalid = |field: &str, reason: &str| ConfigError::Invalid {
                    path: path.to_path_buf(),
                    field: format!("measured.{field}"),
                    reason: reason.to_string(),
                };
                if !(m.c_ns_per_m > 0.0) {
                    return Err(invalid("c_Ns_per_m", "must be positive"));
                }
                if !(m.f0_khz > 0.0) {
                    return Err(invalid("f0_kHz", "must be positive"));
                }
                if !(m.mass_ratio > 0.0 && m.mass_ratio <= 1.0) {
                    return Err(invalid("mass_ratio", "must lie in (0, 1]"));
                }
                Some(Measurement {
                    c_m: m.c_ns_per_m,
                    f0: m.f0_khz * KILO,
                    alpha: m.mass_ratio,
                })
            }
        };
        let name = self.id.clone().unwrap_or_else(|| {
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        });
        Ok(Device {
            name,
            geom,
            measured,
        })
    }

    pub fn from_device(device: &Device) -> Self {
        let d = device.geom.dims();
        Self {
            id: Some(device.name.clone()),
            L_um: to_um(d.length),
            W_um: to_um(d.width),
            M: d.holes_along_length,
            N: d.holes_along_width,
            s0_um: to_um(d.hole_side),
            s1_um: to_um(d.wall),
            h_um: to_um(d.gap),
            hc_um: to_um(d.thickness),
            beams: d.beams.map(|b| BeamsFile {
                lb_um: to_um(b.length),
                wb_um: to_um(b.width),
                count: b.count,
            }),
            measured: device.measured.map(|m| MeasuredFile {
                c_ns_per_m: m.c_m,
                f0_khz: from_si(m.f0, KILO),
                mass_ratio: m.alpha,
            }),
        }
    }
}

impl From<&MeasuredRecord> for Device {
    fn from(rec: &MeasuredRecord) -> Self {
        Self {
            name: rec.id.to_string(),
            geom: rec.geom,
            measured: Some(Measurement {
                c_m: rec.c_m,
                f0: rec.f0,
                alpha: rec.alpha,
            }),
        }
    }
}

fn parse_json<'de, T: Deserialize<'de>>(path: &Path, text: &'de str) -> Result<T, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        ConfigError::Parse {
            path: path.to_path_buf(),
            field,
            message: e.into_inner().to_string(),
        }
    })
}

fn read(path: &Path) -> Result<String, ConfigError> {
    fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_device(path: &Path, text: &str) -> Result<Device, ConfigError> {
    parse_json::<DeviceFile>(path, text)?.to_device(path)
}

pub fn load_device(path: &Path) -> Result<Device, ConfigError> {
    parse_device(path, &read(path)?)
}

pub fn dump_device(device: &Device) -> String {
    let mut text = serde_json::to_string_pretty(&DeviceFile::from_device(device))
        .expect("device file serializes");
    text.push('\n');
    text
}

/// Gas overrides; absent fields keep the default air values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct GasFile {
    pub P_A_Pa: Option<f64>,
    pub rho_kg_per_m3: Option<f64>,
    pub mu_Pa_s: Option<f64>,
    pub lambda_nm: Option<f64>,
}

pub fn parse_gas(path: &Path, text: &str) -> Result<GasProperties, ConfigError> {
    let file: GasFile = parse_json(path, text)?;
    let base = GasProperties::default();
    let gas = GasProperties {
        pressure: file.P_A_Pa.unwrap_or(base.pressure),
        density: file.rho_kg_per_m3.unwrap_or(base.density),
        viscosity: file.mu_Pa_s.unwrap_or(base.viscosity),
        mean_free_path: file.lambda_nm.map_or(base.mean_free_path, |l| l * NANO),
    };
    gas.validate().map_err(|e| ConfigError::Invalid {
        path: path.to_path_buf(),
        field: match e {
            crate::flow_regime::GasError::NotPositive("P_A") => "P_A_Pa",
            crate::flow_regime::GasError::NotPositive("rho") => "rho_kg_per_m3",
            crate::flow_regime::GasError::NotPositive("mu") => "mu_Pa_s",
            _ => "lambda_nm",
        }
        .to_string(),
        reason: e.to_string(),
    })?;
    Ok(gas)
}

pub fn load_gas(path: &Path) -> Result<GasProperties, ConfigError> {
    parse_gas(path, &read(path)?)
}
