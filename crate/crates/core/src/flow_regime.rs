//! Characteristic numbers of the oscillating gas flow.
//!
//! Rarefaction is judged by Knudsen numbers, compressibility by the squeeze
//! number and gas inertia by the oscillatory Reynolds number of a hole.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::PlateGeometry;

/// Squeeze number at which viscous and spring forces of the film are equal.
pub const COMPRESSIBILITY_THRESHOLD: f64 = 20.0;
/// Reynolds number at which the real and imaginary channel impedances are equal.
pub const INERTIA_THRESHOLD: f64 = 6.0;

/// Ambient gas state. SI units throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GasProperties {
    /// Ambient pressure (Pa).
    pub pressure: f64,
    /// Density (kg/m³).
    pub density: f64,
    /// Dynamic viscosity (Pa·s).
    pub viscosity: f64,
    /// Mean free path (m).
    pub mean_free_path: f64,
}

impl Default for GasProperties {
    /// Air at the laboratory conditions of the reference measurements.
    fn default() -> Self {
        Self {
            pressure: 101e3,
            density: 1.155,
            viscosity: 18.5e-6,
            mean_free_path: 65e-9,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GasError {
    #[error("gas property `{0}` must be positive and finite")]
    NotPositive(&'static str),
    #[error("unknown flow channel kind `{0}` (expected channel, tube or square)")]
    UnknownChannel(String),
}

impl GasProperties {
    /// Validates a gas state. The mean free path may be zero (continuum).
    pub fn new(
        pressure: f64,
        density: f64,
        viscosity: f64,
        mean_free_path: f64,
    ) -> Result<Self, GasError> {
        let gas = Self {
            pressure,
            density,
            viscosity,
            mean_free_path,
        };
        gas.validate()?;
        Ok(gas)
    }

    pub fn validate(&self) -> Result<(), GasError> {
        for (name, v) in [
            ("P_A", self.pressure),
            ("rho", self.density),
            ("mu", self.viscosity),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(GasError::NotPositive(name));
            }
        }
        if !(self.mean_free_path.is_finite() && self.mean_free_path >= 0.0) {
            return Err(GasError::NotPositive("lambda"));
        }
        Ok(())
    }

    pub fn with_mean_free_path(self, mean_free_path: f64) -> Self {
        Self {
            mean_free_path,
            ..self
        }
    }
}

/// Cross-section family of a slip-flow channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowChannel {
    /// Parallel-plate channel (the air gap).
    Channel,
    /// Circular tube.
    Tube,
    /// Square tube.
    Square,
}

impl FromStr for FlowChannel {
    type Err = GasError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "channel" | "ch" => Ok(FlowChannel::Channel),
            "tube" | "tb" => Ok(FlowChannel::Tube),
            "square" | "sq" => Ok(FlowChannel::Square),
            _ => Err(GasError::UnknownChannel(s.to_string())),
        }
    }
}

pub fn knudsen(mean_free_path: f64, char_length: f64) -> f64 {
    mean_free_path / char_length
}

/// Slip-flow rate coefficient Q(K) relative to no-slip Poiseuille flow.
pub fn flow_rate_coefficient(kind: FlowChannel, knudsen: f64) -> f64 {
    let slope = match kind {
        FlowChannel::Channel => 6.0,
        FlowChannel::Tube => 4.0,
        FlowChannel::Square => 7.567,
    };
    1.0 + slope * knudsen
}

/// Squeeze number σ = 12 µ W² ω / (P_A h²) of a rigid film.
pub fn squeeze_number(viscosity: f64, char_width: f64, omega: f64, pressure: f64, gap: f64) -> f64 {
    12.0 * viscosity * char_width.powi(2) * omega / (pressure * gap.powi(2))
}

/// Oscillatory Reynolds number ρ r² ω / µ of a circular channel.
pub fn reynolds_number(density: f64, radius: f64, omega: f64, viscosity: f64) -> f64 {
    density * radius.powi(2) * omega / viscosity
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeReport {
    /// Knudsen number of the air gap, λ/h.
    #[serde(rename = "K_ch")]
    pub gap_knudsen: f64,
    /// Knudsen number of the square hole, λ/s0.
    #[serde(rename = "K_hole")]
    pub hole_knudsen: f64,
    /// Squeeze number with the full plate width as characteristic length.
    pub sigma_plate: f64,
    /// Squeeze number with the wall between holes as characteristic length.
    pub sigma_cell: f64,
    /// Reynolds number of a hole, radius s0/2.
    #[serde(rename = "Re")]
    pub reynolds: f64,
    /// Slip-induced damping reduction estimate for the gap, 100·6K_ch.
    pub rarefaction_gap_pct: f64,
    /// Same for the holes, 100·7.567K_hole.
    pub rarefaction_hole_pct: f64,
    pub compressible: bool,
    pub inertial: bool,
}

pub fn regime_report(geom: &PlateGeometry, gas: &GasProperties, freq_hz: f64) -> RegimeReport {
    let omega = 2.0 * PI * freq_hz;
    let gap_knudsen = knudsen(gas.mean_free_path, geom.gap());
    let hole_knudsen = knudsen(gas.mean_free_path, geom.hole_side());
    let sigma = |w: f64| squeeze_number(gas.viscosity, w, omega, gas.pressure, geom.gap());
    let sigma_cell = sigma(geom.wall());
    let reynolds = reynolds_number(gas.density, geom.hole_side() / 2.0, omega, gas.viscosity);
    RegimeReport {
        gap_knudsen,
        hole_knudsen,
        sigma_plate: sigma(geom.width()),
        sigma_cell,
        reynolds,
        rarefaction_gap_pct: 100.0
            * (flow_rate_coefficient(FlowChannel::Channel, gap_knudsen) - 1.0),
        rarefaction_hole_pct: 100.0
            * (flow_rate_coefficient(FlowChannel::Square, hole_knudsen) - 1.0),
        compressible: sigma_cell >= COMPRESSIBILITY_THRESHOLD,
        inertial: reynolds >= INERTIA_THRESHOLD,
    }
}
