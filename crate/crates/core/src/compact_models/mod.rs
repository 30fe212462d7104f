//! Compact squeeze-film damping models for perforated plates.
//!
//! | id | model |
//! |----|-------|
//! | M1 | long strip with circular cells, continuum |
//! | M2 | arbitrary rectangle with circular cells, continuum |
//! | M3 | rectangle with border escape, circular-cell resistance |
//! | M4 | rectangle with border escape, square-cell resistance |
//! | M5 | closed borders, circular cell: `M·N·R_p` |
//! | M6 | closed borders, square cell: `M·N·R_p` |
//!
//! Every model returns a mechanical damping coefficient in Ns/m.

mod beams;
mod border;
mod cells;
mod strip;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::flow_regime::GasProperties;
use crate::geometry::PlateGeometry;

pub use beams::beam_damping;
pub use border::{damping_border_coupled, BorderSeries, SeriesSum, MAX_ODD_INDEX, SERIES_REL_TOL};
pub use cells::{cell_resistance_circular, cell_resistance_square, CellResistanceBreakdown};
pub use strip::{damping_m1, damping_m2, strip_decay_length};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ModelId {
    M1,
    M2,
    M3,
    M4,
    M5,
    M6,
    Beams,
}

impl ModelId {
    /// The six plate models, in table order.
    pub const PLATE_MODELS: [ModelId; 6] = [
        ModelId::M1,
        ModelId::M2,
        ModelId::M3,
        ModelId::M4,
        ModelId::M5,
        ModelId::M6,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ModelId::M1 => "M1",
            ModelId::M2 => "M2",
            ModelId::M3 => "M3",
            ModelId::M4 => "M4",
            ModelId::M5 => "M5",
            ModelId::M6 => "M6",
            ModelId::Beams => "beams",
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ModelId {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "m1" => Ok(ModelId::M1),
            "m2" => Ok(ModelId::M2),
            "m3" => Ok(ModelId::M3),
            "m4" => Ok(ModelId::M4),
            "m5" => Ok(ModelId::M5),
            "m6" => Ok(ModelId::M6),
            "beams" => Ok(ModelId::Beams),
            _ => Err(ModelError::UnknownModel(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("{model}: outside model domain: {detail}")]
    Domain { model: ModelId, detail: String },
    #[error("{model}: series not converged after {terms} terms (partial sum {partial:e})")]
    NotConverged {
        model: ModelId,
        partial: f64,
        terms: usize,
    },
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("device has no beam geometry")]
    NoBeams,
}

impl ModelError {
    pub(crate) fn domain(model: ModelId, detail: impl Into<String>) -> Self {
        ModelError::Domain {
            model,
            detail: detail.into(),
        }
    }

    pub(crate) fn with_model(self, model: ModelId) -> Self {
        match self {
            ModelError::Domain { detail, .. } => ModelError::Domain { model, detail },
            ModelError::NotConverged { partial, terms, .. } => ModelError::NotConverged {
                model,
                partial,
                terms,
            },
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelResult {
    pub model: ModelId,
    /// Damping coefficient (Ns/m).
    pub c: f64,
    pub breakdown: Option<CellResistanceBreakdown>,
    /// Number of series terms summed; 1 for closed-form models.
    pub series_terms: usize,
    pub converged: bool,
}

impl ModelResult {
    pub(crate) fn closed_form(model: ModelId, c: f64) -> Self {
        Self {
            model,
            c,
            breakdown: None,
            series_terms: 1,
            converged: true,
        }
    }
}

/// Evaluation switches shared by the plate models.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ModelOptions {
    /// Divide the continuum models M1/M2 by the gap slip coefficient Q_ch.
    pub slip_correct: bool,
}

pub fn damping_m3(geom: &PlateGeometry, gas: &GasProperties) -> Result<ModelResult, ModelError> {
    let cell = cell_resistance_circular(geom, gas)?;
    let mut result =
        damping_border_coupled(geom, gas, cell.r_p).map_err(|e| e.with_model(ModelId::M3))?;
    result.model = ModelId::M3;
    result.breakdown = Some(cell);
    Ok(result)
}

pub fn damping_m4(geom: &PlateGeometry, gas: &GasProperties) -> Result<ModelResult, ModelError> {
    let cell = cell_resistance_square(geom, gas)?;
    let mut result =
        damping_border_coupled(geom, gas, cell.r_p).map_err(|e| e.with_model(ModelId::M4))?;
    result.model = ModelId::M4;
    result.breakdown = Some(cell);
    Ok(result)
}

fn closed_borders(
    model: ModelId,
    geom: &PlateGeometry,
    cell: CellResistanceBreakdown,
) -> ModelResult {
    ModelResult {
        c: geom.hole_count() * cell.r_p,
        breakdown: Some(cell),
        ..ModelResult::closed_form(model, 0.0)
    }
}

pub fn damping_m5(geom: &PlateGeometry, gas: &GasProperties) -> Result<ModelResult, ModelError> {
    Ok(closed_borders(
        ModelId::M5,
        geom,
        cell_resistance_circular(geom, gas)?,
    ))
}

pub fn damping_m6(geom: &PlateGeometry, gas: &GasProperties) -> Result<ModelResult, ModelError> {
    Ok(closed_borders(
        ModelId::M6,
        geom,
        cell_resistance_square(geom, gas)?,
    ))
}

/// Dispatches to the named model.
pub fn evaluate(
    model: ModelId,
    geom: &PlateGeometry,
    gas: &GasProperties,
    opts: ModelOptions,
) -> Result<ModelResult, ModelError> {
    match model {
        ModelId::M1 => damping_m1(geom, gas, opts),
        ModelId::M2 => damping_m2(geom, gas, opts),
        ModelId::M3 => damping_m3(geom, gas),
        ModelId::M4 => damping_m4(geom, gas),
        ModelId::M5 => damping_m5(geom, gas),
        ModelId::M6 => damping_m6(geom, gas),
        ModelId::Beams => {
            let beams = geom.beams().ok_or(ModelError::NoBeams)?;
            Ok(ModelResult::closed_form(
                ModelId::Beams,
                beam_damping(beams, geom.gap(), gas),
            ))
        }
    }
}
