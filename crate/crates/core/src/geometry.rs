//! Dimensional model of a perforated plate and the equivalent radii that
//! map square holes onto circular perforation cells.
//!
//! All lengths are metres.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

/// Hole radius per unit hole side from matching the acoustic impedance of
/// a square channel to a circular one.
pub const HOLE_RADIUS_FACTOR: f64 = 1.096 / 2.0;

/// Allowed overhang of the hole grid past the plate edge, as a fraction of the plate side.
const FIT_SLACK: f64 = 0.10;

#[derive(Debug, Clone, Error, PartialEq)]
#[error("invalid geometry: `{field}` {reason}")]
pub struct GeometryError {
    pub field: &'static str,
    pub reason: String,
}

impl GeometryError {
    fn new(field: &'static str, reason: impl Into<String>) -> Self {
        Self {
            field,
            reason: reason.into(),
        }
    }
}

/// Supporting beams that suspend the plate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeamGeometry {
    /// Beam length (m).
    pub length: f64,
    /// Beam width (m).
    pub width: f64,
    pub count: u32,
}

impl BeamGeometry {
    pub const DEFAULT_COUNT: u32 = 4;

    pub fn new(length: f64, width: f64, count: u32) -> Result<Self, GeometryError> {
        if !(length.is_finite() && length >= 0.0) {
            return Err(GeometryError::new("Lb", "must be non-negative"));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(GeometryError::new("Wb", "must be positive"));
        }
        Ok(Self {
            length,
            width,
            count,
        })
    }
}

/// Raw dimensions of a perforated plate, before validation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlateDimensions {
    /// Plate length L (m).
    pub length: f64,
    /// Plate width W (m).
    pub width: f64,
    /// Hole count along the length, M.
    pub holes_along_length: u32,
    /// Hole count along the width, N.
    pub holes_along_width: u32,
    /// Square hole side s0 (m).
    pub hole_side: f64,
    /// Wall between neighbouring holes s1 (m).
    pub wall: f64,
    /// Air gap height h (m).
    pub gap: f64,
    /// Plate thickness, i.e. hole channel length h_c (m).
    pub thickness: f64,
    pub beams: Option<BeamGeometry>,
}

/// A validated perforated plate. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PlateGeometry {
    dims: PlateDimensions,
}

impl PlateGeometry {
    pub fn new(dims: PlateDimensions) -> Result<Self, GeometryError> {
        let positive = [
            ("L", dims.length),
            ("W", dims.width),
            ("s0", dims.hole_side),
            ("s1", dims.wall),
            ("h", dims.gap),
            ("hc", dims.thickness),
        ];
        for (field, value) in positive {
            if !value.is_finite() {
                return Err(GeometryError::new(field, "must be finite"));
            }
            if value <= 0.0 {
                return Err(GeometryError::new(
                    field,
                    format!("must be positive, got {value}"),
                ));
            }
        }
        if dims.holes_along_length == 0 {
            return Err(GeometryError::new("M", "needs at least one hole"));
        }
        if dims.holes_along_width == 0 {
            return Err(GeometryError::new("N", "needs at least one hole"));
        }
        let pitch = dims.hole_side + dims.wall;
        if f64::from(dims.holes_along_length) * pitch > dims.length * (1.0 + FIT_SLACK) {
            return Err(GeometryError::new(
                "M",
                "hole grid does not fit along the plate length",
            ));
        }
        if f64::from(dims.holes_along_width) * pitch > dims.width * (1.0 + FIT_SLACK) {
            return Err(GeometryError::new(
                "N",
                "hole grid does not fit across the plate width",
            ));
        }
        if let Some(beams) = dims.beams {
            BeamGeometry::new(beams.length, beams.width, beams.count)?;
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &PlateDimensions {
        &self.dims
    }

    pub fn length(&self) -> f64 {
        self.dims.length
    }
    pub fn width(&self) -> f64 {
        self.dims.width
    }
    pub fn holes_along_length(&self) -> u32 {
        self.dims.holes_along_length
    }
    pub fn holes_along_width(&self) -> u32 {
        self.dims.holes_along_width
    }
    /// Total number of holes, M·N.
    pub fn hole_count(&self) -> f64 {
        f64::from(self.dims.holes_along_length) * f64::from(self.dims.holes_along_width)
    }
    pub fn hole_side(&self) -> f64 {
        self.dims.hole_side
    }
    pub fn wall(&self) -> f64 {
        self.dims.wall
    }
    pub fn gap(&self) -> f64 {
        self.dims.gap
    }
    pub fn thickness(&self) -> f64 {
        self.dims.thickness
    }
    pub fn beams(&self) -> Option<&BeamGeometry> {
        self.dims.beams.as_ref()
    }

    /// The same plate rotated by 90°: length and width swap, and so do M and N.
    pub fn transposed(&self) -> Self {
        let d = self.dims;
        Self {
            dims: PlateDimensions {
                length: d.width,
                width: d.length,
                holes_along_length: d.holes_along_width,
                holes_along_width: d.holes_along_length,
                ..d
            },
        }
    }

    pub fn derived(&self) -> DerivedGeometry {
        DerivedGeometry::from_plate(self)
    }
}

/// Quantities derived from the plate dimensions and shared by the models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedGeometry {
    /// Cell pitch s_X = s0 + s1.
    pub cell_pitch: f64,
    /// Equivalent circular cell radius r_X.
    pub cell_radius: f64,
    /// Equivalent circular hole radius r_0.
    pub hole_radius: f64,
    /// Effective radius of the square hole, r_0E.
    pub square_hole_radius: f64,
    /// Hole-to-cell side ratio ξ = s0/s_X.
    pub xi: f64,
    /// Radius ratio β = r_0/r_X.
    pub beta: f64,
    /// Perforation ratio q.
    pub perforation_ratio: f64,
}

impl DerivedGeometry {
    pub fn from_plate(geom: &PlateGeometry) -> Self {
        let cell_pitch = cell_pitch(geom);
        let cell_radius = equivalent_cell_radius(cell_pitch);
        let hole_radius = equivalent_hole_radius(geom.hole_side());
        let xi = geom.hole_side() / cell_pitch;
        Self {
            cell_pitch,
            cell_radius,
            hole_radius,
            square_hole_radius: effective_square_radius(geom.hole_side(), xi),
            xi,
            beta: hole_radius / cell_radius,
            perforation_ratio: perforation_ratio(geom),
        }
    }
}

pub fn cell_pitch(geom: &PlateGeometry) -> f64 {
    geom.hole_side() + geom.wall()
}

/// Hole area over plate area, q = M·N·s0²/(L·W).
pub fn perforation_ratio(geom: &PlateGeometry) -> f64 {
    geom.hole_count() * geom.hole_side().powi(2) / (geom.length() * geom.width())
}

/// Radius of the circle with the same area as a square cell of side `pitch`.
pub fn equivalent_cell_radius(pitch: f64) -> f64 {
    pitch / PI.sqrt()
}

pub fn equivalent_hole_radius(hole_side: f64) -> f64 {
    HOLE_RADIUS_FACTOR * hole_side
}

/// Effective radius r_0E of a square hole inside a square cell with side ratio `xi`.
pub fn effective_square_radius(hole_side: f64, xi: f64) -> f64 {
    0.58076 * hole_side / (1.0 + 0.02108 * xi.powi(2) + 0.008 * xi.powi(4))
}
