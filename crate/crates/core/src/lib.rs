//! Squeeze-film damping of perforated micromechanical plates.
//!
//! * [`geometry`]: plate dimensions and equivalent radii
//! * [`flow_regime`]: Knudsen, squeeze and Reynolds numbers
//! * [`compact_models`]: damping models M1–M6 and beam damping
//! * [`frf`]: Q and damping extraction from frequency responses
//! * [`comparison`]: measured reference devices and table reproduction
//! * [`config`], [`units`], [`cli`]: file formats and the command line

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod compact_models;
pub mod comparison;
pub mod config;
pub mod flow_regime;
pub mod frf;
pub mod geometry;
pub mod units;

pub use compact_models::{ModelId, ModelResult};
pub use flow_regime::GasProperties;
pub use geometry::PlateGeometry;
