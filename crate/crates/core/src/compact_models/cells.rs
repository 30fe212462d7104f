//! Flow resistance of a single perforation cell under closed-border flow.
//!
//! A cell is one hole plus the film that drains into it. The resistance is
//! split into the film (R_S), the intermediate region between film and hole
//! (R_IS, R_IB, R_IC), the hole channel (R_C) and the outlet (R_E). The last
//! three see the hole velocity and are scaled by the cell/hole area ratio
//! squared.

use std::f64::consts::PI;

use serde::Serialize;

use super::{ModelError, ModelId};
use crate::flow_regime::{flow_rate_coefficient, knudsen, FlowChannel, GasProperties};
use crate::geometry::PlateGeometry;

/// Mechanical resistance of one perforation cell (Ns/m), by component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CellResistanceBreakdown {
    #[serde(rename = "R_S")]
    pub r_s: f64,
    #[serde(rename = "R_IS")]
    pub r_is: f64,
    #[serde(rename = "R_IB")]
    pub r_ib: f64,
    /// Unscaled; multiply by `scale`.
    #[serde(rename = "R_IC")]
    pub r_ic: f64,
    /// Unscaled; multiply by `scale`.
    #[serde(rename = "R_C")]
    pub r_c: f64,
    /// Unscaled; multiply by `scale`.
    #[serde(rename = "R_E")]
    pub r_e: f64,
    /// (r_X/r_0)⁴ or (s_X/s_0)⁴.
    pub scale: f64,
    #[serde(rename = "R_p")]
    pub r_p: f64,
}

impl CellResistanceBreakdown {
    pub const LABELS: [&'static str; 6] = ["R_S", "R_IS", "R_IB", "R_IC", "R_C", "R_E"];

    fn assemble(r_s: f64, r_is: f64, r_ib: f64, r_ic: f64, r_c: f64, r_e: f64, scale: f64) -> Self {
        Self {
            r_s,
            r_is,
            r_ib,
            r_ic,
            r_c,
            r_e,
            scale,
            r_p: r_s + r_is + r_ib + scale * (r_ic + r_c + r_e),
        }
    }

    /// Components as they enter R_p, with the hole-velocity scale applied.
    pub fn contributions(&self) -> [f64; 6] {
        [
            self.r_s,
            self.r_is,
            self.r_ib,
            self.scale * self.r_ic,
            self.scale * self.r_c,
            self.scale * self.r_e,
        ]
    }

    /// Contributions as percentages of R_p.
    pub fn percentages(&self) -> [f64; 6] {
        self.contributions().map(|r| 100.0 * r / self.r_p)
    }
}

/// Film term shared by both cell shapes: squeeze flow in an annulus of
/// outer radius `outer` draining into a hole of radius `inner`.
fn film_resistance(viscosity: f64, outer: f64, inner: f64, gap: f64, q_ch: f64) -> f64 {
    let ratio2 = (inner / outer).powi(2);
    12.0 * PI * viscosity * outer.powi(4) / (q_ch * gap.powi(3))
        * (0.5 * (outer / inner).ln() - 0.375 + 0.5 * ratio2 - 0.125 * ratio2 * ratio2)
}

fn check(
    model: ModelId,
    cell: CellResistanceBreakdown,
) -> Result<CellResistanceBreakdown, ModelError> {
    let parts = cell.contributions();
    if parts.iter().any(|r| !r.is_finite() || *r < 0.0) || !(cell.r_p > 0.0) {
        return Err(ModelError::domain(
            model,
            format!("cell resistance components {parts:?} are not all finite and non-negative"),
        ));
    }
    Ok(cell)
}

/// Circular perforation cell with equivalent radii r_X and r_0.
pub fn cell_resistance_circular(
    geom: &PlateGeometry,
    gas: &GasProperties,
) -> Result<CellResistanceBreakdown, ModelError> {
    let d = geom.derived();
    let (rx, r0) = (d.cell_radius, d.hole_radius);
    if r0 >= rx {
        return Err(ModelError::domain(
            ModelId::M5,
            "hole radius reaches the cell radius",
        ));
    }
    let mu = gas.viscosity;
    let (h, hc) = (geom.gap(), geom.thickness());
    let k_ch = knudsen(gas.mean_free_path, h);
    let k_tb = knudsen(gas.mean_free_path, r0);
    let q_ch = flow_rate_coefficient(FlowChannel::Channel, k_ch);
    let q_tb = flow_rate_coefficient(FlowChannel::Tube, k_tb);
    let b = r0 / rx;
    let b2 = b * b;

    let f_b = {
        let (x, y) = (r0 / h, hc / h);
        1.0 + x.powi(4) * y.powi(3) / (7.11 * (43.0 * y.powi(3) + 1.0))
    };
    let f_e = 1.0 + (r0 / h).powf(3.5) / (178.0 * (1.0 + 17.5 * k_ch));

    let delta_s = (0.56 - 0.32 * b + 0.86 * b2) / (1.0 + 2.5 * k_ch);
    let delta_b = 1.33 * (1.0 - 0.812 * b2) * (1.0 + 0.732 * k_tb) / (1.0 + k_ch) * f_b;
    let delta_c = (1.0 + 6.0 * k_tb) * (0.66 - 0.41 * b - 0.25 * b2);
    let delta_e =
        0.944 * 3.0 * PI * (1.0 + 0.216 * k_tb) / 16.0 * (1.0 + 0.2 * b2 - 0.754 * b2 * b2) * f_e;

    let r_s = film_resistance(mu, rx, r0, h, q_ch);
    let r_is = 6.0 * PI * mu * (rx * rx - r0 * r0).powi(2) / (r0 * h * h) * delta_s;
    let r_ib = 8.0 * PI * mu * r0 * delta_b;
    let r_ic = 8.0 * PI * mu * r0 * delta_c;
    let r_c = 8.0 * PI * mu * hc / q_tb;
    let r_e = 8.0 * PI * mu * delta_e * r0;
    let scale = (rx / r0).powi(4);

    check(
        ModelId::M5,
        CellResistanceBreakdown::assemble(r_s, r_is, r_ib, r_ic, r_c, r_e, scale),
    )
}

/// Outlet elongation of a square hole, in units of the hole side.
fn square_outlet_elongation(k_sq: f64, xi: f64, side_over_gap: f64) -> f64 {
    0.242 * (1.0 + 4.0 * k_sq) * (1.0 - xi.powi(4)) * (1.0 + 0.019 * side_over_gap.powf(2.83))
}

/// Square perforation cell of pitch s_X with a square hole of side s0.
pub fn cell_resistance_square(
    geom: &PlateGeometry,
    gas: &GasProperties,
) -> Result<CellResistanceBreakdown, ModelError> {
    let d = geom.derived();
    let (sx, s0) = (d.cell_pitch, geom.hole_side());
    let (rx, r0e, xi) = (d.cell_radius, d.square_hole_radius, d.xi);
    if r0e >= rx {
        return Err(ModelError::domain(
            ModelId::M6,
            "effective square-hole radius reaches the cell radius",
        ));
    }
    let mu = gas.viscosity;
    let (h, hc) = (geom.gap(), geom.thickness());
    let k_ch = knudsen(gas.mean_free_path, h);
    let k_sq = knudsen(gas.mean_free_path, s0);
    let q_ch = flow_rate_coefficient(FlowChannel::Channel, k_ch);
    let q_sq = flow_rate_coefficient(FlowChannel::Square, k_sq);

    let delta_s = 0.122 * (1.0 + 6.5 * xi - 3.8 * xi * xi);
    let delta_c = 0.302;
    let delta_e = square_outlet_elongation(k_sq, xi, s0 / h);

    let r_s = film_resistance(mu, rx, r0e, h, q_ch);
    let r_is = 3.0 * mu * (sx * sx - s0 * s0).powi(2) / (s0 * h * h) * delta_s;
    let r_ic = 28.454 * mu * s0 * delta_c;
    let r_c = 28.454 * mu * hc / q_sq;
    let r_e = 28.454 * mu * delta_e * s0;
    let scale = (sx / s0).powi(4);

    check(
        ModelId::M6,
        CellResistanceBreakdown::assemble(r_s, r_is, 0.0, r_ic, r_c, r_e, scale),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comparison::builtin_dataset;
    use approx::assert_relative_eq;

    #[test]
    fn breakdown_sums_to_total() {
        let gas = GasProperties::default();
        for rec in builtin_dataset() {
            for cell in [
                cell_resistance_circular(&rec.geom, &gas).unwrap(),
                cell_resistance_square(&rec.geom, &gas).unwrap(),
            ] {
                let sum: f64 = cell.contributions().iter().sum();
                assert_relative_eq!(sum, cell.r_p, max_relative = 1e-14);
                let pct: f64 = cell.percentages().iter().sum();
                assert!((pct - 100.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn square_cell_has_no_bend_term() {
        let gas = GasProperties::default();
        let cell = cell_resistance_square(&builtin_dataset()[0].geom, &gas).unwrap();
        assert_eq!(cell.r_ib, 0.0);
    }

    #[test]
    fn type_a_circular_contributions() {
        // frozen from an independent evaluation of the printed cell formulas
        let gas = GasProperties::default();
        let cell = cell_resistance_circular(&builtin_dataset()[0].geom, &gas).unwrap();
        let expected = [8.38, 9.67, 0.75, 6.27, 67.20, 7.72];
        for (got, want) in cell.percentages().iter().zip(expected) {
            assert!((got - want).abs() < 0.01, "{got} vs {want}");
        }
    }

    #[test]
    fn continuum_cells_finite() {
        let gas = GasProperties::default().with_mean_free_path(0.0);
        let geom = builtin_dataset()[0].geom;
        for cell in [
            cell_resistance_circular(&geom, &gas).unwrap(),
            cell_resistance_square(&geom, &gas).unwrap(),
        ] {
            assert!(cell
                .contributions()
                .iter()
                .all(|r| r.is_finite() && *r >= 0.0));
            assert!(cell.r_p > 0.0);
        }
    }

    #[test]
    fn outlet_elongation_vanishes_as_hole_fills_cell() {
        assert_eq!(square_outlet_elongation(0.013, 1.0, 3.0), 0.0);
        let near = square_outlet_elongation(0.013, 1.0 - 1e-6, 3.0);
        let open = square_outlet_elongation(0.013, 0.5, 3.0);
        assert!(near > 0.0 && near < 1e-5 * open);
    }

    #[test]
    fn oversized_square_hole_is_a_domain_error() {
        let gas = GasProperties::default();
        let mut dims = *builtin_dataset()[0].geom.dims();
        dims.wall = 1e-4 * dims.hole_side;
        let near_full = PlateGeometry::new(dims).unwrap();
        assert!(matches!(
            cell_resistance_square(&near_full, &gas),
            Err(ModelError::Domain { .. })
        ));
    }
}
