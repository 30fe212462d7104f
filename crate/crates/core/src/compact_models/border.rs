//! Rectangular plate with both border escape and hole flow.
//!
//! The damping is a double series over odd mode indices (m, n). Each mode
//! couples the film resistance of the whole plate (G) in parallel with the
//! perforation resistance projected onto that mode (R).

use std::f64::consts::PI;

use super::{ModelError, ModelId, ModelResult};
use crate::flow_regime::{flow_rate_coefficient, knudsen, FlowChannel, GasProperties};
use crate::geometry::PlateGeometry;

/// A shell adding less than this fraction of the running sum ends the summation.
pub const SERIES_REL_TOL: f64 = 1e-10;
/// Largest odd index summed.
pub const MAX_ODD_INDEX: usize = 4001;

/// Outcome of a truncated series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    pub terms: usize,
    pub converged: bool,
}

/// Mode-series of a perforated rectangle with border elongation applied.
#[derive(Debug, Clone, Copy)]
pub struct BorderSeries {
    /// π⁶h³Q_ch/(768 µ a b) with effective sides.
    film_scale: f64,
    inv_a2: f64,
    inv_b2: f64,
    /// π⁴/(64 M N R_p); zero for sealed holes.
    hole_admittance: f64,
}

impl BorderSeries {
    /// `r_p` may be `f64::INFINITY` for a plate without open holes.
    pub fn new(geom: &PlateGeometry, gas: &GasProperties, r_p: f64) -> Self {
        let h = geom.gap();
        let k_ch = knudsen(gas.mean_free_path, h);
        let q_ch = flow_rate_coefficient(FlowChannel::Channel, k_ch);
        let elongation = 1.3 * (1.0 + 3.3 * k_ch) * h;
        let a = geom.width() + elongation;
        let b = geom.length() + elongation;
        Self {
            film_scale: PI.powi(6) * h.powi(3) * q_ch / (768.0 * gas.viscosity * a * b),
            inv_a2: 1.0 / (a * a),
            inv_b2: 1.0 / (b * b),
            hole_admittance: PI.powi(4) / (64.0 * geom.hole_count() * r_p),
        }
    }

    pub fn term(&self, m: usize, n: usize) -> f64 {
        let (m2, n2) = ((m * m) as f64, (n * n) as f64);
        let mn2 = m2 * n2;
        let g = (m2 * self.inv_a2 + n2 * self.inv_b2) * mn2 * self.film_scale;
        1.0 / (g + mn2 * self.hole_admittance)
    }

    /// Sum of all terms with max(m, n) = k, k odd.
    pub fn shell(&self, k: usize) -> f64 {
        let edge: f64 = (1..=k).step_by(2).map(|n| self.term(k, n)).sum();
        let side: f64 = (1..k).step_by(2).map(|m| self.term(m, k)).sum();
        edge + side
    }

    /// Running sums after each successive shell k = 1, 3, 5, …
    pub fn partial_sums(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=MAX_ODD_INDEX).step_by(2).scan(0.0, move |acc, k| {
            *acc += self.shell(k);
            Some(*acc)
        })
    }

    pub fn sum(&self) -> SeriesSum {
        let mut value = 0.0;
        let mut terms = 0;
        for k in (1..=MAX_ODD_INDEX).step_by(2) {
            let shell = self.shell(k);
            value += shell;
            terms += k;
            if shell < SERIES_REL_TOL * value {
                return SeriesSum {
                    value,
                    terms,
                    converged: true,
                };
            }
        }
        SeriesSum {
            value,
            terms,
            converged: false,
        }
    }
}

/// Damping of the whole plate given the resistance `r_p` of one cell.
pub fn damping_border_coupled(
    geom: &PlateGeometry,
    gas: &GasProperties,
    r_p: f64,
) -> Result<ModelResult, ModelError> {
    if !(r_p > 0.0) {
        return Err(ModelError::domain(
            ModelId::M3,
            format!("cell resistance {r_p} is not positive"),
        ));
    }
    let sum = BorderSeries::new(geom, gas, r_p).sum();
    if !sum.converged {
        return Err(ModelError::NotConverged {
            model: ModelId::M3,
            partial: sum.value,
            terms: sum.terms,
        });
    }
    Ok(ModelResult {
        model: ModelId::M3,
        c: sum.value,
        breakdown: None,
        series_terms: sum.terms,
        converged: true,
    })
}
