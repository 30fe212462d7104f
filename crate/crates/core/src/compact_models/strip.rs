//! Modified-Reynolds-equation models (M1, M2).
//!
//! The perforation is smeared into a distributed leak, turning the film
//! equation into `∇²p − p/l² = source`. The decay length `l` sets how far
//! from the border the border flow matters. Both models assume continuum flow.

use std::f64::consts::PI;

use super::border::{MAX_ODD_INDEX, SERIES_REL_TOL};
use super::{ModelError, ModelId, ModelOptions, ModelResult};
use crate::flow_regime::{flow_rate_coefficient, knudsen, FlowChannel, GasProperties};
use crate::geometry::PlateGeometry;

/// Intermediates shared by M1 and M2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripLeak {
    /// Decay length l (m).
    pub decay_length: f64,
    /// Closed-border pressure per unit plate velocity, 8µH_eff·η/(β²r_0²) (Pa·s/m).
    pub leak_resistance: f64,
    /// Hole length including end elongation, H_eff = h_c + 3πr_0/8.
    pub effective_thickness: f64,
    /// Cell-annulus correction η(β).
    pub eta: f64,
}

/// Decay length and distributed leak resistance of the perforated film.
pub fn strip_decay_length(
    geom: &PlateGeometry,
    gas: &GasProperties,
    model: ModelId,
) -> Result<StripLeak, ModelError> {
    let d = geom.derived();
    let (r0, beta) = (d.hole_radius, d.beta);
    if !(beta > 0.0 && beta < 1.0) {
        return Err(ModelError::domain(
            model,
            format!("radius ratio β = {beta} outside (0, 1)"),
        ));
    }
    let h = geom.gap();
    let effective_thickness = geom.thickness() + 3.0 * PI * r0 / 8.0;
    let k_beta = 4.0 * beta.powi(2) - beta.powi(4) - 4.0 * beta.ln() - 3.0;
    // the annulus term is referred to H_eff, the same thickness that
    // multiplies it, so H_eff·η = H_eff + 3r0⁴K/(16h³)
    let eta = 1.0 + 3.0 * r0.powi(4) * k_beta / (16.0 * effective_thickness * h.powi(3));
    let leak_resistance =
        8.0 * gas.viscosity * effective_thickness * eta / (beta.powi(2) * r0.powi(2));
    let decay_length =
        (2.0 * h.powi(3) * effective_thickness * eta / (3.0 * beta.powi(2) * r0.powi(2))).sqrt();
    if !(decay_length.is_finite() && decay_length > 0.0 && leak_resistance.is_finite()) {
        return Err(ModelError::domain(
            model,
            format!("decay length {decay_length} is not finite"),
        ));
    }
    Ok(StripLeak {
        decay_length,
        leak_resistance,
        effective_thickness,
        eta,
    })
}

fn slip_divisor(geom: &PlateGeometry, gas: &GasProperties, opts: ModelOptions) -> f64 {
    if opts.slip_correct {
        flow_rate_coefficient(
            FlowChannel::Channel,
            knudsen(gas.mean_free_path, geom.gap()),
        )
    } else {
        1.0
    }
}

/// 1 − tanh(x)/x, with the Taylor form where the subtraction cancels.
fn edge_factor(x: f64) -> f64 {
    if x < 1e-3 {
        let x2 = x * x;
        x2 / 3.0 - 2.0 * x2 * x2 / 15.0
    } else {
        1.0 - x.tanh() / x
    }
}

/// Long narrow plate: pressure varies only across the width.
pub fn damping_m1(
    geom: &PlateGeometry,
    gas: &GasProperties,
    opts: ModelOptions,
) -> Result<ModelResult, ModelError> {
    let leak = strip_decay_length(geom, gas, ModelId::M1)?;
    let a = geom.width() / 2.0;
    let l = leak.decay_length;
    let edge_loss = edge_factor(a / l);
    let c =
        2.0 * a * geom.length() * leak.leak_resistance * edge_loss / slip_divisor(geom, gas, opts);
    if !(c.is_finite() && c > 0.0) {
        return Err(ModelError::domain(
            ModelId::M1,
            format!("damping {c} is not positive"),
        ));
    }
    Ok(ModelResult::closed_form(ModelId::M1, c))
}

/// Dimensionless damping γ of a rectangle with half-sides a (across) and b.
///
/// Returns γ and the number of series terms used.
fn rectangle_gamma(alpha: f64, kappa: f64) -> Result<(f64, usize), ModelError> {
    let mut sum = 0.0;
    let mut terms = 0;
    let mut converged = false;
    for n in (1..=MAX_ODD_INDEX).step_by(2) {
        let x = 1.0 + (n as f64 * PI * alpha / 2.0).powi(2);
        let term = (x.sqrt() / (alpha * kappa)).tanh() / ((n * n) as f64 * x * x);
        sum += term;
        terms += 1;
        if term < SERIES_REL_TOL * sum {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(ModelError::NotConverged {
            model: ModelId::M2,
            partial: sum,
            terms,
        });
    }
    // sinh²(1/α)/sinh(2/α) = tanh(1/α)/2 without overflow for small α
    let strip = 3.0 * alpha.powi(2) - 3.0 * alpha.powi(3) * (1.0 / alpha).tanh();
    let ends = 24.0 * alpha.powi(3) * kappa / PI.powi(2) * sum;
    Ok((strip - ends, terms))
}

/// Rectangle of arbitrary aspect ratio: border loss on all four sides.
pub fn damping_m2(
    geom: &PlateGeometry,
    gas: &GasProperties,
    opts: ModelOptions,
) -> Result<ModelResult, ModelError> {
    let leak = strip_decay_length(geom, gas, ModelId::M2)?;
    let a = geom.width() / 2.0;
    let b = geom.length() / 2.0;
    let (gamma, terms) = rectangle_gamma(leak.decay_length / a, a / b)?;
    let c = gamma * gas.viscosity * (2.0 * a).powi(3) * (2.0 * b)
        / geom.gap().powi(3)
        / slip_divisor(geom, gas, opts);
    if !(c.is_finite() && c > 0.0) {
        return Err(ModelError::domain(
            ModelId::M2,
            format!("damping {c} is not positive"),
        ));
    }
    Ok(ModelResult {
        series_terms: terms,
        ..ModelResult::closed_form(ModelId::M2, c)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comparison::builtin_dataset;
    use crate::geometry::PlateDimensions;
    use approx::assert_relative_eq;

    #[test]
    fn m1_matches_strip_limit_of_m2() {
        // a very long plate removes the end losses from M2
        let gas = GasProperties::default();
        let dims = *builtin_dataset()[0].geom.dims();
        let long = PlateGeometry::new(PlateDimensions {
            length: 1000.0 * dims.length,
            holes_along_length: 36_000,
            ..dims
        })
        .unwrap();
        let m1 = damping_m1(&long, &gas, ModelOptions::default()).unwrap();
        let m2 = damping_m2(&long, &gas, ModelOptions::default()).unwrap();
        assert_relative_eq!(m1.c, m2.c, max_relative = 1e-3);
    }

    #[test]
    fn edge_factor_is_continuous() {
        let below = edge_factor(0.999_999e-3);
        let above = edge_factor(1.000_001e-3);
        assert_relative_eq!(below, above, max_relative = 1e-5);
        assert_relative_eq!(edge_factor(2.0), 1.0 - 2f64.tanh() / 2.0);
    }

    #[test]
    fn m1_vanishes_for_huge_gap() {
        let gas = GasProperties::default();
        let dims = *builtin_dataset()[0].geom.dims();
        let geom = PlateGeometry::new(PlateDimensions { gap: 1.0, ..dims }).unwrap();
        let c = damping_m1(&geom, &gas, ModelOptions::default()).unwrap().c;
        assert!(c < 1e-15, "{c}");
    }

    #[test]
    fn m1_m2_close_for_long_plate() {
        let gas = GasProperties::default();
        let geom = builtin_dataset()[0].geom;
        let m1 = damping_m1(&geom, &gas, ModelOptions::default()).unwrap().c;
        let m2 = damping_m2(&geom, &gas, ModelOptions::default()).unwrap().c;
        assert!(m2 < m1);
        assert!((m1 - m2).abs() / m1 < 0.05);
    }

    #[test]
    fn slip_correction_divides_by_gap_coefficient() {
        let gas = GasProperties::default();
        let geom = builtin_dataset()[1].geom;
        let q_ch = 1.0 + 6.0 * gas.mean_free_path / geom.gap();
        for f in [damping_m1, damping_m2] {
            let plain = f(&geom, &gas, ModelOptions::default()).unwrap().c;
            let slip = f(&geom, &gas, ModelOptions { slip_correct: true })
                .unwrap()
                .c;
            assert_relative_eq!(slip, plain / q_ch, max_relative = 1e-14);
        }
    }

    #[test]
    fn continuum_models_ignore_mean_free_path() {
        let geom = builtin_dataset()[0].geom;
        let a = damping_m1(&geom, &GasProperties::default(), ModelOptions::default()).unwrap();
        let b = damping_m1(
            &geom,
            &GasProperties::default().with_mean_free_path(0.0),
            ModelOptions::default(),
        )
        .unwrap();
        assert_eq!(a.c, b.c);
    }
}
