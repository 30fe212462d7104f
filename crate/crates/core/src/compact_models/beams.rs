//! Film damping under the supporting beams.

use crate::flow_regime::{flow_rate_coefficient, knudsen, FlowChannel, GasProperties};
use crate::geometry::BeamGeometry;

/// Damping of `beams.count` beams of length L_b and width W_b over a gap `gap`.
///
/// Each beam is a narrow strip with its width widened by 1.3h for border
/// elongation, slip-corrected with the gap coefficient Q_ch.
pub fn beam_damping(beams: &BeamGeometry, gap: f64, gas: &GasProperties) -> f64 {
    let q_ch = flow_rate_coefficient(FlowChannel::Channel, knudsen(gas.mean_free_path, gap));
    f64::from(beams.count) * beams.length * (beams.width + 1.3 * gap).powi(3) * gas.viscosity
        / (3.0 * gap.powi(3) * q_ch)
}
