use std::f64::consts::PI;

use proptest::prelude::*;

use perfdamp::compact_models::{evaluate, BorderSeries, ModelId, ModelOptions};
use perfdamp::comparison::builtin_dataset;
use perfdamp::frf::{
    extract, resonance_grid, synth_frf, CrossingSource, ExtractOptions, Resonator,
};
use perfdamp::geometry::{PlateDimensions, PlateGeometry};
use perfdamp::GasProperties;

const UM: f64 = 1e-6;

fn c(model: ModelId, geom: &PlateGeometry, gas: &GasProperties) -> f64 {
    evaluate(model, geom, gas, ModelOptions::default())
        .unwrap()
        .c
}

prop_compose! {
    fn plate()(s0 in 3.0..9.0f64, s1 in 2.0..6.0f64, h in 1.0..3.0f64, m in 8u32..40, n in 4u32..16)
        -> PlateGeometry {
        let pitch = s0 + s1;
        PlateGeometry::new(PlateDimensions {
            length: (f64::from(m) * pitch + s1) * UM,
            width: (f64::from(n) * pitch + s1) * UM,
            holes_along_length: m,
            holes_along_width: n,
            hole_side: s0 * UM,
            wall: s1 * UM,
            gap: h * UM,
            thickness: 15.0 * UM,
            beams: None,
        })
        .unwrap()
    }
}

fn resonator(q: f64, f0: f64) -> Resonator {
    let mass = 1e-9;
    Resonator::tuned(mass, 2.0 * PI * f0 * mass / q, f0, 1e-9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn all_models_positive(geom in plate()) {
        let gas = GasProperties::default();
        for m in ModelId::PLATE_MODELS {
            let r = evaluate(m, &geom, &gas, ModelOptions::default()).unwrap();
            prop_assert!(r.c > 0.0 && r.c.is_finite() && r.converged, "{m}: {r:?}");
        }
    }

    #[test]
    fn border_flow_lowers_damping(geom in plate()) {
        let gas = GasProperties::default();
        prop_assert!(c(ModelId::M3, &geom, &gas) <= c(ModelId::M5, &geom, &gas));
        prop_assert!(c(ModelId::M4, &geom, &gas) <= c(ModelId::M6, &geom, &gas));
    }

    #[test]
    fn transposing_plate_keeps_damping(geom in plate()) {
        let gas = GasProperties::default();
        let t = geom.transposed();
        for m in [ModelId::M3, ModelId::M4, ModelId::M5, ModelId::M6] {
            let (a, b) = (c(m, &geom, &gas), c(m, &t, &gas));
            prop_assert!((a - b).abs() <= 1e-9 * a, "{m}: {a:e} vs {b:e}");
        }
    }

    #[test]
    fn rarefaction_lowers_damping(geom in plate(), l1 in 0.0..100e-9f64, dl in 5e-9..100e-9f64) {
        let gas = GasProperties::default();
        for m in [ModelId::M3, ModelId::M4, ModelId::M5, ModelId::M6] {
            let lo = c(m, &geom, &gas.with_mean_free_path(l1));
            let hi = c(m, &geom, &gas.with_mean_free_path(l1 + dl));
            prop_assert!(hi < lo, "{m}: {lo:e} → {hi:e}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn partial_sums_never_decrease(geom in plate(), r_p in 1e-9..1e-5f64) {
        let series = BorderSeries::new(&geom, &GasProperties::default(), r_p);
        let sums: Vec<f64> = series.partial_sums().take(200).collect();
        prop_assert!(sums.windows(2).all(|w| w[1] >= w[0]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn frf_round_trip(q in 30.0..8000.0f64, f0 in 1e4..1e6f64) {
        let res = resonator(q, f0);
        let curve = synth_frf(&res, &resonance_grid(f0, q, 5.0, 801)).unwrap();
        let out = extract(&curve, ExtractOptions::default()).unwrap();
        prop_assert!((out.q / q - 1.0).abs() < 0.02, "Q {q}: {}", out.q);
        prop_assert!((out.f0 / f0 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn frf_scale_invariance(q in 30.0..8000.0f64, k in -20i32..20, factor in 1e-3..1e3f64) {
        let f0 = 150e3;
        let curve = synth_frf(&resonator(q, f0), &resonance_grid(f0, q, 5.0, 401)).unwrap();
        let base = extract(&curve, ExtractOptions::default()).unwrap();
        let pow2 = extract(&curve.scaled(2f64.powi(k)).unwrap(), ExtractOptions::default()).unwrap();
        prop_assert_eq!(base.q, pow2.q);
        prop_assert_eq!(base.f0, pow2.f0);
        let any = extract(&curve.scaled(factor).unwrap(), ExtractOptions::default()).unwrap();
        prop_assert!((any.q / base.q - 1.0).abs() < 1e-9, "{} vs {}", any.q, base.q);
    }
}

#[test]
fn reference_devices_order_by_hole_size() {
    let gas = GasProperties::default();
    let devices = builtin_dataset();
    for m in ModelId::PLATE_MODELS {
        let values: Vec<f64> = devices[..4].iter().map(|r| c(m, &r.geom, &gas)).collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]), "{m}: {values:?}");
    }
}

#[test]
fn grid_refinement_converges() {
    let (q, f0) = (500.0, 200e3);
    let res = resonator(q, f0);
    for crossings in [CrossingSource::Polynomial, CrossingSource::Raw] {
        let opts = ExtractOptions {
            window: Some(21),
            crossings,
        };
        let errors: Vec<f64> = [201, 401, 801, 1601]
            .iter()
            .map(|&n| {
                let curve = synth_frf(&res, &resonance_grid(f0, q, 5.0, n)).unwrap();
                (extract(&curve, opts).unwrap().q - q).abs()
            })
            .collect();
        assert!(
            errors.windows(2).all(|w| w[1] < w[0]),
            "{crossings:?}: {errors:?}"
        );
        let changes: Vec<f64> = errors.windows(2).map(|w| w[0] - w[1]).collect();
        assert!(
            changes.windows(2).all(|w| w[1] < w[0]),
            "{crossings:?}: {changes:?}"
        );
    }
}
