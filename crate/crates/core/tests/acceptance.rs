use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use perfdamp::compact_models::{evaluate, BorderSeries, ModelId, ModelOptions, ModelResult};
use perfdamp::comparison::{builtin_dataset, reproduce, TableId};
use perfdamp::flow_regime::{regime_report, reynolds_number, squeeze_number, GasProperties};
use perfdamp::frf::{extract, resonance_grid, synth_frf, ExtractOptions, Resonator};
use perfdamp::geometry::PlateGeometry;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn within(name: &str, value: f64, target: f64, tol: f64) -> Result<String, String> {
    if (value - target).abs() <= tol {
        Ok(format!("{name}={value:.4e}"))
    } else {
        Err(format!("{name}={value:.6e}, expected {target:e} ± {tol:e}"))
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn deadline(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:?}, limit {limit:?}")
    })
}

fn characteristic_numbers() -> Outcome {
    let start = Instant::now();
    let gas = GasProperties::default();
    let geom = builtin_dataset()[0].geom;
    let report = regime_report(&geom, &gas, 200e3);
    let omega = 2.0 * PI * 200e3;
    let sigma_per_omega =
        squeeze_number(gas.viscosity, geom.width(), 1.0, gas.pressure, geom.gap());
    let re_per_omega = reynolds_number(gas.density, 4e-6, 1.0, gas.viscosity);
    let re = reynolds_number(gas.density, 4e-6, omega, gas.viscosity);
    let elapsed = start.elapsed();
    let parts = [
        within("K_ch", report.gap_knudsen, 0.041, 0.001),
        within("K_hole", report.hole_knudsen, 0.013, 0.0005),
        within("sigma/omega", sigma_per_omega, 3.8e-6, 0.02 * 3.8e-6),
        within("sigma", report.sigma_plate, 4.8, 0.1),
        within("sigma_cell", report.sigma_cell, 0.03, 0.005),
        within("Re/omega", re_per_omega, 0.998e-6, 0.01 * 0.998e-6),
        within("Re", re, 1.255, 0.01),
    ];
    let mut details = Vec::new();
    for p in parts {
        details.push(p?);
    }
    deadline(elapsed, Duration::from_millis(10))?;
    Ok(format!("{} in {elapsed:?}", details.join(", ")))
}

fn table_check(id: TableId, limit: Duration) -> Outcome {
    let start = Instant::now();
    let table = reproduce(id, &GasProperties::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let breaches = table.breaches();
    ensure(breaches.is_empty(), || {
        let list: Vec<String> = breaches
            .iter()
            .map(|c| {
                format!(
                    "{}/{}: {:.2} vs {:.2}",
                    c.device, c.column, c.reproduced, c.published
                )
            })
            .collect();
        format!(
            "{} cells outside tolerance: {}",
            list.len(),
            list.join("; ")
        )
    })?;
    deadline(elapsed, limit)?;
    Ok(format!(
        "{} cells, max |diff| {:.2} pp (limit {} pp), {elapsed:?}",
        table.cells.len(),
        table.max_abs_diff_pp(),
        id.tolerance_pp()
    ))
}

fn table3() -> Outcome {
    table_check(TableId::Errors, Duration::from_secs(5))
}

fn table4() -> Outcome {
    let detail = table_check(TableId::CellErrors, Duration::from_secs(5))?;
    let gas = GasProperties::default();
    for rec in builtin_dataset() {
        let c = |m| evaluate(m, &rec.geom, &gas, ModelOptions::default()).map(|r| r.c);
        let c = |m| c(m).map_err(|e| e.to_string());
        let (c3, c4, c5, c6) = (
            c(ModelId::M3)?,
            c(ModelId::M4)?,
            c(ModelId::M5)?,
            c(ModelId::M6)?,
        );
        ensure(c5 >= c3 && c6 >= c4, || {
            format!(
                "device {}: c_M5={c5:e} c_M3={c3:e} c_M6={c6:e} c_M4={c4:e}",
                rec.id
            )
        })?;
    }
    Ok(format!(
        "{detail}, c_M5 ≥ c_M3 and c_M6 ≥ c_M4 on all devices"
    ))
}

fn table5() -> Outcome {
    let detail = table_check(TableId::Contributions, Duration::from_secs(5))?;
    let table =
        reproduce(TableId::Contributions, &GasProperties::default()).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for d in ['A', 'B', 'C', 'D', 'E', 'F'] {
        let sum: f64 = table.row(d).iter().sum();
        worst = worst.max((sum - 100.0).abs());
        ensure((sum - 100.0).abs() <= 0.01, || {
            format!("row {d} sums to {sum}")
        })?;
    }
    let (e, f) = (table.row('E'), table.row('F'));
    let spread = e
        .iter()
        .zip(&f)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    ensure(spread <= 1e-12, || {
        format!("rows E and F differ by {spread:e}")
    })?;
    Ok(format!(
        "{detail}, row sums within {worst:.1e} of 100, E/F spread {spread:.1e}"
    ))
}

fn m3_m4_agreement() -> Outcome {
    let table = reproduce(TableId::Errors, &GasProperties::default()).map_err(|e| e.to_string())?;
    let mut worst = (0.0f64, ' ');
    for d in ['A', 'B', 'C', 'D', 'E', 'F'] {
        let gap = (table.value(d, "M3").unwrap() - table.value(d, "M4").unwrap()).abs();
        if gap > worst.0 {
            worst = (gap, d);
        }
    }
    ensure(worst.0 <= 3.5, || {
        format!("|Δ3−Δ4| = {:.2} pp on device {}", worst.0, worst.1)
    })?;
    Ok(format!(
        "max |Δ3−Δ4| = {:.2} pp (device {}), limit 3.5 pp",
        worst.0, worst.1
    ))
}

fn beam_damping() -> Outcome {
    let geom = builtin_dataset()[0].geom;
    let c = evaluate(
        ModelId::Beams,
        &geom,
        &GasProperties::default(),
        ModelOptions::default(),
    )
    .map_err(|e| e.to_string())?
    .c;
    ensure((0.12e-6..=0.17e-6).contains(&c), || {
        format!("c_beams = {c:e} outside [0.12e-6, 0.17e-6]")
    })?;
    Ok(format!(
        "c_beams = {:.4e} Ns/m vs published 0.16e-6 ({:+.1} %)",
        c,
        100.0 * (c - 0.16e-6) / 0.16e-6
    ))
}

fn property_suite() -> Outcome {
    let start = Instant::now();
    let gas = GasProperties::default();
    let devices = builtin_dataset();
    fn c(m: ModelId, geom: &PlateGeometry, gas: &GasProperties) -> Result<ModelResult, String> {
        evaluate(m, geom, gas, ModelOptions::default()).map_err(|e| format!("{m}: {e}"))
    }

    for rec in &devices {
        for m in ModelId::PLATE_MODELS {
            let r = c(m, &rec.geom, &gas)?;
            ensure(r.c > 0.0 && r.c.is_finite() && r.converged, || {
                format!(
                    "device {} {m}: c = {:e}, converged {}",
                    rec.id, r.c, r.converged
                )
            })?;
        }
    }

    for m in ModelId::PLATE_MODELS {
        let values = devices[..4]
            .iter()
            .map(|rec| c(m, &rec.geom, &gas).map(|r| r.c))
            .collect::<Result<Vec<_>, _>>()?;
        ensure(values.windows(2).all(|w| w[1] < w[0]), || {
            format!("{m} not decreasing A→D: {values:?}")
        })?;
    }

    for rec in &devices {
        let r_p = c(ModelId::M5, &rec.geom, &gas)?
            .breakdown
            .expect("cell breakdown")
            .r_p;
        let series = BorderSeries::new(&rec.geom, &gas, r_p);
        let mut prev = 0.0;
        for (k, s) in series.partial_sums().enumerate() {
            ensure(s >= prev, || {
                format!(
                    "device {}: partial sum drops at shell {}",
                    rec.id,
                    2 * k + 1
                )
            })?;
            prev = s;
        }
    }

    for rec in &devices {
        let t = rec.geom.transposed();
        for m in [ModelId::M3, ModelId::M4] {
            let (a, b) = (c(m, &rec.geom, &gas)?.c, c(m, &t, &gas)?.c);
            ensure((a - b).abs() <= 1e-9 * a, || {
                format!("device {} {m}: {a:e} vs transposed {b:e}", rec.id)
            })?;
        }
    }

    let lambdas = [0.0, 65e-9, 130e-9];
    let slip = ModelOptions { slip_correct: true };
    for rec in &devices {
        for m in ModelId::PLATE_MODELS {
            let values = lambdas
                .iter()
                .map(|&l| evaluate(m, &rec.geom, &gas.with_mean_free_path(l), slip).map(|r| r.c))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            ensure(values.windows(2).all(|w| w[1] < w[0]), || {
                format!("device {} {m}: c not decreasing in λ: {values:?}", rec.id)
            })?;
        }
    }

    let mut worst_q = 0.0f64;
    for q in [50.0, 500.0, 5000.0] {
        let (mass, f0) = (1e-9, 200e3);
        let res = Resonator::tuned(mass, 2.0 * PI * f0 * mass / q, f0, 1e-9);
        let curve = synth_frf(&res, &resonance_grid(f0, q, 5.0, 801)).map_err(|e| e.to_string())?;
        let got = extract(&curve, ExtractOptions::default())
            .map_err(|e| e.to_string())?
            .q;
        let err = (got - q).abs() / q;
        worst_q = worst_q.max(err);
        ensure(err <= 0.02, || format!("Q = {q}: extracted {got}"))?;
    }

    let elapsed = start.elapsed();
    deadline(elapsed, Duration::from_secs(30))?;
    Ok(format!(
        "positivity, A→D ordering, partial sums, L↔W symmetry, λ ordering, FRF round trip (worst Q error {:.3} %) in {elapsed:?}",
        100.0 * worst_q
    ))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("run{i}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_perfdamp"))
            .args(["compare", "--table", "all", "--format", "csv", "--out"])
            .arg(&path)
            .status()
            .map_err(|e| e.to_string())?;
        ensure(status.success(), || format!("run {i} exited with {status}"))?;
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    ensure(outputs[0] == outputs[1], || "outputs differ".to_string())?;
    Ok(format!(
        "two runs byte-identical ({} bytes)",
        outputs[0].len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("characteristic numbers", characteristic_numbers),
        ("full-model errors (table 3)", table3),
        ("cell-model errors (table 4)", table4),
        ("resistance contributions (table 5)", table5),
        ("M3/M4 agreement", m3_m4_agreement),
        ("beam damping", beam_damping),
        ("property suite", property_suite),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
