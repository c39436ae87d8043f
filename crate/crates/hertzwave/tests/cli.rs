//! End-to-end tests of the command-line interface: exit codes, JSON
//! schema, CSV round-tripping, and determinism.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hertzwave"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

#[test]
fn classify_reports_the_solitary_wave_as_json() {
    let out = run(&["classify", "--k", "2", "--g0", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["schema"], "hertzwave/1");
    assert_eq!(doc["class"]["kind"], "SolitaryWave");
    assert!((doc["c1"].as_f64().unwrap() + 0.17).abs() < 1e-12);
    assert!((doc["class"]["g1"].as_f64().unwrap() - 0.8).abs() < 1e-9);
}

#[test]
fn classify_flags_accept_level_aliases_and_negative_values() {
    let out = run(&["classify", "--k", "2", "--C1", "-0.17", "--E", "0.008"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["class"]["kind"], "SolitaryWave");
    assert!((doc["class"]["g0"].as_f64().unwrap() - 0.1).abs() < 1e-6);
}

#[test]
fn inadmissible_parameters_exit_3_with_the_failed_inequality() {
    // Asymptote above the inflection point: no solitary wave.
    let out = run(&["classify", "--k", "2", "--g0", "0.5"]);
    assert_eq!(out.status.code(), Some(3));
    let doc = stdout_json(&out);
    assert_eq!(doc["class"]["kind"], "NoWave");
    assert!(doc["class"]["reason"].as_str().is_some());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    // Exponent at the linear-chain limit.
    let out = run(&["classify", "--k", "1", "--g0", "0.1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn invalid_requests_exit_2() {
    // No wave parameterization at all.
    assert_eq!(run(&["classify", "--k", "2"]).status.code(), Some(2));
    // Conflicting parameterization.
    assert_eq!(
        run(&["classify", "--k", "2", "--g0", "0.1", "--g1", "0.8", "--cusped"])
            .status
            .code(),
        Some(2)
    );
    // Unknown flag (clap's own exit code).
    assert_eq!(
        run(&["classify", "--k", "2", "--g0", "0.1", "--frobnicate"])
            .status
            .code(),
        Some(2)
    );
    // Profile output that would collide with its own sidecar.
    let dir = tempfile::tempdir().unwrap();
    let out_json = dir.path().join("wave.json");
    assert_eq!(
        run(&["profile", "--k", "2", "--g0", "0.1", "--out", out_json.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    // Out-of-range tail cutoff.
    let out_csv = dir.path().join("wave.csv");
    assert_eq!(
        run(&[
            "profile", "--k", "2", "--g0", "0.1", "--g-floor", "0.5", "--out",
            out_csv.to_str().unwrap()
        ])
        .status
        .code(),
        Some(2)
    );
}

fn read_rows(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect()
}

#[test]
fn profile_writes_csv_plus_sidecar_with_the_closed_wavelength() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("wave.csv");
    let out = run(&[
        "profile", "--k", "3", "--C1", "0", "--g1", "0.9", "--samples", "64", "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let rows = read_rows(&csv);
    assert_eq!(rows[0], "xi,g,gprime");
    assert_eq!(rows.len(), 65);
    let first: Vec<f64> = rows[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert!((first[1] - 0.9).abs() < 1e-12, "peak sample g = {}", first[1]);

    let sidecar: Value =
        serde_json::from_str(&std::fs::read_to_string(csv.with_extension("json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["schema"], "hertzwave/1");
    let wavelength = sidecar["wavelength"].as_f64().unwrap();
    assert!((wavelength - std::f64::consts::PI).abs() < 1e-9 * wavelength);
    assert!(sidecar["drift_momentum_flux"].as_f64().unwrap() < 1e-7);
    assert!(sidecar["drift_energy_flux"].as_f64().unwrap() < 1e-7);
}

#[test]
fn profile_csv_round_trips_bit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("solitary.csv");
    let out = run(&[
        "profile", "--k", "2.5", "--g0", "0.15", "--samples", "48", "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_rows(&csv);
    assert!(rows.len() > 40);
    for row in &rows[1..] {
        for field in row.split(',') {
            let value: f64 = field.parse().expect("parseable float");
            // Re-serializing the parsed value must reproduce the exact
            // token: 17 significant digits identify a double uniquely.
            assert_eq!(format!("{value:.16e}"), field, "round-trip drift in {row}");
        }
    }
}

#[test]
fn conserved_matches_the_reference_momentum() {
    let out = run(&["conserved", "--k", "2", "--g0", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert_eq!(doc["kind"], "SolitaryWave");
    let p = doc["conserved"]["momentum"].as_f64().unwrap();
    assert!((p - 7.8814053175250703).abs() < 1e-12 * p);
    // Forward unit-speed wave: signed values equal the stored magnitudes.
    assert_eq!(doc["signed_momentum"], doc["conserved"]["momentum"]);
}

#[test]
fn verify_passes_and_is_deterministic() {
    let args = ["verify", "--k", "2.5", "--jets", "300"];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["pass"], true);
    for law in doc["laws"].as_array().unwrap() {
        assert!(law["max_rel_residual"].as_f64().unwrap() < 1e-12);
    }
    assert_eq!(doc["profiles"].as_array().unwrap().len(), 5);

    let again = run(&args);
    assert_eq!(again.stdout, out.stdout, "same seed must reproduce the report");
}

#[test]
fn sweep_writes_ordered_rows_and_handles_the_existence_boundary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let args = [
        "sweep", "--k", "2", "--over", "g0", "--from", "0.05", "--to", "0.45", "--points", "9",
        "--out", csv.to_str().unwrap(),
    ];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let rows = read_rows(&csv);
    assert_eq!(
        rows[0],
        "value,kind,node_behaviour,g0,g1,m0,c1,e,half_wavelength,orientation,momentum,energy,energy_momentum"
    );
    assert_eq!(rows.len(), 10);
    let mut previous = f64::NEG_INFINITY;
    for row in &rows[1..] {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 13);
        let value: f64 = fields[0].parse().unwrap();
        assert!(value > previous, "grid order broken at {row}");
        previous = value;
        // Below the inflection point the asymptote gives a solitary wave;
        // above it nothing propagates.
        let expected = if value < 1.0 / 3.0 { "SolitaryWave" } else { "NoWave" };
        assert_eq!(fields[1], expected, "at value {value}");
    }

    let bytes = std::fs::read(&csv).unwrap();
    run(&args);
    assert_eq!(std::fs::read(&csv).unwrap(), bytes, "sweep output must be deterministic");
}

#[test]
fn figures_bundle_is_complete_and_cross_checked() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "figures", "--samples", "96", "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["schema"], "hertzwave/1");
    let profiles = manifest["profiles"].as_array().unwrap();
    let curves = manifest["curves"].as_array().unwrap();
    assert_eq!(profiles.len(), 28);
    assert_eq!(curves.len(), 9);
    for entry in profiles.iter().chain(curves) {
        let file = entry["file"].as_str().unwrap();
        let rows = read_rows(&dir.path().join(file));
        assert!(rows.len() > 1, "{file} has no data rows");
    }
    let header = read_rows(&dir.path().join(curves[0]["file"].as_str().unwrap()))[0].clone();
    assert_eq!(header, "parameter,orientation,momentum,energy,energy_momentum");
}
