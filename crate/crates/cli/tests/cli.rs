//! End-to-end runs of the `nvespin` binary: outputs, determinism, the
//! resolved-config round trip and the exit-code contract.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_nvespin");

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn bundled(name: &str) -> String {
    manifest_dir().join("data").join(name).display().to_string()
}

struct Run {
    output: Output,
    out: PathBuf,
}

impl Run {
    fn code(&self) -> i32 {
        self.output.status.code().expect("exit code")
    }

    fn stdout(&self) -> String {
        String::from_utf8_lossy(&self.output.stdout).into_owned()
    }

    fn stderr(&self) -> String {
        String::from_utf8_lossy(&self.output.stderr).into_owned()
    }

    fn file(&self, name: &str) -> String {
        fs::read_to_string(self.out.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
    }

    fn json(&self, name: &str) -> Value {
        serde_json::from_str(&self.file(name)).unwrap()
    }

    fn csv_rows(&self, name: &str) -> Vec<Vec<String>> {
        self.file(name)
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(str::to_string).collect())
            .collect()
    }

    fn success(self) -> Self {
        assert_eq!(
            self.code(),
            0,
            "stdout: {}\nstderr: {}",
            self.stdout(),
            self.stderr()
        );
        self
    }
}

/// Runs `args` with `config` written to a fresh directory; outputs go to
/// `out` inside it.
fn run(dir: &Path, config: Option<&str>, args: &[&str]) -> Run {
    let out = dir.join("out");
    let mut cmd = Command::new(BIN);
    cmd.args(args).arg("--out").arg(&out);
    if let Some(text) = config {
        let path = dir.join("config.toml");
        fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    Run {
        output: cmd.output().unwrap(),
        out,
    }
}

fn run_in_temp(config: Option<&str>, args: &[&str]) -> (tempfile::TempDir, Run) {
    let dir = tempfile::tempdir().unwrap();
    let r = run(dir.path(), config, args);
    (dir, r)
}

fn f64_of(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn parameter(report: &Value, name: &str) -> f64 {
    let p = report["parameters"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["name"] == name)
        .unwrap();
    f64_of(&p["value"])
}

/// Every regular file in `dir`, name and content.
fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

// ---------------------------------------------------------------- spectra

#[test]
fn spectrum_near_110_has_eight_lines_with_s2_plus_near_390_mt() {
    let config = "schema_version = 1\n[field]\nnominal_axis = [1.0, 1.0, 0.0]\neuler_deg = [2.0, 2.2, 0.0]\n";
    let (_d, r) = run_in_temp(Some(config), &["simulate-spectrum"]);
    let r = r.success();
    let sticks = r.csv_rows("sticks.csv");
    assert_eq!(sticks.len(), 8);
    let s2_plus: Vec<f64> = sticks
        .iter()
        .filter(|row| row[2] == "2" && row[3] == "+")
        .map(|row| row[0].parse().unwrap())
        .collect();
    assert_eq!(s2_plus.len(), 1);
    assert!((s2_plus[0] - 390.0).abs() < 5.0, "S2+ at {}", s2_plus[0]);
    assert!(r.csv_rows("spectrum.csv").len() > 100);
    assert_eq!(
        r.json("spectrum-summary.json")["lines"]
            .as_array()
            .unwrap()
            .len(),
        8
    );
}

#[test]
fn spectrum_along_001_has_two_distinct_fields() {
    let config = "schema_version = 1\n[field]\nnominal_axis = [0.0, 0.0, 1.0]\n";
    let (_d, r) = run_in_temp(Some(config), &["simulate-spectrum"]);
    let r = r.success();
    let mut fields: Vec<f64> = Vec::new();
    for row in r.csv_rows("sticks.csv") {
        let b: f64 = row[0].parse().unwrap();
        if !fields.iter().any(|f| (f - b).abs() < 1e-3) {
            fields.push(b);
        }
    }
    assert_eq!(fields.len(), 2, "{fields:?}");
}

#[test]
fn empty_window_gives_header_only_tables() {
    let config = "schema_version = 1\n[spectrum]\nwindow_mt = [1000.0, 1100.0]\n";
    let (_d, r) = run_in_temp(Some(config), &["simulate-spectrum"]);
    let r = r.success();
    assert_eq!(
        r.file("sticks.csv"),
        "field_mT,amplitude,site,branch,intensity\n"
    );
    assert_eq!(r.file("spectrum.csv"), "field_mT,amplitude\n");
}

// ---------------------------------------------------------------- ESEEM

#[test]
fn on_axis_nitrogen_trace_is_flat_with_no_peaks() {
    let config = "schema_version = 1\n[field]\nnominal_axis = [1.0, 1.0, 1.0]\n[eseem]\ntau_step_us = 0.01\ntau_points = 2000\n";
    for pair in ["minus_zero", "zero_plus"] {
        let config = format!("{config}[selection]\nsite = 1\npair = \"{pair}\"\n");
        let (_d, r) = run_in_temp(Some(&config), &["simulate-eseem"]);
        let r = r.success();
        let peaks = r.json("peaks.json");
        assert_eq!(peaks["flat"], true);
        assert!(peaks["peaks"].as_array().unwrap().is_empty());
        for row in r.csv_rows("trace.csv") {
            let v: f64 = row[1].parse().unwrap();
            assert!((v - 1.0).abs() < 1e-6);
        }
    }
}

#[test]
fn eseem_near_001_shows_six_basic_peaks_and_two_triples() {
    let config = "schema_version = 1\n[field]\nnominal_axis = [0.0, 0.0, 1.0]\n[selection]\nsite = 1\npair = \"minus_zero\"\n";
    let (_d, r) = run_in_temp(Some(config), &["simulate-eseem"]);
    let r = r.success();
    let peaks = r.json("peaks.json");
    let manifolds = peaks["manifolds"].as_array().unwrap();
    let basic: usize = manifolds
        .iter()
        .map(|m| m["assigned_peaks_mhz"].as_array().unwrap().len())
        .sum();
    let triples: usize = manifolds
        .iter()
        .map(|m| m["additive_triples"].as_array().unwrap().len())
        .sum();
    assert_eq!(basic, 6);
    assert_eq!(triples, 2);
    assert!(r.stdout().contains("positive"));
}

#[test]
fn carbon_site_g_along_111_shows_the_larmor_line() {
    let config = "schema_version = 1\n[system]\npreset = \"nv-14N-13C-siteG\"\n[field]\nnominal_axis = [1.0, 1.0, 1.0]\n\
                  [selection]\nsite = 1\npair = \"zero_plus\"\n";
    let (_d, r) = run_in_temp(Some(config), &["simulate-eseem"]);
    let r = r.success();
    let peaks = r.json("peaks.json");
    // ¹³C gyromagnetic ratio 10.7084 MHz/T
    let larmor = f64_of(&peaks["field_mt"]) * 10.7084e-3;
    let bin = f64_of(&peaks["native_bin_mhz"]);
    let found =
        peaks["peaks"].as_array().unwrap().iter().any(|p| {
            f64_of(&p["amplitude"]) > 0.0 && (f64_of(&p["freq_mhz"]) - larmor).abs() < bin
        });
    assert!(
        found,
        "no positive peak at {larmor} MHz: {}",
        peaks["peaks"]
    );
}

#[test]
fn intermediates_are_dumped_on_request() {
    let config = "schema_version = 1\n[field]\norientation = \"001\"\n[eseem]\nbandwidth_window_ns = 20.0\ndead_time_us = 0.1\n\
                  [output]\ndump_intermediates = true\n";
    let (_d, r) = run_in_temp(Some(config), &["simulate-eseem"]);
    let r = r.success();
    for name in [
        "trace.csv",
        "trace-filtered.csv",
        "ft-uncorrected.csv",
        "ft.csv",
        "peaks.csv",
        "frequencies.csv",
        "peaks.json",
    ] {
        assert!(r.out.join(name).exists(), "{name} missing");
    }
    assert_ne!(r.file("ft.csv"), r.file("ft-uncorrected.csv"));
}

// ---------------------------------------------------------------- scans

#[test]
fn nitrogen_cancellation_peaks_near_350_mt() {
    let config = "schema_version = 1\n[field]\nnominal_axis = [0.0, 0.0, 1.0]\n[selection]\nsite = 1\npair = \"minus_zero\"\n\
                  [eseem]\ntau_step_us = 0.01\ntau_points = 2000\n[scan]\nrange_mt = [200.0, 500.0]\nsteps = 31\n";
    let (_d, r) = run_in_temp(Some(config), &["scan-cancellation"]);
    let r = r.success();
    let summary = r.json("scan-summary.json");
    let argmax = f64_of(&summary["argmax_mt"]);
    assert!((290.0..=410.0).contains(&argmax), "argmax {argmax}");
    assert_eq!(r.csv_rows("scan.csv").len(), 31);
}

fn system_with_one_nucleus(nucleus: &str) -> String {
    format!(
        "[system.definition]\ng_e = 2.003\n[system.definition.zfs]\nparallel = 1915.3333333333333\n\
         perpendicular = -957.6666666666666\naxis = [1.0, 1.0, 1.0]\n[[system.definition.nuclei]]\n{nucleus}"
    )
}

#[test]
fn uncoupled_nucleus_gives_a_zero_curve() {
    let nucleus = "label = \"14N\"\nmultiplicity = 3\ng_n = 0.403761\n\
                   [system.definition.nuclei.hyperfine]\nparallel = 0.0\nperpendicular = 0.0\naxis = [1.0, 1.0, 1.0]\n";
    let config = format!(
        "schema_version = 1\n{}[field]\nnominal_axis = [0.0, 0.0, 1.0]\n[eseem]\ntau_step_us = 0.01\ntau_points = 1000\n\
         [scan]\nrange_mt = [250.0, 450.0]\nsteps = 11\n",
        system_with_one_nucleus(nucleus)
    );
    let (_d, r) = run_in_temp(Some(&config), &["scan-cancellation"]);
    let r = r.success();
    for row in r.csv_rows("scan.csv") {
        assert!(row[1].parse::<f64>().unwrap().abs() < 1e-12, "{row:?}");
    }
}

#[test]
fn distant_carbon_is_suppressed_at_x_band() {
    // weak point-dipole tensor with its axis along [001], 54.7° from the NV axis
    let nucleus = "label = \"13C\"\nmultiplicity = 2\ng_n = 1.404824\n\
                   [system.definition.nuclei.hyperfine]\nparallel = 0.1\nperpendicular = -0.05\naxis = [0.0, 0.0, 1.0]\n";
    let config = format!(
        "schema_version = 1\n{}[field]\nnominal_axis = [0.5773502691896258, 0.5773502691896258, -0.21]\n\
         [eseem]\ntau_step_us = 0.02\ntau_points = 1000\n[scan]\nrange_mt = [280.0, 400.0]\nsteps = 7\n",
        system_with_one_nucleus(nucleus)
    );
    for pair in ["minus_zero", "zero_plus"] {
        let config = format!("{config}[selection]\nsite = 1\npair = \"{pair}\"\n");
        let (_d, r) = run_in_temp(Some(&config), &["scan-cancellation"]);
        let r = r.success();
        let depth = f64_of(&r.json("scan-summary.json")["max_depth"]);
        assert!(depth < 0.01, "{pair}: depth {depth}");
    }
}

// ---------------------------------------------------------------- fits

#[test]
fn decay_fit_on_bundled_data() {
    let config = format!(
        "schema_version = 1\nsample = \"C\"\n[fit.decay]\ndata = {:?}\n",
        bundled("decay-sample-C.csv")
    );
    let (_d, r) = run_in_temp(Some(&config), &["fit", "decay"]);
    let r = r.success();
    let report = r.json("fit-decay.json");
    assert!((parameter(&report, "T2") / 0.74 - 1.0).abs() < 0.02);
    assert!((parameter(&report, "n") / 1.45 - 1.0).abs() < 0.02);
    assert_eq!(report["converged"], true);
    assert_eq!(report["sample"]["label"], "C");
    assert!(report["parameters"][1]["uncertainty"].as_f64().unwrap() > 0.0);
    assert_eq!(report["residuals"]["values"].as_array().unwrap().len(), 200);
    assert!(
        r.stdout().starts_with("[sample C] decay: A = "),
        "{}",
        r.stdout()
    );
    assert_eq!(r.stdout().lines().count(), 1);
}

#[test]
fn data_flag_overrides_the_config() {
    let (_d, r) = run_in_temp(
        None,
        &["fit", "decay", "--data", &bundled("decay-sample-C.csv")],
    );
    let r = r.success();
    assert!((parameter(&r.json("fit-decay.json"), "T2") / 0.74 - 1.0).abs() < 0.02);
}

#[test]
fn orientation_fit_recovers_the_misalignment_class() {
    // the configured misalignment is the one the data were generated with,
    // so the report's distance to it measures the error
    let config = format!(
        "schema_version = 1\n[field]\nnominal_axis = [1.0, 1.0, 0.0]\neuler_deg = [2.0, 2.2, 0.0]\n[fit.orientation]\ndata = {:?}\n",
        bundled("peaks-110.csv")
    );
    let (_d, r) = run_in_temp(Some(&config), &["fit", "orientation"]);
    let r = r.success();
    let report = r.json("fit-orientation.json");
    let error = f64_of(&report["diagnostics"]["angle_from_configured_deg"]);
    assert!(error < 0.1, "direction off by {error}°");
    assert_eq!(report["residuals"]["peaks"].as_array().unwrap().len(), 8);
}

#[test]
fn coupling_fit_recovers_the_nitrogen_couplings() {
    let config = format!(
        "schema_version = 1\n[fit.couplings]\ninitial = [-2.0, -2.4, -4.6]\n\
         [[fit.couplings.observations]]\ndata = {:?}\norientation = \"001\"\nsite = 1\npair = \"zero_plus\"\n\
         [[fit.couplings.observations]]\ndata = {:?}\norientation = \"110\"\nsite = 2\npair = \"zero_plus\"\n",
        bundled("frequencies-001.csv"),
        bundled("frequencies-110.csv")
    );
    let (_d, r) = run_in_temp(Some(&config), &["fit", "couplings"]);
    let r = r.success();
    let report = r.json("fit-couplings.json");
    for (name, truth) in [
        ("A_parallel", -2.19),
        ("A_perpendicular", -2.65),
        ("P_parallel", -4.95),
    ] {
        let v = parameter(&report, name);
        assert!((v - truth).abs() < 0.05, "{name} = {v}");
    }
}

#[test]
fn t2_temperature_fit_on_bundled_data() {
    let config = format!(
        "schema_version = 1\nsample = \"B\"\n[fit.t2_temperature]\ndata = {:?}\n",
        bundled("t2-sample-B.csv")
    );
    let (_d, r) = run_in_temp(Some(&config), &["fit", "t2-temperature"]);
    let r = r.success();
    let report = r.json("fit-t2-temperature.json");
    assert_eq!(report["diagnostics"]["identifiable"], true);
    assert!((parameter(&report, "E_a") / 2.5 - 1.0).abs() < 0.15);
    assert!((parameter(&report, "T2_bath") / 0.7 - 1.0).abs() < 0.05);
    assert_eq!(report["sample"]["nv_concentration_cm3"], 5e13);
}

#[test]
fn bundled_example_configs_run() {
    let configs = manifest_dir().join("configs");
    for (file, args) in [
        ("spectrum-110.toml", vec!["simulate-spectrum"]),
        ("eseem-001.toml", vec!["simulate-eseem"]),
        ("eseem-111-13C.toml", vec!["simulate-eseem"]),
        ("scan-001.toml", vec!["scan-cancellation"]),
        ("fit-decay.toml", vec!["fit", "decay"]),
        ("fit-orientation.toml", vec!["fit", "orientation"]),
        ("fit-couplings.toml", vec!["fit", "couplings"]),
        ("fit-t2.toml", vec!["fit", "t2-temperature"]),
    ] {
        let dir = tempfile::tempdir().unwrap();
        let out = Command::new(BIN)
            .args(&args)
            .arg("--config")
            .arg(configs.join(file))
            .arg("--out")
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{file}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

// ---------------------------------------------------------------- reproducibility

const ENSEMBLE: &str = "schema_version = 1\n[field]\norientation = \"001\"\n[eseem]\ntau_step_us = 0.02\ntau_points = 500\n\
                        [eseem.ensemble]\nhyperfine_fraction = 0.01\nquadrupole_fraction = 0.01\nsamples = 8\n";

#[test]
fn identical_config_and_seed_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir_all(dir.path().join("a")).unwrap();
    fs::create_dir_all(dir.path().join("b")).unwrap();
    let a = run(
        &dir.path().join("a"),
        Some(ENSEMBLE),
        &["simulate-eseem", "--seed", "5"],
    )
    .success();
    let b = run(
        &dir.path().join("b"),
        Some(ENSEMBLE),
        &["simulate-eseem", "--seed", "5", "--threads", "1"],
    )
    .success();
    assert_eq!(snapshot(&a.out), snapshot(&b.out));
    fs::create_dir_all(dir.path().join("c")).unwrap();
    let c = run(
        &dir.path().join("c"),
        Some(ENSEMBLE),
        &["simulate-eseem", "--seed", "6"],
    )
    .success();
    assert_ne!(a.file("trace.csv"), c.file("trace.csv"));
}

#[test]
fn rerunning_the_resolved_config_reproduces_every_output() {
    let cases: Vec<(String, Vec<&str>)> = vec![
        (ENSEMBLE.to_string(), vec!["simulate-eseem", "--seed", "3"]),
        ("schema_version = 1\nsample = \"D\"\n[field]\norientation = \"110\"\n".to_string(), vec!["simulate-spectrum"]),
        (
            "schema_version = 1\n[field]\norientation = \"001\"\n[eseem]\ntau_step_us = 0.02\ntau_points = 300\n\
             [scan]\nrange_mt = [300.0, 400.0]\nsteps = 5\n"
                .to_string(),
            vec!["scan-cancellation"],
        ),
        (
            format!("schema_version = 1\nsample = \"B\"\n[fit.t2_temperature]\ndata = \"{}\"\n", bundled("t2-sample-B.csv")),
            vec!["fit", "t2-temperature"],
        ),
    ];
    for (config, args) in cases {
        let dir = tempfile::tempdir().unwrap();
        let first = run(dir.path(), Some(&config), &args).success();
        let second_out = dir.path().join("second");
        let out = Command::new(BIN)
            .args(
                args.iter()
                    .filter(|a| !a.starts_with("--seed") && a.parse::<u64>().is_err()),
            )
            .arg("--config")
            .arg(first.out.join("resolved-config.toml"))
            .arg("--out")
            .arg(&second_out)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert_eq!(snapshot(&first.out), snapshot(&second_out), "{args:?}");
    }
}

// ---------------------------------------------------------------- exit codes

#[test]
fn unknown_key_is_a_config_error_naming_the_key() {
    let (_d, r) = run_in_temp(
        Some("schema_version = 1\n[eseem]\ntau_stepsize = 0.01\n"),
        &["simulate-eseem"],
    );
    assert_eq!(r.code(), 2);
    assert!(r.stderr().contains("tau_stepsize"), "{}", r.stderr());
}

#[test]
fn unsupported_schema_version_is_a_config_error() {
    let (_d, r) = run_in_temp(Some("schema_version = 7\n"), &["simulate-spectrum"]);
    assert_eq!(r.code(), 2);
    assert!(r.stderr().contains("schema_version"), "{}", r.stderr());
}

#[test]
fn invalid_value_is_a_config_error_naming_the_key() {
    let (_d, r) = run_in_temp(
        Some("schema_version = 1\n[spectrum]\nlinewidth_mt = 0.0\n"),
        &["simulate-spectrum"],
    );
    assert_eq!(r.code(), 2);
    assert!(
        r.stderr().contains("spectrum.linewidth_mt"),
        "{}",
        r.stderr()
    );
}

#[test]
fn mixed_levels_are_a_solver_error() {
    // near the T₀/T₋ anticrossing, tilted 2° from the NV axis
    let config = "schema_version = 1\n[field]\nnominal_axis = [1.0, 1.0, 1.0]\neuler_deg = [0.0, 2.0, 0.0]\nmagnitude_mt = 102.5\n";
    let (_d, r) = run_in_temp(Some(config), &["simulate-eseem"]);
    assert_eq!(r.code(), 3, "{}", r.stderr());
    assert!(r.stderr().contains("solver error"));
}

#[test]
fn malformed_data_is_a_data_error_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("decay.csv");
    fs::write(&data, "two_tau_us,amplitude\n0,1.0\n10,0.9\n20,zero\n").unwrap();
    let r = run(
        dir.path(),
        None,
        &["fit", "decay", "--data", data.to_str().unwrap()],
    );
    assert_eq!(r.code(), 4);
    assert!(r.stderr().contains("line 4"), "{}", r.stderr());
    assert!(r.stderr().contains("decay.csv"), "{}", r.stderr());
}

#[test]
fn missing_column_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("peaks.csv");
    fs::write(&data, "label,field\nS1+,300\n").unwrap();
    let r = run(
        dir.path(),
        None,
        &["fit", "orientation", "--data", data.to_str().unwrap()],
    );
    assert_eq!(r.code(), 4);
    assert!(r.stderr().contains("line 1"), "{}", r.stderr());
}

#[test]
fn data_that_cannot_constrain_the_fit_is_a_data_error() {
    // two points cannot constrain four model parameters
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("t2.csv");
    fs::write(&data, "temperature_K,t2_ms\n5,0.7\n10,0.7\n").unwrap();
    let r = run(
        dir.path(),
        None,
        &["fit", "t2-temperature", "--data", data.to_str().unwrap()],
    );
    assert_eq!(r.code(), 4, "{}", r.stderr());
}

#[test]
fn missing_data_file_setting_is_a_config_error() {
    let (_d, r) = run_in_temp(None, &["fit", "decay"]);
    assert_eq!(r.code(), 2);
    assert!(r.stderr().contains("fit.decay.data"), "{}", r.stderr());
}

// ---------------------------------------------------------------- samples

#[test]
fn bundled_registry_validates() {
    let (_d, r) = run_in_temp(None, &["samples", "validate"]);
    let r = r.success();
    let samples = r.json("samples.json");
    let records = samples["samples"].as_array().unwrap();
    assert_eq!(records.len(), 4);
    assert_eq!(records[0]["label"], "A");
    assert_eq!(records[0]["nv_concentration_cm3"], 2e13);
}

#[test]
fn registry_problems_are_all_reported() {
    let dir = tempfile::tempdir().unwrap();
    let registry = dir.path().join("samples.csv");
    fs::write(
        &registry,
        "label,edge_orientation,fluence_cm2,anneal_temperature_C,anneal_time_min,nv_concentration_cm3\n\
         A,{100},1e15,900,20,2e13\nA,{100},1e17,900,20,5e13\nB,{100},0,900,20,5e13\n",
    )
    .unwrap();
    let r = run(
        dir.path(),
        None,
        &["samples", "validate", registry.to_str().unwrap()],
    );
    assert_eq!(r.code(), 4);
    let err = r.stderr();
    assert!(err.contains("duplicate label \"A\""), "{err}");
    assert!(err.contains("line 4: fluence_cm2 must be > 0"), "{err}");
}

#[test]
fn unknown_sample_is_a_config_error() {
    let (_d, r) = run_in_temp(
        Some("schema_version = 1\nsample = \"Z\"\n"),
        &["simulate-spectrum"],
    );
    assert_eq!(r.code(), 2);
    assert!(r.stderr().contains("sample"), "{}", r.stderr());
}
