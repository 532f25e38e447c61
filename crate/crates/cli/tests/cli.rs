//! End-to-end tests of the `coneheat` binary: exit codes, artifact contents,
//! provenance stamping, and determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_coneheat")
}

/// Scratch directory removed on drop.
struct Scratch {
    dir: PathBuf,
}

impl Scratch {
    fn new(name: &str) -> Scratch {
        let dir = std::env::temp_dir().join(format!("coneheat-cli-{name}-{}", std::process::id()));
        if dir.exists() {
            std::fs::remove_dir_all(&dir).unwrap();
        }
        std::fs::create_dir_all(&dir).unwrap();
        Scratch { dir }
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.dir.join(rel)
    }

    fn write(&self, rel: &str, contents: &str) -> PathBuf {
        let path = self.path(rel);
        std::fs::write(&path, contents).unwrap();
        path
    }

    fn read(&self, rel: &str) -> String {
        std::fs::read_to_string(self.path(rel)).unwrap()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.dir);
    }
}

fn run(args: &[&str]) -> Output {
    run_with_env(args, &[])
}

fn run_with_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args);
    for &(key, value) in env {
        cmd.env(key, value);
    }
    cmd.output().unwrap()
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn assert_success(output: &Output) {
    assert!(
        output.status.success(),
        "expected success, got {:?}\nstdout: {}\nstderr: {}",
        output.status.code(),
        stdout(output),
        stderr(output)
    );
}

fn assert_exit(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        stdout(output),
        stderr(output)
    );
}

/// Data rows of a CSV artifact (header comments and column line stripped).
fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|line| !line.starts_with('#'))
        .skip(1)
        .map(|line| line.split(',').map(|cell| cell.parse().unwrap()).collect())
        .collect()
}

fn config_circle(scratch: &Scratch, body: &str) -> PathBuf {
    let out = scratch.path("out");
    scratch.write(
        "config.toml",
        &format!(
            "[geometry]\nkind = \"circle\"\nlength = 6.283185307179586\nmode_cutoff = 4000.0\n\n\
             [output]\ndir = {:?}\n\n{body}",
            out.to_str().unwrap()
        ),
    )
}

#[test]
fn spectrum_tabulates_eigenvalues_and_indicial_roots() {
    let scratch = Scratch::new("spectrum");
    let config = config_circle(&scratch, "");
    let output = run(&[
        "spectrum",
        config.to_str().unwrap(),
        "--set",
        "geometry.mode_cutoff=5.0",
    ]);
    assert_success(&output);
    let rows = csv_rows(&scratch.read("out/spectrum.csv"));
    // Circle of length 2π: λ_j = j² with multiplicity 2 for j ≥ 1, and
    // ν_j = j on a two-dimensional cone.
    assert_eq!(
        rows,
        vec![vec![0.0, 1.0, 0.0], vec![1.0, 2.0, 1.0], vec![4.0, 2.0, 2.0]]
    );
}

#[test]
fn spectrum_of_a_sphere_cone_has_half_integer_roots() {
    let scratch = Scratch::new("sphere");
    let out = scratch.path("out");
    let config = scratch.write(
        "config.toml",
        &format!(
            "[geometry]\nkind = \"sphere\"\ndim = 2\nmode_cutoff = 0.1\n\n[output]\ndir = {:?}\n",
            out.to_str().unwrap()
        ),
    );
    let output = run(&["spectrum", config.to_str().unwrap()]);
    assert_success(&output);
    let rows = csv_rows(&scratch.read("out/spectrum.csv"));
    // Only the constant mode survives the cutoff; on C(S²) its indicial
    // root is √(1/4 + 0) = 1/2.
    assert_eq!(rows, vec![vec![0.0, 1.0, 0.5]]);
}

#[test]
fn heat_on_the_plane_diagonal_is_one_over_4_pi_t() {
    let scratch = Scratch::new("heat-diag");
    let config = config_circle(&scratch, "[task.heat]\nt = 1.0\nr = 1.0\nrp = 1.0\n");
    let output = run(&["heat", config.to_str().unwrap()]);
    assert_success(&output);
    let rows = csv_rows(&scratch.read("out/heat.csv"));
    assert_eq!(rows.len(), 1);
    let expect = 1.0 / (4.0 * std::f64::consts::PI);
    assert!((rows[0][5] - expect).abs() <= 1e-12 * expect);
    // headers carry the provenance stamp
    let text = scratch.read("out/heat.csv");
    assert!(text.starts_with("# coneheat "));
    assert!(text.lines().nth(1).unwrap().starts_with("# config-sha256 "));
}

#[test]
fn heat_grids_take_the_cartesian_product() {
    let scratch = Scratch::new("heat-grid");
    let config = config_circle(
        &scratch,
        "[task.heat]\nt = [0.5, 1.0]\nr = [0.8, 1.0, 1.2]\nrp = 1.1\nyp = [0.0, 0.7]\n",
    );
    let output = run(&["heat", config.to_str().unwrap()]);
    assert_success(&output);
    let rows = csv_rows(&scratch.read("out/heat.csv"));
    assert_eq!(rows.len(), 2 * 3 * 2);
    // last axis varies fastest
    assert_eq!(rows[0][4], 0.0);
    assert_eq!(rows[1][4], 0.7);
    assert!(rows.iter().all(|row| row[5].is_finite() && row[5] > 0.0));
}

#[test]
fn missing_sections_and_unknown_keys_are_config_errors() {
    let scratch = Scratch::new("config-errors");
    // no [geometry] at all
    let empty = scratch.write("empty.toml", "[output]\ndir = \"x\"\n");
    assert_exit(&run(&["spectrum", empty.to_str().unwrap()]), 2);

    // unknown key inside a known section
    let typo = scratch.write(
        "typo.toml",
        "[geometry]\nkind = \"circle\"\nlength = 6.0\nmode_cutoff = 10.0\nturbo = true\n",
    );
    let output = run(&["spectrum", typo.to_str().unwrap()]);
    assert_exit(&output, 2);
    assert!(stderr(&output).contains("turbo"), "stderr: {}", stderr(&output));

    // command without its task section
    let config = config_circle(&scratch, "");
    assert_exit(&run(&["heat", config.to_str().unwrap()]), 2);

    // malformed --set override
    let bad_set = run(&["spectrum", config.to_str().unwrap(), "--set", "geometry.length"]);
    assert_exit(&bad_set, 2);

    // nonexistent config path
    assert_exit(&run(&["spectrum", scratch.path("nope.toml").to_str().unwrap()]), 2);
}

#[test]
fn coincident_resolvent_points_are_a_runtime_error() {
    let scratch = Scratch::new("resolvent-diag");
    let config = config_circle(
        &scratch,
        "[task.resolvent]\nk = 1.0\nr = 1.0\nrp = 1.0\n",
    );
    let output = run(&["resolvent", config.to_str().unwrap()]);
    assert_exit(&output, 1);
    assert!(
        stderr(&output).contains("coincident"),
        "stderr: {}",
        stderr(&output)
    );
}

#[test]
fn resolvent_grid_evaluates_complex_values() {
    let scratch = Scratch::new("resolvent-grid");
    let config = config_circle(
        &scratch,
        "[task.resolvent]\nk = [0.5, 1.0]\nk_im = 0.3\nr = 0.8\nrp = [1.2, 1.5]\n",
    );
    // radius ratio 0.8/1.2 converges like (2/3)^ν: reach ν ≈ 110
    let output = run(&[
        "resolvent",
        config.to_str().unwrap(),
        "--set",
        "geometry.mode_cutoff=12000.0",
    ]);
    assert_success(&output);
    let rows = csv_rows(&scratch.read("out/resolvent.csv"));
    assert_eq!(rows.len(), 4);
    for row in &rows {
        assert_eq!(row[1], 0.3);
        assert!(row[6].is_finite() && row[7].is_finite());
        assert_ne!(row[7], 0.0, "complex k must give a complex value");
    }
}

#[test]
fn runs_are_deterministic_across_repeats_and_thread_counts() {
    let scratch = Scratch::new("determinism");
    let config = config_circle(
        &scratch,
        "[task.heat]\nt = [0.4, 1.3]\nr = [0.6, 0.9, 1.4]\nrp = [0.7, 1.1]\nyp = [0.0, 1.0]\n",
    );
    let args = ["heat", config.to_str().unwrap()];
    assert_success(&run_with_env(&args, &[("CONEHEAT_THREADS", "1")]));
    let first = scratch.read("out/heat.csv");
    assert_success(&run_with_env(&args, &[("CONEHEAT_THREADS", "1")]));
    assert_eq!(first, scratch.read("out/heat.csv"), "repeat run changed bytes");
    assert_success(&run_with_env(&args, &[("CONEHEAT_THREADS", "3")]));
    assert_eq!(first, scratch.read("out/heat.csv"), "thread count changed bytes");

    // invalid thread count is a config error
    let bad = run_with_env(&args, &[("CONEHEAT_THREADS", "0")]);
    assert_exit(&bad, 2);
}

#[test]
fn rtrace_on_the_plane_vanishes() {
    let scratch = Scratch::new("rtrace-plane");
    let config = config_circle(&scratch, "[task.rtrace]\nt = 1.0\n");
    let output = run(&["rtrace", config.to_str().unwrap()]);
    assert_success(&output);
    let rows = csv_rows(&scratch.read("out/rtrace.csv"));
    assert_eq!(rows.len(), 1);
    // R² has no tip: the renormalized trace is identically zero.
    assert!(rows[0][1].abs() < 1e-10, "finite part {}", rows[0][1]);
    // sweep and expansion artifacts exist and carry the digest
    let sweep = scratch.read("out/rtrace_sweep.csv");
    assert_eq!(csv_rows(&sweep).len(), 12);
    let expansion: serde_json::Value =
        serde_json::from_str(&scratch.read("out/rtrace_expansion.json")).unwrap();
    assert!(expansion["config_digest"].as_str().unwrap().len() == 64);
    assert!(expansion["expansions"][0]["finite_part"].is_number());
}

#[test]
fn zeta_and_det_of_a_mock_spectrum_match_the_dirichlet_series() {
    let scratch = Scratch::new("mock-zeta");
    let spectrum = scratch.write("mock.txt", "# two eigenvalues\n1.0 1\n2.0 1\n");
    let out = scratch.path("out");
    let config = scratch.write(
        "config.toml",
        &format!(
            "[geometry]\nkind = \"file\"\npath = {:?}\nn = 3\nvolume = 1.0\n\n\
             [task.zeta]\ns = [[1.0, 0.0], [2.0, 0.0], [-1.0, 0.0]]\n\n[output]\ndir = {:?}\n",
            spectrum.to_str().unwrap(),
            out.to_str().unwrap()
        ),
    );
    let output = run(&["zeta", config.to_str().unwrap()]);
    assert_success(&output);
    let rows = csv_rows(&scratch.read("out/zeta.csv"));
    // ζ(s) = 1 + 2^{-s}
    for row in &rows {
        let expect = 1.0 + 2f64.powf(-row[0]);
        assert!((row[2] - expect).abs() < 1e-8, "s = {}: {} vs {expect}", row[0], row[2]);
        assert!(row[3].abs() < 1e-8);
    }

    let output = run(&["det", config.to_str().unwrap()]);
    assert_success(&output);
    let det: serde_json::Value = serde_json::from_str(&scratch.read("out/det.json")).unwrap();
    // det = λ₁λ₂ = 2
    assert!((det["det"].as_f64().unwrap() - 2.0).abs() < 1e-7);
    assert!((det["log_det"].as_f64().unwrap() - std::f64::consts::LN_2).abs() < 1e-7);
    // ζ is entire here (residue 0) and ζ(0) = 1 + 2⁰ counts the eigenvalues
    assert!(det["zeta_at_zero"]["residue"].as_f64().unwrap().abs() < 1e-9);
    assert!((det["zeta_at_zero"]["value"].as_f64().unwrap() - 2.0).abs() < 1e-8);
}

#[test]
fn det_of_the_flat_cone_is_trivial_with_certificate() {
    let scratch = Scratch::new("flat-det");
    let out = scratch.path("out");
    let config = scratch.write(
        "config.toml",
        &format!(
            "[geometry]\nkind = \"circle\"\nlength = 4.71238898038469\nmode_cutoff = 9000.0\n\n\
             [output]\ndir = {:?}\n",
            out.to_str().unwrap()
        ),
    );
    let output = run(&["det", config.to_str().unwrap()]);
    assert_success(&output);
    let det: serde_json::Value = serde_json::from_str(&scratch.read("out/det.json")).unwrap();
    assert!(det["log_det"].as_f64().unwrap().abs() < 1e-6);
    let cert = &det["t_independence"];
    assert!(cert["splice_gap"].as_f64().unwrap() < 1e-6);
    assert!(cert["nonconstant_short_magnitude"].as_f64().unwrap() < 1e-6);
    assert!(cert["nonconstant_long_magnitude"].as_f64().unwrap() < 1e-6);
}

#[test]
fn verify_index_suite_passes_and_writes_a_report() {
    let scratch = Scratch::new("verify-index");
    let config = config_circle(&scratch, "");
    let output = run(&["verify", config.to_str().unwrap(), "--suite", "index"]);
    assert_success(&output);
    let report = scratch.read("out/verify_index.txt");
    assert!(report.contains("[pass] low-energy resolvent leading orders"));
    assert!(report.contains("[pass] long-time heat kernel leading orders"));
    assert!(!report.contains("FAIL"));
}

#[test]
fn json_format_mirrors_the_csv_tables() {
    let scratch = Scratch::new("json-format");
    let config = config_circle(
        &scratch,
        "[task.heat]\nt = 1.0\nr = 1.0\nrp = 1.0\n\n",
    );
    let output = run(&[
        "heat",
        config.to_str().unwrap(),
        "--set",
        "output.format=json",
    ]);
    assert_success(&output);
    let heat: serde_json::Value = serde_json::from_str(&scratch.read("out/heat.json")).unwrap();
    assert_eq!(heat["rows"].as_array().unwrap().len(), 1);
    let expect = 1.0 / (4.0 * std::f64::consts::PI);
    assert!((heat["rows"][0]["value"].as_f64().unwrap() - expect).abs() < 1e-12);
    assert!(heat["version"].is_string());
}
