//! End-to-end tests of the `equigs` binary: exit codes, file outputs, and
//! determinism of the analysis JSON.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_equigs")
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn sample(name: &str) -> PathBuf {
    repo_root().join("samples").join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    Command::new(binary()).args(args).output().expect("binary runs")
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("equigs-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn validate_accepts_bundled_samples() {
    for name in ["triangle", "square", "desargues", "d4_grid", "d6_wheel", "d8_star", "z5_flower"]
    {
        let output = run(&["validate", sample(name).to_str().unwrap()]);
        assert!(
            output.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&output.stderr)
        );
        let report: serde_json::Value =
            serde_json::from_slice(&output.stdout).expect("machine-readable report");
        assert_eq!(report["status"], "ok");
    }
}

#[test]
fn validate_rejects_broken_cycle_with_code() {
    let dir = temp_dir("badcycle");
    let path = dir.join("broken.json");
    let mut file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(sample("triangle")).unwrap()).unwrap();
    // Flip one traversal sign so the inner face no longer chains.
    file["faces"][0]["edges"][1]["sign"] = serde_json::json!(-1);
    std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    let output = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["issues"][0]["code"], "BadCycle");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn validate_rejects_asymmetric_coordinates() {
    let dir = temp_dir("asym");
    let path = dir.join("asym.json");
    let mut file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(sample("desargues")).unwrap()).unwrap();
    file["vertices"][0]["x"] = serde_json::json!(-2.5);
    std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    let output = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let report = String::from_utf8_lossy(&output.stdout).to_string();
    assert!(report.contains("NotARealization"), "report: {report}");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn parse_errors_exit_with_two() {
    let dir = temp_dir("parse");
    let path = dir.join("garbage.json");
    std::fs::write(&path, "{ not json").unwrap();
    let output = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    let missing = dir.join("missing.json");
    let output = run(&["analyze", missing.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn analyze_triangle_without_group() {
    let output = run(&["analyze", sample("triangle").to_str().unwrap(), "--no-group"]);
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout).to_string();
    assert!(text.contains("dim H1F = 0"));
    assert!(text.contains("maxwell: 3 = 3"));
}

#[test]
fn analyze_json_output_is_deterministic() {
    let dir = temp_dir("det");
    let (a, b) = (dir.join("a.json"), dir.join("b.json"));
    for path in [&a, &b] {
        let output = run(&[
            "analyze",
            sample("desargues").to_str().unwrap(),
            "--json",
            path.to_str().unwrap(),
        ]);
        assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b, "two runs differ byte-for-byte");

    let value: serde_json::Value = serde_json::from_slice(&bytes_a).unwrap();
    assert_eq!(value["force_homology"]["h1"], 1);
    assert_eq!(value["irreps"][0]["h1_force"], 1);
    assert_eq!(value["symmetric_euler_force_chain"][0], 0);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn analyze_d4_grid_matches_pinned_counts() {
    let dir = temp_dir("d4");
    let out = dir.join("analysis.json");
    let output = run(&[
        "analyze",
        sample("d4_grid").to_str().unwrap(),
        "--json",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let value: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(value["force_homology"]["h1"], 4);
    assert_eq!(value["position_homology"]["h2"], 6);
    let irreps = value["irreps"].as_array().unwrap();
    let last = irreps.iter().find(|i| i["label"] == "(11)").unwrap();
    assert_eq!(last["h2_position"], 0);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn reciprocal_writes_svg_and_json() {
    let dir = temp_dir("svg");
    let out_json = dir.join("recips.json");
    let output = run(&[
        "reciprocal",
        sample("desargues").to_str().unwrap(),
        "--irrep",
        "(1)",
        "--svg",
        dir.to_str().unwrap(),
        "--json",
        out_json.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let mut svg_files: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .filter_map(|e| {
            let name = e.unwrap().file_name().to_string_lossy().to_string();
            name.ends_with(".svg").then_some(name)
        })
        .collect();
    svg_files.sort();
    // Trivial irrep: one stress pair plus one translation.
    assert_eq!(svg_files, vec!["desargues_1_stress0.svg", "desargues_1_translation0.svg"]);
    let svg = std::fs::read_to_string(dir.join(&svg_files[0])).unwrap();
    assert!(svg.contains("id=\"primal\"") && svg.contains("id=\"dual\""));
    let value: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&out_json).unwrap()).unwrap();
    assert_eq!(value["diagrams"].as_array().unwrap().len(), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn reciprocal_rejects_unknown_irrep() {
    let output =
        run(&["reciprocal", sample("desargues").to_str().unwrap(), "--irrep", "(7)"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("unknown irreducible"));
}

#[test]
fn merged_conjugates_emit_real_diagrams() {
    let dir = temp_dir("merge");
    let out_json = dir.join("merged.json");
    let output = run(&[
        "reciprocal",
        sample("z5_flower").to_str().unwrap(),
        "--irrep",
        "(2)",
        "--merge-conjugates",
        "--json",
        out_json.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let value: serde_json::Value =
        serde_json::from_slice(&std::fs::read(&out_json).unwrap()).unwrap();
    for diagram in value["diagrams"].as_array().unwrap() {
        for position in diagram["reciprocal"]["positions"].as_array().unwrap() {
            assert_eq!(position["x"]["im"].as_f64().unwrap(), 0.0);
            assert_eq!(position["y"]["im"].as_f64().unwrap(), 0.0);
        }
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn selftest_passes_on_bundled_samples() {
    let output = run(&["selftest"]);
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stdout));
    let text = String::from_utf8_lossy(&output.stdout).to_string();
    assert!(text.contains("0 failed"), "{text}");
    // Verbose mode lists every check.
    let verbose = run(&["selftest", "--verbose"]);
    let text = String::from_utf8_lossy(&verbose.stdout).to_string();
    assert!(text.lines().filter(|l| l.starts_with("ok   ")).count() > 100);
}

#[test]
fn shipped_sample_files_match_builtins() {
    for sample_def in equigs::samples::all_samples() {
        let path = sample(sample_def.name);
        let on_disk = std::fs::read_to_string(&path)
            .unwrap_or_else(|_| panic!("missing shipped sample {}", path.display()));
        let expected =
            equigs::io::to_json_string(&equigs::io::FrameworkFile::from(&sample_def));
        assert_eq!(on_disk, expected, "shipped {} drifted from the builtin", sample_def.name);
    }
}

#[test]
fn env_tolerance_is_honored() {
    let output = Command::new(binary())
        .args(["analyze", sample("triangle").to_str().unwrap(), "--no-group", "--json"])
        .arg(std::env::temp_dir().join(format!("equigs-tol-{}.json", std::process::id())))
        .env("COSHEAF_TOL", "1e-6")
        .output()
        .unwrap();
    assert!(output.status.success());
    let path = std::env::temp_dir().join(format!("equigs-tol-{}.json", std::process::id()));
    let value: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(value["tolerance_rel"].as_f64().unwrap(), 1e-6);
    std::fs::remove_file(&path).unwrap();
}
