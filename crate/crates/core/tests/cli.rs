//! End-to-end runs of the `flatpsi` binary: exit codes, error paths, report
//! determinism and scenario round trips.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use flatpsi::scenario::Scenario;
use serde_json::{json, Value};

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn flatpsi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flatpsi")).args(args).output().unwrap()
}

fn run_on(sub: &str, scenario: &Path, extra: &[&str]) -> Output {
    let mut args = vec![sub, "--scenario", scenario.to_str().unwrap()];
    args.extend_from_slice(extra);
    flatpsi(&args)
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check named {name}"))
}

fn edited(name: &str, edit: impl FnOnce(&mut Value)) -> (tempfile::TempDir, PathBuf) {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(scenario_path(name)).unwrap()).unwrap();
    edit(&mut v);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join(name);
    std::fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    (dir, path)
}

const SHIPPED: [&str; 4] = [
    "commuting_triangle.json",
    "commuting_triangle_p2.json",
    "abelian_p_lt_r.json",
    "boundary_chain.json",
];

#[test]
fn shipped_scenarios_validate() {
    for name in SHIPPED {
        let out = run_on("validate", &scenario_path(name), &[]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stdout));
        assert_eq!(report(&out)["all_passed"], true);
    }
}

#[test]
fn shipped_scenarios_are_canonical() {
    for name in SHIPPED {
        let path = scenario_path(name);
        let on_disk = std::fs::read_to_string(&path).unwrap();
        let s = Scenario::load(&path).unwrap();
        assert_eq!(s.to_canonical_json(), on_disk, "{name}");
        let again = Scenario::from_json(&s.to_canonical_json()).unwrap();
        assert_eq!(again.to_canonical_json(), on_disk);
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let path = scenario_path("commuting_triangle_p2.json");
    let args = ["--chain", "triangle", "--cycle", "T13", "--allow-noninvariant"];
    let a = run_on("pair", &path, &args);
    let b = run_on("pair", &path, &args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let path = scenario_path("abelian_p_lt_r.json");
    let shown = run_on("validate", &path, &[]);
    let written = run_on("validate", &path, &["--out", target.to_str().unwrap()]);
    assert_eq!(written.status.code(), Some(0));
    assert!(written.stdout.is_empty());
    assert_eq!(std::fs::read(&target).unwrap(), shown.stdout);
}

#[test]
fn noninvariant_degree_exits_4() {
    let path = scenario_path("commuting_triangle_p2.json");
    let out = run_on("psi", &path, &["--chain", "triangle"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--allow-noninvariant"));
    let forced = run_on("psi", &path, &["--chain", "triangle", "--allow-noninvariant"]);
    assert_eq!(forced.status.code(), Some(0));
}

#[test]
fn failed_check_exits_1() {
    // E12 dx1 + E21 dx2 has curvature (E11 − E22) dx1∧dx2.
    let (_dir, path) = edited("commuting_triangle.json", |v| {
        v["connections"]["A"] = json!({
            "x1": [["0", "1"], ["0", "0"]],
            "x2": [["0", "0"], ["1", "0"]],
        });
    });
    let out = run_on("validate", &path, &[]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["all_passed"], false);
    assert_eq!(check(&r, "flat:A")["status"], "fail");
    assert_eq!(check(&r, "flat:A")["anchor"], "flatness");
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ \"id\": ").unwrap();
    assert_eq!(run_on("validate", &broken, &[]).status.code(), Some(2));

    let (_d, bad_rational) = edited("abelian_p_lt_r.json", |v| {
        v["connections"]["A"]["x1"][0][0] = json!("1/zero");
    });
    let out = run_on("validate", &bad_rational, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("connections.A.x1"));

    let missing = dir.path().join("absent.json");
    assert_eq!(run_on("validate", &missing, &[]).status.code(), Some(2));
}

#[test]
fn dangling_connection_id_exits_3_with_path() {
    let (_dir, path) = edited("commuting_triangle.json", |v| {
        v["chains"]["triangle"]["terms"][0]["vertices"][1] = json!("Q");
    });
    let out = run_on("validate", &path, &[]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("chains.triangle.terms[0].vertices[1]"), "{err}");
}

#[test]
fn unknown_field_is_rejected() {
    let (_dir, path) = edited("boundary_chain.json", |v| {
        v["colour"] = json!("blue");
    });
    assert_ne!(run_on("validate", &path, &[]).status.code(), Some(0));
}

#[test]
fn p_below_r_gives_zero_form() {
    let path = scenario_path("abelian_p_lt_r.json");
    for chain in ["sphere", "sphere3"] {
        let out = run_on("psi", &path, &["--chain", chain]);
        assert_eq!(out.status.code(), Some(0));
        let r = report(&out);
        let c = check(&r, "p_less_than_r_zero");
        assert_eq!(c["status"], "pass");
        assert_eq!(c["anchor"], "p-less-than-r-triviality");
    }
}

#[test]
fn pairings_match_stored_goldens() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("goldens").join("commuting_triangle.json");
    let path = scenario_path("commuting_triangle_p2.json");
    let out = run_on(
        "pair",
        &path,
        &["--chain", "triangle", "--allow-noninvariant", "--golden", golden.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = report(&out);
    let t13 = check(&r, "pair:T13");
    assert_eq!(t13["exact_value"], "5/2");
    assert_eq!(check(&r, "golden:T13:tensor_grid(6)")["status"], "pass");
    assert_eq!(check(&r, "golden:T13:monte_carlo(1000000)")["status"], "pass");
}

#[test]
fn transgression_satisfies_homotopy_formula() {
    let path = scenario_path("commuting_triangle.json");
    let out = run_on("transgression", &path, &["--to", "A"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(check(&report(&out), "homotopy_formula")["status"], "pass");
}

#[test]
fn properties_pass_on_boundary_chain() {
    let out = run_on("properties", &scenario_path("boundary_chain.json"), &["--instances", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(check(&report(&out), "boundary_vanishing:K")["anchor"], "boundary-vanishing");
}
