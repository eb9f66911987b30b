use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bsfloer"))
        .args(args)
        .current_dir(fixtures())
        .env_remove("BSFLOER_SEED")
        .output()
        .unwrap()
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn detect_disk_on_solid_torus() {
    let v = report(&[
        "detect-disk",
        "--cfd",
        "solid_torus_inf.json",
        "--pmc",
        "genus1.json",
    ]);
    assert_eq!(v["answer"], "compressible");
    assert_eq!(v["rank"], 0);
    assert_eq!(v["modes_agree"], true);
    assert_eq!(v["inputs"].as_array().unwrap().len(), 2);
}

#[test]
fn detect_disk_on_trefoil_exterior() {
    let v = report(&[
        "detect-disk",
        "--cfd",
        "trefoil_exterior.json",
        "--pmc",
        "genus1.json",
        "--mode",
        "exact",
    ]);
    assert_eq!(v["answer"], "incompressible");
    assert_eq!(v["rank"], 4);
}

#[test]
fn algebra_of_genus1() {
    let v = report(&["algebra", "--arc-diagram", "genus1.json"]);
    assert_eq!(v["dimension"], 8);
    let product = |l: &str, r: &str| {
        v["relations"]
            .as_array()
            .unwrap()
            .iter()
            .find(|x| x["left"] == l && x["right"] == r)
            .unwrap()["product"]
            .as_str()
            .unwrap()
            .to_string()
    };
    assert_eq!(product("[1,2]", "[2,3]"), "[1,3]");
    assert_eq!(product("[2,3]", "[3,4]"), "[2,4]");
    assert_eq!(product("[2,3]", "[1,2]"), "0");
    assert_eq!(product("[3,4]", "[2,3]"), "0");
}

#[test]
fn validate_rejects_bad_diagram() {
    let out = run(&["validate", "--diagram", "bad_diagram.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NOWHERE"));
}

#[test]
fn validate_accepts_fixtures() {
    for f in [
        "genus1.json",
        "trivial_arc_hd.json",
        "h_inf_cfd.json",
        "factored_identity.json",
    ] {
        assert_eq!(report(&["validate", "--diagram", f])["valid"], true, "{f}");
    }
}

#[test]
fn interface_mismatch_exits_3() {
    assert_eq!(
        run(&["module", "--input", "factored_mismatch.json"])
            .status
            .code(),
        Some(3)
    );
    let out = run(&[
        "detect-disk",
        "--cfd",
        "trefoil_arc.json",
        "--pmc",
        "genus1.json",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reports_are_byte_identical() {
    let args = [
        "detect-disk",
        "--cfd",
        "trefoil_exterior.json",
        "--pmc",
        "genus1.json",
        "--seed",
        "7",
    ];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn seed_flag_overrides_environment() {
    let bin = env!("CARGO_BIN_EXE_bsfloer");
    let with_env = |extra: &[&str]| -> Value {
        let out = Command::new(bin)
            .args([
                "detect-disk",
                "--cfd",
                "h_inf_cfd.json",
                "--pmc",
                "genus1.json",
            ])
            .args(extra)
            .current_dir(fixtures())
            .env("BSFLOER_SEED", "11")
            .output()
            .unwrap();
        serde_json::from_slice(&out.stdout).unwrap()
    };
    assert_eq!(with_env(&[])["seed"], 11);
    assert_eq!(with_env(&["--seed", "3"])["seed"], 3);
}

#[test]
fn tangle_detector() {
    let v = report(&["detect-tangle", "--bsd", "trivial_arc_hd.json"]);
    assert_eq!(
        (v["answer"].as_str().unwrap(), v["rank"].as_u64().unwrap()),
        ("partly-boundary-parallel", 0)
    );
    let v = report(&[
        "detect-tangle",
        "--bsd",
        "trefoil_arc.json",
        "--reduce",
        "off",
    ]);
    assert_eq!(v["answer"], "not-boundary-parallel");
    assert_eq!(v["rank"], 8);
}

#[test]
fn mor_homology_and_pair() {
    let v = report(&[
        "mor",
        "--left",
        "h_inf_cfd.json",
        "--right",
        "h_inf_cfd.json",
        "--mode",
        "exact",
    ]);
    assert_eq!(v["homology_rank"], 2);
    let v = report(&[
        "homology",
        "--left",
        "h_inf_cfd.json",
        "--right",
        "solid_torus_zero.json",
    ]);
    assert_eq!(v["homology_rank"], 1);
    let v = report(&[
        "pair",
        "--left",
        "h_inf_cfd.json",
        "--right",
        "solid_torus_zero.json",
    ]);
    assert_eq!(v["homology_rank"], 1);
}

#[test]
fn module_and_tensor() {
    let v = report(&["module", "--input", "factored_slide_pair.json"]);
    assert_eq!(v["generators"], 1);
    assert_eq!(v["pieces"].as_array().unwrap().len(), 3);
    let v = report(&[
        "tensor",
        "--bimodule",
        "genus1_identity_hd.json",
        "--module",
        "h_inf_cfd.json",
    ]);
    assert_eq!(v["generators"], 1);
    assert_eq!(v["module"]["schema"], "bsfloer.typed/1");
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("bsfloer-out-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let out = run(&["algebra", "--arc-diagram", "genus1.json", "--out", p]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["dimension"], 8);
    std::fs::remove_file(path).unwrap();
}
