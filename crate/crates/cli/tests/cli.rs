use std::path::{Path, PathBuf};
use std::process::Command;

use lcqmac::rational::{parse_rational, Rational};
use serde_json::Value;

const THREE_PARTY: [&str; 5] = ["toyex1", "toyex2", "toyex3", "toyex4", "toyex6"];

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn expected(name: &str) -> Value {
    let text = std::fs::read_to_string(fixture(&format!("{name}.expected.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Runs the binary and returns (exit code, parsed stdout).
fn lcqmac(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_lcqmac"))
        .args(args)
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let value = serde_json::from_str(stdout.trim())
        .unwrap_or_else(|e| panic!("stdout of {args:?} is not JSON ({e}): {stdout}"));
    (out.status.code().expect("exit code"), value)
}

fn spec_arg(name: &str) -> String {
    fixture(&format!("{name}.json")).display().to_string()
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap().to_string())
        .collect()
}

fn rational(v: &Value) -> Rational {
    parse_rational(v.as_str().unwrap()).unwrap()
}

fn sorted_vertices(v: &Value) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = v.as_array().unwrap().iter().map(strings).collect();
    out.sort();
    out
}

#[test]
fn ranks_match_fixtures() {
    for name in THREE_PARTY {
        let (code, out) = lcqmac(&["ranks", &spec_arg(name)]);
        assert_eq!(code, 0);
        assert_eq!(out["ranks"], expected(name)["ranks"], "{name}");
    }
}

#[test]
fn regions_match_fixtures() {
    for name in THREE_PARTY {
        let exp = expected(name);
        let (code, out) = lcqmac(&["region", &spec_arg(name), "--vertices"]);
        assert_eq!(code, 0);
        let mut got: Vec<String> = out["inequalities"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r["text"].as_str().unwrap().to_string())
            .collect();
        let mut want = strings(&exp["region"]);
        got.sort();
        want.sort();
        assert_eq!(got, want, "{name}");
        assert_eq!(
            sorted_vertices(&out["vertices"]),
            sorted_vertices(&exp["vertices"]),
            "{name}"
        );

        // the standard-form route gives the same region
        let (code, std_out) = lcqmac(&["region", &spec_arg(name), "--standard", "--vertices"]);
        assert_eq!(code, 0);
        assert_eq!(
            sorted_vertices(&std_out["vertices"]),
            sorted_vertices(&exp["vertices"]),
            "{name}"
        );
    }
}

#[test]
fn bounds_min_total_matches_fixtures() {
    for name in THREE_PARTY.iter().copied().chain(["toyex5"]) {
        let exp = expected(name);
        let (code, out) = lcqmac(&["bounds", &spec_arg(name)]);
        assert_eq!(code, 0);
        assert_eq!(out["min_total"], exp["min_total"], "{name}");
        if let Some(cut) = exp.get("cut_set_min_total") {
            assert_eq!(&out["cut_set_min_total"], cut, "{name}");
        }
    }
}

#[test]
fn four_party_bound_and_sso() {
    let exp = expected("toyex5");
    let (_, out) = lcqmac(&["bounds", &spec_arg("toyex5")]);
    assert_eq!(out["K"], 4);
    let texts: Vec<&str> = out["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["text"].as_str().unwrap())
        .collect();
    assert!(texts.contains(&exp["bound"].as_str().unwrap()), "{texts:?}");

    let sso = &exp["sso"];
    let (code, out) = lcqmac(&[
        "sso",
        "--mx",
        sso["mx"].as_str().unwrap(),
        "--mz",
        sso["mz"].as_str().unwrap(),
        "--q",
        "3",
    ]);
    assert_eq!(out["sso"], sso["accepted"]);
    assert_eq!(code, 1);
}

#[test]
fn catalog_boxes_pass_sso() {
    let cases = [
        // two-party and three-party catalog boxes, any q
        ("1,1;0,0", "0,0;1,-1", "3", true),
        ("1,1;0,0", "0,0;1,-1", "5", true),
        ("1,1,1;0,0,0;0,0,0", "0,0,0;1,-1,0;1,0,-1", "2", true),
        ("1,1,1;0,0,0;0,0,0", "0,0,0;1,-1,0;1,0,-1", "5", true),
        // the coupled-pair box relies on 1 + 2 = 0, so only q = 3
        ("1,1,1;0,0,0;0,0,0", "0,0,0;1,2,0;1,0,2", "3", true),
        ("1,1,1;0,0,0;0,0,0", "0,0,0;1,2,0;1,0,2", "5", false),
    ];
    for (mx, mz, q, ok) in cases {
        let (code, out) = lcqmac(&["sso", "--mx", mx, "--mz", mz, "--q", q]);
        assert_eq!(out["sso"].as_bool(), Some(ok), "{mx} {mz} q={q}");
        assert_eq!(code, if ok { 0 } else { 1 });
    }
}

#[test]
fn pairwise_only_costs_more_on_coupled_pair() {
    let exp = expected("toyex1");
    let (code, out) = lcqmac(&[
        "region",
        &spec_arg("toyex1"),
        "--pairwise-only",
        "--vertices",
    ]);
    assert_eq!(code, 0);
    let least = out["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_array().unwrap().iter().map(rational).sum::<Rational>())
        .min()
        .unwrap();
    assert_eq!(least, rational(&exp["pairwise_min_total"]));
}

#[test]
fn check_reports_violated_row() {
    let (code, out) = lcqmac(&["check", &spec_arg("toyex3"), "--cost", "1/2,1/2,1"]);
    assert_eq!(code, 1);
    assert_eq!(out["feasible"], false);
    assert_eq!(out["violated"]["text"], "x1 + x2 + x3 >= 5/2");

    let (code, out) = lcqmac(&["check", &spec_arg("toyex3"), "--cost", "1/2,1/2,3/2"]);
    assert_eq!(code, 0);
    assert_eq!(out["feasible"], true);
}

#[test]
fn symmetric_profile() {
    let (code, out) = lcqmac(&["symmetric", "3", "4", "5"]);
    assert_eq!(code, 0);
    assert_eq!(out["min_total"], "21/4");
    let (code, _) = lcqmac(&["symmetric", "3", "7", "5"]);
    assert_eq!(code, 1);
}

#[test]
fn compile_then_simulate_every_fixture() {
    let dir = tempfile::tempdir().unwrap();
    for name in THREE_PARTY {
        for (i, case) in expected(name)["schemes"]
            .as_array()
            .unwrap()
            .iter()
            .enumerate()
        {
            let cost = case["cost"].as_str().unwrap();
            let out_path = dir.path().join(format!("{name}-{i}.json"));
            let out_arg = out_path.display().to_string();
            let (code, out) = lcqmac(&[
                "compile",
                &spec_arg(name),
                "--cost",
                cost,
                "--out",
                &out_arg,
            ]);
            assert_eq!(code, 0, "{name} at {cost}: {out}");
            assert_eq!(out["L"], case["L"], "{name} at {cost}");
            let budget: Vec<Rational> = cost
                .split(',')
                .map(|s| parse_rational(s).unwrap())
                .collect();
            for (c, b) in out["cost"].as_array().unwrap().iter().zip(&budget) {
                assert!(rational(c) <= *b, "{name} at {cost}");
            }

            let args: Vec<&str> = if case["exhaustive"].as_bool().unwrap() {
                vec!["simulate", &out_arg, "--exhaustive"]
            } else {
                vec!["simulate", &out_arg, "--samples", "300", "--seed", "7"]
            };
            let (code, sim) = lcqmac(&args);
            assert_eq!(code, 0, "{name} at {cost}: {sim}");
            assert_eq!(sim["passed"], true);
        }
    }
}

#[test]
fn constructive_compile_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out_arg = dir.path().join("s.json").display().to_string();
    let (code, _) = lcqmac(&[
        "compile",
        &spec_arg("toyex3"),
        "--cost",
        "1/2,1,1",
        "--out",
        &out_arg,
        "--constructive",
    ]);
    assert_eq!(code, 0);
    let (code, sim) = lcqmac(&["simulate", &out_arg, "--exhaustive"]);
    assert_eq!((code, sim["checked"].as_u64()), (0, Some(6561)));
}

#[test]
fn tampered_scheme_fails_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let out_arg = path.display().to_string();
    let (code, _) = lcqmac(&[
        "compile",
        &spec_arg("toyex1"),
        "--cost",
        "1,1,1",
        "--out",
        &out_arg,
    ]);
    assert_eq!(code, 0);
    let mut scheme: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let entry = &mut scheme["postprocess"][0][0];
    *entry = Value::from((entry.as_u64().unwrap() + 1) % 3);
    std::fs::write(&path, scheme.to_string()).unwrap();
    let (code, sim) = lcqmac(&["simulate", &out_arg, "--exhaustive"]);
    assert_eq!(code, 2);
    assert_eq!(sim["passed"], false);
    assert!(sim["counterexample"].is_object());
}

#[test]
fn exhaustive_cap_is_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let out_arg = dir.path().join("s.json").display().to_string();
    lcqmac(&[
        "compile",
        &spec_arg("toyex3"),
        "--cost",
        "1/2,1,1",
        "--out",
        &out_arg,
    ]);
    let (code, out) = lcqmac(&["simulate", &out_arg, "--exhaustive", "--cap", "100"]);
    assert_eq!(code, 1);
    assert!(out["error"].as_str().unwrap().contains("cap"));
}

#[test]
fn compile_outside_region_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out_arg = dir.path().join("s.json").display().to_string();
    let (code, out) = lcqmac(&[
        "compile",
        &spec_arg("toyex3"),
        "--cost",
        "1/2,1/2,1",
        "--out",
        &out_arg,
    ]);
    assert_eq!(code, 1);
    assert_eq!(out["violated"]["text"], "x1 + x2 + x3 >= 5/2");
    assert!(!Path::new(&out_arg).exists());
}

#[test]
fn allocate_reports_trace() {
    let (code, out) = lcqmac(&[
        "allocate",
        &spec_arg("toyex6"),
        "--cost",
        "7/4,7/4,7/4",
        "--constructive",
    ]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out["trace"]["fell_back"], false);
    assert_eq!(out["lambda"].as_array().unwrap().len(), 20);
    for c in out["cost"].as_array().unwrap() {
        assert!(rational(c) <= parse_rational("7/4").unwrap());
    }

    let (code, out) = lcqmac(&["allocate", &spec_arg("toyex1"), "--cost", "1,1,1"]);
    assert_eq!(code, 0);
    assert!(out.get("trace").is_none());
    assert_eq!(out["support"][0]["protocol"], "P17");
}

#[test]
fn decompose_is_verified() {
    for name in THREE_PARTY {
        let (code, out) = lcqmac(&["decompose", &spec_arg(name)]);
        assert_eq!(code, 0, "{name}");
        assert_eq!(out["verified"], true);
        assert_eq!(out["ranks"], expected(name)["ranks"]);
    }
}

#[test]
fn projection_matches_closed_form() {
    for name in ["toyex3", "toyex1"] {
        let (code, out) = lcqmac(&["fm-verify", &spec_arg(name)]);
        assert_eq!(code, 0, "{name}: {out}");
        assert_eq!(out["equal"], true);
    }
}

#[test]
fn bad_input_exits_one() {
    let (code, out) = lcqmac(&["ranks", "/nonexistent/spec.json"]);
    assert_eq!(code, 1);
    assert!(out["error"].as_str().unwrap().contains("cannot read"));

    let (code, _) = lcqmac(&["check", &spec_arg("toyex3"), "--cost", "1/2,x,1"]);
    assert_eq!(code, 1);
    let (code, _) = lcqmac(&["check", &spec_arg("toyex3"), "--cost", "1,1"]);
    assert_eq!(code, 1);
    let (code, out) = lcqmac(&["region", &spec_arg("toyex5")]);
    assert_eq!(code, 1);
    assert!(out["error"]
        .as_str()
        .unwrap()
        .contains("three transmitters"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"d": 4, "V1": [[1]], "V2": [[1]], "V3": [[1]]}"#).unwrap();
    let (code, _) = lcqmac(&["ranks", &bad.display().to_string()]);
    assert_eq!(code, 1);
}

#[test]
fn machine_output_has_no_decimals() {
    let (_, out) = lcqmac(&["region", &spec_arg("toyex6"), "--vertices"]);
    assert!(!out.to_string().contains('.'));
    let raw = Command::new(env!("CARGO_BIN_EXE_lcqmac"))
        .args(["--human", "symmetric", "3", "4", "5"])
        .output()
        .unwrap();
    assert!(String::from_utf8(raw.stdout)
        .unwrap()
        .contains("21/4 (~5.2500)"));
}
