//! End-to-end tests of the `barycentra` binary: exit codes, JSON output
//! shapes, seeding rules, and file emission, all through real subprocesses.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_barycentra"))
}

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let Output {
        status,
        stdout,
        stderr,
    } = bin().args(args).output().expect("binary runs");
    (
        status.code().expect("no signal"),
        String::from_utf8(stdout).expect("utf-8 stdout"),
        String::from_utf8(stderr).expect("utf-8 stderr"),
    )
}

fn json(out: &str) -> serde_json::Value {
    serde_json::from_str(out).expect("stdout is JSON")
}

const SEGMENT: &str = r#"{"ambient_dim":1,"vertices":[["0"],["1"]]}"#;
const TRIANGLE: &str = r#"{"ambient_dim":2,"vertices":[["0","0"],["1","0"],["0","1"]]}"#;

// ===== check =====

#[test]
fn check_builtin_barycentric_suite_passes() {
    let (code, out, _) = run(&[
        "check",
        "builtin:t-algebra",
        "--laws",
        "barycentric",
        "--sampled",
        "1000",
        "--seed",
        "7",
    ]);
    assert_eq!(code, 0, "{out}");
    let reports = json(&out);
    let names: Vec<&str> = reports
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["law"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        vec![
            "idempotence",
            "skew-commutativity",
            "skew-associativity",
            "entropicity"
        ]
    );
    assert!(reports
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["result"] == "pass"));
}

#[test]
fn check_builtin_cancellativity_fails_with_witness() {
    let (code, out, _) = run(&[
        "check",
        "builtin:t-algebra",
        "--laws",
        "cancellativity",
        "--sampled",
        "1000",
        "--seed",
        "7",
    ]);
    assert_eq!(code, 1);
    let reports = json(&out);
    let report = &reports.as_array().unwrap()[0];
    assert_eq!(report["result"], "fail");
    let cx = &report["counterexample"];
    // The two distinct right arguments collapse to the same image.
    assert_ne!(cx["lhs"], cx["rhs"]);
    assert!(cx["elements"]["x"].is_string());
    assert!(cx["weights"]["p"].is_string());
}

#[test]
fn check_affine_space_exhaustively() {
    let (code, out, _) = run(&["check", "affine-gf:{p:3,n:2}", "--laws", "affine", "--exhaustive"]);
    assert_eq!(code, 0, "{out}");
    let reports = json(&out);
    assert_eq!(reports.as_array().unwrap().len(), 5);
    for r in reports.as_array().unwrap() {
        assert_eq!(r["result"], "pass");
        assert_eq!(r["strategy"]["kind"], "exhaustive");
    }
}

#[test]
fn check_accepts_strict_space_json_too() {
    let (code, _, _) = run(&[
        "check",
        r#"affine-gf:{"modulus":3,"dimension":1}"#,
        "--laws",
        "affine",
        "--exhaustive",
    ]);
    assert_eq!(code, 0);
}

#[test]
fn check_pinned_weights_localize_a_failure() {
    let (code, out, _) = run(&[
        "check",
        &format!("polytope:{SEGMENT}"),
        "--laws",
        "iterated-semilattice",
        "--pin",
        "p=1/2,r=1/3",
        "--sampled",
        "100",
    ]);
    assert_eq!(code, 1);
    let reports = json(&out);
    let cx = &reports.as_array().unwrap()[0]["counterexample"];
    assert_eq!(cx["weights"]["p"], "1/2");
    assert_eq!(cx["weights"]["r"], "1/3");
    assert_eq!(cx["lhs"], "(1/2)");
    assert_eq!(cx["rhs"], "(1/3)");
}

#[test]
fn check_semilattice_model_exhaustively() {
    let vee = r#"{"elements":["a","b","c"],"join":[["a","a","a"],["b","b","b"],["c","c","c"],["a","b","c"],["a","c","c"],["b","c","c"]]}"#;
    let (code, out, _) = run(&[
        "check",
        &format!("semilattice:{vee}"),
        "--laws",
        "barycentric,iterated-semilattice",
        "--exhaustive",
    ]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(json(&out).as_array().unwrap().len(), 5);
}

#[test]
fn check_writes_report_to_file_with_out() {
    let dir = tempfile::tempdir().unwrap();
    let path: PathBuf = dir.path().join("report.json");
    let (code, out, _) = run(&[
        "check",
        "builtin:extended-line",
        "--laws",
        "idempotence",
        "--sampled",
        "50",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "", "stdout is quiet when --out is given");
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(json(&text).as_array().unwrap()[0]["result"], "pass");
}

#[test]
fn check_usage_errors_exit_two() {
    // Unknown law name.
    let (code, _, err) = run(&["check", "builtin:t-algebra", "--laws", "no-such-law"]);
    assert_eq!(code, 2);
    assert!(err.contains("no-such-law"), "{err}");
    // Law not applicable to the scalar kind.
    let (code, _, _) = run(&[
        "check",
        "builtin:t-algebra",
        "--laws",
        "projection-left",
        "--sampled",
        "10",
    ]);
    assert_eq!(code, 2);
    // Exhaustive sweep over an infinite carrier.
    let (code, _, _) = run(&[
        "check",
        &format!("polytope:{SEGMENT}"),
        "--laws",
        "idempotence",
        "--exhaustive",
    ]);
    assert_eq!(code, 2);
    // Malformed JSON payload.
    let (code, _, _) = run(&["check", "polytope:{broken", "--laws", "idempotence"]);
    assert_eq!(code, 2);
    // Missing file.
    let (code, _, _) = run(&["check", "polytope:/no/such/file.json", "--laws", "idempotence"]);
    assert_eq!(code, 2);
}

// ===== replica =====

#[test]
fn replica_of_t_algebra_has_five_classes() {
    let (code, out, _) = run(&["replica", "builtin:t-algebra"]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    assert_eq!(v["classes"], 5);
    assert_eq!(v["matches_expected"], true);
    assert_eq!(v["samples"].as_array().unwrap().len(), 5);
}

#[test]
fn replica_of_square_file_has_nine_classes() {
    let (code, out, _) = run(&["replica", &format!("polytope:{}", fixture("square.json"))]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    assert_eq!(v["classes"], 9);
}

#[test]
fn replica_of_gf3_squared_has_six_classes() {
    let (code, out, _) = run(&["replica", "affine-gf:{p:3,n:2}"]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    assert_eq!(v["classes"], 6);
    assert_eq!(v["matches_expected"], true);
}

#[test]
fn replica_writes_dot_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("replica.dot");
    let (code, _, _) = run(&["replica", "builtin:t-algebra", "--dot", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let dot = std::fs::read_to_string(&path).unwrap();
    assert!(dot.starts_with("digraph"), "{dot}");
}

// ===== faces =====

#[test]
fn faces_counts_match_known_polytopes() {
    for (payload, expected) in [
        (SEGMENT.to_string(), vec![2, 1]),
        (TRIANGLE.to_string(), vec![3, 3, 1]),
        (fixture("square.json"), vec![4, 4, 1]),
        (fixture("cube.json"), vec![8, 12, 6, 1]),
    ] {
        let (code, out, _) = run(&["faces", &payload]);
        assert_eq!(code, 0, "{out}");
        let v = json(&out);
        let counts: Vec<u64> = v["counts_by_dim"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c.as_u64().unwrap())
            .collect();
        let expected: Vec<u64> = expected.into_iter().collect();
        assert_eq!(counts, expected);
    }
}

#[test]
fn faces_rejects_non_extreme_vertex_naming_it() {
    let bad = r#"{"ambient_dim":1,"vertices":[["0"],["1"],["1/2"]]}"#;
    let (code, out, err) = run(&["faces", bad]);
    assert_eq!(code, 2);
    assert_eq!(out, "");
    assert!(err.contains("not extreme"), "{err}");
    assert!(err.contains("(1/2)"), "offending vertex is named: {err}");
}

// ===== plonka =====

#[test]
fn plonka_validate_accepts_the_presentation_file() {
    let (code, out, _) = run(&["plonka", "validate", &fixture("t-presentation.json")]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    assert_eq!(v["result"], "pass");
    assert_eq!(v["fibers"], 2);
    assert_eq!(v["transitions"], 1);
    assert_eq!(v["index"], serde_json::json!(["0", "1"]));
}

#[test]
fn plonka_validate_rejects_a_non_functorial_sum() {
    // The transition sends [0,1] to the point 2, outside the fiber [1/2,3/2].
    let broken = r#"{
      "index": {"elements":["0","1"],"join":[["0","0","0"],["0","1","1"],["1","1","1"]]},
      "fibers": {
        "0": {"kind":"polytope","data":{"ambient_dim":1,"vertices":[["0"],["1"]]}},
        "1": {"kind":"polytope","data":{"ambient_dim":1,"vertices":[["1/2"],["3/2"]]}}
      },
      "transitions": [{"from":"0","to":"1","matrix":[["0"]],"offset":["2"]}]
    }"#;
    let (code, out, _) = run(&["plonka", "validate", broken]);
    assert_eq!(code, 1);
    let v = json(&out);
    assert_eq!(v["result"], "fail");
    assert!(v["error"].is_string());
}

#[test]
fn plonka_eval_uses_named_points_and_greek_aliases() {
    let file = fixture("t-presentation.json");
    let (code, out, _) = run(&[
        "plonka", "eval", &file, "--p", "1/2", "--x", "0:α", "--y", "1:γ",
    ]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    // alpha transports to the branch point 1/2; midpoint with 3/2 is 1.
    assert_eq!(v["fiber"], "1");
    assert_eq!(v["point"], serde_json::json!(["1"]));
    assert_eq!(v["display"], "1:(1)");

    // ASCII names and raw coordinates resolve to the same elements.
    let (_, out_ascii, _) = run(&[
        "plonka", "eval", &file, "--p", "1/2", "--x", "alpha", "--y", "gamma",
    ]);
    assert_eq!(out_ascii, out);
    let (_, out_raw, _) = run(&[
        "plonka", "eval", &file, "--p", "1/2", "--x", "0:(0)", "--y", "1:(3/2)",
    ]);
    assert_eq!(out_raw, out);
}

#[test]
fn plonka_eval_rejects_a_name_under_the_wrong_fiber() {
    let (code, _, err) = run(&[
        "plonka",
        "eval",
        &fixture("t-presentation.json"),
        "--p",
        "1/2",
        "--x",
        "1:α",
        "--y",
        "1:γ",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("α") || err.contains("alpha"), "{err}");
}

#[test]
fn plonka_as_plonka_reconstructs_the_square() {
    let (code, out, _) = run(&[
        "plonka",
        "as-plonka",
        &fixture("square.json"),
        "--samples",
        "200",
        "--seed",
        "7",
    ]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    assert_eq!(v["fibers"], 9);
    assert_eq!(v["samples"], 200);
    assert_eq!(v["agreements"], 200);
    assert_eq!(v["pass"], true);
}

// ===== affine =====

#[test]
fn affine_structure_reports_the_full_decomposition() {
    let (code, out, _) = run(&["affine", "structure", "{p:3,n:2}", "--k", "2"]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    assert_eq!(v["subspace_count"], 6);
    assert_eq!(v["coset_count"], 22);
    assert_eq!(v["pairs_checked"], 484);
    assert_eq!(v["pass"], true);
}

#[test]
fn affine_replica_matches_the_subspace_lattice() {
    let (code, out, _) = run(&["affine", "replica", "{p:3,n:2}"]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    assert_eq!(v["class_count"], 6);
    assert_eq!(v["isomorphic_to_subspace_lattice"], true);
    assert_eq!(v["fibers"].as_array().unwrap().len(), 6);
}

#[test]
fn affine_subspaces_counts_lines_and_planes() {
    let (code, out, _) = run(&["affine", "subspaces", "{p:3,n:2}"]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    assert_eq!(v["count"], 6);
    assert_eq!(v["counts_by_dim"], serde_json::json!([1, 4, 1]));
}

#[test]
fn affine_parallelogram_is_derived() {
    let (code, out, _) = run(&["affine", "parallelogram", "{p:5,n:1}"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(json(&out)["pass"], true);
}

#[test]
fn affine_demo_q_passes_on_the_plane_family() {
    let (code, out, _) = run(&[
        "affine",
        "demo-q",
        &fixture("qplane-family.json"),
        "--samples",
        "500",
    ]);
    assert_eq!(code, 0, "{out}");
    let v = json(&out);
    assert_eq!(v["agreements"], 500);
    assert_eq!(v["pass"], true);
}

#[test]
fn affine_demo_q_rejects_a_family_missing_a_join() {
    // x-axis and y-axis without their join, the whole plane.
    let family = r#"{"ambient_dim":2,"subspaces":[{"basis":[]},{"basis":[["1","0"]]},{"basis":[["0","1"]]}]}"#;
    let (code, _, err) = run(&["affine", "demo-q", family]);
    assert_eq!(code, 2);
    assert!(err.contains("join"), "{err}");
}

// ===== list-builtins =====

#[test]
fn list_builtins_is_complete_and_described() {
    let (code, out, _) = run(&["list-builtins"]);
    assert_eq!(code, 0);
    let v = json(&out);
    let names: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["name"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        vec![
            "extended-line",
            "homomorphism-example",
            "t-algebra",
            "toy-biology"
        ]
    );
    assert!(v
        .as_array()
        .unwrap()
        .iter()
        .all(|b| !b["description"].as_str().unwrap().is_empty()));
}

// ===== seeding and determinism =====

#[test]
fn outputs_are_byte_identical_across_runs() {
    let args = ["replica", "builtin:toy-biology", "--seed", "13"];
    let (code_a, out_a, _) = run(&args);
    let (code_b, out_b, _) = run(&args);
    assert_eq!(code_a, 0);
    assert_eq!(code_a, code_b);
    assert_eq!(out_a, out_b);
}

#[test]
fn seed_env_var_matches_the_flag_and_the_flag_wins() {
    let flag = run(&["replica", "builtin:t-algebra", "--seed", "5"]);

    let from_env = bin()
        .args(["replica", "builtin:t-algebra"])
        .env("BARYCENTRA_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(from_env.stdout).unwrap(), flag.1);

    let flag_beats_env = bin()
        .args(["replica", "builtin:t-algebra", "--seed", "5"])
        .env("BARYCENTRA_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(flag_beats_env.stdout).unwrap(), flag.1);

    let bad_env = bin()
        .args(["replica", "builtin:t-algebra"])
        .env("BARYCENTRA_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(2));
}

#[test]
fn default_seed_equals_seed_seven() {
    let (_, bare, _) = run(&["replica", "builtin:extended-line"]);
    let (_, seeded, _) = run(&["replica", "builtin:extended-line", "--seed", "7"]);
    assert_eq!(bare, seeded);
}

#[test]
fn help_exits_zero_and_bad_subcommand_exits_two() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("barycentra"));
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&[]);
    assert_eq!(code, 2);
}
