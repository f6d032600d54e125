//! Acceptance criterion 8: the CLI contract — parse/format round-trip,
//! JSON schema validation, exit-code conformance, and report determinism.

use std::process::{Command, Output};
use std::time::Instant;

use schouten_cli::expr::{format_expression, parse_expression, Mode};
use schouten_core::sampling::{random_multivector, SplitMix64};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_schouten"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(output: &Output) -> serde_json::Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&output.stdout)
        )
    })
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

#[test]
fn criterion_8_cli_contract() {
    let start = Instant::now();

    // -- parse/format round-trip on 200 random multivectors ---------------
    let mut rng = SplitMix64::new(888);
    let mut round_trips = 0;
    while round_trips < 200 {
        let vars = 2 + (rng.next_u64() % 4) as usize;
        let grade = (rng.next_u64() % 4) as usize;
        if grade > vars {
            continue;
        }
        let mode = if rng.next_u64().is_multiple_of(2) {
            Mode::Affine
        } else {
            Mode::Homogeneous
        };
        let mv = random_multivector(&mut rng, vars, grade, 3, 4);
        let formatted = format_expression(&mv, mode);
        let back = parse_expression(&formatted, mode, vars)
            .unwrap_or_else(|e| panic!("{formatted}: {e}"));
        assert_eq!(back, mv, "round trip through {formatted:?}");
        // formatting is canonical: a second pass is identical
        assert_eq!(format_expression(&back, mode), formatted);
        round_trips += 1;
    }

    // -- JSON schema validation --------------------------------------------
    let out = run(&["check-poisson", "x1*x2*(e1^e2)", "--vars", "4"]);
    assert_eq!(code(&out), 0, "the product bivector is Poisson");
    let doc = json_of(&out);
    for (key, kind) in [
        ("command", "string"),
        ("version", "string"),
        ("verdict", "string"),
        ("config", "object"),
        ("result", "any"),
        ("dimensions", "object"),
        ("bases", "object"),
        ("certificates", "array"),
        ("timing_ms", "number"),
        ("timestamp", "number"),
    ] {
        let value = doc
            .get(key)
            .unwrap_or_else(|| panic!("schema: missing key {key}"));
        let ok = match kind {
            "string" => value.is_string(),
            "object" => value.is_object(),
            "array" => value.is_array(),
            "number" => value.is_number(),
            _ => true,
        };
        assert!(ok, "schema: {key} should be {kind}, got {value}");
    }
    assert_eq!(doc["verdict"], "poisson");
    assert_eq!(doc["result"]["residual"], "0");
    // config echoes every input including defaults
    assert_eq!(doc["config"]["mode"], "affine");
    assert_eq!(doc["config"]["vars"], 4);

    // -- exit-code conformance corpus ---------------------------------------
    // 0: mathematical positives
    let out = run(&[
        "rank",
        "x1*x2*(e1^e2) + x3*x4*(e3^e4)",
        "--vars",
        "4",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_of(&out)["result"]["rank"], 4);

    // 1: mathematical negative (not Poisson), still a full report
    let out = run(&["check-poisson", "x2*(e1^e2) + x1*(e2^e3)", "--vars", "3"]);
    assert_eq!(code(&out), 1);
    let doc = json_of(&out);
    assert_eq!(doc["verdict"], "not-poisson");
    assert_ne!(doc["result"]["residual"], "0");

    // 2: parse errors with positions, unknown identifiers, bad usage
    let out = run(&["check-poisson", "x1*+", "--vars", "3"]);
    assert_eq!(code(&out), 2);
    assert!(json_of(&out)["error"]
        .as_str()
        .unwrap()
        .contains("parse error at 1:"));
    let out = run(&["check-poisson", "x1*e1 + e1^e2", "--vars", "3"]);
    assert_eq!(code(&out), 2, "grade mismatch in a sum is a usage error");
    let out = run(&["rank", "z9", "--vars", "3"]);
    assert_eq!(code(&out), 2);
    let out = bin().arg("no-such-command").output().expect("runs");
    assert_eq!(code(&out), 2, "clap usage errors exit 2");

    // 3: precondition errors carry certificates where they exist
    let out = run(&["delta-kernel", "--lambda", "2,5,11", "--grade", "2", "--deg", "4"]);
    assert_eq!(code(&out), 3, "order-6 certificate fails for (2,5,11)");
    let doc = json_of(&out);
    assert_eq!(doc["certificates"][0]["witness"], serde_json::json!([3, 1, -1]));
    let out = run(&[
        "verify-pullback",
        "--n",
        "4",
        "--seed",
        "1",
        "--lambda",
        "2,5,11,23",
        "--order",
        "4",
    ]);
    assert_eq!(code(&out), 3, "eigenvalue tuple must have length n-1");
    let out = run(&[
        "verify-pullback",
        "--n",
        "3",
        "--seed",
        "1",
        "--lambda",
        "1,-1",
        "--order",
        "4",
    ]);
    assert_eq!(code(&out), 3, "origin inside the hull is inadmissible");
    let out = run(&[
        "linearize",
        "y1*e1 + 2*y2*e2 + y1**2*e2",
        "--vars",
        "2",
        "--order",
        "2",
    ]);
    assert_eq!(code(&out), 3, "resonant linearization is a precondition error");
    let out = run(&[
        "decompose-alpha0",
        "x3**2*(e1^e2)",
        "--lambda",
        "1,7,50",
        "--deg",
        "3",
    ]);
    assert_eq!(code(&out), 3, "violated hypothesis is a precondition error");

    // -- determinism: identical config gives byte-identical reports modulo
    //    the isolated timing fields ------------------------------------------
    let redact = |mut v: serde_json::Value| {
        v["timing_ms"] = serde_json::json!(0);
        v["timestamp"] = serde_json::json!(0);
        serde_json::to_string(&v).unwrap()
    };
    let a = run(&["delta-kernel", "--lambda", "1,7,50", "--grade", "1", "--deg", "4"]);
    let b = run(&["delta-kernel", "--lambda", "1,7,50", "--grade", "1", "--deg", "4"]);
    assert_eq!(code(&a), 0);
    assert_eq!(redact(json_of(&a)), redact(json_of(&b)));
    assert_eq!(json_of(&a)["dimensions"]["kernel"], 3);

    // -- batch mode: array output ordered by seed ---------------------------
    let out = run(&[
        "verify-pullback",
        "--n",
        "3",
        "--seed",
        "2",
        "--seed",
        "1",
        "--lambda",
        "2,5",
        "--order",
        "4",
    ]);
    assert_eq!(code(&out), 0);
    let doc = json_of(&out);
    let arr = doc.as_array().expect("batch emits an array");
    assert_eq!(arr.len(), 2);
    assert_eq!(arr[0]["seed"], 1);
    assert_eq!(arr[1]["seed"], 2);
    for r in arr {
        assert_eq!(r["verdict"], "first-order-theorem-verified");
        assert!(r["result"]["outside_scope"].is_string(), "n=3 runs are flagged");
    }

    // -- env var supplies the default truncation degree ----------------------
    let out = bin()
        .env("SCHOUTEN_TRUNC_DEGREE", "2")
        .args(["delta-kernel", "--lambda", "2,5,11", "--grade", "2"])
        .output()
        .expect("runs");
    assert_eq!(code(&out), 0, "(2,5,11) certifies at d=2 (order 4)");
    let doc = json_of(&out);
    assert_eq!(doc["config"]["deg"], 2);
    assert_eq!(doc["dimensions"]["kernel"], 3);

    // -- --out writes the same report to a file ------------------------------
    let tmp = std::env::temp_dir().join("schouten_cli_acceptance_report.json");
    let _ = std::fs::remove_file(&tmp);
    let out = run(&[
        "rank",
        "x1*x2*(e1^e2)",
        "--vars",
        "4",
        "--out",
        tmp.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let written: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&tmp).unwrap()).unwrap();
    assert_eq!(written["result"]["rank"], 2);
    let _ = std::fs::remove_file(&tmp);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "budget: {elapsed:?} >= 1min");
    println!(
        "ACCEPTANCE criterion 8: PASS (200 round-trips, schema validated, exit-code corpus \
         conforms, reports deterministic; {elapsed:?})"
    );
}
