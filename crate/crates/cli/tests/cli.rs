use std::io::Write;
use std::process::Command;

use serde_json::{json, Value};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn lpa(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_lpa")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(run: &Run) -> Value {
    serde_json::from_str(&run.stdout).unwrap_or_else(|e| panic!("{e}: {}", run.stdout))
}

fn file(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

const R2: &str = "quiver R2 {\n  vertex v;\n  arrow a: v -> v;\n  arrow b: v -> v;\n}\n";
const A2: &str = "# line of length one\nquiver A2 { vertex 1 2; arrow a: 1 -> 2; }\n";
const R1: &str = "quiver R1 { vertex v; arrow x: v -> v; }\n";

#[test]
fn relcheck_passes_on_a_rose_file() {
    let q = file(R2);
    let run = lpa(&["relcheck", q.path().to_str().unwrap(), "--window", "4"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let doc = json(&run);
    assert_eq!(doc["verdict"], "pass");
    for section in ["algebra", "F", "N"] {
        for family in doc["result"][section].as_array().unwrap() {
            assert_eq!(family["failures"], json!([]));
        }
    }
    assert_eq!(doc["inputs"]["window"], 4);
}

#[test]
fn wedderburn_of_a2() {
    let q = file(A2);
    let run = lpa(&["wedderburn", q.path().to_str().unwrap()]);
    assert_eq!(run.code, 0);
    let doc = json(&run);
    let blocks = doc["result"]["blocks"].as_array().unwrap();
    assert_eq!(blocks.len(), 1);
    assert_eq!((&blocks[0]["sink"], &blocks[0]["n"]), (&json!("2"), &json!(2)));
    assert_eq!(blocks[0]["paths"], json!(["e_2", "a"]));
    assert_eq!(doc["result"]["dim"], 4);
    assert_eq!(doc["verdict"], "verified");
    let cyclic = lpa(&["wedderburn", "R1"]);
    assert_eq!((cyclic.code, json(&cyclic)["verdict"].clone()), (1, json!("not-acyclic")));
}

#[test]
fn sfaithful_needs_a_larger_field() {
    let q = file(R1);
    let path = q.path().to_str().unwrap();
    let run = lpa(&["sfaithful", path, "--field", "gf:2", "-e", "e_v - x"]);
    assert_eq!(run.code, 1);
    assert_eq!(json(&run)["verdict"], "no-witness-in-finite-field");
    let run = lpa(&["sfaithful", path, "-e", "e_v - x"]);
    assert_eq!(run.code, 0);
    let doc = json(&run);
    assert_eq!(doc["verdict"], "witness");
    assert_eq!(doc["result"]["result"], "-(x)^inf");
    let faithful = lpa(&["faithful", path, "-e", "e_v - x"]);
    assert_eq!((faithful.code, json(&faithful)["verdict"].clone()), (1, json!("hypothesis-failed")));
}

#[test]
fn input_errors_exit_two() {
    for args in [
        vec!["normalize", "T", "-e", "x +"],
        vec!["normalize", "T", "-e", "y"],
        vec!["normalize", "/nonexistent/file.quiver", "-e", "x"],
        vec!["normalize", "T", "--field", "gf:4", "-e", "x"],
        vec!["act", "T", "-e", "x", "--vector", "e_1"],
        vec!["independence", "R2", "-e", "a", "--mode", "sideways"],
        vec!["frobnicate"],
    ] {
        let run = lpa(&args);
        assert_eq!(run.code, 2, "{args:?}: {}", run.stdout);
        assert!(run.stdout.is_empty());
        assert!(!run.stderr.is_empty());
    }
    let bad = file("quiver Q {\n  vertex 1;\n  arrow a 1 -> 1;\n}\n");
    let run = lpa(&["relcheck", bad.path().to_str().unwrap()]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("3:"), "{}", run.stderr);
}

#[test]
fn expect_controls_the_exit_code() {
    let system = file("bs { points: (x)^inf; v: (x)^inf; x: [(x)^inf]; sigma x: (x)^inf->(x)^inf; }\n");
    let path = system.path().to_str().unwrap();
    let run = lpa(&["classify-bs", "R1", path, "--expect", "irreducible"]);
    assert_eq!(run.code, 0, "{}{}", run.stdout, run.stderr);
    let run = lpa(&["classify-bs", "R1", path, "--expect", "reducible"]);
    assert_eq!(run.code, 1);
    assert_eq!(json(&run)["verdict"], "irreducible");
    let run = lpa(&["twist-iso", "R1", "--class", "x", "--a", "x=2", "--b", "x=3"]);
    assert_eq!((run.code, json(&run)["verdict"].clone()), (0, json!("distinguished")));
    let run = lpa(&["twist-iso", "R1", "--class", "x", "--a", "x=2", "--b", "x=3", "--expect", "iso"]);
    assert_eq!(run.code, 1);
}

#[test]
fn output_is_deterministic_in_the_seed() {
    let args = |seed: &'static str| ["certify", "R2", "--vector", "(a)^inf + 2*(a)^inf.b", "--seed", seed];
    let first = lpa(&args("7"));
    assert_eq!(first.code, 0, "{}", first.stderr);
    assert_eq!(first.stdout, lpa(&args("7")).stdout);
    assert_eq!(json(&first)["inputs"]["seed"], 7);
    let seeds: std::collections::BTreeSet<String> =
        ["0", "1", "2", "3", "4", "5"].iter().map(|s| json(&lpa(&args(s)))["result"]["target"].to_string()).collect();
    assert!(seeds.len() > 1, "the seed never changed the target");
}

#[test]
fn algebra_commands() {
    let run = lpa(&["normalize", "T", "-e", "x^*.x - e_1 + f^*.f"]);
    assert_eq!(run.code, 0);
    let doc = json(&run);
    assert_eq!((&doc["result"]["reduced"], &doc["verdict"]), (&json!("0"), &json!("zero")));
    let run = lpa(&["normalize", "T", "--special-edges", "1=x", "-e", "x^*.x - e_1"]);
    assert_eq!(json(&run)["result"]["reduced"], "-f^*.f");
    let run = lpa(&["mul", "R2", "-e", "a^*", "-e", "a"]);
    assert_eq!(json(&run)["result"]["product"], "e_v - b^*.b");
    let run = lpa(&["act", "T", "-e", "f^*", "--vector", "e_2", "--trace"]);
    let doc = json(&run);
    assert_eq!(doc["result"]["result"], "f");
    assert_eq!(doc["trace"].as_array().unwrap().len(), 2);
    let run = lpa(&["act", "R1", "-e", "x", "--vector", "(x)^inf", "--twist", "x=1/2"]);
    assert_eq!(json(&run)["result"]["result"], "1/2*(x)^inf");
}

#[test]
fn pretty_output_is_plain_text() {
    let run = lpa(&["wedderburn", "A2", "--pretty"]);
    assert_eq!(run.code, 0);
    assert!(serde_json::from_str::<Value>(&run.stdout).is_err());
    assert!(run.stdout.contains("verdict: verified"), "{}", run.stdout);
}

#[test]
fn special_edges_change_normal_forms_not_zeros() {
    let normal = |special: &str, e: &str| {
        let mut args = vec!["normalize", "R2", "-e", e];
        if !special.is_empty() {
            args.extend(["--special-edges", special]);
        }
        json(&lpa(&args))["result"]["reduced"].clone()
    };
    assert_eq!(normal("", "a^*.a"), "e_v - b^*.b");
    assert_eq!(normal("v=b", "a^*.a"), "a^*.a");
    assert_eq!(normal("v=b", "b^*.b"), "e_v - a^*.a");
    assert_eq!(normal("", "a^*.a + b^*.b - e_v"), "0");
    assert_eq!(normal("v=b", "a^*.a + b^*.b - e_v"), "0");
}
