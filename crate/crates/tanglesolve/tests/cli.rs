//! Drives the compiled binary through every subcommand: happy paths with
//! frozen output, the exit-code contract (0 success, 2 usage/notation,
//! 3 domain), JSON well-formedness, and quiet behavior on a closed pipe.

use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tanglesolve"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary failed to spawn")
}

/// Run expecting success; return stdout.
fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} exited {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("stdout is not utf-8")
}

/// Run expecting a failure with the given exit code; return stderr.
fn fails(args: &[&str], code: i32) -> String {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "{args:?} stdout: {} stderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stderr).expect("stderr is not utf-8")
}

fn json(args: &[&str]) -> serde_json::Value {
    let text = ok(args);
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("{args:?} emitted bad JSON: {e}"))
}

#[test]
fn normalize_prints_canonical_forms() {
    assert_eq!(ok(&["normalize", "13,31"]), "b(13,5)\n");
    // negative parameters must parse despite the leading hyphen
    assert_eq!(ok(&["normalize", "-11,-29"]), "b(11,7)\n");
    assert_eq!(ok(&["normalize", "0,1"]), "b(0,1)\n");

    let err = fails(&["normalize", "4,2"], 3);
    assert!(err.contains("coprime"), "unexpected domain error: {err}");
    fails(&["normalize", "4:2"], 2);
    fails(&["normalize", "4,x"], 2);
}

#[test]
fn closure_computes_both_kinds() {
    assert_eq!(ok(&["closure", "13/4"]), "b(13,3)\n");
    assert_eq!(ok(&["closure", "13/4", "--kind", "D"]), "b(4,1)\n");
    assert_eq!(ok(&["closure", "inf"]), "b(1,1)\n");
    assert_eq!(ok(&["closure", "-3"]), "b(3,1)\n");
    assert_eq!(ok(&["closure", "-3/7"]), "b(3,1)\n");

    fails(&["closure", "13//4"], 2);
    fails(&["closure", "0/0"], 2);
}

#[test]
fn sfs_prints_the_normal_form() {
    assert_eq!(ok(&["sfs", "M(0,0;(2,1),(3,4))"]), "L(11,3)\n");
    // three exceptional fibers still classify successfully, just not as
    // a lens space or lens sum
    let out = ok(&["sfs", "M(0,0;(2,1),(3,1),(5,1))"]);
    assert!(
        out.starts_with("not a lens space or sum of lens spaces"),
        "unexpected classification: {out}"
    );

    fails(&["sfs", "M(0,0"], 2);
    let err = fails(&["sfs", "M(0,0;(4,2))"], 3);
    assert!(err.contains("coprime"), "unexpected domain error: {err}");
}

#[test]
fn surgery_cable_covers_every_filling_branch() {
    let base = ["surgery-cable", "--ambient", "1,1", "--companion", "2,5", "--cable", "2,21"];
    let with_slope = |s: &'static str| {
        let mut args = base.to_vec();
        args.extend_from_slice(&["--slope", s]);
        args
    };

    // meridian filling restores the ambient space
    assert_eq!(ok(&with_slope("inf")), "L(1,1)\n");
    // the cabling slope compresses reducibly
    assert_eq!(ok(&with_slope("42/1")), "L(2,1) # L(13,8)\n");
    // the adjacent integer slope passes to the companion torus knot
    assert_eq!(ok(&with_slope("41")), "L(25,16)\n");
    // far slopes leave the cabling torus incompressible
    assert!(ok(&with_slope("-7")).starts_with("toroidal or Seifert"));

    fails(&with_slope("x/y"), 2);
    fails(&with_slope("0/0"), 3);
    let mut bad = with_slope("41");
    bad[4] = "2,4";
    let err = fails(&bad, 3);
    assert!(err.contains("coprime"), "unexpected domain error: {err}");
}

#[test]
fn surgery_iterated_lists_lens_slopes() {
    let out = ok(&["surgery-iterated", "--ambient", "1,1", "--stages", "2,21;2,5"]);
    assert_eq!(out, "41/1 -> L(25,11)\n");

    // an off-branch outer stage admits no lens surgery
    let none = ok(&["surgery-iterated", "--ambient", "1,1", "--stages", "2,23;2,5"]);
    assert_eq!(none, "(none)\n");

    fails(&["surgery-iterated", "--ambient", "1,1", "--stages", "2,21"], 3);
    fails(&["surgery-iterated", "--ambient", "1,1", "--stages", "2"], 2);
}

#[test]
fn enumerate_emits_verified_families() {
    let out = ok(&["enumerate", "--b1", "5,1", "--bounds", "2,2,2"]);
    assert_eq!(out.matches("verified: yes").count(), 6, "families:\n{out}");
    assert!(!out.contains("verified: NO"), "unverified family:\n{out}");
    assert!(out.contains("T2i:"), "torus-knot families missing:\n{out}");

    let v = json(&["enumerate", "--b1", "5,1", "--bounds", "2,2,2", "--json"]);
    let fams = v["families"].as_array().expect("families array");
    assert_eq!(fams.len(), 6);
    for f in fams {
        assert_eq!(f["verified"], serde_json::Value::Bool(true), "{f}");
    }
    assert!(v["note"].as_str().unwrap().starts_with("solutions are complete within"));

    // the two-component unlink yields class representatives of infinite
    // families, and says so
    let unlink = ok(&["enumerate", "--b1", "0,1", "--bounds", "2,2,2"]);
    assert!(unlink.contains("infinite-family:"), "missing flag:\n{unlink}");

    fails(&["enumerate", "--b1", "5,1", "--bounds", "1,2"], 2);
    fails(&["enumerate", "--b1", "5,1", "--bounds", "1,1,2"], 3);
}

#[test]
fn solve_composite_finds_the_cable_families() {
    let args = ["solve-composite", "--b1", "1,1", "--b2", "2,1", "--b3", "13,5"];
    let out = ok(&args);
    assert_eq!(out.matches("verified: yes").count(), 4, "families:\n{out}");
    assert!(out.contains("p1=2 q1=5 p=2 q=21"), "expected family missing:\n{out}");
    assert!(out.contains("products: b(2,1) # b(13,5)"));

    let mut jargs = args.to_vec();
    jargs.push("--json");
    let v = json(&jargs);
    assert_eq!(
        v["query"].as_str().unwrap(),
        "solve-composite b1=b(1,1) b2=b(2,1) b3=b(13,5) mode=strict"
    );
    let fams = v["families"].as_array().expect("families array");
    assert_eq!(fams.len(), 4);
    let named = fams
        .iter()
        .find(|f| f["case"] == "T1i" && f["params"]["q"] == 21)
        .expect("T1i family with q = 21");
    assert_eq!(named["params"]["p1"], 2);
    assert_eq!(named["params"]["q1"], 5);
    assert_eq!(named["X1"], "0/1");
    assert_eq!(named["X2"], "inf");
    assert_eq!(named["products"], serde_json::json!([[2, 1], [13, 5]]));
    assert_eq!(named["verified"], serde_json::Value::Bool(true));
}

#[test]
fn solve_composite_reports_empty_answers_with_scope() {
    let args = ["solve-composite", "--b1", "1,1", "--b2", "3,1", "--b3", "3,1"];
    let out = ok(&args);
    assert!(out.starts_with("no solution families;"), "got:\n{out}");
    assert!(out.contains("are not searched"), "scope note missing:\n{out}");

    let mut jargs = args.to_vec();
    jargs.push("--json");
    let v = json(&jargs);
    assert_eq!(v["families"].as_array().expect("families array").len(), 0);
    assert!(v["note"].as_str().unwrap().starts_with("solutions are complete within"));
}

#[test]
fn solve_lens_finds_the_ring_families() {
    let out = ok(&["solve-lens", "--b1", "1,1", "--b2", "25,11"]);
    assert!(out.contains("S4a:"), "got:\n{out}");
    assert!(out.contains("X2 = -1/1"), "got:\n{out}");
    assert!(out.contains("p1=2 q1=5"), "got:\n{out}");
    assert!(!out.contains("verified: NO"));

    let out = ok(&["solve-lens", "--b1", "1,1", "--b2", "23,13"]);
    assert!(out.contains("S4b:"), "got:\n{out}");
    assert!(out.contains("X2 = 1/1"), "got:\n{out}");
}

#[test]
fn mirror_mode_widens_the_match() {
    // b(23,7) is the mirror of the S4b product b(23,13); strict matching
    // still reaches it through the negative-q1 S4a families, mirror
    // matching adds the S4b pair on top
    let strict = ok(&["solve-lens", "--b1", "1,1", "--b2", "23,7"]);
    let mirror = ok(&["solve-lens", "--b1", "1,1", "--b2", "23,7", "--mode", "mirror"]);
    let count = |s: &str| s.matches("verified: yes").count();
    assert_eq!(count(&strict), 2, "strict:\n{strict}");
    assert_eq!(count(&mirror), 4, "mirror:\n{mirror}");
    assert!(!mirror.contains("verified: NO"), "mirror:\n{mirror}");
}

#[test]
fn verify_reports_both_equation_checks() {
    let out = ok(&["verify", "--b1", "1,1", "--b2", "2,1", "--b3", "13,5"]);
    assert!(
        out.contains("first equation: expected L(1,1), got L(1,1): pass"),
        "got:\n{out}"
    );
    assert!(out.contains("second equation:"), "got:\n{out}");
    assert!(!out.contains("FAIL"), "got:\n{out}");

    // the lens system omits --b3
    let out = ok(&["verify", "--b1", "1,1", "--b2", "25,11"]);
    assert!(out.contains("first equation:"), "got:\n{out}");
    assert!(!out.contains("FAIL"), "got:\n{out}");

    let v = json(&["verify", "--b1", "1,1", "--b2", "2,1", "--b3", "13,5", "--json"]);
    let fams = v["families"].as_array().expect("families array");
    assert!(!fams.is_empty());
    for f in fams {
        assert_eq!(f["eq1"]["pass"], serde_json::Value::Bool(true), "{f}");
        assert_eq!(f["eq2"]["pass"], serde_json::Value::Bool(true), "{f}");
    }
}

#[test]
fn malformed_invocations_use_the_usage_exit_code() {
    fails(&["solve-composite", "--b1", "1,1", "--b2", "2,1"], 2);
    fails(&["no-such-command"], 2);
    fails(&["closure"], 2);
}

#[cfg(unix)]
#[test]
fn closed_stdout_pipe_stays_quiet() {
    use std::io::{BufRead, BufReader};
    use std::os::unix::process::ExitStatusExt;

    // enough output to overrun the pipe buffer after the reader hangs up
    let mut child = bin()
        .args(["enumerate", "--b1", "1,1", "--bounds", "4,9,4", "--json"])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary failed to spawn");

    let stdout = child.stdout.take().expect("stdout handle");
    let mut first = String::new();
    BufReader::new(stdout).read_line(&mut first).expect("read first line");
    assert_eq!(first.trim_end(), "{");
    // dropping the reader closes the pipe; the writer must not panic
    let out = child.wait_with_output().expect("wait failed");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(!stderr.contains("panic"), "stderr:\n{stderr}");
    let died_of_sigpipe = out.status.signal() == Some(13);
    assert!(
        out.status.success() || died_of_sigpipe,
        "unexpected exit: {:?}",
        out.status
    );
}
