use std::path::{Path, PathBuf};

use mcflow::run;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn mcflow(args: &[&str]) -> mcflow::Rendered {
    run(std::iter::once("mcflow").chain(args.iter().copied()))
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

const SPEC: &str = r#""spec": {"N": 1, "lambda": [[2, 1]], "kappa": [1, 1], "C": [3, 1]}"#;

#[test]
fn shipped_dgla_validates() {
    let r = mcflow(&["validate", &data("heisenberg.json")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("relations hold up to arity 4"));
}

#[test]
fn malformed_rational_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.json", &format!(r#"{{ {SPEC}, "eta": [1, 0] }}"#));
    let r = mcflow(&["validate", &f]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("positive denominator"), "{}", r.stderr);
    assert_eq!(mcflow(&["cohomology", &data("complex.json"), "--p", "1/x"]).code, 2);
}

#[test]
fn unsorted_tuple_gets_the_canonical_form() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        r#"{{ {SPEC},
          "generators": [
            {{"id": "a", "qdeg": [1, 1], "parity": 1, "kind": "orbit", "level": 1, "action": [0, 1]}},
            {{"id": "b", "qdeg": [1, 1], "parity": 1, "kind": "orbit", "level": 1, "action": [0, 1]}}],
          "constants": [{{"d": 2, "inputs": ["b", "a"], "output": [{{"gen": "a", "coeff": [1, 1], "monomial": [0]}}]}}] }}"#
    );
    let r = mcflow(&["validate", &write(dir.path(), "unsorted.json", &body)]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains(r#"["a", "b"]"#), "{}", r.stderr);
}

#[test]
fn missing_file_and_unknown_field_are_input_errors() {
    assert_eq!(mcflow(&["validate", "/nonexistent/file.json"]).code, 2);
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "extra.json", r#"{"colour": 3}"#);
    assert_eq!(mcflow(&["validate", &f]).code, 2);
    assert_eq!(mcflow(&["frobnicate"]).code, 2);
}

#[test]
fn zero_example_flow_is_one_minus_tau_times_qx() {
    let r = mcflow(&["flow", &data("zero_flow.json")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("c_tau = (1 - tau)*(q*x)"), "{}", r.stdout);
}

#[test]
fn compare_passes_and_names_the_failing_stage() {
    let caps = data("pipeline_caps.json");
    let r = mcflow(&["compare", &data("pipeline_n1.json"), &caps]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("verdict: ranks agree"));
    let r = mcflow(&["compare", &data("pipeline_broken.json"), &caps]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("stage `validate`"), "{}", r.stderr);
    // without caps the phi stage cannot run
    assert_eq!(mcflow(&["compare", &data("pipeline_n1.json")]).code, 2);
}

#[test]
fn resonant_slope_names_the_pair() {
    let r = mcflow(&["orbits", &data("orbit_resonant.json"), "--levels", "1"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("(n, i) = (1, 1)"), "{}", r.stderr);
    let ok = mcflow(&["orbits", &data("orbit_model.json")]);
    assert_eq!(ok.code, 0);
    assert!(ok.stdout.starts_with("stratum,n,m,rho,action,index_center,index_halfwidth,class,P_value\n"));
}

#[test]
fn json_reports_parse() {
    for args in [
        vec!["flow", "flow2.json"],
        vec!["telescope", "telescope.json"],
        vec!["cohomology", "complex.json"],
        vec!["orbits", "orbit_model.json"],
    ] {
        let mut full: Vec<String> = vec![args[0].into(), data(args[1]), "--format".into(), "json".into()];
        full.insert(0, "mcflow".into());
        let r = run(full);
        assert_eq!(r.code, 0, "{args:?}: {}", r.stderr);
        serde_json::from_str::<serde_json::Value>(&r.stdout).unwrap();
    }
}

#[test]
fn curvature_reports_but_does_not_judge() {
    let dir = tempfile::tempdir().unwrap();
    let beta = write(dir.path(), "beta.json", r#"{"beta": [{"gen": "a", "coeff": [1, 1], "monomial": [1]}]}"#);
    let r = mcflow(&["curvature", &data("abelian.json"), &beta]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("= q*b + q*c\nMaurer-Cartan: no"), "{}", r.stdout);
    // a constant term is outside Q_{>=1}
    let flat = write(dir.path(), "flat.json", r#"{"beta": [{"gen": "e", "coeff": [1, 1], "monomial": [0]}]}"#);
    assert_eq!(mcflow(&["curvature", &data("abelian.json"), &flat]).code, 1);
}
