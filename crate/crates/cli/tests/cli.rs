use std::process::{Command, Output};

use serde_json::Value;

fn hermscal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hermscal")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn aggregate(doc: &Value, quantity: &str) -> (f64, f64) {
    let row = doc["scalars"]["aggregate"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["quantity"] == quantity)
        .unwrap_or_else(|| panic!("no {quantity}"));
    (row["min"].as_f64().unwrap(), row["max"].as_f64().unwrap())
}

#[test]
fn flat_torus_verifies_to_rounding() {
    let out = hermscal(&["verify", "--manifold", "flat_torus_4", "--points", "10", "--samples", "64"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["summary"]["pass"], true);
    assert_eq!(doc["manifold"]["class"], "K");
    let results = doc["results"].as_array().unwrap();
    assert!(!results.is_empty());
    for r in results {
        assert!(r["abs_err"].as_f64().unwrap() < 1e-12, "{r}");
    }
    assert_eq!(doc["ledger_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["verify", "--manifold", "perturbed_torus", "--points", "6", "--samples", "64", "--seed", "3"];
    let (a, b) = (hermscal(&args), hermscal(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let c = hermscal(&with_out);
    assert_eq!(c.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
}

#[test]
fn seeds_change_the_sample() {
    let a = hermscal(&["scalars", "--manifold", "hopf_2", "--points", "2", "--seed", "1"]);
    let b = hermscal(&["scalars", "--manifold", "hopf_2", "--points", "2", "--seed", "2"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn six_sphere_scalars() {
    let out = hermscal(&["scalars", "--manifold", "s6_nearly_kaehler", "--points", "5", "--t", "-1,0,1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    for (q, want) in [("s", 30.0), ("s_j", 6.0), ("df", 36.0), ("nabla_f", 12.0), ("s1", 0.0), ("s2", 12.0)] {
        let (lo, hi) = aggregate(&doc, q);
        assert!((lo - want).abs() < 1e-7 && (hi - want).abs() < 1e-7, "{q}: [{lo}, {hi}]");
    }
    for p in doc["scalars"]["points"].as_array().unwrap() {
        let chern = p["levels"].as_array().unwrap().iter().find(|l| l["t"] == 1.0).unwrap();
        assert!(chern["s1"].as_f64().unwrap().abs() < 1e-7);
        assert!((chern["s2"].as_f64().unwrap() - 12.0).abs() < 1e-7);
    }
}

#[test]
fn classify_prints_the_label() {
    let out = hermscal(&["classify", "--manifold", "hopf_2", "--points", "8"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stderr).trim(), "W4");
    let out = hermscal(&["classify", "--manifold", "kodaira_thurston", "--points", "8"]);
    assert_eq!(String::from_utf8_lossy(&out.stderr).trim(), "W2");
}

#[test]
fn integrate_named_quantities() {
    let out = hermscal(&[
        "integrate",
        "--manifold",
        "iwasawa",
        "--samples",
        "64",
        "--integrand",
        "volume",
        "--integrand",
        "kgauduchon:k=1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("kgauduchon:k=1"));
    let bad = hermscal(&["integrate", "--manifold", "iwasawa", "--integrand", "nonsense"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn csv_output_has_one_row_per_result() {
    let out = hermscal(&["verify", "--manifold", "hopf_2", "--points", "2", "--samples", "16", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(&headers[0], "identity_id");
    let rows: Vec<_> = rdr.records().collect::<Result<_, _>>().unwrap();
    assert!(!rows.is_empty());
    let pass = headers.iter().position(|h| h == "pass").unwrap();
    assert!(rows.iter().all(|r| &r[pass] == "true"));
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(hermscal(&["verify", "--manifold", "klein_bottle"]).status.code(), Some(2));
    assert_eq!(hermscal(&["verify", "--manifold", "hopf_2", "--t", "x"]).status.code(), Some(2));
    assert_eq!(hermscal(&["verify", "--manifold", "hopf_2", "--points", "0"]).status.code(), Some(2));
    assert_eq!(hermscal(&["verify"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"dim": 3}"#).unwrap();
    let out = hermscal(&["verify", "--spec", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let missing = dir.path().join("absent.json");
    assert_eq!(hermscal(&["verify", "--spec", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn failing_identities_exit_with_one() {
    let out = hermscal(&[
        "verify",
        "--manifold",
        "perturbed_torus",
        "--points",
        "3",
        "--samples",
        "16",
        "--tol-abs",
        "1e-300",
        "--tol-rel",
        "1e-300",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&out);
    assert_eq!(doc["summary"]["pass"], false);
    assert!(doc["summary"]["failures"].as_u64().unwrap() > 0);
}

#[test]
fn user_spec_runs_end_to_end() {
    // Kaehler flat torus with a conformal bump: a user-given W4 structure
    let eye = |r: usize, c: usize| if r == c { "1 + 0.1*sin(2*pi*x1)" } else { "0" };
    let jm = |r: usize, c: usize| match (r, c) {
        (2, 0) | (3, 1) => "1",
        (0, 2) | (1, 3) => "-1",
        _ => "0",
    };
    let mat = |f: &dyn Fn(usize, usize) -> &'static str| {
        Value::Array((0..4).map(|r| Value::Array((0..4).map(|c| Value::from(f(r, c))).collect())).collect())
    };
    let spec = serde_json::json!({
        "name": "conformal_torus",
        "dim": 4,
        "metric": mat(&eye),
        "J": mat(&jm),
        "domain": {"box": [[0, 1], [0, 1], [0, 1], [0, 1]], "periodic": [true, true, true, true]},
    });
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("conformal.json");
    std::fs::write(&path, spec.to_string()).unwrap();
    let out = hermscal(&["verify", "--spec", path.to_str().unwrap(), "--points", "5", "--samples", "128"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["manifold"]["class"], "W4");
}

#[test]
fn list_names_the_catalog() {
    let out = hermscal(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for name in ["flat_torus_4", "hopf_3", "iwasawa", "s6_nearly_kaehler", "perturbed_torus"] {
        assert!(text.contains(name), "{name}");
    }
}
