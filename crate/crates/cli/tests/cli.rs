use std::process::{Command, Output};

use serde_json::Value;

const PARAMS: &str = "0.3,-0.2,0.5,-0.4,0.6,0.5";

fn mk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mk")).args(args).output().expect("mk runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("not JSON ({e}): {}\nstderr: {}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

#[test]
fn compute_degree_zero_is_one() {
    let out = mk(&["compute", "--n", "1", "--lambda", "0", "--params", PARAMS]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["schema"], "mk-report/1");
    assert_eq!(r["pass"], true);
    assert_eq!(r["error"], Value::Null);
    let terms = r["result"]["polynomial"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["exp"], serde_json::json!([0]));
    assert_eq!(terms[0]["re"], 1.0);
}

#[test]
fn compute_is_monic_and_symmetric() {
    let out = mk(&["compute", "--n", "2", "--lambda", "2,1", "--params", PARAMS, "--grid", "48"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let exp = r["result"]["orbit_expansion"].as_array().unwrap();
    let last = exp.last().unwrap();
    assert_eq!(last["label"], serde_json::json!([2, 1]));
    assert_eq!(last["re"], 1.0);
    // every exponent appears with its full signed-permutation orbit
    let terms = r["result"]["polynomial"]["terms"].as_array().unwrap();
    let coeff = |e: [i64; 2]| {
        terms
            .iter()
            .find(|t| t["exp"] == serde_json::json!(e))
            .map(|t| t["re"].as_f64().unwrap())
            .unwrap_or(0.0)
    };
    for t in terms {
        let e: Vec<i64> = t["exp"].as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect();
        let c = t["re"].as_f64().unwrap();
        for img in [[e[1], e[0]], [-e[0], e[1]], [e[0], -e[1]]] {
            assert!((coeff(img) - c).abs() < 1e-10, "{e:?} vs {img:?}");
        }
    }
}

#[test]
fn gram_residuals_pass_and_csv_matches() {
    let out = mk(&["gram", "--n", "1", "--max-deg", "4", "--params", PARAMS]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let m = r["result"]["residual"].as_array().unwrap();
    assert_eq!(m.len(), 5);
    assert!(r["result"]["max_off_diagonal"].as_f64().unwrap() < 1e-10);
    assert_eq!(r["thresholds"]["off_diagonal"], 1e-10);

    let csv = mk(&["gram", "--n", "1", "--max-deg", "4", "--params", PARAMS, "--format", "csv"]);
    assert_eq!(csv.status.code(), Some(0));
    let text = String::from_utf8(csv.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0], "label,0,1,2,3,4");
    assert_eq!(lines[3].split(',').nth(3), Some("1.0"));
}

#[test]
fn gram_threshold_failure_exits_one() {
    let out = mk(&["gram", "--n", "1", "--max-deg", "3", "--params", PARAMS, "--threshold", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["pass"], false);
    assert_eq!(r["error"], Value::Null);
}

#[test]
fn aw_verify_passes_in_regime() {
    let out = mk(&["aw-verify", "--q", "0.5", "--sigma", "0.3", "--tau", "0.7", "--k1", "2", "--k2", "-1", "--max-mu", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    let rows = r["result"]["per_mu"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for row in rows {
        assert!(row["residual"].as_f64().unwrap() < 1e-9);
    }
}

#[test]
fn aw_verify_out_of_regime_reports_error_object() {
    let out = mk(&["aw-verify", "--q", "0.5", "--sigma", "0.7", "--tau", "0.7", "--k1", "0", "--k2", "0", "--max-mu", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["error"]["kind"], "OutOfRegime");
    assert!(r["error"]["message"].as_str().unwrap().contains("regime"));
}

#[test]
fn rosengren_modes() {
    let f = mk(&["rosengren", "--m", "2", "--sigma", "0.7"]);
    assert_eq!(f.status.code(), Some(0));
    assert!(report(&f)["result"]["residual"].as_f64().unwrap() < 1e-11);

    let exact = mk(&["rosengren", "--m", "3", "--sigma", "2", "--q", "1/2", "--precision", "exact"]);
    assert_eq!(exact.status.code(), Some(0));
    let r = report(&exact);
    assert_eq!(r["result"]["residual"], 0.0);
    assert_eq!(r["thresholds"]["residual"], 0.0);

    let hp = mk(&["rosengren", "--m", "4", "--sigma", "0.7", "--precision", "hp"]);
    assert_eq!(hp.status.code(), Some(0));
    assert!(report(&hp)["result"]["residual"].as_f64().unwrap() < 1e-40);

    // irrational σ has no exact representation
    let bad = mk(&["rosengren", "--m", "1", "--sigma", "0.7", "--q", "1/2", "--precision", "exact"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(report(&bad)["error"]["kind"], "NotRepresentable");
}

#[test]
fn spectrum_table() {
    let out = mk(&["spectrum", "--m", "5", "--sigma", "0.3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let table = r["result"]["table"].as_array().unwrap();
    assert_eq!(table.len(), 11);
    assert_eq!(table[0]["l"], -5);
    assert!(r["result"]["max_abs_diff"].as_f64().unwrap() < 1e-10);
    assert_eq!(r["result"]["simple"], true);
}

#[test]
fn groundstate_support() {
    let out = mk(&["groundstate", "--labels", "1,2,-1,0,0.3,0.7,0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let exps: Vec<i64> = r["result"]["ground_state"]["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["exp"][0].as_i64().unwrap())
        .collect();
    assert_eq!(exps.iter().min(), Some(&-2));
    assert_eq!(exps.iter().max(), Some(&2));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["compute", "--n", "2", "--lambda", "1,2", "--params", PARAMS][..],
        &["compute", "--n", "1", "--lambda", "1", "--params", "0.3,-0.2,0.5,-0.4,0.6,1.5"],
        &["compute", "--n", "1", "--lambda", "1", "--params", "0.3,0.2"],
        &["compute", "--n", "1", "--lambda", "1", "--params", PARAMS, "--grid", "2"],
        &["spectrum", "--m", "2", "--sigma", "0.3", "--format", "csv"],
        &["spectrum", "--m", "2", "--sigma", "0.3", "--precision", "exact"],
        &["gram", "--n", "1", "--max-deg", "2", "--params", PARAMS, "--precision", "exact"],
        &["aw-verify", "--q", "0.5", "--sigma", "0.3", "--tau", "0.7", "--k1", "0", "--k2", "1", "--max-mu", "1"],
        &["nonsense"],
        &[],
    ] {
        let out = mk(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn reports_are_byte_identical_and_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gram.json");
    let args = ["gram", "--n", "2", "--max-deg", "3", "--params", PARAMS, "--output", path.to_str().unwrap()];
    assert_eq!(mk(&args).status.code(), Some(0));
    let first = std::fs::read(&path).unwrap();
    assert_eq!(mk(&args).status.code(), Some(0));
    assert_eq!(first, std::fs::read(&path).unwrap());
    let r: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(r["defaults"]["singular_gram_threshold"], 1e12);
}
