use nda::record::{RunRecord, CSV_HEADER};

fn nda(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = nda::run(std::iter::once("nda").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn record(args: &[&str]) -> (i32, RunRecord, serde_json::Value) {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let (code, out, err) = nda(&a);
    assert!(err.is_empty(), "{err}");
    (code, serde_json::from_str(&out).unwrap(), serde_json::from_str(&out).unwrap())
}

fn schema() -> jsonschema::Validator {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/run-record.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

#[test]
fn compute_single_p_electron() {
    let (code, rec, json) =
        record(&["compute", "--state", "2P_2p", "--Z", "1", "--components", "pot,kin", "--method", "surface", "--samples", "1e6", "--seed", "42"]);
    assert_eq!(code, 0);
    assert_eq!(rec.results.len(), 2);
    for (r, exact) in rec.results.iter().zip([-1.0 / 6.0, 1.0 / 24.0]) {
        assert_eq!(r.exact.as_ref().unwrap().value, exact);
        assert!(r.sigma_deviation.unwrap().abs() < 3.0, "{r:?}");
    }
    assert_eq!(rec.sampler.seed, 42);
    assert_eq!(rec.sampler.n_chains * rec.sampler.steps_per_chain, 1_000_000);
    let v = schema();
    assert!(v.is_valid(&json), "{:?}", v.iter_errors(&json).map(|e| e.to_string()).collect::<Vec<_>>());
}

#[test]
fn json_record_round_trips() {
    let (_, rec, json) = record(&["compute", "--state", "3P_1s2p", "--components", "kin,pot,sum", "--samples", "4e4"]);
    let back: RunRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
    assert_eq!(back, rec);
    assert_eq!(serde_json::to_value(&rec).unwrap(), json);
    assert!(schema().is_valid(&json));
}

#[test]
fn mixed_harmonic_sum_is_below_the_eigenvalue() {
    let (code, rec, json) = record(&["compute", "--state", "harmonic_mixed", "--omega", "0.25", "--g0", "1"]);
    assert_eq!(code, 0);
    let sum = rec.results.iter().find(|r| r.component.name() == "sum").unwrap();
    assert!(sum.exact.is_none());
    assert!((sum.estimate.mean - 1.221_557).abs() < 3.0 * sum.estimate.stderr);
    assert!(sum.estimate.mean < 1.25);
    assert_eq!(rec.reference_eigenvalue.unwrap().value, 1.25);
    assert!(schema().is_valid(&json));
    let (_, table, _) = nda(&["compute", "--state", "harmonic_mixed", "--samples", "2e5"]);
    assert!(table.contains("below it"), "{table}");
}

#[test]
fn quadrature_method_is_exact_and_deterministic() {
    let (code, rec, json) = record(&["compute", "--state", "2P_2p", "--Z", "1", "--method", "quadrature"]);
    assert_eq!(code, 0);
    for r in &rec.results {
        assert_eq!(r.estimate.stderr, 0.0);
        assert!((r.estimate.mean - r.exact.as_ref().unwrap().value).abs() <= 1e-8);
    }
    assert!(schema().is_valid(&json));
    let a = nda(&["compute", "--state", "2P_2p", "--method", "quadrature", "--format", "csv"]);
    let b = nda(&["compute", "--state", "2P_2p", "--method", "quadrature", "--format", "csv"]);
    assert_eq!(a, b);
}

#[test]
fn csv_layout() {
    let (code, out, _) = nda(&["compute", "--state", "3S_1s2s", "--components", "kin,pot", "--samples", "8e4", "--format", "csv"]);
    assert_eq!(code, 0);
    let mut rd = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER);
    let rows: Vec<csv::StringRecord> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][0], "3S_1s2s");
    assert_eq!(&rows[0][1], "kin");
    assert_eq!(&rows[0][2], "surface_param");
    assert_eq!(rows[1][5].parse::<f64>().unwrap(), -1185.0 / 1768.0);
}

#[test]
fn identical_flags_print_identical_numbers() {
    let args = ["compute", "--state", "1D_2p2", "--components", "kin,pot,kin_std", "--samples", "8e4", "--seed", "9"];
    assert_eq!(nda(&args), nda(&args));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    let p = path.to_str().unwrap();
    let (code, out, _) = nda(&["compute", "--state", "2P_2p", "--method", "quadrature", "--format", "json", "--out", p]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), out);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(nda(&["compute", "--state", "9Z_nope"]).0, 2);
    assert_eq!(nda(&["compute", "--state", "2P_2p", "--samples", "many"]).0, 2);
    assert_eq!(nda(&["compute", "--state", "2P_2p", "--components", "energy"]).0, 2);
    assert_eq!(nda(&["compute", "--state", "3P_1s2p", "--method", "surface"]).0, 2);
    assert_eq!(nda(&["compute", "--state", "3P_1s2p", "--method", "quadrature"]).0, 2);
    assert_eq!(nda(&["frobnicate"]).0, 2);
    assert_eq!(nda(&[]).0, 2);
    let (code, out, _) = nda(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("verify-tables"));
}

#[test]
fn unconverged_shell_exits_3() {
    let (code, rec, _) = record(&["compute", "--state", "3P_1s2p", "--components", "kin", "--method", "shell", "--samples", "4000"]);
    assert_eq!(code, 3);
    assert!(rec.results[0].unconverged());
    let (_, table, _) = nda(&["compute", "--state", "3P_1s2p", "--components", "kin", "--method", "shell", "--samples", "4000"]);
    assert!(table.contains("UNCONVERGED"));
}

#[test]
fn verify_tables_single_state() {
    let (code, out, _) = nda(&["verify-tables", "--only", "3S_1s2s", "--samples", "4e5", "--seed", "3"]);
    assert_eq!(code, 0, "{out}");
    let cells: Vec<&str> = out.lines().filter(|l| l.contains("3S_1s2s")).collect();
    assert_eq!(cells.len(), 4, "{out}");
    assert!(out.contains("4 cells"));
}

#[test]
fn verify_tables_quadrature() {
    let (code, out, _) = nda(&["verify-tables", "--method", "quadrature", "--only", "2P_2p"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 2);
    assert_eq!(nda(&["verify-tables", "--method", "quadrature", "--only", "2P_2p"]).1, out);
    let (code, out, _) = nda(&["verify-tables", "--method", "quadrature", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.lines().count() > 10);
}

#[test]
fn domains_of_the_triplet_pair() {
    let (code, out, _) = nda(&["domains", "--state", "3P_2p2"]);
    assert_eq!(code, 0);
    assert!(out.contains("domains 2"), "{out}");
}

#[test]
fn equivalence_commands() {
    let (code, out, _) = nda(&["equiv", "--a", "1D_2p2", "--b", "3P_2p2", "--flip", "x:2", "--points", "2e4"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("equivalent"), "{out}");
    let (_, out, _) = nda(&["equiv", "--a", "3S_1s2s", "--b", "3P_1s2p", "--transform", "identity", "--points", "2e4"]);
    assert!(out.starts_with("inequivalent"), "{out}");
    let (code, out, _) = nda(&["equiv", "--a", "3P_2p2", "--b", "1D_2p2", "--search", "--points", "2000", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["found"], true);
    assert_eq!(nda(&["equiv", "--a", "2P_2p", "--b", "3P_2p2"]).0, 2);
    assert_eq!(nda(&["equiv", "--a", "3P_2p2", "--b", "1D_2p2", "--flip", "x:3"]).0, 2);
}

#[test]
fn catalog_export_uses_rational_strings() {
    let (code, out, _) = nda(&["catalog", "export"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let states = v.as_array().unwrap();
    assert_eq!(states.len(), 11);
    let s3 = states.iter().find(|s| s["name"] == "3S_1s2s").unwrap();
    assert_eq!(s3["exact_nda"]["pot"]["rational"], "-1185/1768");
    assert_eq!(s3["exact_nda"]["kin"]["rational"], "10/221");
    let (code, out, _) = nda(&["catalog", "export", "--omega", "0.5"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v.as_array().unwrap().iter().all(|s| s["name"] != "harmonic_exact"));
}
