use std::path::{Path, PathBuf};
use std::process::Command as Process;

use hfcert::integrals::SyntheticParams;
use hfcert::matnorm::WeightSet;
use hfcert::scalar::CMat;
use hfcert_cli::schema::{cmat_to_doc, parse_integrals, GramDoc, IntegralSetDoc, WeightsDoc, GRAM, WEIGHTS};
use hfcert_cli::{run, Command, RunConfig, Status};
use nalgebra::Complex;
use serde_json::Value;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_hfcert")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn generated(dir: &Path, seed: u64, nu: usize, n: usize) -> PathBuf {
    let mut cfg = RunConfig::new(Command::Generate);
    cfg.seed = seed;
    cfg.synthetic.nu = nu;
    cfg.synthetic.n_elec = n;
    write(dir, &format!("set{seed}.json"), &run(&cfg).unwrap().document)
}

fn on_file(command: Command, path: &Path) -> RunConfig {
    let mut cfg = RunConfig::new(command);
    cfg.input = Some(path.to_path_buf());
    cfg
}

fn json(doc: &str) -> Value {
    serde_json::from_str(doc).unwrap()
}

/// Three-orbital model without interactions; the canonical point is exact.
fn diagonal_doc() -> IntegralSetDoc {
    let mut h = CMat::<f64>::zeros(3, 3);
    for (i, e) in [-1.0, 0.5, 2.0].iter().enumerate() {
        h[(i, i)] = Complex::new(*e, 0.0);
    }
    IntegralSetDoc {
        schema: "integralset.v1".into(),
        nu: 3,
        n_elec: 1,
        charges: vec![],
        positions: vec![],
        core_hamiltonian: cmat_to_doc(&h),
        kinetic: cmat_to_doc(&h),
        attraction: vec![],
        eri: vec![[0.0, 0.0]; 81],
        weights: None,
        points: None,
    }
}

#[test]
fn generated_documents_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = generated(dir.path(), 5, 4, 2);
    let text = std::fs::read_to_string(&path).unwrap();
    let doc = parse_integrals(&text).unwrap();
    let (set, w) = doc.clone().into_parts().unwrap();
    let again = IntegralSetDoc::from_set(&set, w.as_ref());
    assert_eq!(doc, again);
    let (expected, _) = hfcert::integrals::generate_synthetic::<f64>(5, 4, 2, &SyntheticParams::default()).unwrap();
    assert_eq!(set, expected);
}

#[test]
fn validate_reports_broken_symmetry_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = diagonal_doc();
    doc.core_hamiltonian[0][1] = [0.3, 0.0];
    let p = write(dir.path(), "bad.json", &serde_json::to_string(&doc).unwrap());
    let out = run(&on_file(Command::Validate, &p)).unwrap();
    assert_eq!(out.status, Status::InvalidInput);
    let v = json(&out.document);
    assert_eq!(v["valid"], false);
    assert_eq!(v["integral_issues"][0]["kind"], "core_hamiltonian_not_hermitian");
    assert_eq!(
        run(&on_file(Command::Solve, &p)).unwrap_err().status(),
        Status::InvalidInput
    );
}

#[test]
fn malformed_and_unknown_documents_are_invalid_input() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("garbage.json", "{ not json".to_string()),
        ("schema.json", r#"{"schema": "integralset.v9"}"#.to_string()),
        ("noschema.json", r#"{"nu": 3}"#.to_string()),
        ("short.json", {
            let mut d = diagonal_doc();
            d.eri.pop();
            serde_json::to_string(&d).unwrap()
        }),
        ("extra.json", {
            let mut v = serde_json::to_value(diagonal_doc()).unwrap();
            v["unexpected"] = Value::from(1);
            v.to_string()
        }),
    ];
    for (name, text) in cases {
        let p = write(dir.path(), name, &text);
        let err = run(&on_file(Command::Validate, &p)).unwrap_err();
        assert_eq!(err.status(), Status::InvalidInput, "{name}");
    }
    let missing = run(&on_file(Command::Validate, &dir.path().join("absent.json"))).unwrap_err();
    assert_eq!(missing.status(), Status::InvalidInput);
}

#[test]
fn bad_flags_are_invalid_input() {
    let mut cfg = RunConfig::new(Command::Solve);
    cfg.tol = 0.0;
    assert_eq!(run(&cfg).unwrap_err().status(), Status::InvalidInput);
    let mut cfg = RunConfig::new(Command::Solve);
    cfg.max_iter = 0;
    assert_eq!(run(&cfg).unwrap_err().status(), Status::InvalidInput);
}

#[test]
fn solve_on_exact_instance_needs_no_steps() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "diag.json",
        &serde_json::to_string(&diagonal_doc()).unwrap(),
    );
    let out = run(&on_file(Command::Solve, &p)).unwrap();
    assert_eq!(out.status, Status::Ok);
    let v = json(&out.document);
    assert_eq!(v["schema"], "trace.v1");
    assert_eq!(v["iterations"].as_array().unwrap().len(), 1);
    assert_eq!(v["solution"]["commutator_residual"], 0.0);
    assert_eq!(v["solution"]["energy"]["total"], -1.0);
}

#[test]
fn iteration_budget_exhaustion_is_solver_failure() {
    let mut cfg = RunConfig::new(Command::Solve);
    cfg.seed = 1;
    cfg.max_iter = 1;
    let out = run(&cfg).unwrap();
    assert_eq!(out.status, Status::SolverFailure);
    assert_eq!(json(&out.document)["converged"], false);
}

#[test]
fn failed_gates_exit_2_with_margins() {
    let mut cfg = RunConfig::new(Command::Certify);
    cfg.synthetic.params.gap = 0.05;
    let out = run(&cfg).unwrap();
    assert_eq!(out.status, Status::GatesFailed);
    let v = json(&out.document);
    let failed = v["failed_gates"].as_array().unwrap();
    assert!(failed
        .iter()
        .any(|g| g["name"] == "positivity" && g["margin"].as_f64().unwrap() < 0.0));

    cfg.command = Command::Report;
    assert_eq!(run(&cfg).unwrap().status, Status::GatesFailed);
}

#[test]
fn certify_and_conditions_pass_on_default_instance() {
    for command in [Command::Certify, Command::Conditions] {
        let mut cfg = RunConfig::new(command);
        cfg.seed = 2;
        let out = run(&cfg).unwrap();
        assert_eq!(out.status, Status::Ok, "{command:?}");
    }
}

#[test]
fn missing_weights_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "diag.json",
        &serde_json::to_string(&diagonal_doc()).unwrap(),
    );
    assert_eq!(
        run(&on_file(Command::Certify, &p)).unwrap_err().status(),
        Status::InvalidInput
    );

    let w = WeightsDoc {
        schema: WEIGHTS.into(),
        nu: 3,
        matrix: vec![vec![3.0; 3]; 3],
        points: None,
    };
    let wp = write(dir.path(), "w.json", &serde_json::to_string(&w).unwrap());
    let mut cfg = on_file(Command::Validate, &p);
    cfg.weights = Some(wp);
    let v = json(&run(&cfg).unwrap().document);
    assert_eq!(v["weights"]["source"], "file");
    assert_eq!(v["weights"]["valid"], true);
    assert!(WeightSet::new(nalgebra::DMatrix::from_element(3, 3, 3.0))
        .unwrap()
        .validate()
        .is_valid());
}

#[test]
fn orthogonalize_output_feeds_back_into_conditions() {
    let dir = tempfile::tempdir().unwrap();
    let set = generated(dir.path(), 9, 4, 2);
    let mut gram = CMat::<f64>::identity(4, 4);
    for j in 0..3 {
        gram[(j, j + 1)] = Complex::new(0.02, 0.01);
        gram[(j + 1, j)] = Complex::new(0.02, -0.01);
    }
    let g = GramDoc {
        schema: GRAM.into(),
        nu: 4,
        gram: cmat_to_doc(&gram),
    };
    let gp = write(dir.path(), "gram.json", &serde_json::to_string(&g).unwrap());

    let mut cfg = on_file(Command::Orthogonalize, &set);
    cfg.gram = Some(gp.clone());
    let out = run(&cfg).unwrap();
    assert_eq!(out.status, Status::Ok);
    let v = json(&out.document);
    assert!(v["result"]["s_weighted_norm"].as_f64().unwrap() <= v["result"]["eps2"].as_f64().unwrap());
    let op = write(dir.path(), "ortho.json", &out.document);

    let back = run(&on_file(Command::Validate, &op)).unwrap();
    assert_eq!(back.status, Status::Ok);
    let cond = run(&on_file(Command::Conditions, &op)).unwrap();
    assert_eq!(json(&cond.document)["schema"], "conditions.v1");

    let mut report = on_file(Command::Report, &set);
    report.gram = Some(gp);
    let r = json(&run(&report).unwrap().document);
    assert!(r["orthogonalization"]["eps0"].as_f64().unwrap() > 0.0);

    let mut no_gram = on_file(Command::Orthogonalize, &set);
    no_gram.gram = None;
    assert_eq!(run(&no_gram).unwrap_err().status(), Status::InvalidInput);
}

#[test]
fn binary_exit_codes_and_byte_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let st = Process::new(bin())
            .args(["report", "--seed", "1", "-o"])
            .arg(out)
            .status()
            .unwrap();
        assert_eq!(st.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let st = Process::new(bin()).args(["certify", "--gap", "0.05"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    let st = Process::new(bin())
        .args(["validate"])
        .arg(dir.path().join("missing.json"))
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(3));
    assert!(!st.stderr.is_empty());
    let st = Process::new(bin())
        .args(["solve", "--seed", "1", "--max-iter", "1"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(4));
}
