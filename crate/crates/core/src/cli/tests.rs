use super::*;
use crate::quantum::{identity_superchannel, phi_plus_state};
use crate::tensor::LabeledMatrix;

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pptkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn cli(args: &[&str]) -> Output {
    run(std::iter::once("pptkit").chain(args.iter().copied()))
}

fn report(o: &Output) -> Value {
    serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", o.stdout))
}

#[test]
fn identity_qubit_channel_loads() {
    let doc = parse_choi(&std::fs::read(data("identity_qubit.json")).unwrap()).unwrap();
    assert_eq!(doc.role, Role::Channel);
    assert_eq!(doc.defect().unwrap(), None);
    assert_eq!(doc.to_channel().unwrap().dims(), ChannelDims::new(2, 1, 2, 1));
}

#[test]
fn size_mismatch_is_reported_at_matrix() {
    let text = r#"{"schema_version":1,"role":"state","dims":{"A1":2,"B1":2},"matrix":{"re":[[1,0],[0,0]],"im":[[0,0],[0,0]]}}"#;
    let e = parse_choi(text.as_bytes()).unwrap_err();
    assert_eq!(e.path, "matrix");
    let ragged = r#"{"schema_version":1,"role":"state","dims":{"A1":2},"matrix":{"re":[[1,0],[0]],"im":[[0,0],[0,0]]}}"#;
    assert_eq!(parse_choi(ragged.as_bytes()).unwrap_err().path, "matrix");
}

#[test]
fn schema_errors_carry_paths() {
    let cases = [
        (r#"[1]"#, ""),
        (r#"{"schema_version":2,"role":"state","dims":{"A":1},"matrix":{"re":[[1]],"im":[[0]]}}"#, "schema_version"),
        (r#"{"schema_version":1,"role":"map","dims":{"A":1},"matrix":{"re":[[1]],"im":[[0]]}}"#, "role"),
        (r#"{"schema_version":1,"role":"state","dims":{"A":0},"matrix":{"re":[[1]],"im":[[0]]}}"#, "dims.A"),
        (r#"{"schema_version":1,"role":"state","dims":{"A":1},"matrix":{"re":[["x"]],"im":[[0]]}}"#, "matrix.re[0][0]"),
        (r#"{"schema_version":1,"role":"state","dims":{"A":1},"matrix":{"re":[[1]]}}"#, "matrix.im"),
        (r#"{"schema_version":1,"role":"state","dims":{"A":1},"matrix":{"re":[[1]],"im":[[0]]},"x":1}"#, "x"),
    ];
    for (text, path) in cases {
        assert_eq!(parse_choi(text.as_bytes()).unwrap_err().path, path, "{text}");
    }
}

#[test]
fn non_hermitian_matrix_is_rejected() {
    let text = r#"{"schema_version":1,"role":"state","dims":{"A":2},"matrix":{"re":[[0.5,0.1],[0.0,0.5]],"im":[[0,0],[0,0]]}}"#;
    let e = parse_choi(text.as_bytes()).unwrap_err();
    assert_eq!(e.path, "matrix");
    assert!(e.reason.contains("Hermitian"));
    // below the tolerance is accepted
    let text = r#"{"schema_version":1,"role":"state","dims":{"A":2},"matrix":{"re":[[0.5,1e-12],[0.0,0.5]],"im":[[0,0],[0,0]]}}"#;
    assert!(parse_choi(text.as_bytes()).is_ok());
}

#[test]
fn round_trip_is_bit_identical() {
    let n = random_channel(ChannelDims::new(2, 1, 2, 2), 8).unwrap();
    let doc = ChoiDocument::channel(&n);
    let back = parse_choi(doc.to_json().as_bytes()).unwrap();
    let bits = |d: &ChoiDocument| d.matrix.matrix().data().iter().flat_map(|z| [z.re.to_bits(), z.im.to_bits()]).collect::<Vec<_>>();
    assert_eq!(bits(&back), bits(&doc));
    assert_eq!(back.matrix.spec(), doc.matrix.spec());
    assert_eq!(back.to_json(), doc.to_json());
}

#[test]
fn factor_order_follows_dims_keys() {
    let text = r#"{"schema_version":1,"role":"state","dims":{"B1":2,"A1":1},"matrix":{"re":[[1,0],[0,0]],"im":[[0,0],[0,0]]}}"#;
    let doc = parse_choi(text.as_bytes()).unwrap();
    assert_eq!(doc.matrix.spec().labels(), vec!["B1", "A1"]);
    assert!(doc.to_json().find("\"B1\"").unwrap() < doc.to_json().find("\"A1\"").unwrap());
}

#[test]
fn broken_superchannel_loads_then_fails_check() {
    let t = identity_superchannel(ChannelDims::new(1, 1, 2, 1)).unwrap();
    let broken = t.choi().scale(2.0);
    let path = scratch("broken_superchannel.json");
    std::fs::write(&path, ChoiDocument::new(Role::Superchannel, broken).to_json()).unwrap();
    let p = path.to_str().unwrap();
    assert!(parse_choi(&std::fs::read(&path).unwrap()).is_ok());
    let o = cli(&["check", "valid", p]);
    assert_eq!(o.code, EXIT_VALIDATION);
    let r = report(&o);
    assert_eq!(r["results"]["valid"], json!(false));
    assert!(r["results"]["defect"].as_str().unwrap().contains("marginal"));
    let o = cli(&["check", "ppt-superchannel", p]);
    assert_eq!(o.code, EXIT_VALIDATION);
}

#[test]
fn lnmax_of_phi_plus() {
    let o = cli(&["measure", "lnmax", &data("phi_plus_2.json")]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let r = report(&o);
    assert!((r["results"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-5);
    assert_eq!(r["status"], json!("ok"));
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(r["timings"], Value::Null);
}

#[test]
fn depolarizing_is_ppt() {
    let o = cli(&["check", "ppt-channel", &data("depolarizing.json")]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(report(&o)["results"]["ppt"], json!(true));
    let o = cli(&["--output", "text", "check", "ppt-channel", &data("phi_plus_2.json")]);
    assert_eq!(o.code, EXIT_VALIDATION);
    assert!(o.stdout.contains("  ppt: false\n"), "{}", o.stdout);
}

#[test]
fn no_go_demo_reports_no_violation() {
    let o = cli(&["demo", "no-go", "--slots", "2", "--seed", "7", "--trials", "20"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stdout);
    let r = report(&o);
    assert_eq!(r["results"]["verdict"], json!("no violation"));
    assert_eq!(r["seed"], json!(7));
}

#[test]
fn usage_errors_exit_64() {
    let o = cli(&["frobnicate"]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.stderr.contains("Usage"), "{}", o.stderr);
    assert_eq!(cli(&["random", "channel"]).code, EXIT_USAGE);
    assert_eq!(cli(&[]).code, EXIT_USAGE);
    assert_eq!(cli(&["--help"]).code, EXIT_OK);
}

#[test]
fn reports_are_byte_identical() {
    for args in [vec!["random", "channel", "--seed", "3", "--ppt"], vec!["measure", "negativity", &data("phi_plus_2.json")]] {
        let a = cli(&args);
        let b = cli(&args);
        assert_eq!(a, b);
        assert_eq!(a.code, EXIT_OK);
    }
    let t = cli(&["--timings", "random", "channel", "--seed", "3"]);
    assert!(report(&t)["timings"]["total_seconds"].is_number());
}

#[test]
fn numbers_use_twelve_digits() {
    let o = cli(&["measure", "ln", &data("phi_plus_2.json")]);
    let r = report(&o);
    let v = r["results"]["value"].as_f64().unwrap();
    assert_eq!(v, round_sig(v));
}

#[test]
fn random_documents_round_trip_through_checks() {
    let path = scratch("random_ppt_superchannel.json");
    let p = path.to_str().unwrap();
    let o = cli(&["random", "ppt-superchannel", "--seed", "5", "--save", p]);
    assert_eq!(o.code, EXIT_OK);
    let r = report(&o);
    assert_eq!(r["results"]["ppt"], json!(true));
    assert_eq!(r["results"]["document_sha256"], json!(sha256_hex(&std::fs::read(&path).unwrap())));
    assert_eq!(r["document"]["role"], json!("superchannel"));
    assert_eq!(cli(&["check", "ppt-superchannel", p]).code, EXIT_OK);
    assert_eq!(cli(&["check", "valid", p]).code, EXIT_OK);
}

#[test]
fn solver_and_bound_failures_map_to_exit_codes() {
    let f: Failure = MeasureError::NotOptimal { what: "x".into(), status: crate::solver::Status::MaxIter, message: "m".into(), dump: String::new() }.into();
    assert_eq!(f.code(), EXIT_NOT_OPTIMAL);
    let f: Failure = MeasureError::BoundViolation("b".into()).into();
    assert_eq!(f.code(), EXIT_BOUND);
    let f: Failure = ScenarioError::Precondition("p".into()).into();
    assert_eq!(f.code(), EXIT_VALIDATION);
}

#[test]
fn exact_cost_and_distance_commands() {
    let phi = data("phi_plus_2.json");
    let cert = scratch("certificate.json");
    let o = cli(&["exact-cost", &phi, "--save", cert.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stdout);
    let r = report(&o);
    assert_eq!(r["results"]["m"], json!(2));
    assert_eq!(r["results"]["bounds"]["holds"], json!(true));
    assert!(parse_choi(&std::fs::read(&cert).unwrap()).unwrap().to_channel().is_ok());
    let o = cli(&["convert-distance", &data("depolarizing.json"), &data("depolarizing.json")]);
    assert_eq!(o.code, EXIT_OK);
    assert!(report(&o)["results"]["value"].as_f64().unwrap().abs() < 1e-6);
}

#[test]
fn witness_commands() {
    let (slot, out) = (ChannelDims::new(1, 1, 2, 2), ChannelDims::new(1, 1, 2, 1));
    let spec = crate::quantum::superchannel_spec(slot, out);
    let zero = LabeledMatrix::zeros(&spec);
    let rest = LabeledMatrix::identity(&spec.without(&["A1", "B1"]).unwrap());
    let x = phi_plus_state(2).scale(2.0).kron(&rest).unwrap().permute(&crate::quantum::SUPERCHANNEL_ORDER).unwrap();
    let mut paths = Vec::new();
    for (name, m) in [
        ("p", zero.clone()),
        ("x", x),
        ("y", crate::witness_scenarios::zero_y(slot, out)),
        ("z", crate::witness_scenarios::zero_z(slot, out)),
    ] {
        let path = scratch(&format!("w_{name}.json"));
        std::fs::write(&path, ChoiDocument::new(Role::Superchannel, m).to_json()).unwrap();
        paths.push(path.to_str().unwrap().to_string());
    }
    let w = scratch("w.json");
    let ws = w.to_str().unwrap();
    let o = cli(&["witness", "assemble", "--p", &paths[0], "--x", &paths[1], "--y", &paths[2], "--z", &paths[3], "--save", ws]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stdout);
    assert_eq!(report(&o)["results"]["proper"], json!(true));
    let o = cli(&["witness", "validate", ws]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stdout);
    assert_eq!(report(&o)["results"]["is_witness"], json!(true));
    // the identity is nonnegative on the cone but not proper
    let id = scratch("w_identity.json");
    std::fs::write(&id, ChoiDocument::new(Role::Superchannel, LabeledMatrix::identity(&spec)).to_json()).unwrap();
    assert_eq!(cli(&["witness", "validate", id.to_str().unwrap()]).code, EXIT_VALIDATION);
}

#[test]
fn bound_povm_demo_uses_tiles() {
    let o = cli(&["demo", "bound-povm"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stdout);
    let r = report(&o);
    assert_eq!(r["results"]["is_ppt_channel"], json!(true));
    assert!(r["results"]["ln_max"].as_f64().unwrap().abs() < 1e-5);
}
