use hyperalg_core::witness::*;
use hyperalg_core::*;

fn gaussian() -> SymbolSpec {
    SymbolSpec::exp_square(Cplx::new(1.0, 0.0))
}

fn witness() -> WitnessReport {
    construct_witness_t2_with(&gaussian(), &TargetSpec::Auto, &T2Options::default()).unwrap()
}

#[test]
fn report_json_round_trips() {
    let r = witness();
    let text = r.to_json().unwrap();
    let back: WitnessReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
    assert_eq!(back.to_json().unwrap(), text);
}

#[test]
fn report_json_uses_role_tags() {
    let v: serde_json::Value = serde_json::from_str(&witness().to_json().unwrap()).unwrap();
    assert_eq!(v["route"], "single_generator");
    assert_eq!(v["params"]["kind"], "single");
    let cases: Vec<&str> = v["theta_table"].as_array().unwrap().iter().map(|e| e["case"].as_str().unwrap()).collect();
    assert!(cases.contains(&"inside_disk"));
    assert!(cases.iter().all(|c| *c != "survivor"));
}

#[test]
fn side_files_have_one_row_per_entry() {
    let r = witness();
    let dir = tempfile::tempdir().unwrap();
    let theta = dir.path().join("theta.csv");
    let trace = dir.path().join("trace.csv");
    r.write_theta_csv(&theta).unwrap();
    r.write_trace_csv(&trace).unwrap();
    let rows = csv::Reader::from_path(&theta).unwrap().records().count();
    assert_eq!(rows, r.theta_table.len());
    let mut rd = csv::Reader::from_path(&trace).unwrap();
    assert_eq!(rd.headers().unwrap(), vec!["q", "max_residual"]);
    let qs: Vec<u64> = rd.records().map(|x| x.unwrap()[0].parse().unwrap()).collect();
    assert_eq!(qs.last(), Some(&r.q));
    assert!(qs.windows(2).all(|w| w[1] == 2 * w[0]));
}

#[test]
fn given_targets_round_trip_through_verification() {
    // approximating part at the disk center 2i, target inside the window [0.125, 0.25]
    let a = ExpPoly::from_terms(vec![
        Term::new(Cplx::new(0.5, -0.25), Cplx::new(0.0, 2.0)),
        Term::new(Cplx::new(0.1, 0.0), Cplx::new(0.1, 2.1)),
    ]);
    let b = ExpPoly::single(Cplx::new(-1.0, 0.0), Cplx::new(0.1875, 0.0));
    let grid = DiskGrid::default();
    let r = construct_witness_t2(&gaussian(), 2, &a, &b, 1e-6, &grid, 1 << 20).unwrap();
    assert!(r.max_residual() <= 1e-6);
    let v = verify_witness(&gaussian(), &r, &grid, 1e-6).unwrap();
    assert!(v.passed, "{:?}", v.failures);
    let mut bad = r.clone();
    bad.generators[0] = bad.generators[0].scale(Cplx::new(1.01, 0.0));
    assert!(!verify_witness(&gaussian(), &bad, &grid, 1e-6).unwrap().passed);
}

#[test]
fn multi_report_is_in_original_coordinates() {
    // same set with the coordinates swapped: the lead coordinate is now the second one
    let set = ExponentSet::new(vec![vec![0, 2], vec![1, 1], vec![1, 0]]).unwrap();
    let r = construct_witness_multi_with(&gaussian(), &set, &MultiTargets::Auto, &MultiOptions::default()).unwrap();
    let WitnessParams::Multi(p) = &r.params else { panic!() };
    assert_eq!(p.weights.permutation, vec![1, 0]);
    assert_eq!(p.weights.beta, vec![0, 2]);
    assert!(r.max_residual() <= 1e-5);
    let v = verify_witness(&gaussian(), &r, &p.grid, 1e-5).unwrap();
    assert!(v.passed, "{:?}", v.failures);
}

#[test]
fn unusable_symbols_are_refused() {
    let exp = SymbolSpec::exp(Cplx::new(1.0, 0.0));
    assert!(construct_witness_t2_with(&exp, &TargetSpec::Auto, &T2Options::default()).is_err());
    let set = ExponentSet::new(vec![vec![1, 0], vec![0, 1]]).unwrap();
    assert!(construct_witness_multi_with(&exp, &set, &MultiTargets::Auto, &MultiOptions::default()).is_err());
}
