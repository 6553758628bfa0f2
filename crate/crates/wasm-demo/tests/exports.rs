use serde_json::Value;
use todd_lab_wasm::{classify_json, orbit_json, t2_slice_json};

fn parse(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn orbit_traces_the_invariant() {
    let v = parse(&orbit_json("1", "1", "1", "1,1,1", 16, true).unwrap());
    let values: Vec<f64> = v["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(values.len(), 19);
    assert_eq!(&values[..6], &[1.0, 1.0, 1.0, 3.0, 5.0, 9.0]);
    assert_eq!(values[8], values[0]);
    assert_eq!(v["invariant_exact"], "32");
    assert!(v["invariant"]
        .as_array()
        .unwrap()
        .iter()
        .all(|x| x.as_f64() == Some(32.0)));
    assert!(v["failure"].is_null());
}

#[test]
fn asymmetric_orbit_has_no_invariant() {
    let v = parse(&orbit_json("0.5", "0.25", "1", "1,2,3", 50, false).unwrap());
    assert!(v["invariant"].is_null());
}

#[test]
fn classify_reports_verdicts() {
    let v = parse(&classify_json("1", "1", "1", "3/2,7/10,23/10", 200, true).unwrap());
    assert_eq!(v["verdict"], "periodic");
    assert_eq!(v["period"], 8);
    let v = parse(&classify_json("1/2", "1/4", "1", "1,1,1", 10_000, false).unwrap());
    assert_eq!(v["verdict"], "growing");
}

#[test]
fn bad_inputs_are_errors() {
    assert!(orbit_json("1", "1", "1", "1,-1,1", 10, true).is_err());
    assert!(orbit_json("1", "x", "1", "1,1,1", 10, true).is_err());
    assert!(orbit_json("1", "1", "1", "1,1,1", 0, true).is_err());
    assert!(t2_slice_json(0.0, 2.0, 1.0, 0.5, 10).is_err());
    assert!(t2_slice_json(0.0, 2.0, 0.1, 10.0, 1000).is_err());
}

#[test]
fn t2_slice_bottoms_out_near_the_fixed_point() {
    let v = parse(&t2_slice_json(0.0, 2.0, 0.1, 10.0, 41).unwrap());
    assert_eq!(v["fixed_point"], 2.5);
    assert_eq!(v["log10_residual"].as_array().unwrap().len(), 41 * 41);
    let best = &v["best"];
    assert!((best["oldest"].as_f64().unwrap() / 2.5).ln().abs() < 0.15);
    assert!((best["middle"].as_f64().unwrap() / 2.5).ln().abs() < 0.15);
}
