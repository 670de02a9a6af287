use std::collections::BTreeSet;

use automorph::signals::{ScalarSignal, UnaryMap};
use num_complex::Complex64;
use serde_json::Value;

fn schema() -> Value {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/signal.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn walk<'a>(v: &'a Value, out: &mut Vec<&'a Value>) {
    out.push(v);
    match v {
        Value::Object(m) => m.values().for_each(|x| walk(x, out)),
        Value::Array(a) => a.iter().for_each(|x| walk(x, out)),
        _ => {}
    }
}

/// Every object node of `v` that carries the key `key`.
fn tags(v: &Value, key: &str) -> BTreeSet<String> {
    let mut nodes = Vec::new();
    walk(v, &mut nodes);
    nodes
        .iter()
        .filter_map(|n| n.get(key)?.as_str().map(str::to_string))
        .collect()
}

#[test]
fn schema_lists_every_serialized_variant() {
    let s = schema();
    let signal_ops: BTreeSet<String> = s["$defs"]["signal"]["oneOf"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["properties"]["op"]["const"].as_str().unwrap().to_string())
        .collect();

    let sample = ScalarSignal::sum(vec![
        ScalarSignal::constant(1.0),
        ScalarSignal::sin(1.0, 2.0, 0.5),
        ScalarSignal::product(vec![ScalarSignal::cis(1.0), ScalarSignal::cos(0.5, 1.0, 0.0)]),
        ScalarSignal::compose(UnaryMap::RecipShift { a: 3.0 }, ScalarSignal::sin(1.0, 1.0, 0.0)),
        ScalarSignal::compose(UnaryMap::Exp, ScalarSignal::zero()).scaled(Complex64::new(0.0, 2.0)),
    ]);
    let json = serde_json::to_value(&sample).unwrap();
    assert_eq!(tags(&json, "op"), signal_ops);
    for map in tags(&json, "map") {
        assert!(s["$defs"]["unary_map"].to_string().contains(&format!("\"{map}\"")), "{map}");
    }
}

#[test]
fn complex_values_match_the_schema_shapes() {
    let real = serde_json::to_value(ScalarSignal::constant(2.0)).unwrap();
    assert!(real["value"].is_number());
    let cplx = serde_json::to_value(ScalarSignal::complex(Complex64::new(1.0, -1.0))).unwrap();
    assert_eq!(cplx["value"], serde_json::json!({"re": 1.0, "im": -1.0}));
}
