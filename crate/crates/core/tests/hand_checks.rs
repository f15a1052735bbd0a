//! Hand-derived operator values at fixed points, checked through both the
//! transcribed closed forms and the generic curvilinear routes.

use std::sync::Arc;

use moisil::geometry::{builtin_chart, FieldSpec, QuatField};
use moisil::harness::{GoldenInputs, GoldenOp, GoldenTable};
use moisil::operators::{OperatorConfig, Operators};
use moisil::quat::Quaternion;
use serde::Deserialize;

#[derive(Deserialize)]
struct Case {
    chart: String,
    operator: String,
    field: std::collections::BTreeMap<String, String>,
    note: String,
    points: Vec<[f64; 3]>,
    expected: Vec<[f64; 4]>,
}

#[derive(Deserialize)]
struct Fixture {
    cases: Vec<Case>,
}

const TOL: f64 = 1e-12;

fn load() -> Fixture {
    serde_json::from_str(include_str!("../fixtures/golden_hand_checks.json")).unwrap()
}

fn field_for(case: &Case) -> QuatField {
    let chart = Arc::new(builtin_chart(&case.chart).unwrap());
    let comp = |k: usize| case.field.get(&format!("f{k}")).map(String::as_str);
    let spec = FieldSpec {
        re: [comp(0), comp(1), comp(2), comp(3)],
        im: [None; 4],
    };
    QuatField::parse(chart, &spec, &[]).unwrap()
}

fn assert_close(got: &Quaternion, want: &[f64; 4], what: &str) {
    for (k, c) in got.components().iter().enumerate() {
        let err = (c.re - want[k]).abs().max(c.im.abs());
        assert!(
            err <= TOL * (1.0 + want[k].abs()),
            "{what}: component {k} is {c}, expected {}",
            want[k]
        );
    }
}

#[test]
fn generic_routes_match_hand_values() {
    let fixture = load();
    assert!(fixture.cases.len() >= 10);
    for case in &fixture.cases {
        let field = field_for(case);
        let ops = Operators::new(field.chart().clone(), OperatorConfig::symbolic()).unwrap();
        let op = GoldenOp::from_name(&case.operator).unwrap().generic();
        let applied = ops.apply(&field, op).unwrap();
        for (p, want) in case.points.iter().zip(&case.expected) {
            let got = applied.at(p).unwrap();
            assert_close(
                &got,
                want,
                &format!("{} {} ({}) at {p:?}", case.chart, case.operator, case.note),
            );
        }
    }
}

#[test]
fn closed_forms_match_hand_values() {
    let table = GoldenTable::builtin();
    for case in &load().cases {
        let field = field_for(case);
        let op = GoldenOp::from_name(&case.operator).unwrap();
        let form = table.get(&case.chart, op).unwrap();
        let inputs = GoldenInputs::new(&field);
        for (p, want) in case.points.iter().zip(&case.expected) {
            let got = form.eval(&inputs, p).unwrap();
            assert_close(
                &got,
                want,
                &format!("form {} {} ({}) at {p:?}", case.chart, case.operator, case.note),
            );
        }
    }
}

/// Recomputes the projected `z^2 i1` expectations from the frame itself,
/// so the fixture numbers are not trusted blindly.
#[test]
fn projected_fixture_values_follow_from_the_frame() {
    let chart = builtin_chart("spherical").unwrap();
    for case in load().cases.iter().filter(|c| c.field.len() == 3) {
        for (p, want) in case.points.iter().zip(&case.expected) {
            let frame = chart.frame(p).unwrap();
            let z = chart.position(p).unwrap()[2];
            let (axis, scale) = match case.operator.as_str() {
                "mt" => (1, 2.0 * z),
                "lapv" => (0, 2.0),
                "bitsv" => (0, -2.0),
                other => panic!("unexpected operator {other}"),
            };
            assert_eq!(want[0], 0.0);
            for i in 0..3 {
                let expected = scale * frame.u[i][axis];
                assert!((want[i + 1] - expected).abs() < 1e-14, "{} u{}", case.operator, i + 1);
            }
        }
    }
}
