//! Operator identities on randomly built fields and points.

use std::sync::Arc;

use moisil::geometry::{builtin_chart, Chart, FieldSpec, QuatField};
use moisil::operators::{LameParams, LameRoute, Op, OperatorConfig, Operators};
use moisil::quat::{qconj, Quaternion};
use proptest::prelude::*;

fn chart(name: &str) -> Arc<Chart> {
    Arc::new(builtin_chart(name).unwrap())
}

/// A component as text: a small polynomial in the coordinates plus a trig term.
fn component() -> impl Strategy<Value = String> {
    (
        prop::collection::vec((-2.0f64..2.0, 0u32..3, 0u32..3, 0u32..2), 1..4),
        -1.0f64..1.0,
        0usize..3,
    )
        .prop_map(|(terms, c, axis)| {
            let mut s = String::new();
            for (k, a, b, e) in terms {
                s.push_str(&format!("{k:.3}*q1^{a}*q2^{b}*q3^{e} + "));
            }
            s.push_str(&format!("{c:.3}*sin(q{})", axis + 1));
            s
        })
}

fn field_strategy() -> impl Strategy<Value = [String; 4]> {
    [component(), component(), component(), component()]
}

fn point_for(name: &str) -> impl Strategy<Value = [f64; 3]> {
    match name {
        "spherical" => (0.5f64..2.0, 0.3f64..2.8, 0.0f64..6.0)
            .prop_map(|(a, b, c)| [a, b, c])
            .boxed(),
        "cylindrical" => (0.5f64..2.0, 0.0f64..6.0, -1.5f64..1.5)
            .prop_map(|(a, b, c)| [a, b, c])
            .boxed(),
        _ => (-1.5f64..1.5, -1.5f64..1.5, -1.5f64..1.5)
            .prop_map(|(a, b, c)| [a, b, c])
            .boxed(),
    }
}

fn scaled(a: &Quaternion, b: &Quaternion, f: &Quaternion) -> f64 {
    let diff = a
        .components()
        .iter()
        .zip(b.components())
        .map(|(x, y)| (*x - y).abs())
        .fold(0.0, f64::max);
    diff / (1.0 + a.max_abs().max(b.max_abs()).max(f.max_abs()))
}

fn build(name: &str, src: &[String; 4]) -> (Operators, QuatField) {
    let c = chart(name);
    let spec = FieldSpec {
        re: [Some(&src[0]), Some(&src[1]), Some(&src[2]), Some(&src[3])],
        im: [None; 4],
    };
    let field = QuatField::parse(c.clone(), &spec, &[]).unwrap();
    (Operators::new(c, OperatorConfig::symbolic()).unwrap(), field)
}

fn check_all(name: &str, src: &[String; 4], p: &[f64; 3]) -> Result<(), TestCaseError> {
    let (ops, f) = build(name, src);
    let v = f.vector_part();
    let fp = f.eval(p).unwrap();
    let at = |field: &QuatField, op: Op| ops.apply(field, op).unwrap().at(p).unwrap();
    let zero = Quaternion::ZERO;

    prop_assert!(scaled(&at(&f, Op::CurlGrad), &zero, &fp) < 1e-9);
    prop_assert!(scaled(&at(&v, Op::DivCurl), &zero, &fp) < 1e-9);
    prop_assert!(scaled(&at(&f, Op::MtSquared).scale(-1.0), &at(&f, Op::LaplaceQuat), &fp) < 1e-9);
    prop_assert!(scaled(&at(&f, Op::MtLeftRight).scale(-1.0), &at(&f, Op::BitsadzeQuat), &fp) < 1e-9);
    prop_assert!(scaled(&at(&f, Op::MtMatrix), &qconj(&at(&f, Op::MtLeft)).scale(-1.0), &fp) < 1e-10);
    prop_assert!(scaled(&at(&v, Op::GradDiv), &at(&v, Op::GradDivViaMt), &fp) < 1e-9);

    let lame = LameParams::new(1.3, 0.4).unwrap();
    let direct = at(&v, Op::Lame(lame, LameRoute::Direct));
    prop_assert!(scaled(&direct, &at(&v, Op::Lame(lame, LameRoute::Expanded)), &fp) < 1e-8);
    prop_assert!(scaled(&direct, &at(&v, Op::Lame(lame, LameRoute::Factorized)), &fp) < 1e-8);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn identities_hold_on_cartesian(src in field_strategy(), p in point_for("cartesian")) {
        check_all("cartesian", &src, &p)?;
    }

    #[test]
    fn identities_hold_on_spherical(src in field_strategy(), p in point_for("spherical")) {
        check_all("spherical", &src, &p)?;
    }

    #[test]
    fn identities_hold_on_cylindrical(src in field_strategy(), p in point_for("cylindrical")) {
        check_all("cylindrical", &src, &p)?;
    }

    /// In Cartesian coordinates the vector Laplacian acts componentwise.
    #[test]
    fn cartesian_vector_laplacian_is_componentwise(src in field_strategy(), p in point_for("cartesian")) {
        let (ops, f) = build("cartesian", &src);
        let lapv = ops.apply(&f.vector_part(), Op::LaplaceVector).unwrap().at(&p).unwrap();
        for (k, text) in src.iter().enumerate().skip(1) {
            let only = [Some(text.as_str()), None, None, None];
            let g = QuatField::parse(f.chart().clone(), &FieldSpec { re: only, im: [None; 4] }, &[]).unwrap();
            let lap0 = ops.apply(&g, Op::LaplaceScalar).unwrap().at(&p).unwrap().s;
            let d = (lapv.v[k - 1] - lap0).abs();
            prop_assert!(d <= 1e-10 * (1.0 + lap0.abs()), "component {k}: {d}");
        }
    }
}
