use std::fmt;

use super::{BinOp, Expr, Node, Var};

// Binding strength, loosest first.
const P_ADD: u8 = 1;
const P_MUL: u8 = 2;
const P_NEG: u8 = 3;
const P_POW: u8 = 4;
const P_ATOM: u8 = 5;

fn prec(e: &Expr) -> u8 {
    match e.node() {
        Node::Binary(BinOp::Add | BinOp::Sub, ..) => P_ADD,
        Node::Binary(BinOp::Mul | BinOp::Div, ..) => P_MUL,
        Node::Neg(_) => P_NEG,
        Node::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => P_NEG,
        Node::Pow(..) => P_POW,
        _ => P_ATOM,
    }
}

/// Printer that can show coordinates under the chart's own names.
pub struct Printer<'a> {
    expr: &'a Expr,
    coord_names: Option<[&'a str; 3]>,
}

impl Expr {
    /// Displays with `q1..q3` replaced by `names`.
    pub fn display_with<'a>(&'a self, names: [&'a str; 3]) -> Printer<'a> {
        Printer {
            expr: self,
            coord_names: Some(names),
        }
    }
}

impl Printer<'_> {
    fn var(&self, f: &mut fmt::Formatter<'_>, v: &Var) -> fmt::Result {
        match (v, self.coord_names) {
            (Var::Coord(i), Some(names)) => f.write_str(names[*i as usize]),
            _ => f.write_str(&v.name()),
        }
    }

    fn wrapped(&self, f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool) -> fmt::Result {
        if paren {
            f.write_str("(")?;
        }
        self.write(f, e)?;
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
        match e.node() {
            Node::Const(c) => write!(f, "{c}"),
            Node::Var(v) => self.var(f, v),
            Node::Neg(a) => {
                f.write_str("-")?;
                self.wrapped(f, a, prec(a) < P_NEG)
            }
            Node::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                self.write(f, a)?;
                f.write_str(")")
            }
            Node::Pow(a, k) => {
                self.wrapped(f, a, prec(a) <= P_POW)?;
                if *k < 0.0 || (*k == 0.0 && k.is_sign_negative()) {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            Node::Binary(op, a, b) => {
                let (p, sym) = match op {
                    BinOp::Add => (P_ADD, " + "),
                    BinOp::Sub => (P_ADD, " - "),
                    BinOp::Mul => (P_MUL, "*"),
                    BinOp::Div => (P_MUL, "/"),
                };
                // a leading negative would be re-read as Neg at the operand level
                self.wrapped(f, a, prec(a) < p)?;
                f.write_str(sym)?;
                self.wrapped(f, b, prec(b) <= p || prec(b) == P_NEG)
            }
        }
    }
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.expr)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Printer {
            expr: self,
            coord_names: None,
        }
        .fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use proptest::prelude::*;

    fn round_trip(src: &str) {
        let e = parse(src).unwrap();
        let printed = e.to_string();
        let back = parse(&printed).unwrap_or_else(|err| panic!("{printed:?}: {err}"));
        assert_eq!(back, e, "{src:?} printed as {printed:?}");
    }

    #[test]
    fn suite_expressions_round_trip() {
        for src in [
            "q1^2 + 3*q2",
            "r*sin(theta)*cos(psi)",
            "-q1^2",
            "(-q1)^2",
            "q1 - (q2 - q3)",
            "q1/(q2*q3)",
            "q1/q2/q3",
            "q1 + -q2",
            "q1*-q2",
            "--q1",
            "(q1^2)^3",
            "q1^-1.5",
            "2*cot(q2)/q1",
            "sqrt(q1^2 + q2^2)",
            "1e-20*q1 + 123456789012345680000",
            "pi - q2",
            "exp(-(q1 + q2))",
        ] {
            round_trip(src);
        }
    }

    #[test]
    fn chart_names() {
        let e = parse("q1*sin(q2)").unwrap();
        assert_eq!(e.display_with(["r", "theta", "psi"]).to_string(), "r*sin(theta)");
    }

    fn arb_expr() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![
            (0u32..100).prop_map(|n| n.to_string()),
            (0.0f64..10.0).prop_map(|x| format!("{x}")),
            prop::sample::select(vec!["q1", "q2", "q3", "k"]).prop_map(str::to_string),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                (
                    inner.clone(),
                    inner.clone(),
                    prop::sample::select(vec!["+", "-", "*", "/"])
                )
                    .prop_map(|(a, b, op)| format!("({a}) {op} ({b})")),
                inner.clone().prop_map(|a| format!("-({a})")),
                (inner.clone(), -3i32..4).prop_map(|(a, k)| format!("({a})^({k})")),
                (inner, prop::sample::select(vec!["sin", "cos", "exp", "ln", "sqrt"]))
                    .prop_map(|(a, f)| format!("{f}({a})")),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_reparses_identically(src in arb_expr()) {
            let e = parse(&src).unwrap();
            let printed = e.to_string();
            prop_assert_eq!(parse(&printed).unwrap(), e);
        }
    }
}
