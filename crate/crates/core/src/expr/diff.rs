use super::{BinOp, Expr, Func, Node, Var};

impl Expr {
    /// Exact partial derivative with respect to `var` (e.g. `"q1"` or a
    /// named variable). Total on the grammar.
    pub fn diff(&self, var: &str) -> Expr {
        self.diff_var(&Var::from_name(var))
    }

    /// Partial derivative along coordinate `axis` (0-based).
    pub fn diff_coord(&self, axis: usize) -> Expr {
        assert!(axis < 3, "coordinate index out of range");
        self.diff_var(&Var::Coord(axis as u8))
    }

    pub fn diff_var(&self, var: &Var) -> Expr {
        match self.node() {
            Node::Const(_) => Expr::zero(),
            Node::Var(v) => {
                if v == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Neg(a) => a.diff_var(var).neg(),
            Node::Binary(op, a, b) => {
                let (da, db) = (a.diff_var(var), b.diff_var(var));
                match op {
                    BinOp::Add => da.add(&db),
                    BinOp::Sub => da.sub(&db),
                    BinOp::Mul => da.mul(b).add(&a.mul(&db)),
                    BinOp::Div => {
                        // (a/b)' = a'/b - a b'/b^2
                        if db.is_zero() {
                            da.div(b)
                        } else {
                            da.mul(b).sub(&a.mul(&db)).div(&b.powf(2.0))
                        }
                    }
                }
            }
            Node::Pow(a, k) => {
                let da = a.diff_var(var);
                if da.is_zero() {
                    return Expr::zero();
                }
                Expr::constant(*k).mul(&a.powf(k - 1.0)).mul(&da)
            }
            Node::Call(f, a) => {
                let da = a.diff_var(var);
                if da.is_zero() {
                    return Expr::zero();
                }
                let outer = match f {
                    Func::Sin => a.cos(),
                    Func::Cos => a.sin().neg(),
                    Func::Tan => Expr::one().div(&a.cos().powf(2.0)),
                    Func::Cot => Expr::one().div(&a.sin().powf(2.0)).neg(),
                    Func::Exp => self.clone(),
                    Func::Ln => Expr::one().div(a),
                    Func::Sqrt => Expr::one().div(&Expr::constant(2.0).mul(self)),
                };
                outer.mul(&da)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse, EvalEnv};

    /// Central difference with Richardson extrapolation, independent of the
    /// symbolic path.
    fn richardson(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        let c = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
        (4.0 * c(h / 2.0) - c(h)) / 3.0
    }

    #[test]
    fn simple_rules() {
        assert_eq!(parse("q1^2").unwrap().diff("q1").to_string(), "2*q1");
        assert_eq!(parse("sin(q2)").unwrap().diff("q2").to_string(), "cos(q2)");
        assert!(parse("q2^3").unwrap().diff("q1").is_zero());
    }

    #[test]
    fn product_matches_central_difference() {
        let e = parse("q1*sin(q1)").unwrap();
        let d = e.diff("q1");
        let f = |x: f64| e.eval(&EvalEnv::new().bind("q1", x)).unwrap();
        for x in [0.3, 1.1, 2.7] {
            let h = 1e-5;
            let fd = (f(x + h) - f(x - h)) / (2.0 * h);
            let sym = d.eval(&EvalEnv::new().bind("q1", x)).unwrap();
            assert!((sym - fd).abs() < 1e-8, "x={x}: {sym} vs {fd}");
        }
    }

    #[test]
    fn every_function_against_richardson() {
        let cases = [
            "sin(q1^2)",
            "cos(2*q1)",
            "tan(q1/3)",
            "cot(q1)",
            "exp(-q1)",
            "ln(1 + q1^2)",
            "sqrt(q1 + 1)",
            "q1^-2",
            "(q1 + 2)^1.5",
            "q1/(2 + q1)",
            "-q1^3",
        ];
        for src in cases {
            let e = parse(src).unwrap();
            let d = e.diff("q1");
            for x in [0.4, 0.9, 1.7] {
                let f = |t: f64| e.eval_at(&[t, 0.0, 0.0]).unwrap();
                let oracle = richardson(f, x, 1e-3);
                let sym = d.eval_at(&[x, 0.0, 0.0]).unwrap();
                assert!(
                    (sym - oracle).abs() <= 1e-7 * (1.0 + oracle.abs()),
                    "{src} at {x}: {sym} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn named_variables_differentiate() {
        let e = parse("k*q1 + k^2").unwrap();
        let d = e.diff("k");
        let env = EvalEnv::new().bind("q1", 3.0).bind("k", 2.0);
        assert_eq!(d.eval(&env).unwrap(), 7.0);
    }

    #[test]
    fn mixed_partials_commute() {
        let e = parse("q1^2*sin(q2) + cos(q1)*q2^3 + exp(q1*q2)").unwrap();
        let a = e.diff("q1").diff("q2");
        let b = e.diff("q2").diff("q1");
        for p in [[0.3, 0.7, 0.0], [1.2, -0.4, 0.0], [2.0, 1.5, 0.0]] {
            let (x, y) = (a.eval_at(&p).unwrap(), b.eval_at(&p).unwrap());
            assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()));
        }
    }
}
