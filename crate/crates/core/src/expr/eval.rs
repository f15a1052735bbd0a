use std::collections::HashMap;

use thiserror::Error;

use super::{BinOp, Expr, Func, Node, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
}

/// Variable bindings for [`Expr::eval`].
#[derive(Debug, Clone, Default)]
pub struct EvalEnv {
    coords: [Option<f64>; 3],
    named: HashMap<String, f64>,
}

impl EvalEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_coords(p: [f64; 3]) -> Self {
        Self {
            coords: p.map(Some),
            named: HashMap::new(),
        }
    }

    /// Binds `name`; `q1`..`q3` set the coordinates.
    pub fn bind(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        match Var::from_name(name) {
            Var::Coord(i) => self.coords[i as usize] = Some(value),
            Var::Named(_) => {
                self.named.insert(name.to_string(), value);
            }
        }
    }

    fn lookup(&self, v: &Var) -> Result<f64, EvalError> {
        match v {
            Var::Coord(i) => self.coords[*i as usize],
            Var::Named(n) => self.named.get(&**n).copied(),
        }
        .ok_or_else(|| EvalError::UnboundVariable(v.name()))
    }
}

// Below this, sin or cos of a multiple of pi/2 is treated as an exact zero.
const TRIG_ZERO: f64 = 1e-14;

fn domain(msg: impl Into<String>) -> EvalError {
    EvalError::Domain(msg.into())
}

fn finite(v: f64, what: &str) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(domain(format!("{what} is not finite")))
    }
}

pub(crate) fn apply_func(f: Func, x: f64) -> Result<f64, EvalError> {
    let v = match f {
        Func::Sin => x.sin(),
        Func::Cos => x.cos(),
        Func::Tan => {
            let c = x.cos();
            if c.abs() < TRIG_ZERO {
                return Err(domain(format!("tan undefined at {x}")));
            }
            x.sin() / c
        }
        Func::Cot => {
            let s = x.sin();
            if s.abs() < TRIG_ZERO {
                return Err(domain(format!("cot undefined at {x}")));
            }
            x.cos() / s
        }
        Func::Exp => x.exp(),
        Func::Ln => {
            if x <= 0.0 {
                return Err(domain(format!("ln of non-positive {x}")));
            }
            x.ln()
        }
        Func::Sqrt => {
            if x < 0.0 {
                return Err(domain(format!("sqrt of negative {x}")));
            }
            x.sqrt()
        }
    };
    finite(v, f.name())
}

fn apply_pow(base: f64, k: f64) -> Result<f64, EvalError> {
    if base == 0.0 && k < 0.0 {
        return Err(domain("zero raised to a negative power"));
    }
    if base < 0.0 && k.fract() != 0.0 {
        return Err(domain(format!("negative base {base} with fractional exponent {k}")));
    }
    let v = if k.fract() == 0.0 && k.abs() <= i32::MAX as f64 {
        base.powi(k as i32)
    } else {
        base.powf(k)
    };
    finite(v, "power")
}

fn eval_with(e: &Expr, look: &impl Fn(&Var) -> Result<f64, EvalError>) -> Result<f64, EvalError> {
    match e.node() {
        Node::Const(c) => Ok(*c),
        Node::Var(v) => look(v),
        Node::Neg(a) => Ok(-eval_with(a, look)?),
        Node::Call(f, a) => apply_func(*f, eval_with(a, look)?),
        Node::Pow(a, k) => apply_pow(eval_with(a, look)?, *k),
        Node::Binary(op, a, b) => {
            let x = eval_with(a, look)?;
            let y = eval_with(b, look)?;
            match op {
                BinOp::Add => finite(x + y, "sum"),
                BinOp::Sub => finite(x - y, "difference"),
                BinOp::Mul => finite(x * y, "product"),
                BinOp::Div => {
                    if y == 0.0 {
                        return Err(domain("division by zero"));
                    }
                    finite(x / y, "quotient")
                }
            }
        }
    }
}

impl Expr {
    /// Evaluates with the given bindings. Domain violations are errors,
    /// never NaN or infinities.
    pub fn eval(&self, env: &EvalEnv) -> Result<f64, EvalError> {
        eval_with(self, &|v| env.lookup(v))
    }

    /// Evaluates at coordinates `p`; any named variable is unbound.
    pub fn eval_at(&self, p: &[f64; 3]) -> Result<f64, EvalError> {
        eval_with(self, &|v| match v {
            Var::Coord(i) => Ok(p[*i as usize]),
            Var::Named(n) => Err(EvalError::UnboundVariable(n.to_string())),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;
    use std::f64::consts::PI;

    fn ev(s: &str, env: &EvalEnv) -> Result<f64, EvalError> {
        parse(s).unwrap().eval(env)
    }

    #[test]
    fn basic_values() {
        let env = EvalEnv::new().bind("q1", 3.0);
        assert_eq!(ev("q1^2", &env).unwrap(), 9.0);
        let env = EvalEnv::new().bind("q2", PI / 2.0);
        assert!(ev("cot(q2)", &env).unwrap().abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let env = EvalEnv::with_coords([0.0, -1.0, PI]);
        for s in [
            "1/q1",
            "ln(q1)",
            "ln(q2)",
            "sqrt(q2)",
            "cot(q3)",
            "cot(q1)",
            "tan(q3/2)",
            "q1^-1",
            "q2^0.5",
            "exp(1000)",
        ] {
            assert!(
                matches!(ev(s, &env), Err(EvalError::Domain(_))),
                "{s} should be a domain error"
            );
        }
        // exactly representable non-integer exponent on a positive base is fine
        assert_eq!(ev("4^0.5", &env).unwrap(), 2.0);
        assert_eq!(ev("q2^3", &env).unwrap(), -1.0);
    }

    #[test]
    fn unbound() {
        assert_eq!(
            ev("q1 + k", &EvalEnv::new().bind("q1", 1.0)),
            Err(EvalError::UnboundVariable("k".into()))
        );
        assert_eq!(
            parse("q3").unwrap().eval(&EvalEnv::new()),
            Err(EvalError::UnboundVariable("q3".into()))
        );
    }

    #[test]
    fn named_bindings() {
        let env = EvalEnv::new().bind("r", 2.0).bind("theta", PI / 6.0);
        assert!((ev("r*sin(theta)", &env).unwrap() - 1.0).abs() < 1e-15);
    }
}
