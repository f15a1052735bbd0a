//! Expression language for real-analytic functions of `q1, q2, q3`.
//!
//! Expressions are immutable trees with shared subtrees (`Arc`), so symbolic
//! differentiation can reuse the operands of a product or chain rule without
//! copying them. The smart constructors on [`Expr`] fold constants and drop
//! the identities `0+e`, `1*e`, `0*e`, `e^1`; nothing else is simplified.
//!
//! Grammar (EBNF), loosest binding first:
//!
//! ```text
//! expr     = term { ("+" | "-") term } ;
//! term     = unary { ("*" | "/") unary } ;
//! unary    = ("-" | "+") unary | power ;
//! power    = atom [ "^" unary ] ;            (* right-assoc, exponent constant *)
//! atom     = number | ident | ident "(" expr ")" | "(" expr ")" ;
//! number   = digit { digit } [ "." { digit } ] [ ("e" | "E") ["+" | "-"] digit { digit } ]
//!          | "." digit { digit } [ exponent ] ;
//! ident    = (letter | "_") { letter | digit | "_" } ;
//! ```
//!
//! Functions: `sin cos tan cot exp ln sqrt`. The identifier `pi` is the
//! constant. `q1 q2 q3` are the coordinates; other identifiers are named
//! variables, resolved later by [`Expr::bind_coords`] and
//! [`Expr::substitute_named`].

mod diff;
mod display;
mod eval;
mod parse;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use eval::{EvalEnv, EvalError};
pub use parse::{parse, ParseError};

/// A variable reference: one of the three coordinates, or a name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Coord(u8),
    Named(Arc<str>),
}

impl Var {
    /// Parses `q1`..`q3` into coordinates, anything else into a name.
    pub fn from_name(name: &str) -> Self {
        match name {
            "q1" => Var::Coord(0),
            "q2" => Var::Coord(1),
            "q3" => Var::Coord(2),
            _ => Var::Named(Arc::from(name)),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Var::Coord(i) => format!("q{}", i + 1),
            Var::Named(n) => n.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Cot,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Cot,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Cot => "cot",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(Var),
    Neg(Expr),
    Call(Func, Expr),
    Binary(BinOp, Expr, Expr),
    /// Power with a constant exponent.
    Pow(Expr, f64),
}

/// Shared, immutable expression tree.
#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Node>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown variable `{0}`")]
pub struct UnknownVariable(pub String);

impl Expr {
    pub fn node(&self) -> &Node {
        &self.0
    }

    fn wrap(n: Node) -> Self {
        Expr(Arc::new(n))
    }

    pub fn constant(c: f64) -> Self {
        Self::wrap(Node::Const(c))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn coord(i: usize) -> Self {
        assert!(i < 3, "coordinate index out of range");
        Self::wrap(Node::Var(Var::Coord(i as u8)))
    }

    pub fn var(name: &str) -> Self {
        Self::wrap(Node::Var(Var::from_name(name)))
    }

    pub fn as_const(&self) -> Option<f64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    pub fn neg(&self) -> Self {
        match self.node() {
            Node::Const(c) => Self::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Self::wrap(Node::Neg(self.clone())),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => Self::constant(a + b),
            (Some(0.0), _) => o.clone(),
            (_, Some(0.0)) => self.clone(),
            _ => Self::wrap(Node::Binary(BinOp::Add, self.clone(), o.clone())),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => Self::constant(a - b),
            (Some(0.0), _) => o.neg(),
            (_, Some(0.0)) => self.clone(),
            _ => Self::wrap(Node::Binary(BinOp::Sub, self.clone(), o.clone())),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) => Self::constant(a * b),
            (Some(0.0), _) => Self::zero(),
            (_, Some(0.0)) => Self::zero(),
            (Some(1.0), _) => o.clone(),
            (_, Some(1.0)) => self.clone(),
            _ => Self::wrap(Node::Binary(BinOp::Mul, self.clone(), o.clone())),
        }
    }

    pub fn div(&self, o: &Self) -> Self {
        match (self.as_const(), o.as_const()) {
            (Some(a), Some(b)) if b != 0.0 => Self::constant(a / b),
            (Some(a), _) if a == 0.0 && o.as_const() != Some(0.0) => Self::zero(),
            (_, Some(1.0)) => self.clone(),
            _ => Self::wrap(Node::Binary(BinOp::Div, self.clone(), o.clone())),
        }
    }

    pub fn powf(&self, exponent: f64) -> Self {
        if exponent == 1.0 {
            return self.clone();
        }
        if exponent == 0.0 {
            return Self::one();
        }
        if let Some(c) = self.as_const() {
            let v = c.powf(exponent);
            if v.is_finite() {
                return Self::constant(v);
            }
        }
        Self::wrap(Node::Pow(self.clone(), exponent))
    }

    pub fn call(f: Func, arg: &Self) -> Self {
        if let Some(c) = arg.as_const() {
            if let Ok(v) = eval::apply_func(f, c) {
                return Self::constant(v);
            }
        }
        Self::wrap(Node::Call(f, arg.clone()))
    }

    pub fn sin(&self) -> Self {
        Self::call(Func::Sin, self)
    }

    pub fn cos(&self) -> Self {
        Self::call(Func::Cos, self)
    }

    pub fn sqrt(&self) -> Self {
        Self::call(Func::Sqrt, self)
    }

    /// Builds a node without any folding. Used by the parser so that the
    /// tree mirrors the source text.
    pub(crate) fn raw(n: Node) -> Self {
        Self::wrap(n)
    }

    /// Every variable referenced anywhere in the tree.
    pub fn variables(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self.node() {
            Node::Const(_) => {}
            Node::Var(v) => {
                out.insert(v.clone());
            }
            Node::Neg(a) | Node::Call(_, a) | Node::Pow(a, _) => a.collect_vars(out),
            Node::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Node count of the tree, counting shared subtrees once per use.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Const(_) | Node::Var(_) => 1,
            Node::Neg(a) | Node::Call(_, a) | Node::Pow(a, _) => 1 + a.size(),
            Node::Binary(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Rebuilds the tree bottom-up, replacing variables via `f`. Folding is
    /// reapplied on the way up.
    pub fn map_vars(&self, f: &impl Fn(&Var) -> Option<Expr>) -> Expr {
        match self.node() {
            Node::Const(_) => self.clone(),
            Node::Var(v) => f(v).unwrap_or_else(|| self.clone()),
            Node::Neg(a) => a.map_vars(f).neg(),
            Node::Call(func, a) => Expr::call(*func, &a.map_vars(f)),
            Node::Pow(a, k) => a.map_vars(f).powf(*k),
            Node::Binary(op, a, b) => {
                let (a, b) = (a.map_vars(f), b.map_vars(f));
                match op {
                    BinOp::Add => a.add(&b),
                    BinOp::Sub => a.sub(&b),
                    BinOp::Mul => a.mul(&b),
                    BinOp::Div => a.div(&b),
                }
            }
        }
    }

    /// Renames the chart's coordinate names to `q1..q3`.
    pub fn bind_coords<S: AsRef<str>>(&self, names: &[S; 3]) -> Expr {
        self.map_vars(&|v| match v {
            Var::Named(n) => names.iter().position(|c| c.as_ref() == &**n).map(Expr::coord),
            Var::Coord(_) => None,
        })
    }

    /// Replaces the coordinates `q1..q3` with the given expressions.
    pub fn substitute_coords(&self, with: &[Expr; 3]) -> Expr {
        self.map_vars(&|v| match v {
            Var::Coord(i) => Some(with[*i as usize].clone()),
            Var::Named(_) => None,
        })
    }

    /// Replaces named variables by value.
    pub fn substitute_named(&self, lookup: &impl Fn(&str) -> Option<f64>) -> Expr {
        self.map_vars(&|v| match v {
            Var::Named(n) => lookup(n).map(Expr::constant),
            Var::Coord(_) => None,
        })
    }

    /// Fails with the first named variable not in `allowed`.
    pub fn check_bound(&self, allowed: &[&str]) -> Result<(), UnknownVariable> {
        for v in self.variables() {
            if let Var::Named(n) = &v {
                if !allowed.contains(&&**n) {
                    return Err(UnknownVariable(n.to_string()));
                }
            }
        }
        Ok(())
    }

    /// True when the tree references only coordinates (no free names).
    pub fn is_closed(&self) -> bool {
        self.variables().iter().all(|v| matches!(v, Var::Coord(_)))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self.node(), f)
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_fold_identities() {
        let x = Expr::coord(0);
        assert_eq!(Expr::zero().add(&x), x);
        assert_eq!(x.mul(&Expr::one()), x);
        assert!(x.mul(&Expr::zero()).is_zero());
        assert_eq!(Expr::constant(2.0).mul(&Expr::constant(3.0)).as_const(), Some(6.0));
        assert_eq!(x.powf(1.0), x);
        assert_eq!(x.neg().neg(), x);
        assert_eq!(Expr::constant(0.0).sin().as_const(), Some(0.0));
    }

    #[test]
    fn division_by_constant_zero_is_kept_for_eval_to_reject() {
        let e = Expr::one().div(&Expr::zero());
        assert!(e.as_const().is_none());
    }

    #[test]
    fn bind_and_substitute() {
        let e = parse("r*sin(theta) + k").unwrap();
        let bound = e.bind_coords(&["r", "theta", "psi"]);
        assert_eq!(bound.check_bound(&[]), Err(UnknownVariable("k".to_string())));
        let closed = bound.substitute_named(&|n| (n == "k").then_some(2.0));
        assert!(closed.is_closed());
        let v = closed.eval_at(&[2.0, std::f64::consts::FRAC_PI_2, 0.0]).unwrap();
        assert!((v - 4.0).abs() < 1e-15);
    }

    #[test]
    fn substitute_coords_composes() {
        let e = parse("q1^2 + q2").unwrap();
        let s = e.substitute_coords(&[parse("q2").unwrap(), Expr::constant(3.0), Expr::zero()]);
        assert_eq!(s.eval_at(&[0.0, 2.0, 0.0]).unwrap(), 7.0);
    }
}
