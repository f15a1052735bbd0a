//! Scalar function representations the operators are generic over.
//!
//! [`Expr`] differentiates exactly. [`NumFn`] wraps closures and
//! differentiates by finite differences, so composing two first-order
//! operators nests the stencils.

use std::fmt;
use std::sync::Arc;

use crate::expr::{EvalError, Expr};

/// A real scalar function of `(q1, q2, q3)` closed under arithmetic and
/// partial differentiation.
pub trait Repr: Clone + Send + Sync {
    fn constant(c: f64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn partial(&self, axis: usize) -> Self;
    fn eval(&self, p: &[f64; 3]) -> Result<f64, EvalError>;
    /// True only when the value is known to be identically zero.
    fn is_zero(&self) -> bool;

    fn scale(&self, c: f64) -> Self {
        self.mul(&Self::constant(c))
    }
}

impl Repr for Expr {
    fn constant(c: f64) -> Self {
        Expr::constant(c)
    }
    fn add(&self, o: &Self) -> Self {
        Expr::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Expr::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Expr::mul(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        Expr::div(self, o)
    }
    fn neg(&self) -> Self {
        Expr::neg(self)
    }
    fn partial(&self, axis: usize) -> Self {
        self.diff_coord(axis)
    }
    fn eval(&self, p: &[f64; 3]) -> Result<f64, EvalError> {
        self.eval_at(p)
    }
    fn is_zero(&self) -> bool {
        Expr::is_zero(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FdScheme {
    /// `(f(x+h) - f(x-h)) / 2h`
    Central2,
    /// Five-point stencil, fourth order.
    Central4,
    /// Central2 at `h` and `h/2`, combined to cancel the `h^2` term.
    Richardson,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdSettings {
    pub scheme: FdScheme,
    pub step: f64,
}

type Closure = dyn Fn(&[f64; 3]) -> Result<f64, EvalError> + Send + Sync;

/// Closure-backed function differentiated by finite differences.
#[derive(Clone)]
pub enum NumFn {
    Const(f64),
    Func { f: Arc<Closure>, fd: FdSettings },
}

impl fmt::Debug for NumFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumFn::Const(c) => write!(f, "Const({c})"),
            NumFn::Func { fd, .. } => write!(f, "Func({fd:?})"),
        }
    }
}

fn shifted(p: &[f64; 3], axis: usize, by: f64) -> [f64; 3] {
    let mut q = *p;
    q[axis] += by;
    q
}

fn central2(f: &Closure, p: &[f64; 3], axis: usize, h: f64) -> Result<f64, EvalError> {
    Ok((f(&shifted(p, axis, h))? - f(&shifted(p, axis, -h))?) / (2.0 * h))
}

fn stencil(f: &Closure, p: &[f64; 3], axis: usize, fd: FdSettings) -> Result<f64, EvalError> {
    let h = fd.step;
    match fd.scheme {
        FdScheme::Central2 => central2(f, p, axis, h),
        FdScheme::Central4 => {
            let at = |k: f64| f(&shifted(p, axis, k * h));
            Ok((-at(2.0)? + 8.0 * at(1.0)? - 8.0 * at(-1.0)? + at(-2.0)?) / (12.0 * h))
        }
        FdScheme::Richardson => {
            let coarse = central2(f, p, axis, h)?;
            let fine = central2(f, p, axis, h / 2.0)?;
            Ok((4.0 * fine - coarse) / 3.0)
        }
    }
}

impl NumFn {
    pub fn from_fn(f: impl Fn(&[f64; 3]) -> Result<f64, EvalError> + Send + Sync + 'static, fd: FdSettings) -> Self {
        NumFn::Func { f: Arc::new(f), fd }
    }

    /// Wraps an expression; its derivatives will be taken numerically.
    pub fn from_expr(e: &Expr, fd: FdSettings) -> Self {
        match e.as_const() {
            Some(c) => NumFn::Const(c),
            None => {
                let e = e.clone();
                Self::from_fn(move |p| e.eval_at(p), fd)
            }
        }
    }

    fn settings(&self) -> Option<FdSettings> {
        match self {
            NumFn::Const(_) => None,
            NumFn::Func { fd, .. } => Some(*fd),
        }
    }

    fn combine(&self, o: &Self, op: impl Fn(f64, f64) -> Result<f64, EvalError> + Send + Sync + 'static) -> Self {
        if let (NumFn::Const(a), NumFn::Const(b)) = (self, o) {
            if let Ok(v) = op(*a, *b) {
                return NumFn::Const(v);
            }
        }
        let fd = self.settings().or(o.settings()).unwrap_or(FdSettings {
            scheme: FdScheme::Central2,
            step: 1e-4,
        });
        let (a, b) = (self.clone(), o.clone());
        Self::from_fn(move |p| op(a.eval(p)?, b.eval(p)?), fd)
    }
}

impl Repr for NumFn {
    fn constant(c: f64) -> Self {
        NumFn::Const(c)
    }

    fn add(&self, o: &Self) -> Self {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        self.combine(o, |a, b| Ok(a + b))
    }

    fn sub(&self, o: &Self) -> Self {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.neg();
        }
        self.combine(o, |a, b| Ok(a - b))
    }

    fn mul(&self, o: &Self) -> Self {
        match (self, o) {
            (NumFn::Const(a), _) if *a == 0.0 => NumFn::Const(0.0),
            (_, NumFn::Const(b)) if *b == 0.0 => NumFn::Const(0.0),
            (NumFn::Const(a), _) if *a == 1.0 => o.clone(),
            (_, NumFn::Const(b)) if *b == 1.0 => self.clone(),
            _ => self.combine(o, |a, b| Ok(a * b)),
        }
    }

    fn div(&self, o: &Self) -> Self {
        match (self, o) {
            (_, NumFn::Const(b)) if *b == 1.0 => self.clone(),
            (NumFn::Const(a), NumFn::Const(b)) if *a == 0.0 && *b != 0.0 => NumFn::Const(0.0),
            _ => self.combine(o, |a, b| {
                if b == 0.0 {
                    Err(EvalError::Domain("division by zero".into()))
                } else {
                    Ok(a / b)
                }
            }),
        }
    }

    fn neg(&self) -> Self {
        match self {
            NumFn::Const(c) => NumFn::Const(-c),
            NumFn::Func { f, fd } => {
                let f = f.clone();
                Self::from_fn(move |p| Ok(-f(p)?), *fd)
            }
        }
    }

    fn partial(&self, axis: usize) -> Self {
        assert!(axis < 3, "coordinate index out of range");
        match self {
            NumFn::Const(_) => NumFn::Const(0.0),
            NumFn::Func { f, fd } => {
                let (f, fd) = (f.clone(), *fd);
                Self::from_fn(move |p| stencil(&*f, p, axis, fd), fd)
            }
        }
    }

    fn eval(&self, p: &[f64; 3]) -> Result<f64, EvalError> {
        match self {
            NumFn::Const(c) => Ok(*c),
            NumFn::Func { f, .. } => {
                let v = f(p)?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(EvalError::Domain("non-finite value".into()))
                }
            }
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, NumFn::Const(c) if *c == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn fd(scheme: FdScheme, step: f64) -> FdSettings {
        FdSettings { scheme, step }
    }

    #[test]
    fn schemes_converge_at_their_order() {
        let e = parse("sin(q1)*exp(q2)").unwrap();
        let p = [0.7, 0.3, 0.0];
        let exact = 0.7f64.cos() * 0.3f64.exp();
        let err = |scheme, h| {
            let f = NumFn::from_expr(&e, fd(scheme, h));
            (f.partial(0).eval(&p).unwrap() - exact).abs()
        };
        // halving h: second order shrinks ~4x, fourth order ~16x
        let r2 = err(FdScheme::Central2, 1e-2) / err(FdScheme::Central2, 5e-3);
        assert!((3.5..4.5).contains(&r2), "{r2}");
        let r4 = err(FdScheme::Central4, 1e-1) / err(FdScheme::Central4, 5e-2);
        assert!((14.0..18.0).contains(&r4), "{r4}");
        assert!(err(FdScheme::Richardson, 1e-2) < 1e-8);
    }

    #[test]
    fn nested_partials() {
        let e = parse("q1^2*q2^3").unwrap();
        let f = NumFn::from_expr(&e, fd(FdScheme::Central2, 1e-4));
        let d = f.partial(0).partial(1).eval(&[1.5, 2.0, 0.0]).unwrap();
        // 6 x y^2
        assert!((d - 36.0).abs() < 1e-5, "{d}");
    }

    #[test]
    fn constants_fold() {
        let c = NumFn::constant(3.0);
        assert!(c.partial(2).is_zero());
        assert!(matches!(c.mul(&NumFn::constant(2.0)), NumFn::Const(v) if v == 6.0));
        let f = NumFn::from_expr(&parse("q1").unwrap(), fd(FdScheme::Central2, 1e-3));
        assert!(f.mul(&NumFn::constant(0.0)).is_zero());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let f = NumFn::from_expr(&parse("q1").unwrap(), fd(FdScheme::Central2, 1e-3));
        let g = NumFn::constant(1.0).div(&f);
        assert!(g.eval(&[0.0, 0.0, 0.0]).is_err());
    }
}
