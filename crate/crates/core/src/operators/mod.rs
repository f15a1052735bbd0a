//! Differential operators on quaternion fields over a [`Chart`].
//!
//! [`Operators::apply`] builds an operator result once, as a function of
//! the chart coordinates, and [`Applied::at`] evaluates it at a point after
//! checking the point against the chart's domain and metric. The free
//! functions (`grad_s`, `mt_left`, ...) are one-shot conveniences.
//!
//! All vector outputs are in the local frame `u1, u2, u3` at the point.

pub mod calculus;
pub mod repr;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalError, Expr};
use crate::geometry::{Chart, ComplexExpr, GeometryError, QuatField};
use crate::quat::{ComplexScalar, Quaternion};

pub use calculus::{Calculus, Cx, FdLift, FrameVec, Lift, QField, SymbolicLift};
pub use repr::{FdScheme, FdSettings, NumFn, Repr};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("invalid Lamé parameters mu = {mu}, lambda = {lambda}: need mu > 0 and lambda > -2 mu / 3")]
    InvalidLameParams { mu: f64, lambda: f64 },
    #[error("invalid operator configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    Symbolic,
    FiniteDifference,
}

impl fmt::Display for DerivativeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DerivativeMode::Symbolic => "symbolic",
            DerivativeMode::FiniteDifference => "finite_difference",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorConfig {
    pub derivative_mode: DerivativeMode,
    pub fd_step: f64,
    pub fd_scheme: FdScheme,
}

impl Default for OperatorConfig {
    fn default() -> Self {
        Self {
            derivative_mode: DerivativeMode::Symbolic,
            fd_step: 1e-4,
            fd_scheme: FdScheme::Central2,
        }
    }
}

impl OperatorConfig {
    pub fn symbolic() -> Self {
        Self::default()
    }

    pub fn finite_difference(scheme: FdScheme, step: f64) -> Result<Self, OpError> {
        Self {
            derivative_mode: DerivativeMode::FiniteDifference,
            fd_step: step,
            fd_scheme: scheme,
        }
        .validate()
    }

    pub fn validate(self) -> Result<Self, OpError> {
        if !(self.fd_step.is_finite() && self.fd_step > 0.0) {
            return Err(OpError::InvalidConfig(format!(
                "fd_step must be a positive finite number, got {}",
                self.fd_step
            )));
        }
        Ok(self)
    }

    pub fn fd_settings(&self) -> FdSettings {
        FdSettings {
            scheme: self.fd_scheme,
            step: self.fd_step,
        }
    }
}

/// Isotropic elastic moduli, checked on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LameParams {
    mu: f64,
    lambda: f64,
}

impl LameParams {
    pub fn new(mu: f64, lambda: f64) -> Result<Self, OpError> {
        let ok = mu.is_finite() && lambda.is_finite() && mu > 0.0 && lambda > -2.0 * mu / 3.0;
        if !ok {
            return Err(OpError::InvalidLameParams { mu, lambda });
        }
        Ok(Self { mu, lambda })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `(mu + lambda) / 2`
    pub fn alpha(&self) -> f64 {
        (self.mu + self.lambda) / 2.0
    }

    /// `(3 mu + lambda) / 2`
    pub fn beta(&self) -> f64 {
        (3.0 * self.mu + self.lambda) / 2.0
    }

    /// Poisson ratio `lambda / (2 (lambda + mu))`.
    pub fn poisson_ratio(&self) -> f64 {
        self.lambda / (2.0 * (self.lambda + self.mu))
    }
}

/// The three independent constructions of the Lamé operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LameRoute {
    Direct,
    Expanded,
    Factorized,
}

/// Every operator the crate can evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Op {
    Grad,
    Div,
    Curl,
    MtLeft,
    MtRight,
    /// `(div f, grad f0 + curl f)` packed as a quaternion.
    MtMatrix,
    LaplaceScalar,
    LaplaceScalarComposed,
    LaplaceVector,
    LaplaceVectorComposed,
    LaplaceQuat,
    BitsadzeVector,
    BitsadzeVectorComposed,
    BitsadzeQuat,
    GradDiv,
    GradDivViaMt,
    MtSquared,
    MtLeftRight,
    /// `curl grad f0`, identically zero.
    CurlGrad,
    /// `div curl f`, identically zero.
    DivCurl,
    Lame(LameParams, LameRoute),
}

impl Op {
    /// Short names accepted on the command line.
    pub const CLI_NAMES: [&'static str; 11] = [
        "grad", "div", "curl", "mt", "mtr", "lap0", "lapv", "laph", "bitsv", "bitsh", "lame",
    ];

    /// Parses a command-line operator name. `lame` needs its parameters.
    pub fn from_cli(name: &str, lame: Option<LameParams>) -> Result<Op, OpError> {
        Ok(match name {
            "grad" => Op::Grad,
            "div" => Op::Div,
            "curl" => Op::Curl,
            "mt" => Op::MtLeft,
            "mtr" => Op::MtRight,
            "lap0" => Op::LaplaceScalar,
            "lapv" => Op::LaplaceVector,
            "laph" => Op::LaplaceQuat,
            "bitsv" => Op::BitsadzeVector,
            "bitsh" => Op::BitsadzeQuat,
            "lame" => {
                let params =
                    lame.ok_or_else(|| OpError::InvalidConfig("operator `lame` needs mu and lambda".into()))?;
                Op::Lame(params, LameRoute::Direct)
            }
            other => {
                return Err(OpError::InvalidConfig(format!(
                    "unknown operator `{other}` (expected one of {})",
                    Op::CLI_NAMES.join(", ")
                )))
            }
        })
    }
}

impl FromStr for DerivativeMode {
    type Err = OpError;

    fn from_str(s: &str) -> Result<Self, OpError> {
        match s {
            "symbolic" => Ok(DerivativeMode::Symbolic),
            "fd" | "finite_difference" => Ok(DerivativeMode::FiniteDifference),
            _ => Err(OpError::InvalidConfig(format!("unknown derivative mode `{s}`"))),
        }
    }
}

fn build<S: Repr>(calc: &Calculus<S>, f: QField<S>, op: Op) -> QField<S> {
    let zero = Cx::zero;
    let vec = |v: FrameVec<S>| QField::new(zero(), v);
    let scalar = |s: Cx<S>| QField::new(s, [zero(), zero(), zero()]);
    match op {
        Op::Grad => vec(calc.grad(&f.f0)),
        Op::Div => scalar(calc.div(&f.fv)),
        Op::Curl => vec(calc.curl(&f.fv)),
        Op::MtLeft => calc.mt_left(&f),
        Op::MtRight => calc.mt_right(&f),
        Op::MtMatrix => {
            let (s, v) = calc.mt_matrix(&f);
            QField::new(s, v)
        }
        Op::LaplaceScalar => scalar(calc.laplace_scalar(&f.f0)),
        Op::LaplaceScalarComposed => scalar(calc.laplace_scalar_composed(&f.f0)),
        Op::LaplaceVector => vec(calc.laplace_vector(&f.fv)),
        Op::LaplaceVectorComposed => vec(calc.laplace_vector_composed(&f.fv)),
        Op::LaplaceQuat => calc.laplace_quat(&f),
        Op::BitsadzeVector => vec(calc.bitsadze_vector(&f.fv)),
        Op::BitsadzeVectorComposed => vec(calc.bitsadze_vector_composed(&f.fv)),
        Op::BitsadzeQuat => calc.bitsadze_quat(&f),
        Op::GradDiv => vec(calc.graddiv(&f.fv)),
        Op::GradDivViaMt => calc.graddiv_via_mt(&f.fv),
        Op::MtSquared => calc.mt_squared(&f),
        Op::MtLeftRight => calc.mt_left_right(&f),
        Op::CurlGrad => vec(calc.curl(&calc.grad(&f.f0))),
        Op::DivCurl => scalar(calc.div(&calc.curl(&f.fv))),
        Op::Lame(lp, route) => match route {
            LameRoute::Direct => vec(calc.lame_direct(&f.fv, lp.mu, lp.lambda)),
            LameRoute::Expanded => vec(calc.lame_expanded(&f.fv, lp.mu, lp.lambda)),
            LameRoute::Factorized => calc.lame_factorized(&f.fv, lp.alpha(), lp.beta()),
        },
    }
}

#[derive(Debug, Clone)]
enum Built {
    Symbolic(QField<Expr>),
    Fd(QField<NumFn>),
}

/// Operator evaluator bound to a validated chart.
#[derive(Debug, Clone)]
pub struct Operators {
    chart: Arc<Chart>,
    config: OperatorConfig,
    symbolic: Option<Arc<Calculus<Expr>>>,
    fd: Option<Arc<Calculus<NumFn>>>,
}

impl<S: Repr + fmt::Debug> fmt::Debug for Calculus<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Calculus").field("h", self.metric()).finish()
    }
}

impl Operators {
    pub fn new(chart: Arc<Chart>, config: OperatorConfig) -> Result<Self, OpError> {
        let config = config.validate()?;
        chart.require_validated()?;
        let (symbolic, fd) = match config.derivative_mode {
            DerivativeMode::Symbolic => (Some(Arc::new(Calculus::for_chart(&chart, &SymbolicLift))), None),
            DerivativeMode::FiniteDifference => (
                None,
                Some(Arc::new(Calculus::for_chart(&chart, &FdLift(config.fd_settings())))),
            ),
        };
        Ok(Self {
            chart,
            config,
            symbolic,
            fd,
        })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn config(&self) -> &OperatorConfig {
        &self.config
    }

    fn check_chart(&self, field: &QuatField) -> Result<(), OpError> {
        if !Arc::ptr_eq(field.chart(), &self.chart) && field.chart().name() != self.chart.name() {
            return Err(OpError::InvalidConfig(format!(
                "field lives on chart `{}`, operators on `{}`",
                field.chart().name(),
                self.chart.name()
            )));
        }
        Ok(())
    }

    /// Builds `op(field)` as a function of the coordinates.
    pub fn apply(&self, field: &QuatField, op: Op) -> Result<Applied, OpError> {
        self.check_chart(field)?;
        let built = match (&self.symbolic, &self.fd) {
            (Some(calc), _) => Built::Symbolic(build(calc, SymbolicLift.lift_field(field), op)),
            (None, Some(calc)) => {
                let lift = FdLift(self.config.fd_settings());
                Built::Fd(build(calc, lift.lift_field(field), op))
            }
            (None, None) => unreachable!("one calculus is always present"),
        };
        Ok(Applied {
            chart: self.chart.clone(),
            built,
        })
    }

    /// One-shot `op(field)` at `p`.
    pub fn eval(&self, field: &QuatField, op: Op, p: &[f64; 3]) -> Result<Quaternion, OpError> {
        self.apply(field, op)?.at(p)
    }
}

/// An operator result ready for pointwise evaluation.
#[derive(Debug, Clone)]
pub struct Applied {
    chart: Arc<Chart>,
    built: Built,
}

impl Applied {
    /// Value at `p`: scalar part plus frame components. Refuses points
    /// outside the chart domain or where a metric coefficient degenerates.
    pub fn at(&self, p: &[f64; 3]) -> Result<Quaternion, OpError> {
        self.chart.metric(p)?;
        let q = match &self.built {
            Built::Symbolic(f) => f.eval(p)?,
            Built::Fd(f) => f.eval(p)?,
        };
        Ok(q)
    }

    /// The symbolic components `(f0, f1, f2, f3)`, when built symbolically.
    pub fn expressions(&self) -> Option<[ComplexExpr; 4]> {
        match &self.built {
            Built::Symbolic(f) => {
                let c = |x: &Cx<Expr>| ComplexExpr::new(x.re.clone(), x.im.clone());
                Some([c(&f.f0), c(&f.fv[0]), c(&f.fv[1]), c(&f.fv[2])])
            }
            Built::Fd(_) => None,
        }
    }
}

fn scalar_field(chart: &Arc<Chart>, f0: &ComplexExpr) -> Result<QuatField, OpError> {
    Ok(QuatField::new(
        chart.clone(),
        f0.clone(),
        [ComplexExpr::zero(), ComplexExpr::zero(), ComplexExpr::zero()],
    )?)
}

fn vector_field(chart: &Arc<Chart>, fv: &[ComplexExpr; 3]) -> Result<QuatField, OpError> {
    Ok(QuatField::new(chart.clone(), ComplexExpr::zero(), fv.clone())?)
}

fn one_shot(field: &QuatField, op: Op, p: &[f64; 3]) -> Result<Quaternion, OpError> {
    Operators::new(field.chart().clone(), OperatorConfig::default())?.eval(field, op, p)
}

/// `(1/h_i) d f0 / d q_i` at `p`.
pub fn grad_s(chart: &Arc<Chart>, f0: &ComplexExpr, p: &[f64; 3]) -> Result<[ComplexScalar; 3], OpError> {
    Ok(one_shot(&scalar_field(chart, f0)?, Op::Grad, p)?.v)
}

pub fn div_v(chart: &Arc<Chart>, fv: &[ComplexExpr; 3], p: &[f64; 3]) -> Result<ComplexScalar, OpError> {
    Ok(one_shot(&vector_field(chart, fv)?, Op::Div, p)?.s)
}

pub fn curl_v(chart: &Arc<Chart>, fv: &[ComplexExpr; 3], p: &[f64; 3]) -> Result<[ComplexScalar; 3], OpError> {
    Ok(one_shot(&vector_field(chart, fv)?, Op::Curl, p)?.v)
}

pub fn mt_left(f: &QuatField, p: &[f64; 3]) -> Result<Quaternion, OpError> {
    one_shot(f, Op::MtLeft, p)
}

pub fn mt_right(f: &QuatField, p: &[f64; 3]) -> Result<Quaternion, OpError> {
    one_shot(f, Op::MtRight, p)
}

/// `(div f, grad f0 + curl f)`.
pub fn mt_matrix_apply(f: &QuatField, p: &[f64; 3]) -> Result<(ComplexScalar, [ComplexScalar; 3]), OpError> {
    let q = one_shot(f, Op::MtMatrix, p)?;
    Ok((q.s, q.v))
}

pub fn laplace_scalar(chart: &Arc<Chart>, f0: &ComplexExpr, p: &[f64; 3]) -> Result<ComplexScalar, OpError> {
    Ok(one_shot(&scalar_field(chart, f0)?, Op::LaplaceScalar, p)?.s)
}

pub fn laplace_vector(chart: &Arc<Chart>, fv: &[ComplexExpr; 3], p: &[f64; 3]) -> Result<[ComplexScalar; 3], OpError> {
    Ok(one_shot(&vector_field(chart, fv)?, Op::LaplaceVector, p)?.v)
}

pub fn laplace_quat(f: &QuatField, p: &[f64; 3]) -> Result<Quaternion, OpError> {
    one_shot(f, Op::LaplaceQuat, p)
}

pub fn bitsadze_vector(chart: &Arc<Chart>, fv: &[ComplexExpr; 3], p: &[f64; 3]) -> Result<[ComplexScalar; 3], OpError> {
    Ok(one_shot(&vector_field(chart, fv)?, Op::BitsadzeVector, p)?.v)
}

pub fn bitsadze_quat(f: &QuatField, p: &[f64; 3]) -> Result<Quaternion, OpError> {
    one_shot(f, Op::BitsadzeQuat, p)
}

pub fn lame_direct(
    chart: &Arc<Chart>,
    fv: &[ComplexExpr; 3],
    params: LameParams,
    p: &[f64; 3],
) -> Result<[ComplexScalar; 3], OpError> {
    Ok(one_shot(&vector_field(chart, fv)?, Op::Lame(params, LameRoute::Direct), p)?.v)
}

/// `-(alpha D D^r + beta D D)` of the pure-vector field. The full quaternion
/// is returned so callers can confirm the scalar part vanishes.
pub fn lame_factorized(
    chart: &Arc<Chart>,
    fv: &[ComplexExpr; 3],
    params: LameParams,
    p: &[f64; 3],
) -> Result<Quaternion, OpError> {
    one_shot(&vector_field(chart, fv)?, Op::Lame(params, LameRoute::Factorized), p)
}

/// `-(1/2)(D D + D D^r)` of the pure-vector field, full quaternion.
pub fn graddiv_via_mt(chart: &Arc<Chart>, fv: &[ComplexExpr; 3], p: &[f64; 3]) -> Result<Quaternion, OpError> {
    one_shot(&vector_field(chart, fv)?, Op::GradDivViaMt, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::geometry::{builtin_chart, FieldSpec};
    use std::f64::consts::PI;

    fn chart(name: &str) -> Arc<Chart> {
        Arc::new(builtin_chart(name).unwrap())
    }

    fn re(s: &str) -> ComplexExpr {
        ComplexExpr::real(parse(s).unwrap())
    }

    fn re_in(c: &Chart, s: &str) -> ComplexExpr {
        ComplexExpr::real(parse(s).unwrap().bind_coords(&c.coord_names()))
    }

    fn vecf(a: &str, b: &str, c: &str) -> [ComplexExpr; 3] {
        [re(a), re(b), re(c)]
    }

    fn field(c: &Arc<Chart>, comps: [Option<&str>; 4]) -> QuatField {
        QuatField::parse(
            c.clone(),
            &FieldSpec {
                re: comps,
                ..Default::default()
            },
            &[],
        )
        .unwrap()
    }

    fn reals(v: [ComplexScalar; 3]) -> [f64; 3] {
        for c in &v {
            assert_eq!(c.im, 0.0);
        }
        v.map(|c| c.re)
    }

    fn close3(a: [f64; 3], b: [f64; 3], tol: f64) {
        for i in 0..3 {
            assert!((a[i] - b[i]).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn grad_examples() {
        let cart = chart("cartesian");
        let sph = chart("spherical");
        close3(
            reals(grad_s(&cart, &re("q1^2"), &[3.0, 0.0, 0.0]).unwrap()),
            [6.0, 0.0, 0.0],
            1e-14,
        );
        close3(
            reals(grad_s(&sph, &re_in(&sph, "r"), &[1.7, 0.9, 2.0]).unwrap()),
            [1.0, 0.0, 0.0],
            1e-14,
        );
        close3(
            reals(grad_s(&sph, &re_in(&sph, "theta"), &[2.0, PI / 4.0, 0.0]).unwrap()),
            [0.0, 0.5, 0.0],
            1e-14,
        );
    }

    #[test]
    fn div_examples() {
        let cart = chart("cartesian");
        let sph = chart("spherical");
        assert_eq!(
            div_v(&cart, &vecf("q1", "q2", "q3"), &[0.3, -1.0, 2.0]).unwrap().re,
            3.0
        );
        for r in [0.5, 1.0, 2.0] {
            let d = div_v(&sph, &vecf("1", "0", "0"), &[r, 1.1, 0.4]).unwrap();
            assert!((d.re - 2.0 / r).abs() < 1e-14);
        }
        assert_eq!(div_v(&sph, &vecf("0", "0", "1"), &[1.2, 1.1, 0.4]).unwrap().re, 0.0);
    }

    #[test]
    fn curl_examples() {
        let cart = chart("cartesian");
        let sph = chart("spherical");
        close3(
            reals(curl_v(&cart, &vecf("-q2", "q1", "0"), &[0.2, 0.5, 0.1]).unwrap()),
            [0.0, 0.0, 2.0],
            1e-14,
        );
        let r = 1.6;
        close3(
            reals(curl_v(&sph, &vecf("0", "1", "0"), &[r, 0.8, 0.3]).unwrap()),
            [0.0, 0.0, 1.0 / r],
            1e-14,
        );
    }

    #[test]
    fn mt_examples() {
        let cart = chart("cartesian");
        let sph = chart("spherical");
        let pos = field(&cart, [None, Some("q1"), Some("q2"), Some("q3")]);
        assert!((mt_left(&pos, &[1.0, 2.0, 3.0]).unwrap() - Quaternion::real(-3.0, 0.0, 0.0, 0.0)).max_abs() < 1e-14);
        let hyper = field(&cart, [None, Some("q1"), Some("-q2"), None]);
        assert!(mt_left(&hyper, &[0.4, 0.1, 0.9]).unwrap().max_abs() < 1e-14);
        let u1 = field(&sph, [None, Some("1"), None, None]);
        for r in [0.5, 1.0, 2.0] {
            let p = [r, 1.0, 0.5];
            let q = mt_left(&u1, &p).unwrap();
            assert!((q.s.re + 2.0 / r).abs() < 1e-14 && q.vector_part().max_abs() < 1e-14);
            assert!((mt_right(&u1, &p).unwrap() - q).max_abs() < 1e-14);
        }
        let rot = field(&cart, [None, Some("-q2"), Some("q1"), None]);
        let q = mt_right(&rot, &[0.3, 0.2, 0.1]).unwrap();
        close3(reals(q.v), [0.0, 0.0, -2.0], 1e-14);
        assert_eq!(q.s, ComplexScalar::ZERO);
    }

    #[test]
    fn matrix_form() {
        let cart = chart("cartesian");
        let (s, v) = mt_matrix_apply(&field(&cart, [None, Some("q1"), None, None]), &[0.5, 0.5, 0.5]).unwrap();
        assert_eq!(s.re, 1.0);
        close3(reals(v), [0.0; 3], 0.0);
        let (s, v) = mt_matrix_apply(&field(&cart, [Some("q1*q2"), None, None, None]), &[2.0, 3.0, 0.0]).unwrap();
        assert_eq!(s, ComplexScalar::ZERO);
        close3(reals(v), [3.0, 2.0, 0.0], 1e-14);
    }

    #[test]
    fn second_order_examples() {
        let cart = chart("cartesian");
        let sph = chart("spherical");
        let p = [0.7, -0.3, 1.4];
        assert!(laplace_scalar(&cart, &re("q1^2 - q2^2"), &p).unwrap().abs() < 1e-14);
        let ps = [1.3, 0.9, 2.2];
        assert!(laplace_scalar(&sph, &re_in(&sph, "1/r"), &ps).unwrap().abs() < 1e-13);
        assert!((laplace_scalar(&sph, &re_in(&sph, "r^2"), &ps).unwrap().re - 6.0).abs() < 1e-13);

        close3(
            reals(laplace_vector(&cart, &vecf("q1^2", "0", "0"), &p).unwrap()),
            [2.0, 0.0, 0.0],
            1e-14,
        );
        close3(
            reals(laplace_vector(&cart, &vecf("q2^2", "0", "0"), &p).unwrap()),
            [2.0, 0.0, 0.0],
            1e-14,
        );
        close3(
            reals(bitsadze_vector(&cart, &vecf("q1^2", "0", "0"), &p).unwrap()),
            [2.0, 0.0, 0.0],
            1e-14,
        );
        close3(
            reals(bitsadze_vector(&cart, &vecf("q2^2", "0", "0"), &p).unwrap()),
            [-2.0, 0.0, 0.0],
            1e-14,
        );

        let r = ps[0];
        let expect = [-2.0 / (r * r), 0.0, 0.0];
        close3(
            reals(laplace_vector(&sph, &vecf("1", "0", "0"), &ps).unwrap()),
            expect,
            1e-13,
        );
        close3(
            reals(bitsadze_vector(&sph, &vecf("1", "0", "0"), &ps).unwrap()),
            expect,
            1e-13,
        );
        let u1 = field(&sph, [None, Some("1"), None, None]);
        close3(reals(laplace_quat(&u1, &ps).unwrap().v), expect, 1e-13);
        close3(reals(bitsadze_quat(&u1, &ps).unwrap().v), expect, 1e-13);
        close3(
            reals(graddiv_via_mt(&sph, &vecf("1", "0", "0"), &ps).unwrap().v),
            expect,
            1e-13,
        );
    }

    #[test]
    fn lame_examples() {
        let cart = chart("cartesian");
        let sph = chart("spherical");
        let p = [0.2, 0.6, -0.4];
        let lp = LameParams::new(2.5, 0.7).unwrap();
        close3(
            reals(lame_direct(&cart, &vecf("q1", "q2", "q3"), lp, &p).unwrap()),
            [0.0; 3],
            1e-14,
        );
        let one = LameParams::new(1.0, 1.0).unwrap();
        close3(
            reals(lame_direct(&cart, &vecf("q1^2", "0", "0"), one, &p).unwrap()),
            [6.0, 0.0, 0.0],
            1e-14,
        );
        let q = lame_factorized(&cart, &vecf("q1^2", "0", "0"), one, &p).unwrap();
        close3(reals(q.v), [6.0, 0.0, 0.0], 1e-13);
        assert!(q.s.abs() < 1e-13);

        let ps = [1.5, 1.2, 0.1];
        let r = ps[0];
        let unit = LameParams::new(1.0, 0.0).unwrap();
        let expect = [-4.0 / (r * r), 0.0, 0.0];
        close3(
            reals(lame_direct(&sph, &vecf("1", "0", "0"), unit, &ps).unwrap()),
            expect,
            1e-13,
        );
        close3(
            reals(lame_factorized(&sph, &vecf("1", "0", "0"), unit, &ps).unwrap().v),
            expect,
            1e-13,
        );
        let f = vector_field(&sph, &vecf("1", "0", "0")).unwrap();
        let ops = Operators::new(sph.clone(), OperatorConfig::default()).unwrap();
        let e = ops.eval(&f, Op::Lame(unit, LameRoute::Expanded), &ps).unwrap();
        close3(reals(e.v), expect, 1e-13);
    }

    #[test]
    fn lame_params_validation() {
        assert!(LameParams::new(0.0, 1.0).is_err());
        assert!(LameParams::new(-1.0, 1.0).is_err());
        assert!(LameParams::new(3.0, -2.0).is_err());
        assert!(LameParams::new(3.0, -1.9).is_ok());
        assert!(LameParams::new(f64::NAN, 0.0).is_err());
        let lp = LameParams::new(1.0, 1.0).unwrap();
        assert_eq!((lp.alpha(), lp.beta(), lp.poisson_ratio()), (1.0, 2.0, 0.25));
    }

    #[test]
    fn refuses_singular_points() {
        let sph = chart("spherical");
        let u1 = field(&sph, [None, Some("1"), None, None]);
        for p in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, PI, 0.0]] {
            assert!(matches!(
                mt_left(&u1, &p),
                Err(OpError::Geometry(GeometryError::OutOfDomain { .. }))
            ));
        }
        let cyl = chart("cylindrical");
        let f = field(&cyl, [Some("rho"), None, None, None]);
        assert!(mt_left(&f, &[0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(OperatorConfig::finite_difference(FdScheme::Central2, 0.0).is_err());
        assert!(OperatorConfig::finite_difference(FdScheme::Central2, f64::NAN).is_err());
        assert!(OperatorConfig::finite_difference(FdScheme::Richardson, 1e-3).is_ok());
        assert!(Op::from_cli("lame", None).is_err());
        assert!(Op::from_cli("nabla", None).is_err());
        for n in Op::CLI_NAMES.iter().filter(|n| **n != "lame") {
            Op::from_cli(n, None).unwrap();
        }
    }

    #[test]
    fn fd_mode_tracks_symbolic() {
        let sph = chart("spherical");
        let f = field(
            &sph,
            [
                Some("r^2*cos(theta)"),
                Some("sin(psi)*r"),
                Some("theta^2"),
                Some("r*theta"),
            ],
        );
        let sym = Operators::new(sph.clone(), OperatorConfig::default()).unwrap();
        let fd = Operators::new(
            sph.clone(),
            OperatorConfig::finite_difference(FdScheme::Central2, 1e-4).unwrap(),
        )
        .unwrap();
        let p = [1.4, 1.0, 0.7];
        for op in [Op::MtLeft, Op::LaplaceQuat, Op::BitsadzeQuat, Op::MtLeftRight] {
            let a = sym.eval(&f, op, &p).unwrap();
            let b = fd.eval(&f, op, &p).unwrap();
            assert!((a - b).max_abs() < 1e-4, "{op:?}: {a} vs {b}");
        }
    }

    #[test]
    fn unvalidated_chart_rejected() {
        let c = Chart::from_spec(&crate::geometry::ChartSpec {
            name: "plain",
            coords: ["a", "b", "c"],
            maps: ["a", "b", "c"],
            metric: None,
            domain: &[],
            region: [(0.0, 1.0); 3],
        })
        .unwrap();
        assert!(matches!(
            Operators::new(Arc::new(c), OperatorConfig::default()),
            Err(OpError::Geometry(GeometryError::ChartNotValidated(_)))
        ));
    }
}
