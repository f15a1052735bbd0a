//! Curvilinear vector calculus over any [`Repr`].
//!
//! Everything here builds functions, not numbers: a [`Calculus`] turns
//! component functions into operator results that can then be evaluated at
//! as many points as needed. Components are in the local frame.

use super::repr::{FdSettings, NumFn, Repr};
use crate::expr::{EvalError, Expr};
use crate::geometry::{Chart, ComplexExpr, QuatField};
use crate::quat::{ComplexScalar, Quaternion};

/// Complex-valued function as a pair of real ones. Operators only ever
/// multiply by real metric factors, so the parts never mix.
#[derive(Debug, Clone)]
pub struct Cx<S> {
    pub re: S,
    pub im: S,
}

impl<S: Repr> Cx<S> {
    pub fn new(re: S, im: S) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(S::constant(0.0), S::constant(0.0))
    }

    fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Self::new(f(&self.re), f(&self.im))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn neg(&self) -> Self {
        self.map(S::neg)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|s| s.scale(c))
    }

    pub fn mul_real(&self, k: &S) -> Self {
        self.map(|s| s.mul(k))
    }

    pub fn div_real(&self, k: &S) -> Self {
        self.map(|s| s.div(k))
    }

    pub fn partial(&self, axis: usize) -> Self {
        self.map(|s| s.partial(axis))
    }

    pub fn eval(&self, p: &[f64; 3]) -> Result<ComplexScalar, EvalError> {
        let im = if self.im.is_zero() { 0.0 } else { self.im.eval(p)? };
        Ok(ComplexScalar::new(self.re.eval(p)?, im))
    }
}

pub type FrameVec<S> = [Cx<S>; 3];

fn vec_add<S: Repr>(a: &FrameVec<S>, b: &FrameVec<S>) -> FrameVec<S> {
    [0, 1, 2].map(|i| a[i].add(&b[i]))
}

fn vec_sub<S: Repr>(a: &FrameVec<S>, b: &FrameVec<S>) -> FrameVec<S> {
    [0, 1, 2].map(|i| a[i].sub(&b[i]))
}

pub fn vec_scale<S: Repr>(a: &FrameVec<S>, c: f64) -> FrameVec<S> {
    [0, 1, 2].map(|i| a[i].scale(c))
}

pub fn eval_vec<S: Repr>(v: &FrameVec<S>, p: &[f64; 3]) -> Result<[ComplexScalar; 3], EvalError> {
    Ok([v[0].eval(p)?, v[1].eval(p)?, v[2].eval(p)?])
}

/// Quaternion-valued function `f0 + f1 u1 + f2 u2 + f3 u3`.
#[derive(Debug, Clone)]
pub struct QField<S> {
    pub f0: Cx<S>,
    pub fv: FrameVec<S>,
}

impl<S: Repr> QField<S> {
    pub fn new(f0: Cx<S>, fv: FrameVec<S>) -> Self {
        Self { f0, fv }
    }

    pub fn pure_vector(fv: FrameVec<S>) -> Self {
        Self::new(Cx::zero(), fv)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.f0.add(&o.f0), vec_add(&self.fv, &o.fv))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.f0.scale(c), vec_scale(&self.fv, c))
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn eval(&self, p: &[f64; 3]) -> Result<Quaternion, EvalError> {
        Ok(Quaternion::new(self.f0.eval(p)?, eval_vec(&self.fv, p)?))
    }
}

/// Turns stored expressions into a representation.
pub trait Lift<S: Repr> {
    fn lift(&self, e: &Expr) -> S;

    fn lift_complex(&self, c: &ComplexExpr) -> Cx<S> {
        Cx::new(self.lift(&c.re), self.lift(&c.im))
    }

    fn lift_vec(&self, v: &[ComplexExpr; 3]) -> FrameVec<S> {
        [0, 1, 2].map(|i| self.lift_complex(&v[i]))
    }

    fn lift_field(&self, f: &QuatField) -> QField<S> {
        QField::new(self.lift_complex(f.f0()), self.lift_vec(f.fv()))
    }
}

pub struct SymbolicLift;

impl Lift<Expr> for SymbolicLift {
    fn lift(&self, e: &Expr) -> Expr {
        e.clone()
    }
}

pub struct FdLift(pub FdSettings);

impl Lift<NumFn> for FdLift {
    fn lift(&self, e: &Expr) -> NumFn {
        NumFn::from_expr(e, self.0)
    }
}

/// Which part of a second-order expansion a term belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Group {
    GradDiv,
    CurlCurl,
}

/// `sign * H^outer d_{outer_axis}( H^inner d_{inner_axis}( H^weight f_comp ) )`,
/// where `H^e = h1^e1 h2^e2 h3^e3`.
#[derive(Debug, Clone, Copy)]
struct Term {
    group: Group,
    sign: f64,
    outer: [i8; 3],
    outer_axis: usize,
    inner: [i8; 3],
    inner_axis: usize,
    weight: [i8; 3],
    comp: usize,
}

const fn gd(axis: usize, c: usize) -> Term {
    let mut outer = [0; 3];
    outer[axis] = -1;
    let mut weight = [1; 3];
    weight[c] = 0;
    Term {
        group: Group::GradDiv,
        sign: 1.0,
        outer,
        outer_axis: axis,
        inner: [-1, -1, -1],
        inner_axis: c,
        weight,
        comp: c,
    }
}

#[allow(clippy::too_many_arguments)]
const fn cc(
    sign: f64,
    outer: [i8; 3],
    outer_axis: usize,
    inner: [i8; 3],
    inner_axis: usize,
    weight: [i8; 3],
    comp: usize,
) -> Term {
    Term {
        group: Group::CurlCurl,
        sign,
        outer,
        outer_axis,
        inner,
        inner_axis,
        weight,
        comp,
    }
}

const H1: [i8; 3] = [1, 0, 0];
const H2: [i8; 3] = [0, 1, 0];
const H3: [i8; 3] = [0, 0, 1];
const INV_H2H3: [i8; 3] = [0, -1, -1];
const INV_H1H3: [i8; 3] = [-1, 0, -1];
const INV_H1H2: [i8; 3] = [-1, -1, 0];
const H1_OVER_H2H3: [i8; 3] = [1, -1, -1];
const H2_OVER_H1H3: [i8; 3] = [-1, 1, -1];
const H3_OVER_H1H2: [i8; 3] = [-1, -1, 1];

/// Fully expanded `grad div - curl curl`, component by component. The
/// curl-curl terms carry the signs they have in the vector Laplacian; the
/// Bitsadze and Lamé expansions reuse them with a different group weight.
const VECTOR_EXPANSION: [[Term; 7]; 3] = [
    [
        gd(0, 0),
        gd(0, 1),
        gd(0, 2),
        cc(-1.0, INV_H2H3, 1, H3_OVER_H1H2, 0, H2, 1),
        cc(1.0, INV_H2H3, 1, H3_OVER_H1H2, 1, H1, 0),
        cc(1.0, INV_H2H3, 2, H2_OVER_H1H3, 2, H1, 0),
        cc(-1.0, INV_H2H3, 2, H2_OVER_H1H3, 0, H3, 2),
    ],
    [
        gd(1, 0),
        gd(1, 1),
        gd(1, 2),
        cc(-1.0, INV_H1H3, 2, H1_OVER_H2H3, 1, H3, 2),
        cc(1.0, INV_H1H3, 2, H1_OVER_H2H3, 2, H2, 1),
        cc(1.0, INV_H1H3, 0, H3_OVER_H1H2, 0, H2, 1),
        cc(-1.0, INV_H1H3, 0, H3_OVER_H1H2, 1, H1, 0),
    ],
    [
        gd(2, 0),
        gd(2, 1),
        gd(2, 2),
        cc(-1.0, INV_H1H2, 0, H2_OVER_H1H3, 2, H1, 0),
        cc(1.0, INV_H1H2, 0, H2_OVER_H1H3, 0, H3, 2),
        cc(1.0, INV_H1H2, 1, H1_OVER_H2H3, 1, H3, 2),
        cc(-1.0, INV_H1H2, 1, H1_OVER_H2H3, 2, H2, 1),
    ],
];

/// Metric coefficients in a given representation, plus the operators.
pub struct Calculus<S> {
    h: [S; 3],
}

impl<S: Repr> Calculus<S> {
    pub fn new(h: [S; 3]) -> Self {
        Self { h }
    }

    pub fn for_chart(chart: &Chart, lift: &impl Lift<S>) -> Self {
        let h = chart.metric_exprs();
        Self::new([lift.lift(&h[0]), lift.lift(&h[1]), lift.lift(&h[2])])
    }

    pub fn metric(&self) -> &[S; 3] {
        &self.h
    }

    /// `h1^e1 h2^e2 h3^e3` for small integer exponents.
    fn hpow(&self, e: [i8; 3]) -> S {
        let mut num = S::constant(1.0);
        let mut den = S::constant(1.0);
        for (k, &ek) in e.iter().enumerate() {
            for _ in 0..ek.unsigned_abs() {
                if ek > 0 {
                    num = num.mul(&self.h[k]);
                } else {
                    den = den.mul(&self.h[k]);
                }
            }
        }
        num.div(&den)
    }

    fn h123(&self) -> S {
        self.hpow([1, 1, 1])
    }

    /// `(1/h_i) d f0/d q_i`.
    pub fn grad(&self, f0: &Cx<S>) -> FrameVec<S> {
        [0, 1, 2].map(|i| f0.partial(i).div_real(&self.h[i]))
    }

    /// `(1/h1h2h3) [d(h2h3 f1)/dq1 + d(h1h3 f2)/dq2 + d(h1h2 f3)/dq3]`.
    pub fn div(&self, fv: &FrameVec<S>) -> Cx<S> {
        let mut acc = Cx::zero();
        for i in 0..3 {
            let mut w = [1; 3];
            w[i] = 0;
            acc = acc.add(&fv[i].mul_real(&self.hpow(w)).partial(i));
        }
        acc.div_real(&self.h123())
    }

    pub fn curl(&self, fv: &FrameVec<S>) -> FrameVec<S> {
        let h = &self.h;
        // h_k f_k
        let hf = [0, 1, 2].map(|k| fv[k].mul_real(&h[k]));
        [
            hf[2].partial(1).sub(&hf[1].partial(2)).div_real(&h[1].mul(&h[2])),
            hf[0].partial(2).sub(&hf[2].partial(0)).div_real(&h[0].mul(&h[2])),
            hf[1].partial(0).sub(&hf[0].partial(1)).div_real(&h[0].mul(&h[1])),
        ]
    }

    /// `D f = -div f + grad f0 + curl f`.
    pub fn mt_left(&self, f: &QField<S>) -> QField<S> {
        QField::new(self.div(&f.fv).neg(), vec_add(&self.grad(&f.f0), &self.curl(&f.fv)))
    }

    /// `D^r f = -div f + grad f0 - curl f`.
    pub fn mt_right(&self, f: &QField<S>) -> QField<S> {
        QField::new(self.div(&f.fv).neg(), vec_sub(&self.grad(&f.f0), &self.curl(&f.fv)))
    }

    /// `(div f, grad f0 + curl f)`.
    pub fn mt_matrix(&self, f: &QField<S>) -> (Cx<S>, FrameVec<S>) {
        (self.div(&f.fv), vec_add(&self.grad(&f.f0), &self.curl(&f.fv)))
    }

    /// Scalar Laplacian from its expanded form.
    pub fn laplace_scalar(&self, f0: &Cx<S>) -> Cx<S> {
        let mut acc = Cx::zero();
        for i in 0..3 {
            let mut e = [1; 3];
            e[i] = -1;
            acc = acc.add(&f0.partial(i).mul_real(&self.hpow(e)).partial(i));
        }
        acc.div_real(&self.h123())
    }

    /// `div grad f0`.
    pub fn laplace_scalar_composed(&self, f0: &Cx<S>) -> Cx<S> {
        self.div(&self.grad(f0))
    }

    fn term(&self, t: &Term, fv: &FrameVec<S>) -> Cx<S> {
        fv[t.comp]
            .mul_real(&self.hpow(t.weight))
            .partial(t.inner_axis)
            .mul_real(&self.hpow(t.inner))
            .partial(t.outer_axis)
            .mul_real(&self.hpow(t.outer))
            .scale(t.sign)
    }

    /// Evaluates the expanded table with separate weights on the grad-div
    /// and curl-curl groups.
    fn expanded(&self, fv: &FrameVec<S>, graddiv: f64, curlcurl: f64) -> FrameVec<S> {
        [0, 1, 2].map(|i| {
            let mut acc = Cx::zero();
            for t in &VECTOR_EXPANSION[i] {
                let w = match t.group {
                    Group::GradDiv => graddiv,
                    Group::CurlCurl => curlcurl,
                };
                if w != 0.0 {
                    acc = acc.add(&self.term(t, fv).scale(w));
                }
            }
            acc
        })
    }

    /// Vector Laplacian from its expanded form.
    pub fn laplace_vector(&self, fv: &FrameVec<S>) -> FrameVec<S> {
        self.expanded(fv, 1.0, 1.0)
    }

    /// `grad div f - curl curl f`.
    pub fn laplace_vector_composed(&self, fv: &FrameVec<S>) -> FrameVec<S> {
        vec_sub(&self.graddiv(fv), &self.curl(&self.curl(fv)))
    }

    /// Bitsadze-type operator from its expanded form.
    pub fn bitsadze_vector(&self, fv: &FrameVec<S>) -> FrameVec<S> {
        self.expanded(fv, 1.0, -1.0)
    }

    /// `grad div f + curl curl f`.
    pub fn bitsadze_vector_composed(&self, fv: &FrameVec<S>) -> FrameVec<S> {
        vec_add(&self.graddiv(fv), &self.curl(&self.curl(fv)))
    }

    pub fn graddiv(&self, fv: &FrameVec<S>) -> FrameVec<S> {
        self.grad(&self.div(fv))
    }

    pub fn laplace_quat(&self, f: &QField<S>) -> QField<S> {
        QField::new(self.laplace_scalar(&f.f0), self.laplace_vector(&f.fv))
    }

    pub fn bitsadze_quat(&self, f: &QField<S>) -> QField<S> {
        QField::new(self.laplace_scalar(&f.f0), self.bitsadze_vector(&f.fv))
    }

    /// `D D f`.
    pub fn mt_squared(&self, f: &QField<S>) -> QField<S> {
        self.mt_left(&self.mt_left(f))
    }

    /// `D D^r f`.
    pub fn mt_left_right(&self, f: &QField<S>) -> QField<S> {
        self.mt_left(&self.mt_right(f))
    }

    /// `mu (grad div - curl curl) f + (mu + lambda) grad div f`, built from
    /// grad, div and curl.
    pub fn lame_direct(&self, fv: &FrameVec<S>, mu: f64, lambda: f64) -> FrameVec<S> {
        vec_add(
            &vec_scale(&self.laplace_vector_composed(fv), mu),
            &vec_scale(&self.graddiv(fv), mu + lambda),
        )
    }

    /// Expanded curvilinear Lamé operator: `(2 mu + lambda)` on the grad-div
    /// terms, `mu` on the curl-curl terms.
    pub fn lame_expanded(&self, fv: &FrameVec<S>, mu: f64, lambda: f64) -> FrameVec<S> {
        self.expanded(fv, 2.0 * mu + lambda, mu)
    }

    /// `-(alpha D D^r + beta D D)` applied to the pure-vector field.
    pub fn lame_factorized(&self, fv: &FrameVec<S>, alpha: f64, beta: f64) -> QField<S> {
        let f = QField::pure_vector(fv.clone());
        self.mt_left_right(&f)
            .scale(alpha)
            .add(&self.mt_squared(&f).scale(beta))
            .neg()
    }

    /// `alpha D D^r + beta D D` with no leading sign.
    pub fn lame_factorized_unsigned(&self, fv: &FrameVec<S>, alpha: f64, beta: f64) -> QField<S> {
        self.lame_factorized(fv, alpha, beta).neg()
    }

    /// `-(1/2)(D D + D D^r)` on the pure-vector field.
    pub fn graddiv_via_mt(&self, fv: &FrameVec<S>) -> QField<S> {
        let f = QField::pure_vector(fv.clone());
        self.mt_squared(&f).add(&self.mt_left_right(&f)).scale(-0.5)
    }
}
