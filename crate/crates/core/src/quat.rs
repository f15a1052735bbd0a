//! Complex quaternions `a = a0 + a1 i1 + a2 i2 + a3 i3` with `a_k` complex.
//!
//! The complex unit `i` commutes with the quaternionic units, so the algebra
//! is associative but not commutative, and it has zero divisors: nonzero `a`
//! with `a * conj(a) = 0`, e.g. `1 + i*i1`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum QuatError {
    #[error("quaternion is zero or a zero divisor (|a conj(a)| = {0:e})")]
    ZeroDivisorOrZero(f64),
    #[error("non-finite quaternion component")]
    NonFinite,
}

/// A complex number over `f64` whose imaginary unit commutes with `i1, i2, i3`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ComplexScalar {
    pub re: f64,
    pub im: f64,
}

impl ComplexScalar {
    pub const ZERO: Self = Self { re: 0.0, im: 0.0 };
    pub const ONE: Self = Self { re: 1.0, im: 0.0 };
    pub const I: Self = Self { re: 0.0, im: 1.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    /// Checked constructor; rejects NaN and infinities.
    pub fn try_new(re: f64, im: f64) -> Result<Self, QuatError> {
        if re.is_finite() && im.is_finite() {
            Ok(Self { re, im })
        } else {
            Err(QuatError::NonFinite)
        }
    }

    pub const fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Complex modulus.
    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.re * k, self.im * k)
    }
}

impl From<f64> for ComplexScalar {
    fn from(re: f64) -> Self {
        Self::real(re)
    }
}

impl Add for ComplexScalar {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl AddAssign for ComplexScalar {
    fn add_assign(&mut self, o: Self) {
        self.re += o.re;
        self.im += o.im;
    }
}

impl Sub for ComplexScalar {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl Neg for ComplexScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Mul for ComplexScalar {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Div for ComplexScalar {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let d = o.norm_sqr();
        let n = self * o.conj();
        Self::new(n.re / d, n.im / d)
    }
}

impl fmt::Display for ComplexScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im == 0.0 {
            write!(f, "{}", self.re)
        } else if self.im < 0.0 {
            write!(f, "{}-{}i", self.re, -self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

/// Complex quaternion: scalar part `s = Sc(a)` and vector part `v = Vec(a)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub s: ComplexScalar,
    pub v: [ComplexScalar; 3],
}

impl Quaternion {
    pub const ZERO: Self = Self {
        s: ComplexScalar::ZERO,
        v: [ComplexScalar::ZERO; 3],
    };
    pub const ONE: Self = Self {
        s: ComplexScalar::ONE,
        v: [ComplexScalar::ZERO; 3],
    };

    pub const fn new(s: ComplexScalar, v: [ComplexScalar; 3]) -> Self {
        Self { s, v }
    }

    /// Checked constructor; rejects non-finite components.
    pub fn try_new(s: ComplexScalar, v: [ComplexScalar; 3]) -> Result<Self, QuatError> {
        let q = Self { s, v };
        if q.is_finite() {
            Ok(q)
        } else {
            Err(QuatError::NonFinite)
        }
    }

    /// Quaternion with real components `(a0, a1, a2, a3)`.
    pub const fn real(a0: f64, a1: f64, a2: f64, a3: f64) -> Self {
        Self {
            s: ComplexScalar::real(a0),
            v: [
                ComplexScalar::real(a1),
                ComplexScalar::real(a2),
                ComplexScalar::real(a3),
            ],
        }
    }

    pub const fn scalar(s: ComplexScalar) -> Self {
        Self {
            s,
            v: [ComplexScalar::ZERO; 3],
        }
    }

    pub const fn vector(v: [ComplexScalar; 3]) -> Self {
        Self {
            s: ComplexScalar::ZERO,
            v,
        }
    }

    /// The basis element `i_k`, `k = 0..=3` (`i_0 = 1`).
    pub fn basis(k: usize) -> Self {
        let mut q = Self::ZERO;
        if k == 0 {
            q.s = ComplexScalar::ONE;
        } else {
            q.v[k - 1] = ComplexScalar::ONE;
        }
        q
    }

    /// Components in the order `a0, a1, a2, a3`.
    pub fn components(&self) -> [ComplexScalar; 4] {
        [self.s, self.v[0], self.v[1], self.v[2]]
    }

    pub fn from_components(c: [ComplexScalar; 4]) -> Self {
        Self::new(c[0], [c[1], c[2], c[3]])
    }

    pub fn scalar_part(&self) -> Self {
        Self::scalar(self.s)
    }

    pub fn vector_part(&self) -> Self {
        Self::vector(self.v)
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.is_finite())
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.s.scale(k), self.v.map(|c| c.scale(k)))
    }

    pub fn scale_complex(&self, k: ComplexScalar) -> Self {
        Self::new(self.s * k, self.v.map(|c| c * k))
    }

    /// Largest complex modulus among the four components.
    pub fn max_abs(&self) -> f64 {
        self.components().iter().map(|c| c.abs()).fold(0.0, f64::max)
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.s + o.s,
            [self.v[0] + o.v[0], self.v[1] + o.v[1], self.v[2] + o.v[2]],
        )
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(
            self.s - o.s,
            [self.v[0] - o.v[0], self.v[1] - o.v[1], self.v[2] - o.v[2]],
        )
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.s, self.v.map(|c| -c))
    }
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        qmul(&self, &o)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}) + ({})i1 + ({})i2 + ({})i3",
            self.s, self.v[0], self.v[1], self.v[2]
        )
    }
}

/// `a b = a0 b0 - <a,b> + a0 b + b0 a + [a,b]`.
pub fn qmul(a: &Quaternion, b: &Quaternion) -> Quaternion {
    let dot = qdot(a, b);
    let cross = qcross(a, b).v;
    let s = a.s * b.s - dot;
    let v = [0, 1, 2].map(|k| a.s * b.v[k] + b.s * a.v[k] + cross[k]);
    Quaternion::new(s, v)
}

/// Quaternionic conjugation: scalar part kept, vector part negated. The
/// complex components are not conjugated.
pub fn qconj(a: &Quaternion) -> Quaternion {
    Quaternion::new(a.s, a.v.map(|c| -c))
}

/// Euclidean norm `sqrt(sum |a_k|^2)` with `|a_k|` the complex modulus.
pub fn qnorm(a: &Quaternion) -> f64 {
    a.components().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Bilinear form `sum a_k b_k` over the vector parts (no complex conjugation).
pub fn qdot(a: &Quaternion, b: &Quaternion) -> ComplexScalar {
    a.v[0] * b.v[0] + a.v[1] * b.v[1] + a.v[2] * b.v[2]
}

/// Cross product of the vector parts, as a pure-vector quaternion.
pub fn qcross(a: &Quaternion, b: &Quaternion) -> Quaternion {
    let (x, y) = (&a.v, &b.v);
    Quaternion::vector([
        x[1] * y[2] - x[2] * y[1],
        x[2] * y[0] - x[0] * y[2],
        x[0] * y[1] - x[1] * y[0],
    ])
}

/// `a conj(a) = a0^2 + a1^2 + a2^2 + a3^2`, a complex scalar.
pub fn self_conj_product(a: &Quaternion) -> ComplexScalar {
    a.components().iter().fold(ComplexScalar::ZERO, |acc, &c| acc + c * c)
}

fn zero_divisor_threshold(a: &Quaternion) -> f64 {
    let n = qnorm(a);
    1e-12 * (1.0 + n * n)
}

/// True iff `a != 0` and `|a conj(a)|` is below the scaled tolerance.
pub fn is_zero_divisor(a: &Quaternion) -> bool {
    if a.components().iter().all(|c| *c == ComplexScalar::ZERO) {
        return false;
    }
    self_conj_product(a).abs() <= zero_divisor_threshold(a)
}

/// `conj(a) / (a conj(a))`.
pub fn qinv(a: &Quaternion) -> Result<Quaternion, QuatError> {
    let n = self_conj_product(a);
    if n.abs() <= zero_divisor_threshold(a) {
        return Err(QuatError::ZeroDivisorOrZero(n.abs()));
    }
    let inv = ComplexScalar::ONE / n;
    Ok(qconj(a).scale_complex(inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const I: ComplexScalar = ComplexScalar::I;

    fn c(re: f64) -> ComplexScalar {
        ComplexScalar::real(re)
    }

    fn close(a: &Quaternion, b: &Quaternion, tol: f64) -> bool {
        (*a - *b).max_abs() <= tol
    }

    #[test]
    fn basis_relations() {
        let (i1, i2, i3) = (Quaternion::basis(1), Quaternion::basis(2), Quaternion::basis(3));
        assert_eq!(i1 * i2, i3);
        assert_eq!(i2 * i3, i1);
        assert_eq!(i3 * i1, i2);
        assert_eq!(i2 * i1, -i3);
        assert_eq!(i1 * i1, -Quaternion::ONE);
    }

    #[test]
    fn product_with_conjugate_is_sum_of_squares() {
        let a = Quaternion::real(1.0, 1.0, 0.0, 0.0);
        let b = Quaternion::real(1.0, -1.0, 0.0, 0.0);
        assert_eq!(a * b, Quaternion::real(2.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn pure_vectors_multiply_as_minus_dot_plus_cross() {
        let a = Quaternion::real(0.0, 1.0, 0.0, 0.0);
        let b = Quaternion::real(0.0, 0.0, 1.0, 0.0);
        assert_eq!(a * b, Quaternion::basis(3));
        assert_eq!(qdot(&a, &b), ComplexScalar::ZERO);
    }

    #[test]
    fn conjugation() {
        assert_eq!(
            qconj(&Quaternion::real(1.0, 2.0, 0.0, 0.0)),
            Quaternion::real(1.0, -2.0, 0.0, 0.0)
        );
        let s = Quaternion::scalar(ComplexScalar::new(3.0, -1.0));
        assert_eq!(qconj(&s), s);
        let (i1, i2) = (Quaternion::basis(1), Quaternion::basis(2));
        assert_eq!(qconj(&(i1 * i2)), -Quaternion::basis(3));
        assert_eq!(qconj(&(i1 * i2)), qconj(&i2) * qconj(&i1));
    }

    #[test]
    fn norms() {
        assert_eq!(qnorm(&Quaternion::real(1.0, 1.0, 1.0, 1.0)), 2.0);
        let a = Quaternion::vector([I, c(0.0), c(0.0)]);
        assert_eq!(qnorm(&a), 1.0);
        assert_eq!(qnorm(&Quaternion::ZERO), 0.0);
    }

    #[test]
    fn inverses() {
        let i1 = Quaternion::basis(1);
        assert_eq!(qinv(&i1).unwrap(), -i1);
        assert_eq!(
            qinv(&Quaternion::real(2.0, 0.0, 0.0, 0.0)).unwrap(),
            Quaternion::real(0.5, 0.0, 0.0, 0.0)
        );
        let zd = Quaternion::new(c(1.0), [I, c(0.0), c(0.0)]);
        assert!(matches!(qinv(&zd), Err(QuatError::ZeroDivisorOrZero(_))));
        assert!(matches!(qinv(&Quaternion::ZERO), Err(QuatError::ZeroDivisorOrZero(_))));
    }

    #[test]
    fn zero_divisors() {
        let zd = Quaternion::new(c(1.0), [I, c(0.0), c(0.0)]);
        assert!(is_zero_divisor(&zd));
        assert!(!is_zero_divisor(&Quaternion::real(1.0, 1.0, 0.0, 0.0)));
        assert!(!is_zero_divisor(&Quaternion::ZERO));
        // a zero divisor times anything stays singular
        let b = Quaternion::real(0.3, -1.0, 2.0, 0.5);
        assert!(self_conj_product(&(zd * b)).abs() < 1e-12);
    }

    #[test]
    fn dot_is_bilinear_not_hermitian() {
        let i1 = Quaternion::basis(1);
        assert_eq!(qdot(&i1, &i1), ComplexScalar::ONE);
        let ii1 = Quaternion::vector([I, c(0.0), c(0.0)]);
        assert_eq!(qdot(&ii1, &ii1), c(-1.0));
        assert_eq!(qdot(&i1, &Quaternion::basis(2)), ComplexScalar::ZERO);
    }

    #[test]
    fn cross_products() {
        let (i1, i2, i3) = (Quaternion::basis(1), Quaternion::basis(2), Quaternion::basis(3));
        assert_eq!(qcross(&i1, &i2), i3);
        assert_eq!(qcross(&i1, &i1), Quaternion::ZERO);
        assert_eq!(qcross(&i2, &i1), -i3);
        // scalar parts are ignored
        let a = Quaternion::real(5.0, 1.0, 0.0, 0.0);
        assert_eq!(qcross(&a, &i2), i3);
    }

    #[test]
    fn checked_constructors_reject_non_finite() {
        assert!(ComplexScalar::try_new(f64::NAN, 0.0).is_err());
        assert!(Quaternion::try_new(c(1.0), [c(f64::INFINITY), c(0.0), c(0.0)]).is_err());
        assert!(Quaternion::try_new(c(1.0), [c(0.0); 3]).is_ok());
    }

    #[test]
    fn integer_associativity_is_exact() {
        let a = Quaternion::new(ComplexScalar::new(1.0, 2.0), [c(-3.0), I, c(4.0)]);
        let b = Quaternion::new(c(2.0), [ComplexScalar::new(0.0, -1.0), c(5.0), c(1.0)]);
        let d = Quaternion::new(ComplexScalar::new(-1.0, 1.0), [c(2.0), c(-2.0), I]);
        assert_eq!((a * b) * d, a * (b * d));
    }

    fn complex() -> impl Strategy<Value = ComplexScalar> {
        (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(re, im)| ComplexScalar::new(re, im))
    }

    fn quat() -> impl Strategy<Value = Quaternion> {
        (complex(), complex(), complex(), complex()).prop_map(|(a, b, c, d)| Quaternion::new(a, [b, c, d]))
    }

    fn real_quat() -> impl Strategy<Value = Quaternion> {
        (-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b, c, d)| Quaternion::real(a, b, c, d))
    }

    proptest! {
        #[test]
        fn associativity(a in quat(), b in quat(), d in quat()) {
            let l = (a * b) * d;
            let r = a * (b * d);
            prop_assert!(close(&l, &r, 1e-12 * (1.0 + l.max_abs())));
        }

        #[test]
        fn conjugation_reverses_products(a in quat(), b in quat()) {
            prop_assert!(close(&qconj(&(a * b)), &(qconj(&b) * qconj(&a)), 1e-12));
        }

        #[test]
        fn pure_vector_law(a in quat(), b in quat()) {
            let (a, b) = (a.vector_part(), b.vector_part());
            let rhs = qcross(&a, &b) - Quaternion::scalar(qdot(&a, &b));
            prop_assert_eq!(a * b, rhs);
        }

        #[test]
        fn real_norm_is_multiplicative(a in real_quat(), b in real_quat()) {
            let lhs = qnorm(&(a * b));
            let rhs = qnorm(&a) * qnorm(&b);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
        }

        #[test]
        fn inverse_is_right_inverse(a in quat()) {
            prop_assume!(!is_zero_divisor(&a) && qnorm(&a) > 0.0);
            // skip the near-singular shell where conditioning blows up
            prop_assume!(self_conj_product(&a).abs() > 1e-3);
            let p = a * qinv(&a).unwrap();
            prop_assert!(close(&p, &Quaternion::ONE, 1e-10));
        }

        #[test]
        fn cross_is_antisymmetric(a in quat(), b in quat()) {
            prop_assert_eq!(qcross(&a, &b), -qcross(&b, &a));
        }
    }
}
